#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trinity/ckks.hpp"
#include "trinity/kernels.hpp"
#include "trinity/tfhe.hpp"

// Cycle-level analytical model of the Trinity accelerator: a hardware
// inventory, kernel graphs extracted from the FHE operations implemented by
// the ckks/tfhe/convert libraries, NTT mapping strategies, role allocation,
// a deterministic list scheduler, and utilization / work-breakdown reports.
//
// Modeling conventions (fixed, relied on by the reports):
//   * Work is counted in modular multiplies. A limb NTT of length N performs
//     (N/2)*log2(N) butterfly multiplies; a basis-conversion node src*tgt*N;
//     an inner-product accumulation event rows*N; elementwise multiplies N
//     per recorded event. Additions, permutations, rotations, decompositions
//     and transfers carry zero multiply work.
//   * A unit processes `lanes` elements per cycle once its pipeline is full;
//     each kernel occupancy pays a fill latency of (pipeline stages +
//     fill_extra) cycles. Composed transform pipelines add their members'
//     stages.
//   * Memory is bandwidth-only. Working sets that fit the per-cluster
//     scratchpad are treated as resident; streams that exceed it become
//     explicit HBM transfer nodes. Layout switches feeding basis conversions
//     become NoC transfer nodes. Capacities produce feasibility notes, not
//     stalls.
namespace trinity::archsim {

using trinity::KernelCounts;

// ---------------------------------------------------------------------------
// Hardware description
// ---------------------------------------------------------------------------

// One CU shape: `columns` butterfly stages (NTT role) and `count` instances
// of that shape per cluster. In MAC role a CU retires n_r multiply-adds per
// cycle; in NTT role it processes 2*n_r elements per cycle.
struct CuSpec {
  int columns = 0;
  int count = 0;
};

struct HardwareConfig {
  int clusters = 4;
  int word_bits = 36;

  // NTTU: rigid radix-2 pipeline, M butterflies per stage, log2(2M) stages.
  int nttu_per_cluster = 2;
  int nttu_m = 128;
  int transpose_per_cluster = 2;
  std::vector<CuSpec> cu_inventory = {{1, 1}, {2, 4}, {3, 1}};
  int n_r = 128;

  int autou_per_cluster = 1;
  int rotator_per_cluster = 1;
  int vpu_per_cluster = 1;
  int ewe_per_cluster = 1;

  int unit_lanes = 256;  // elements/cycle for NTTU, TP, AutoU, Rotator, VPU
  int ewe_lanes = 512;
  int cu_ntt_lanes = 256;  // override knob: 2*n_r in NTT role
  int cu_mac_lanes = 128;  // override knob: n_r in MAC role

  // Pipeline fill charged per kernel occupancy: unit stages + fill_extra.
  int fill_extra = 4;

  // CU-disabled ablation: CUs are removed and MAC kernels fall back to one
  // fixed systolic array per cluster with `sa_depth` rows. The array retires
  // bursts of sa_depth rows and pays the usual fill_extra turnaround per
  // burst, so its sustained rate is n_r * sa_depth / (sa_depth + fill_extra)
  // multiply-adds per cycle.
  bool cu_enabled = true;
  int sa_depth = 12;

  // Bandwidths in bytes/cycle at the nominal 1 GHz clock (1 GB/s = 1 B/cyc).
  // Totals across the chip; each cluster owns an even share.
  double hbm_bytes_per_cycle = 1000.0;
  double noc_bytes_per_cycle = 1152.0;

  // Capacities, used for residency decisions and feasibility notes.
  double scratchpad_mb_per_cluster = 45.0;
  double local_buffer_mb = 2.81;

  int nttu_stages() const;  // log2(2*nttu_m)
  void validate() const;    // InvalidArgument on nonsensical values
  uint64_t config_hash() const;

  static HardwareConfig trinity_default() { return HardwareConfig{}; }
};

// key = value text, '#' comments. Unknown keys raise InvalidArgument so a
// typo cannot silently fall back to a default. cu_inventory uses the form
// "1x1,4x2,1x3" meaning count x columns.
HardwareConfig parse_config_text(const std::string& text);
HardwareConfig parse_config_file(const std::string& path);  // IoError if unreadable
std::string config_to_text(const HardwareConfig& cfg);

// ---------------------------------------------------------------------------
// Kernel graphs
// ---------------------------------------------------------------------------

enum class KernelKind : uint8_t {
  Ntt,
  Intt,
  Mac,          // basis conversion, inner product, external product, keyswitch dot
  Auto,         // automorphism permutation
  Elementwise,  // pointwise mul/add bundles
  Transpose,
  Rotate,       // monomial rotation
  Decompose,    // gadget digit decomposition
  NocTransfer,
  HbmTransfer,
};

enum class SchemeTag : uint8_t { Ckks, Tfhe, Conversion };

// Role of a MAC node, used by the allocator to pick its unit pool.
enum class MacClass : uint8_t { None, BasisConv, InnerProduct, ExternalProduct, LweDot };

const char* kernel_kind_name(KernelKind k);

struct KernelNode {
  uint32_t id = 0;
  KernelKind kind = KernelKind::Ntt;
  SchemeTag scheme = SchemeTag::Ckks;
  MacClass mac_class = MacClass::None;
  size_t n_poly = 0;     // ring size streamed by this node
  KernelCounts events;   // recorder-granularity event multiplicities
  uint64_t work = 0;     // modular multiplies
  uint64_t elems = 0;    // streamed elements (occupancy = ceil(elems/lanes))
  uint64_t bytes = 0;    // transfer nodes only
  std::vector<uint32_t> deps;  // all strictly smaller than id
};

struct KernelGraph {
  std::vector<KernelNode> nodes;

  KernelCounts kernel_counts() const;  // sum of node events
  void validate() const;               // ids dense, deps < id (acyclic by construction)
  uint32_t add(KernelNode node);       // assigns the next id, returns it
};

// Disjoint union; node ids of later graphs are shifted past earlier ones.
KernelGraph merge_graphs(const std::vector<KernelGraph>& parts);

// --- builders ---------------------------------------------------------------
// Each builder mirrors the instrumented library exactly: summing node events
// over the graph reproduces the corresponding context recorder census.

enum class CkksOp { HAdd, HSub, PAdd, PMult, HMult, Rescale, HRotate, KeySwitch };

KernelGraph ckks_op_graph(const ckks::CkksParams& params, CkksOp op, int level);

// `reps` independent keyswitch instances at the given level sharing one
// evaluation key; the key stream from HBM appears once when it exceeds the
// scratchpad. Used by the utilization scenarios.
KernelGraph ckks_keyswitch_stream(const ckks::CkksParams& params, int level, int reps,
                                  const HardwareConfig& cfg);

// One programmable bootstrap: n_lwe blind-rotation iterations, sample
// extraction, LWE keyswitch. `streams` > 1 lays independent bootstraps side
// by side.
KernelGraph pbs_graph(const tfhe::TfheParams& params, int streams = 1);

// Scheme-conversion graphs (level-0 CKKS ring, n_slot LWE inputs/outputs).
KernelGraph lwes_to_ckks_graph(const ckks::CkksParams& params, size_t n_slot);
KernelGraph ckks_to_lwes_graph(const ckks::CkksParams& params, size_t n_slot);

// Name-driven entry point used by the CLI: "hadd", "hsub", "padd", "pmult",
// "hmult", "rescale", "hrotate", "keyswitch", "pbs", "nand",
// "lwes-to-ckks", "ckks-to-lwes". Unknown names raise UnsupportedOp.
struct OpRequest {
  std::string op;
  int level = -1;     // CKKS ops; -1 means top level
  size_t n_slot = 8;  // conversion ops
};
KernelGraph build_kernel_graph(const OpRequest& req, const ckks::CkksParams* ckks_params,
                               const tfhe::TfheParams* tfhe_params);

// ---------------------------------------------------------------------------
// Work breakdown
// ---------------------------------------------------------------------------

struct WorkBreakdown {
  uint64_t ntt_work = 0;  // modular multiplies in NTT/iNTT nodes
  uint64_t mac_work = 0;  // modular multiplies in MAC nodes
  uint64_t other_work = 0;
  double ntt_fraction = 0;
  double mac_fraction = 0;
  double other_fraction = 0;  // closes the sum to one; exactly zero when empty
};

WorkBreakdown op_breakdown(const KernelGraph& graph);

// ---------------------------------------------------------------------------
// NTT mapping strategies
// ---------------------------------------------------------------------------

enum class NttStrategy : uint8_t { F1Like, FABLike, Trinity };

const char* ntt_strategy_name(NttStrategy s);

// One transform phase of a mapping: which unit class runs it, how many
// butterfly stages it occupies, and how many of those do useful work.
struct NttPhasePlan {
  std::string unit;  // "NTTU", "CU", "BU-array"
  int useful_stages = 0;
  int occupied_stages = 0;
  std::vector<int> cu_columns;  // CU shapes composed for this phase
};

// --- hardware units and kernel-to-unit assignment ---------------------------

enum class UnitType : uint8_t {
  Nttu,
  Transpose,
  Cu,
  AutoU,
  Rotator,
  Vpu,
  Ewe,
  SystolicArray,
  NocChannel,
  HbmChannel,
};

struct Unit {
  UnitType type = UnitType::Nttu;
  int cluster = 0;
  int index = 0;    // within (cluster, type)
  int columns = 0;  // CU shapes only
  int stages = 0;   // pipeline depth for fill latency
  std::string label;
};

// A composed transform pipeline: member units are occupied together for the
// whole occupancy. butterfly_stages drives the pass count of a transform;
// latency_stages (sum of member depths) drives the fill.
struct Pipe {
  std::vector<int> unit_ids;
  int butterfly_stages = 0;
  int latency_stages = 0;
  int lanes = 0;
  std::string label;
};

struct Assignment {
  bool is_pipe = false;
  int index = -1;  // pipe index or unit index
};

struct MappingPlan {
  std::vector<Unit> units;
  std::vector<Pipe> pipes;
  std::vector<Assignment> node_assignment;  // parallel to graph.nodes
  std::vector<NttPhasePlan> ntt_phases;     // map_ntt route
  std::vector<std::string> notes;           // fallbacks, feasibility warnings
};

// Stage-occupancy utilization of one N-point transform under a strategy.
// N must be a power of two in [2^8, 2^16] (UnsupportedSize otherwise).
std::pair<MappingPlan, double> map_ntt(size_t n_ntt, const HardwareConfig& cfg,
                                       NttStrategy strategy);

struct NttUtilRow {
  size_t n = 0;
  double f1_like = 0;
  double fab_like = 0;
  double trinity = 0;
};

std::vector<NttUtilRow> ntt_util_sweep(const HardwareConfig& cfg);
// Mean over the sweep of trinity / max(f1, fab).
double ntt_mean_improvement(const std::vector<NttUtilRow>& rows);

// ---------------------------------------------------------------------------
// Allocation, scheduling, reporting
// ---------------------------------------------------------------------------

// NTT demand first (NTTUs, then CUs composed into transform pipelines),
// remaining CUs take MAC kernels; overflow falls back to time-multiplexing,
// never fails. Streams (weakly connected components) round-robin across
// clusters in order of their smallest node id.
MappingPlan allocate_components(const KernelGraph& graph, const HardwareConfig& cfg);

struct TraceRow {
  uint32_t node = 0;
  int unit = 0;  // index into plan.units
  uint64_t start = 0;
  uint64_t end = 0;
};

struct ScheduleTrace {
  std::vector<TraceRow> rows;  // one per (node, occupied unit)
  uint64_t makespan = 0;
  std::vector<uint64_t> unit_busy;  // parallel to plan.units
};

// Deterministic list scheduling: among ready nodes, earliest feasible start
// wins, ties to the lowest node id. A pipe occupies all member units.
ScheduleTrace simulate(const KernelGraph& graph, const MappingPlan& plan,
                       const HardwareConfig& cfg);

struct UnitUtilRow {
  std::string label;
  uint64_t busy = 0;
  double utilization = 0;
};

struct UtilizationReport {
  uint64_t makespan = 0;
  std::vector<UnitUtilRow> units;   // engaged units only
  double aggregate = 0;             // mean utilization over engaged units
  double transform_subsystem = 0;   // mean over units serving NTT/iNTT nodes
  double mac_subsystem = 0;         // mean over units serving MAC nodes
  KernelCounts counts;              // graph totals for the summary
  WorkBreakdown breakdown;
};

UtilizationReport utilization_report(const KernelGraph& graph, const MappingPlan& plan,
                                     const ScheduleTrace& trace);

// ---------------------------------------------------------------------------
// Scenario drivers (consumed by the CLI and the acceptance suite)
// ---------------------------------------------------------------------------

struct BreakdownRow {
  std::string workload;
  WorkBreakdown breakdown;
};

// CKKS hybrid keyswitch at N=2^16, L=23, dnum=3, plus PBS over the three
// published TFHE sets and their average.
std::vector<BreakdownRow> scenario_breakdown();

struct ScalingResult {
  int clusters = 0;
  uint64_t makespan_single = 0;  // one stream on a one-cluster config
  uint64_t makespan_scaled = 0;  // `clusters` streams on the full config
  double throughput_ratio = 0;   // (streams/makespan_scaled)/(1/makespan_single)
};

ScalingResult scenario_pbs_scaling(const HardwareConfig& cfg, int set_index);

struct AblationResult {
  uint64_t makespan_with = 0;
  uint64_t makespan_without = 0;
  double throughput_ratio = 0;     // without/with makespan ratio
  double transform_util_with = 0;  // transform-subsystem utilization
  double transform_util_without = 0;
  double util_ratio = 0;
};

// CU-enabled vs CU-disabled bootstraps on one cluster. The default stream
// count saturates the cluster's two transform pipes with one bootstrap each,
// the steady operating point of the throughput comparison.
AblationResult scenario_cu_ablation(const HardwareConfig& cfg, int set_index,
                                    int stream_len = 2);

struct CkksUtilResult {
  uint64_t makespan = 0;
  double aggregate = 0;
  UtilizationReport report;
};

// Per-cluster streams of hybrid keyswitches at N=2^16, L=23, dnum=3. The
// default batch is long enough that pipeline ramp and drain stop dominating
// the averages, as in a deep circuit evaluation.
CkksUtilResult scenario_ckks_util(const HardwareConfig& cfg, int reps_per_cluster = 16);

// tfhe::TfheParams for set_index in {1,2,3} (InvalidArgument otherwise).
tfhe::TfheParams tfhe_set(int set_index);
// The N=2^16, L=23, dnum=3 keyswitch workload parameters used by the
// breakdown and utilization scenarios (CKKS bench ring, levels to spare).
ckks::CkksParams ckks_breakdown_params();

}  // namespace trinity::archsim
