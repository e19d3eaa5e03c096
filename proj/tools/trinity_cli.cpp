// trinity: benchmark and verification harness for the FHE workbench and the
// accelerator model. Every subcommand writes <out>.csv and <out>.summary.txt
// (the summary is also printed to stdout) with a run header recording the
// command line, tool version, seed, and parameter/config hashes. All metrics
// are deterministic functions of argv + seed: correctness residuals, kernel
// censuses, and model cycle counts, never wall-clock readings, so reruns are
// byte-identical.
//
// Exit status: 0 success, 1 when --check finds a failed assertion, 2 for bad
// arguments or runtime errors.
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "trinity/archsim.hpp"
#include "trinity/convert.hpp"
#include "trinity/oracle.hpp"
#include "trinity/report.hpp"

using namespace trinity;
namespace rp = trinity::report;
namespace as = trinity::archsim;
using cplx = std::complex<double>;

namespace {

constexpr double kRelTol = 0x1p-10;  // shared accuracy bar of the --check modes

struct CommonOpts {
  std::string config;  // path, or "default" to force the built-in inventory
  uint64_t seed = 1;
  std::string out;
  bool check = false;
};

// --config wins; otherwise TRINITY_SIM_CONFIG; otherwise the built-in chip.
as::HardwareConfig resolve_config(const std::string& flag) {
  if (!flag.empty() && flag != "default") return as::parse_config_file(flag);
  if (flag.empty()) {
    const char* env = std::getenv("TRINITY_SIM_CONFIG");
    if (env && *env) return as::parse_config_file(env);
  }
  return as::HardwareConfig::trinity_default();
}

struct RunCtx {
  std::string command;  // reconstructed "trinity ..." line
  CommonOpts opts;
  uint64_t params_hash = 0;
  uint64_t config_hash = 0;
};

struct Checks {
  rp::SummaryNode list;
  int failed = 0;

  void add(const std::string& name, bool ok, const std::string& detail = "") {
    auto& it = list.item();
    it.set("check", name);
    it.set("status", ok ? "pass" : "fail");
    if (!detail.empty()) it.set("detail", detail);
    if (!ok) failed++;
  }
};

std::string hex64(uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Writes both artifacts, mirrors the summary to stdout, and folds the check
// outcomes into the exit status. The run header fields come first; the
// caller's body node supplies everything workload-specific.
int finish(const RunCtx& rc, rp::CsvTable table, rp::SummaryNode body, Checks checks) {
  table.comments.insert(table.comments.begin(),
                        "run command=\"" + rc.command + "\" version=" + std::string(kVersion) +
                            " seed=" + std::to_string(rc.opts.seed) +
                            " params_hash=" + hex64(rc.params_hash) +
                            " config_hash=" + hex64(rc.config_hash));
  rp::SummaryNode root;
  root.set("command", rc.command);
  root.set("version", std::string(kVersion));
  root.set("seed", rc.opts.seed);
  root.set("params_hash", hex64(rc.params_hash));
  root.set("config_hash", hex64(rc.config_hash));
  for (auto& f : body.fields) root.fields.push_back(std::move(f));
  root.set("checks_failed", checks.failed);
  for (auto& c : body.children) root.children.push_back(std::move(c));
  root.child("checks") = std::move(checks.list);
  rp::write_text_file(rc.opts.out + ".csv", table.to_text());
  std::string summary = rp::emit_summary(root);
  rp::write_text_file(rc.opts.out + ".summary.txt", summary);
  std::fputs(summary.c_str(), stdout);
  return rc.opts.check && checks.failed > 0 ? 1 : 0;
}

uint64_t model_cycles(const as::KernelGraph& g, const as::HardwareConfig& cfg) {
  as::MappingPlan plan = as::allocate_components(g, cfg);
  return as::simulate(g, plan, cfg).makespan;
}

void add_census_cells(std::vector<std::string>& row, const KernelCounts& c) {
  for (uint64_t v : {c.ntt, c.intt, c.bconv, c.ip, c.modmul, c.modadd, c.auto_perm})
    row.push_back(std::to_string(v));
}

const std::vector<std::string> kCensusCols = {"ntt", "intt",   "bconv",  "ip",
                                              "modmul", "modadd", "auto_perm"};

void describe_config(rp::SummaryNode& root, const as::HardwareConfig& cfg) {
  auto& c = root.child("config");
  c.set("clusters", cfg.clusters);
  c.set("nttu_per_cluster", cfg.nttu_per_cluster);
  c.set("transpose_per_cluster", cfg.transpose_per_cluster);
  std::string inv;
  for (const auto& cu : cfg.cu_inventory) {
    if (!inv.empty()) inv += ',';
    inv += std::to_string(cu.count) + "x" + std::to_string(cu.columns);
  }
  c.set("cu_inventory", inv);
  c.set("cu_enabled", cfg.cu_enabled ? "true" : "false");
  c.set("hash", hex64(cfg.config_hash()));
}

std::vector<cplx> random_slots(Rng& rng, size_t count) {
  std::vector<cplx> v(count);
  for (auto& x : v) {
    double mag = 0.5 + 0.5 * rng.uniform_real();
    double arg = 2.0 * 3.14159265358979 * rng.uniform_real();
    x = std::polar(mag, arg);
  }
  return v;
}

double max_rel_err(const std::vector<cplx>& got, const std::vector<cplx>& want) {
  double worst = 0;
  for (size_t i = 0; i < got.size(); i++) {
    double denom = std::max(std::abs(want[i]), 1e-9);
    worst = std::max(worst, std::abs(got[i] - want[i]) / denom);
  }
  return worst;
}

// The keyswitch workload ring at free chain length and digit count: 36-bit
// anchor and special primes, 30-bit working primes, N = 2^16. The default
// L=23, dnum=3 reproduces the published keyswitch breakdown point.
ckks::CkksParams keyswitch_ring(int levels, int dnum) {
  ckks::CkksParams p;
  p.n_poly = size_t{1} << 16;
  p.levels = levels;
  p.dnum = dnum;
  p.alpha = (levels + 1 + dnum - 1) / dnum;
  p.scale = static_cast<double>(1ULL << 30);
  uint64_t two_n = 2 * p.n_poly;
  auto big = ntt_prime_chain(36, two_n, 1 + static_cast<size_t>(p.alpha));
  auto mid = ntt_prime_chain(30, two_n, static_cast<size_t>(levels));
  p.special_basis.moduli.assign(big.begin() + 1, big.end());
  p.special_basis.roles.assign(p.special_basis.moduli.size(), LimbRole::Special);
  p.ciphertext_basis.moduli.push_back(big[0]);
  for (const Modulus& q : mid) p.ciphertext_basis.moduli.push_back(q);
  p.ciphertext_basis.roles.assign(p.ciphertext_basis.moduli.size(), LimbRole::Ciphertext);
  return p;
}

int tfhe_set_index(const std::string& name) {
  if (name == "Set-I") return 1;
  if (name == "Set-II") return 2;
  if (name == "Set-III") return 3;
  return 0;  // toy
}

tfhe::TfheParams tfhe_params_of(const std::string& name) {
  int idx = tfhe_set_index(name);
  return idx == 0 ? tfhe::TfheParams::toy_set() : as::tfhe_set(idx);
}

// ---------------------------------------------------------------------------
// kernels: oracle-vs-implementation transform checks
// ---------------------------------------------------------------------------

struct KernelsOpts {
  CommonOpts common;
  int trials = 2;
  bool full = false;
};

int run_kernels(const RunCtx& rc, const KernelsOpts& o) {
  std::vector<size_t> sizes = {8, 16, 64, 256};
  if (o.full) sizes.insert(sizes.end(), {1024, 4096, 65536});

  rp::CsvTable table;
  table.header = {"check", "n", "trials", "failures", "status"};
  Checks checks;
  Rng base(rc.opts.seed);
  uint64_t stream = 0;

  for (size_t n : sizes) {
    Modulus mod = find_ntt_prime(36, 2 * n);
    NttTables t = NttTables::negacyclic_tables(mod, n);
    unsigned logn = static_cast<unsigned>(std::countr_zero(n));
    size_t n1 = size_t{1} << (logn / 2);
    size_t n2 = n / n1;
    NttTables t1 = NttTables::cyclic_tables(mod, n1, mod_pow(t.omega, n2, mod));
    NttTables t2 = NttTables::cyclic_tables(mod, n2, mod_pow(t.omega, n1, mod));

    int fail_rt = 0, fail_conv = 0, fail_fs = 0, fail_direct = 0;
    for (int trial = 0; trial < o.trials; trial++) {
      Rng rng = base.fork(stream++);
      RingPolynomial a = random_polynomial(rng, mod, n);
      RingPolynomial b = random_polynomial(rng, mod, n);

      RingPolynomial fwd = ntt_forward(a, t);
      if (ntt_inverse(fwd, t).coeffs != a.coeffs) fail_rt++;
      if (four_step_ntt(a, t1, t2).coeffs != fwd.coeffs) fail_fs++;
      if (n <= 4096 &&
          negacyclic_mul(a, b, t).coeffs != oracle::schoolbook_negacyclic_mul(a, b).coeffs)
        fail_conv++;
      if (n <= 64 && oracle::direct_transform(a, t).coeffs != fwd.coeffs) fail_direct++;
    }

    auto row = [&](const std::string& name, int failures, bool ran) {
      if (!ran) return;
      table.rows.push_back({name, std::to_string(n), std::to_string(o.trials),
                            std::to_string(failures), failures == 0 ? "pass" : "fail"});
      checks.add(name + " n=" + std::to_string(n), failures == 0);
    };
    row("roundtrip", fail_rt, true);
    row("four-step", fail_fs, true);
    row("convolution", fail_conv, n <= 4096);
    row("direct-eval", fail_direct, n <= 64);
  }

  rp::SummaryNode root;
  root.set("sizes", static_cast<uint64_t>(sizes.size()));
  root.set("trials_per_size", o.trials);
  return finish(rc, std::move(table), std::move(root), std::move(checks));
}

// ---------------------------------------------------------------------------
// ckks-bench: per-operation census, breakdown, model cycles, live residuals
// ---------------------------------------------------------------------------

struct CkksBenchOpts {
  CommonOpts common;
  std::string preset = "desk";
  int trials = 3;
  int level = -1;
  bool full = false;
};

int run_ckks_bench(const RunCtx& rc, const CkksBenchOpts& o, const as::HardwareConfig& cfg) {
  ckks::CkksParams params =
      o.preset == "desk" ? ckks::CkksParams::desk() : ckks::CkksParams::bench_default();
  int level = o.level < 0 ? params.levels : o.level;
  if (level < 1 || level > params.levels)
    raise(Errc::InvalidArgument, "--level must lie in [1, " + std::to_string(params.levels) + "]");

  ckks::CkksContext ctx(params);
  std::vector<int64_t> steps = {1};
  ckks::CkksKeys keys = ctx.keygen(rc.opts.seed, steps);
  size_t slots = params.slot_count();
  double scale = params.scale;

  struct OpSpec {
    const char* name;
    as::CkksOp op;
    bool has_residual;
  };
  const std::vector<OpSpec> ops = {
      {"hadd", as::CkksOp::HAdd, true},       {"hsub", as::CkksOp::HSub, true},
      {"padd", as::CkksOp::PAdd, true},       {"pmult", as::CkksOp::PMult, true},
      {"hmult", as::CkksOp::HMult, true},     {"rescale", as::CkksOp::Rescale, true},
      {"hrotate", as::CkksOp::HRotate, true}, {"keyswitch", as::CkksOp::KeySwitch, false},
  };

  rp::CsvTable table;
  table.header = {"op", "level", "trials"};
  table.header.insert(table.header.end(), kCensusCols.begin(), kCensusCols.end());
  for (const char* c : {"ntt_fraction", "mac_fraction", "other_fraction", "model_cycles",
                        "max_rel_err"})
    table.header.push_back(c);

  Checks checks;
  Rng base(rc.opts.seed);
  uint64_t stream = 1;

  for (const auto& spec : ops) {
    as::KernelGraph graph = as::ckks_op_graph(params, spec.op, level);
    KernelCounts counts = graph.kernel_counts();
    as::WorkBreakdown wb = as::op_breakdown(graph);
    uint64_t cycles = model_cycles(graph, cfg);

    double worst = 0;
    for (int trial = 0; trial < o.trials && spec.has_residual; trial++) {
      Rng rng = base.fork(stream++);
      auto v1 = random_slots(rng, slots);
      auto v2 = random_slots(rng, slots);
      Rng enc1 = rng.fork(1), enc2 = rng.fork(2);
      ckks::RlweCiphertext c1 = ctx.encrypt(ctx.encode(v1, scale, level), keys.sk, enc1);

      std::vector<cplx> got, want(slots);
      switch (spec.op) {
        case as::CkksOp::HAdd: {
          auto c2 = ctx.encrypt(ctx.encode(v2, scale, level), keys.sk, enc2);
          got = ctx.decrypt_decode(ctx.hadd(c1, c2), keys.sk);
          for (size_t i = 0; i < slots; i++) want[i] = v1[i] + v2[i];
          break;
        }
        case as::CkksOp::HSub: {
          auto c2 = ctx.encrypt(ctx.encode(v2, scale, level), keys.sk, enc2);
          got = ctx.decrypt_decode(ctx.hsub(c1, c2), keys.sk);
          for (size_t i = 0; i < slots; i++) want[i] = v1[i] - v2[i];
          break;
        }
        case as::CkksOp::PAdd: {
          got = ctx.decrypt_decode(ctx.padd(c1, ctx.encode(v2, scale, level)), keys.sk);
          for (size_t i = 0; i < slots; i++) want[i] = v1[i] + v2[i];
          break;
        }
        case as::CkksOp::PMult: {
          got = ctx.decrypt_decode(ctx.pmult(c1, ctx.encode(v2, scale, level)), keys.sk);
          for (size_t i = 0; i < slots; i++) want[i] = v1[i] * v2[i];
          break;
        }
        case as::CkksOp::HMult: {
          auto c2 = ctx.encrypt(ctx.encode(v2, scale, level), keys.sk, enc2);
          got = ctx.decrypt_decode(ctx.hmult(c1, c2, keys.relin), keys.sk);
          for (size_t i = 0; i < slots; i++) want[i] = v1[i] * v2[i];
          break;
        }
        case as::CkksOp::Rescale: {
          auto c2 = ctx.encrypt(ctx.encode(v2, scale, level), keys.sk, enc2);
          got = ctx.decrypt_decode(ctx.rescale(ctx.hmult(c1, c2, keys.relin)), keys.sk);
          for (size_t i = 0; i < slots; i++) want[i] = v1[i] * v2[i];
          break;
        }
        case as::CkksOp::HRotate: {
          got = ctx.decrypt_decode(ctx.hrotate(c1, 1, keys), keys.sk);
          for (size_t i = 0; i < slots; i++) want[i] = v1[(i + 1) % slots];
          break;
        }
        case as::CkksOp::KeySwitch:
          break;
      }
      worst = std::max(worst, max_rel_err(got, want));
    }

    std::vector<std::string> row = {spec.name, std::to_string(level),
                                    std::to_string(spec.has_residual ? o.trials : 0)};
    add_census_cells(row, counts);
    row.push_back(rp::format_g6(wb.ntt_fraction));
    row.push_back(rp::format_g6(wb.mac_fraction));
    row.push_back(rp::format_g6(wb.other_fraction));
    row.push_back(std::to_string(cycles));
    row.push_back(spec.has_residual ? rp::format_g6(worst) : "");
    table.rows.push_back(std::move(row));

    if (spec.has_residual)
      checks.add(std::string(spec.name) + " residual", worst <= kRelTol,
                 "max_rel_err=" + rp::format_g6(worst));
  }

  rp::SummaryNode root;
  root.set("preset", o.preset);
  root.set("n_poly", static_cast<uint64_t>(params.n_poly));
  root.set("levels", params.levels);
  root.set("level", level);
  root.set("trials", o.trials);
  describe_config(root, cfg);
  return finish(rc, std::move(table), std::move(root), std::move(checks));
}

// ---------------------------------------------------------------------------
// tfhe-bench: identity-LUT bootstrap accuracy and modeled PBS throughput
// ---------------------------------------------------------------------------

struct TfheBenchOpts {
  CommonOpts common;
  std::string set = "Set-I";
  int trials = 1000;
};

int run_tfhe_bench(const RunCtx& rc, const TfheBenchOpts& o, const as::HardwareConfig& cfg) {
  std::vector<std::string> names;
  if (o.set == "all")
    names = {"Set-I", "Set-II", "Set-III"};
  else
    names = {o.set};

  rp::CsvTable table;
  table.header = {"set", "trials", "correct", "accuracy"};
  table.header.insert(table.header.end(), kCensusCols.begin(), kCensusCols.end());
  table.header.push_back("model_cycles");
  table.header.push_back("model_pbs_per_sec");

  Checks checks;
  rp::SummaryNode root;
  Rng base(rc.opts.seed);

  for (size_t si = 0; si < names.size(); si++) {
    tfhe::TfheParams params = tfhe_params_of(names[si]);
    tfhe::TfheContext ctx(params);
    Rng keyrng = base.fork(1000 * (si + 1));
    tfhe::LweSecretKey lwe_sk = ctx.lwe_keygen(keyrng);
    tfhe::GlweSecretKey glwe_sk = ctx.glwe_keygen(keyrng);
    tfhe::BootstrapKeys keys = ctx.make_bootstrap_keys(lwe_sk, glwe_sk, keyrng);

    std::vector<uint64_t> lut(params.space());
    for (uint64_t m = 0; m < params.space(); m++) lut[m] = m;

    int correct = 0;
    for (int trial = 0; trial < o.trials; trial++) {
      Rng rng = keyrng.fork(trial + 1);
      uint64_t m = rng.uniform(params.space());
      tfhe::LweCiphertext c = ctx.lwe_encrypt(m, lwe_sk, rng);
      tfhe::LweCiphertext out = ctx.pbs(c, lut, keys);
      if (ctx.lwe_decrypt(out, lwe_sk) == m) correct++;
    }
    double accuracy = o.trials > 0 ? static_cast<double>(correct) / o.trials : 0.0;

    as::KernelGraph graph = as::pbs_graph(params, 1);
    uint64_t cycles = model_cycles(graph, cfg);
    double pbs_per_sec = cycles == 0 ? 0.0 : cfg.clusters * 1e9 / static_cast<double>(cycles);

    std::vector<std::string> row = {names[si], std::to_string(o.trials), std::to_string(correct),
                                    rp::format_g6(accuracy)};
    add_census_cells(row, graph.kernel_counts());
    row.push_back(std::to_string(cycles));
    row.push_back(rp::format_g6(pbs_per_sec));
    table.rows.push_back(std::move(row));

    checks.add(names[si] + " accuracy >= 0.999", accuracy >= 0.999,
               std::to_string(correct) + "/" + std::to_string(o.trials));
  }

  root.set("sets", static_cast<uint64_t>(names.size()));
  root.set("trials_per_set", o.trials);
  describe_config(root, cfg);
  return finish(rc, std::move(table), std::move(root), std::move(checks));
}

// ---------------------------------------------------------------------------
// convert-bench: CKKS -> LWEs -> CKKS round trip over the n_slot sweep
// ---------------------------------------------------------------------------

struct ConvertBenchOpts {
  CommonOpts common;
  std::vector<size_t> n_slots = {2, 8, 32};
  int trials = 5;
};

// Level-0 plaintext whose coefficients 0..m.size()-1 are the given integers.
ckks::Plaintext plain_of_coeffs(const ckks::CkksContext& ctx, const std::vector<int64_t>& m) {
  ckks::Plaintext pt;
  pt.level = 0;
  pt.scale = 1.0;
  pt.poly.emplace_back(ctx.params().n_poly, ctx.ext_mod(0));
  for (size_t j = 0; j < m.size(); j++) pt.poly[0].coeffs[j] = to_residue(m[j], ctx.ext_mod(0));
  return pt;
}

int run_convert_bench(const RunCtx& rc, const ConvertBenchOpts& o,
                      const as::HardwareConfig& cfg) {
  ckks::CkksParams params = ckks::CkksParams::desk();
  ckks::CkksContext ctx(params);
  ckks::CkksKeys keys = ctx.keygen(rc.opts.seed);
  size_t max_slot = 1;
  for (size_t s : o.n_slots) max_slot = std::max(max_slot, s);
  convert::ConversionContext conv(ctx, keys.sk, as::tfhe_set(1), max_slot, rc.opts.seed);

  const size_t n = params.n_poly;
  const Modulus& q0 = ctx.ext_mod(0);
  const int64_t payload_scale = int64_t{1} << 20;

  rp::CsvTable table;
  table.header = {"n_slot", "trials", "max_rel_err", "annihilation"};
  table.header.insert(table.header.end(), kCensusCols.begin(), kCensusCols.end());
  table.header.push_back("model_cycles");

  Checks checks;
  Rng base(rc.opts.seed);
  uint64_t stream = 1;

  for (size_t n_slot : o.n_slots) {
    if (n_slot == 0 || n_slot > n || (n_slot & (n_slot - 1)) != 0)
      raise(Errc::InvalidArgument, "--n-slot values must be powers of two within the ring");
    size_t stride = n / n_slot;

    double worst = 0;
    for (int trial = 0; trial < o.trials; trial++) {
      Rng rng = base.fork(stream++);
      std::vector<int64_t> m(n_slot);
      for (auto& x : m) {
        double v = 0.25 + 0.75 * rng.uniform_real();
        if (rng.next() & 1) v = -v;
        x = llround(v * static_cast<double>(payload_scale));
      }
      Rng enc = rng.fork(1);
      ckks::RlweCiphertext ct = ctx.encrypt(plain_of_coeffs(ctx, m), keys.sk, enc);
      std::vector<tfhe::LweCiphertext> lwes = conv.ckks_to_lwes(ct, n_slot);
      ckks::RlweCiphertext back = conv.lwes_to_ckks(lwes);
      ckks::RnsPolynomial dec = ctx.decrypt(back, keys.sk);
      for (size_t j = 0; j < n_slot; j++) {
        // the composed path multiplies each payload by N
        double got = static_cast<double>(from_residue(dec[0].coeffs[j * stride], q0)) /
                     static_cast<double>(n);
        double val = static_cast<double>(m[j]);
        worst = std::max(worst, std::abs(got - val) / std::abs(val));
      }
    }

    // Noiseless, maskless pipeline: the field trace must annihilate every
    // off-stride coefficient exactly and scale the payload by exactly N.
    bool exact = true;
    {
      Rng rng = base.fork(stream++);
      std::vector<int64_t> m(n_slot);
      for (auto& x : m) x = static_cast<int64_t>(rng.uniform(2047)) - 1023;
      Rng enc = rng.fork(1);
      ckks::RlweCiphertext ct = ctx.encrypt(plain_of_coeffs(ctx, m), keys.sk, enc,
                                            /*zero_noise=*/true, /*zero_mask=*/true);
      std::vector<tfhe::LweCiphertext> lwes = conv.ckks_to_lwes(ct, n_slot);
      ckks::RnsPolynomial dec = ctx.decrypt(conv.lwes_to_ckks(lwes), keys.sk);
      for (size_t i = 0; i < n; i++) {
        int64_t got = from_residue(dec[0].coeffs[i], q0);
        int64_t want = i % stride == 0 ? m[i / stride] * static_cast<int64_t>(n) : 0;
        if (got != want) exact = false;
      }
    }

    as::KernelGraph graph = as::lwes_to_ckks_graph(params, n_slot);
    std::vector<std::string> row = {std::to_string(n_slot), std::to_string(o.trials),
                                    rp::format_g6(worst), exact ? "exact" : "fail"};
    add_census_cells(row, graph.kernel_counts());
    row.push_back(std::to_string(model_cycles(graph, cfg)));
    table.rows.push_back(std::move(row));

    checks.add("n_slot=" + std::to_string(n_slot) + " round trip", worst <= kRelTol,
               "max_rel_err=" + rp::format_g6(worst));
    checks.add("n_slot=" + std::to_string(n_slot) + " trace annihilation", exact);
  }

  rp::SummaryNode root;
  root.set("n_poly", static_cast<uint64_t>(n));
  root.set("trials", o.trials);
  describe_config(root, cfg);
  return finish(rc, std::move(table), std::move(root), std::move(checks));
}

// ---------------------------------------------------------------------------
// ntt-util: utilization of each mapping strategy across transform sizes
// ---------------------------------------------------------------------------

int run_ntt_util(const RunCtx& rc, const as::HardwareConfig& cfg) {
  std::vector<as::NttUtilRow> rows = as::ntt_util_sweep(cfg);
  double mean_improvement = as::ntt_mean_improvement(rows);

  rp::CsvTable table;
  table.header = {"strategy", "n", "utilization"};
  for (as::NttStrategy s : {as::NttStrategy::F1Like, as::NttStrategy::FABLike,
                            as::NttStrategy::Trinity}) {
    for (const auto& r : rows) {
      double u = s == as::NttStrategy::F1Like    ? r.f1_like
                 : s == as::NttStrategy::FABLike ? r.fab_like
                                                 : r.trinity;
      table.rows.push_back({as::ntt_strategy_name(s), std::to_string(r.n), rp::format_g6(u)});
    }
  }

  Checks checks;
  bool f1_peak = rows.back().f1_like >= rows.front().f1_like;
  bool fab_peak = rows.front().fab_like >= rows.back().fab_like;
  bool f1_mono = true, fab_mono = true, dominance = true;
  for (size_t i = 0; i < rows.size(); i++) {
    if (i + 1 < rows.size()) {
      if (rows[i + 1].f1_like < rows[i].f1_like) f1_mono = false;
      if (rows[i + 1].fab_like > rows[i].fab_like) fab_mono = false;
    }
    if (rows[i].trinity < std::max(rows[i].f1_like, rows[i].fab_like)) dominance = false;
    f1_peak = f1_peak && rows[i].f1_like <= rows.back().f1_like;
    fab_peak = fab_peak && rows[i].fab_like <= rows.front().fab_like;
  }
  checks.add("f1-like peak at n=2^16", f1_peak);
  checks.add("f1-like monotone toward 2^16", f1_mono);
  checks.add("fab-like peak at n=2^8", fab_peak);
  checks.add("fab-like monotone toward 2^8", fab_mono);
  checks.add("trinity dominates both at every n", dominance);
  checks.add("mean improvement >= 1.1", mean_improvement >= 1.1,
             rp::format_g6(mean_improvement));

  rp::SummaryNode root;
  root.set("points", static_cast<uint64_t>(rows.size()));
  root.set_f("mean_improvement", mean_improvement);
  describe_config(root, cfg);
  return finish(rc, std::move(table), std::move(root), std::move(checks));
}

// ---------------------------------------------------------------------------
// breakdown: work fractions per workload
// ---------------------------------------------------------------------------

struct BreakdownOpts {
  CommonOpts common;
  std::string op;  // empty = the full published scenario
  int levels = 23;
  int dnum = 3;
  std::string set = "Set-I";
};

int run_breakdown(RunCtx& rc, const BreakdownOpts& o) {
  std::vector<as::BreakdownRow> rows;
  if (o.op.empty()) {
    rows = as::scenario_breakdown();
  } else if (o.op == "keyswitch") {
    if (o.levels < 1 || o.dnum < 1 || o.dnum > o.levels + 1)
      raise(Errc::InvalidArgument, "need L >= 1 and 1 <= dnum <= L+1");
    ckks::CkksParams p = keyswitch_ring(o.levels, o.dnum);
    rc.params_hash = p.params_hash();
    rows.push_back({"ckks keyswitch N=2^16 L=" + std::to_string(o.levels) +
                        " dnum=" + std::to_string(o.dnum),
                    as::op_breakdown(as::ckks_op_graph(p, as::CkksOp::KeySwitch, p.levels))});
  } else {  // pbs
    tfhe::TfheParams p = tfhe_params_of(o.set);
    rc.params_hash = p.params_hash();
    rows.push_back({"tfhe pbs " + o.set, as::op_breakdown(as::pbs_graph(p, 1))});
  }

  rp::CsvTable table;
  table.header = {"workload", "ntt_work",     "mac_work",     "other_work",
                  "ntt_fraction", "mac_fraction", "other_fraction"};
  Checks checks;
  for (const auto& r : rows) {
    const as::WorkBreakdown& b = r.breakdown;
    table.rows.push_back({r.workload, std::to_string(b.ntt_work), std::to_string(b.mac_work),
                          std::to_string(b.other_work), rp::format_g6(b.ntt_fraction),
                          rp::format_g6(b.mac_fraction), rp::format_g6(b.other_fraction)});
    double sum = b.ntt_fraction + b.mac_fraction + b.other_fraction;
    checks.add(r.workload + ": fractions close to one", std::abs(sum - 1.0) < 1e-12,
               rp::format_g6(sum));
    if (r.workload == "ckks keyswitch N=2^16 L=23 dnum=3")
      checks.add("keyswitch ntt fraction within 5pp of 59.2%",
                 std::abs(b.ntt_fraction - 0.592) <= 0.05, rp::format_g6(b.ntt_fraction));
    if (r.workload == "tfhe pbs mean of sets")
      checks.add("pbs mean ntt fraction within 5pp of 75.5%",
                 std::abs(b.ntt_fraction - 0.755) <= 0.05, rp::format_g6(b.ntt_fraction));
  }

  rp::SummaryNode root;
  root.set("rows", static_cast<uint64_t>(rows.size()));
  return finish(rc, std::move(table), std::move(root), std::move(checks));
}

// ---------------------------------------------------------------------------
// simulate: scenarios and arbitrary single workloads
// ---------------------------------------------------------------------------

struct SimulateOpts {
  CommonOpts common;
  std::string scenario;  // pbs-scaling | cu-ablation | ckks-util
  std::string op;        // alternative to --scenario
  std::string set = "Set-I";
  std::string preset = "large";  // ckks ring for --op: large (N=2^16) or desk
  int streams = 0;               // 0: per-mode default (1 for pbs, 2 for cu-ablation)
  int reps = 16;
  int level = -1;
  size_t n_slot = 8;
  std::string trace_path;
};

void unit_rows(rp::CsvTable& table, const as::UtilizationReport& rep) {
  for (const auto& u : rep.units)
    table.rows.push_back({u.label, std::to_string(u.busy), rp::format_g6(u.utilization)});
}

void describe_report(rp::SummaryNode& root, const as::UtilizationReport& rep) {
  root.set("makespan", rep.makespan);
  root.set_f("aggregate_utilization", rep.aggregate);
  root.set_f("transform_subsystem", rep.transform_subsystem);
  root.set_f("mac_subsystem", rep.mac_subsystem);
  auto& counts = root.child("counts");
  counts.set("ntt", rep.counts.ntt);
  counts.set("intt", rep.counts.intt);
  counts.set("bconv", rep.counts.bconv);
  counts.set("ip", rep.counts.ip);
  counts.set("modmul", rep.counts.modmul);
  counts.set("modadd", rep.counts.modadd);
  counts.set("auto_perm", rep.counts.auto_perm);
  auto& wb = root.child("breakdown");
  wb.set_f("ntt_fraction", rep.breakdown.ntt_fraction);
  wb.set_f("mac_fraction", rep.breakdown.mac_fraction);
  wb.set_f("other_fraction", rep.breakdown.other_fraction);
}

int run_simulate(RunCtx& rc, const SimulateOpts& o, const as::HardwareConfig& cfg) {
  if (o.scenario.empty() == o.op.empty())
    raise(Errc::InvalidArgument, "pass exactly one of --scenario or --op");
  if (!o.trace_path.empty() && o.op.empty())
    raise(Errc::InvalidArgument, "--trace needs an --op workload");
  if (o.streams != 0 && o.op != "pbs" && o.scenario != "cu-ablation")
    raise(Errc::InvalidArgument, "--streams applies to --op pbs and --scenario cu-ablation");

  rp::CsvTable table;
  rp::SummaryNode root;
  Checks checks;

  if (o.scenario == "pbs-scaling") {
    if (tfhe_set_index(o.set) == 0) raise(Errc::InvalidArgument, "scenarios need Set-I/II/III");
    as::ScalingResult res = as::scenario_pbs_scaling(cfg, tfhe_set_index(o.set));
    table.header = {"set", "clusters", "makespan_single", "makespan_scaled", "throughput_ratio"};
    table.rows.push_back({o.set, std::to_string(res.clusters),
                          std::to_string(res.makespan_single),
                          std::to_string(res.makespan_scaled),
                          rp::format_g6(res.throughput_ratio)});
    root.set("scenario", o.scenario);
    root.set("clusters", res.clusters);
    root.set("makespan_single", res.makespan_single);
    root.set("makespan_scaled", res.makespan_scaled);
    root.set_f("throughput_ratio", res.throughput_ratio);
    checks.add("throughput scales exactly with clusters",
               res.throughput_ratio == static_cast<double>(res.clusters),
               rp::format_g6(res.throughput_ratio));
  } else if (o.scenario == "cu-ablation") {
    // The published comparison aggregates the three sets; a single named set
    // narrows the sweep.
    std::vector<std::string> names =
        o.set == "all" ? std::vector<std::string>{"Set-I", "Set-II", "Set-III"}
                       : std::vector<std::string>{o.set};
    table.header = {"set",
                    "makespan_with",
                    "makespan_without",
                    "throughput_ratio",
                    "transform_util_with",
                    "transform_util_without",
                    "util_ratio"};
    double util_sum = 0;
    int stream_len = o.streams == 0 ? 2 : o.streams;
    for (const auto& name : names) {
      if (tfhe_set_index(name) == 0)
        raise(Errc::InvalidArgument, "scenarios need Set-I/II/III");
      as::AblationResult res = as::scenario_cu_ablation(cfg, tfhe_set_index(name), stream_len);
      table.rows.push_back({name, std::to_string(res.makespan_with),
                            std::to_string(res.makespan_without),
                            rp::format_g6(res.throughput_ratio),
                            rp::format_g6(res.transform_util_with),
                            rp::format_g6(res.transform_util_without),
                            rp::format_g6(res.util_ratio)});
      util_sum += res.util_ratio;
      checks.add(name + " throughput ratio in [1.5, 2.1]",
                 res.throughput_ratio >= 1.5 && res.throughput_ratio <= 2.1,
                 rp::format_g6(res.throughput_ratio));
    }
    double util_mean = util_sum / static_cast<double>(names.size());
    root.set("scenario", o.scenario);
    root.set("streams", stream_len);
    root.set_f("mean_util_ratio", util_mean);
    if (names.size() == 3)
      checks.add("mean utilization ratio in [1.30, 1.60]",
                 util_mean >= 1.30 && util_mean <= 1.60, rp::format_g6(util_mean));
  } else if (o.scenario == "ckks-util") {
    as::CkksUtilResult res = as::scenario_ckks_util(cfg, o.reps);
    table.header = {"unit", "busy", "utilization"};
    unit_rows(table, res.report);
    root.set("scenario", o.scenario);
    root.set("reps_per_cluster", o.reps);
    describe_report(root, res.report);
    checks.add("aggregate utilization >= 0.48", res.aggregate >= 0.48,
               rp::format_g6(res.aggregate));
    checks.add("aggregate utilization <= 1", res.aggregate <= 1.0);
  } else if (!o.scenario.empty()) {
    raise(Errc::InvalidArgument, "unknown scenario " + o.scenario);
  } else {
    // single-workload mode
    ckks::CkksParams ckks_params =
        o.preset == "desk" ? ckks::CkksParams::desk() : keyswitch_ring(23, 3);
    tfhe::TfheParams tfhe_params = tfhe_params_of(o.set);
    as::KernelGraph graph;
    if (o.op == "pbs") {
      graph = as::pbs_graph(tfhe_params, o.streams == 0 ? 1 : o.streams);
      rc.params_hash = tfhe_params.params_hash();
    } else {
      as::OpRequest req;
      req.op = o.op;
      req.level = o.level;
      req.n_slot = o.n_slot;
      graph = as::build_kernel_graph(req, &ckks_params, &tfhe_params);
      rc.params_hash = o.op == "nand" ? tfhe_params.params_hash() : ckks_params.params_hash();
    }
    as::MappingPlan plan = as::allocate_components(graph, cfg);
    as::ScheduleTrace trace = as::simulate(graph, plan, cfg);
    as::UtilizationReport rep = as::utilization_report(graph, plan, trace);

    table.header = {"unit", "busy", "utilization"};
    unit_rows(table, rep);
    root.set("op", o.op);
    root.set("nodes", static_cast<uint64_t>(graph.nodes.size()));
    describe_report(root, rep);
    if (!plan.notes.empty()) {
      auto& notes = root.child("notes");
      for (const auto& nline : plan.notes) notes.item().set("note", nline);
    }
    bool bounded = true;
    for (const auto& u : rep.units) bounded = bounded && u.utilization <= 1.0 + 1e-12;
    checks.add("unit utilization bounded by 1", bounded);

    if (!o.trace_path.empty()) {
      rp::CsvTable tr;
      tr.header = {"node", "kind", "scheme", "unit", "start", "end", "work", "elems"};
      for (const auto& row : trace.rows) {
        const as::KernelNode& node = graph.nodes[row.node];
        const char* scheme = node.scheme == as::SchemeTag::Ckks   ? "ckks"
                             : node.scheme == as::SchemeTag::Tfhe ? "tfhe"
                                                                  : "conversion";
        tr.rows.push_back({std::to_string(row.node), as::kernel_kind_name(node.kind), scheme,
                           plan.units[static_cast<size_t>(row.unit)].label,
                           std::to_string(row.start), std::to_string(row.end),
                           std::to_string(node.work), std::to_string(node.elems)});
      }
      rp::write_text_file(o.trace_path, tr.to_text());
    }
  }

  describe_config(root, cfg);
  return finish(rc, std::move(table), std::move(root), std::move(checks));
}

void add_common(CLI::App* sub, CommonOpts& o, const std::string& default_out) {
  o.out = default_out;
  sub->add_option("--config", o.config,
                  "hardware config path, or 'default' for the built-in chip");
  sub->add_option("--seed", o.seed, "base RNG seed; trials derive per-trial streams");
  sub->add_option("--out", o.out, "report path prefix (<out>.csv, <out>.summary.txt)");
  sub->add_flag("--check", o.check, "exit 1 unless every acceptance check passes");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FHE workbench benchmarks and accelerator-model reports"};
  app.require_subcommand(1);

  std::string command = "trinity";
  for (int i = 1; i < argc; i++) command += std::string(" ") + argv[i];

  int rc_code = 0;
  auto dispatch = [&](auto fn) { rc_code = fn(); };

  // kernels
  KernelsOpts ko;
  auto* kernels = app.add_subcommand("kernels", "transform kernels against slow oracles");
  add_common(kernels, ko.common, "report-kernels");
  kernels->add_option("--trials", ko.trials, "random polynomials per size")
      ->check(CLI::PositiveNumber);
  kernels->add_flag("--full", ko.full, "extend the size sweep to N=2^16");
  kernels->callback([&] {
    RunCtx rc{command, ko.common, 0, 0};
    dispatch([&] { return run_kernels(rc, ko); });
  });

  // ckks-bench
  CkksBenchOpts cko;
  auto* ckksb = app.add_subcommand("ckks-bench", "CKKS operation census, cycles, residuals");
  add_common(ckksb, cko.common, "report-ckks-bench");
  ckksb->add_option("--preset", cko.preset, "parameter preset")
      ->transform(CLI::IsMember({"desk", "bench"}));
  ckksb->add_option("--trials", cko.trials, "trials per operation")->check(CLI::PositiveNumber);
  ckksb->add_option("--level", cko.level, "operating level (default: top)");
  ckksb->add_flag("--full", cko.full, "allow the long N=2^16 preset");
  ckksb->callback([&] {
    if (cko.preset == "bench" && !cko.full)
      raise(Errc::InvalidArgument, "--preset bench is a long run; pass --full to confirm");
    as::HardwareConfig cfg = resolve_config(cko.common.config);
    RunCtx rc{command, cko.common,
              (cko.preset == "desk" ? ckks::CkksParams::desk() : ckks::CkksParams::bench_default())
                  .params_hash(),
              cfg.config_hash()};
    dispatch([&] { return run_ckks_bench(rc, cko, cfg); });
  });

  // tfhe-bench
  TfheBenchOpts to;
  auto* tfheb = app.add_subcommand("tfhe-bench", "PBS accuracy and modeled throughput per set");
  add_common(tfheb, to.common, "report-tfhe-bench");
  tfheb->add_option("--set", to.set, "parameter set")
      ->transform(CLI::IsMember({"Set-I", "Set-II", "Set-III", "toy", "all"}));
  tfheb->add_option("--trials", to.trials, "bootstraps per set")->check(CLI::PositiveNumber);
  tfheb->callback([&] {
    as::HardwareConfig cfg = resolve_config(to.common.config);
    uint64_t ph = 0;
    if (to.set == "all") {
      for (int s = 1; s <= 3; s++) ph = fnv1a64_u64(as::tfhe_set(s).params_hash(), ph);
    } else {
      ph = tfhe_params_of(to.set).params_hash();
    }
    RunCtx rc{command, to.common, ph, cfg.config_hash()};
    dispatch([&] { return run_tfhe_bench(rc, to, cfg); });
  });

  // convert-bench
  ConvertBenchOpts co;
  auto* convb = app.add_subcommand("convert-bench", "scheme-conversion round trip sweep");
  add_common(convb, co.common, "report-convert-bench");
  convb->add_option("--n-slot", co.n_slots, "slot counts (comma separated)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  convb->add_option("--trials", co.trials, "round trips per slot count")
      ->check(CLI::PositiveNumber);
  convb->callback([&] {
    as::HardwareConfig cfg = resolve_config(co.common.config);
    RunCtx rc{command, co.common, ckks::CkksParams::desk().params_hash(), cfg.config_hash()};
    dispatch([&] { return run_convert_bench(rc, co, cfg); });
  });

  // ntt-util
  CommonOpts no;
  auto* nttu = app.add_subcommand("ntt-util", "mapping-strategy utilization sweep");
  add_common(nttu, no, "report-ntt-util");
  nttu->callback([&] {
    as::HardwareConfig cfg = resolve_config(no.config);
    RunCtx rc{command, no, 0, cfg.config_hash()};
    dispatch([&] { return run_ntt_util(rc, cfg); });
  });

  // breakdown
  BreakdownOpts bo;
  auto* brk = app.add_subcommand("breakdown", "work fractions per workload");
  add_common(brk, bo.common, "report-breakdown");
  brk->add_option("--op", bo.op, "single workload instead of the published scenario")
      ->transform(CLI::IsMember({"keyswitch", "pbs"}));
  brk->add_option("--L", bo.levels, "keyswitch chain length");
  brk->add_option("--dnum", bo.dnum, "keyswitch digit count");
  brk->add_option("--set", bo.set, "pbs parameter set")
      ->transform(CLI::IsMember({"Set-I", "Set-II", "Set-III", "toy"}));
  brk->callback([&] {
    RunCtx rc{command, bo.common, 0, 0};
    dispatch([&] { return run_breakdown(rc, bo); });
  });

  // simulate
  SimulateOpts so;
  auto* sim = app.add_subcommand("simulate", "schedule a workload or scenario on the model");
  add_common(sim, so.common, "report-simulate");
  sim->add_option("--scenario", so.scenario, "pbs-scaling | cu-ablation | ckks-util")
      ->transform(CLI::IsMember({"pbs-scaling", "cu-ablation", "ckks-util"}));
  sim->add_option("--op", so.op, "single workload to schedule")
      ->transform(CLI::IsMember({"hadd", "hsub", "padd", "pmult", "hmult", "rescale", "hrotate",
                                 "keyswitch", "pbs", "nand", "lwes-to-ckks", "ckks-to-lwes"}));
  sim->add_option("--set", so.set, "TFHE parameter set")
      ->transform(CLI::IsMember({"Set-I", "Set-II", "Set-III", "toy", "all"}));
  sim->add_option("--preset", so.preset, "CKKS ring for --op workloads")
      ->transform(CLI::IsMember({"large", "desk"}));
  sim->add_option("--streams", so.streams, "parallel bootstraps for --op pbs")
      ->check(CLI::PositiveNumber);
  sim->add_option("--reps", so.reps, "keyswitches per cluster for ckks-util")
      ->check(CLI::PositiveNumber);
  sim->add_option("--level", so.level, "CKKS level for --op workloads (default: top)");
  sim->add_option("--n-slot", so.n_slot, "slot count for conversion workloads")
      ->check(CLI::PositiveNumber);
  sim->add_option("--trace", so.trace_path, "also write a per-occupancy trace CSV");
  sim->callback([&] {
    as::HardwareConfig cfg = resolve_config(so.common.config);
    RunCtx rc{command, so.common, 0, cfg.config_hash()};
    dispatch([&] { return run_simulate(rc, so, cfg); });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return rc_code;
}
