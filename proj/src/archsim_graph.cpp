#include <algorithm>
#include <bit>
#include <cctype>
#include <fstream>
#include <sstream>

#include "trinity/archsim.hpp"
#include "trinity/common.hpp"

namespace trinity::archsim {

// ---------------------------------------------------------------------------
// HardwareConfig
// ---------------------------------------------------------------------------

int HardwareConfig::nttu_stages() const {
  return std::bit_width(static_cast<unsigned>(2 * nttu_m)) - 1;
}

void HardwareConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) raise(Errc::InvalidArgument, std::string("hardware config: ") + what);
  };
  need(clusters >= 1, "clusters must be >= 1");
  need(word_bits >= 1 && word_bits <= 64, "word_bits must be in [1, 64]");
  need(nttu_per_cluster >= 1, "nttu_per_cluster must be >= 1");
  need(nttu_m >= 2 && std::has_single_bit(static_cast<unsigned>(nttu_m)),
       "nttu_m must be a power of two >= 2");
  need(transpose_per_cluster >= 0, "transpose_per_cluster must be >= 0");
  need(n_r >= 1, "n_r must be >= 1");
  for (const CuSpec& cu : cu_inventory) {
    need(cu.columns >= 1, "cu columns must be >= 1");
    need(cu.count >= 0, "cu count must be >= 0");
  }
  need(autou_per_cluster >= 0 && rotator_per_cluster >= 0 && vpu_per_cluster >= 0 &&
           ewe_per_cluster >= 0,
       "unit counts must be >= 0");
  need(unit_lanes >= 1 && ewe_lanes >= 1 && cu_ntt_lanes >= 1 && cu_mac_lanes >= 1,
       "lane widths must be >= 1");
  need(fill_extra >= 0, "fill_extra must be >= 0");
  need(sa_depth >= 1, "sa_depth must be >= 1");
  need(hbm_bytes_per_cycle > 0 && noc_bytes_per_cycle > 0, "bandwidths must be positive");
  need(scratchpad_mb_per_cluster > 0 && local_buffer_mb > 0, "capacities must be positive");
}

std::string config_to_text(const HardwareConfig& c) {
  std::ostringstream out;
  out << "clusters = " << c.clusters << "\n";
  out << "word_bits = " << c.word_bits << "\n";
  out << "nttu_per_cluster = " << c.nttu_per_cluster << "\n";
  out << "nttu_m = " << c.nttu_m << "\n";
  out << "transpose_per_cluster = " << c.transpose_per_cluster << "\n";
  out << "cu_inventory = ";
  for (size_t i = 0; i < c.cu_inventory.size(); i++) {
    if (i) out << ",";
    out << c.cu_inventory[i].count << "x" << c.cu_inventory[i].columns;
  }
  out << "\n";
  out << "n_r = " << c.n_r << "\n";
  out << "autou_per_cluster = " << c.autou_per_cluster << "\n";
  out << "rotator_per_cluster = " << c.rotator_per_cluster << "\n";
  out << "vpu_per_cluster = " << c.vpu_per_cluster << "\n";
  out << "ewe_per_cluster = " << c.ewe_per_cluster << "\n";
  out << "unit_lanes = " << c.unit_lanes << "\n";
  out << "ewe_lanes = " << c.ewe_lanes << "\n";
  out << "cu_ntt_lanes = " << c.cu_ntt_lanes << "\n";
  out << "cu_mac_lanes = " << c.cu_mac_lanes << "\n";
  out << "fill_extra = " << c.fill_extra << "\n";
  out << "cu_enabled = " << (c.cu_enabled ? 1 : 0) << "\n";
  out << "sa_depth = " << c.sa_depth << "\n";
  out << "hbm_bytes_per_cycle = " << c.hbm_bytes_per_cycle << "\n";
  out << "noc_bytes_per_cycle = " << c.noc_bytes_per_cycle << "\n";
  out << "scratchpad_mb_per_cluster = " << c.scratchpad_mb_per_cluster << "\n";
  out << "local_buffer_mb = " << c.local_buffer_mb << "\n";
  return out.str();
}

uint64_t HardwareConfig::config_hash() const { return fnv1a64(config_to_text(*this)); }

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    raise(Errc::InvalidArgument, "config key '" + key + "': bad integer '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    raise(Errc::InvalidArgument, "config key '" + key + "': bad number '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  raise(Errc::InvalidArgument, "config key '" + key + "': bad flag '" + v + "'");
}

std::vector<CuSpec> parse_cu_inventory(const std::string& v) {
  std::vector<CuSpec> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    size_t x = item.find('x');
    if (x == std::string::npos)
      raise(Errc::InvalidArgument, "cu_inventory entries must look like '4x2' (count x columns)");
    CuSpec cu;
    cu.count = parse_int("cu_inventory", trim(item.substr(0, x)));
    cu.columns = parse_int("cu_inventory", trim(item.substr(x + 1)));
    out.push_back(cu);
  }
  if (out.empty()) raise(Errc::InvalidArgument, "cu_inventory must not be empty");
  return out;
}

}  // namespace

HardwareConfig parse_config_text(const std::string& text) {
  HardwareConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    lineno++;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      raise(Errc::InvalidArgument,
            "config line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "clusters") cfg.clusters = parse_int(key, val);
    else if (key == "word_bits") cfg.word_bits = parse_int(key, val);
    else if (key == "nttu_per_cluster") cfg.nttu_per_cluster = parse_int(key, val);
    else if (key == "nttu_m") cfg.nttu_m = parse_int(key, val);
    else if (key == "transpose_per_cluster") cfg.transpose_per_cluster = parse_int(key, val);
    else if (key == "cu_inventory") cfg.cu_inventory = parse_cu_inventory(val);
    else if (key == "n_r") cfg.n_r = parse_int(key, val);
    else if (key == "autou_per_cluster") cfg.autou_per_cluster = parse_int(key, val);
    else if (key == "rotator_per_cluster") cfg.rotator_per_cluster = parse_int(key, val);
    else if (key == "vpu_per_cluster") cfg.vpu_per_cluster = parse_int(key, val);
    else if (key == "ewe_per_cluster") cfg.ewe_per_cluster = parse_int(key, val);
    else if (key == "unit_lanes") cfg.unit_lanes = parse_int(key, val);
    else if (key == "ewe_lanes") cfg.ewe_lanes = parse_int(key, val);
    else if (key == "cu_ntt_lanes") cfg.cu_ntt_lanes = parse_int(key, val);
    else if (key == "cu_mac_lanes") cfg.cu_mac_lanes = parse_int(key, val);
    else if (key == "fill_extra") cfg.fill_extra = parse_int(key, val);
    else if (key == "cu_enabled") cfg.cu_enabled = parse_bool(key, val);
    else if (key == "sa_depth") cfg.sa_depth = parse_int(key, val);
    else if (key == "hbm_bytes_per_cycle") cfg.hbm_bytes_per_cycle = parse_double(key, val);
    else if (key == "noc_bytes_per_cycle") cfg.noc_bytes_per_cycle = parse_double(key, val);
    else if (key == "scratchpad_mb_per_cluster")
      cfg.scratchpad_mb_per_cluster = parse_double(key, val);
    else if (key == "local_buffer_mb") cfg.local_buffer_mb = parse_double(key, val);
    else raise(Errc::InvalidArgument, "unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

HardwareConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// KernelGraph basics
// ---------------------------------------------------------------------------

const char* kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::Ntt: return "ntt";
    case KernelKind::Intt: return "intt";
    case KernelKind::Mac: return "mac";
    case KernelKind::Auto: return "auto";
    case KernelKind::Elementwise: return "elementwise";
    case KernelKind::Transpose: return "transpose";
    case KernelKind::Rotate: return "rotate";
    case KernelKind::Decompose: return "decompose";
    case KernelKind::NocTransfer: return "noc";
    case KernelKind::HbmTransfer: return "hbm";
  }
  return "?";
}

KernelCounts KernelGraph::kernel_counts() const {
  KernelCounts total;
  for (const KernelNode& n : nodes) {
    total.ntt += n.events.ntt;
    total.intt += n.events.intt;
    total.bconv += n.events.bconv;
    total.ip += n.events.ip;
    total.modmul += n.events.modmul;
    total.modadd += n.events.modadd;
    total.auto_perm += n.events.auto_perm;
  }
  return total;
}

void KernelGraph::validate() const {
  for (size_t i = 0; i < nodes.size(); i++) {
    if (nodes[i].id != i) raise(Errc::ShapeError, "kernel graph ids must be dense");
    for (uint32_t d : nodes[i].deps)
      if (d >= nodes[i].id)
        raise(Errc::ShapeError, "kernel graph dependencies must point at earlier nodes");
  }
}

uint32_t KernelGraph::add(KernelNode node) {
  node.id = static_cast<uint32_t>(nodes.size());
  nodes.push_back(std::move(node));
  return nodes.back().id;
}

KernelGraph merge_graphs(const std::vector<KernelGraph>& parts) {
  KernelGraph out;
  for (const KernelGraph& g : parts) {
    uint32_t base = static_cast<uint32_t>(out.nodes.size());
    for (KernelNode n : g.nodes) {
      n.id += base;
      for (uint32_t& d : n.deps) d += base;
      out.nodes.push_back(std::move(n));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

namespace {

uint64_t limb_transform_work(size_t n) {
  int logn = std::bit_width(n) - 1;
  return static_cast<uint64_t>(n / 2) * static_cast<uint64_t>(logn);
}

struct NodeArgs {
  KernelKind kind;
  SchemeTag scheme;
  size_t n;
  KernelCounts events{};
  uint64_t work = 0;
  uint64_t elems = 0;
  uint64_t bytes = 0;
  std::vector<uint32_t> deps{};
  MacClass mac = MacClass::None;
};

uint32_t put(KernelGraph& g, NodeArgs a) {
  KernelNode node;
  node.kind = a.kind;
  node.scheme = a.scheme;
  node.n_poly = a.n;
  node.events = a.events;
  node.work = a.work;
  node.elems = a.elems ? a.elems : a.work;
  node.bytes = a.bytes;
  node.deps = std::move(a.deps);
  node.mac_class = a.mac;
  return g.add(std::move(node));
}

// Hybrid keyswitch of one 2-component ciphertext at level l: beta digit
// raise+transform pipelines, 2*beta evaluation-key accumulations, 2E inverse
// transforms, then per component a scale-down basis conversion, the P^-1
// combine, and l+1 re-transforms. Mirrors the instrumented library recorder
// event for event. Returns the ids of the final re-transform nodes.
std::vector<uint32_t> append_keyswitch(KernelGraph& g, SchemeTag scheme, size_t n, int level,
                                       int alpha, const std::vector<uint32_t>& deps_in) {
  int l1 = level + 1;
  int beta = (l1 + alpha - 1) / alpha;
  int big_e = l1 + alpha;
  uint64_t nn = n;
  uint64_t tw = limb_transform_work(n);

  std::vector<uint32_t> ip_of_comp[2];
  for (int d = 0; d < beta; d++) {
    int sz = std::min((d + 1) * alpha, l1) - d * alpha;
    KernelCounts bc;
    bc.bconv = 1;
    uint32_t raise = put(g, {KernelKind::Mac, scheme, n, bc,
                             static_cast<uint64_t>(sz) * (big_e - sz) * nn, 0, 0, deps_in,
                             MacClass::BasisConv});
    std::vector<uint32_t> digit_ntts;
    for (int j = 0; j < big_e; j++) {
      KernelCounts ev;
      ev.ntt = 1;
      digit_ntts.push_back(put(g, {KernelKind::Ntt, scheme, n, ev, tw, nn, 0, {raise}}));
    }
    for (int c = 0; c < 2; c++) {
      KernelCounts ev;
      ev.ip = 1;
      ip_of_comp[c].push_back(put(g, {KernelKind::Mac, scheme, n, ev,
                                      static_cast<uint64_t>(big_e) * nn, 0, 0, digit_ntts,
                                      MacClass::InnerProduct}));
    }
  }

  std::vector<uint32_t> out;
  for (int c = 0; c < 2; c++) {
    std::vector<uint32_t> intts;
    for (int j = 0; j < big_e; j++) {
      KernelCounts ev;
      ev.intt = 1;
      intts.push_back(put(g, {KernelKind::Intt, scheme, n, ev, tw, nn, 0, ip_of_comp[c]}));
    }
    KernelCounts bc;
    bc.bconv = 1;
    uint32_t down = put(g, {KernelKind::Mac, scheme, n, bc,
                            static_cast<uint64_t>(alpha) * l1 * nn, 0, 0, intts,
                            MacClass::BasisConv});
    KernelCounts ew;
    ew.modmul = static_cast<uint64_t>(l1);
    ew.modadd = static_cast<uint64_t>(l1);
    uint32_t combine = put(g, {KernelKind::Elementwise, scheme, n, ew,
                               static_cast<uint64_t>(l1) * nn, static_cast<uint64_t>(l1) * nn,
                               0, {down}});
    for (int k = 0; k < l1; k++) {
      KernelCounts ev;
      ev.ntt = 1;
      out.push_back(put(g, {KernelKind::Ntt, scheme, n, ev, tw, nn, 0, {combine}}));
    }
  }
  return out;
}

// Automorphism + keyswitch back to the base key, as apply_galois performs it:
// permute both components, bring the permuted mask to coefficient rep, switch
// it, then fold the switched pair into the body. Returns the final add node.
uint32_t append_galois(KernelGraph& g, SchemeTag scheme, size_t n, int level, int alpha,
                       const std::vector<uint32_t>& deps_in) {
  int l1 = level + 1;
  uint64_t nn = n;
  uint64_t tw = limb_transform_work(n);
  KernelCounts ap;
  ap.auto_perm = static_cast<uint64_t>(2 * l1);
  uint32_t perm = put(g, {KernelKind::Auto, scheme, n, ap, 0,
                          static_cast<uint64_t>(2 * l1) * nn, 0, deps_in});
  std::vector<uint32_t> intts;
  for (int k = 0; k < l1; k++) {
    KernelCounts ev;
    ev.intt = 1;
    intts.push_back(put(g, {KernelKind::Intt, scheme, n, ev, tw, nn, 0, {perm}}));
  }
  std::vector<uint32_t> ks = append_keyswitch(g, scheme, n, level, alpha, intts);
  KernelCounts add;
  add.modadd = static_cast<uint64_t>(l1);
  ks.push_back(perm);
  return put(g, {KernelKind::Elementwise, scheme, n, add, 0,
                 static_cast<uint64_t>(l1) * nn, 0, std::move(ks)});
}

}  // namespace

KernelGraph ckks_op_graph(const ckks::CkksParams& params, CkksOp op, int level) {
  if (level < 0 || level > params.levels)
    raise(Errc::LevelMismatch, "kernel graph level out of range");
  KernelGraph g;
  size_t n = params.n_poly;
  uint64_t nn = n;
  uint64_t tw = limb_transform_work(n);
  int l1 = level + 1;
  SchemeTag tag = SchemeTag::Ckks;

  switch (op) {
    case CkksOp::HAdd:
    case CkksOp::HSub: {
      KernelCounts ev;
      ev.modadd = static_cast<uint64_t>(2 * l1);
      put(g, {KernelKind::Elementwise, tag, n, ev, 0, static_cast<uint64_t>(2 * l1) * nn, 0, {}});
      break;
    }
    case CkksOp::PAdd:
    case CkksOp::PMult: {
      std::vector<uint32_t> ntts;
      for (int k = 0; k < l1; k++) {
        KernelCounts ev;
        ev.ntt = 1;
        ntts.push_back(put(g, {KernelKind::Ntt, tag, n, ev, tw, nn, 0, {}}));
      }
      KernelCounts ev;
      uint64_t work = 0;
      if (op == CkksOp::PAdd) {
        ev.modadd = static_cast<uint64_t>(l1);
      } else {
        ev.modmul = static_cast<uint64_t>(2 * l1);
        work = static_cast<uint64_t>(2 * l1) * nn;
      }
      put(g, {KernelKind::Elementwise, tag, n, ev, work,
              static_cast<uint64_t>(2 * l1) * nn, 0, std::move(ntts)});
      break;
    }
    case CkksOp::HMult: {
      KernelCounts tensor;
      tensor.modmul = static_cast<uint64_t>(4 * l1);
      tensor.modadd = static_cast<uint64_t>(l1);
      uint32_t t = put(g, {KernelKind::Elementwise, tag, n, tensor,
                           static_cast<uint64_t>(4 * l1) * nn,
                           static_cast<uint64_t>(4 * l1) * nn, 0, {}});
      std::vector<uint32_t> intts;
      for (int k = 0; k < l1; k++) {
        KernelCounts ev;
        ev.intt = 1;
        intts.push_back(put(g, {KernelKind::Intt, tag, n, ev, tw, nn, 0, {t}}));
      }
      std::vector<uint32_t> ks = append_keyswitch(g, tag, n, level, params.alpha, intts);
      KernelCounts add;
      add.modadd = static_cast<uint64_t>(2 * l1);
      put(g, {KernelKind::Elementwise, tag, n, add, 0,
              static_cast<uint64_t>(2 * l1) * nn, 0, std::move(ks)});
      break;
    }
    case CkksOp::Rescale: {
      if (level < 1) raise(Errc::NoLevelsLeft, "rescale needs a level to drop");
      for (int c = 0; c < 2; c++) {
        KernelCounts iv;
        iv.intt = 1;
        uint32_t top = put(g, {KernelKind::Intt, tag, n, iv, tw, nn, 0, {}});
        std::vector<uint32_t> ntts;
        for (int k = 0; k < level; k++) {
          KernelCounts ev;
          ev.ntt = 1;
          ntts.push_back(put(g, {KernelKind::Ntt, tag, n, ev, tw, nn, 0, {top}}));
        }
        KernelCounts ew;
        ew.modadd = static_cast<uint64_t>(level);
        ew.modmul = static_cast<uint64_t>(level);
        put(g, {KernelKind::Elementwise, tag, n, ew, static_cast<uint64_t>(level) * nn,
                static_cast<uint64_t>(2 * level) * nn, 0, std::move(ntts)});
      }
      break;
    }
    case CkksOp::HRotate: {
      append_galois(g, tag, n, level, params.alpha, {});
      break;
    }
    case CkksOp::KeySwitch: {
      append_keyswitch(g, tag, n, level, params.alpha, {});
      break;
    }
  }
  g.validate();
  return g;
}

KernelGraph ckks_keyswitch_stream(const ckks::CkksParams& params, int level, int reps,
                                  const HardwareConfig& cfg) {
  if (reps < 1) raise(Errc::InvalidArgument, "keyswitch stream needs reps >= 1");
  if (level < 0 || level > params.levels)
    raise(Errc::LevelMismatch, "kernel graph level out of range");
  KernelGraph g;
  size_t n = params.n_poly;
  int l1 = level + 1;
  int alpha = params.alpha;
  int beta = (l1 + alpha - 1) / alpha;
  int big_e = l1 + alpha;
  uint64_t word_bytes = (static_cast<uint64_t>(params.n_poly) * cfg.word_bits + 7) / 8;

  // One shared evaluation key: dnum rows x 2 components x E limbs. If it
  // does not fit the scratchpad it streams from HBM once per cluster stream,
  // modeled as bandwidth occupancy overlapped with compute (double-buffered
  // key rows arrive ahead of their digit), so the transfer has no dependents.
  double evk_mb = static_cast<double>(params.dnum) * 2 * big_e * word_bytes / (1024.0 * 1024.0);
  if (evk_mb > cfg.scratchpad_mb_per_cluster) {
    KernelNode hbm;
    hbm.kind = KernelKind::HbmTransfer;
    hbm.scheme = SchemeTag::Ckks;
    hbm.n_poly = n;
    hbm.bytes = static_cast<uint64_t>(params.dnum) * 2 * big_e * word_bytes;
    hbm.elems = hbm.bytes;
    g.add(std::move(hbm));
  }

  for (int r = 0; r < reps; r++) {
    // Digit gather: the keyswitch operand changes layout before each basis
    // conversion; modeled as one NoC move of the source limbs.
    std::vector<uint32_t> per_digit_dep;
    for (int d = 0; d < beta; d++) {
      int sz = std::min((d + 1) * alpha, l1) - d * alpha;
      KernelNode noc;
      noc.kind = KernelKind::NocTransfer;
      noc.scheme = SchemeTag::Ckks;
      noc.n_poly = n;
      noc.bytes = static_cast<uint64_t>(sz) * word_bytes;
      noc.elems = noc.bytes;
      per_digit_dep.push_back(g.add(std::move(noc)));
    }
    // The keyswitch body reuses the shared builder, then we patch the digit
    // raises to hang off their gather transfers.
    size_t first = g.nodes.size();
    append_keyswitch(g, SchemeTag::Ckks, n, level, alpha, {});
    int digit = 0;
    for (size_t i = first; i < g.nodes.size() && digit < beta; i++) {
      if (g.nodes[i].kind == KernelKind::Mac && g.nodes[i].events.bconv == 1) {
        g.nodes[i].deps.push_back(per_digit_dep[digit]);
        digit++;
      }
    }
  }
  g.validate();
  return g;
}

KernelGraph pbs_graph(const tfhe::TfheParams& params, int streams) {
  if (streams < 1) raise(Errc::InvalidArgument, "pbs graph needs streams >= 1");
  KernelGraph g;
  size_t n = params.n_poly;
  uint64_t nn = n;
  uint64_t tw = limb_transform_work(n);
  int k1 = params.glwe_dim + 1;
  int lb = params.l_b;
  SchemeTag tag = SchemeTag::Tfhe;

  for (int s = 0; s < streams; s++) {
    // Modulus switch of the input LWE sample: scalar rounding, no ring work.
    uint32_t msw = put(g, {KernelKind::Elementwise, tag, n, {}, 0,
                           static_cast<uint64_t>(params.n_lwe) + 1, 0, {}});
    KernelCounts init;
    init.auto_perm = static_cast<uint64_t>(k1);
    uint32_t acc = put(g, {KernelKind::Rotate, tag, n, init, 0,
                           static_cast<uint64_t>(k1) * nn, 0, {msw}});
    for (size_t j = 0; j < params.n_lwe; j++) {
      KernelCounts rot;
      rot.auto_perm = static_cast<uint64_t>(k1);
      uint32_t rotated = put(g, {KernelKind::Rotate, tag, n, rot, 0,
                                 static_cast<uint64_t>(k1) * nn, 0, {acc}});
      KernelCounts diff;
      diff.modadd = static_cast<uint64_t>(k1);
      uint32_t d = put(g, {KernelKind::Elementwise, tag, n, diff, 0,
                           static_cast<uint64_t>(k1) * nn, 0, {rotated, acc}});
      uint32_t dec = put(g, {KernelKind::Decompose, tag, n, {}, 0,
                             static_cast<uint64_t>(k1) * lb * nn, 0, {d}});
      std::vector<uint32_t> digit_ntts;
      for (int row = 0; row < k1 * lb; row++) {
        KernelCounts ev;
        ev.ntt = 1;
        digit_ntts.push_back(put(g, {KernelKind::Ntt, tag, n, ev, tw, nn, 0, {dec}}));
      }
      std::vector<uint32_t> comp_out;
      for (int c = 0; c < k1; c++) {
        KernelCounts ev;
        ev.ip = static_cast<uint64_t>(k1) * lb;
        uint32_t mac = put(g, {KernelKind::Mac, tag, n, ev,
                               static_cast<uint64_t>(k1) * lb * nn, 0, 0, digit_ntts,
                               MacClass::ExternalProduct});
        KernelCounts iv;
        iv.intt = 1;
        comp_out.push_back(put(g, {KernelKind::Intt, tag, n, iv, tw, nn, 0, {mac}}));
      }
      KernelCounts addev;
      addev.modadd = static_cast<uint64_t>(k1);
      comp_out.push_back(acc);
      acc = put(g, {KernelKind::Elementwise, tag, n, addev, 0,
                    static_cast<uint64_t>(k1) * nn, 0, std::move(comp_out)});
    }
    // Sample extraction: a coefficient gather with sign flips, no multiplies.
    uint32_t ext = put(g, {KernelKind::Rotate, tag, n, {}, 0,
                           static_cast<uint64_t>(params.glwe_dim) * nn, 0, {acc}});
    // LWE keyswitch back to the base dimension: kN * l_k gadget rows, each a
    // short dot product; recorded as inner-product events on the row count.
    KernelCounts ks;
    ks.ip = static_cast<uint64_t>(params.glwe_dim) * nn * params.l_k;
    put(g, {KernelKind::Mac, tag, n, ks,
            ks.ip * (static_cast<uint64_t>(params.n_lwe) + 1), 0, 0, {ext},
            MacClass::LweDot});
  }
  g.validate();
  return g;
}

namespace {

// Pack-tree merge of two half-packed ciphertexts at level 0, mirroring the
// conversion library: rotate the right half, add/subtract, automorphism-fold
// the difference, final add. Returns the merge output node.
uint32_t append_pack_merge(KernelGraph& g, size_t n, int alpha, uint32_t left, uint32_t right) {
  uint64_t nn = n;
  SchemeTag tag = SchemeTag::Conversion;
  KernelCounts rot;
  rot.modmul = 2;  // monomial twist, both components, single limb
  uint32_t rotated = put(g, {KernelKind::Elementwise, tag, n, rot, 2 * nn, 2 * nn, 0, {right}});
  KernelCounts addev;
  addev.modadd = 2;
  uint32_t sum = put(g, {KernelKind::Elementwise, tag, n, addev, 0, 2 * nn, 0, {left, rotated}});
  uint32_t dif = put(g, {KernelKind::Elementwise, tag, n, addev, 0, 2 * nn, 0, {left, rotated}});
  uint32_t folded = append_galois(g, tag, n, 0, alpha, {dif});
  KernelCounts fin;
  fin.modadd = 2;
  return put(g, {KernelKind::Elementwise, tag, n, fin, 0, 2 * nn, 0, {sum, folded}});
}

uint32_t append_pack_tree(KernelGraph& g, size_t n, int alpha, std::vector<uint32_t> cts) {
  while (cts.size() > 1) {
    std::vector<uint32_t> next;
    for (size_t i = 0; i + 1 < cts.size(); i += 2)
      next.push_back(append_pack_merge(g, n, alpha, cts[i], cts[i + 1]));
    cts = std::move(next);
  }
  return cts[0];
}

}  // namespace

KernelGraph lwes_to_ckks_graph(const ckks::CkksParams& params, size_t n_slot) {
  if (n_slot < 1 || n_slot > params.n_poly || !std::has_single_bit(n_slot))
    raise(Errc::ShapeError, "n_slot must be a power of two within the ring degree");
  KernelGraph g;
  size_t n = params.n_poly;
  uint64_t nn = n;
  uint64_t tw = limb_transform_work(n);
  SchemeTag tag = SchemeTag::Conversion;

  std::vector<uint32_t> embedded;
  for (size_t i = 0; i < n_slot; i++) {
    KernelCounts ev;
    ev.ntt = 1;
    uint32_t b = put(g, {KernelKind::Ntt, tag, n, ev, tw, nn, 0, {}});
    uint32_t a = put(g, {KernelKind::Ntt, tag, n, ev, tw, nn, 0, {}});
    KernelNode join;  // zero-cost fan-in so the merge tree can hold one id
    join.kind = KernelKind::Elementwise;
    join.scheme = tag;
    join.n_poly = n;
    join.deps = {b, a};
    embedded.push_back(g.add(std::move(join)));
  }
  uint32_t packed = append_pack_tree(g, n, params.alpha, embedded);

  size_t rounds = std::bit_width(n / n_slot) - 1;
  uint32_t cur = packed;
  for (size_t r = 0; r < rounds; r++) {
    uint32_t folded = append_galois(g, tag, n, 0, params.alpha, {cur});
    KernelCounts addev;
    addev.modadd = 2;
    cur = put(g, {KernelKind::Elementwise, tag, n, addev, 0, 2 * nn, 0, {cur, folded}});
  }
  g.validate();
  return g;
}

KernelGraph ckks_to_lwes_graph(const ckks::CkksParams& params, size_t n_slot) {
  if (n_slot < 1 || n_slot > params.n_poly || !std::has_single_bit(n_slot))
    raise(Errc::ShapeError, "n_slot must be a power of two within the ring degree");
  KernelGraph g;
  size_t n = params.n_poly;
  uint64_t nn = n;
  uint64_t tw = limb_transform_work(n);
  SchemeTag tag = SchemeTag::Conversion;
  KernelCounts iv;
  iv.intt = 1;
  uint32_t b = put(g, {KernelKind::Intt, tag, n, iv, tw, nn, 0, {}});
  uint32_t a = put(g, {KernelKind::Intt, tag, n, iv, tw, nn, 0, {}});
  for (size_t i = 0; i < n_slot; i++)
    put(g, {KernelKind::Rotate, tag, n, {}, 0, nn + 1, 0, {b, a}});
  g.validate();
  return g;
}

KernelGraph build_kernel_graph(const OpRequest& req, const ckks::CkksParams* ckks_params,
                               const tfhe::TfheParams* tfhe_params) {
  auto need_ckks = [&]() -> const ckks::CkksParams& {
    if (!ckks_params) raise(Errc::InvalidArgument, "operation '" + req.op + "' needs CKKS params");
    return *ckks_params;
  };
  auto need_tfhe = [&]() -> const tfhe::TfheParams& {
    if (!tfhe_params) raise(Errc::InvalidArgument, "operation '" + req.op + "' needs TFHE params");
    return *tfhe_params;
  };
  auto level_of = [&](const ckks::CkksParams& p) {
    return req.level < 0 ? p.levels : req.level;
  };
  if (req.op == "hadd") return ckks_op_graph(need_ckks(), CkksOp::HAdd, level_of(need_ckks()));
  if (req.op == "hsub") return ckks_op_graph(need_ckks(), CkksOp::HSub, level_of(need_ckks()));
  if (req.op == "padd") return ckks_op_graph(need_ckks(), CkksOp::PAdd, level_of(need_ckks()));
  if (req.op == "pmult") return ckks_op_graph(need_ckks(), CkksOp::PMult, level_of(need_ckks()));
  if (req.op == "hmult") return ckks_op_graph(need_ckks(), CkksOp::HMult, level_of(need_ckks()));
  if (req.op == "rescale")
    return ckks_op_graph(need_ckks(), CkksOp::Rescale, level_of(need_ckks()));
  if (req.op == "hrotate")
    return ckks_op_graph(need_ckks(), CkksOp::HRotate, level_of(need_ckks()));
  if (req.op == "keyswitch")
    return ckks_op_graph(need_ckks(), CkksOp::KeySwitch, level_of(need_ckks()));
  if (req.op == "pbs") return pbs_graph(need_tfhe(), 1);
  if (req.op == "nand") {
    // Gate linear combination and final offset are LWE vector adds with no
    // recorded kernel events; the bootstrap dominates and matches the
    // recorder, so the graph is the bootstrap's wrapped in two scalar nodes.
    const tfhe::TfheParams& p = need_tfhe();
    KernelGraph g;
    KernelNode pre;
    pre.kind = KernelKind::Elementwise;
    pre.scheme = SchemeTag::Tfhe;
    pre.n_poly = p.n_poly;
    pre.elems = p.n_lwe + 1;
    uint32_t pre_id = g.add(std::move(pre));
    KernelGraph bs = pbs_graph(p, 1);
    uint32_t base = static_cast<uint32_t>(g.nodes.size());
    for (KernelNode n : bs.nodes) {
      n.id += base;
      for (uint32_t& d : n.deps) d += base;
      g.nodes.push_back(std::move(n));
    }
    g.nodes[base].deps.push_back(pre_id);
    KernelNode post;
    post.kind = KernelKind::Elementwise;
    post.scheme = SchemeTag::Tfhe;
    post.n_poly = p.n_poly;
    post.elems = p.n_lwe + 1;
    post.deps = {static_cast<uint32_t>(g.nodes.size() - 1)};
    g.add(std::move(post));
    g.validate();
    return g;
  }
  if (req.op == "lwes-to-ckks") return lwes_to_ckks_graph(need_ckks(), req.n_slot);
  if (req.op == "ckks-to-lwes") return ckks_to_lwes_graph(need_ckks(), req.n_slot);
  raise(Errc::UnsupportedOp, "unknown operation '" + req.op + "'");
}

// ---------------------------------------------------------------------------
// Breakdown
// ---------------------------------------------------------------------------

WorkBreakdown op_breakdown(const KernelGraph& graph) {
  WorkBreakdown b;
  for (const KernelNode& n : graph.nodes) {
    switch (n.kind) {
      case KernelKind::Ntt:
      case KernelKind::Intt: b.ntt_work += n.work; break;
      case KernelKind::Mac: b.mac_work += n.work; break;
      default: b.other_work += n.work; break;
    }
  }
  uint64_t total = b.ntt_work + b.mac_work + b.other_work;
  if (total == 0) return b;
  b.ntt_fraction = static_cast<double>(b.ntt_work) / static_cast<double>(total);
  b.mac_fraction = static_cast<double>(b.mac_work) / static_cast<double>(total);
  // An empty residual category reports exactly zero; the two divisions can
  // otherwise leave the closing term a rounding error below it.
  b.other_fraction = b.other_work == 0 ? 0.0 : 1.0 - b.ntt_fraction - b.mac_fraction;
  return b;
}

// ---------------------------------------------------------------------------
// NTT mapping strategies
// ---------------------------------------------------------------------------

const char* ntt_strategy_name(NttStrategy s) {
  switch (s) {
    case NttStrategy::F1Like: return "f1-like";
    case NttStrategy::FABLike: return "fab-like";
    case NttStrategy::Trinity: return "trinity";
  }
  return "?";
}

// Stage-occupancy utilization models, one butterfly stage at a time:
//  * F1-like: a rigid pipeline sized for the largest transform (two passes of
//    log2(2M) stages, 2^16 points via the four-step split). Every transform
//    traverses all 2*log2(2M) stages; shorter transforms bypass stages that
//    still occupy the pipe, so utilization = log2(N) / (2*log2(2M)).
//  * FAB-like: a single massively wide butterfly stage whose staging buffers
//    are provisioned for jobs of log2(2M) recirculation passes (its native
//    2M-point tile). Longer transforms keep the stage looping on one working
//    set while intake stalls, so the useful fraction is log2(2M) / log2(N).
//  * Trinity: composes exactly log2(N) stages (NTTU alone at N = 2M, NTTU +
//    CU columns up to 2M^2, two NTTU passes at N = 4M^2), so every occupied
//    stage does useful work.
std::pair<MappingPlan, double> map_ntt(size_t n_ntt, const HardwareConfig& cfg,
                                       NttStrategy strategy) {
  if (n_ntt < 256 || n_ntt > 65536 || !std::has_single_bit(n_ntt))
    raise(Errc::UnsupportedSize, "mapped transforms cover powers of two in [2^8, 2^16]");
  int logn = std::bit_width(n_ntt) - 1;
  int s = cfg.nttu_stages();
  MappingPlan plan;
  double util = 0;

  switch (strategy) {
    case NttStrategy::F1Like: {
      NttPhasePlan p;
      p.unit = "NTTU";
      p.useful_stages = logn;
      p.occupied_stages = 2 * s;
      plan.ntt_phases.push_back(p);
      util = static_cast<double>(logn) / (2 * s);
      break;
    }
    case NttStrategy::FABLike: {
      NttPhasePlan p;
      p.unit = "BU-array";
      p.useful_stages = s;
      p.occupied_stages = logn;
      plan.ntt_phases.push_back(p);
      util = static_cast<double>(s) / logn;
      break;
    }
    case NttStrategy::Trinity: {
      if (logn <= s) {
        NttPhasePlan p;
        p.unit = "NTTU";
        p.useful_stages = logn;
        p.occupied_stages = logn;  // trailing stages bypassed and released
        plan.ntt_phases.push_back(p);
      } else if (logn < 2 * s) {
        NttPhasePlan p1;
        p1.unit = "NTTU";
        p1.useful_stages = s;
        p1.occupied_stages = s;
        plan.ntt_phases.push_back(p1);
        NttPhasePlan p2;
        p2.unit = "CU";
        p2.useful_stages = logn - s;
        p2.occupied_stages = logn - s;
        // compose CU columns greedily, largest shape first
        int need = logn - s;
        std::vector<CuSpec> inv = cfg.cu_inventory;
        std::sort(inv.begin(), inv.end(),
                  [](const CuSpec& a, const CuSpec& b) { return a.columns > b.columns; });
        for (CuSpec& cu : inv) {
          while (need > 0 && cu.count > 0 && cu.columns <= need) {
            p2.cu_columns.push_back(cu.columns);
            need -= cu.columns;
            cu.count--;
          }
        }
        if (need > 0)
          plan.notes.push_back("cu inventory cannot compose the phase-2 stage count exactly");
        plan.ntt_phases.push_back(p2);
      } else {
        for (int phase = 0; phase < 2; phase++) {
          NttPhasePlan p;
          p.unit = "NTTU";
          p.useful_stages = s;
          p.occupied_stages = s;
          plan.ntt_phases.push_back(p);
        }
        if (logn > 2 * s)
          raise(Errc::UnsupportedSize, "transform exceeds the two-phase composition");
      }
      int useful = 0, occupied = 0;
      for (const NttPhasePlan& p : plan.ntt_phases) {
        useful += p.useful_stages;
        occupied += p.occupied_stages;
      }
      util = static_cast<double>(useful) / occupied;
      break;
    }
  }
  return {std::move(plan), util};
}

std::vector<NttUtilRow> ntt_util_sweep(const HardwareConfig& cfg) {
  std::vector<NttUtilRow> rows;
  for (size_t n = 256; n <= 65536; n *= 2) {
    NttUtilRow row;
    row.n = n;
    row.f1_like = map_ntt(n, cfg, NttStrategy::F1Like).second;
    row.fab_like = map_ntt(n, cfg, NttStrategy::FABLike).second;
    row.trinity = map_ntt(n, cfg, NttStrategy::Trinity).second;
    rows.push_back(row);
  }
  return rows;
}

double ntt_mean_improvement(const std::vector<NttUtilRow>& rows) {
  if (rows.empty()) return 0;
  double acc = 0;
  for (const NttUtilRow& r : rows) acc += r.trinity / std::max(r.f1_like, r.fab_like);
  return acc / static_cast<double>(rows.size());
}

}  // namespace trinity::archsim
