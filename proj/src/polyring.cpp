#include "trinity/polyring.hpp"

#include <algorithm>
#include <bit>

namespace trinity {

namespace {

bool is_pow2(size_t x) { return x != 0 && (x & (x - 1)) == 0; }

unsigned log2_exact(size_t x) { return static_cast<unsigned>(std::countr_zero(x)); }

void check_table(const RingPolynomial& p, const NttTables& t) {
  if (t.n != p.n() || t.mod.value != p.mod.value)
    raise(Errc::TableMismatch, "tables do not match polynomial length/modulus");
}

std::vector<uint64_t> shoup_all(const std::vector<uint64_t>& w, const Modulus& m) {
  std::vector<uint64_t> out(w.size());
  for (size_t i = 0; i < w.size(); i++) out[i] = shoup_precompute(w[i], m);
  return out;
}

void build_stage_twiddles(NttTables& t) {
  const Modulus& m = t.mod;
  unsigned stages = log2_exact(t.n);
  t.stage_off.resize(stages);
  size_t total = t.n - 1;
  t.fwd_tw.reserve(total);
  t.inv_tw.reserve(total);
  uint64_t omega_inv = mod_inv(t.omega, m);
  uint64_t ws = t.omega;      // omega^(2^s)
  uint64_t wsi = omega_inv;   // omega^(-2^s)
  for (unsigned s = 0; s < stages; s++) {
    t.stage_off[s] = t.fwd_tw.size();
    size_t count = t.n >> (s + 1);
    uint64_t f = 1, fi = 1;
    for (size_t mth = 0; mth < count; mth++) {
      t.fwd_tw.push_back(f);
      t.inv_tw.push_back(fi);
      f = mod_mul(f, ws, m);
      fi = mod_mul(fi, wsi, m);
    }
    ws = mod_mul(ws, ws, m);
    wsi = mod_mul(wsi, wsi, m);
  }
  t.fwd_tw_shoup = shoup_all(t.fwd_tw, m);
  t.inv_tw_shoup = shoup_all(t.inv_tw, m);
}

// One forward constant-geometry pass over all stages; input already twisted.
void cg_forward(std::vector<uint64_t>& buf, const NttTables& t) {
  size_t n = t.n;
  unsigned stages = log2_exact(n);
  std::vector<uint64_t> tmp(n);
  const Modulus& m = t.mod;
  for (unsigned s = 0; s < stages; s++) {
    size_t off = t.stage_off[s];
    for (size_t j = 0; j < n / 2; j++) {
      uint64_t a = buf[j], b = buf[j + n / 2];
      size_t w = off + (j >> s);
      tmp[2 * j] = mod_add(a, b, m);
      tmp[2 * j + 1] = shoup_mul(mod_sub(a, b, m), t.fwd_tw[w], t.fwd_tw_shoup[w], m);
    }
    buf.swap(tmp);
  }
}

// Reversed stages; leaves the result scaled by n (caller divides).
void cg_inverse(std::vector<uint64_t>& buf, const NttTables& t) {
  size_t n = t.n;
  unsigned stages = log2_exact(n);
  std::vector<uint64_t> tmp(n);
  const Modulus& m = t.mod;
  for (unsigned s = stages; s-- > 0;) {
    size_t off = t.stage_off[s];
    for (size_t j = 0; j < n / 2; j++) {
      size_t w = off + (j >> s);
      uint64_t u = buf[2 * j];
      uint64_t v = shoup_mul(buf[2 * j + 1], t.inv_tw[w], t.inv_tw_shoup[w], m);
      tmp[j] = mod_add(u, v, m);
      tmp[j + n / 2] = mod_sub(u, v, m);
    }
    buf.swap(tmp);
  }
}

}  // namespace

NttTables NttTables::negacyclic_tables(const Modulus& mod, size_t n) {
  if (!is_pow2(n) || n < 2 || n > (1u << 17))
    raise(Errc::UnsupportedSize, "ring size must be a power of two in [2, 2^17]");
  if (mod.two_n % (2 * n) != 0)
    raise(Errc::TableMismatch, "modulus was not generated for a ring this large");
  NttTables t;
  t.mod = mod;
  t.n = n;
  t.negacyclic = true;
  t.psi = mod_pow(mod.primitive_root, mod.two_n / (2 * n), mod);
  t.omega = mod_mul(t.psi, t.psi, mod);
  t.twist_seed = {1, t.psi};
  build_stage_twiddles(t);

  t.twist.resize(n);
  t.untwist.resize(n);
  t.n_inv = mod_inv(n % mod.value, mod);
  t.n_inv_shoup = shoup_precompute(t.n_inv, mod);
  uint64_t psi_inv = mod_inv(t.psi, mod);
  uint64_t f = 1, g = t.n_inv;
  for (size_t i = 0; i < n; i++) {
    t.twist[i] = f;
    t.untwist[i] = g;
    f = mod_mul(f, t.psi, mod);
    g = mod_mul(g, psi_inv, mod);
  }
  t.twist_shoup = shoup_all(t.twist, mod);
  t.untwist_shoup = shoup_all(t.untwist, mod);

  unsigned stages = log2_exact(n);
  t.exp_map.resize(n);
  t.pos_of_exp.assign(2 * n, UINT32_MAX);
  for (size_t p = 0; p < n; p++) {
    uint32_t e = (2 * bit_reverse(static_cast<uint32_t>(p), stages) + 1) % (2 * n);
    t.exp_map[p] = e;
    t.pos_of_exp[e] = static_cast<uint32_t>(p);
  }
  return t;
}

NttTables NttTables::cyclic_tables(const Modulus& mod, size_t n, uint64_t omega) {
  if (!is_pow2(n) || n < 2) raise(Errc::UnsupportedSize, "cyclic size must be a power of two >= 2");
  if (mod_pow(omega, n / 2, mod) != mod.value - 1)
    raise(Errc::InvalidArgument, "omega is not a primitive n-th root of unity");
  NttTables t;
  t.mod = mod;
  t.n = n;
  t.negacyclic = false;
  t.omega = omega;
  t.psi = 0;
  build_stage_twiddles(t);
  t.n_inv = mod_inv(n % mod.value, mod);
  t.n_inv_shoup = shoup_precompute(t.n_inv, mod);
  unsigned stages = log2_exact(n);
  t.exp_map.resize(n);
  for (size_t p = 0; p < n; p++) t.exp_map[p] = bit_reverse(static_cast<uint32_t>(p), stages);
  return t;
}

RingPolynomial ntt_forward(const RingPolynomial& p, const NttTables& t) {
  check_table(p, t);
  if (p.rep != Rep::Coefficient) raise(Errc::RepError, "ntt_forward expects coefficient rep");
  RingPolynomial out = p;
  if (t.negacyclic) {
    for (size_t i = 0; i < t.n; i++)
      out.coeffs[i] = shoup_mul(out.coeffs[i], t.twist[i], t.twist_shoup[i], t.mod);
  }
  cg_forward(out.coeffs, t);
  out.rep = Rep::Evaluation;
  return out;
}

RingPolynomial ntt_inverse(const RingPolynomial& p, const NttTables& t) {
  check_table(p, t);
  if (p.rep != Rep::Evaluation) raise(Errc::RepError, "ntt_inverse expects evaluation rep");
  RingPolynomial out = p;
  cg_inverse(out.coeffs, t);
  if (t.negacyclic) {
    for (size_t i = 0; i < t.n; i++)
      out.coeffs[i] = shoup_mul(out.coeffs[i], t.untwist[i], t.untwist_shoup[i], t.mod);
  } else {
    for (size_t i = 0; i < t.n; i++)
      out.coeffs[i] = shoup_mul(out.coeffs[i], t.n_inv, t.n_inv_shoup, t.mod);
  }
  out.rep = Rep::Coefficient;
  return out;
}

RingPolynomial four_step_ntt(const RingPolynomial& p, const NttTables& t1, const NttTables& t2,
                             bool precomputed_twist) {
  size_t n1 = t1.n, n2 = t2.n, n = n1 * n2;
  if (p.n() != n) raise(Errc::ShapeError, "phase sizes do not factor the polynomial length");
  if (p.rep != Rep::Coefficient) raise(Errc::RepError, "four_step_ntt expects coefficient rep");
  if (t1.negacyclic || t2.negacyclic)
    raise(Errc::TableMismatch, "four-step phases take cyclic tables");
  if (t1.mod.value != p.mod.value || t2.mod.value != p.mod.value)
    raise(Errc::TableMismatch, "phase tables built for a different modulus");
  const Modulus& m = p.mod;
  if (m.two_n % (2 * n) != 0)
    raise(Errc::TableMismatch, "modulus was not generated for a ring this large");
  uint64_t psi = mod_pow(m.primitive_root, m.two_n / (2 * n), m);
  uint64_t omega = mod_mul(psi, psi, m);
  if (t1.omega != mod_pow(omega, n2, m) || t2.omega != mod_pow(omega, n1, m))
    raise(Errc::TableMismatch, "phase roots are not omega^(n2), omega^(n1)");

  // Pre-twist by psi^i, generated as a running product.
  std::vector<uint64_t> a(n);
  uint64_t f = 1;
  for (size_t i = 0; i < n; i++) {
    a[i] = mod_mul(p.coeffs[i], f, m);
    f = mod_mul(f, psi, m);
  }

  // Phase 1: size-n1 transforms over the stride-n2 columns, results laid out
  // row-major so phase 2 reads contiguously.
  unsigned stages1 = log2_exact(n1);
  std::vector<uint64_t> scratch(n), col(n1);
  for (size_t c = 0; c < n2; c++) {
    for (size_t r = 0; r < n1; r++) col[r] = a[r * n2 + c];
    cg_forward(col, t1);
    for (size_t q = 0; q < n1; q++) scratch[q * n2 + c] = col[q];
  }

  // Twisting factors between phases: row q is the geometric sequence with
  // first item 1 and common ratio omega^bitrev(q), matching the stage output
  // order of phase 1.
  if (precomputed_twist) {
    std::vector<uint64_t> table(n);
    for (size_t q = 0; q < n1; q++) {
      uint64_t ratio = mod_pow(omega, bit_reverse(static_cast<uint32_t>(q), stages1), m);
      uint64_t g = 1;
      for (size_t c = 0; c < n2; c++) {
        table[q * n2 + c] = g;
        g = mod_mul(g, ratio, m);
      }
    }
    for (size_t i = 0; i < n; i++) scratch[i] = mod_mul(scratch[i], table[i], m);
  } else {
    for (size_t q = 0; q < n1; q++) {
      uint64_t ratio = mod_pow(omega, bit_reverse(static_cast<uint32_t>(q), stages1), m);
      uint64_t g = 1;
      for (size_t c = 0; c < n2; c++) {
        scratch[q * n2 + c] = mod_mul(scratch[q * n2 + c], g, m);
        g = mod_mul(g, ratio, m);
      }
    }
  }

  // Phase 2: size-n2 transforms over the contiguous rows.
  RingPolynomial out(n, m, Rep::Evaluation);
  std::vector<uint64_t> row(n2);
  for (size_t q = 0; q < n1; q++) {
    std::copy_n(scratch.begin() + q * n2, n2, row.begin());
    cg_forward(row, t2);
    std::copy_n(row.begin(), n2, out.coeffs.begin() + q * n2);
  }
  return out;
}

RingPolynomial galois_transform(const RingPolynomial& p, uint64_t t, const NttTables& tables) {
  size_t n = p.n();
  uint64_t two_n = 2 * n;
  t %= two_n;
  if ((t & 1) == 0) raise(Errc::InvalidArgument, "galois element must be odd");
  RingPolynomial out(n, p.mod, p.rep);
  if (p.rep == Rep::Evaluation) {
    check_table(p, tables);
    if (!tables.negacyclic) raise(Errc::TableMismatch, "galois permutation needs negacyclic tables");
    for (size_t pos = 0; pos < n; pos++) {
      uint64_t e = (static_cast<uint64_t>(tables.exp_map[pos]) * t) % two_n;
      out.coeffs[pos] = p.coeffs[tables.pos_of_exp[e]];
    }
  } else {
    // X^i -> X^(i*t), folded by X^N = -1.
    for (size_t i = 0; i < n; i++) {
      uint64_t j = (i * t) % two_n;
      uint64_t v = p.coeffs[i];
      if (j >= n) {
        out.coeffs[j - n] = mod_neg(v, p.mod);
      } else {
        out.coeffs[j] = v;
      }
    }
  }
  return out;
}

uint64_t galois_element_of_step(int64_t r, size_t n) {
  uint64_t two_n = 2 * n;
  uint64_t order = n / 2;  // multiplicative order of 5 mod 2N for N >= 4
  int64_t rr = r % static_cast<int64_t>(order);
  if (rr < 0) rr += static_cast<int64_t>(order);
  uint64_t t = 1;
  for (int64_t i = 0; i < rr; i++) t = (t * 5) % two_n;
  return t;
}

RingPolynomial automorphism(const RingPolynomial& p, int64_t r, const NttTables& tables) {
  return galois_transform(p, galois_element_of_step(r, p.n()), tables);
}

RingPolynomial monomial_rotate(const RingPolynomial& p, int64_t r) {
  if (p.rep != Rep::Coefficient) raise(Errc::RepError, "monomial_rotate expects coefficient rep");
  size_t n = p.n();
  uint64_t two_n = 2 * n;
  int64_t rr = r % static_cast<int64_t>(two_n);
  if (rr < 0) rr += static_cast<int64_t>(two_n);
  RingPolynomial out(n, p.mod, Rep::Coefficient);
  for (size_t i = 0; i < n; i++) {
    uint64_t j = (i + static_cast<uint64_t>(rr)) % two_n;
    uint64_t v = p.coeffs[i];
    if (j >= n) {
      out.coeffs[j - n] = mod_neg(v, p.mod);
    } else {
      out.coeffs[j] = v;
    }
  }
  return out;
}

uint64_t decompose_scale(const Modulus& mod, unsigned levels, unsigned log_base) {
  unsigned __int128 denom = static_cast<unsigned __int128>(1) << (levels * log_base);
  return static_cast<uint64_t>((static_cast<unsigned __int128>(mod.value) + denom / 2) / denom);
}

namespace {

// Most-significant-first greedy digits of y = round(c/scale), digits in
// [-B/2, B/2]; exact for |y| <= B^levels / 2.
void decompose_one(int64_t centered, uint64_t scale, unsigned levels, unsigned log_base,
                   int64_t* digits_out) {
  int64_t half = static_cast<int64_t>(scale) / 2;
  int64_t y = centered >= 0 ? (centered + half) / static_cast<int64_t>(scale)
                            : -((-centered + half) / static_cast<int64_t>(scale));
  int64_t cap = static_cast<int64_t>(1) << (levels * log_base - 1);
  y = std::clamp(y, -cap, cap);
  for (unsigned j = 0; j < levels; j++) {
    int64_t w = static_cast<int64_t>(1) << ((levels - 1 - j) * log_base);
    int64_t d = y >= 0 ? (y + w / 2) / w : -((-y + w / 2) / w);
    digits_out[j] = d;
    y -= d * w;
  }
}

}  // namespace

std::vector<RingPolynomial> digit_decompose(const RingPolynomial& p, unsigned levels,
                                            unsigned log_base) {
  if (p.rep != Rep::Coefficient) raise(Errc::RepError, "digit_decompose expects coefficient rep");
  if (levels * log_base > p.mod.bits)
    raise(Errc::DecompositionOverflow, "levels * log_base exceeds modulus width");
  uint64_t scale = decompose_scale(p.mod, levels, log_base);
  size_t n = p.n();
  std::vector<RingPolynomial> out(levels, RingPolynomial(n, p.mod, Rep::Coefficient));
  std::vector<int64_t> digits(levels);
  for (size_t i = 0; i < n; i++) {
    decompose_one(from_residue(p.coeffs[i], p.mod), scale, levels, log_base, digits.data());
    for (unsigned j = 0; j < levels; j++) out[j].coeffs[i] = to_residue(digits[j], p.mod);
  }
  return out;
}

std::vector<uint64_t> digit_decompose_scalar(uint64_t value, unsigned levels, unsigned log_base,
                                             const Modulus& mod) {
  if (levels * log_base > mod.bits)
    raise(Errc::DecompositionOverflow, "levels * log_base exceeds modulus width");
  uint64_t scale = decompose_scale(mod, levels, log_base);
  std::vector<int64_t> digits(levels);
  decompose_one(from_residue(value, mod), scale, levels, log_base, digits.data());
  std::vector<uint64_t> out(levels);
  for (unsigned j = 0; j < levels; j++) out[j] = to_residue(digits[j], mod);
  return out;
}

namespace {

void check_pair(const RingPolynomial& a, const RingPolynomial& b, bool need_eval) {
  if (a.n() != b.n() || a.mod.value != b.mod.value)
    raise(Errc::ShapeError, "operands differ in length or modulus");
  if (a.rep != b.rep) raise(Errc::RepError, "operands differ in representation");
  if (need_eval && a.rep != Rep::Evaluation)
    raise(Errc::RepError, "pointwise multiply expects evaluation rep");
}

}  // namespace

RingPolynomial poly_add(const RingPolynomial& a, const RingPolynomial& b) {
  check_pair(a, b, false);
  RingPolynomial out = a;
  for (size_t i = 0; i < a.n(); i++) out.coeffs[i] = mod_add(a.coeffs[i], b.coeffs[i], a.mod);
  return out;
}

RingPolynomial poly_sub(const RingPolynomial& a, const RingPolynomial& b) {
  check_pair(a, b, false);
  RingPolynomial out = a;
  for (size_t i = 0; i < a.n(); i++) out.coeffs[i] = mod_sub(a.coeffs[i], b.coeffs[i], a.mod);
  return out;
}

RingPolynomial poly_neg(const RingPolynomial& a) {
  RingPolynomial out = a;
  for (auto& c : out.coeffs) c = mod_neg(c, a.mod);
  return out;
}

RingPolynomial poly_mul_pointwise(const RingPolynomial& a, const RingPolynomial& b) {
  check_pair(a, b, true);
  RingPolynomial out = a;
  for (size_t i = 0; i < a.n(); i++) out.coeffs[i] = mod_mul(a.coeffs[i], b.coeffs[i], a.mod);
  return out;
}

RingPolynomial poly_mul_scalar(const RingPolynomial& a, uint64_t s) {
  RingPolynomial out = a;
  s %= a.mod.value;
  for (size_t i = 0; i < a.n(); i++) out.coeffs[i] = mod_mul(a.coeffs[i], s, a.mod);
  return out;
}

RingPolynomial negacyclic_mul(const RingPolynomial& a, const RingPolynomial& b,
                              const NttTables& t) {
  return ntt_inverse(poly_mul_pointwise(ntt_forward(a, t), ntt_forward(b, t)), t);
}

RingPolynomial random_polynomial(Rng& rng, const Modulus& mod, size_t n, Rep rep) {
  RingPolynomial out(n, mod, rep);
  for (auto& c : out.coeffs) c = rng.uniform(mod.value);
  return out;
}

}  // namespace trinity
