#include "trinity/ckks.hpp"

#include <algorithm>
#include <cmath>

#include <gmpxx.h>

namespace trinity::ckks {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Complex twin of the constant-geometry transform, used only by the encoder.
// Same stage structure and output ordering as the modular version, over the
// 2n-th complex root zeta = exp(i*pi/n).
void cg_complex_forward(std::vector<std::complex<double>>& buf) {
  size_t n = buf.size();
  unsigned stages = static_cast<unsigned>(std::countr_zero(n));
  std::vector<std::complex<double>> tmp(n);
  for (unsigned s = 0; s < stages; s++) {
    double step = 2.0 * kPi * static_cast<double>(1ULL << s) / static_cast<double>(n);
    for (size_t j = 0; j < n / 2; j++) {
      auto a = buf[j], b = buf[j + n / 2];
      auto w = std::polar(1.0, step * static_cast<double>(j >> s));
      tmp[2 * j] = a + b;
      tmp[2 * j + 1] = (a - b) * w;
    }
    buf.swap(tmp);
  }
}

void cg_complex_inverse(std::vector<std::complex<double>>& buf) {
  size_t n = buf.size();
  unsigned stages = static_cast<unsigned>(std::countr_zero(n));
  std::vector<std::complex<double>> tmp(n);
  for (unsigned s = stages; s-- > 0;) {
    double step = -2.0 * kPi * static_cast<double>(1ULL << s) / static_cast<double>(n);
    for (size_t j = 0; j < n / 2; j++) {
      auto u = buf[2 * j];
      auto v = buf[2 * j + 1] * std::polar(1.0, step * static_cast<double>(j >> s));
      tmp[j] = u + v;
      tmp[j + n / 2] = u - v;
    }
    buf.swap(tmp);
  }
  // stages doubled everything log2(n) times
  for (auto& x : buf) x /= static_cast<double>(n);
}

mpz_class mpz_of(uint64_t v) { return mpz_class(static_cast<unsigned long>(v)); }

uint64_t mpz_mod_u64(const mpz_class& x, uint64_t m) {
  mpz_class r = x % mpz_of(m);
  if (r < 0) r += mpz_of(m);
  return static_cast<uint64_t>(r.get_ui());
}

}  // namespace

CkksParams CkksParams::desk() {
  CkksParams p;
  p.n_poly = size_t{1} << 13;
  p.levels = 5;
  p.dnum = 2;
  p.alpha = 3;
  p.scale = static_cast<double>(1ULL << 30);
  uint64_t two_n = 2 * p.n_poly;
  auto big = ntt_prime_chain(36, two_n, 4);
  auto mid = ntt_prime_chain(30, two_n, 5);
  p.special_basis.moduli = {big[0], big[1], big[2]};
  p.special_basis.roles.assign(3, LimbRole::Special);
  p.ciphertext_basis.moduli = {big[3], mid[0], mid[1], mid[2], mid[3], mid[4]};
  p.ciphertext_basis.roles.assign(6, LimbRole::Ciphertext);
  return p;
}

CkksParams CkksParams::bench_default() {
  CkksParams p;
  p.n_poly = size_t{1} << 16;
  p.levels = 35;
  p.dnum = 3;
  p.alpha = 12;
  p.scale = static_cast<double>(1ULL << 30);
  uint64_t two_n = 2 * p.n_poly;
  auto big = ntt_prime_chain(36, two_n, 13);
  auto mid = ntt_prime_chain(30, two_n, 35);
  p.special_basis.moduli.assign(big.begin(), big.begin() + 12);
  p.special_basis.roles.assign(12, LimbRole::Special);
  p.ciphertext_basis.moduli.push_back(big[12]);
  for (const auto& m : mid) p.ciphertext_basis.moduli.push_back(m);
  p.ciphertext_basis.roles.assign(36, LimbRole::Ciphertext);
  return p;
}

uint64_t CkksParams::params_hash() const {
  uint64_t h = fnv1a64_u64(n_poly);
  h = fnv1a64_u64(static_cast<uint64_t>(levels), h);
  h = fnv1a64_u64(static_cast<uint64_t>(dnum), h);
  h = fnv1a64_u64(static_cast<uint64_t>(alpha), h);
  h = fnv1a64_u64(static_cast<uint64_t>(scale), h);
  for (const auto& m : ciphertext_basis.moduli) h = fnv1a64_u64(m.value, h);
  for (const auto& m : special_basis.moduli) h = fnv1a64_u64(m.value, h);
  return h;
}

CkksContext::CkksContext(CkksParams params) : params_(std::move(params)) {
  int L = params_.levels;
  if (params_.alpha != (L + 1 + params_.dnum - 1) / params_.dnum)
    raise(Errc::InvalidArgument, "alpha must be ceil((L+1)/dnum)");
  if (params_.special_basis.moduli.size() != static_cast<size_t>(params_.alpha))
    raise(Errc::InvalidArgument, "special basis must hold alpha primes");
  if (params_.ciphertext_basis.moduli.size() != static_cast<size_t>(L + 1))
    raise(Errc::InvalidArgument, "ciphertext basis must hold L+1 primes");
  for (const auto& m : params_.ciphertext_basis.moduli) ext_.push_back(m);
  for (const auto& m : params_.special_basis.moduli) ext_.push_back(m);
  tables_.reserve(ext_.size());
  for (const auto& m : ext_) {
    if (m.two_n % (2 * params_.n_poly) != 0)
      raise(Errc::InvalidArgument, "modulus not NTT-friendly for this ring");
    tables_.push_back(NttTables::negacyclic_tables(m, params_.n_poly));
  }
}

size_t CkksContext::ext_index_of(const Modulus& m) const {
  for (size_t i = 0; i < ext_.size(); i++)
    if (ext_[i].value == m.value) return i;
  raise(Errc::BasisMismatch, "modulus not part of this context");
}

// ---- encoding --------------------------------------------------------------

Plaintext CkksContext::encode(std::span<const std::complex<double>> values, double scale,
                              int level) const {
  size_t n = params_.n_poly;
  size_t slots = n / 2;
  if (values.size() > slots) raise(Errc::SlotOverflow, "more values than slots");
  if (level < 0 || level > params_.levels) raise(Errc::LevelMismatch, "no such level");
  const auto& t0 = tables_[0];

  // scatter v_j to the evaluation position of exponent 5^j, conjugate to -5^j
  std::vector<std::complex<double>> eval(n, 0.0);
  uint64_t two_n = 2 * n;
  uint64_t e = 1;
  for (size_t j = 0; j < slots; j++) {
    std::complex<double> v = j < values.size() ? values[j] : 0.0;
    eval[t0.pos_of_exp[e]] = v;
    eval[t0.pos_of_exp[two_n - e]] = std::conj(v);
    e = (e * 5) % two_n;
  }
  cg_complex_inverse(eval);
  // untwist by zeta^(-i); coefficients of the real ring element
  Plaintext pt;
  pt.level = level;
  pt.scale = scale;
  pt.poly.reserve(level + 1);
  std::vector<int64_t> rounded(n);
  for (size_t i = 0; i < n; i++) {
    auto c = eval[i] * std::polar(1.0, -kPi * static_cast<double>(i) / static_cast<double>(n));
    rounded[i] = llround(c.real() * scale);
  }
  for (int k = 0; k <= level; k++) {
    RingPolynomial limb(n, ext_[k], Rep::Coefficient);
    for (size_t i = 0; i < n; i++) limb.coeffs[i] = to_residue(rounded[i], ext_[k]);
    pt.poly.push_back(std::move(limb));
  }
  return pt;
}

std::vector<std::complex<double>> CkksContext::decode(const RnsPolynomial& poly,
                                                      double scale) const {
  size_t n = params_.n_poly;
  if (poly.empty() || poly[0].n() != n) raise(Errc::ShapeError, "bad plaintext shape");
  RnsBasis basis;
  for (const auto& limb : poly) {
    if (limb.rep != Rep::Coefficient) raise(Errc::RepError, "decode expects coefficients");
    basis.moduli.push_back(limb.mod);
    basis.roles.push_back(LimbRole::Ciphertext);
  }
  std::vector<uint64_t> residues(poly.size());
  std::vector<std::complex<double>> buf(n);
  for (size_t i = 0; i < n; i++) {
    for (size_t k = 0; k < poly.size(); k++) residues[k] = poly[k].coeffs[i];
    double c = crt_reconstruct_centered(residues, basis).get_d() / scale;
    // twist by zeta^i going in
    buf[i] = c * std::polar(1.0, kPi * static_cast<double>(i) / static_cast<double>(n));
  }
  cg_complex_forward(buf);
  const auto& t0 = tables_[0];
  size_t slots = n / 2;
  std::vector<std::complex<double>> out(slots);
  uint64_t two_n = 2 * n, e = 1;
  for (size_t j = 0; j < slots; j++) {
    out[j] = buf[t0.pos_of_exp[e]];
    e = (e * 5) % two_n;
  }
  return out;
}

// ---- keys ------------------------------------------------------------------

namespace {

// One integer vector reduced onto a set of limbs, then transformed.
RnsPolynomial spread_ints(const std::vector<int64_t>& v, std::span<const Modulus> mods,
                          std::span<const NttTables> tabs) {
  RnsPolynomial out;
  out.reserve(mods.size());
  for (size_t k = 0; k < mods.size(); k++) {
    RingPolynomial limb(v.size(), mods[k], Rep::Coefficient);
    for (size_t i = 0; i < v.size(); i++) limb.coeffs[i] = to_residue(v[i], mods[k]);
    out.push_back(ntt_forward(limb, tabs[k]));
  }
  return out;
}

}  // namespace

CkksKeys CkksContext::keygen(uint64_t seed, std::span<const int64_t> rotation_steps) const {
  Rng root(seed);
  size_t n = params_.n_poly;
  CkksKeys keys;

  Rng skr = root.fork(1);
  std::vector<int64_t> s_int(n);
  for (auto& c : s_int) c = skr.ternary();
  keys.sk.s = spread_ints(s_int, ext_, tables_);

  // public key over the full ciphertext basis
  Rng pkr = root.fork(2);
  int L = params_.levels;
  std::vector<int64_t> e_int(n);
  for (auto& c : e_int) c = pkr.gaussian_int(params_.sigma);
  keys.pk.a.reserve(L + 1);
  for (int k = 0; k <= L; k++) {
    RingPolynomial a(n, ext_[k], Rep::Evaluation);
    for (auto& c : a.coeffs) c = pkr.uniform(ext_[k].value);
    keys.pk.a.push_back(std::move(a));
  }
  RnsPolynomial e_pk = spread_ints(e_int, std::span(ext_.data(), L + 1),
                                   std::span(tables_.data(), L + 1));
  keys.pk.b.reserve(L + 1);
  for (int k = 0; k <= L; k++)
    keys.pk.b.push_back(poly_sub(e_pk[k], poly_mul_pointwise(keys.pk.a[k], keys.sk.s[k])));

  Rng evkr = root.fork(3);
  RnsPolynomial s_sq;
  s_sq.reserve(ext_.size());
  for (size_t k = 0; k < ext_.size(); k++)
    s_sq.push_back(poly_mul_pointwise(keys.sk.s[k], keys.sk.s[k]));
  keys.relin = make_keyswitch_key(s_sq, keys.sk, evkr);

  size_t slots = n / 2;
  for (int64_t r : rotation_steps) {
    int64_t norm = ((r % static_cast<int64_t>(slots)) + static_cast<int64_t>(slots)) %
                   static_cast<int64_t>(slots);
    if (norm == 0 || keys.rotation.count(norm)) continue;
    Rng rkr = root.fork(1000 + static_cast<uint64_t>(norm));
    uint64_t elem = galois_element_of_step(norm, n);
    RnsPolynomial s_rot;
    s_rot.reserve(ext_.size());
    for (size_t k = 0; k < ext_.size(); k++)
      s_rot.push_back(galois_transform(keys.sk.s[k], elem, tables_[k]));
    keys.rotation.emplace(norm, make_keyswitch_key(s_rot, keys.sk, rkr));
  }
  return keys;
}

EvaluationKey CkksContext::make_keyswitch_key(const RnsPolynomial& s_src, const SecretKey& sk,
                                              Rng& rng) const {
  if (s_src.size() != ext_.size()) raise(Errc::BasisMismatch, "source key must span all limbs");
  size_t n = params_.n_poly;
  int L = params_.levels;
  int alpha = params_.alpha;

  // P mod q_k for the digit payload
  mpz_class P = params_.special_basis.product();
  std::vector<uint64_t> p_mod(L + 1);
  for (int k = 0; k <= L; k++) p_mod[k] = mpz_mod_u64(P, ext_[k].value);

  EvaluationKey evk;
  evk.rows.resize(params_.dnum);
  for (int i = 0; i < params_.dnum; i++) {
    std::vector<int64_t> e_int(n);
    for (auto& c : e_int) c = rng.gaussian_int(params_.sigma);
    RnsPolynomial e_row = spread_ints(e_int, ext_, tables_);
    RnsPolynomial a_row, b_row;
    a_row.reserve(ext_.size());
    b_row.reserve(ext_.size());
    for (size_t k = 0; k < ext_.size(); k++) {
      RingPolynomial a(n, ext_[k], Rep::Evaluation);
      for (auto& c : a.coeffs) c = rng.uniform(ext_[k].value);
      RingPolynomial b = poly_sub(e_row[k], poly_mul_pointwise(a, sk.s[k]));
      // P*T_i is P mod q_k on the digit's own limbs, zero elsewhere
      int lo = i * alpha, hi = std::min((i + 1) * alpha, L + 1);
      if (static_cast<int>(k) >= lo && static_cast<int>(k) < hi)
        b = poly_add(b, poly_mul_scalar(s_src[k], p_mod[k]));
      a_row.push_back(std::move(a));
      b_row.push_back(std::move(b));
    }
    evk.rows[i] = {std::move(b_row), std::move(a_row)};
  }
  return evk;
}

EvaluationKey CkksContext::make_galois_key(const SecretKey& sk, uint64_t galois_elem,
                                           Rng& rng) const {
  RnsPolynomial s_rot;
  s_rot.reserve(ext_.size());
  for (size_t k = 0; k < ext_.size(); k++)
    s_rot.push_back(galois_transform(sk.s[k], galois_elem, tables_[k]));
  return make_keyswitch_key(s_rot, sk, rng);
}

// ---- encryption ------------------------------------------------------------

RlweCiphertext CkksContext::encrypt(const Plaintext& pt, const SecretKey& sk, Rng& rng,
                                    bool zero_noise, bool zero_mask) const {
  size_t n = params_.n_poly;
  int l = pt.level;
  RlweCiphertext ct;
  ct.level = l;
  ct.scale = pt.scale;
  std::vector<int64_t> e_int(n, 0);
  if (!zero_noise)
    for (auto& c : e_int) c = rng.gaussian_int(params_.sigma);
  for (int k = 0; k <= l; k++) {
    RingPolynomial a(n, ext_[k], Rep::Evaluation);
    if (!zero_mask)
      for (auto& c : a.coeffs) c = rng.uniform(ext_[k].value);
    RingPolynomial me(n, ext_[k], Rep::Coefficient);
    for (size_t i = 0; i < n; i++)
      me.coeffs[i] = mod_add(pt.poly[k].coeffs[i], to_residue(e_int[i], ext_[k]), ext_[k]);
    RingPolynomial b = poly_sub(ntt_forward(me, tables_[k]), poly_mul_pointwise(a, sk.s[k]));
    ct.a.push_back(std::move(a));
    ct.b.push_back(std::move(b));
  }
  return ct;
}

RlweCiphertext CkksContext::encrypt_pk(const Plaintext& pt, const PublicKey& pk, Rng& rng) const {
  size_t n = params_.n_poly;
  int l = pt.level;
  std::vector<int64_t> v_int(n), e0_int(n), e1_int(n);
  for (auto& c : v_int) c = rng.ternary();
  for (auto& c : e0_int) c = rng.gaussian_int(params_.sigma);
  for (auto& c : e1_int) c = rng.gaussian_int(params_.sigma);
  RlweCiphertext ct;
  ct.level = l;
  ct.scale = pt.scale;
  for (int k = 0; k <= l; k++) {
    const auto& tab = tables_[k];
    RingPolynomial v(n, ext_[k], Rep::Coefficient);
    for (size_t i = 0; i < n; i++) v.coeffs[i] = to_residue(v_int[i], ext_[k]);
    v = ntt_forward(v, tab);
    RingPolynomial m0(n, ext_[k], Rep::Coefficient);
    for (size_t i = 0; i < n; i++)
      m0.coeffs[i] =
          mod_add(pt.poly[k].coeffs[i], to_residue(e0_int[i], ext_[k]), ext_[k]);
    RingPolynomial e1(n, ext_[k], Rep::Coefficient);
    for (size_t i = 0; i < n; i++) e1.coeffs[i] = to_residue(e1_int[i], ext_[k]);
    ct.b.push_back(poly_add(poly_mul_pointwise(v, pk.b[k]), ntt_forward(m0, tab)));
    ct.a.push_back(poly_add(poly_mul_pointwise(v, pk.a[k]), ntt_forward(e1, tab)));
  }
  return ct;
}

RnsPolynomial CkksContext::decrypt(const RlweCiphertext& ct, const SecretKey& sk) const {
  RnsPolynomial out;
  out.reserve(ct.b.size());
  for (size_t k = 0; k < ct.b.size(); k++) {
    RingPolynomial m = poly_add(ct.b[k], poly_mul_pointwise(ct.a[k], sk.s[k]));
    out.push_back(ntt_inverse(m, tables_[k]));
  }
  return out;
}

std::vector<std::complex<double>> CkksContext::decrypt_decode(const RlweCiphertext& ct,
                                                              const SecretKey& sk) const {
  return decode(decrypt(ct, sk), ct.scale);
}

// ---- kernels ---------------------------------------------------------------

std::vector<RingPolynomial> CkksContext::bconv(const std::vector<RingPolynomial>& src,
                                               std::span<const Modulus> targets) const {
  if (src.empty()) raise(Errc::BasisMismatch, "empty source basis");
  size_t n = src[0].n();
  size_t alpha = src.size();
  for (const auto& limb : src)
    if (limb.rep != Rep::Coefficient) raise(Errc::RepError, "bconv expects coefficient rep");

  mpz_class C = 1;
  for (const auto& limb : src) C *= mpz_of(limb.mod.value);
  std::vector<uint64_t> inv(alpha);
  std::vector<double> cinv(alpha);
  std::vector<std::vector<uint64_t>> f(alpha, std::vector<uint64_t>(targets.size()));
  for (size_t i = 0; i < alpha; i++) {
    const Modulus& ci = src[i].mod;
    mpz_class chat = C / mpz_of(ci.value);
    inv[i] = mod_inv(mpz_mod_u64(chat, ci.value), ci);
    cinv[i] = 1.0 / static_cast<double>(ci.value);
    for (size_t j = 0; j < targets.size(); j++) f[i][j] = mpz_mod_u64(chat, targets[j].value);
  }
  // overshoot corrections k*C mod d_j for k = 0..alpha
  std::vector<std::vector<uint64_t>> kc(alpha + 1, std::vector<uint64_t>(targets.size()));
  for (size_t j = 0; j < targets.size(); j++) {
    uint64_t cmod = mpz_mod_u64(C, targets[j].value);
    for (size_t k = 1; k <= alpha; k++) kc[k][j] = mod_mul(k, cmod, targets[j]);
  }

  std::vector<RingPolynomial> out;
  out.reserve(targets.size());
  for (size_t j = 0; j < targets.size(); j++)
    out.emplace_back(n, targets[j], Rep::Coefficient);

  std::vector<uint64_t> y(alpha);
  for (size_t idx = 0; idx < n; idx++) {
    double frac = 0;
    for (size_t i = 0; i < alpha; i++) {
      y[i] = mod_mul(src[i].coeffs[idx], inv[i], src[i].mod);
      frac += static_cast<double>(y[i]) * cinv[i];
    }
    auto k = static_cast<size_t>(llround(frac));
    for (size_t j = 0; j < targets.size(); j++) {
      const Modulus& dj = targets[j];
      uint64_t acc = 0;
      for (size_t i = 0; i < alpha; i++) acc = mod_add(acc, mod_mul(y[i], f[i][j], dj), dj);
      out[j].coeffs[idx] = mod_sub(acc, kc[k][j], dj);
    }
  }
  counts_.bconv += 1;
  return out;
}

std::pair<RnsPolynomial, RnsPolynomial> CkksContext::hybrid_keyswitch(
    const RnsPolynomial& d, const EvaluationKey& evk) const {
  if (evk.rows.size() != static_cast<size_t>(params_.dnum))
    raise(Errc::BasisMismatch, "evaluation key has wrong row count");
  int l = static_cast<int>(d.size()) - 1;
  if (l < 0 || l > params_.levels) raise(Errc::LevelMismatch, "bad limb count");
  for (const auto& limb : d)
    if (limb.rep != Rep::Coefficient) raise(Errc::RepError, "keyswitch expects coefficient rep");
  size_t n = params_.n_poly;
  int L = params_.levels;
  int alpha = params_.alpha;
  int beta = beta_at(l);

  // active extended-basis indices: q_0..q_l then the special primes
  std::vector<size_t> active;
  for (int k = 0; k <= l; k++) active.push_back(k);
  for (int j = 0; j < alpha; j++) active.push_back(L + 1 + j);
  size_t E = active.size();

  RnsPolynomial acc_b, acc_a;
  for (size_t pos = 0; pos < E; pos++) {
    acc_b.emplace_back(n, ext_[active[pos]], Rep::Evaluation);
    acc_a.emplace_back(n, ext_[active[pos]], Rep::Evaluation);
  }

  for (int i = 0; i < beta; i++) {
    int lo = i * alpha, hi = std::min((i + 1) * alpha, l + 1);
    std::vector<RingPolynomial> digit_src(d.begin() + lo, d.begin() + hi);
    std::vector<Modulus> target_mods;
    std::vector<size_t> target_pos;
    for (size_t pos = 0; pos < E; pos++) {
      int k = static_cast<int>(active[pos]);
      if (k >= lo && k < hi) continue;
      target_mods.push_back(ext_[active[pos]]);
      target_pos.push_back(pos);
    }
    auto converted = bconv(digit_src, target_mods);

    // assemble the digit over the extended basis and transform every limb
    RnsPolynomial digit(E);
    for (int k = lo; k < hi; k++) digit[k] = d[k];
    for (size_t j = 0; j < target_pos.size(); j++) digit[target_pos[j]] = std::move(converted[j]);
    for (size_t pos = 0; pos < E; pos++) {
      digit[pos] = ntt_forward(digit[pos], tables_[active[pos]]);
      counts_.ntt += 1;
    }

    for (size_t pos = 0; pos < E; pos++) {
      const auto& row_b = evk.rows[i][0][active[pos]];
      const auto& row_a = evk.rows[i][1][active[pos]];
      acc_b[pos] = poly_add(acc_b[pos], poly_mul_pointwise(digit[pos], row_b));
      acc_a[pos] = poly_add(acc_a[pos], poly_mul_pointwise(digit[pos], row_a));
    }
    counts_.ip += 2;
  }

  for (size_t pos = 0; pos < E; pos++) {
    acc_b[pos] = ntt_inverse(acc_b[pos], tables_[active[pos]]);
    acc_a[pos] = ntt_inverse(acc_a[pos], tables_[active[pos]]);
    counts_.intt += 2;
  }

  // ModDown: subtract the special-basis part and divide by P
  mpz_class P = params_.special_basis.product();
  auto mod_down = [&](RnsPolynomial& comp) {
    std::vector<RingPolynomial> spec(comp.begin() + (l + 1), comp.end());
    std::vector<Modulus> qmods(ext_.begin(), ext_.begin() + (l + 1));
    auto down = bconv(spec, qmods);
    RnsPolynomial out;
    out.reserve(l + 1);
    for (int k = 0; k <= l; k++) {
      uint64_t pinv = mod_inv(mpz_mod_u64(P, ext_[k].value), ext_[k]);
      RingPolynomial limb = poly_sub(comp[k], down[k]);
      limb = poly_mul_scalar(limb, pinv);
      counts_.modadd += 1;
      counts_.modmul += 1;
      out.push_back(ntt_forward(limb, tables_[k]));
      counts_.ntt += 1;
    }
    comp = std::move(out);
  };
  mod_down(acc_b);
  mod_down(acc_a);
  return {std::move(acc_b), std::move(acc_a)};
}

// ---- homomorphic operations -------------------------------------------------

namespace {

void check_match(const RlweCiphertext& c1, const RlweCiphertext& c2) {
  if (c1.level != c2.level) raise(Errc::LevelMismatch, "operand levels differ");
  if (c1.scale != c2.scale) raise(Errc::ScaleMismatch, "operand scales differ");
}

void check_pt(const RlweCiphertext& ct, const Plaintext& pt, bool same_scale) {
  if (ct.level != pt.level) raise(Errc::LevelMismatch, "plaintext level differs");
  if (same_scale && ct.scale != pt.scale) raise(Errc::ScaleMismatch, "plaintext scale differs");
}

}  // namespace

RlweCiphertext CkksContext::hadd(const RlweCiphertext& c1, const RlweCiphertext& c2) const {
  check_match(c1, c2);
  RlweCiphertext out;
  out.level = c1.level;
  out.scale = c1.scale;
  for (size_t k = 0; k < c1.a.size(); k++) {
    out.a.push_back(poly_add(c1.a[k], c2.a[k]));
    out.b.push_back(poly_add(c1.b[k], c2.b[k]));
    counts_.modadd += 2;
  }
  return out;
}

RlweCiphertext CkksContext::hsub(const RlweCiphertext& c1, const RlweCiphertext& c2) const {
  check_match(c1, c2);
  RlweCiphertext out;
  out.level = c1.level;
  out.scale = c1.scale;
  for (size_t k = 0; k < c1.a.size(); k++) {
    out.a.push_back(poly_sub(c1.a[k], c2.a[k]));
    out.b.push_back(poly_sub(c1.b[k], c2.b[k]));
    counts_.modadd += 2;
  }
  return out;
}

RlweCiphertext CkksContext::padd(const RlweCiphertext& ct, const Plaintext& pt) const {
  check_pt(ct, pt, true);
  RlweCiphertext out = ct;
  for (int k = 0; k <= ct.level; k++) {
    RingPolynomial pe = ntt_forward(pt.poly[k], tables_[k]);
    counts_.ntt += 1;
    out.b[k] = poly_add(out.b[k], pe);
    counts_.modadd += 1;
  }
  return out;
}

RlweCiphertext CkksContext::pmult(const RlweCiphertext& ct, const Plaintext& pt) const {
  check_pt(ct, pt, false);
  RlweCiphertext out;
  out.level = ct.level;
  out.scale = ct.scale * pt.scale;
  for (int k = 0; k <= ct.level; k++) {
    RingPolynomial pe = ntt_forward(pt.poly[k], tables_[k]);
    counts_.ntt += 1;
    out.a.push_back(poly_mul_pointwise(ct.a[k], pe));
    out.b.push_back(poly_mul_pointwise(ct.b[k], pe));
    counts_.modmul += 2;
  }
  return out;
}

RlweCiphertext CkksContext::hmult(const RlweCiphertext& c1, const RlweCiphertext& c2,
                                  const EvaluationKey& relin) const {
  check_match(c1, c2);
  int l = c1.level;
  RnsPolynomial d0, d1, d2;
  for (int k = 0; k <= l; k++) {
    d0.push_back(poly_mul_pointwise(c1.b[k], c2.b[k]));
    d1.push_back(poly_add(poly_mul_pointwise(c1.a[k], c2.b[k]),
                          poly_mul_pointwise(c2.a[k], c1.b[k])));
    d2.push_back(poly_mul_pointwise(c1.a[k], c2.a[k]));
    counts_.modmul += 4;
    counts_.modadd += 1;
  }
  for (int k = 0; k <= l; k++) {
    d2[k] = ntt_inverse(d2[k], tables_[k]);
    counts_.intt += 1;
  }
  auto [ks_b, ks_a] = hybrid_keyswitch(d2, relin);
  RlweCiphertext out;
  out.level = l;
  out.scale = c1.scale * c2.scale;
  for (int k = 0; k <= l; k++) {
    out.b.push_back(poly_add(d0[k], ks_b[k]));
    out.a.push_back(poly_add(d1[k], ks_a[k]));
    counts_.modadd += 2;
  }
  return out;
}

RlweCiphertext CkksContext::hrotate(const RlweCiphertext& ct, int64_t r,
                                    const CkksKeys& keys) const {
  size_t slots = params_.slot_count();
  int64_t norm = ((r % static_cast<int64_t>(slots)) + static_cast<int64_t>(slots)) %
                 static_cast<int64_t>(slots);
  if (norm == 0) return ct;
  auto it = keys.rotation.find(norm);
  if (it == keys.rotation.end()) raise(Errc::KeyNotFound, "no rotation key for this step");
  return apply_galois(ct, galois_element_of_step(norm, params_.n_poly), it->second);
}

RlweCiphertext CkksContext::apply_galois(const RlweCiphertext& ct, uint64_t elem,
                                         const EvaluationKey& key) const {
  int l = ct.level;
  RnsPolynomial a_rot, b_rot;
  for (int k = 0; k <= l; k++) {
    a_rot.push_back(galois_transform(ct.a[k], elem, tables_[k]));
    b_rot.push_back(galois_transform(ct.b[k], elem, tables_[k]));
    counts_.auto_perm += 2;
  }
  for (int k = 0; k <= l; k++) {
    a_rot[k] = ntt_inverse(a_rot[k], tables_[k]);
    counts_.intt += 1;
  }
  auto [ks_b, ks_a] = hybrid_keyswitch(a_rot, key);
  RlweCiphertext out;
  out.level = l;
  out.scale = ct.scale;
  for (int k = 0; k <= l; k++) {
    out.b.push_back(poly_add(b_rot[k], ks_b[k]));
    counts_.modadd += 1;
    out.a.push_back(std::move(ks_a[k]));
  }
  return out;
}

RlweCiphertext CkksContext::rotate_monomial(const RlweCiphertext& ct, uint64_t power) const {
  uint64_t two_n = 2 * params_.n_poly;
  power %= two_n;
  RlweCiphertext out;
  out.level = ct.level;
  out.scale = ct.scale;
  for (int k = 0; k <= ct.level; k++) {
    const NttTables& t = tables_[k];
    RingPolynomial mono(params_.n_poly, ext_[k], Rep::Evaluation);
    for (size_t p = 0; p < params_.n_poly; p++)
      mono.coeffs[p] = mod_pow(t.psi, t.exp_map[p] * power % two_n, ext_[k]);
    out.b.push_back(poly_mul_pointwise(ct.b[k], mono));
    out.a.push_back(poly_mul_pointwise(ct.a[k], mono));
    counts_.modmul += 2;
  }
  return out;
}

RlweCiphertext CkksContext::rescale(const RlweCiphertext& ct) const {
  int l = ct.level;
  if (l < 1) raise(Errc::NoLevelsLeft, "cannot rescale at level 0");
  const Modulus& ql = ext_[l];
  RlweCiphertext out;
  out.level = l - 1;
  out.scale = ct.scale / static_cast<double>(ql.value);
  size_t n = params_.n_poly;
  auto drop = [&](const RnsPolynomial& comp) {
    RingPolynomial top = ntt_inverse(comp[l], tables_[l]);
    counts_.intt += 1;
    RnsPolynomial res;
    for (int k = 0; k < l; k++) {
      const Modulus& qk = ext_[k];
      RingPolynomial t(n, qk, Rep::Coefficient);
      for (size_t i = 0; i < n; i++)
        t.coeffs[i] = to_residue(from_residue(top.coeffs[i], ql), qk);
      t = ntt_forward(t, tables_[k]);
      counts_.ntt += 1;
      uint64_t qinv = mod_inv(ql.value % qk.value, qk);
      RingPolynomial limb = poly_mul_scalar(poly_sub(comp[k], t), qinv);
      counts_.modadd += 1;
      counts_.modmul += 1;
      res.push_back(std::move(limb));
    }
    return res;
  };
  out.b = drop(ct.b);
  out.a = drop(ct.a);
  return out;
}

}  // namespace trinity::ckks
