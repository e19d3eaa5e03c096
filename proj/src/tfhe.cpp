#include "trinity/tfhe.hpp"

#include <algorithm>

namespace trinity::tfhe {

namespace {

using u128 = unsigned __int128;

// frozen largest primes p = 1 mod 2N at or below the nominal q = 2^32 / 2^20
constexpr uint64_t kPrimeBelow32N1024 = 4294957057ULL;  // 2^32 - 10239
constexpr uint64_t kPrimeBelow32N2048 = 4294955009ULL;  // 2^32 - 12287
constexpr uint64_t kPrimeBelow20N64 = 1048193ULL;       // 2^20 - 383

TfheParams base_set(size_t n_poly, size_t n_lwe, int l_b, uint64_t prime) {
  TfheParams p;
  p.n_poly = n_poly;
  p.n_lwe = n_lwe;
  p.glwe_dim = 1;
  p.modulus = make_modulus(prime, 2 * n_poly);
  p.l_b = l_b;
  p.log_base_b = 10;
  p.l_k = 2;
  p.log_base_k = 10;
  p.plaintext_bits = 1;
  p.sigma_lwe = 131072.0;  // ~2^17
  p.sigma_glwe = 3.2;
  p.sigma_ksk = 128.0;
  return p;
}

}  // namespace

TfheParams TfheParams::set_i() { return base_set(1024, 500, 2, kPrimeBelow32N1024); }
TfheParams TfheParams::set_ii() { return base_set(1024, 630, 3, kPrimeBelow32N1024); }
TfheParams TfheParams::set_iii() { return base_set(2048, 592, 3, kPrimeBelow32N2048); }

TfheParams TfheParams::toy_set() {
  TfheParams p = base_set(64, 4, 2, kPrimeBelow20N64);
  p.plaintext_bits = 2;
  p.sigma_lwe = 2.0;
  p.sigma_glwe = 1.0;
  p.sigma_ksk = 1.0;
  return p;
}

uint64_t TfheParams::params_hash() const {
  uint64_t h = fnv1a64_u64(n_poly);
  h = fnv1a64_u64(n_lwe, h);
  h = fnv1a64_u64(static_cast<uint64_t>(glwe_dim), h);
  h = fnv1a64_u64(modulus.value, h);
  h = fnv1a64_u64(static_cast<uint64_t>(l_b), h);
  h = fnv1a64_u64(static_cast<uint64_t>(log_base_b), h);
  h = fnv1a64_u64(static_cast<uint64_t>(l_k), h);
  h = fnv1a64_u64(static_cast<uint64_t>(log_base_k), h);
  h = fnv1a64_u64(static_cast<uint64_t>(plaintext_bits), h);
  return h;
}

TfheContext::TfheContext(TfheParams params)
    : params_(std::move(params)),
      tables_(NttTables::negacyclic_tables(params_.modulus, params_.n_poly)) {
  if (params_.glwe_dim < 1 || params_.l_b < 1 || params_.l_k < 1)
    raise(Errc::InvalidArgument, "gadget and GLWE dimensions must be positive");
  if (params_.plaintext_bits < 1 ||
      params_.space() * 2 > params_.n_poly)
    raise(Errc::InvalidArgument, "plaintext space too large for the ring");
  if (static_cast<unsigned>(params_.l_b * params_.log_base_b) > params_.modulus.bits ||
      static_cast<unsigned>(params_.l_k * params_.log_base_k) > params_.modulus.bits)
    raise(Errc::DecompositionOverflow, "gadget exceeds modulus width");
}

uint64_t TfheContext::encode(uint64_t m) const {
  uint64_t two_t = 2 * params_.space();
  if (m >= two_t) raise(Errc::InvalidArgument, "message outside the padded space");
  u128 num = static_cast<u128>(m) * params_.modulus.value + params_.space();
  return static_cast<uint64_t>(num / two_t);
}

uint64_t TfheContext::decode(uint64_t phase) const {
  uint64_t two_t = 2 * params_.space();
  u128 num = static_cast<u128>(phase) * 2 * two_t + params_.modulus.value;
  return static_cast<uint64_t>(num / (2 * params_.modulus.value)) % two_t;
}

LweSecretKey TfheContext::lwe_keygen(Rng& rng) const {
  LweSecretKey sk;
  sk.bits.resize(params_.n_lwe);
  for (auto& b : sk.bits) b = static_cast<uint8_t>(rng.uniform(2));
  return sk;
}

GlweSecretKey TfheContext::glwe_keygen(Rng& rng) const {
  GlweSecretKey sk;
  for (int c = 0; c < params_.glwe_dim; c++) {
    RingPolynomial s(params_.n_poly, params_.modulus, Rep::Coefficient);
    for (auto& v : s.coeffs) v = rng.uniform(2);
    sk.s.push_back(ntt_forward(s, tables_));
  }
  return sk;
}

LweSecretKey TfheContext::extraction_key(const GlweSecretKey& sk) const {
  LweSecretKey out;
  out.bits.reserve(sk.s.size() * params_.n_poly);
  for (const auto& s_eval : sk.s) {
    RingPolynomial s = ntt_inverse(s_eval, tables_);
    for (uint64_t v : s.coeffs) out.bits.push_back(static_cast<uint8_t>(v));
  }
  return out;
}

namespace {

LweCiphertext encrypt_with_sigma(uint64_t value, const LweSecretKey& sk, Rng& rng, double sigma,
                                 const Modulus& mod, bool zero_noise, bool zero_mask) {
  LweCiphertext c;
  c.mod = mod;
  c.a.assign(sk.bits.size(), 0);
  uint64_t acc = value;
  if (!zero_noise) acc = mod_add(acc, to_residue(rng.gaussian_int(sigma), mod), mod);
  if (!zero_mask) {
    for (size_t i = 0; i < c.a.size(); i++) {
      c.a[i] = rng.uniform(mod.value);
      if (sk.bits[i]) acc = mod_add(acc, c.a[i], mod);
    }
  }
  c.b = acc;
  return c;
}

}  // namespace

LweCiphertext TfheContext::lwe_encrypt_phase(uint64_t value, const LweSecretKey& sk, Rng& rng,
                                             bool zero_noise, bool zero_mask) const {
  return encrypt_with_sigma(value, sk, rng, params_.sigma_lwe, params_.modulus, zero_noise,
                            zero_mask);
}

LweCiphertext TfheContext::lwe_encrypt(uint64_t m, const LweSecretKey& sk, Rng& rng,
                                       bool zero_noise, bool zero_mask) const {
  return lwe_encrypt_phase(encode(m), sk, rng, zero_noise, zero_mask);
}

uint64_t TfheContext::lwe_phase(const LweCiphertext& c, const LweSecretKey& sk) const {
  if (c.dim() != sk.bits.size()) raise(Errc::DimensionMismatch, "key does not fit ciphertext");
  uint64_t acc = 0;
  for (size_t i = 0; i < c.a.size(); i++)
    if (sk.bits[i]) acc = mod_add(acc, c.a[i], c.mod);
  return mod_sub(c.b, acc, c.mod);
}

uint64_t TfheContext::lwe_decrypt(const LweCiphertext& c, const LweSecretKey& sk) const {
  return decode(lwe_phase(c, sk));
}

LweCiphertext TfheContext::lwe_trivial(uint64_t phase_value) const {
  LweCiphertext c;
  c.mod = params_.modulus;
  c.a.assign(params_.n_lwe, 0);
  c.b = phase_value;
  return c;
}

LweCiphertext TfheContext::lwe_add(const LweCiphertext& c1, const LweCiphertext& c2) const {
  if (c1.dim() != c2.dim()) raise(Errc::DimensionMismatch, "operand dimensions differ");
  LweCiphertext out = c1;
  for (size_t i = 0; i < out.a.size(); i++) out.a[i] = mod_add(out.a[i], c2.a[i], out.mod);
  out.b = mod_add(out.b, c2.b, out.mod);
  return out;
}

LweCiphertext TfheContext::lwe_sub(const LweCiphertext& c1, const LweCiphertext& c2) const {
  if (c1.dim() != c2.dim()) raise(Errc::DimensionMismatch, "operand dimensions differ");
  LweCiphertext out = c1;
  for (size_t i = 0; i < out.a.size(); i++) out.a[i] = mod_sub(out.a[i], c2.a[i], out.mod);
  out.b = mod_sub(out.b, c2.b, out.mod);
  return out;
}

GlweCiphertext TfheContext::glwe_encrypt(const RingPolynomial& msg, const GlweSecretKey& sk,
                                         Rng& rng, bool zero_noise, bool zero_mask) const {
  if (msg.rep != Rep::Coefficient) raise(Errc::RepError, "message must be coefficient rep");
  size_t n = params_.n_poly;
  GlweCiphertext c;
  RingPolynomial acc(n, params_.modulus, Rep::Evaluation);
  for (int i = 0; i < params_.glwe_dim; i++) {
    RingPolynomial mask(n, params_.modulus, Rep::Coefficient);
    if (!zero_mask)
      for (auto& v : mask.coeffs) v = rng.uniform(params_.modulus.value);
    acc = poly_add(acc, poly_mul_pointwise(ntt_forward(mask, tables_), sk.s[i]));
    c.mask.push_back(std::move(mask));
  }
  RingPolynomial body = poly_add(ntt_inverse(acc, tables_), msg);
  if (!zero_noise) {
    for (auto& v : body.coeffs)
      v = mod_add(v, to_residue(rng.gaussian_int(params_.sigma_glwe), params_.modulus),
                  params_.modulus);
  }
  c.body = std::move(body);
  return c;
}

RingPolynomial TfheContext::glwe_decrypt(const GlweCiphertext& c, const GlweSecretKey& sk) const {
  RingPolynomial acc(params_.n_poly, params_.modulus, Rep::Evaluation);
  for (int i = 0; i < params_.glwe_dim; i++)
    acc = poly_add(acc, poly_mul_pointwise(ntt_forward(c.mask[i], tables_), sk.s[i]));
  return poly_sub(c.body, ntt_inverse(acc, tables_));
}

GgswCiphertext TfheContext::ggsw_encrypt(int bit, const GlweSecretKey& sk, Rng& rng,
                                         bool zero_noise, bool zero_mask) const {
  size_t n = params_.n_poly;
  int k = params_.glwe_dim;
  uint64_t scale = decompose_scale(params_.modulus, params_.l_b, params_.log_base_b);
  GgswCiphertext out;
  out.rows.reserve(static_cast<size_t>(k + 1) * params_.l_b);
  for (int c = 0; c <= k; c++) {
    for (int j = 0; j < params_.l_b; j++) {
      // zero encryption built directly in evaluation rep
      GlweCiphertext row;
      RingPolynomial acc(n, params_.modulus, Rep::Evaluation);
      for (int i = 0; i < k; i++) {
        RingPolynomial mask(n, params_.modulus, Rep::Evaluation);
        if (!zero_mask)
          for (auto& v : mask.coeffs) v = rng.uniform(params_.modulus.value);
        acc = poly_add(acc, poly_mul_pointwise(mask, sk.s[i]));
        row.mask.push_back(std::move(mask));
      }
      if (!zero_noise) {
        RingPolynomial e(n, params_.modulus, Rep::Coefficient);
        for (auto& v : e.coeffs)
          v = to_residue(rng.gaussian_int(params_.sigma_glwe), params_.modulus);
        acc = poly_add(acc, ntt_forward(e, tables_));
      }
      row.body = std::move(acc);
      if (bit) {
        // add bit * g_j (a constant polynomial: the same value at every
        // evaluation point) to component c
        uint64_t gj = scale << (static_cast<unsigned>(params_.l_b - 1 - j) *
                                static_cast<unsigned>(params_.log_base_b));
        gj %= params_.modulus.value;
        RingPolynomial& target = component(row, static_cast<size_t>(c));
        for (auto& v : target.coeffs) v = mod_add(v, gj, params_.modulus);
      }
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

BootstrapKeys TfheContext::make_bootstrap_keys(const LweSecretKey& lwe_sk,
                                               const GlweSecretKey& glwe_sk, Rng& rng,
                                               bool zero_noise, bool zero_mask) const {
  BootstrapKeys keys;
  keys.bsk.reserve(params_.n_lwe);
  for (size_t i = 0; i < params_.n_lwe; i++)
    keys.bsk.push_back(ggsw_encrypt(lwe_sk.bits[i], glwe_sk, rng, zero_noise, zero_mask));

  LweSecretKey ext = extraction_key(glwe_sk);
  uint64_t k_scale = decompose_scale(params_.modulus, params_.l_k, params_.log_base_k);
  keys.ksk.resize(ext.bits.size());
  for (size_t i = 0; i < ext.bits.size(); i++) {
    keys.ksk[i].reserve(params_.l_k);
    for (int j = 0; j < params_.l_k; j++) {
      uint64_t gj = k_scale << (static_cast<unsigned>(params_.l_k - 1 - j) *
                                static_cast<unsigned>(params_.log_base_k));
      gj %= params_.modulus.value;
      uint64_t value = ext.bits[i] ? gj : 0;
      keys.ksk[i].push_back(encrypt_with_sigma(value, lwe_sk, rng, params_.sigma_ksk,
                                               params_.modulus, zero_noise, zero_mask));
    }
  }
  return keys;
}

LweCiphertext TfheContext::mod_switch(const LweCiphertext& c) const {
  uint64_t two_n = 2 * params_.n_poly;
  uint64_t q = c.mod.value;
  auto sw = [&](uint64_t x) {
    u128 num = static_cast<u128>(x) * 2 * two_n + q;
    return static_cast<uint64_t>(num / (2 * static_cast<u128>(q))) % two_n;
  };
  LweCiphertext out;
  out.mod = Modulus(two_n, 0, 0);
  out.a.reserve(c.a.size());
  for (uint64_t x : c.a) out.a.push_back(sw(x));
  out.b = sw(c.b);
  return out;
}

GlweCiphertext TfheContext::external_product(const GlweCiphertext& glwe,
                                             const GgswCiphertext& ggsw) const {
  int k = params_.glwe_dim;
  size_t rows = static_cast<size_t>(k + 1) * params_.l_b;
  if (ggsw.rows.size() != rows) raise(Errc::ShapeError, "ggsw row count mismatch");
  if (glwe.body.rep != Rep::Coefficient)
    raise(Errc::RepError, "external product expects coefficient rep input");

  std::vector<RingPolynomial> acc;
  for (int col = 0; col <= k; col++)
    acc.emplace_back(params_.n_poly, params_.modulus, Rep::Evaluation);

  for (int c = 0; c <= k; c++) {
    auto digits = digit_decompose(component(glwe, static_cast<size_t>(c)),
                                  static_cast<unsigned>(params_.l_b),
                                  static_cast<unsigned>(params_.log_base_b));
    for (int j = 0; j < params_.l_b; j++) {
      RingPolynomial dig = ntt_forward(digits[j], tables_);
      counts_.ntt += 1;
      const GlweCiphertext& row = ggsw.rows[static_cast<size_t>(c) * params_.l_b + j];
      for (int col = 0; col <= k; col++) {
        acc[col] = poly_add(acc[col],
                            poly_mul_pointwise(dig, component(row, static_cast<size_t>(col))));
        counts_.ip += 1;
      }
    }
  }

  GlweCiphertext out;
  for (int col = 0; col < k; col++) {
    out.mask.push_back(ntt_inverse(acc[col], tables_));
    counts_.intt += 1;
  }
  out.body = ntt_inverse(acc[k], tables_);
  counts_.intt += 1;
  return out;
}

GlweCiphertext TfheContext::blind_rotate(const GlweCiphertext& tv, const LweCiphertext& switched,
                                         const std::vector<GgswCiphertext>& bsk) const {
  if (switched.dim() != params_.n_lwe || bsk.size() != params_.n_lwe)
    raise(Errc::DimensionMismatch, "mask or key length is not n_lwe");
  uint64_t two_n = 2 * params_.n_poly;
  if (switched.b >= two_n) raise(Errc::InvalidArgument, "components must lie in [0, 2N)");
  for (uint64_t x : switched.a)
    if (x >= two_n) raise(Errc::InvalidArgument, "components must lie in [0, 2N)");
  int k = params_.glwe_dim;

  GlweCiphertext acc;
  for (int c = 0; c < k; c++)
    acc.mask.push_back(monomial_rotate(tv.mask[c], -static_cast<int64_t>(switched.b)));
  acc.body = monomial_rotate(tv.body, -static_cast<int64_t>(switched.b));
  counts_.auto_perm += static_cast<uint64_t>(k) + 1;

  for (size_t i = 0; i < params_.n_lwe; i++) {
    int64_t ai = static_cast<int64_t>(switched.a[i]);
    GlweCiphertext tmp;
    for (int c = 0; c <= k; c++) {
      const RingPolynomial& cur = component(acc, static_cast<size_t>(c));
      RingPolynomial diff = poly_sub(monomial_rotate(cur, ai), cur);
      counts_.auto_perm += 1;
      counts_.modadd += 1;
      if (c < k)
        tmp.mask.push_back(std::move(diff));
      else
        tmp.body = std::move(diff);
    }
    GlweCiphertext update = external_product(tmp, bsk[i]);
    for (int c = 0; c <= k; c++) {
      component(acc, static_cast<size_t>(c)) =
          poly_add(component(acc, static_cast<size_t>(c)),
                   component(update, static_cast<size_t>(c)));
      counts_.modadd += 1;
    }
  }
  return acc;
}

LweCiphertext TfheContext::sample_extract(const GlweCiphertext& glwe, size_t index) const {
  size_t n = params_.n_poly;
  if (index >= n) raise(Errc::IndexOutOfRange, "coefficient index out of range");
  if (glwe.body.rep != Rep::Coefficient)
    raise(Errc::RepError, "sample extract expects coefficient rep");
  int k = params_.glwe_dim;
  LweCiphertext out;
  out.mod = params_.modulus;
  out.a.resize(static_cast<size_t>(k) * n);
  for (int c = 0; c < k; c++) {
    const auto& A = glwe.mask[c].coeffs;
    for (size_t j = 0; j < n; j++) {
      uint64_t v = j <= index ? A[index - j] : mod_neg(A[n + index - j], params_.modulus);
      out.a[static_cast<size_t>(c) * n + j] = v;
    }
  }
  out.b = glwe.body.coeffs[index];
  return out;
}

LweCiphertext TfheContext::tfhe_keyswitch(
    const LweCiphertext& c, const std::vector<std::vector<LweCiphertext>>& ksk) const {
  size_t kn = static_cast<size_t>(params_.glwe_dim) * params_.n_poly;
  if (c.dim() != kn || ksk.size() != kn)
    raise(Errc::DimensionMismatch, "keyswitch expects a kN-dimensional input");
  LweCiphertext out;
  out.mod = params_.modulus;
  out.a.assign(params_.n_lwe, 0);
  out.b = c.b;
  for (size_t i = 0; i < kn; i++) {
    auto digits = digit_decompose_scalar(c.a[i], static_cast<unsigned>(params_.l_k),
                                         static_cast<unsigned>(params_.log_base_k),
                                         params_.modulus);
    for (int j = 0; j < params_.l_k; j++) {
      uint64_t d = digits[j];
      if (d == 0) continue;
      const LweCiphertext& row = ksk[i][j];
      for (size_t t = 0; t < out.a.size(); t++)
        out.a[t] = mod_sub(out.a[t], mod_mul(d, row.a[t], params_.modulus), params_.modulus);
      out.b = mod_sub(out.b, mod_mul(d, row.b, params_.modulus), params_.modulus);
    }
  }
  counts_.ip += kn * static_cast<uint64_t>(params_.l_k);
  return out;
}

GlweCiphertext TfheContext::build_test_vector(std::span<const uint64_t> lut) const {
  uint64_t t = params_.space();
  size_t n = params_.n_poly;
  if (lut.size() != t && lut.size() != 2 * t)
    raise(Errc::ShapeError, "lut must cover the padded or the full space");
  for (uint64_t v : lut)
    if (v >= 2 * t) raise(Errc::InvalidArgument, "lut value outside the space");
  if (lut.size() == 2 * t) {
    for (uint64_t m = 0; m < t; m++)
      if (lut[m + t] != (2 * t - lut[m]) % (2 * t))
        raise(Errc::NegacyclicViolation, "full-space lut must satisfy lut[m+t] = -lut[m]");
  }
  GlweCiphertext tv;
  for (int c = 0; c < params_.glwe_dim; c++)
    tv.mask.emplace_back(n, params_.modulus, Rep::Coefficient);
  RingPolynomial body(n, params_.modulus, Rep::Coefficient);
  for (size_t j = 0; j < n; j++) body.coeffs[j] = encode(lut[j * t / n]);
  // pre-rotate by the half window so valid phases never cross the wrap
  tv.body = monomial_rotate(body, -static_cast<int64_t>(n / (2 * t)));
  return tv;
}

LweCiphertext TfheContext::pbs(const LweCiphertext& c, const GlweCiphertext& tv,
                               const BootstrapKeys& keys) const {
  LweCiphertext switched = mod_switch(c);
  GlweCiphertext acc = blind_rotate(tv, switched, keys.bsk);
  LweCiphertext wide = sample_extract(acc, 0);
  return tfhe_keyswitch(wide, keys.ksk);
}

LweCiphertext TfheContext::pbs(const LweCiphertext& c, std::span<const uint64_t> lut,
                               const BootstrapKeys& keys) const {
  return pbs(c, build_test_vector(lut), keys);
}

LweCiphertext TfheContext::nand_gate(const LweCiphertext& c1, const LweCiphertext& c2,
                                     const BootstrapKeys& keys) const {
  uint64_t q = params_.modulus.value;
  uint64_t eighth = (q + 4) / 8;  // round(q/8)
  LweCiphertext lin = lwe_add(lwe_add(c1, c2), lwe_trivial(eighth));
  // constant-coefficient test vector: +q/8 on the upper half plane, the
  // negacyclic wrap supplies -q/8 on the lower
  GlweCiphertext tv;
  for (int c = 0; c < params_.glwe_dim; c++)
    tv.mask.emplace_back(params_.n_poly, params_.modulus, Rep::Coefficient);
  tv.body = RingPolynomial(params_.n_poly, params_.modulus, Rep::Coefficient);
  for (auto& v : tv.body.coeffs) v = eighth;
  LweCiphertext rotated = pbs(lin, tv, keys);
  return lwe_add(rotated, lwe_trivial(eighth));
}

}  // namespace trinity::tfhe
