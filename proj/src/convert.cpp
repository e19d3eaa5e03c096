#include "trinity/convert.hpp"

namespace trinity::convert {

namespace {

bool power_of_two(size_t x) { return x != 0 && (x & (x - 1)) == 0; }

}  // namespace

ConversionContext::ConversionContext(const ckks::CkksContext& ckks_ctx,
                                     const ckks::SecretKey& sk, tfhe::TfheParams tfhe_params,
                                     size_t n_slot, uint64_t seed)
    : ckks_(ckks_ctx), tfhe_params_(std::move(tfhe_params)), n_slot_(n_slot) {
  size_t n = ckks_.params().n_poly;
  if (!power_of_two(n_slot) || n_slot > n)
    raise(Errc::SlotOverflow, "n_slot must be a power of two within the ring degree");
  Rng rng(seed);
  for (size_t j = 1; (size_t{1} << j) <= n; j++) {
    uint64_t elem = (uint64_t{1} << j) + 1;
    galois_.emplace(elem, ckks_.make_galois_key(sk, elem, rng));
  }
}

const ckks::EvaluationKey& ConversionContext::key_for(uint64_t elem) const {
  auto it = galois_.find(elem);
  if (it == galois_.end()) raise(Errc::KeyNotFound, "no automorphism key for this element");
  return it->second;
}

std::vector<tfhe::LweCiphertext> ConversionContext::ckks_to_lwes(const ckks::RlweCiphertext& ct,
                                                                 size_t n_slot) const {
  size_t n = ckks_.params().n_poly;
  if (n_slot > n) raise(Errc::SlotOverflow, "cannot extract more coefficients than the degree");
  if (ct.level != 0) raise(Errc::LevelMismatch, "extraction runs at the bottom of the chain");

  const Modulus& q0 = ckks_.ext_mod(0);
  RingPolynomial b = ntt_inverse(ct.b[0], ckks_.ext_tables(0));
  RingPolynomial a = ntt_inverse(ct.a[0], ckks_.ext_tables(0));
  counts_.intt += 2;

  // plaintext coefficient i is b_i + coeff_i(a*s); written as an LWE phase
  // b - <row, s> the mask row negates the a contributions
  std::vector<tfhe::LweCiphertext> out(n_slot);
  for (size_t i = 0; i < n_slot; i++) {
    tfhe::LweCiphertext& c = out[i];
    c.mod = q0;
    c.b = b.coeffs[i];
    c.a.resize(n);
    for (size_t j = 0; j < n; j++)
      c.a[j] = j <= i ? mod_neg(a.coeffs[i - j], q0) : a.coeffs[n + i - j];
  }
  return out;
}

ckks::RlweCiphertext ConversionContext::ring_embed(const tfhe::LweCiphertext& c) const {
  size_t n = ckks_.params().n_poly;
  if (c.dim() != n) raise(Errc::DimensionMismatch, "embedding expects dimension N");
  const Modulus& q0 = ckks_.ext_mod(0);
  if (c.mod.value != q0.value)
    raise(Errc::BasisMismatch, "embedding expects the bottom ciphertext modulus");

  RingPolynomial a(n, q0, Rep::Coefficient), b(n, q0, Rep::Coefficient);
  a.coeffs[0] = mod_neg(c.a[0], q0);
  for (size_t j = 1; j < n; j++) a.coeffs[j] = c.a[n - j];
  b.coeffs[0] = c.b;

  ckks::RlweCiphertext out;
  out.level = 0;
  out.scale = 1.0;
  out.b.push_back(ntt_forward(b, ckks_.ext_tables(0)));
  out.a.push_back(ntt_forward(a, ckks_.ext_tables(0)));
  counts_.ntt += 2;
  return out;
}

ckks::RlweCiphertext ConversionContext::pack_recursive(
    const std::vector<ckks::RlweCiphertext>& cts, size_t base, size_t stride, size_t n) const {
  if (n == 1) return cts[base];
  ckks::RlweCiphertext even = pack_recursive(cts, base, 2 * stride, n / 2);
  ckks::RlweCiphertext odd = pack_recursive(cts, base + stride, 2 * stride, n / 2);
  uint64_t shift = ckks_.params().n_poly / n;
  ckks::RlweCiphertext shifted = ckks_.rotate_monomial(odd, shift);
  ckks::RlweCiphertext sum = ckks_.hadd(even, shifted);
  ckks::RlweCiphertext diff = ckks_.hsub(even, shifted);
  uint64_t elem = static_cast<uint64_t>(n) + 1;
  return ckks_.hadd(sum, ckks_.apply_galois(diff, elem, key_for(elem)));
}

ckks::RlweCiphertext ConversionContext::pack_lwes(
    const std::vector<ckks::RlweCiphertext>& cts) const {
  if (!power_of_two(cts.size()) || cts.size() > ckks_.params().n_poly)
    raise(Errc::ShapeError, "pack expects a power-of-two ciphertext count within the degree");
  return pack_recursive(cts, 0, 1, cts.size());
}

ckks::RlweCiphertext ConversionContext::field_trace(const ckks::RlweCiphertext& ct,
                                                    size_t n_slot) const {
  size_t n = ckks_.params().n_poly;
  if (!power_of_two(n_slot) || n_slot > n)
    raise(Errc::ShapeError, "trace width must be a power of two within the degree");
  ckks::RlweCiphertext acc = ct;
  uint64_t two_n = 2 * n;
  size_t rounds = 0;
  for (size_t w = n_slot; w < n; w *= 2) rounds++;
  for (size_t k = 1; k <= rounds; k++) {
    uint64_t elem = (two_n >> k) + 1;
    acc = ckks_.hadd(acc, ckks_.apply_galois(acc, elem, key_for(elem)));
  }
  return acc;
}

ckks::RlweCiphertext ConversionContext::lwes_to_ckks(
    const std::vector<tfhe::LweCiphertext>& cts) const {
  if (!power_of_two(cts.size()) || cts.size() > ckks_.params().n_poly)
    raise(Errc::ShapeError, "packing expects a power-of-two input count within the degree");
  std::vector<ckks::RlweCiphertext> embedded;
  embedded.reserve(cts.size());
  for (const auto& c : cts) embedded.push_back(ring_embed(c));
  return field_trace(pack_lwes(embedded), cts.size());
}

}  // namespace trinity::convert
