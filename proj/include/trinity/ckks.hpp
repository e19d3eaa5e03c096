#pragma once

#include <array>
#include <complex>
#include <map>
#include <span>

#include "trinity/kernels.hpp"
#include "trinity/polyring.hpp"

namespace trinity::ckks {

using trinity::KernelCounts;

// A polynomial carried limb-wise over a prefix of the RNS basis.
using RnsPolynomial = std::vector<RingPolynomial>;

struct CkksParams {
  size_t n_poly = 0;
  int levels = 0;  // L: top level, L+1 ciphertext moduli
  int dnum = 0;
  int alpha = 0;  // ceil((L+1)/dnum), also the special-basis size
  RnsBasis ciphertext_basis;  // q_0 .. q_L
  RnsBasis special_basis;     // p_0 .. p_(alpha-1)
  double scale = 0;           // default encoding scale
  double sigma = 3.2;

  // N=2^13, L=5, dnum=2: a chain small enough for test-speed verification.
  // q_0 and the special primes sit at 36 bits for conversion and ModDown
  // headroom; the working primes q_1..q_L sit near the 2^30 scale so rescale
  // keeps ciphertext scales stationary.
  static CkksParams desk();
  // N=2^16, L=35, dnum=3: the full-size set, reserved for long benchmarks.
  static CkksParams bench_default();

  size_t slot_count() const { return n_poly / 2; }
  uint64_t params_hash() const;
};

struct RlweCiphertext {
  RnsPolynomial a, b;
  int level = 0;
  double scale = 0;
};

struct Plaintext {
  RnsPolynomial poly;  // coefficient rep
  int level = 0;
  double scale = 0;
};

struct SecretKey {
  RnsPolynomial s;  // over the full extended basis, evaluation rep
};

struct PublicKey {
  RnsPolynomial a, b;  // over the ciphertext basis, evaluation rep
};

// dnum rows of (b_i, a_i) over the full extended basis, evaluation rep.
// Row i encrypts P * T_i * s_src under s_tgt, where T_i is the CRT indicator
// of digit group i: the residues of P*T_i are P mod q_k on the group's own
// limbs and 0 everywhere else (special limbs included), which is what makes
// one key serve every level, partial last digit included.
struct EvaluationKey {
  std::vector<std::array<RnsPolynomial, 2>> rows;
};

struct CkksKeys {
  SecretKey sk;
  PublicKey pk;
  EvaluationKey relin;                       // src = s^2
  std::map<int64_t, EvaluationKey> rotation;  // step -> key, src = automorphed s
};

class CkksContext {
 public:
  explicit CkksContext(CkksParams params);

  const CkksParams& params() const { return params_; }
  size_t ext_size() const { return ext_.size(); }
  const Modulus& ext_mod(size_t i) const { return ext_[i]; }
  const NttTables& ext_tables(size_t i) const { return tables_[i]; }

  // ---- encoding ----
  Plaintext encode(std::span<const std::complex<double>> values, double scale, int level) const;
  std::vector<std::complex<double>> decode(const RnsPolynomial& poly, double scale) const;

  // ---- keys ----
  CkksKeys keygen(uint64_t seed, std::span<const int64_t> rotation_steps = {}) const;
  // Key switching s_src -> sk.s for an arbitrary source secret (extended
  // basis, evaluation rep). Used for relinearization, rotations, and the
  // scheme-conversion repacking keys.
  EvaluationKey make_keyswitch_key(const RnsPolynomial& s_src, const SecretKey& sk,
                                   Rng& rng) const;
  EvaluationKey make_galois_key(const SecretKey& sk, uint64_t galois_elem, Rng& rng) const;

  // ---- encryption ----
  RlweCiphertext encrypt(const Plaintext& pt, const SecretKey& sk, Rng& rng,
                         bool zero_noise = false, bool zero_mask = false) const;
  RlweCiphertext encrypt_pk(const Plaintext& pt, const PublicKey& pk, Rng& rng) const;
  RnsPolynomial decrypt(const RlweCiphertext& ct, const SecretKey& sk) const;
  std::vector<std::complex<double>> decrypt_decode(const RlweCiphertext& ct,
                                                   const SecretKey& sk) const;

  // ---- kernels / operations ----
  // Fast basis extension of coefficient-rep limbs onto target moduli, with
  // the float overshoot estimate subtracted, so the result is the centered
  // value's direct reduction (up to a rare off-by-one C).
  std::vector<RingPolynomial> bconv(const std::vector<RingPolynomial>& src,
                                    std::span<const Modulus> targets) const;

  // Alg-style hybrid key switch of a coefficient-rep d at level l. Returns
  // (ks_b, ks_a) in evaluation rep such that ks_b + ks_a*s ~ d*s_src.
  std::pair<RnsPolynomial, RnsPolynomial> hybrid_keyswitch(const RnsPolynomial& d,
                                                           const EvaluationKey& evk) const;

  RlweCiphertext hadd(const RlweCiphertext& c1, const RlweCiphertext& c2) const;
  RlweCiphertext hsub(const RlweCiphertext& c1, const RlweCiphertext& c2) const;
  RlweCiphertext padd(const RlweCiphertext& ct, const Plaintext& pt) const;
  RlweCiphertext pmult(const RlweCiphertext& ct, const Plaintext& pt) const;
  RlweCiphertext hmult(const RlweCiphertext& c1, const RlweCiphertext& c2,
                       const EvaluationKey& relin) const;
  RlweCiphertext hrotate(const RlweCiphertext& ct, int64_t r, const CkksKeys& keys) const;
  // Automorphism X -> X^elem on both components plus the keyswitch back to
  // s; the supplied key must encrypt s(X^elem). hrotate is the slot-rotation
  // special case elem = 5^r.
  RlweCiphertext apply_galois(const RlweCiphertext& ct, uint64_t elem,
                              const EvaluationKey& key) const;
  // Multiply both components by the monomial X^power (power taken mod 2N),
  // applied pointwise in evaluation rep. Scale and level are unchanged.
  RlweCiphertext rotate_monomial(const RlweCiphertext& ct, uint64_t power) const;
  RlweCiphertext rescale(const RlweCiphertext& ct) const;

  // ---- instrumentation ----
  void recorder_reset() const { counts_ = KernelCounts{}; }
  const KernelCounts& recorder() const { return counts_; }

  // digit group i at level l covers ciphertext limbs [i*alpha, ...); beta is
  // the number of (possibly partial) groups present at level l
  int beta_at(int level) const { return (level + 1 + params_.alpha - 1) / params_.alpha; }

 private:
  CkksParams params_;
  std::vector<Modulus> ext_;        // q_0..q_L then p_0..p_(alpha-1)
  std::vector<NttTables> tables_;   // aligned with ext_
  mutable KernelCounts counts_;

  size_t ext_index_of(const Modulus& m) const;
};

}  // namespace trinity::ckks
