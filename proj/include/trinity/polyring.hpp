#pragma once

#include <cstdint>
#include <vector>

#include "trinity/modmath.hpp"

namespace trinity {

enum class Rep : uint8_t { Coefficient, Evaluation };

// Element of R_q = Z_q[X]/(X^N + 1), N a power of two.
struct RingPolynomial {
  std::vector<uint64_t> coeffs;
  Modulus mod;
  Rep rep = Rep::Coefficient;

  RingPolynomial() = default;
  RingPolynomial(size_t n, const Modulus& m, Rep r = Rep::Coefficient)
      : coeffs(n, 0), mod(m), rep(r) {}

  size_t n() const { return coeffs.size(); }
};

inline uint32_t bit_reverse(uint32_t x, unsigned bits) {
  uint32_t r = 0;
  for (unsigned i = 0; i < bits; i++) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

// Twiddle tables for the constant-geometry (Pease) transform. A negacyclic
// table folds the X^N+1 structure into a pre-twist by the 2n-th root psi and
// runs the cyclic stages over omega = psi^2; a cyclic table (used by the
// four-step phases) runs the stages over an explicitly supplied omega.
//
// Data order: forward stage s pairs (x[j], x[j+n/2]) and writes sums to
// y[2j], twiddled differences to y[2j+1]. After log2(n) stages, position p
// holds the evaluation at exponent exp_map[p] = 2*bitrev(p)+1 (of psi) in the
// negacyclic case, or at omega^bitrev(p) in the cyclic case.
struct NttTables {
  Modulus mod;
  size_t n = 0;
  bool negacyclic = true;
  uint64_t omega = 0;  // n-th root driving the butterfly stages
  uint64_t psi = 0;    // 2n-th root (pre/post twist); 0 for cyclic tables

  // Flattened per-stage twiddles: stage s holds n >> (s+1) entries at
  // stage_off[s], entry m = omega^(2^s * m). inv_tw holds the inverses.
  std::vector<uint64_t> fwd_tw, fwd_tw_shoup;
  std::vector<uint64_t> inv_tw, inv_tw_shoup;
  std::vector<size_t> stage_off;

  std::vector<uint64_t> twist, twist_shoup;      // psi^i
  std::vector<uint64_t> untwist, untwist_shoup;  // psi^(-i) * n^(-1), merged
  uint64_t n_inv = 0, n_inv_shoup = 0;

  std::vector<uint32_t> exp_map;     // evaluation exponent at each output position
  std::vector<uint32_t> pos_of_exp;  // inverse map, size 2n; UINT32_MAX = unused

  // First item + common ratio of the twist sequence, for on-the-fly
  // generation (psi powers here; four-step rows derive per-row ratios).
  struct TwistSeed {
    uint64_t first = 1, ratio = 0;
  };
  TwistSeed twist_seed;

  static NttTables negacyclic_tables(const Modulus& mod, size_t n);
  static NttTables cyclic_tables(const Modulus& mod, size_t n, uint64_t omega);
};

RingPolynomial ntt_forward(const RingPolynomial& p, const NttTables& t);
RingPolynomial ntt_inverse(const RingPolynomial& p, const NttTables& t);

// Four-step evaluation of the same transform ntt_forward computes: phase-1
// column NTTs of size t1.n, on-the-fly twisting factors between phases, then
// phase-2 row NTTs of size t2.n. t1/t2 are cyclic tables over omega^(n2) and
// omega^(n1) for the ring's omega; output ordering matches ntt_forward
// position for position. precomputed_twist selects a table-driven twisting
// path instead of the (first item, common ratio) generator, for cross-checks.
RingPolynomial four_step_ntt(const RingPolynomial& p, const NttTables& t1, const NttTables& t2,
                             bool precomputed_twist = false);

// a(X) -> a(X^t) for odd t, in either representation. Evaluation rep needs
// the (negacyclic) tables for the exponent permutation; coefficient rep is a
// signed index scatter.
RingPolynomial galois_transform(const RingPolynomial& p, uint64_t t, const NttTables& tables);

// The CKKS rotation automorphism: galois element 5^r mod 2N (r may be
// negative; it is reduced modulo the order of 5, which is N/2).
RingPolynomial automorphism(const RingPolynomial& p, int64_t r, const NttTables& tables);
uint64_t galois_element_of_step(int64_t r, size_t n);

// p * X^r with X^N = -1 wraparound; r any signed integer.
RingPolynomial monomial_rotate(const RingPolynomial& p, int64_t r);

// Signed base-2^log_base digits, most significant first, of round(c/scale)
// per centered coefficient c, scale = round(q / B^levels). Digits lie in
// [-B/2, B/2] and recompose as sum_j digit_j * B^(levels-1-j) * scale with
// per-coefficient error <= scale/2 (clamping adds more only for moduli far
// from a power of two, which this library never generates).
std::vector<RingPolynomial> digit_decompose(const RingPolynomial& p, unsigned levels,
                                            unsigned log_base);
std::vector<uint64_t> digit_decompose_scalar(uint64_t value, unsigned levels, unsigned log_base,
                                             const Modulus& mod);
uint64_t decompose_scale(const Modulus& mod, unsigned levels, unsigned log_base);

// Elementwise ring ops. Shapes, moduli, and (for mul) representations must
// agree; mul requires Evaluation rep.
RingPolynomial poly_add(const RingPolynomial& a, const RingPolynomial& b);
RingPolynomial poly_sub(const RingPolynomial& a, const RingPolynomial& b);
RingPolynomial poly_neg(const RingPolynomial& a);
RingPolynomial poly_mul_pointwise(const RingPolynomial& a, const RingPolynomial& b);
RingPolynomial poly_mul_scalar(const RingPolynomial& a, uint64_t s);

// Convenience full negacyclic product via the transform.
RingPolynomial negacyclic_mul(const RingPolynomial& a, const RingPolynomial& b,
                              const NttTables& t);

RingPolynomial random_polynomial(Rng& rng, const Modulus& mod, size_t n,
                                 Rep rep = Rep::Coefficient);

}  // namespace trinity
