#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "trinity/common.hpp"

namespace trinity {

// Word-sized prime modulus with Barrett state and the 2N value it serves.
// Moduli stay <= 2^36 so residue products fit comfortably in 128 bits and
// Shoup multiplication stays valid (requires value < 2^63).
struct Modulus {
  uint64_t value = 0;
  uint64_t two_n = 0;
  uint64_t primitive_root = 0;  // element of exact multiplicative order two_n
  unsigned bits = 0;
  uint64_t barrett_mu = 0;  // floor(2^(2*bits+3) / value)

  Modulus() = default;
  Modulus(uint64_t value, uint64_t two_n, uint64_t primitive_root);

  friend bool operator==(const Modulus& a, const Modulus& b) {
    return a.value == b.value && a.two_n == b.two_n && a.primitive_root == b.primitive_root;
  }
};

inline uint64_t mod_add(uint64_t a, uint64_t b, const Modulus& m) {
  uint64_t s = a + b;  // < 2^37, no overflow
  return s >= m.value ? s - m.value : s;
}

inline uint64_t mod_sub(uint64_t a, uint64_t b, const Modulus& m) {
  return a >= b ? a - b : a + m.value - b;
}

inline uint64_t mod_neg(uint64_t a, const Modulus& m) { return a == 0 ? 0 : m.value - a; }

// Barrett reduction of x < 2^(2*bits). One conditional correction suffices
// with the +3 guard bits in mu.
inline uint64_t barrett_reduce(unsigned __int128 x, const Modulus& m) {
  unsigned shift = 2 * m.bits + 3;
  uint64_t q = static_cast<uint64_t>((x * m.barrett_mu) >> shift);
  uint64_t r = static_cast<uint64_t>(x) - q * m.value;
  if (r >= m.value) r -= m.value;
  if (r >= m.value) r -= m.value;
  return r;
}

inline uint64_t mod_mul(uint64_t a, uint64_t b, const Modulus& m) {
  return barrett_reduce(static_cast<unsigned __int128>(a) * b, m);
}

// Shoup multiplication by a fixed operand w with precomputed
// w_shoup = floor(w * 2^64 / value). Fastest path for twiddle factors.
inline uint64_t shoup_precompute(uint64_t w, const Modulus& m) {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(w) << 64) / m.value);
}

inline uint64_t shoup_mul(uint64_t a, uint64_t w, uint64_t w_shoup, const Modulus& m) {
  uint64_t q = static_cast<uint64_t>((static_cast<unsigned __int128>(a) * w_shoup) >> 64);
  uint64_t r = a * w - q * m.value;
  return r >= m.value ? r - m.value : r;
}

uint64_t mod_pow(uint64_t base, uint64_t exp, const Modulus& m);

// Inverse of a modulo the prime m.value; a = 0 raises NoInverse.
uint64_t mod_inv(uint64_t a, const Modulus& m);

// Signed value reduced into [0, m.value).
inline uint64_t to_residue(int64_t v, const Modulus& m) {
  int64_t r = v % static_cast<int64_t>(m.value);
  if (r < 0) r += static_cast<int64_t>(m.value);
  return static_cast<uint64_t>(r);
}

// Residue lifted to the centered range [-(m-1)/2, m/2].
inline int64_t from_residue(uint64_t r, const Modulus& m) {
  return r > m.value / 2 ? static_cast<int64_t>(r) - static_cast<int64_t>(m.value)
                         : static_cast<int64_t>(r);
}

// Deterministic Miller-Rabin, complete for 64-bit inputs.
bool is_prime_u64(uint64_t n);

// Largest prime p <= 2^bit_target with p = 1 (mod two_n), i.e. the candidate
// closest to 2^bit_target that still fits the declared word budget. Candidates
// are 2^bit_target - k*two_n + 1 for k = 1, 2, ...; the search window spans
// half the target range and raises SearchExhausted beyond it. Deterministic,
// including the primitive-root choice (seeded by p).
Modulus find_ntt_prime(unsigned bit_target, uint64_t two_n);

// The `count` largest such primes, descending. All distinct.
std::vector<Modulus> ntt_prime_chain(unsigned bit_target, uint64_t two_n, size_t count);

// Wrap a known prime as a Modulus, verifying p = 1 (mod two_n) and finding a
// deterministic 2N-th root. Used for small toy moduli in tests.
Modulus make_modulus(uint64_t p, uint64_t two_n);

enum class LimbRole : uint8_t { Ciphertext, Special };

struct RnsBasis {
  std::vector<Modulus> moduli;
  std::vector<LimbRole> roles;

  size_t size() const { return moduli.size(); }
  mpz_class product() const;
};

// Unique x in [0, prod(m_i)) with x = residues[i] (mod m_i).
mpz_class crt_reconstruct(std::span<const uint64_t> residues, const RnsBasis& basis);

// Same, lifted to [-prod/2, prod/2).
mpz_class crt_reconstruct_centered(std::span<const uint64_t> residues, const RnsBasis& basis);

// Forward reduction of an arbitrary-precision integer onto the basis.
std::vector<uint64_t> crt_reduce(const mpz_class& x, const RnsBasis& basis);

}  // namespace trinity
