#include "trinity/modmath.hpp"

#include <algorithm>

namespace trinity {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NoInverse: return "NoInverse";
    case Errc::SearchExhausted: return "SearchExhausted";
    case Errc::BasisMismatch: return "BasisMismatch";
    case Errc::TableMismatch: return "TableMismatch";
    case Errc::ShapeError: return "ShapeError";
    case Errc::DecompositionOverflow: return "DecompositionOverflow";
    case Errc::RepError: return "RepError";
    case Errc::LevelMismatch: return "LevelMismatch";
    case Errc::ScaleMismatch: return "ScaleMismatch";
    case Errc::KeyNotFound: return "KeyNotFound";
    case Errc::NoLevelsLeft: return "NoLevelsLeft";
    case Errc::SlotOverflow: return "SlotOverflow";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NegacyclicViolation: return "NegacyclicViolation";
    case Errc::UnsupportedOp: return "UnsupportedOp";
    case Errc::UnsupportedSize: return "UnsupportedSize";
    case Errc::IoError: return "IoError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

Modulus::Modulus(uint64_t value_, uint64_t two_n_, uint64_t primitive_root_)
    : value(value_), two_n(two_n_), primitive_root(primitive_root_) {
  if (value < 2) raise(Errc::InvalidArgument, "modulus must exceed 1");
  bits = std::bit_width(value);
  barrett_mu = static_cast<uint64_t>((static_cast<unsigned __int128>(1) << (2 * bits + 3)) / value);
}

uint64_t mod_pow(uint64_t base, uint64_t exp, const Modulus& m) {
  uint64_t acc = 1;
  uint64_t b = base % m.value;
  while (exp) {
    if (exp & 1) acc = mod_mul(acc, b, m);
    b = mod_mul(b, b, m);
    exp >>= 1;
  }
  return acc;
}

uint64_t mod_inv(uint64_t a, const Modulus& m) {
  if (a == 0) raise(Errc::NoInverse, "zero has no inverse");
  // m.value is prime throughout this library, so Fermat applies.
  return mod_pow(a % m.value, m.value - 2, m);
}

namespace {

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t n) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % n);
}

uint64_t powmod_u64(uint64_t base, uint64_t exp, uint64_t n) {
  uint64_t acc = 1;
  base %= n;
  while (exp) {
    if (exp & 1) acc = mulmod_u64(acc, base, n);
    base = mulmod_u64(base, base, n);
    exp >>= 1;
  }
  return acc;
}

}  // namespace

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  unsigned r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    r++;
  }
  // This witness set is a complete primality certificate below 2^64.
  for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < r; i++) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace {

// Deterministic search for an element of exact order two_n mod p. Candidates
// x are drawn from a stream seeded by p itself, so every run of the library
// regenerates identical tables.
uint64_t find_primitive_root(uint64_t p, uint64_t two_n) {
  Modulus scratch;
  scratch.value = p;
  scratch.bits = std::bit_width(p);
  scratch.barrett_mu =
      static_cast<uint64_t>((static_cast<unsigned __int128>(1) << (2 * scratch.bits + 3)) / p);
  Rng rng(fnv1a64_u64(p));
  for (int attempt = 0; attempt < 4096; attempt++) {
    uint64_t x = 2 + rng.uniform(p - 3);
    uint64_t cand = mod_pow(x, (p - 1) / two_n, scratch);
    // cand's order divides two_n (a power of two); order is exactly two_n
    // iff cand^(two_n/2) = -1.
    if (mod_pow(cand, two_n / 2, scratch) == p - 1) return cand;
  }
  raise(Errc::SearchExhausted, "no primitive root found");
}

}  // namespace

Modulus find_ntt_prime(unsigned bit_target, uint64_t two_n) {
  if (bit_target > 36) raise(Errc::InvalidArgument, "moduli above 36 bits unsupported");
  if (two_n == 0 || (two_n & (two_n - 1)) != 0)
    raise(Errc::InvalidArgument, "two_n must be a power of two");
  uint64_t top = 1ULL << bit_target;
  if (two_n >= top) raise(Errc::SearchExhausted, "two_n exceeds the target range");
  // Window: half the target range below 2^bit_target.
  uint64_t window = top / 2;
  for (uint64_t p = top - two_n + 1; p + window > top; p -= two_n) {
    if ((p - 1) % two_n == 0 && is_prime_u64(p)) {
      return Modulus(p, two_n, find_primitive_root(p, two_n));
    }
    if (p < two_n) break;
  }
  raise(Errc::SearchExhausted, "no NTT-friendly prime in the search window");
}

std::vector<Modulus> ntt_prime_chain(unsigned bit_target, uint64_t two_n, size_t count) {
  std::vector<Modulus> out;
  uint64_t top = 1ULL << bit_target;
  uint64_t window = top / 2;
  for (uint64_t p = top - two_n + 1; p + window > top && out.size() < count; p -= two_n) {
    if (is_prime_u64(p)) out.push_back(Modulus(p, two_n, find_primitive_root(p, two_n)));
    if (p < two_n) break;
  }
  if (out.size() < count) raise(Errc::SearchExhausted, "prime chain shorter than requested");
  return out;
}

Modulus make_modulus(uint64_t p, uint64_t two_n) {
  if (!is_prime_u64(p)) raise(Errc::InvalidArgument, "modulus value is not prime");
  if ((p - 1) % two_n != 0) raise(Errc::InvalidArgument, "modulus not 1 mod two_n");
  return Modulus(p, two_n, find_primitive_root(p, two_n));
}

mpz_class RnsBasis::product() const {
  mpz_class prod = 1;
  for (const auto& m : moduli) prod *= static_cast<unsigned long>(m.value);
  return prod;
}

mpz_class crt_reconstruct(std::span<const uint64_t> residues, const RnsBasis& basis) {
  if (residues.size() != basis.moduli.size())
    raise(Errc::BasisMismatch, "residue count does not match basis");
  mpz_class prod = basis.product();
  mpz_class acc = 0;
  for (size_t i = 0; i < basis.moduli.size(); i++) {
    const Modulus& m = basis.moduli[i];
    mpz_class mi = prod / static_cast<unsigned long>(m.value);
    // (prod / m_i)^-1 mod m_i
    uint64_t mi_mod = static_cast<uint64_t>(mpz_class(mi % static_cast<unsigned long>(m.value)).get_ui());
    uint64_t inv = mod_inv(mi_mod, m);
    mpz_class term = mi * static_cast<unsigned long>(mod_mul(residues[i] % m.value, inv, m));
    acc += term;
  }
  acc %= prod;
  return acc;
}

mpz_class crt_reconstruct_centered(std::span<const uint64_t> residues, const RnsBasis& basis) {
  mpz_class x = crt_reconstruct(residues, basis);
  mpz_class prod = basis.product();
  if (x * 2 >= prod) x -= prod;
  return x;
}

std::vector<uint64_t> crt_reduce(const mpz_class& x, const RnsBasis& basis) {
  std::vector<uint64_t> out(basis.moduli.size());
  for (size_t i = 0; i < basis.moduli.size(); i++) {
    mpz_class r = x % static_cast<unsigned long>(basis.moduli[i].value);
    if (r < 0) r += static_cast<unsigned long>(basis.moduli[i].value);
    out[i] = static_cast<uint64_t>(r.get_ui());
  }
  return out;
}

}  // namespace trinity
