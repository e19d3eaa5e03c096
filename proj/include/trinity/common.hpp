#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trinity {

inline constexpr std::string_view kVersion = "1.0.0";

enum class Errc {
  NoInverse,
  SearchExhausted,
  BasisMismatch,
  TableMismatch,
  ShapeError,
  DecompositionOverflow,
  RepError,
  LevelMismatch,
  ScaleMismatch,
  KeyNotFound,
  NoLevelsLeft,
  SlotOverflow,
  IndexOutOfRange,
  DimensionMismatch,
  NegacyclicViolation,
  UnsupportedOp,
  UnsupportedSize,
  IoError,
  InvalidArgument,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
  throw Error(code, what);
}

// FNV-1a, used for params hashes in report headers and for seed derivation.
inline constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr uint64_t fnv1a64(std::string_view s, uint64_t h = kFnvOffset) {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

constexpr uint64_t fnv1a64_u64(uint64_t x, uint64_t h = kFnvOffset) {
  for (int i = 0; i < 8; i++) {
    h ^= x & 0xff;
    h *= kFnvPrime;
    x >>= 8;
  }
  return h;
}

inline uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic splittable RNG. fork() derives an independent stream from the
// construction seed only, so how much the parent has been consumed never
// changes what a child produces. That keeps keygen/encrypt/noise streams
// stable when unrelated call sites are added or reordered.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), state_(seed) {}

  uint64_t next() { return splitmix64(state_); }

  Rng fork(uint64_t stream) const {
    uint64_t s = seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 0x51ed270b7a4c1e65ULL));
    return Rng(splitmix64(s));
  }

  // Unbiased uniform draw from [0, bound).
  uint64_t uniform(uint64_t bound) {
    if (bound == 0) raise(Errc::InvalidArgument, "uniform bound must be positive");
    uint64_t threshold = (-bound) % bound;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in (0, 1).
  double uniform_real() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53; }

  double gaussian(double sigma) {
    double u1 = uniform_real();
    double u2 = uniform_real();
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Rounded discrete Gaussian, as a signed integer.
  int64_t gaussian_int(double sigma) { return llround(gaussian(sigma)); }

  // Ternary draw with P(0) = 1/2, P(+1) = P(-1) = 1/4.
  int ternary() {
    uint64_t r = next() & 3;
    if (r < 2) return 0;
    return r == 2 ? 1 : -1;
  }

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  uint64_t state_;
};

}  // namespace trinity
