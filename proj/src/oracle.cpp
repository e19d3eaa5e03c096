#include "trinity/oracle.hpp"

#include <cmath>

#include <gmpxx.h>

namespace trinity::oracle {

RingPolynomial schoolbook_negacyclic_mul(const RingPolynomial& a, const RingPolynomial& b) {
  if (a.n() != b.n() || a.mod.value != b.mod.value)
    raise(Errc::ShapeError, "operands differ in length or modulus");
  if (a.rep != Rep::Coefficient || b.rep != Rep::Coefficient)
    raise(Errc::RepError, "schoolbook multiply works on coefficients");
  size_t n = a.n();
  const Modulus& m = a.mod;
  RingPolynomial out(n, m, Rep::Coefficient);
  for (size_t i = 0; i < n; i++) {
    for (size_t j = 0; j < n; j++) {
      uint64_t prod = mod_mul(a.coeffs[i], b.coeffs[j], m);
      size_t k = i + j;
      if (k >= n) {
        out.coeffs[k - n] = mod_sub(out.coeffs[k - n], prod, m);
      } else {
        out.coeffs[k] = mod_add(out.coeffs[k], prod, m);
      }
    }
  }
  return out;
}

RingPolynomial direct_transform(const RingPolynomial& a, const NttTables& t) {
  if (a.n() != t.n || a.mod.value != t.mod.value)
    raise(Errc::TableMismatch, "tables do not match polynomial");
  size_t n = a.n();
  const Modulus& m = a.mod;
  uint64_t psi = t.negacyclic ? t.psi : t.omega;
  RingPolynomial out(n, m, Rep::Evaluation);
  for (size_t p = 0; p < n; p++) {
    uint64_t point = mod_pow(psi, t.exp_map[p], m);
    uint64_t acc = 0;  // Horner from the top coefficient
    for (size_t i = n; i-- > 0;) acc = mod_add(mod_mul(acc, point, m), a.coeffs[i], m);
    out.coeffs[p] = acc;
  }
  return out;
}

RingPolynomial substitute_power(const RingPolynomial& a, uint64_t t) {
  if (a.rep != Rep::Coefficient) raise(Errc::RepError, "substitution works on coefficients");
  size_t n = a.n();
  const Modulus& m = a.mod;
  std::vector<uint64_t> wide(2 * n, 0);
  for (size_t i = 0; i < n; i++) {
    size_t j = (i * t) % (2 * n);
    wide[j] = mod_add(wide[j], a.coeffs[i], m);
  }
  RingPolynomial out(n, m, Rep::Coefficient);
  for (size_t j = 0; j < n; j++) out.coeffs[j] = mod_sub(wide[j], wide[j + n], m);
  return out;
}

double recomposition_error(const RingPolynomial& p, const std::vector<RingPolynomial>& digits,
                           unsigned log_base, uint64_t scale) {
  size_t n = p.n();
  mpz_class q(static_cast<unsigned long>(p.mod.value));
  double worst = 0;
  for (size_t i = 0; i < n; i++) {
    mpz_class acc = 0;
    for (size_t j = 0; j < digits.size(); j++) {
      mpz_class d(from_residue(digits[j].coeffs[i], p.mod));
      mpz_class w = mpz_class(1) << ((digits.size() - 1 - j) * log_base);
      acc += d * w;
    }
    acc *= static_cast<unsigned long>(scale);
    mpz_class c(from_residue(p.coeffs[i], p.mod));
    mpz_class err = c - acc;
    worst = std::max(worst, std::abs(err.get_d()));
  }
  return worst;
}

}  // namespace trinity::oracle
