#pragma once

#include "trinity/polyring.hpp"

namespace trinity::oracle {

// O(N^2) negacyclic product: a_i * b_j lands on X^(i+j) with a sign flip once
// i+j wraps past N. The check every transform-based multiply is held against.
RingPolynomial schoolbook_negacyclic_mul(const RingPolynomial& a, const RingPolynomial& b);

// Direct evaluation of the negacyclic transform: position p of the output is
// a(psi^e) with e = t.exp_map[p], computed by Horner. O(N^2).
RingPolynomial direct_transform(const RingPolynomial& a, const NttTables& t);

// a(X^t) computed through a width-2N scratch buffer, independently of the
// production scatter.
RingPolynomial substitute_power(const RingPolynomial& a, uint64_t t);

// Max |centered(p_i) - scale * sum_j digit_j * B^(levels-1-j)| over i, the
// recomposition error of a digit decomposition, via arbitrary precision.
double recomposition_error(const RingPolynomial& p, const std::vector<RingPolynomial>& digits,
                           unsigned log_base, uint64_t scale);

}  // namespace trinity::oracle
