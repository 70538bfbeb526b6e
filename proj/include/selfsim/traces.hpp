#pragma once

#include <cstddef>
#include <vector>

#include "selfsim/convalg.hpp"
#include "selfsim/fixedpoints.hpp"
#include "selfsim/germs.hpp"

namespace selfsim {

// tau(a) = integral of E(a) against the Bernoulli measure: each diagonal term
// c 1_{Theta(q_{w,w})} contributes c d^-|w| mu(int Fix_q), off-diagonal terms
// contribute nothing.
Scalar canonical_trace(const FixMeasures& measures, const Element& a);

// phi(a) = integral over x of the sum of a over the isotropy group at x: a
// diagonal term contributes c d^-|w| mu(Fix_q), counting non-unit germs too.
Scalar isotropy_trace(const FixMeasures& measures, const Element& a);

// F(a)(x) = sum of a over the isotropy group at x. The isotropy germs are
// those carried by the terms of a, together with the unit and the germs
// listed by isotropy_germs_at(x, states, depth_cap); the terms alone already
// make the sum exact.
Scalar isotropy_sum(const Element& a, const Point& x, const std::vector<Aut>& states, std::size_t depth_cap);
Scalar isotropy_sum(const Element& a, const Point& x);

bool check_tracial(const FixMeasures& measures, const Element& a, const Element& b);
// tau(a* a) is a nonnegative rational.
bool check_positive(const FixMeasures& measures, const Element& a);

using ScalarMatrix = std::vector<std::vector<Scalar>>;

ScalarMatrix matrix_product(const ScalarMatrix& a, const ScalarMatrix& b);
ScalarMatrix conjugate_transpose(const ScalarMatrix& a);

// Truncation of the representation on l^2(G_x / H) to the span of the
// cosets of the given basis germs:
//   entry(g', g) = sum_{h in H} a(g' h g^-1).
// closed is true when every term of a maps every basis coset into the
// basis, in which case the truncation is multiplicative on the left.
struct RepMatrix {
  std::vector<Germ> basis;
  std::vector<Germ> subgroup;  // H, always containing the unit
  ScalarMatrix entries;
  bool closed = false;
};

// basis germs must have source x and lie in distinct cosets; subgroup must
// be a finite group of isotropy germs at x (the unit is added if missing).
RepMatrix rep_matrix(const Element& a, const Point& x, const std::vector<Germ>& basis,
                     const std::vector<Germ>& subgroup = {});

// Germs with source x reachable from the unit by the terms of the given
// elements, up to cap germs; the result is closed for all of them.
std::vector<Germ> orbit_basis(const std::vector<Element>& elements, const Point& x, std::size_t cap = 256);

}  // namespace selfsim
