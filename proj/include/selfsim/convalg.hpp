#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "selfsim/germs.hpp"
#include "selfsim/group.hpp"
#include "selfsim/rational.hpp"

namespace selfsim {

struct Term {
  Scalar coeff;
  Bisection bisection;
};

struct AlgebraLimits {
  std::size_t max_terms = 256;               // after refinement to a common depth
  std::size_t max_configurations = 1000000;  // germ-pattern search budget
};

// Finite combination sum c_i 1_{Theta_i} of basis-bisection indicators: the
// locally constant part of C_c of the groupoid of germs.
//
// The term list is canonical (distinct bisections, nonzero coefficients,
// sorted by source, range, state) but is not a normal form for the function:
// in the non-Hausdorff case different lists can define the same function.
// Use is_zero on a difference to compare elements.
class Element {
 public:
  explicit Element(const AutomatonGroup& group) : group_(&group) {}
  Element(const AutomatonGroup& group, std::vector<Term> terms);

  static Element indicator(const AutomatonGroup& group, const Bisection& b, Scalar c = 1);
  static Element unit(const AutomatonGroup& group) { return indicator(group, unit_bisection(group)); }

  const AutomatonGroup& group() const { return *group_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

 private:
  const AutomatonGroup* group_;
  std::vector<Term> terms_;
};

Element add(const Element& a, const Element& b);
Element scale(const Scalar& c, const Element& a);
Element subtract(const Element& a, const Element& b);
Element multiply(const Element& a, const Element& b);
Element adjoint(const Element& a);

// Value at a germ: the sum of coefficients of terms containing it.
Scalar evaluate(const Element& a, const Germ& g);
// E(a)(x), the value at the unit germ over x.
Scalar unit_restriction_eval(const Element& a, const Point& x);

// Exact test of a = 0 as a function on the groupoid.
bool is_zero(const Element& a, const AlgebraLimits& limits = {});
// The set of units carrying a nonzero value of a is meagre.
bool is_singular(const Element& a, const AlgebraLimits& limits = {});

// One term per line (';' also separates terms): "<coeff> <q>:<u>><v>".
Element parse_element(const AutomatonGroup& group, std::string_view text);
std::string format_element(const Element& a);

}  // namespace selfsim
