#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "selfsim/fixedpoints.hpp"
#include "selfsim/group.hpp"
#include "selfsim/point.hpp"
#include "selfsim/rational.hpp"
#include "selfsim/word.hpp"

namespace selfsim {

// The compact open bisection of the partial map q_{u,v}: source X^N cylinder
// vX^N -> range cylinder uX^N, v w |-> u q(w). |u| = |v| always.
struct Bisection {
  Aut state;
  Word range;   // u
  Word source;  // v

  friend auto operator<=>(const Bisection&, const Bisection&) = default;
};

Bisection make_bisection(Aut state, Word range, Word source);
Bisection unit_bisection(const AutomatonGroup& group, Word w = {});

// "q:u>v", with q any state expression.
Bisection parse_bisection(const AutomatonGroup& group, std::string_view text);
std::string format_bisection(const AutomatonGroup& group, const Bisection& b);

// Restriction of b to the source cylinder (v w) X^N, again a basis bisection:
// (q|_w)_{u q(w), v w}.
Bisection refine(const AutomatonGroup& group, const Bisection& b, const Word& w);
Bisection inverse(const AutomatonGroup& group, const Bisection& b);

// The set product b1 * b2 (apply b2 first) as disjoint basis bisections;
// empty when b2's range misses b1's source. Never more than one piece.
std::vector<Bisection> bisection_product(const AutomatonGroup& group, const Bisection& b1, const Bisection& b2);

struct InvarianceCheck {
  Rational source_measure;
  Rational range_measure;
  bool holds = false;
};
InvarianceCheck verify_invariance(const AutomatonGroup& group, const Bisection& b);

// Germ [q_{u,v}, x] with x in vX^N.
struct Germ {
  Bisection map;
  Point base;
};

Germ make_germ(const Bisection& b, const Point& x);
Germ unit_germ(const AutomatonGroup& group, const Point& x);

inline const Point& germ_source(const Germ& g) { return g.base; }
Point germ_range(const AutomatonGroup& group, const Germ& g);

bool germ_is_unit(const AutomatonGroup& group, const Germ& g);
bool germ_equal(const AutomatonGroup& group, const Germ& a, const Germ& b);
// a after b; requires source(a) = range(b).
Germ germ_compose(const AutomatonGroup& group, const Germ& a, const Germ& b);
Germ germ_invert(const AutomatonGroup& group, const Germ& g);

// The germ of b at g's base equals g.
bool bisection_contains(const AutomatonGroup& group, const Bisection& b, const Germ& g);

std::string format_germ(const AutomatonGroup& group, const Germ& g);

struct StateFreeness {
  Aut state;
  DecayCertificate certificate;
  Rational interior_measure;
  Rational total_measure;
};

struct EssentialFreenessReport {
  std::vector<StateFreeness> states;
  bool essentially_free = false;
  // Germ groupoids of tree automorphisms are always topologically free: a
  // cylinder wX^N inside Fix_q forces q|_w = e.
  bool topologically_free = true;
};

EssentialFreenessReport essential_freeness_report(const AutomatonGroup& group, const FixMeasures& measures);

// Non-unit isotropy germs [q_{u,u}, x] for q in the closure of states and
// |u| <= depth_cap, pairwise distinct. Only the part of the isotropy group
// visible from these states.
std::vector<Germ> isotropy_germs_at(const AutomatonGroup& group, const std::vector<Aut>& states, const Point& x,
                                    std::size_t depth_cap);

}  // namespace selfsim
