#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "selfsim/group.hpp"
#include "selfsim/point.hpp"
#include "selfsim/rational.hpp"

namespace selfsim {

// Level-k statistics of the fixed set of an automorphism q:
//   fixed[k]    = #{w in X^k : q(w) = w}
//   interior[k] = #{w in X^k : q(w) = w, q|_w = e}
//   boundary[k] = fixed[k] - interior[k], the words whose cylinders still
//                 carry non-interior fixed points.
struct FixCounts {
  std::vector<Integer> fixed;
  std::vector<Integer> interior;
  std::vector<Integer> boundary;
};

FixCounts fixed_counts(const AutomatonGroup& group, Aut g, std::size_t depth);

struct DecayCheck {
  std::size_t k;
  Integer boundary_count;  // a_{pk}
  Integer bound;           // (d^p - 1)^k
};

// Executable form of the decay argument for mu(Fix \ int Fix) = 0: with p the
// distinguishing depth of the closure, a_{pk} <= (d^p - 1)^k, and the
// nontrivial block of the fixed-letter transfer matrix has p-step row sums at
// most (d^p - 1)/d^p < 1.
struct DecayCertificate {
  std::size_t p = 1;
  std::vector<DecayCheck> checks;
  Integer max_row_sum;  // max over nontrivial closure states of a_p
  Integer row_bound;    // d^p - 1
  Rational contraction; // row_bound / d^p
  bool vacuous = false; // g is the identity
  bool holds = false;
};

// Checks levels pk <= max_level.
DecayCertificate boundary_null_certificate(const AutomatonGroup& group, Aut g, std::size_t max_level = 64);

// Exact Bernoulli measures of fixed sets, memoized per group. Safe to share
// between threads.
class FixMeasures {
 public:
  explicit FixMeasures(const AutomatonGroup& group) : group_(group) {}

  // mu(int Fix_q): the unique solution of m(e) = 1,
  // m(q) = (1/d) sum_{x : q(x) = x} m(q|_x).
  Rational interior(Aut q) const;
  // mu(Fix_q \ int Fix_q), zero once the row-sum contraction is verified.
  Rational boundary(Aut q) const;
  // mu(Fix_q).
  Rational total(Aut q) const { return interior(q) + boundary(q); }

  const AutomatonGroup& group() const { return group_; }

 private:
  const AutomatonGroup& group_;
  mutable std::mutex mutex_;
  mutable std::map<Aut, Rational> interior_;
  mutable std::map<Aut, bool> contracting_;
};

Rational mu_fix_exact(const AutomatonGroup& group, Aut g);

// y in int Fix_q.
bool in_interior_fix(const AutomatonGroup& group, Aut q, const Point& y);
// y in Fix_q.
bool fixes_point(const AutomatonGroup& group, Aut q, const Point& y);

// Lexicographically least x in Fix_g \ int Fix_g, if any: an infinite path
// from g through non-identity states along letters they fix.
std::optional<Point> boundary_fixed_point(const AutomatonGroup& group, Aut g);

// Some word v has q(v) = v and q|_v = e, i.e. int Fix_q is nonempty.
bool interiorizable(const AutomatonGroup& group, Aut q);
// Length of the shortest such v.
std::optional<std::size_t> interiorization_depth(const AutomatonGroup& group, Aut q);

struct HausdorffWitness {
  Aut state;
  Point point;
};

// A state q and a point in (Fix_q \ int Fix_q) that lies in the closure of
// int Fix_q. None iff the groupoid of germs is Hausdorff. Among candidates
// the least point is chosen, then the state whose interior is reached by the
// shortest word.
std::optional<HausdorffWitness> hausdorff_witness(const AutomatonGroup& group, const std::vector<Aut>& states);
std::optional<HausdorffWitness> hausdorff_witness(const AutomatonGroup& group);

// x is a dangerous unit: some germ [q_{u,u}, x] with q in the closure of
// states is a non-unit limit of units.
bool is_dangerous(const AutomatonGroup& group, const std::vector<Aut>& states, const Point& x);
bool is_dangerous(const AutomatonGroup& group, const Point& x);

}  // namespace selfsim
