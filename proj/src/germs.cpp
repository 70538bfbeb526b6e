#include "selfsim/germs.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "selfsim/errors.hpp"

namespace selfsim {

Bisection make_bisection(Aut state, Word range, Word source) {
  if (range.size() != source.size()) {
    throw DomainError("bisection prefixes must have equal length, got '" + to_string(range) + "' and '" +
                      to_string(source) + "'");
  }
  return {state, std::move(range), std::move(source)};
}

Bisection unit_bisection(const AutomatonGroup& group, Word w) { return {group.identity(), w, w}; }

Bisection parse_bisection(const AutomatonGroup& group, std::string_view text) {
  auto colon = text.rfind(':');
  auto arrow = text.rfind('>');
  if (colon == std::string_view::npos || arrow == std::string_view::npos || arrow < colon) {
    throw ParseError("bisection '" + std::string(text) + "' must look like q:u>v");
  }
  Aut q = group.parse_expression(text.substr(0, colon));
  Word u = parse_word(text.substr(colon + 1, arrow - colon - 1), group.degree());
  Word v = parse_word(text.substr(arrow + 1), group.degree());
  if (u.size() != v.size()) throw ParseError("bisection '" + std::string(text) + "' has prefixes of unequal length");
  return {q, std::move(u), std::move(v)};
}

std::string format_bisection(const AutomatonGroup& group, const Bisection& b) {
  return group.label(b.state) + ":" + to_string(b.range) + ">" + to_string(b.source);
}

Bisection refine(const AutomatonGroup& group, const Bisection& b, const Word& w) {
  return {group.restrict(b.state, w), concat(b.range, group.apply(b.state, w)), concat(b.source, w)};
}

Bisection inverse(const AutomatonGroup& group, const Bisection& b) {
  return {group.invert(b.state), b.source, b.range};
}

std::vector<Bisection> bisection_product(const AutomatonGroup& group, const Bisection& b1, const Bisection& b2) {
  // b2: v2 z -> u2 s(z); b1: v1 z -> u1 t(z).
  if (b2.range.size() >= b1.source.size()) {
    if (!is_prefix(b1.source, b2.range)) return {};
    Word w(b2.range.begin() + static_cast<long>(b1.source.size()), b2.range.end());
    Bisection t = refine(group, b1, w);
    return {{group.compose(t.state, b2.state), t.range, b2.source}};
  }
  if (!is_prefix(b2.range, b1.source)) return {};
  // Split b2's source so its range lands exactly on b1's source: only the
  // piece z = s^-1(w) survives.
  Word w(b1.source.begin() + static_cast<long>(b2.range.size()), b1.source.end());
  Word z = group.apply(group.invert(b2.state), w);
  Bisection s = refine(group, b2, z);
  return {{group.compose(b1.state, s.state), b1.range, s.source}};
}

InvarianceCheck verify_invariance(const AutomatonGroup& group, const Bisection& b) {
  Rational d(static_cast<long>(group.degree()));
  InvarianceCheck out;
  out.source_measure = pow(d, -static_cast<long>(b.source.size()));
  out.range_measure = pow(d, -static_cast<long>(b.range.size()));
  out.holds = out.source_measure == out.range_measure;
  return out;
}

Germ make_germ(const Bisection& b, const Point& x) {
  if (!x.starts_with(b.source)) {
    throw DomainError("point " + x.to_string() + " is not in the source cylinder '" + to_string(b.source) + "'");
  }
  return {b, x};
}

Germ unit_germ(const AutomatonGroup& group, const Point& x) { return {unit_bisection(group), x}; }

Point germ_range(const AutomatonGroup& group, const Germ& g) {
  return apply_to_point(group, g.map.state, g.base.drop(g.map.source.size())).prepend(g.map.range);
}

namespace {

// The germ's map rewritten with source prefix of length n >= |v|.
Bisection at_depth(const AutomatonGroup& group, const Germ& g, std::size_t n) {
  const std::size_t have = g.map.source.size();
  if (n <= have) return g.map;
  Word w(n - have);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = g.base.at(have + i);
  return refine(group, g.map, w);
}

// q and r agree on a neighbourhood of y.
bool agree_near(const AutomatonGroup& group, Aut q, Aut r, const Point& y) {
  std::set<std::tuple<Aut, Aut, std::size_t>> seen;
  for (std::size_t i = 0;; ++i) {
    if (q == r) return true;
    if (!seen.emplace(q, r, y.phase(i)).second) return false;
    Letter x = y.at(i);
    if (group.image(q, x) != group.image(r, x)) return false;
    q = group.child(q, x);
    r = group.child(r, x);
  }
}

}  // namespace

bool germ_is_unit(const AutomatonGroup& group, const Germ& g) {
  return g.map.range == g.map.source && in_interior_fix(group, g.map.state, g.base.drop(g.map.source.size()));
}

bool germ_equal(const AutomatonGroup& group, const Germ& a, const Germ& b) {
  if (a.base != b.base) return false;
  const std::size_t n = std::max(a.map.source.size(), b.map.source.size());
  Bisection ra = at_depth(group, a, n);
  Bisection rb = at_depth(group, b, n);
  return ra.range == rb.range && agree_near(group, ra.state, rb.state, a.base.drop(n));
}

Germ germ_compose(const AutomatonGroup& group, const Germ& a, const Germ& b) {
  Point middle = germ_range(group, b);
  if (middle != a.base) {
    throw DomainError("germs are not composable: range " + middle.to_string() + " differs from source " +
                      a.base.to_string());
  }
  const std::size_t n = std::max(a.map.source.size(), b.map.source.size());
  Bisection first = at_depth(group, b, n);
  Bisection second = at_depth(group, a, n);
  return {{group.compose(second.state, first.state), second.range, first.source}, b.base};
}

Germ germ_invert(const AutomatonGroup& group, const Germ& g) {
  return {inverse(group, g.map), germ_range(group, g)};
}

bool bisection_contains(const AutomatonGroup& group, const Bisection& b, const Germ& g) {
  return g.base.starts_with(b.source) && germ_equal(group, Germ{b, g.base}, g);
}

std::string format_germ(const AutomatonGroup& group, const Germ& g) {
  return "[" + format_bisection(group, g.map) + ", " + g.base.to_string() + "]";
}

EssentialFreenessReport essential_freeness_report(const AutomatonGroup& group, const FixMeasures& measures) {
  EssentialFreenessReport report;
  report.essentially_free = true;
  for (Aut q : group.closure(group.machine_states())) {
    StateFreeness s{q, boundary_null_certificate(group, q), measures.interior(q), measures.total(q)};
    report.essentially_free = report.essentially_free && s.certificate.holds && s.interior_measure == s.total_measure;
    report.states.push_back(std::move(s));
  }
  std::sort(report.states.begin(), report.states.end(),
            [](const StateFreeness& a, const StateFreeness& b) { return a.state < b.state; });
  return report;
}

std::vector<Germ> isotropy_germs_at(const AutomatonGroup& group, const std::vector<Aut>& states, const Point& x,
                                    std::size_t depth_cap) {
  std::vector<Aut> pool = group.closure(states);
  std::sort(pool.begin(), pool.end());
  std::vector<Germ> out;
  for (std::size_t n = 0; n <= depth_cap; ++n) {
    Word u = x.take(n);
    Point y = x.drop(n);
    for (Aut q : pool) {
      if (!fixes_point(group, q, y) || in_interior_fix(group, q, y)) continue;
      Germ g{{q, u, u}, x};
      bool known = std::any_of(out.begin(), out.end(), [&](const Germ& h) { return germ_equal(group, g, h); });
      if (!known) out.push_back(std::move(g));
    }
  }
  return out;
}

}  // namespace selfsim
