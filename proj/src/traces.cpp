#include "selfsim/traces.hpp"

#include <algorithm>

#include "selfsim/errors.hpp"

namespace selfsim {

namespace {

template <typename Measure>
Scalar diagonal_sum(const Element& a, Measure&& measure) {
  const Rational d(static_cast<long>(a.group().degree()));
  Scalar sum;
  for (const auto& t : a.terms()) {
    if (t.bisection.range != t.bisection.source) continue;
    Rational weight = pow(d, -static_cast<long>(t.bisection.source.size())) * measure(t.bisection.state);
    sum += t.coeff * Scalar(weight);
  }
  return sum;
}

bool contains_germ(const AutomatonGroup& group, const std::vector<Germ>& germs, const Germ& g) {
  return std::any_of(germs.begin(), germs.end(), [&](const Germ& h) { return germ_equal(group, g, h); });
}

// g1 H = g2 H.
bool same_coset(const AutomatonGroup& group, const Germ& g1, const Germ& g2, const std::vector<Germ>& subgroup) {
  if (germ_range(group, g1) != germ_range(group, g2)) return false;
  Germ quotient = germ_compose(group, germ_invert(group, g2), g1);
  return contains_germ(group, subgroup, quotient);
}

std::vector<Germ> checked_subgroup(const AutomatonGroup& group, const Point& x, const std::vector<Germ>& given) {
  std::vector<Germ> h{unit_germ(group, x)};
  for (const auto& g : given) {
    if (g.base != x || germ_range(group, g) != x) {
      throw DomainError("subgroup germ " + format_germ(group, g) + " is not in the isotropy group at " + x.to_string());
    }
    if (!contains_germ(group, h, g)) h.push_back(g);
  }
  for (const auto& g : h) {
    if (!contains_germ(group, h, germ_invert(group, g))) throw DomainError("subgroup is not closed under inverses");
    for (const auto& k : h) {
      if (!contains_germ(group, h, germ_compose(group, g, k))) {
        throw DomainError("subgroup is not closed under products");
      }
    }
  }
  return h;
}

}  // namespace

Scalar canonical_trace(const FixMeasures& measures, const Element& a) {
  return diagonal_sum(a, [&](Aut q) { return measures.interior(q); });
}

Scalar isotropy_trace(const FixMeasures& measures, const Element& a) {
  return diagonal_sum(a, [&](Aut q) { return measures.total(q); });
}

Scalar isotropy_sum(const Element& a, const Point& x, const std::vector<Aut>& states, std::size_t depth_cap) {
  const AutomatonGroup& group = a.group();
  std::vector<Germ> germs{unit_germ(group, x)};
  auto consider = [&](const Germ& g) {
    if (!contains_germ(group, germs, g)) germs.push_back(g);
  };
  for (const auto& t : a.terms()) {
    if (!x.starts_with(t.bisection.source)) continue;
    Germ g{t.bisection, x};
    if (germ_range(group, g) == x) consider(g);
  }
  for (const auto& g : isotropy_germs_at(group, states, x, depth_cap)) consider(g);
  Scalar sum;
  for (const auto& g : germs) sum += evaluate(a, g);
  return sum;
}

Scalar isotropy_sum(const Element& a, const Point& x) { return isotropy_sum(a, x, {}, 0); }

bool check_tracial(const FixMeasures& measures, const Element& a, const Element& b) {
  Element ab = multiply(a, b);
  Element ba = multiply(b, a);
  return canonical_trace(measures, ab) == canonical_trace(measures, ba) &&
         isotropy_trace(measures, ab) == isotropy_trace(measures, ba);
}

bool check_positive(const FixMeasures& measures, const Element& a) {
  Scalar t = canonical_trace(measures, multiply(adjoint(a), a));
  return t.is_real() && t.re >= 0;
}

ScalarMatrix matrix_product(const ScalarMatrix& a, const ScalarMatrix& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.empty() ? 0 : b[0].size();
  ScalarMatrix c(n, std::vector<Scalar>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

ScalarMatrix conjugate_transpose(const ScalarMatrix& a) {
  const std::size_t n = a.size();
  const std::size_t m = n == 0 ? 0 : a[0].size();
  ScalarMatrix t(m, std::vector<Scalar>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) t[j][i] = a[i][j].conj();
  }
  return t;
}

RepMatrix rep_matrix(const Element& a, const Point& x, const std::vector<Germ>& basis,
                     const std::vector<Germ>& subgroup) {
  const AutomatonGroup& group = a.group();
  RepMatrix rep;
  rep.basis = basis;
  rep.subgroup = checked_subgroup(group, x, subgroup);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].base != x) {
      throw DomainError("basis germ " + format_germ(group, basis[i]) + " does not have source " + x.to_string());
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (same_coset(group, basis[i], basis[j], rep.subgroup)) {
        throw DomainError("basis germs " + std::to_string(j) + " and " + std::to_string(i) + " share a coset");
      }
    }
  }
  const std::size_t n = basis.size();
  rep.entries.assign(n, std::vector<Scalar>(n));
  std::vector<Germ> inverses;
  std::vector<Point> ranges;
  for (const auto& g : basis) {
    inverses.push_back(germ_invert(group, g));
    ranges.push_back(germ_range(group, g));
  }
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t row = 0; row < n; ++row) {
      Scalar sum;
      for (const auto& h : rep.subgroup) {
        Germ k = germ_compose(group, basis[row], germ_compose(group, h, inverses[col]));
        sum += evaluate(a, k);
      }
      rep.entries[row][col] = std::move(sum);
    }
  }
  rep.closed = true;
  for (const auto& t : a.terms()) {
    for (std::size_t col = 0; col < n && rep.closed; ++col) {
      if (!ranges[col].starts_with(t.bisection.source)) continue;
      Germ k = germ_compose(group, Germ{t.bisection, ranges[col]}, basis[col]);
      rep.closed = std::any_of(basis.begin(), basis.end(),
                               [&](const Germ& g) { return same_coset(group, k, g, rep.subgroup); });
    }
  }
  return rep;
}

std::vector<Germ> orbit_basis(const std::vector<Element>& elements, const Point& x, std::size_t cap) {
  if (elements.empty()) throw DomainError("orbit_basis needs at least one element");
  const AutomatonGroup& group = elements.front().group();
  std::vector<Germ> basis{unit_germ(group, x)};
  for (std::size_t i = 0; i < basis.size(); ++i) {
    Point r = germ_range(group, basis[i]);
    for (const auto& a : elements) {
      for (const auto& t : a.terms()) {
        if (!r.starts_with(t.bisection.source)) continue;
        Germ k = germ_compose(group, Germ{t.bisection, r}, basis[i]);
        if (contains_germ(group, basis, k)) continue;
        if (basis.size() >= cap) {
          throw CapExceeded("germ orbit of " + x.to_string() + " exceeds " + std::to_string(cap) + " germs");
        }
        basis.push_back(std::move(k));
      }
    }
  }
  return basis;
}

}  // namespace selfsim
