#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "selfsim/bundled.hpp"
#include "selfsim/convalg.hpp"
#include "selfsim/group.hpp"
#include "selfsim/mealy.hpp"
#include "selfsim/rational.hpp"

namespace selfsim::testing {

inline Machine bundled(const std::string& name) { return parse_machine(*bundled_machine(name)); }

struct Fixture {
  std::string name;
  Machine machine;
  std::unique_ptr<AutomatonGroup> group;

  explicit Fixture(const std::string& file)
      : name(file), machine(bundled(file)), group(std::make_unique<AutomatonGroup>(machine)) {}
};

inline std::vector<std::string> fixture_names() { return {"adding.gt", "grigorchuk.gt", "lamplighter.gt"}; }

// Exhaustive level-k counts through the parsed machine's own tables,
// independent of the interned group and of the counting recursion.
struct BruteCounts {
  Integer fixed = 0;
  Integer interior = 0;
};

inline BruteCounts brute_counts(const Machine& m, std::size_t q, std::size_t k) {
  BruteCounts out;
  const auto e = *m.identity();
  const auto mz = minimize(m);
  std::vector<bool> trivial(m.size());
  for (std::size_t s = 0; s < m.size(); ++s) trivial[s] = mz.mapping[s] == mz.mapping[e];
  for_each_word(m.degree(), k, [&](const Word& w) {
    if (m.apply(q, w) != w) return;
    ++out.fixed;
    if (trivial[m.restrict(q, w)]) ++out.interior;
  });
  return out;
}

// Level counts for k = 0..depth in one pass over every word of length
// <= depth, walking the machine's transition table.
struct LevelCounts {
  std::vector<Integer> fixed;
  std::vector<Integer> interior;
};

inline LevelCounts brute_level_counts(const Machine& m, std::size_t q, std::size_t depth) {
  const auto mz = minimize(m);
  const auto e = mz.mapping[*m.identity()];
  std::vector<unsigned long long> fixed(depth + 1, 0), interior(depth + 1, 0);
  // Every word is visited; a word stays "fixed" only if each letter was.
  auto walk = [&](auto&& self, std::size_t s, std::size_t k, bool is_fixed) -> void {
    if (is_fixed) {
      ++fixed[k];
      if (mz.mapping[s] == e) ++interior[k];
    }
    if (k == depth) return;
    for (Letter x = 0; x < m.degree(); ++x) self(self, m.next(s, x), k + 1, is_fixed && m.image(s, x) == x);
  };
  walk(walk, q, 0, true);
  LevelCounts out;
  for (std::size_t k = 0; k <= depth; ++k) {
    out.fixed.emplace_back(fixed[k]);
    out.interior.emplace_back(interior[k]);
  }
  return out;
}

// Random words, elements and the like with a fixed seed per test.
class Generator {
 public:
  explicit Generator(unsigned seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  long between(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

  Word word(std::size_t degree, std::size_t length) {
    Word w(length);
    for (auto& x : w) x = static_cast<Letter>(below(degree));
    return w;
  }

  Aut state(const std::vector<Aut>& pool) { return pool[below(pool.size())]; }

  Scalar coeff(bool complex = true) {
    Rational re(between(-3, 3), between(1, 3));
    Rational im = complex && below(3) == 0 ? Rational(between(-2, 2), between(1, 2)) : Rational(0);
    return {re, im};
  }

  Bisection bisection(const AutomatonGroup& g, const std::vector<Aut>& pool, std::size_t max_depth,
                      bool diagonal_bias = true) {
    std::size_t n = below(max_depth + 1);
    Word v = word(g.degree(), n);
    Word u = diagonal_bias && below(2) == 0 ? v : word(g.degree(), n);
    return {state(pool), u, v};
  }

  Element element(const AutomatonGroup& g, const std::vector<Aut>& pool, std::size_t max_terms, std::size_t max_depth,
                  bool complex = true) {
    std::vector<Term> terms;
    std::size_t n = 1 + below(max_terms);
    for (std::size_t i = 0; i < n; ++i) terms.push_back({coeff(complex), bisection(g, pool, max_depth)});
    return Element(g, std::move(terms));
  }

  Element off_diagonal_element(const AutomatonGroup& g, const std::vector<Aut>& pool, std::size_t max_terms,
                               std::size_t max_depth) {
    std::vector<Term> terms;
    std::size_t n = 1 + below(max_terms);
    while (terms.size() < n) {
      std::size_t len = 1 + below(max_depth);
      Word v = word(g.degree(), len);
      Word u = word(g.degree(), len);
      if (u == v) continue;
      terms.push_back({coeff(), {state(pool), u, v}});
    }
    return Element(g, std::move(terms));
  }

  std::mt19937& engine() { return rng_; }

 private:
  std::mt19937 rng_;
};

inline Machine random_machine(Generator& gen, std::size_t degree, std::size_t states) {
  std::vector<MachineState> out;
  for (std::size_t q = 0; q < states; ++q) {
    MachineState s{"s" + std::to_string(q), Perm(degree), {}};
    for (std::size_t x = 0; x < degree; ++x) s.perm[x] = static_cast<Letter>(x);
    std::shuffle(s.perm.begin(), s.perm.end(), gen.engine());
    for (std::size_t x = 0; x < degree; ++x) s.next.push_back(gen.below(states + 1));
    out.push_back(std::move(s));
  }
  Perm id(degree);
  for (std::size_t x = 0; x < degree; ++x) id[x] = static_cast<Letter>(x);
  out.push_back({"e", id, std::vector<std::size_t>(degree, states)});
  return Machine(degree, std::move(out));
}

// All pairs (p, q) reachable from (g, h); state i of the result is a pair,
// state 0 is (g, h).
inline Machine product_machine(const Machine& m, std::size_t g, std::size_t h) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs{{g, h}};
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index{{{g, h}, 0}};
  std::vector<MachineState> states;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [p, q] = pairs[i];
    MachineState s{"p" + std::to_string(i), Perm(m.degree()), {}};
    for (Letter x = 0; x < m.degree(); ++x) {
      Letter hx = m.image(q, x);
      s.perm[x] = m.image(p, hx);
      std::pair<std::size_t, std::size_t> child{m.next(p, hx), m.next(q, x)};
      auto [it, fresh] = index.emplace(child, pairs.size());
      if (fresh) pairs.push_back(child);
      s.next.push_back(it->second);
    }
    states.push_back(std::move(s));
  }
  return Machine(m.degree(), std::move(states));
}

}  // namespace selfsim::testing
