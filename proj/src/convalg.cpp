#include "selfsim/convalg.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

#include "selfsim/errors.hpp"

namespace selfsim {

namespace {

struct TermOrder {
  bool operator()(const Bisection& a, const Bisection& b) const {
    return std::tie(a.source, a.range, a.state) < std::tie(b.source, b.range, b.state);
  }
};

std::vector<Term> canonical_terms(std::vector<Term> terms) {
  std::map<Bisection, Scalar, TermOrder> sum;
  for (auto& t : terms) {
    if (t.bisection.range.size() != t.bisection.source.size()) {
      throw DomainError("bisection prefixes must have equal length");
    }
    sum[t.bisection] += t.coeff;
  }
  std::vector<Term> out;
  for (auto& [b, c] : sum) {
    if (!c.is_zero()) out.push_back({c, b});
  }
  return out;
}

void check_same_group(const Element& a, const Element& b) {
  if (&a.group() != &b.group()) throw DomainError("machine mismatch: elements live over different groups");
}

}  // namespace

Element::Element(const AutomatonGroup& group, std::vector<Term> terms)
    : group_(&group), terms_(canonical_terms(std::move(terms))) {}

Element Element::indicator(const AutomatonGroup& group, const Bisection& b, Scalar c) {
  return Element(group, {Term{std::move(c), b}});
}

Element add(const Element& a, const Element& b) {
  check_same_group(a, b);
  std::vector<Term> terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return Element(a.group(), std::move(terms));
}

Element scale(const Scalar& c, const Element& a) {
  std::vector<Term> terms = a.terms();
  for (auto& t : terms) t.coeff *= c;
  return Element(a.group(), std::move(terms));
}

Element subtract(const Element& a, const Element& b) { return add(a, scale(Scalar(-1), b)); }

Element multiply(const Element& a, const Element& b) {
  check_same_group(a, b);
  std::vector<Term> terms;
  for (const auto& s : a.terms()) {
    for (const auto& t : b.terms()) {
      for (auto& piece : bisection_product(a.group(), s.bisection, t.bisection)) {
        terms.push_back({s.coeff * t.coeff, std::move(piece)});
      }
    }
  }
  return Element(a.group(), std::move(terms));
}

Element adjoint(const Element& a) {
  std::vector<Term> terms;
  terms.reserve(a.terms().size());
  for (const auto& t : a.terms()) terms.push_back({t.coeff.conj(), inverse(a.group(), t.bisection)});
  return Element(a.group(), std::move(terms));
}

Scalar evaluate(const Element& a, const Germ& g) {
  Scalar sum;
  for (const auto& t : a.terms()) {
    if (bisection_contains(a.group(), t.bisection, g)) sum += t.coeff;
  }
  return sum;
}

Scalar unit_restriction_eval(const Element& a, const Point& x) { return evaluate(a, unit_germ(a.group(), x)); }

namespace {

// Germ patterns over one source cylinder vX^N and one range prefix u. After
// reading a word w below v, the germs of the terms over points of vwX^N are
// described by blocks of (state, coefficient) entries: entries in different
// blocks have already produced different range letters, entries in the same
// block agree so far. Two entries reaching the same state inside a block
// agree on the whole subtree, so they merge and their coefficients add; an
// entry whose coefficient is zero contributes nothing and is dropped. An
// entry alone in its block can never merge again, so its nonzero value
// persists on the whole subtree.
using Entry = std::pair<std::uint32_t, Scalar>;
using Block = std::vector<Entry>;
using Configuration = std::vector<Block>;

constexpr std::size_t kEmpty = 0;
constexpr std::size_t kPersistent = 1;

struct PatternGraph {
  std::vector<std::vector<std::size_t>> successors;  // nodes 0 and 1 are the sinks above
  std::size_t root = kEmpty;
};

std::size_t classify(const Configuration& c) {
  if (c.empty()) return kEmpty;
  for (const auto& b : c) {
    if (b.size() == 1) return kPersistent;
  }
  return SIZE_MAX;
}

Configuration step(const AutomatonGroup& group, const Configuration& c, Letter x) {
  Configuration out;
  for (const auto& block : c) {
    std::map<Letter, std::map<std::uint32_t, Scalar>> split;
    for (const auto& [state, coeff] : block) {
      Aut q{state};
      split[group.image(q, x)][group.child(q, x).id] += coeff;
    }
    for (auto& [letter, entries] : split) {
      Block b;
      for (auto& [state, coeff] : entries) {
        if (!coeff.is_zero()) b.emplace_back(state, std::move(coeff));
      }
      if (!b.empty()) out.push_back(std::move(b));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

PatternGraph explore(const AutomatonGroup& group, Configuration start, std::size_t budget, std::size_t& used) {
  PatternGraph g;
  g.successors = {{kEmpty}, {kPersistent}};
  std::map<Configuration, std::size_t> ids;
  std::vector<Configuration> nodes(2);
  auto node_of = [&](Configuration c) -> std::size_t {
    if (auto k = classify(c); k != SIZE_MAX) return k;
    auto it = ids.find(c);
    if (it != ids.end()) return it->second;
    if (++used > budget) {
      throw CapExceeded("germ pattern search exceeded " + std::to_string(budget) + " configurations");
    }
    std::size_t id = nodes.size();
    ids.emplace(c, id);
    nodes.push_back(std::move(c));
    g.successors.emplace_back();
    return id;
  };
  g.root = node_of(std::move(start));
  for (std::size_t i = 2; i < nodes.size(); ++i) {
    for (Letter x = 0; x < group.degree(); ++x) {
      std::size_t next = node_of(step(group, nodes[i], x));
      g.successors[i].push_back(next);
    }
  }
  return g;
}

// Greatest set of nodes with an infinite path avoiding the empty sink.
bool has_infinite_path(const PatternGraph& g) {
  const std::size_t n = g.successors.size();
  std::vector<bool> alive(n, true);
  alive[kEmpty] = false;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 2; i < n; ++i) {
      if (!alive[i]) continue;
      bool any = std::any_of(g.successors[i].begin(), g.successors[i].end(), [&](std::size_t j) { return alive[j]; });
      if (!any) {
        alive[i] = false;
        changed = true;
      }
    }
  }
  return alive[g.root];
}

// Some node reachable from the root never reaches the empty sink: the
// support then contains a whole cylinder.
bool has_open_support(const PatternGraph& g) {
  const std::size_t n = g.successors.size();
  std::vector<bool> doomed(n, false);
  doomed[kEmpty] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 2; i < n; ++i) {
      if (doomed[i]) continue;
      bool any = std::any_of(g.successors[i].begin(), g.successors[i].end(), [&](std::size_t j) { return doomed[j]; });
      if (any) {
        doomed[i] = true;
        changed = true;
      }
    }
  }
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{g.root};
  seen[g.root] = true;
  while (!stack.empty()) {
    std::size_t i = stack.back();
    stack.pop_back();
    if (!doomed[i]) return true;
    for (std::size_t j : g.successors[i]) {
      if (!seen[j]) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  return false;
}

// Initial configurations, one per (source, range) cylinder pair at the common
// refinement depth.
std::vector<Configuration> initial_configurations(const Element& a, const AlgebraLimits& limits) {
  const AutomatonGroup& group = a.group();
  std::size_t depth = 0;
  for (const auto& t : a.terms()) depth = std::max(depth, t.bisection.source.size());
  std::size_t pieces = 0;
  for (const auto& t : a.terms()) {
    std::size_t k = 1;
    for (std::size_t i = t.bisection.source.size(); i < depth; ++i) {
      k *= group.degree();
      if (k > limits.max_terms) break;
    }
    pieces += k;
    if (pieces > limits.max_terms) {
      throw CapExceeded("element refines to more than " + std::to_string(limits.max_terms) +
                        " terms at common depth " + std::to_string(depth));
    }
  }
  std::map<std::pair<Word, Word>, std::map<std::uint32_t, Scalar>> groups;
  for (const auto& t : a.terms()) {
    for_each_word(group.degree(), depth - t.bisection.source.size(), [&](const Word& w) {
      Bisection r = refine(group, t.bisection, w);
      groups[{r.source, r.range}][r.state.id] += t.coeff;
    });
  }
  std::vector<Configuration> out;
  for (auto& [key, entries] : groups) {
    Block b;
    for (auto& [state, coeff] : entries) {
      if (!coeff.is_zero()) b.emplace_back(state, std::move(coeff));
    }
    if (!b.empty()) out.push_back({std::move(b)});
  }
  return out;
}

}  // namespace

bool is_zero(const Element& a, const AlgebraLimits& limits) {
  std::size_t used = 0;
  for (auto& start : initial_configurations(a, limits)) {
    if (has_infinite_path(explore(a.group(), std::move(start), limits.max_configurations, used))) return false;
  }
  return true;
}

bool is_singular(const Element& a, const AlgebraLimits& limits) {
  std::size_t used = 0;
  for (auto& start : initial_configurations(a, limits)) {
    if (has_open_support(explore(a.group(), std::move(start), limits.max_configurations, used))) return false;
  }
  return true;
}

Element parse_element(const AutomatonGroup& group, std::string_view text) {
  std::vector<Term> terms;
  std::string normalized(text);
  std::replace(normalized.begin(), normalized.end(), ';', '\n');
  std::istringstream in(normalized);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() == 1 && tok[0].find(':') == std::string::npos) {
      if (!parse_scalar(tok[0]).is_zero()) throw ParseError("term '" + line + "' has no bisection");
      continue;
    }
    if (tok.size() > 2) throw ParseError("term '" + line + "' must be '<coeff> <q>:<u>><v>'");
    Scalar c = tok.size() == 2 ? parse_scalar(tok[0]) : Scalar(1);
    terms.push_back({std::move(c), parse_bisection(group, tok.back())});
  }
  return Element(group, std::move(terms));
}

std::string format_element(const Element& a) {
  if (a.empty()) return "0\n";
  std::string out;
  for (const auto& t : a.terms()) out += to_string(t.coeff) + " " + format_bisection(a.group(), t.bisection) + "\n";
  return out;
}

}  // namespace selfsim
