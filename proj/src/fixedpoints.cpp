#include "selfsim/fixedpoints.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <tuple>
#include <unordered_map>

#include "selfsim/errors.hpp"
#include "selfsim/linsolve.hpp"

namespace selfsim {

namespace {

// Local copy of a closure, so the inner loops avoid the group's lock.
struct ClosureTable {
  std::size_t degree = 0;
  std::vector<Aut> states;
  std::unordered_map<Aut, std::size_t> index;
  std::vector<Perm> perm;
  std::vector<std::vector<std::size_t>> next;

  ClosureTable(const AutomatonGroup& group, const std::vector<Aut>& roots) : degree(group.degree()) {
    states = group.closure(roots);
    for (std::size_t i = 0; i < states.size(); ++i) index.emplace(states[i], i);
    for (Aut s : states) {
      perm.push_back(group.perm(s));
      std::vector<std::size_t> n(degree);
      for (std::size_t x = 0; x < degree; ++x) n[x] = index.at(group.child(s, static_cast<Letter>(x)));
      next.push_back(std::move(n));
    }
  }

  bool trivial(std::size_t i) const { return states[i].id == 0; }
  bool fixes(std::size_t i, std::size_t x) const { return perm[i][x] == x; }

  // Per-state counts for levels 0..depth; rows indexed by level.
  void counts(std::size_t depth, std::vector<std::vector<Integer>>& f, std::vector<std::vector<Integer>>& a) const {
    const std::size_t n = states.size();
    f.assign(depth + 1, std::vector<Integer>(n));
    a.assign(depth + 1, std::vector<Integer>(n));
    for (std::size_t i = 0; i < n; ++i) {
      f[0][i] = 1;
      a[0][i] = trivial(i) ? 0 : 1;
    }
    for (std::size_t k = 0; k < depth; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        Integer fs = 0, as = 0;
        for (std::size_t x = 0; x < degree; ++x) {
          if (!fixes(i, x)) continue;
          fs += f[k][next[i][x]];
          as += a[k][next[i][x]];
        }
        f[k + 1][i] = std::move(fs);
        a[k + 1][i] = std::move(as);
      }
    }
  }

  // Greatest subset of allowed states in which every state has an allowed
  // child along a fixed letter: the states with an infinite path.
  std::vector<bool> infinite(const std::vector<bool>& allowed) const {
    std::vector<bool> alive = allowed;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < states.size(); ++i) {
        if (!alive[i]) continue;
        bool any = false;
        for (std::size_t x = 0; x < degree && !any; ++x) any = fixes(i, x) && alive[next[i][x]];
        if (!any) {
          alive[i] = false;
          changed = true;
        }
      }
    }
    return alive;
  }

  // Greedy least-letter walk inside the alive set; eventually periodic.
  Point least_path(std::size_t start, const std::vector<bool>& alive) const {
    std::unordered_map<std::size_t, std::size_t> visit;
    Word letters;
    std::size_t i = start;
    while (!visit.count(i)) {
      visit.emplace(i, letters.size());
      std::size_t x = 0;
      while (!(fixes(i, x) && alive[next[i][x]])) ++x;
      letters.push_back(static_cast<Letter>(x));
      i = next[i][x];
    }
    auto cut = static_cast<long>(visit.at(i));
    return Point(Word(letters.begin(), letters.begin() + cut), Word(letters.begin() + cut, letters.end()));
  }

  // BFS distance to the identity along fixed letters.
  std::vector<std::optional<std::size_t>> interior_depths() const {
    const std::size_t n = states.size();
    std::vector<std::vector<std::size_t>> reverse(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t x = 0; x < degree; ++x) {
        if (fixes(i, x)) reverse[next[i][x]].push_back(i);
      }
    }
    std::vector<std::optional<std::size_t>> dist(n);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i) {
      if (trivial(i)) {
        dist[i] = 0;
        queue.push_back(i);
      }
    }
    while (!queue.empty()) {
      std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t j : reverse[i]) {
        if (!dist[j]) {
          dist[j] = *dist[i] + 1;
          queue.push_back(j);
        }
      }
    }
    return dist;
  }
};

Integer ipow(std::size_t base, std::size_t e) {
  Integer r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

FixCounts fixed_counts(const AutomatonGroup& group, Aut g, std::size_t depth) {
  ClosureTable table(group, {g});
  std::vector<std::vector<Integer>> f, a;
  table.counts(depth, f, a);
  FixCounts out;
  for (std::size_t k = 0; k <= depth; ++k) {
    out.fixed.push_back(f[k][0]);
    out.boundary.push_back(a[k][0]);
    out.interior.push_back(f[k][0] - a[k][0]);
  }
  return out;
}

DecayCertificate boundary_null_certificate(const AutomatonGroup& group, Aut g, std::size_t max_level) {
  DecayCertificate cert;
  const std::size_t d = group.degree();
  cert.p = distinguishing_depth(group.closure_machine({g}));
  cert.row_bound = ipow(d, cert.p) - 1;
  cert.contraction = Rational(cert.row_bound, ipow(d, cert.p));
  if (group.is_identity(g)) {
    cert.vacuous = true;
    cert.holds = true;
    return cert;
  }
  ClosureTable table(group, {g});
  const std::size_t levels = std::max<std::size_t>(1, max_level / cert.p);
  std::vector<std::vector<Integer>> f, a;
  table.counts(cert.p * levels, f, a);

  cert.holds = true;
  for (std::size_t i = 0; i < table.states.size(); ++i) {
    if (!table.trivial(i)) cert.max_row_sum = std::max(cert.max_row_sum, a[cert.p][i]);
  }
  cert.holds = cert.max_row_sum <= cert.row_bound;
  Integer bound = 1;
  for (std::size_t k = 1; k <= levels; ++k) {
    bound *= cert.row_bound;
    DecayCheck check{k, a[cert.p * k][0], bound};
    cert.holds = cert.holds && check.boundary_count <= check.bound;
    cert.checks.push_back(std::move(check));
  }
  return cert;
}

Rational FixMeasures::interior(Aut q) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = interior_.find(q); it != interior_.end()) return it->second;
  }
  ClosureTable table(group_, {q});
  const std::size_t d = table.degree;
  // Unknowns: the non-identity closure states.
  std::vector<std::size_t> unknown;
  std::unordered_map<std::size_t, std::size_t> column;
  for (std::size_t i = 0; i < table.states.size(); ++i) {
    if (!table.trivial(i)) {
      column.emplace(i, unknown.size());
      unknown.push_back(i);
    }
  }
  // (d I - A) m = c, with A the fixed-letter transitions between nontrivial
  // states and c the number of fixed letters leading to the identity.
  const std::size_t n = unknown.size();
  IntegerMatrix system(n, std::vector<Integer>(n));
  std::vector<Integer> rhs(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t i = unknown[r];
    system[r][r] += d;
    for (std::size_t x = 0; x < d; ++x) {
      if (!table.fixes(i, x)) continue;
      std::size_t j = table.next[i][x];
      if (table.trivial(j)) {
        rhs[r] += 1;
      } else {
        system[r][column.at(j)] -= 1;
      }
    }
  }
  std::vector<Rational> solution = n == 0 ? std::vector<Rational>{} : solve_integer_system(system, rhs);

  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < table.states.size(); ++i) {
    interior_.emplace(table.states[i], table.trivial(i) ? Rational(1) : solution[column.at(i)]);
  }
  return interior_.at(q);
}

Rational FixMeasures::boundary(Aut q) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = contracting_.find(q); it != contracting_.end()) return 0;
  }
  // lim a_k / d^k = lim ((A/d)^k 1)_q, which vanishes once some power of A/d
  // has all row sums below one.
  DecayCertificate cert = boundary_null_certificate(group_, q, 0);
  if (!cert.vacuous && cert.max_row_sum > cert.row_bound) {
    throw SingularSystem("fixed-letter transfer matrix failed the row-sum contraction check");
  }
  std::lock_guard lock(mutex_);
  contracting_.emplace(q, true);
  return 0;
}

Rational mu_fix_exact(const AutomatonGroup& group, Aut g) { return FixMeasures(group).interior(g); }

bool in_interior_fix(const AutomatonGroup& group, Aut q, const Point& y) {
  std::set<std::pair<Aut, std::size_t>> seen;
  for (std::size_t i = 0;; ++i) {
    if (group.is_identity(q)) return true;
    if (!seen.emplace(q, y.phase(i)).second) return false;
    Letter x = y.at(i);
    if (group.image(q, x) != x) return false;
    q = group.child(q, x);
  }
}

bool fixes_point(const AutomatonGroup& group, Aut q, const Point& y) {
  std::set<std::pair<Aut, std::size_t>> seen;
  for (std::size_t i = 0;; ++i) {
    if (group.is_identity(q)) return true;
    if (!seen.emplace(q, y.phase(i)).second) return true;
    Letter x = y.at(i);
    if (group.image(q, x) != x) return false;
    q = group.child(q, x);
  }
}

std::optional<Point> boundary_fixed_point(const AutomatonGroup& group, Aut g) {
  ClosureTable table(group, {g});
  std::vector<bool> allowed(table.states.size());
  for (std::size_t i = 0; i < allowed.size(); ++i) allowed[i] = !table.trivial(i);
  auto alive = table.infinite(allowed);
  if (!alive[0]) return std::nullopt;
  return table.least_path(0, alive);
}

std::optional<std::size_t> interiorization_depth(const AutomatonGroup& group, Aut q) {
  ClosureTable table(group, {q});
  return table.interior_depths()[0];
}

bool interiorizable(const AutomatonGroup& group, Aut q) { return interiorization_depth(group, q).has_value(); }

std::optional<HausdorffWitness> hausdorff_witness(const AutomatonGroup& group, const std::vector<Aut>& states) {
  ClosureTable table(group, states);
  auto depth = table.interior_depths();
  std::vector<bool> allowed(table.states.size());
  for (std::size_t i = 0; i < allowed.size(); ++i) allowed[i] = !table.trivial(i) && depth[i].has_value();
  auto alive = table.infinite(allowed);

  std::optional<std::tuple<Point, std::size_t, Aut>> best;
  for (std::size_t i = 0; i < table.states.size(); ++i) {
    if (!alive[i]) continue;
    std::tuple<Point, std::size_t, Aut> candidate{table.least_path(i, alive), *depth[i], table.states[i]};
    if (!best || candidate < *best) best = std::move(candidate);
  }
  if (!best) return std::nullopt;
  return HausdorffWitness{std::get<2>(*best), std::get<0>(*best)};
}

std::optional<HausdorffWitness> hausdorff_witness(const AutomatonGroup& group) {
  return hausdorff_witness(group, group.machine_states());
}

bool is_dangerous(const AutomatonGroup& group, const std::vector<Aut>& states, const Point& x) {
  ClosureTable table(group, states);
  auto depth = table.interior_depths();
  // The witnessing property passes from a point to its suffixes (through the
  // restricted state) and around the cycle, so the periodic tail decides it.
  Point y = x.drop(x.prefix().size());
  for (std::size_t start = 0; start < table.states.size(); ++start) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::size_t i = start;
    for (std::size_t pos = 0;; ++pos) {
      if (table.trivial(i) || !depth[i]) break;
      if (!seen.emplace(i, y.phase(pos)).second) return true;
      Letter a = y.at(pos);
      if (!table.fixes(i, a)) break;
      i = table.next[i][a];
    }
  }
  return false;
}

bool is_dangerous(const AutomatonGroup& group, const Point& x) {
  return is_dangerous(group, group.machine_states(), x);
}

}  // namespace selfsim
