#include "selfsim/group.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <unordered_set>

#include "selfsim/errors.hpp"

namespace selfsim {

namespace {

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32U) | b;
}

bool is_atomic_label(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string inverse_label(const std::string& s) {
  if (is_atomic_label(s)) return s + "^-1";
  if (s.size() > 3 && s.compare(s.size() - 3, 3, "^-1") == 0 && is_atomic_label(s.substr(0, s.size() - 3))) {
    return s.substr(0, s.size() - 3);
  }
  return "(" + s + ")^-1";
}

// Iterative Tarjan over the pending batch. Components come out in reverse
// topological order: every component is emitted after the ones it reaches.
template <typename Succ>
std::vector<std::vector<std::uint32_t>> strongly_connected(std::size_t n, Succ&& successors) {
  constexpr std::uint32_t kUnvisited = UINT32_MAX;
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  std::vector<std::vector<std::uint32_t>> components;
  std::uint32_t counter = 0;

  struct Frame {
    std::uint32_t node;
    std::size_t edge;
    std::vector<std::uint32_t> succ;
  };
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    std::vector<Frame> call;
    auto enter = [&](std::uint32_t v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = true;
      call.push_back({v, 0, successors(v)});
    };
    enter(root);
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < f.succ.size()) {
        std::uint32_t w = f.succ[f.edge++];
        if (index[w] == kUnvisited) {
          enter(w);
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      std::uint32_t v = f.node;
      if (low[v] == index[v]) {
        std::vector<std::uint32_t> comp;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        components.push_back(std::move(comp));
      }
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
    }
  }
  return components;
}

}  // namespace

AutomatonGroup::AutomatonGroup(const Machine& m, GroupLimits limits)
    : degree_(m.degree()), limits_(limits) {
  Perm id(degree_);
  for (std::size_t x = 0; x < degree_; ++x) id[x] = static_cast<Letter>(x);
  add_state_locked(id, std::vector<std::uint32_t>(degree_, 0), "e");
  names_.emplace("e", 0);
  auto handles = import(m);
  machine_states_ = closure(handles);
  std::sort(machine_states_.begin(), machine_states_.end());
}

std::size_t AutomatonGroup::size() const {
  std::lock_guard lock(mutex_);
  return labels_.size();
}

std::string AutomatonGroup::signature(const Perm& perm, const std::vector<std::uint32_t>& next) const {
  std::string key(perm.begin(), perm.end());
  key.append(reinterpret_cast<const char*>(next.data()), next.size() * sizeof(std::uint32_t));
  return key;
}

std::uint32_t AutomatonGroup::add_state_locked(const Perm& perm, const std::vector<std::uint32_t>& next,
                                               std::string label) const {
  if (labels_.size() >= limits_.max_states) {
    throw CapExceeded("automaton group exceeded the state cap of " + std::to_string(limits_.max_states) +
                      " interned states");
  }
  auto id = static_cast<std::uint32_t>(labels_.size());
  perms_.insert(perms_.end(), perm.begin(), perm.end());
  next_.insert(next_.end(), next.begin(), next.end());
  labels_.push_back(std::move(label));
  signatures_.emplace(signature(perm, next), id);
  return id;
}

std::vector<std::uint32_t> AutomatonGroup::intern_locked(const std::vector<Pending>& batch) const {
  const std::size_t d = degree_;
  constexpr std::uint32_t kUnresolved = UINT32_MAX;
  std::vector<std::uint32_t> resolved(batch.size(), kUnresolved);

  auto components = strongly_connected(batch.size(), [&](std::uint32_t v) {
    std::vector<std::uint32_t> out;
    for (const auto& r : batch[v].next) {
      if (r.pending) out.push_back(r.index);
    }
    return out;
  });

  for (const auto& comp : components) {
    bool cyclic = comp.size() > 1;
    if (!cyclic) {
      for (const auto& r : batch[comp[0]].next) cyclic = cyclic || (r.pending && r.index == comp[0]);
    }
    if (!cyclic) {
      const Pending& p = batch[comp[0]];
      std::vector<std::uint32_t> next(d);
      for (std::size_t x = 0; x < d; ++x) next[x] = p.next[x].pending ? resolved[p.next[x].index] : p.next[x].index;
      auto it = signatures_.find(signature(p.perm, next));
      resolved[comp[0]] = it != signatures_.end() ? it->second : add_state_locked(p.perm, next, p.label);
      continue;
    }

    // Moore refinement over the canonical states together with this
    // component. Canonical states are pairwise distinct, so every class holds
    // at most one of them.
    const std::size_t existing = labels_.size();
    const std::size_t total = existing + comp.size();
    std::unordered_map<std::uint32_t, std::uint32_t> local;
    for (std::uint32_t i = 0; i < comp.size(); ++i) local.emplace(comp[i], static_cast<std::uint32_t>(existing + i));
    std::vector<std::uint32_t> succ(total * d);
    std::vector<const Letter*> perm_of(total);
    for (std::size_t s = 0; s < existing; ++s) {
      std::copy_n(next_.begin() + static_cast<long>(s * d), d, succ.begin() + static_cast<long>(s * d));
      perm_of[s] = perms_.data() + s * d;
    }
    for (std::size_t i = 0; i < comp.size(); ++i) {
      const Pending& p = batch[comp[i]];
      std::size_t s = existing + i;
      perm_of[s] = p.perm.data();
      for (std::size_t x = 0; x < d; ++x) {
        const auto& r = p.next[x];
        succ[s * d + x] = !r.pending ? r.index : local.count(r.index) ? local.at(r.index) : resolved[r.index];
      }
    }
    std::vector<std::uint32_t> cls(total);
    std::size_t count;
    {
      std::map<std::vector<Letter>, std::uint32_t> ids;
      for (std::size_t s = 0; s < total; ++s) {
        auto [it, fresh] =
            ids.emplace(std::vector<Letter>(perm_of[s], perm_of[s] + d), static_cast<std::uint32_t>(ids.size()));
        cls[s] = it->second;
      }
      count = ids.size();
    }
    while (true) {
      std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
      std::vector<std::uint32_t> refined(total);
      std::vector<std::uint32_t> sig(d + 1);
      for (std::size_t s = 0; s < total; ++s) {
        sig[0] = cls[s];
        for (std::size_t x = 0; x < d; ++x) sig[x + 1] = cls[succ[s * d + x]];
        auto [it, fresh] = ids.emplace(sig, static_cast<std::uint32_t>(ids.size()));
        refined[s] = it->second;
      }
      cls = std::move(refined);
      if (ids.size() == count) break;
      count = ids.size();
    }
    std::unordered_map<std::uint32_t, std::uint32_t> class_id;
    for (std::size_t s = 0; s < existing; ++s) class_id.emplace(cls[s], static_cast<std::uint32_t>(s));
    std::vector<std::size_t> fresh_members;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      auto c = cls[existing + i];
      if (!class_id.count(c)) {
        // Reserve the id; transitions are filled below once all fresh
        // classes of the component have ids.
        class_id.emplace(c, static_cast<std::uint32_t>(existing + fresh_members.size()));
        fresh_members.push_back(i);
      }
    }
    for (std::size_t i : fresh_members) {
      std::vector<std::uint32_t> next(d);
      for (std::size_t x = 0; x < d; ++x) next[x] = class_id.at(cls[succ[(existing + i) * d + x]]);
      add_state_locked(batch[comp[i]].perm, next, batch[comp[i]].label);
    }
    for (std::size_t i = 0; i < comp.size(); ++i) resolved[comp[i]] = class_id.at(cls[existing + i]);
  }
  return resolved;
}

std::vector<Aut> AutomatonGroup::import(const Machine& m) {
  if (m.degree() != degree_) {
    throw DomainError("alphabet mismatch: group has " + std::to_string(degree_) + " letters, machine has " +
                      std::to_string(m.degree()));
  }
  std::vector<Pending> batch;
  batch.reserve(m.size());
  for (const auto& s : m.states()) {
    Pending p{s.perm, {}, s.name};
    for (std::size_t t : s.next) p.next.push_back({true, static_cast<std::uint32_t>(t)});
    batch.push_back(std::move(p));
  }
  std::lock_guard lock(mutex_);
  auto ids = intern_locked(batch);
  std::vector<Aut> out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    names_.emplace(m.state(i).name, ids[i]);
    out.push_back(Aut{ids[i]});
  }
  return out;
}

Aut AutomatonGroup::state(std::string_view name) const {
  std::lock_guard lock(mutex_);
  auto it = names_.find(std::string(name));
  if (it == names_.end()) throw DomainError("unknown state '" + std::string(name) + "'");
  return Aut{it->second};
}

std::string AutomatonGroup::label(Aut g) const {
  std::lock_guard lock(mutex_);
  return labels_.at(g.id);
}

Letter AutomatonGroup::image(Aut g, Letter x) const {
  std::lock_guard lock(mutex_);
  return perms_[g.id * degree_ + x];
}

Aut AutomatonGroup::child(Aut g, Letter x) const {
  std::lock_guard lock(mutex_);
  return Aut{next_[g.id * degree_ + x]};
}

Perm AutomatonGroup::perm(Aut g) const {
  std::lock_guard lock(mutex_);
  auto first = perms_.begin() + static_cast<long>(g.id * degree_);
  return Perm(first, first + static_cast<long>(degree_));
}

Word AutomatonGroup::apply(Aut g, const Word& w) const {
  std::lock_guard lock(mutex_);
  Word out;
  out.reserve(w.size());
  std::uint32_t q = g.id;
  for (Letter x : w) {
    out.push_back(perms_[q * degree_ + x]);
    q = next_[q * degree_ + x];
  }
  return out;
}

Aut AutomatonGroup::restrict(Aut g, const Word& w) const {
  std::lock_guard lock(mutex_);
  std::uint32_t q = g.id;
  for (Letter x : w) q = next_[q * degree_ + x];
  return Aut{q};
}

Aut AutomatonGroup::compose(Aut g, Aut h) const {
  std::lock_guard lock(mutex_);
  return compose_locked(g, h);
}

Aut AutomatonGroup::compose_locked(Aut g, Aut h) const {
  if (g.id == 0) return h;
  if (h.id == 0) return g;
  if (auto it = compose_memo_.find(pair_key(g.id, h.id)); it != compose_memo_.end()) return Aut{it->second};

  const std::size_t d = degree_;
  std::vector<Pending> batch;
  std::vector<std::uint64_t> keys;
  std::unordered_map<std::uint64_t, std::uint32_t> slot;
  auto ref_of = [&](std::uint32_t p, std::uint32_t q) -> PendingRef {
    if (p == 0) return {false, q};
    if (q == 0) return {false, p};
    auto key = pair_key(p, q);
    if (auto it = compose_memo_.find(key); it != compose_memo_.end()) return {false, it->second};
    if (auto it = slot.find(key); it != slot.end()) return {true, it->second};
    auto idx = static_cast<std::uint32_t>(batch.size());
    slot.emplace(key, idx);
    keys.push_back(key);
    batch.push_back({{}, {}, labels_[p] + "*" + labels_[q]});
    return {true, idx};
  };
  ref_of(g.id, h.id);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto p = static_cast<std::uint32_t>(keys[i] >> 32U);
    auto q = static_cast<std::uint32_t>(keys[i] & 0xffffffffU);
    Perm perm(d);
    std::vector<PendingRef> next(d);
    for (std::size_t x = 0; x < d; ++x) {
      Letter hx = perms_[q * d + x];
      perm[x] = perms_[p * d + hx];
      next[x] = ref_of(next_[p * d + hx], next_[q * d + x]);
    }
    batch[i].perm = std::move(perm);
    batch[i].next = std::move(next);
  }
  auto ids = intern_locked(batch);
  for (std::size_t i = 0; i < ids.size(); ++i) compose_memo_.emplace(keys[i], ids[i]);
  return Aut{ids[0]};
}

Aut AutomatonGroup::invert(Aut g) const {
  std::lock_guard lock(mutex_);
  return invert_locked(g);
}

Aut AutomatonGroup::invert_locked(Aut g) const {
  if (g.id == 0) return g;
  if (auto it = invert_memo_.find(g.id); it != invert_memo_.end()) return Aut{it->second};
  const std::size_t d = degree_;
  std::vector<Aut> states = closure_locked({g});
  std::unordered_map<std::uint32_t, std::uint32_t> slot;
  std::vector<Aut> todo;
  for (Aut s : states) {
    if (!invert_memo_.count(s.id)) {
      slot.emplace(s.id, static_cast<std::uint32_t>(todo.size()));
      todo.push_back(s);
    }
  }
  std::vector<Pending> batch;
  batch.reserve(todo.size());
  for (Aut s : todo) {
    Pending p{Perm(d), std::vector<PendingRef>(d), inverse_label(labels_[s.id])};
    for (std::size_t x = 0; x < d; ++x) p.perm[perms_[s.id * d + x]] = static_cast<Letter>(x);
    for (std::size_t y = 0; y < d; ++y) {
      // g^-1(y w) = g^-1(y) (g|_{g^-1(y)})^-1(w)
      std::uint32_t c = next_[s.id * d + p.perm[y]];
      if (c == 0) {
        p.next[y] = {false, 0};
      } else if (auto it = invert_memo_.find(c); it != invert_memo_.end()) {
        p.next[y] = {false, it->second};
      } else {
        p.next[y] = {true, slot.at(c)};
      }
    }
    batch.push_back(std::move(p));
  }
  auto ids = intern_locked(batch);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    invert_memo_.emplace(todo[i].id, ids[i]);
    invert_memo_.emplace(ids[i], todo[i].id);
  }
  return Aut{invert_memo_.at(g.id)};
}

Aut AutomatonGroup::power(Aut g, long n) const {
  std::lock_guard lock(mutex_);
  if (n < 0) {
    g = invert_locked(g);
    n = -n;
  }
  Aut result{0};
  Aut base = g;
  while (n != 0) {
    if (n & 1L) result = compose_locked(result, base);
    base = compose_locked(base, base);
    n >>= 1;
  }
  return result;
}

std::vector<Aut> AutomatonGroup::closure(Aut g) const { return closure(std::vector<Aut>{g}); }

std::vector<Aut> AutomatonGroup::closure(const std::vector<Aut>& gs) const {
  std::lock_guard lock(mutex_);
  return closure_locked(gs);
}

std::vector<Aut> AutomatonGroup::closure_locked(const std::vector<Aut>& gs) const {
  std::vector<Aut> order;
  std::unordered_set<std::uint32_t> seen;
  for (Aut g : gs) {
    if (seen.insert(g.id).second) order.push_back(g);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t x = 0; x < degree_; ++x) {
      std::uint32_t c = next_[order[i].id * degree_ + x];
      if (seen.insert(c).second) order.push_back(Aut{c});
    }
  }
  return order;
}

Machine AutomatonGroup::closure_machine(const std::vector<Aut>& gs) const {
  std::lock_guard lock(mutex_);
  auto states = closure_locked(gs);
  std::unordered_map<std::uint32_t, std::size_t> pos;
  for (std::size_t i = 0; i < states.size(); ++i) pos.emplace(states[i].id, i);
  std::vector<MachineState> out;
  out.reserve(states.size());
  for (Aut s : states) {
    MachineState ms{labels_[s.id], Perm(perms_.begin() + static_cast<long>(s.id * degree_),
                                        perms_.begin() + static_cast<long>((s.id + 1) * degree_)),
                    {}};
    for (std::size_t x = 0; x < degree_; ++x) ms.next.push_back(pos.at(next_[s.id * degree_ + x]));
    out.push_back(std::move(ms));
  }
  return Machine(degree_, std::move(out));
}

namespace {

class ExpressionParser {
 public:
  ExpressionParser(const AutomatonGroup& group, std::string_view text) : group_(group), text_(text) {}

  Aut parse() {
    Aut g = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return g;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression '" + std::string(text_) + "': " + what);
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  Aut expr() {
    Aut g = factor();
    while (eat('*')) g = group_.compose(g, factor());
    return g;
  }
  Aut factor() {
    Aut g = primary();
    while (eat('^')) {
      skip();
      bool negative = pos_ < text_.size() && text_[pos_] == '-';
      if (negative) ++pos_;
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected an exponent");
      long n = std::stol(std::string(text_.substr(start, pos_ - start)));
      g = group_.power(g, negative ? -n : n);
    }
    return g;
  }
  Aut primary() {
    if (eat('(')) {
      Aut g = expr();
      if (!eat(')')) fail("missing ')'");
      return g;
    }
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail(pos_ < text_.size() ? "unexpected '" + std::string(1, text_[pos_]) + "'" : "expected a state name");
    return group_.state(text_.substr(start, pos_ - start));
  }

  const AutomatonGroup& group_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Aut AutomatonGroup::parse_expression(std::string_view text) const {
  return ExpressionParser(*this, text).parse();
}

}  // namespace selfsim
