#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "selfsim/mealy.hpp"
#include "selfsim/word.hpp"

namespace selfsim {

// Handle of a finite-state automorphism interned in an AutomatonGroup. Within
// one group, two handles are equal iff the automorphisms are equal.
struct Aut {
  std::uint32_t id = 0;
  friend auto operator<=>(const Aut&, const Aut&) = default;
};

struct GroupLimits {
  std::size_t max_states = 100000;
};

// The self-similar group generated by a Mealy machine, realized as one
// growing minimal machine. Products and inverses are materialized lazily as
// product/inverse machines and merged into the canonical machine, so every
// automorphism ever produced has a unique index.
//
// All member functions are safe to call concurrently; the interning tables
// behave as if they had been computed eagerly.
class AutomatonGroup {
 public:
  explicit AutomatonGroup(const Machine& m, GroupLimits limits = {});

  AutomatonGroup(const AutomatonGroup&) = delete;
  AutomatonGroup& operator=(const AutomatonGroup&) = delete;

  std::size_t degree() const { return degree_; }
  Aut identity() const { return Aut{0}; }
  std::size_t size() const;
  const GroupLimits& limits() const { return limits_; }

  // Canonical handles of the states of the defining machine, sorted and
  // closed under restriction.
  const std::vector<Aut>& machine_states() const { return machine_states_; }

  // Interns every state of another machine over the same alphabet. Returns
  // the handle of each of its states.
  std::vector<Aut> import(const Machine& m);

  Aut state(std::string_view name) const;
  std::string label(Aut g) const;

  // Parses "b*c*d", "a^-1", "(a*b)^3" over the state names.
  Aut parse_expression(std::string_view text) const;

  Letter image(Aut g, Letter x) const;
  Aut child(Aut g, Letter x) const;
  Perm perm(Aut g) const;

  Word apply(Aut g, const Word& w) const;
  Aut restrict(Aut g, const Word& w) const;

  // (compose(g, h))(w) = g(h(w)).
  Aut compose(Aut g, Aut h) const;
  Aut invert(Aut g) const;
  Aut power(Aut g, long n) const;

  bool is_identity(Aut g) const { return g.id == 0; }
  bool equal(Aut g, Aut h) const { return is_identity(compose(g, invert(h))); }

  // All restrictions of g, in breadth-first order starting with g.
  std::vector<Aut> closure(Aut g) const;
  std::vector<Aut> closure(const std::vector<Aut>& gs) const;

  // Snapshot of the closure of gs as a standalone Machine; state i of the
  // result is closure(gs)[i], named by label.
  Machine closure_machine(const std::vector<Aut>& gs) const;

 private:
  // A state under construction. Successors with pending == true index into
  // the pending batch, the others are canonical ids.
  struct PendingRef {
    bool pending;
    std::uint32_t index;
  };
  struct Pending {
    Perm perm;
    std::vector<PendingRef> next;
    std::string label;
  };

  std::vector<std::uint32_t> intern_locked(const std::vector<Pending>& batch) const;
  std::uint32_t add_state_locked(const Perm& perm, const std::vector<std::uint32_t>& next,
                                 std::string label) const;
  std::string signature(const Perm& perm, const std::vector<std::uint32_t>& next) const;
  Aut compose_locked(Aut g, Aut h) const;
  Aut invert_locked(Aut g) const;
  std::vector<Aut> closure_locked(const std::vector<Aut>& gs) const;

  std::size_t degree_;
  GroupLimits limits_;
  std::vector<Aut> machine_states_;

  mutable std::mutex mutex_;
  mutable std::vector<Letter> perms_;        // id * degree + x
  mutable std::vector<std::uint32_t> next_;  // id * degree + x
  mutable std::vector<std::string> labels_;
  mutable std::unordered_map<std::string, std::uint32_t> names_;
  mutable std::unordered_map<std::string, std::uint32_t> signatures_;
  mutable std::unordered_map<std::uint64_t, std::uint32_t> compose_memo_;
  mutable std::unordered_map<std::uint32_t, std::uint32_t> invert_memo_;
};

}  // namespace selfsim

template <>
struct std::hash<selfsim::Aut> {
  std::size_t operator()(const selfsim::Aut& a) const noexcept { return a.id; }
};
