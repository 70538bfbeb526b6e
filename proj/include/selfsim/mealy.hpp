#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selfsim/word.hpp"

namespace selfsim {

// perm[x] is the image of letter x.
using Perm = std::vector<Letter>;

bool is_identity_perm(const Perm& p);
Perm inverse_perm(const Perm& p);

struct MachineState {
  std::string name;
  Perm perm;
  std::vector<std::size_t> next;  // next[x] = index of the restriction at letter x
};

// A finite invertible Mealy automaton over the alphabet {0, ..., d-1}. Every
// state is a finite-state automorphism of the tree X*. Immutable once built.
class Machine {
 public:
  // Validates bijectivity of outputs, totality of transitions and, if the
  // name "e" is present, that it really is the identity.
  Machine(std::size_t degree, std::vector<MachineState> states);

  std::size_t degree() const { return degree_; }
  std::size_t size() const { return states_.size(); }
  const MachineState& state(std::size_t i) const { return states_.at(i); }
  const std::vector<MachineState>& states() const { return states_; }

  // Index of a state that is structurally the identity (identity output and
  // self-loops on every letter), if one exists.
  std::optional<std::size_t> identity() const { return identity_; }
  std::optional<std::size_t> find(std::string_view name) const;

  Letter image(std::size_t q, Letter x) const { return states_[q].perm[x]; }
  std::size_t next(std::size_t q, Letter x) const { return states_[q].next[x]; }

  Word apply(std::size_t q, const Word& w) const;
  std::size_t restrict(std::size_t q, const Word& w) const;

 private:
  std::size_t degree_;
  std::vector<MachineState> states_;
  std::optional<std::size_t> identity_;
};

// Text format, one directive per line ('#' starts a comment):
//   alphabet <d>
//   state <name> perm <i0 ... i(d-1)> to <s0 ... s(d-1)>
// The name "e" is reserved for the identity and is added when absent.
Machine parse_machine(std::string_view text);
std::string format_machine(const Machine& m);

struct Minimized {
  Machine machine;
  std::vector<std::size_t> mapping;  // old state index -> new state index
};

// Moore-style partition refinement. Two states share a class iff they are
// equal as automorphisms. Classes are numbered by first occurrence, so a
// minimal machine maps to itself.
Minimized minimize(const Machine& m);

// Smallest p >= 1 such that every non-identity state moves some word of
// length p. A machine whose states are all the identity has p = 1.
std::size_t distinguishing_depth(const Machine& m);

// Per-state depth: the length of the shortest word the state moves, or
// nullopt for states equal to the identity.
std::vector<std::optional<std::size_t>> moving_depths(const Machine& m);

}  // namespace selfsim
