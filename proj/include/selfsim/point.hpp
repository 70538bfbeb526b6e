#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>

#include "selfsim/group.hpp"
#include "selfsim/word.hpp"

namespace selfsim {

// Eventually periodic boundary point prefix * period^infinity. Always held in
// canonical form: primitive period and shortest prefix, so equality of
// points is equality of representations.
class Point {
 public:
  Point(Word prefix, Word period);

  // Syntax "u(v)", e.g. "(1)" or "01(10)".
  static Point parse(std::string_view text, std::size_t degree);

  const Word& prefix() const { return prefix_; }
  const Word& period() const { return period_; }

  Letter at(std::size_t i) const {
    return i < prefix_.size() ? prefix_[i] : period_[(i - prefix_.size()) % period_.size()];
  }
  // Position modulo the cycle: two indices with the same key see the same
  // remaining sequence.
  std::size_t phase(std::size_t i) const {
    return i < prefix_.size() ? i : prefix_.size() + (i - prefix_.size()) % period_.size();
  }
  std::size_t phase_count() const { return prefix_.size() + period_.size(); }

  Word take(std::size_t n) const;
  Point drop(std::size_t n) const;
  Point prepend(const Word& w) const;
  bool starts_with(const Word& w) const;

  std::string to_string() const;

  friend auto operator<=>(const Point&, const Point&) = default;

 private:
  Word prefix_;
  Word period_;
};

// Image of x under the boundary homeomorphism induced by g.
Point apply_to_point(const AutomatonGroup& group, Aut g, const Point& x);

}  // namespace selfsim
