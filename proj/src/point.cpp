#include "selfsim/point.hpp"

#include <algorithm>
#include <map>

#include "selfsim/errors.hpp"

namespace selfsim {

namespace {

Word primitive_root(const Word& v) {
  const std::size_t n = v.size();
  for (std::size_t len = 1; len < n; ++len) {
    if (n % len != 0) continue;
    bool ok = true;
    for (std::size_t i = len; i < n && ok; ++i) ok = v[i] == v[i - len];
    if (ok) return Word(v.begin(), v.begin() + static_cast<long>(len));
  }
  return v;
}

}  // namespace

Point::Point(Word prefix, Word period) : prefix_(std::move(prefix)), period_(std::move(period)) {
  if (period_.empty()) throw DomainError("a point needs a nonempty period");
  period_ = primitive_root(period_);
  while (!prefix_.empty() && prefix_.back() == period_.back()) {
    prefix_.pop_back();
    std::rotate(period_.rbegin(), period_.rbegin() + 1, period_.rend());
  }
}

Point Point::parse(std::string_view text, std::size_t degree) {
  auto open = text.find('(');
  if (open == std::string_view::npos || text.size() < open + 3 || text.back() != ')') {
    throw ParseError("point '" + std::string(text) + "' must look like u(v) with nonempty v");
  }
  Word prefix = parse_word(text.substr(0, open), degree);
  Word period = parse_word(text.substr(open + 1, text.size() - open - 2), degree);
  return Point(std::move(prefix), std::move(period));
}

Word Point::take(std::size_t n) const {
  Word w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = at(i);
  return w;
}

Point Point::drop(std::size_t n) const {
  if (n <= prefix_.size()) return Point(Word(prefix_.begin() + static_cast<long>(n), prefix_.end()), period_);
  std::size_t shift = (n - prefix_.size()) % period_.size();
  Word period(period_.size());
  for (std::size_t i = 0; i < period.size(); ++i) period[i] = period_[(shift + i) % period_.size()];
  return Point({}, std::move(period));
}

Point Point::prepend(const Word& w) const { return Point(concat(w, prefix_), period_); }

bool Point::starts_with(const Word& w) const {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (at(i) != w[i]) return false;
  }
  return true;
}

std::string Point::to_string() const {
  return selfsim::to_string(prefix_) + "(" + selfsim::to_string(period_) + ")";
}

Point apply_to_point(const AutomatonGroup& group, Aut g, const Point& x) {
  // Walk until (state, phase) repeats inside the periodic part; the output
  // between the two visits is the image's period.
  std::map<std::pair<Aut, std::size_t>, std::size_t> seen;
  Word out;
  Aut q = g;
  for (std::size_t i = 0;; ++i) {
    if (i >= x.prefix().size()) {
      auto [it, fresh] = seen.emplace(std::make_pair(q, x.phase(i)), i);
      if (!fresh) {
        std::size_t start = it->second;
        return Point(Word(out.begin(), out.begin() + static_cast<long>(start)),
                     Word(out.begin() + static_cast<long>(start), out.end()));
      }
    }
    Letter a = x.at(i);
    out.push_back(group.image(q, a));
    q = group.child(q, a);
  }
}

}  // namespace selfsim
