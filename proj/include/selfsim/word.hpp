#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace selfsim {

// Letters of an alphabet of size d are 0..d-1. Rendered as 0-9 then a-z, so
// alphabets up to 36 letters have single-character spellings.
using Letter = std::uint8_t;
using Word = std::vector<Letter>;

inline constexpr std::size_t kMaxDegree = 36;

char letter_char(Letter x);
std::string to_string(const Word& w);
Word parse_word(std::string_view text, std::size_t degree);

inline Word concat(Word a, const Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline bool is_prefix(const Word& prefix, const Word& w) {
  return prefix.size() <= w.size() && std::equal(prefix.begin(), prefix.end(), w.begin());
}

// Calls fn(w) for every word of the given length, in lexicographic order.
template <typename Fn>
void for_each_word(std::size_t degree, std::size_t length, Fn&& fn) {
  Word w(length, 0);
  while (true) {
    fn(static_cast<const Word&>(w));
    std::size_t i = length;
    while (i > 0 && w[i - 1] + 1u == degree) w[--i] = 0;
    if (i == 0) return;
    ++w[i - 1];
  }
}

}  // namespace selfsim
