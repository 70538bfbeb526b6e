#include "selfsim/word.hpp"

#include "selfsim/errors.hpp"

namespace selfsim {

char letter_char(Letter x) {
  return x < 10 ? static_cast<char>('0' + x) : static_cast<char>('a' + (x - 10));
}

std::string to_string(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (Letter x : w) s.push_back(letter_char(x));
  return s;
}

Word parse_word(std::string_view text, std::size_t degree) {
  Word w;
  w.reserve(text.size());
  for (char c : text) {
    std::size_t x;
    if (c >= '0' && c <= '9') {
      x = static_cast<std::size_t>(c - '0');
    } else if (c >= 'a' && c <= 'z') {
      x = static_cast<std::size_t>(c - 'a') + 10;
    } else {
      throw ParseError("invalid letter '" + std::string(1, c) + "' in word '" + std::string(text) + "'");
    }
    if (x >= degree) {
      throw ParseError("letter '" + std::string(1, c) + "' out of range for alphabet of size " +
                       std::to_string(degree));
    }
    w.push_back(static_cast<Letter>(x));
  }
  return w;
}

}  // namespace selfsim
