#include "selfsim/linsolve.hpp"

#include <utility>

#include "selfsim/errors.hpp"

namespace selfsim {

namespace {

// Brings the augmented matrix to upper triangular form in place. Returns the
// sign of the row permutation, or 0 if singular.
int bareiss(IntegerMatrix& m, std::size_t n) {
  int sign = 1;
  Integer prev = 1;
  const std::size_t width = m.empty() ? 0 : m[0].size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (abs(m[i][k]) > abs(m[pivot][k])) pivot = i;
    }
    if (m[pivot][k] == 0) return 0;
    if (pivot != k) {
      std::swap(m[pivot], m[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < width; ++j) {
        m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) / prev;
      }
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  return sign;
}

}  // namespace

std::vector<Rational> solve_integer_system(IntegerMatrix a, std::vector<Integer> b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DomainError("right-hand side has the wrong length");
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw DomainError("matrix is not square");
    a[i].push_back(b[i]);
  }
  if (bareiss(a, n) == 0) throw SingularSystem("linear system is singular");
  std::vector<Rational> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational acc = a[i][n];
    for (std::size_t j = i + 1; j < n; ++j) acc -= Rational(a[i][j]) * x[j];
    x[i] = acc / Rational(a[i][i]);
  }
  return x;
}

Integer determinant(IntegerMatrix a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  int sign = bareiss(a, n);
  if (sign == 0) return 0;
  return sign * a[n - 1][n - 1];
}

}  // namespace selfsim
