#pragma once

#include <vector>

#include "selfsim/rational.hpp"

namespace selfsim {

using IntegerMatrix = std::vector<std::vector<Integer>>;

// Solves A x = b for square integer A by fraction-free (Bareiss)
// elimination, pivoting on the entry of largest magnitude; back substitution
// is done over the rationals. Throws SingularSystem when det A = 0.
std::vector<Rational> solve_integer_system(IntegerMatrix a, std::vector<Integer> b);

// det A via the same elimination.
Integer determinant(IntegerMatrix a);

}  // namespace selfsim
