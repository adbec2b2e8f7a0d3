#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vclose/word.hpp"

namespace vclose {

// Image of a word in Z^r: one signed exponent sum per generator.
using ExponentVector = std::vector<long long>;

ExponentVector exponent_vector(const Word& w);

long long gcd_of(const ExponentVector& v);

// A vector is primitive iff it extends to a basis of Z^r, iff the gcd of
// its entries is 1.  The zero vector is not primitive (gcd 0).
bool is_primitive(const ExponentVector& v);

// Dense integer matrix, row major.  Small: everything here is desk scale.
struct IntMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<long long> a;

  IntMatrix() = default;
  IntMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0) {}

  long long& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  long long at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  bool operator==(const IntMatrix&) const = default;
};

IntMatrix identity_matrix(int n);
IntMatrix matmul(const IntMatrix& x, const IntMatrix& y);

// U * m * V = diag(d_1..d_k) with d_i >= 0 and d_i | d_{i+1}; U, V unimodular.
struct SmithResult {
  std::vector<long long> invariant_factors;  // length min(rows, cols)
  IntMatrix u;                               // rows x rows
  IntMatrix v;                               // cols x cols
};
SmithResult smith_normal_form(const IntMatrix& m);

// Row-style Hermite basis of the lattice spanned by the rows of m: returns a
// matrix whose nonzero rows form a triangular Z-basis of that lattice.
IntMatrix hermite_row_basis(const IntMatrix& m);

// Solves x * A = b over the integers (x a row vector).  Empty optional if no
// integral solution exists.
std::optional<std::vector<long long>> solve_row_system(const IntMatrix& a,
                                                       std::span<const long long> b);

// Abelianised retract obstruction.  PASSES iff there is an integer r x r
// matrix M whose rows all lie in the lattice L spanned by h_vectors and with
// v * M = v for every v in h_vectors (vectors act as rows).  A retraction
// onto H abelianises to such an M, so OBSTRUCTED is a sound "not a retract".
//
// Special case: a non-empty list of all-zero vectors means H is a nontrivial
// subgroup of the derived subgroup, and no such subgroup is a retract (its
// image would have to be fixed in every lower-central quotient while the
// induced map vanishes), so that is OBSTRUCTED as well.
enum class Obstruction { Passes, Obstructed };

struct ObstructionResult {
  Obstruction verdict;
  std::optional<IntMatrix> witness;  // the M above, when PASSES nontrivially
  std::string reason;                // human-readable note for OBSTRUCTED
};

ObstructionResult abelian_retract_obstruction(std::span<const ExponentVector> h_vectors,
                                              int rank);

}  // namespace vclose
