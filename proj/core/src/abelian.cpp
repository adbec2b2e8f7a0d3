#include "vclose/abelian.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "vclose/errors.hpp"

namespace vclose {

ExponentVector exponent_vector(const Word& w) {
  ExponentVector v(static_cast<std::size_t>(w.rank()), 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    Letter l = w.letter(i);
    v[std::abs(static_cast<int>(l)) - 1] += l > 0 ? 1 : -1;
  }
  return v;
}

long long gcd_of(const ExponentVector& v) {
  long long g = 0;
  for (long long x : v) g = std::gcd(g, x);
  return g;
}

bool is_primitive(const ExponentVector& v) { return gcd_of(v) == 1; }

IntMatrix identity_matrix(int n) {
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix matmul(const IntMatrix& x, const IntMatrix& y) {
  IntMatrix out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      long long xv = x.at(i, k);
      if (xv == 0) continue;
      for (int j = 0; j < y.cols; ++j) out.at(i, j) += xv * y.at(k, j);
    }
  return out;
}

namespace {

// Elementary row/column operations applied to m and mirrored into u (rows)
// or v (columns) so that u * original * v == m stays invariant.
struct SnfWork {
  IntMatrix m, u, v;

  void swap_rows(int i, int j) {
    for (int c = 0; c < m.cols; ++c) std::swap(m.at(i, c), m.at(j, c));
    for (int c = 0; c < u.cols; ++c) std::swap(u.at(i, c), u.at(j, c));
  }
  void swap_cols(int i, int j) {
    for (int r = 0; r < m.rows; ++r) std::swap(m.at(r, i), m.at(r, j));
    for (int r = 0; r < v.rows; ++r) std::swap(v.at(r, i), v.at(r, j));
  }
  void add_row(int dst, int src, long long f) {  // row dst += f * row src
    for (int c = 0; c < m.cols; ++c) m.at(dst, c) += f * m.at(src, c);
    for (int c = 0; c < u.cols; ++c) u.at(dst, c) += f * u.at(src, c);
  }
  void add_col(int dst, int src, long long f) {  // col dst += f * col src
    for (int r = 0; r < m.rows; ++r) m.at(r, dst) += f * m.at(r, src);
    for (int r = 0; r < v.rows; ++r) v.at(r, dst) += f * v.at(r, src);
  }
  void negate_row(int i) {
    for (int c = 0; c < m.cols; ++c) m.at(i, c) = -m.at(i, c);
    for (int c = 0; c < u.cols; ++c) u.at(i, c) = -u.at(i, c);
  }
};

}  // namespace

SmithResult smith_normal_form(const IntMatrix& input) {
  SnfWork w{input, identity_matrix(input.rows), identity_matrix(input.cols)};
  int n = std::min(input.rows, input.cols);

  for (int t = 0; t < n; ++t) {
    // Locate the entry of smallest nonzero magnitude in the trailing block.
    int pi = -1, pj = -1;
    for (int i = t; i < w.m.rows; ++i)
      for (int j = t; j < w.m.cols; ++j)
        if (w.m.at(i, j) != 0 &&
            (pi < 0 || std::abs(w.m.at(i, j)) < std::abs(w.m.at(pi, pj)))) {
          pi = i;
          pj = j;
        }
    if (pi < 0) break;  // trailing block is zero
    w.swap_rows(t, pi);
    w.swap_cols(t, pj);

    for (;;) {
      bool dirty = false;
      for (int i = t + 1; i < w.m.rows; ++i) {
        if (w.m.at(i, t) == 0) continue;
        long long q = w.m.at(i, t) / w.m.at(t, t);
        w.add_row(i, t, -q);
        if (w.m.at(i, t) != 0) {  // remainder smaller than pivot: swap up
          w.swap_rows(t, i);
          dirty = true;
        }
      }
      for (int j = t + 1; j < w.m.cols; ++j) {
        if (w.m.at(t, j) == 0) continue;
        long long q = w.m.at(t, j) / w.m.at(t, t);
        w.add_col(j, t, -q);
        if (w.m.at(t, j) != 0) {
          w.swap_cols(t, j);
          dirty = true;
        }
      }
      if (!dirty) break;
    }
    if (w.m.at(t, t) < 0) w.negate_row(t);

    // Divisibility: fold any non-multiple into the pivot and redo this step.
    bool redo = false;
    for (int i = t + 1; i < w.m.rows && !redo; ++i)
      for (int j = t + 1; j < w.m.cols && !redo; ++j)
        if (w.m.at(i, j) % w.m.at(t, t) != 0) {
          w.add_row(t, i, 1);
          redo = true;
        }
    if (redo) --t;
  }

  SmithResult out;
  out.invariant_factors.resize(n);
  for (int i = 0; i < n; ++i) out.invariant_factors[i] = w.m.at(i, i);
  out.u = std::move(w.u);
  out.v = std::move(w.v);
  return out;
}

IntMatrix hermite_row_basis(const IntMatrix& input) {
  IntMatrix m = input;
  int row = 0;
  for (int col = 0; col < m.cols && row < m.rows; ++col) {
    // Euclid on the column below `row`.
    for (;;) {
      int p = -1;
      for (int i = row; i < m.rows; ++i)
        if (m.at(i, col) != 0 && (p < 0 || std::abs(m.at(i, col)) < std::abs(m.at(p, col))))
          p = i;
      if (p < 0) break;
      for (int c = 0; c < m.cols; ++c) std::swap(m.at(row, c), m.at(p, c));
      bool clean = true;
      for (int i = row + 1; i < m.rows; ++i) {
        if (m.at(i, col) == 0) continue;
        long long q = m.at(i, col) / m.at(row, col);
        for (int c = 0; c < m.cols; ++c) m.at(i, c) -= q * m.at(row, c);
        if (m.at(i, col) != 0) clean = false;
      }
      if (clean) break;
    }
    if (m.at(row, col) != 0) {
      if (m.at(row, col) < 0)
        for (int c = 0; c < m.cols; ++c) m.at(row, c) = -m.at(row, c);
      ++row;
    }
  }
  m.rows = row;  // keep only the nonzero rows
  m.a.resize(static_cast<std::size_t>(row) * m.cols);
  return m;
}

std::optional<std::vector<long long>> solve_row_system(const IntMatrix& a,
                                                       std::span<const long long> b) {
  // x * A = b  <=>  A^T * x^T = b^T; solve with Smith on A^T.
  IntMatrix at(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) at.at(j, i) = a.at(i, j);
  SmithResult s = smith_normal_form(at);
  // at = U^-1 D V^-1, so at * x = b  <=>  D (V^-1 x) = U b.
  std::vector<long long> ub(static_cast<std::size_t>(at.rows), 0);
  for (int i = 0; i < at.rows; ++i)
    for (int j = 0; j < at.rows; ++j)
      if (j < static_cast<int>(b.size())) ub[i] += s.u.at(i, j) * b[j];
  std::vector<long long> y(static_cast<std::size_t>(at.cols), 0);
  int n = static_cast<int>(s.invariant_factors.size());
  for (int i = 0; i < at.rows; ++i) {
    long long d = i < n ? s.invariant_factors[i] : 0;
    if (d == 0) {
      if (ub[i] != 0) return std::nullopt;
    } else {
      if (ub[i] % d != 0) return std::nullopt;
      if (i < at.cols) y[i] = ub[i] / d;
    }
  }
  std::vector<long long> x(static_cast<std::size_t>(at.cols), 0);
  for (int i = 0; i < at.cols; ++i)
    for (int j = 0; j < at.cols; ++j) x[i] += s.v.at(i, j) * y[j];
  return x;
}

ObstructionResult abelian_retract_obstruction(std::span<const ExponentVector> h_vectors,
                                              int rank) {
  for (const auto& v : h_vectors)
    if (static_cast<int>(v.size()) != rank)
      throw AlphabetMismatch("obstruction: vector length does not match rank");

  ObstructionResult out;
  if (h_vectors.empty()) {  // trivial subgroup: the identity retraction
    out.verdict = Obstruction::Passes;
    return out;
  }

  bool all_zero = true;
  for (const auto& v : h_vectors)
    for (long long x : v)
      if (x != 0) all_zero = false;
  if (all_zero) {
    out.verdict = Obstruction::Obstructed;
    out.reason =
        "all generator images vanish in Z^r: a nontrivial subgroup of the "
        "derived subgroup is never a retract";
    return out;
  }

  IntMatrix stacked(static_cast<int>(h_vectors.size()), rank);
  for (int i = 0; i < stacked.rows; ++i)
    for (int j = 0; j < rank; ++j) stacked.at(i, j) = h_vectors[i][j];
  IntMatrix basis = hermite_row_basis(stacked);  // k x rank, rows span L
  int k = basis.rows;

  // M = C * basis with C an unknown integer rank x k matrix; the fixed-point
  // conditions v * M = v become one linear system in the entries of C.
  int unknowns = rank * k;
  int eqs = static_cast<int>(h_vectors.size()) * rank;
  IntMatrix a(unknowns, eqs);  // row-vector convention: x * a = b
  std::vector<long long> b(static_cast<std::size_t>(eqs), 0);
  for (int t = 0; t < static_cast<int>(h_vectors.size()); ++t) {
    const ExponentVector& v = h_vectors[t];
    for (int j = 0; j < rank; ++j) {
      int eq = t * rank + j;
      b[eq] = v[j];
      for (int i = 0; i < rank; ++i)
        for (int l = 0; l < k; ++l)
          a.at(i * k + l, eq) = v[i] * basis.at(l, j);
    }
  }
  auto c = solve_row_system(a, b);
  if (!c) {
    out.verdict = Obstruction::Obstructed;
    out.reason =
        "no integer matrix with rows in the generator-image lattice fixes "
        "every generator image";
    return out;
  }
  IntMatrix cm(rank, k);
  for (int i = 0; i < rank; ++i)
    for (int l = 0; l < k; ++l) cm.at(i, l) = (*c)[static_cast<std::size_t>(i) * k + l];
  out.verdict = Obstruction::Passes;
  out.witness = matmul(cm, basis);
  return out;
}

}  // namespace vclose
