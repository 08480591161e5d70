#pragma once

// Brute-force reference: the digital operator as a dense convolution matrix on
// a truncated quadrant window, solved by LU.

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "dpde/errors.hpp"
#include "dpde/lattice.hpp"
#include "dpde/symbols.hpp"

namespace dpde {

/// Unknowns and equations on {o..o+M-1}^2 with o = 0 (closed) or 1 (open),
/// ordered with m2 fastest.
struct DenseProblem {
  LatticeGrid grid;
  int M;
  Quadrant conv;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;

  int origin() const { return conv == Quadrant::closed ? 0 : 1; }
  int index(int m1, int m2) const { return (m1 - origin()) * M + (m2 - origin()); }
  bool contains(int m1, int m2) const {
    const int o = origin();
    return m1 >= o && m2 >= o && m1 < o + M && m2 < o + M;
  }
};

/// Largest kernel modulus at Chebyshev radius >= r, relative to the kernel max.
inline double kernel_tail(const GridFunction& k, int r) {
  const auto& g = k.grid();
  double tail = 0.0;
  for (int a = g.first(); a <= g.last(); ++a)
    for (int b = g.first(); b <= g.last(); ++b)
      if (std::max(std::abs(a), std::abs(b)) >= r) tail = std::max(tail, std::abs(k(a, b)));
  const double mx = k.max_abs();
  return mx == 0.0 ? 0.0 : tail / mx;
}

inline Eigen::VectorXcd window_vector(const GridFunction& u, const DenseProblem& p) {
  Eigen::VectorXcd x(p.M * p.M);
  for (int a = p.origin(); a < p.origin() + p.M; ++a)
    for (int b = p.origin(); b < p.origin() + p.M; ++b) x(p.index(a, b)) = u(a, b);
  return x;
}

inline GridFunction window_function(const Eigen::VectorXcd& x, const DenseProblem& p) {
  GridFunction u(p.grid);
  for (int a = p.origin(); a < p.origin() + p.M; ++a)
    for (int b = p.origin(); b < p.origin() + p.M; ++b) u(a, b) = x(p.index(a, b));
  return u;
}

/// Entries h^2 K(x - y) with K the inverse transform of the symbol.
inline DenseProblem assemble_dense(const PeriodicSymbol& sym, int M, Quadrant conv = Quadrant::closed,
                                   const GridFunction* rhs = nullptr) {
  const auto& g = sym.grid();
  if (M < 1 || M > g.half() / 2) {
    std::ostringstream os;
    os << "dense window M = " << M << " must lie in [1, N/2] with N = " << g.half();
    throw PreconditionError(os.str());
  }
  const auto k = dft_inverse(sym.values());
  const double tail = kernel_tail(k, M);
  if (tail > 1e-8) {
    std::ostringstream os;
    os << "kernel tail " << tail << " at radius " << M << " exceeds 1e-8; enlarge N or shrink M";
    throw PreconditionError(os.str());
  }
  DenseProblem p{g, M, conv, Eigen::MatrixXcd(M * M, M * M), Eigen::VectorXcd::Zero(M * M)};
  const double h2 = g.h() * g.h();
  const int o = p.origin();
  for (int a = o; a < o + M; ++a)
    for (int b = o; b < o + M; ++b)
      for (int c = o; c < o + M; ++c)
        for (int d = o; d < o + M; ++d) p.matrix(p.index(a, b), p.index(c, d)) = h2 * k(a - c, b - d);
  if (rhs) {
    require_same_grid(rhs->grid(), g);
    p.rhs = window_vector(*rhs, p);
  }
  return p;
}

struct DenseSolution {
  GridFunction u;
  double cond;
  double residual;
};

inline DenseSolution dense_solve(const DenseProblem& p) {
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(p.matrix);
  const double rc = lu.rcond();
  const double cond = rc > 0.0 ? 1.0 / rc : INFINITY;
  if (!(cond <= 1e12)) throw NumericalError("dense matrix is singular or ill-conditioned: cond ~ " + std::to_string(cond));
  const Eigen::VectorXcd x = lu.solve(p.rhs);
  const double rn = p.rhs.norm();
  const double res = (p.matrix * x - p.rhs).norm() / (rn == 0.0 ? 1.0 : rn);
  if (!(res <= 1e-10)) throw NumericalError("dense solve residual " + std::to_string(res) + " exceeds 1e-10");
  return {window_function(x, p), cond, res};
}

/// max |a - b| over the first M/2 x M/2 points of the window, relative to max |b| there.
inline double interior_error(const GridFunction& a, const GridFunction& b, const DenseProblem& p) {
  const int o = p.origin();
  double num = 0.0, den = 0.0;
  for (int m1 = o; m1 < o + p.M / 2; ++m1)
    for (int m2 = o; m2 < o + p.M / 2; ++m2) {
      num = std::max(num, std::abs(a(m1, m2) - b(m1, m2)));
      den = std::max(den, std::abs(b(m1, m2)));
    }
  return den == 0.0 ? num : num / den;
}

struct OracleRow {
  int M;
  int N;
  double h;
  std::string symbol;
  double interior_err;
  double cond;
};

inline void write_oracle_header(std::ostream& os) { os << "M,N,h,symbol,interior_err,cond\n"; }

inline void write_oracle_row(std::ostream& os, const OracleRow& r) {
  os << r.M << ',' << r.N << ',' << r.h << ",\"" << r.symbol << "\"," << r.interior_err << ',' << r.cond << '\n';
}

}  // namespace dpde
