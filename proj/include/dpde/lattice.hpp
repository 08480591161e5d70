#pragma once

// Lattice substrate: the cyclic 2N x 2N window over hZ^2, its dual frequency
// grid over hbar*T^2, the discrete Fourier pair, divided differences and the
// quadrant indicators.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpde {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Whether the quadrant indicator includes the coordinate axes.
enum class Quadrant { closed, open };

inline std::string to_string(Quadrant q) { return q == Quadrant::closed ? "closed" : "open"; }

inline Quadrant quadrant_from_string(const std::string& s) {
  if (s == "closed") return Quadrant::closed;
  if (s == "open") return Quadrant::open;
  throw std::invalid_argument("unknown quadrant convention: " + s);
}

/// Lattice step h and half-window N. Spatial indices and frequency indices
/// both run over {-N, ..., N-1}; x = m h, xi = (pi hbar / N) k.
class LatticeGrid {
 public:
  LatticeGrid(double h, int half_window) : h_(h), n_(half_window) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("lattice step must be positive");
    if (half_window < 2 || (half_window & (half_window - 1)) != 0)
      throw std::invalid_argument("half-window N must be a power of two >= 2");
  }

  double h() const { return h_; }
  double hbar() const { return 1.0 / h_; }
  int half() const { return n_; }
  int size() const { return 2 * n_; }
  int first() const { return -n_; }
  int last() const { return n_ - 1; }
  double dxi() const { return pi / (h_ * n_); }
  double point(int m) const { return m * h_; }
  double freq(int k) const { return dxi() * k; }
  int slot(int m) const { return m + n_; }
  bool contains(int m) const { return m >= -n_ && m < n_; }
  /// Cyclic reduction of an arbitrary integer index into the window.
  int wrap(int m) const {
    const int l = size();
    return ((m + n_) % l + l) % l - n_;
  }

  friend bool operator==(const LatticeGrid& a, const LatticeGrid& b) {
    return a.h_ == b.h_ && a.n_ == b.n_;
  }

 private:
  double h_;
  int n_;
};

inline void require_same_grid(const LatticeGrid& a, const LatticeGrid& b) {
  if (!(a == b)) throw std::invalid_argument("grid mismatch");
}

struct SpatialTag {};
struct FrequencyTag {};

/// Complex samples on the (2N)^2 window, addressed by signed lattice indices.
/// Tag distinguishes spatial samples from frequency samples.
template <class Tag>
class LatticeArray {
 public:
  explicit LatticeArray(LatticeGrid grid)
      : grid_(grid), data_(static_cast<std::size_t>(grid.size()) * grid.size()) {}

  template <class F>
  static LatticeArray sample(LatticeGrid grid, F&& fn) {
    LatticeArray out(grid);
    for (int a = grid.first(); a <= grid.last(); ++a)
      for (int b = grid.first(); b <= grid.last(); ++b) out(a, b) = fn(a, b);
    return out;
  }

  const LatticeGrid& grid() const { return grid_; }
  cplx& operator()(int m1, int m2) { return data_[offset(m1, m2)]; }
  const cplx& operator()(int m1, int m2) const { return data_[offset(m1, m2)]; }
  std::span<cplx> values() { return data_; }
  std::span<const cplx> values() const { return data_; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double l2() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  LatticeArray& operator+=(const LatticeArray& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  LatticeArray& operator-=(const LatticeArray& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  LatticeArray& operator*=(cplx a) {
    for (auto& v : data_) v *= a;
    return *this;
  }
  /// Pointwise product (multiplier application on the frequency side).
  LatticeArray& operator*=(const LatticeArray& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] *= o.data_[i];
    return *this;
  }
  LatticeArray& operator/=(const LatticeArray& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] /= o.data_[i];
    return *this;
  }

  friend LatticeArray operator+(LatticeArray a, const LatticeArray& b) { return a += b; }
  friend LatticeArray operator-(LatticeArray a, const LatticeArray& b) { return a -= b; }
  friend LatticeArray operator*(LatticeArray a, const LatticeArray& b) { return a *= b; }
  friend LatticeArray operator/(LatticeArray a, const LatticeArray& b) { return a /= b; }
  friend LatticeArray operator*(cplx s, LatticeArray a) { return a *= s; }

 private:
  std::size_t offset(int m1, int m2) const {
    return static_cast<std::size_t>(grid_.slot(m1)) * grid_.size() + grid_.slot(m2);
  }

  LatticeGrid grid_;
  std::vector<cplx> data_;
};

using GridFunction = LatticeArray<SpatialTag>;
using SpectrumFunction = LatticeArray<FrequencyTag>;

/// One-dimensional counterpart, used for boundary data and layer functions.
template <class Tag>
class LineArray {
 public:
  explicit LineArray(LatticeGrid grid) : grid_(grid), data_(static_cast<std::size_t>(grid.size())) {}

  template <class F>
  static LineArray sample(LatticeGrid grid, F&& fn) {
    LineArray out(grid);
    for (int a = grid.first(); a <= grid.last(); ++a) out(a) = fn(a);
    return out;
  }

  const LatticeGrid& grid() const { return grid_; }
  cplx& operator()(int m) { return data_[static_cast<std::size_t>(grid_.slot(m))]; }
  const cplx& operator()(int m) const { return data_[static_cast<std::size_t>(grid_.slot(m))]; }
  std::span<cplx> values() { return data_; }
  std::span<const cplx> values() const { return data_; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  LineArray& operator+=(const LineArray& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  LineArray& operator-=(const LineArray& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  LineArray& operator*=(cplx a) {
    for (auto& v : data_) v *= a;
    return *this;
  }
  friend LineArray operator+(LineArray a, const LineArray& b) { return a += b; }
  friend LineArray operator-(LineArray a, const LineArray& b) { return a -= b; }
  friend LineArray operator*(cplx s, LineArray a) { return a *= s; }

 private:
  LatticeGrid grid_;
  std::vector<cplx> data_;
};

using LineFunction = LineArray<SpatialTag>;
using LineSpectrum = LineArray<FrequencyTag>;

namespace detail {

// FFTW works on natural order j = m mod 2N; with a window of exactly 2N the
// centered <-> natural permutation is the half-roll, an involution.
inline void half_roll_2d(std::span<const cplx> in, std::span<cplx> out, int n) {
  const int l = 2 * n;
  for (int i1 = 0; i1 < l; ++i1) {
    const int j1 = (i1 + n) % l;
    for (int i2 = 0; i2 < l; ++i2) out[static_cast<std::size_t>(j1) * l + (i2 + n) % l] = in[static_cast<std::size_t>(i1) * l + i2];
  }
}

inline void half_roll_1d(std::span<const cplx> in, std::span<cplx> out, int n) {
  const int l = 2 * n;
  for (int i = 0; i < l; ++i) out[static_cast<std::size_t>((i + n) % l)] = in[static_cast<std::size_t>(i)];
}

inline void fft_inplace(std::vector<cplx>& buf, int rank, int l, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan plan = rank == 2 ? fftw_plan_dft_2d(l, l, p, p, sign, FFTW_ESTIMATE)
                             : fftw_plan_dft_1d(l, p, p, sign, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

template <class To, class From>
To transform_2d(const From& in, int sign, double scale) {
  const auto& g = in.grid();
  std::vector<cplx> buf(in.values().size());
  half_roll_2d(in.values(), buf, g.half());
  fft_inplace(buf, 2, g.size(), sign);
  To out(g);
  half_roll_2d(buf, out.values(), g.half());
  for (auto& v : out.values()) v *= scale;
  return out;
}

template <class To, class From>
To transform_1d(const From& in, int sign, double scale) {
  const auto& g = in.grid();
  std::vector<cplx> buf(in.values().size());
  half_roll_1d(in.values(), buf, g.half());
  fft_inplace(buf, 1, g.size(), sign);
  To out(g);
  half_roll_1d(buf, out.values(), g.half());
  for (auto& v : out.values()) v *= scale;
  return out;
}

}  // namespace detail

/// u~(xi) = sum_x e^{-i x.xi} u(x) h^2 at every frequency node.
inline SpectrumFunction dft_forward(const GridFunction& u) {
  const double h = u.grid().h();
  return detail::transform_2d<SpectrumFunction>(u, FFTW_FORWARD, h * h);
}

/// u(x) = (2 pi)^-2 sum_xi e^{i x.xi} u~(xi) (dxi)^2, the exact inverse on the cyclic window.
inline GridFunction dft_inverse(const SpectrumFunction& s) {
  const double h = s.grid().h();
  const double l = s.grid().size();
  return detail::transform_2d<GridFunction>(s, FFTW_BACKWARD, 1.0 / (h * h * l * l));
}

inline LineSpectrum dft_forward(const LineFunction& c) {
  return detail::transform_1d<LineSpectrum>(c, FFTW_FORWARD, c.grid().h());
}

inline LineFunction dft_inverse(const LineSpectrum& s) {
  const double l = s.grid().size();
  return detail::transform_1d<LineFunction>(s, FFTW_BACKWARD, 1.0 / (s.grid().h() * l));
}

/// zeta_k = hbar (e^{-i h xi_k} - 1); symbol of the lagging difference, plus-type.
inline cplx zeta(double h, double xi) { return (std::exp(-I * (h * xi)) - 1.0) / h; }

/// hbar (e^{+i h xi_k} - 1); symbol of the forward difference, minus-type.
inline cplx eta(double h, double xi) { return (std::exp(I * (h * xi)) - 1.0) / h; }

/// Impulse of unit mass at lattice point (m1, m2): value h^-2 there, zero elsewhere.
inline GridFunction unit_impulse(const LatticeGrid& g, int m1 = 0, int m2 = 0) {
  GridFunction u(g);
  u(m1, m2) = 1.0 / (g.h() * g.h());
  return u;
}

/// Forward divided difference of order 1 or 2 along axis 1 or 2, cyclic at the
/// window edge: h^-1(u(x + h e) - u(x)) and its iterate.
inline GridFunction divided_difference(const GridFunction& u, int axis, int order) {
  if (axis != 1 && axis != 2) throw std::invalid_argument("axis must be 1 or 2");
  if (order != 1 && order != 2) throw std::invalid_argument("order must be 1 or 2");
  const auto& g = u.grid();
  const double hb = g.hbar();
  auto at = [&](int a, int b, int shift) {
    return axis == 1 ? u(g.wrap(a + shift), b) : u(a, g.wrap(b + shift));
  };
  return GridFunction::sample(g, [&](int a, int b) {
    if (order == 1) return hb * (at(a, b, 1) - at(a, b, 0));
    return hb * hb * (at(a, b, 2) - 2.0 * at(a, b, 1) + at(a, b, 0));
  });
}

/// Sum of the two forward second differences.
inline GridFunction discrete_laplacian(const GridFunction& u) {
  return divided_difference(u, 1, 2) + divided_difference(u, 2, 2);
}

inline bool in_quadrant(int m1, int m2, Quadrant q) {
  return q == Quadrant::closed ? (m1 >= 0 && m2 >= 0) : (m1 > 0 && m2 > 0);
}

inline bool in_minus_quadrant(int m1, int m2, Quadrant q) { return in_quadrant(-m1, -m2, q); }

/// Pointwise product with the quadrant indicator; idempotent.
inline GridFunction restrict_quadrant(const GridFunction& u, Quadrant q) {
  return GridFunction::sample(u.grid(), [&](int a, int b) { return in_quadrant(a, b, q) ? u(a, b) : cplx{}; });
}

/// Largest modulus outside the quadrant.
inline double exterior_max(const GridFunction& u, Quadrant q) {
  double m = 0.0;
  const auto& g = u.grid();
  for (int a = g.first(); a <= g.last(); ++a)
    for (int b = g.first(); b <= g.last(); ++b)
      if (!in_quadrant(a, b, q)) m = std::max(m, std::abs(u(a, b)));
  return m;
}

/// Max modulus on the outermost index ring; large values indicate wrap-around.
inline double edge_max(const GridFunction& u) {
  const auto& g = u.grid();
  double m = 0.0;
  for (int a = g.first(); a <= g.last(); ++a) {
    m = std::max({m, std::abs(u(a, g.first())), std::abs(u(a, g.last())), std::abs(u(g.first(), a)),
                  std::abs(u(g.last(), a))});
  }
  return m;
}

/// edge_max relative to the global max (0 for the zero function).
inline double decay_diagnostic(const GridFunction& u) {
  const double mx = u.max_abs();
  return mx == 0.0 ? 0.0 : edge_max(u) / mx;
}

inline double decay_diagnostic(const LineFunction& c) {
  const double mx = c.max_abs();
  if (mx == 0.0) return 0.0;
  const auto& g = c.grid();
  return std::max(std::abs(c(g.first())), std::abs(c(g.last()))) / mx;
}

// --- grid dumps ------------------------------------------------------------

inline void write_csv(std::ostream& os, const GridFunction& u) {
  os << "m1,m2,re,im\n" << std::setprecision(17);
  const auto& g = u.grid();
  for (int a = g.first(); a <= g.last(); ++a)
    for (int b = g.first(); b <= g.last(); ++b) os << a << ',' << b << ',' << u(a, b).real() << ',' << u(a, b).imag() << '\n';
}

inline void write_csv(std::ostream& os, const SpectrumFunction& s) {
  os << "k1,k2,re,im\n" << std::setprecision(17);
  const auto& g = s.grid();
  for (int a = g.first(); a <= g.last(); ++a)
    for (int b = g.first(); b <= g.last(); ++b) os << a << ',' << b << ',' << s(a, b).real() << ',' << s(a, b).imag() << '\n';
}

/// Sidecar for a grid dump: one `key = value` per line.
inline void write_metadata(std::ostream& os, const LatticeGrid& g, Quadrant q) {
  os << std::setprecision(17) << "h = " << g.h() << "\nN = " << g.half() << "\nconvention = " << to_string(q) << '\n';
}

}  // namespace dpde
