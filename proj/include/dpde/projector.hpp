#pragma once

// Periodic Bochner projector onto spectra of quadrant-supported functions,
// in the spatial realization (indicator conjugated by the transform pair) and
// in the cotangent-kernel realization with a finite regularization eps.

#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dpde/errors.hpp"
#include "dpde/lattice.hpp"

namespace dpde {

enum class Realization { spatial, kernel_quadrature };

inline std::string to_string(Realization r) { return r == Realization::spatial ? "spatial" : "kernel_quadrature"; }

struct ProjectorConfig {
  Quadrant conv = Quadrant::closed;
  Realization realization = Realization::spatial;
  /// Imaginary shift of the cotangent arguments (kernel_quadrature only).
  double epsilon = 0.0;
  /// Fine-grid oversampling of the eta quadrature; 0 picks it from eps.
  int oversample = 0;
};

/// sum_{m >= 0} e^{-i m h z} h = h/2 - (ih/2) cot(hz/2), for Im z < 0.
inline cplx cotangent_line_sum(cplx z, const LatticeGrid& g) {
  if (!(z.imag() < 0.0)) throw std::domain_error("cotangent line sum needs Im z < 0");
  const double h = g.h();
  return h / (1.0 - std::exp(-I * h * z));
}

/// cot(w) for Im w < 0, evaluated without overflow.
inline cplx cot_lower(cplx w) {
  const cplx e = std::exp(-2.0 * I * w);  // |e| < 1 when Im w < 0
  return I * (1.0 + e) / (1.0 - e);
}

/// Warning text when eps is too small relative to the frequency spacing.
inline std::optional<std::string> conditioning_warning(const ProjectorConfig& cfg, const LatticeGrid& g) {
  if (cfg.realization != Realization::kernel_quadrature) return std::nullopt;
  if (cfg.epsilon < 1e-3 * g.dxi()) {
    std::ostringstream os;
    os << "kernel quadrature eps=" << cfg.epsilon << " is below 1e-3*dxi=" << 1e-3 * g.dxi()
       << "; the regularized kernel is ill-conditioned";
    return os.str();
  }
  return std::nullopt;
}

inline int quadrature_oversampling(const ProjectorConfig& cfg, const LatticeGrid& g) {
  if (cfg.oversample > 0) return cfg.oversample;
  // aliasing of the regularized kernel is exp(-P * 2N * h * eps); keep it below e^-40
  const double need = 40.0 / (g.size() * g.h() * cfg.epsilon);
  int p = 2;
  while (p < need) p *= 2;
  return p;
}

/// Quadrature weights of the two one-variable kernels against the lattice
/// exponentials: for each spatial index m,
///   constant[m] = (1/2pi) sum_delta e^{i x delta} d(delta),
///   cot[m]      = (1/2pi) sum_delta cot(h (delta - i eps)/2) e^{i x delta} d(delta),
/// with delta on a P-times oversampled grid over [-pi hbar, pi hbar).
struct LineKernelWeights {
  std::vector<cplx> constant;
  std::vector<cplx> cot;
};

inline LineKernelWeights line_kernel_weights(const LatticeGrid& g, double eps, int oversample) {
  const int fine = oversample * g.size();
  const double dd = 2.0 * pi * g.hbar() / fine;
  const double h = g.h();
  std::vector<cplx> cotv(static_cast<std::size_t>(fine));
  std::vector<double> delta(static_cast<std::size_t>(fine));
  for (int j = 0; j < fine; ++j) {
    delta[j] = (j - fine / 2) * dd;
    cotv[j] = cot_lower(0.5 * h * cplx{delta[j], -eps});
  }
  LineKernelWeights w{std::vector<cplx>(g.size()), std::vector<cplx>(g.size())};
  for (int m = g.first(); m <= g.last(); ++m) {
    const double x = g.point(m);
    cplx c{}, k{};
    for (int j = 0; j < fine; ++j) {
      const cplx e = std::exp(I * x * delta[j]);
      c += e;
      k += cotv[j] * e;
    }
    w.constant[g.slot(m)] = c * dd / (2.0 * pi);
    w.cot[g.slot(m)] = k * dd / (2.0 * pi);
  }
  return w;
}

/// The four summands of the kernel formula, each as a spectrum:
///   [0] constant term, [1] cotangent in xi1, [2] cotangent in xi2, [3] bi-cotangent.
/// Under the open convention only the bi-cotangent term is kept; the other three
/// vanish on functions that are zero on the coordinate axes.
inline std::vector<SpectrumFunction> kernel_terms(const SpectrumFunction& s, const ProjectorConfig& cfg) {
  const auto& g = s.grid();
  if (!(cfg.epsilon > 0.0)) throw PreconditionError("kernel quadrature needs eps > 0");
  const auto w = line_kernel_weights(g, cfg.epsilon, quadrature_oversampling(cfg, g));
  const double h = g.h();
  const cplx a = h / 2.0;         // constant part of the one-variable kernel
  const cplx b = -I * h / 2.0;    // cotangent coefficient
  const auto u = dft_inverse(s);
  auto term = [&](auto&& factor) {
    return dft_forward(GridFunction::sample(g, [&](int m1, int m2) { return factor(g.slot(m1), g.slot(m2)) * u(m1, m2); }));
  };
  std::vector<SpectrumFunction> out;
  if (cfg.conv == Quadrant::closed) {
    out.push_back(term([&](int i, int j) { return a * a * w.constant[i] * w.constant[j]; }));
    out.push_back(term([&](int i, int j) { return a * b * w.cot[i] * w.constant[j]; }));
    out.push_back(term([&](int i, int j) { return a * b * w.constant[i] * w.cot[j]; }));
  } else {
    for (int t = 0; t < 3; ++t) out.emplace_back(g);
  }
  out.push_back(term([&](int i, int j) { return b * b * w.cot[i] * w.cot[j]; }));
  for (const auto& t : out)
    for (auto v : t.values())
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalError("NaN in kernel quadrature");
  return out;
}

inline SpectrumFunction project_plus(const SpectrumFunction& s, const ProjectorConfig& cfg = {}) {
  if (cfg.realization == Realization::spatial) return dft_forward(restrict_quadrant(dft_inverse(s), cfg.conv));
  auto terms = kernel_terms(s, cfg);
  SpectrumFunction out = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) out += terms[i];
  return out;
}

/// Two-level extrapolation in eps: 2 B(eps/2) - B(eps) cancels the
/// first-order eps term of the regularized kernel.
inline SpectrumFunction project_plus_extrapolated(const SpectrumFunction& s, const ProjectorConfig& cfg) {
  ProjectorConfig half = cfg;
  half.epsilon = cfg.epsilon / 2.0;
  auto out = project_plus(s, half);
  out *= 2.0;
  out -= project_plus(s, cfg);
  return out;
}

inline SpectrumFunction project_minus(const SpectrumFunction& s, const ProjectorConfig& cfg = {}) {
  return s - project_plus(s, cfg);
}

/// Number of lattice points that belong both to the support region of the
/// plus summand and to the region hZ^2 \ K_d of the complement summand.
inline int direct_sum_overlap(const LatticeGrid& g, Quadrant q) {
  int n = 0;
  for (int a = g.first(); a <= g.last(); ++a)
    for (int b = g.first(); b <= g.last(); ++b)
      if (in_quadrant(a, b, q) && !in_quadrant(a, b, Quadrant::open)) ++n;
  return n;
}

struct ProjectorDiagnostics {
  Realization realization;
  double epsilon;
  int N;
  double idempotence_err;
  double agreement_err;
};

inline void write_projector_header(std::ostream& os) { os << "realization,epsilon,N,idempotence_err,agreement_err\n"; }

inline void write_projector_row(std::ostream& os, const ProjectorDiagnostics& d) {
  os << to_string(d.realization) << ',' << d.epsilon << ',' << d.N << ',' << d.idempotence_err << ','
     << d.agreement_err << '\n';
}

/// Relative l2 difference on frequency nodes (0 when both vanish).
inline double relative_error(const SpectrumFunction& x, const SpectrumFunction& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.values().size(); ++i) {
    num += std::norm(x.values()[i] - ref.values()[i]);
    den += std::norm(ref.values()[i]);
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

/// Idempotence of the chosen realization and agreement with the spatial one.
inline ProjectorDiagnostics projector_diagnostics(const SpectrumFunction& s, const ProjectorConfig& cfg) {
  const auto p = project_plus(s, cfg);
  const auto pp = project_plus(p, cfg);
  ProjectorConfig spatial = cfg;
  spatial.realization = Realization::spatial;
  return {cfg.realization, cfg.epsilon, s.grid().half(), relative_error(pp, p),
          relative_error(p, project_plus(s, spatial))};
}

}  // namespace dpde
