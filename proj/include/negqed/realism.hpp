#ifndef NEGQED_REALISM_HPP
#define NEGQED_REALISM_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "layered_green.hpp"
#include "material.hpp"
#include "quadrature.hpp"
#include "rates.hpp"

namespace negqed {

// ---------------------------------------------------------------------------
// Absorption

struct AbsorptionCurve {
  double d = 0.0;
  std::vector<double> n_imag;
  std::vector<double> value;  // NaN where `errors` is non-empty
  std::vector<std::string> errors;
};

/// Slab with n = -1 + i n_imag, impedance matched (eps = mu = n).
inline MaterialSpec absorbing_lhm(double n_imag) {
  if (!(n_imag >= 0.0)) throw InputError("absorption n_I must be >= 0");
  return MaterialSpec::matched_index({-1.0, n_imag});
}

/// Sweeps default to propagating modes only: the attenuation of the imaged
/// rays. Near a lossy eps = mu = -1 surface the evanescent window adds
/// near-field quenching that grows like 1/n_I; pass EvanescentMode::Always to
/// include it.
inline QuadratureConfig absorption_config() {
  QuadratureConfig cfg;
  cfg.evanescent = EvanescentMode::Never;
  return cfg;
}

namespace detail {

template <typename Eval>
std::vector<AbsorptionCurve> absorption_sweep(const std::vector<double>& d_list,
                                              const std::vector<double>& n_imag_grid,
                                              Eval&& eval) {
  std::vector<AbsorptionCurve> out;
  for (double d : d_list) {
    AbsorptionCurve c;
    c.d = d;
    for (double ni : n_imag_grid) {
      c.n_imag.push_back(ni);
      try {
        c.value.push_back(eval(d, ni));
        c.errors.emplace_back();
      } catch (const std::exception& e) {
        c.value.push_back(std::nan(""));
        c.errors.emplace_back(e.what());
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace detail

/// Gamma_par / Gamma0 at the focus (z = d) of an absorbing LHM on a mirror.
inline double absorbing_mirror_rate(double d, double n_imag, const QuadratureConfig& cfg = absorption_config()) {
  return single_atom_rate(mirror_stack(d, absorbing_lhm(n_imag)), {{0.0, 0.0, d}, kAxisX}, cfg);
}

/// Gamma12 / Gamma11 of a symmetric focal pair (gaps d/2) across an absorbing
/// LHM lens, x-oriented dipoles.
inline double absorbing_lens_ratio(double d, double n_imag, const QuadratureConfig& cfg = absorption_config()) {
  const auto stack = lens_stack(d, absorbing_lhm(n_imag));
  const auto [r1, r2] = focal_pair(d, 0.5 * d);
  const Dipole a{r1, kAxisX}, b{r2, kAxisX};
  return cross_rate(stack, a, b, cfg) / single_atom_rate(stack, a, cfg);
}

inline std::vector<AbsorptionCurve> absorption_sweep_mirror(const std::vector<double>& d_list,
                                                            const std::vector<double>& n_imag_grid,
                                                            const QuadratureConfig& cfg = absorption_config()) {
  return detail::absorption_sweep(
      d_list, n_imag_grid, [&](double d, double ni) { return absorbing_mirror_rate(d, ni, cfg); });
}

inline std::vector<AbsorptionCurve> absorption_sweep_lens(const std::vector<double>& d_list,
                                                          const std::vector<double>& n_imag_grid,
                                                          const QuadratureConfig& cfg = absorption_config()) {
  return detail::absorption_sweep(
      d_list, n_imag_grid, [&](double d, double ni) { return absorbing_lens_ratio(d, ni, cfg); });
}

enum class AbsorptionSystem { Mirror, Lens };

struct AttenuationFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through log(G12/G11) (lens) or log(1 - G_par/G0)
/// (mirror) against n_I k0 d, over points with 0 < n_I k0 d <= x_max.
inline AttenuationFit fit_attenuation(const AbsorptionCurve& curve, AbsorptionSystem system,
                                      double x_max = 0.5, double k0 = 1.0) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < curve.n_imag.size(); ++i) {
    const double x = curve.n_imag[i] * k0 * curve.d;
    const double v = system == AbsorptionSystem::Lens ? curve.value[i] : 1.0 - curve.value[i];
    if (x > 0.0 && x <= x_max && v > 0.0 && std::isfinite(v)) {
      xs.push_back(x);
      ys.push_back(std::log(v));
    }
  }
  AttenuationFit f;
  f.points = xs.size();
  if (f.points < 3) throw InputError("fit_attenuation: need >= 3 points with 0 < n_I k0 d <= x_max");
  const double n = static_cast<double>(f.points);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

// ---------------------------------------------------------------------------
// Finite transverse aperture (ray-optics estimate, d >> lambda)

enum class MirrorExtent { Infinite, SameAsSlab };

struct ApertureGeometry {
  double a = 0.0;  // transverse radius
  double d = 1.0;  // slab thickness
  MirrorExtent mirror_extent = MirrorExtent::SameAsSlab;

  void validate() const {
    if (!(a >= 0.0)) throw InputError("aperture radius a must be >= 0");
    if (!(d > 0.0)) throw InputError("slab thickness d must be > 0");
  }
};

struct ApertureResult {
  double value = 0.0;
  double cutoff_k_perp = 0.0;  // in units of k
  bool ray_optics_regime = true;
  std::string warning;
};

namespace detail {

inline constexpr double kRayOpticsMinThickness = 3.0 * 2.0 * std::numbers::pi;  // 3 lambda at k = 1

inline double cutoff_angle(double a, double d, double geometric_offset) {
  if (std::isinf(a)) return 0.5 * std::numbers::pi;
  const double ratio = a / d;
  return std::atan2(ratio, geometric_offset);
}

inline void flag_regime(ApertureResult& r, double d, double k) {
  if (d * k < kRayOpticsMinThickness) {
    r.ray_optics_regime = false;
    r.warning = "d < 3 lambda: ray-optics aperture estimate outside its regime";
  }
}

}  // namespace detail

/// Gamma/Gamma0 at the mirror focus with the LHM cut to radius a: plane waves
/// with k_perp <= k (a/d)/sqrt(1 + (a/d)^2) see the LHM stack, steeper ones
/// see bare vacuum (mirror as small as the slab) or the mirror with the slab
/// replaced by vacuum (infinite mirror).
inline ApertureResult aperture_mirror(const ApertureGeometry& geom, Vec3 orientation,
                                      const QuadratureConfig& cfg = {}, double omega = 1.0) {
  geom.validate();
  const double theta_c = detail::cutoff_angle(geom.a, geom.d, 1.0);
  const Vec3 atom{0.0, 0.0, geom.d};
  Tensor3 g = detail::vacuum_green(omega, {});
  g += reflected_window(mirror_stack(geom.d), atom, atom, omega, 0.0, theta_c, cfg);
  if (geom.mirror_extent == MirrorExtent::Infinite)
    g += reflected_window(mirror_stack(geom.d, MaterialSpec::vacuum()), atom, atom, omega,
                          theta_c, 0.5 * std::numbers::pi, cfg);
  ApertureResult r;
  r.value = g.contract(orientation, orientation).imag();
  r.cutoff_k_perp = std::sin(theta_c);
  detail::flag_regime(r, geom.d, omega);
  return r;
}

/// Gamma12/Gamma11 for the symmetric focal pair (gaps d/2) with the lens cut
/// to radius a: the cross integral keeps k_perp <= k (a/d)/sqrt(1/4 + (a/d)^2)
/// and the free-space coupling of the distant pair is neglected.
inline ApertureResult aperture_lens(const ApertureGeometry& geom, const QuadratureConfig& cfg = {},
                                    double omega = 1.0) {
  geom.validate();
  const double theta_c = detail::cutoff_angle(geom.a, geom.d, 0.5);
  const auto stack = lens_stack(geom.d);
  const auto [r1, r2] = focal_pair(geom.d, 0.5 * geom.d);
  const Tensor3 g12 = transmitted_window(stack, r2, r1, omega, 0.0, theta_c, cfg).transposed();
  const double gamma11 = single_atom_rate(stack, {r1, kAxisX, omega}, cfg);
  ApertureResult r;
  r.value = g12.contract(kAxisX, kAxisX).imag() / gamma11;
  r.cutoff_k_perp = std::sin(theta_c);
  detail::flag_regime(r, geom.d, omega);
  return r;
}

// ---------------------------------------------------------------------------
// Dispersion

/// Linear dispersion n = -1 + alpha (omega - omega0) around the design point.
struct DispersionModel {
  double alpha = 45.0;
  double omega0 = 1.0;

  void validate() const {
    if (!(omega0 > 0.0)) throw InputError("omega0 must be positive");
    if (!std::isfinite(alpha)) throw InputError("alpha must be finite");
  }
};

namespace detail {

// (3/4) Re \int_0^1 (1 + xi^2) e^{i beta / xi} dxi, i.e. with u = 1/xi
// (3/4) Re \int_1^inf (u^-2 + u^-4) e^{i beta u} du.  The oscillatory tail is
// summed over half-period panels and the partial sums are repeatedly averaged.
inline double linear_dispersion_value(double beta, const QuadratureConfig& cfg) {
  if (beta == 0.0) {
    auto f = [](double xi) { return 1.0 + xi * xi; };
    return 0.75 * integrate_adaptive<double>(f, 0.0, 1.0, cfg.rel_tol, cfg.abs_tol, 200).value;
  }
  auto f = [beta](double u) {
    const double u2 = u * u;
    return (1.0 / u2 + 1.0 / (u2 * u2)) * std::cos(beta * u);
  };
  const double half_period = std::numbers::pi / std::abs(beta);
  constexpr int kPanels = 48;
  constexpr int kAveraged = 24;
  std::vector<double> partial;
  partial.reserve(kPanels);
  double sum = 0.0;
  double lo = 1.0;
  for (int i = 0; i < kPanels; ++i) {
    const double hi = lo + half_period;
    auto res = integrate_adaptive<double>(f, lo, hi, 1e-12, 1e-15, 400, 2);
    if (!res.converged)
      throw ConvergenceError("dispersion_spectrum: panel integral failed", sum, res.error);
    sum += res.value;
    partial.push_back(sum);
    lo = hi;
  }
  std::vector<double> level(partial.end() - kAveraged, partial.end());
  double previous = level.back();
  for (int round = 0; round + 1 < kAveraged; ++round) {
    previous = level.back();
    for (std::size_t i = 0; i + 1 < level.size(); ++i) level[i] = 0.5 * (level[i] + level[i + 1]);
    level.pop_back();
  }
  const double value = level.front();
  if (std::abs(value - previous) > 1e-4 * std::max(1.0, std::abs(value)))
    throw ConvergenceError("dispersion_spectrum: oscillatory tail did not settle", value,
                           std::abs(value - previous));
  return 0.75 * value;
}

}  // namespace detail

/// Im G^20_xx(omega) of the focal pair in units of k/(6 pi) when only the
/// propagation phase disperses: beta = d k0 alpha (omega - omega0).
inline std::vector<double> dispersion_spectrum(double d, const DispersionModel& model,
                                               const std::vector<double>& omega_grid,
                                               const QuadratureConfig& cfg = {}) {
  model.validate();
  if (!(d > 0.0)) throw InputError("dispersion_spectrum: d must be > 0");
  std::vector<double> out;
  out.reserve(omega_grid.size());
  const double k0 = model.omega0;
  for (double w : omega_grid)
    out.push_back(detail::linear_dispersion_value(d * k0 * model.alpha * (w - model.omega0), cfg));
  return out;
}

/// Full width at half maximum of the linear-dispersion spectrum, from the
/// half-maximum point of the central lobe in beta.
inline double dispersion_fwhm(double d, const DispersionModel& model,
                              const QuadratureConfig& cfg = {}) {
  model.validate();
  double lo = 0.0, hi = 0.9;  // the central lobe crosses zero near beta ~ 0.98
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (detail::linear_dispersion_value(mid, cfg) > 0.5 ? lo : hi) = mid;
  }
  return 2.0 * 0.5 * (lo + hi) / (d * model.omega0 * std::abs(model.alpha));
}

/// FWHM of the central peak of a sampled curve (linear interpolation between
/// samples); the peak is the largest sample.
inline double sampled_fwhm(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw InputError("sampled_fwhm: need >= 3 samples");
  const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double half = 0.5 * y[peak];
  auto crossing = [&](int step) {
    for (auto i = static_cast<long>(peak); i + step >= 0 && i + step < static_cast<long>(y.size());
         i += step) {
      const auto j = static_cast<std::size_t>(i + step);
      const auto ii = static_cast<std::size_t>(i);
      if (y[j] <= half) return x[ii] + (half - y[ii]) * (x[j] - x[ii]) / (y[j] - y[ii]);
    }
    throw InputError("sampled_fwhm: curve does not fall to half maximum inside the grid");
  };
  return crossing(1) - crossing(-1);
}

/// Identical Lorentz resonances for eps and mu (impedance matched, n = eps)
/// tuned so that Re n(omega0) = -1 and d Re n / d omega = alpha at omega0.
/// Two-parameter Newton iteration on (omega_P, omega_T), started from the
/// lossless closed form.
inline MaterialSpec tune_lorentz_index(double omega0, double alpha, double gamma = 0.0) {
  if (!(omega0 > 0.0) || !(gamma >= 0.0)) throw InputError("tune_lorentz_index: bad omega0/gamma");
  if (!(alpha * omega0 > 4.0))
    throw InputError("tune_lorentz_index: single-resonance tuning needs alpha > 4 / omega0");
  const double gap = 4.0 * omega0 / alpha;  // omega0^2 - omega_T^2 when lossless
  double wp = std::sqrt(2.0 * gap);
  double wt = std::sqrt(omega0 * omega0 - gap);

  auto residual = [&](double p, double t) {
    const LorentzParams lp{p, t, gamma};
    const auto spec = MaterialSpec::lorentz(lp, lp);
    const double h = 1e-6 * omega0;
    const double n0 = refractive_index(spec, omega0).n.real();
    const double slope = (refractive_index(spec, omega0 + h).n.real() -
                          refractive_index(spec, omega0 - h).n.real()) /
                         (2.0 * h);
    return std::array<double, 2>{n0 + 1.0, (slope - alpha) / alpha};
  };
  for (int it = 0; it < 50; ++it) {
    const auto r = residual(wp, wt);
    if (std::hypot(r[0], r[1]) < 1e-10) break;
    const double hp = 1e-7 * wp, ht = 1e-7 * wt;
    const auto rp = residual(wp + hp, wt);
    const auto rt = residual(wp, wt + ht);
    const double j00 = (rp[0] - r[0]) / hp, j01 = (rt[0] - r[0]) / ht;
    const double j10 = (rp[1] - r[1]) / hp, j11 = (rt[1] - r[1]) / ht;
    const double det = j00 * j11 - j01 * j10;
    if (det == 0.0) throw NumericalError("tune_lorentz_index: singular Jacobian");
    wp -= (r[0] * j11 - r[1] * j01) / det;
    wt -= (j00 * r[1] - j10 * r[0]) / det;
    if (!(wp > 0.0 && wt > 0.0)) throw NumericalError("tune_lorentz_index: iteration diverged");
  }
  const auto r = residual(wp, wt);
  if (std::hypot(r[0], r[1]) > 1e-8) throw NumericalError("tune_lorentz_index: no convergence");
  const LorentzParams lp{wp, wt, gamma};
  return MaterialSpec::lorentz(lp, lp);
}

/// Im G^20_xx(omega) of the focal pair (gaps d/2 at omega0) across a lens made
/// of `slab`, in units of k/(6 pi), from the full transmitted plane-wave
/// integral.  Propagating modes only, matching the linear-dispersion model.
inline std::vector<double> causal_dispersion_spectrum(double d, const MaterialSpec& slab,
                                                      const std::vector<double>& omega_grid,
                                                      QuadratureConfig cfg = {}) {
  if (!(d > 0.0)) throw InputError("causal_dispersion_spectrum: d must be > 0");
  cfg.evanescent = EvanescentMode::Never;
  const auto stack = lens_stack(d, slab);
  const auto [r1, r2] = focal_pair(d, 0.5 * d);
  std::vector<double> out;
  out.reserve(omega_grid.size());
  for (double w : omega_grid)
    out.push_back(cross_rate(stack, {r1, kAxisX, w}, {r2, kAxisX, w}, cfg));
  return out;
}

struct MarkovBound {
  double max_distance = 0.0;     // c / Gamma11, in c/omega_ref
  double bandwidth = 0.0;        // (k0 d alpha)^-1, in omega_ref
  double bandwidth_limit = 0.0;  // c / d, the alpha = 1/omega0 value
  bool markov_valid = false;     // bandwidth well above gamma11 (factor 10)
};

/// Photon transit-time bound for the focal-pair coupling: with
/// Delta omega ~ (k0 d alpha)^-1 <= c/d, Delta omega >> Gamma11 needs d << c/Gamma11.
inline MarkovBound markov_bound(double gamma11, const DispersionModel& model, double d) {
  model.validate();
  if (!(gamma11 > 0.0)) throw InputError("markov_bound: gamma11 must be positive");
  if (!(model.alpha >= 1.0 / model.omega0))
    throw InputError("markov_bound: a lossless LHM needs alpha >= 1/omega0");
  if (!(d > 0.0)) throw InputError("markov_bound: d must be > 0");
  MarkovBound b;
  b.max_distance = 1.0 / gamma11;
  b.bandwidth = 1.0 / (model.omega0 * d * model.alpha);
  b.bandwidth_limit = 1.0 / d;
  b.markov_valid = b.bandwidth >= 10.0 * gamma11;
  return b;
}

}  // namespace negqed

#endif  // NEGQED_REALISM_HPP
