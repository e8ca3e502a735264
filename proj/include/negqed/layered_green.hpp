#ifndef NEGQED_LAYERED_GREEN_HPP
#define NEGQED_LAYERED_GREEN_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>

#include "errors.hpp"
#include "linalg.hpp"
#include "material.hpp"
#include "quadrature.hpp"

namespace negqed {

// Geometry: region 0 is vacuum z >= 0, the slab (region 1) fills -d <= z < 0,
// region 2 (z < -d) is vacuum or a perfect mirror.  Lengths in c/omega_ref.
enum class Backing { Vacuum, PerfectMirror };

struct LayerStack {
  double thickness = 0.0;
  MaterialSpec slab = MaterialSpec::vacuum();
  Backing backing = Backing::Vacuum;

  void validate() const {
    if (!(thickness >= 0.0) || !std::isfinite(thickness))
      throw InputError("slab thickness must be finite and >= 0");
    slab.validate();
  }
};

/// Interface reflection coefficients for TE (R) and TM (S) waves.
struct InterfaceCoeffs {
  cplx r;
  cplx s;
};

/// Axial wavenumbers and handedness of one plane-wave component.
struct WaveComponents {
  double k = 0.0;
  double k_perp = 0.0;
  cplx k_z;
  cplx k_1z;
  int p = 1;
};

struct FresnelSet {
  cplx r01, r12, s01, s12;
  cplx r_te, r_tm, t_te, t_tm;
};

/// Green tensor in units of k / (6 pi): the vacuum coincident-point tensor has
/// Im G = identity.  Only the imaginary part is complete in general: the
/// divergent real part of the coincident-point vacuum term is dropped, and the
/// evanescent window (which is real for lossless stacks) may be skipped.
struct GreenTensor {
  Tensor3 value;
  double error = 0.0;
  bool evanescent_included = false;

  Tensor3 imag() const {
    Tensor3 t;
    for (std::size_t i = 0; i < 9; ++i) t.m[i] = value.m[i].imag();
    return t;
  }
};

namespace detail {

struct SlabMedium {
  cplx eps{1.0, 0.0};
  cplx mu{1.0, 0.0};
  cplx n_sq{1.0, 0.0};
  cplx n{1.0, 0.0};
  bool lossless = true;
  bool left_handed = false;
};

struct StackAt {
  double k = 1.0;
  double d = 0.0;
  SlabMedium slab;
  Backing backing = Backing::Vacuum;
};

inline StackAt evaluate_stack(const LayerStack& stack, double omega) {
  stack.validate();
  require_positive_frequency(omega);
  StackAt s;
  s.k = omega;
  s.d = stack.thickness;
  s.backing = stack.backing;
  if (stack.thickness > 0.0) {
    s.slab.eps = permittivity(stack.slab, omega);
    s.slab.mu = permeability(stack.slab, omega);
    const auto idx = refractive_index(s.slab.eps, s.slab.mu);
    s.slab.n = idx.n;
    s.slab.left_handed = idx.left_handed;
    s.slab.n_sq = s.slab.eps * s.slab.mu;
    s.slab.lossless = s.slab.eps.imag() == 0.0 && s.slab.mu.imag() == 0.0;
  }
  return s;
}

// sqrt(n^2 k^2 - k_perp^2) written as (n^2 - 1) k^2 + k_z^2 to avoid
// cancellation near grazing incidence.  Root with Im >= 0; an exactly real
// root takes the sign of Re n, the lossless limit of that branch.
inline cplx axial_wavenumber(cplx n_sq, cplx n, double k, cplx k_z) {
  cplx root = std::sqrt((n_sq - 1.0) * (k * k) + k_z * k_z);
  if (root.imag() < 0.0) root = -root;
  if (root.imag() == 0.0 && n.real() < 0.0) root = cplx(-root.real(), 0.0);
  return root;
}

inline cplx vacuum_axial(double k, double k_perp) {
  const double q = k * k - k_perp * k_perp;
  return q >= 0.0 ? cplx(std::sqrt(q), 0.0) : cplx(0.0, std::sqrt(-q));
}

inline cplx checked_ratio(cplx num, cplx den, double scale, const char* what) {
  if (!(std::abs(den) > 1e-14 * scale)) throw PoleError(std::string(what) + ": vanishing denominator");
  return num / den;
}

inline InterfaceCoeffs interface(cplx eps_i, cplx mu_i, cplx kz_i, cplx eps_j, cplx mu_j,
                                 cplx kz_j) {
  const cplx a = mu_j * kz_i, b = mu_i * kz_j;
  const cplx c = eps_j * kz_i, e = eps_i * kz_j;
  return {checked_ratio(a - b, a + b, std::abs(a) + std::abs(b), "TE interface coefficient"),
          checked_ratio(c - e, c + e, std::abs(c) + std::abs(e), "TM interface coefficient")};
}

// Fresnel functions of the stack with the transmission coefficients kept
// without their e^{-i k_z d} factor, so evanescent arguments cannot overflow.
struct SlabResponse {
  FresnelSet f;
  cplx t_te_inner;  // t_te * e^{i k_z d}
  cplx t_tm_inner;
  cplx k_z;
  cplx k_1z;
};

inline constexpr double kPoleGuard = 1e-12;

inline SlabResponse slab_response(const StackAt& s, double k_perp, cplx k_z) {
  SlabResponse out;
  out.k_z = k_z;
  const auto& m = s.slab;
  const cplx k1z = axial_wavenumber(m.n_sq, m.n, s.k, k_z);
  out.k_1z = k1z;
  auto& f = out.f;

  const auto i01 = interface(1.0, 1.0, k_z, m.eps, m.mu, k1z);
  f.r01 = i01.r;
  f.s01 = i01.s;
  if (s.backing == Backing::PerfectMirror) {
    f.r12 = -1.0;
    f.s12 = 1.0;
  } else {
    const auto i12 = interface(m.eps, m.mu, k1z, 1.0, 1.0, k_z);
    f.r12 = i12.r;
    f.s12 = i12.s;
  }
  const cplx I(0.0, 1.0);
  const cplx round_trip = std::exp(2.0 * I * k1z * s.d);
  const cplx den_te = 1.0 + f.r01 * f.r12 * round_trip;
  const cplx den_tm = 1.0 + f.s01 * f.s12 * round_trip;
  if (std::abs(den_te) < kPoleGuard || std::abs(den_tm) < kPoleGuard)
    throw PoleError("slab resonance denominator below 1e-12 at k_perp/k = " +
                    std::to_string(k_perp / s.k));
  f.r_te = (f.r01 + f.r12 * round_trip) / den_te;
  f.r_tm = (f.s01 + f.s12 * round_trip) / den_tm;

  const cplx single_pass = std::exp(I * k1z * s.d);
  out.t_te_inner = checked_ratio(2.0 * m.mu * k_z, m.mu * k_z + k1z,
                                 std::abs(m.mu * k_z) + std::abs(k1z), "TE transmission") *
                   (1.0 + f.r12) / den_te * single_pass;
  out.t_tm_inner = checked_ratio(2.0 * m.eps * k_z, m.eps * k_z + k1z,
                                 std::abs(m.eps * k_z) + std::abs(k1z), "TM transmission") *
                   (1.0 + f.s12) / den_tm * single_pass;
  const cplx back = std::exp(-I * k_z * s.d);
  f.t_te = out.t_te_inner * back;
  f.t_tm = out.t_tm_inner * back;
  return out;
}

// Azimuthal integrals over phi of e^{i k_perp rho cos(phi - phi0)} times
// {1, cos, sin, cos^2, sin^2, sin cos}.
struct AzimuthalWeights {
  cplx i0, ic, is, icc, iss, isc;
};

inline AzimuthalWeights azimuthal_weights(double k_perp, double rho, double phi0) {
  constexpr double pi = std::numbers::pi;
  if (rho == 0.0) return {2.0 * pi, 0.0, 0.0, pi, pi, 0.0};
  const double x = k_perp * rho;
  const double j0 = std::cyl_bessel_j(0.0, x);
  const double j1 = std::cyl_bessel_j(1.0, x);
  const double j2 = std::cyl_bessel_j(2.0, x);
  const double c = std::cos(phi0), s = std::sin(phi0);
  const double c2 = std::cos(2.0 * phi0), s2 = std::sin(2.0 * phi0);
  const cplx I(0.0, 1.0);
  return {2.0 * pi * j0,          2.0 * pi * I * j1 * c,  2.0 * pi * I * j1 * s,
          pi * (j0 - j2 * c2),    pi * (j0 + j2 * c2),    -pi * j2 * s2};
}

// Azimuth-integrated dyadic bracket
//   a_te e(x)e + a_down h(-kz)(x)h(-kz) + a_up h(kz)(x)h(-kz),
// scaled by the normalized prefactor (i / 8 pi^2) / (k / 6 pi).
inline Tensor3 plane_wave_dyadic(const AzimuthalWeights& w, double k, double k_perp, cplx k_z,
                                 cplx a_te, cplx a_down, cplx a_up) {
  Tensor3 t;
  const cplx kz2 = k_z * k_z / (k * k);
  const cplx kzkp = k_z * k_perp / (k * k);
  const double kp2 = k_perp * k_perp / (k * k);
  const cplx h_sum = a_down - a_up;  // in-plane and xz parts flip sign for h(kz)
  const cplx h_zz = a_down + a_up;

  t(0, 0) = a_te * w.iss + h_sum * kz2 * w.icc;
  t(0, 1) = -a_te * w.isc + h_sum * kz2 * w.isc;
  t(1, 0) = t(0, 1);
  t(1, 1) = a_te * w.icc + h_sum * kz2 * w.iss;
  t(0, 2) = h_sum * kzkp * w.ic;
  t(1, 2) = h_sum * kzkp * w.is;
  t(2, 0) = h_zz * kzkp * w.ic;
  t(2, 1) = h_zz * kzkp * w.is;
  t(2, 2) = h_zz * kp2 * w.i0;

  const cplx prefactor = cplx(0.0, 3.0 / (4.0 * std::numbers::pi * k));
  return t * prefactor;
}

// Free-space dyadic Green tensor in units of k/(6 pi).  At R = 0 the
// divergent real part is dropped.
inline Tensor3 vacuum_green(double k, Vec3 separation) {
  const double r = norm(separation);
  const double x = k * r;
  Tensor3 t;
  if (x == 0.0) {
    for (std::size_t i = 0; i < 3; ++i) t(i, i) = cplx(0.0, 1.0);
    return t;
  }
  const Vec3 u = (1.0 / r) * separation;
  const cplx I(0.0, 1.0);
  const cplx g = 1.5 * std::exp(I * x) / x;
  const cplx a = g * (1.0 + I / x - 1.0 / (x * x));
  const cplx b = g * (-1.0 - 3.0 * I / x + 3.0 / (x * x));
  double a_im = a.imag(), b_im = b.imag();
  if (x < 1e-3) {
    // Im parts lose all digits to cancellation here; use their series.
    const double x2 = x * x;
    a_im = 1.5 * (2.0 / 3.0 - 2.0 * x2 / 15.0 + x2 * x2 / 140.0);
    b_im = 1.5 * (x2 / 15.0 - x2 * x2 / 210.0);
  }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const double uu = u[i] * u[j];
      const double re = (i == j ? a.real() : 0.0) + b.real() * uu;
      const double im = (i == j ? a_im : 0.0) + b_im * uu;
      t(i, j) = cplx(re, im);
    }
  return t;
}

// Whether the evanescent window enters, per the configured mode.
inline bool include_evanescent(const StackAt& s, const QuadratureConfig& cfg) {
  switch (cfg.evanescent) {
    case EvanescentMode::Always: return true;
    case EvanescentMode::Never: return false;
    case EvanescentMode::Auto: break;
  }
  if (s.d == 0.0) return false;
  if (!s.slab.lossless) return true;
  const double er = s.slab.eps.real(), mr = s.slab.mu.real();
  const bool dielectric_free = er > 0.0 && mr > 0.0 && er * mr <= 1.0;
  const bool matched_negative = er < 0.0 && er == mr && er >= -1.0;
  if (!dielectric_free && !matched_negative)
    throw BoundModeError(
        "lossless slab supports guided or surface modes on the real k_perp axis; give it a "
        "small loss or request EvanescentMode::Never (propagating modes only)");
  return false;
}

inline double lateral_angle(Vec3 sep) { return std::atan2(sep.y, sep.x); }
inline double lateral_distance(Vec3 sep) { return std::hypot(sep.x, sep.y); }

inline void require_converged(const SommerfeldResult<Tensor3>& res, const char* what) {
  if (!res.converged)
    throw ConvergenceError(std::string(what) + ": k_perp integral did not converge",
                           max_abs(res.value), res.error);
}

}  // namespace detail

/// R_ij = (mu_j k_iz - mu_i k_jz)/(mu_j k_iz + mu_i k_jz), S_ij the same with eps.
inline InterfaceCoeffs interface_coeffs(cplx eps_i, cplx mu_i, cplx eps_j, cplx mu_j,
                                        double k_perp, double omega) {
  detail::require_positive_frequency(omega);
  const auto ni = refractive_index(eps_i, mu_i);
  const auto nj = refractive_index(eps_j, mu_j);
  const cplx kz = detail::vacuum_axial(omega, k_perp);
  const cplx kiz = detail::axial_wavenumber(eps_i * mu_i, ni.n, omega, kz);
  const cplx kjz = detail::axial_wavenumber(eps_j * mu_j, nj.n, omega, kz);
  return detail::interface(eps_i, mu_i, kiz, eps_j, mu_j, kjz);
}

inline WaveComponents wave_components(const LayerStack& stack, double k_perp, double omega) {
  const auto s = detail::evaluate_stack(stack, omega);
  WaveComponents w;
  w.k = s.k;
  w.k_perp = k_perp;
  w.k_z = detail::vacuum_axial(s.k, k_perp);
  w.k_1z = detail::axial_wavenumber(s.slab.n_sq, s.slab.n, s.k, w.k_z);
  w.p = s.slab.left_handed ? -1 : 1;
  return w;
}

/// Reflection/transmission functions of the three-layer stack.  A perfect
/// mirror backing enters as R12 = -1, S12 = 1.
inline FresnelSet slab_coeffs(const LayerStack& stack, double k_perp, double omega) {
  const auto s = detail::evaluate_stack(stack, omega);
  return detail::slab_response(s, k_perp, detail::vacuum_axial(s.k, k_perp)).f;
}

namespace detail {

// k_perp integrand of the wave reflected by the stack, r and r' in region 0.
inline auto reflected_kernel(const StackAt& s, Vec3 r, Vec3 r_prime) {
  const Vec3 sep = r - r_prime;
  const double rho = lateral_distance(sep);
  const double phi0 = lateral_angle(sep);
  const double height = r.z + r_prime.z;
  return [&s, rho, phi0, height](double k_perp, cplx k_z) -> Tensor3 {
    const auto resp = slab_response(s, k_perp, k_z);
    const cplx prop = std::exp(cplx(0.0, 1.0) * k_z * height);
    const auto w = azimuthal_weights(k_perp, rho, phi0);
    return plane_wave_dyadic(w, s.k, k_perp, k_z, resp.f.r_te * prop, 0.0, resp.f.r_tm * prop);
  };
}

// k_perp integrand of the wave transmitted from r' (region 0) to r (region 2).
inline auto transmitted_kernel(const StackAt& s, Vec3 r, Vec3 r_prime) {
  const Vec3 sep = r - r_prime;
  const double rho = lateral_distance(sep);
  const double phi0 = lateral_angle(sep);
  const double vacuum_path = r_prime.z - r.z - s.d;
  return [&s, rho, phi0, vacuum_path](double k_perp, cplx k_z) -> Tensor3 {
    const auto resp = slab_response(s, k_perp, k_z);
    const cplx prop = std::exp(cplx(0.0, 1.0) * k_z * vacuum_path);
    const auto w = azimuthal_weights(k_perp, rho, phi0);
    return plane_wave_dyadic(w, s.k, k_perp, k_z, resp.t_te_inner * prop,
                             resp.t_tm_inner * prop, 0.0);
  };
}

inline double reflected_hint(const StackAt& s, Vec3 r, Vec3 r_prime) {
  const Vec3 sep = r - r_prime;
  return (s.k * (r.z + r_prime.z) + 2.0 * std::abs(s.slab.n) * s.k * s.d +
          s.k * lateral_distance(sep)) /
         std::numbers::pi;
}

inline double transmitted_hint(const StackAt& s, Vec3 r, Vec3 r_prime) {
  const Vec3 sep = r - r_prime;
  return (s.k * (r_prime.z - r.z - s.d) + std::abs(s.slab.n) * s.k * s.d +
          s.k * lateral_distance(sep)) /
         std::numbers::pi;
}

inline void check_same_side(Vec3 r, Vec3 r_prime) {
  if (r.z < 0.0 || r_prime.z < 0.0)
    throw InputError("both points must lie in region 0 (z >= 0)");
}

inline void check_cross_side(const LayerStack& stack, Vec3 r, Vec3 r_prime) {
  if (stack.backing != Backing::Vacuum)
    throw InputError("cross-side Green tensor needs a vacuum region 2");
  if (!(r.z < -stack.thickness) || r_prime.z < 0.0)
    throw InputError("cross-side Green tensor needs z < -d for r and z' >= 0 for r'");
}

// Integral of a kernel over the propagating window restricted to
// theta in [theta_lo, theta_hi], k_perp = k sin(theta).
template <typename Kernel>
Tensor3 propagating_window(Kernel&& kernel, double k, double theta_lo, double theta_hi,
                           double hint, const QuadratureConfig& cfg, const char* what) {
  auto f = [&](double theta) -> Tensor3 {
    return kernel(k * std::sin(theta), cplx(k * std::cos(theta), 0.0)) * (k * std::sin(theta));
  };
  const double span = (theta_hi - theta_lo) / (0.5 * std::numbers::pi);
  const int pieces = std::clamp(static_cast<int>(hint * span) + 4, 4, 2000);
  auto res = integrate_adaptive<Tensor3>(f, theta_lo, theta_hi, cfg.rel_tol, cfg.abs_tol,
                                         std::max(cfg.max_subdivisions, 2 * pieces), pieces);
  if (!res.converged)
    throw ConvergenceError(std::string(what) + ": window integral did not converge",
                           max_abs(res.value), res.error);
  return res.value;
}

}  // namespace detail

/// G(r, r') for r, r' both in region 0 (z, z' >= 0): free-space part plus the
/// wave reflected by the stack, integrated over k_perp after the analytic
/// azimuthal integration.
inline GreenTensor green_same_side(const LayerStack& stack, Vec3 r, Vec3 r_prime, double omega,
                                   const QuadratureConfig& cfg = {}) {
  detail::check_same_side(r, r_prime);
  const auto s = detail::evaluate_stack(stack, omega);
  const bool evanescent = detail::include_evanescent(s, cfg);
  auto res = sommerfeld_integrate<Tensor3>(detail::reflected_kernel(s, r, r_prime), s.k, cfg,
                                           evanescent, detail::reflected_hint(s, r, r_prime));
  detail::require_converged(res, "green_same_side");

  GreenTensor g;
  g.value = detail::vacuum_green(s.k, r - r_prime) + res.value;
  g.error = res.error;
  g.evanescent_included = res.evanescent_included;
  return g;
}

/// Reflected part of G(r, r') restricted to propagating plane waves with
/// theta_lo <= theta <= theta_hi (sin theta = k_perp / k).  No free-space term.
inline Tensor3 reflected_window(const LayerStack& stack, Vec3 r, Vec3 r_prime, double omega,
                                double theta_lo, double theta_hi,
                                const QuadratureConfig& cfg = {}) {
  detail::check_same_side(r, r_prime);
  const auto s = detail::evaluate_stack(stack, omega);
  return detail::propagating_window(detail::reflected_kernel(s, r, r_prime), s.k, theta_lo,
                                    theta_hi, detail::reflected_hint(s, r, r_prime), cfg,
                                    "reflected_window");
}

/// G(r, r') with r below the slab (z < -d) and r' in region 0; vacuum backing
/// only.  Pure transmission through the slab.
inline GreenTensor green_cross_side(const LayerStack& stack, Vec3 r, Vec3 r_prime, double omega,
                                    const QuadratureConfig& cfg = {}) {
  detail::check_cross_side(stack, r, r_prime);
  const auto s = detail::evaluate_stack(stack, omega);
  const bool evanescent = detail::include_evanescent(s, cfg);
  auto res = sommerfeld_integrate<Tensor3>(detail::transmitted_kernel(s, r, r_prime), s.k, cfg,
                                           evanescent, detail::transmitted_hint(s, r, r_prime));
  detail::require_converged(res, "green_cross_side");

  GreenTensor g;
  g.value = res.value;
  g.error = res.error;
  g.evanescent_included = res.evanescent_included;
  return g;
}

/// Transmitted G(r, r') restricted to theta_lo <= theta <= theta_hi.
inline Tensor3 transmitted_window(const LayerStack& stack, Vec3 r, Vec3 r_prime, double omega,
                                  double theta_lo, double theta_hi,
                                  const QuadratureConfig& cfg = {}) {
  detail::check_cross_side(stack, r, r_prime);
  const auto s = detail::evaluate_stack(stack, omega);
  return detail::propagating_window(detail::transmitted_kernel(s, r, r_prime), s.k, theta_lo,
                                    theta_hi, detail::transmitted_hint(s, r, r_prime), cfg,
                                    "transmitted_window");
}

enum class Region { Front, Slab, Back };

inline Region region_of(const LayerStack& stack, double z) {
  if (z >= 0.0) return Region::Front;
  if (z < -stack.thickness) return Region::Back;
  return Region::Slab;
}

/// G(r, r') for any pair of vacuum points.  Back-side pairs (vacuum backing)
/// are mapped to the front by reflecting through the slab mid-plane.
inline GreenTensor green(const LayerStack& stack, Vec3 r, Vec3 r_prime, double omega,
                         const QuadratureConfig& cfg = {}) {
  const Region a = region_of(stack, r.z), b = region_of(stack, r_prime.z);
  if (a == Region::Slab || b == Region::Slab)
    throw InputError("points inside the slab are not supported");
  if ((a == Region::Back || b == Region::Back) && stack.backing != Backing::Vacuum)
    throw InputError("points behind a perfect mirror are not supported");
  if (a == Region::Front && b == Region::Front) return green_same_side(stack, r, r_prime, omega, cfg);
  if (a == Region::Back && b == Region::Front) return green_cross_side(stack, r, r_prime, omega, cfg);
  if (a == Region::Front && b == Region::Back) {
    auto g = green_cross_side(stack, r_prime, r, omega, cfg);
    g.value = g.value.transposed();
    return g;
  }
  auto mirror = [&](Vec3 p) { return Vec3{p.x, p.y, -stack.thickness - p.z}; };
  auto g = green_same_side(stack, mirror(r), mirror(r_prime), omega, cfg);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if ((i == 2) != (j == 2)) g.value(i, j) = -g.value(i, j);
  return g;
}

}  // namespace negqed

#endif  // NEGQED_LAYERED_GREEN_HPP
