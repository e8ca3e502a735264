#ifndef NEGQED_CAVITY_GREEN_HPP
#define NEGQED_CAVITY_GREEN_HPP

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "material.hpp"

namespace negqed {

// Real-cavity local-field model: the emitter sits at the centre of an empty
// sphere of radius R in a homogeneous (eps, mu) host.  rho = R omega_A / c.

inline constexpr double kDefaultCavityRadius = 0.01;

namespace detail {

// Riccati-Bessel psi(x) = x j1(x) and its derivative, real argument.
inline double riccati_j1(double x) {
  if (x < 0.1) {
    const double x2 = x * x;
    return x2 * (1.0 / 3.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 840.0 - x2 / 45360.0)));
  }
  return std::sin(x) / x - std::cos(x);
}

inline double riccati_j1_prime(double x) {
  if (x < 0.1) {
    const double x2 = x * x;
    return x * (2.0 / 3.0 - x2 * (4.0 / 30.0 - x2 * (6.0 / 840.0 - x2 * 8.0 / 45360.0)));
  }
  return std::cos(x) / x - std::sin(x) / (x * x) + std::sin(x);
}

// Riccati-Hankel xi(x) = x h1(x) with the e^{ix} factor removed, and its
// derivative with the same factor removed.
inline cplx reduced_xi(cplx x) { return -(1.0 + cplx(0.0, 1.0) / x); }
inline cplx reduced_xi_prime(cplx x) {
  const cplx I(0.0, 1.0);
  return -(I - 1.0 / x - I / (x * x));
}

inline void validate_cavity(cplx eps, cplx mu, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw InputError("cavity radius rho must satisfy 0 < rho < 1");
  if (eps.imag() < 0.0 || mu.imag() < 0.0) throw InputError("cavity host must be passive");
}

}  // namespace detail

/// Scattering coefficient of the TM dipole (n = 1) wave at the cavity wall.
///
/// Matching tangential E and H at r = R with an outgoing wave in the host gives
///   C = (mu xi'(n rho) xi(rho) - n xi(n rho) xi'(rho))
///       / (n xi(n rho) psi'(rho) - mu xi'(n rho) psi(rho)),
/// which vanishes for a vacuum host.
inline cplx c_n1(cplx eps, cplx mu, double rho) {
  detail::validate_cavity(eps, mu, rho);
  const cplx n = refractive_index(eps, mu).n;
  const cplx I(0.0, 1.0);
  const double x0 = rho;
  const cplx x1 = n * rho;
  const cplx xi0 = detail::reduced_xi(x0);
  const cplx dxi0 = detail::reduced_xi_prime(x0);
  const cplx xi1 = detail::reduced_xi(x1);
  const cplx dxi1 = detail::reduced_xi_prime(x1);
  const double psi0 = detail::riccati_j1(x0);
  const double dpsi0 = detail::riccati_j1_prime(x0);

  // the common e^{i rho} of xi(rho) stays outside so a vacuum host cancels exactly
  const cplx num = std::exp(I * x0) * (mu * dxi1 * xi0 - n * xi1 * dxi0);
  const cplx den = n * xi1 * dpsi0 - mu * dxi1 * psi0;
  if (std::abs(den) == 0.0) throw NumericalError("c_n1: cavity resonance (vanishing denominator)");
  return num / den;
}

/// Gamma / Gamma0 = 1 + Re C_N^1.
inline double embedded_rate(cplx eps, cplx mu, double rho = kDefaultCavityRadius) {
  return 1.0 + c_n1(eps, mu, rho).real();
}

/// Small-cavity lossless limit n mu (3 eps / (2 eps + 1))^2, with n < 0 when
/// eps and mu are both negative.
inline double lossless_limit_rate(double eps, double mu) {
  if (!(eps * mu > 0.0)) throw InputError("lossless_limit_rate: need eps * mu > 0 (real index)");
  const double n = (eps < 0.0 ? -1.0 : 1.0) * std::sqrt(eps * mu);
  const double local = 3.0 * eps / (2.0 * eps + 1.0);
  return n * mu * local * local;
}

struct CavitySweepPoint {
  double omega = 0.0;
  cplx eps;
  cplx mu;
  double rate = 0.0;  // NaN when `error` is set
  std::string error;
};

inline std::vector<CavitySweepPoint> resonance_sweep(const MaterialSpec& spec,
                                                     const std::vector<double>& omega_grid,
                                                     double rho = kDefaultCavityRadius) {
  std::vector<CavitySweepPoint> out;
  out.reserve(omega_grid.size());
  for (double w : omega_grid) {
    CavitySweepPoint p;
    p.omega = w;
    try {
      p.eps = permittivity(spec, w);
      p.mu = permeability(spec, w);
      p.rate = embedded_rate(p.eps, p.mu, rho);
    } catch (const std::exception& e) {
      p.rate = std::nan("");
      p.error = e.what();
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace negqed

#endif  // NEGQED_CAVITY_GREEN_HPP
