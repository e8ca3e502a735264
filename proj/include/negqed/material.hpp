#ifndef NEGQED_MATERIAL_HPP
#define NEGQED_MATERIAL_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <variant>

#include "errors.hpp"
#include "linalg.hpp"

namespace negqed {

// Frequencies are in units of a caller-chosen reference frequency omega_ref,
// lengths in units of c / omega_ref.  The vacuum wavenumber is then k = omega.

/// Single Lorentz resonance  1 + wp^2 / (wt^2 - w^2 - i w gamma).
struct LorentzParams {
  double omega_p = 0.0;
  double omega_t = 1.0;
  double gamma = 0.0;

  void validate() const {
    if (!(omega_p >= 0.0) || !(omega_t > 0.0) || !(gamma >= 0.0))
      throw InputError("Lorentz parameters require omega_P >= 0, omega_T > 0, gamma >= 0");
  }
};

/// Either a Lorentz resonance or a frequency-independent complex value.
using Response = std::variant<LorentzParams, cplx>;

struct MaterialSpec {
  Response electric = cplx(1.0, 0.0);
  Response magnetic = cplx(1.0, 0.0);

  static MaterialSpec vacuum() { return {}; }
  static MaterialSpec fixed(cplx eps, cplx mu) {
    MaterialSpec s{eps, mu};
    s.validate();
    return s;
  }
  static MaterialSpec lorentz(LorentzParams e, LorentzParams m) {
    MaterialSpec s{e, m};
    s.validate();
    return s;
  }
  /// Impedance-matched medium with eps = mu = n, so that sqrt(eps mu) = n.
  static MaterialSpec matched_index(cplx n) { return fixed(n, n); }

  void validate() const {
    auto check = [](const Response& r, const char* which) {
      if (const auto* lp = std::get_if<LorentzParams>(&r)) {
        lp->validate();
      } else {
        const cplx v = std::get<cplx>(r);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw InputError(std::string(which) + " value must be finite");
        if (v.imag() < 0.0)
          throw InputError(std::string(which) +
                           " must have a nonnegative imaginary part (passive medium)");
      }
    };
    check(electric, "permittivity");
    check(magnetic, "permeability");
  }
};

namespace detail {

inline cplx evaluate_response(const Response& r, double omega) {
  if (const auto* lp = std::get_if<LorentzParams>(&r)) {
    const cplx denom(lp->omega_t * lp->omega_t - omega * omega, -omega * lp->gamma);
    return 1.0 + lp->omega_p * lp->omega_p / denom;
  }
  return std::get<cplx>(r);
}

// d/d omega of the response.
inline cplx response_derivative(const Response& r, double omega) {
  if (const auto* lp = std::get_if<LorentzParams>(&r)) {
    const cplx denom(lp->omega_t * lp->omega_t - omega * omega, -omega * lp->gamma);
    return lp->omega_p * lp->omega_p * cplx(2.0 * omega, lp->gamma) / (denom * denom);
  }
  return 0.0;
}

inline void require_positive_frequency(double omega) {
  if (!(omega > 0.0)) throw InputError("frequency must be positive");
}

// Argument in [0, pi] of a passive response value; an exactly real value is
// read as the limit Im -> 0+.
inline double passive_arg(cplx v) { return std::atan2(std::abs(v.imag()), v.real()); }

}  // namespace detail

inline cplx permittivity(const MaterialSpec& spec, double omega) {
  detail::require_positive_frequency(omega);
  return detail::evaluate_response(spec.electric, omega);
}

inline cplx permeability(const MaterialSpec& spec, double omega) {
  detail::require_positive_frequency(omega);
  return detail::evaluate_response(spec.magnetic, omega);
}

struct ComplexIndex {
  cplx n;
  bool left_handed = false;
};

/// Refractive index with the passive root Im n >= 0:
///   n = sqrt(|eps||mu|) exp[(i/2)(arccot(eps_R/eps_I) + arccot(mu_R/mu_I))],
/// arccot taken in (0, pi), i.e. the arguments of eps and mu.  Exactly real
/// negative inputs are limits from Im -> 0+, so eps = mu = -1 gives n = -1.
inline ComplexIndex refractive_index(cplx eps, cplx mu) {
  if (eps.imag() < 0.0 || mu.imag() < 0.0)
    throw InputError("refractive_index: gain media (negative imaginary part) are not supported");
  const double phase = detail::passive_arg(eps) + detail::passive_arg(mu);
  const double modulus = std::sqrt(std::abs(eps) * std::abs(mu));
  // Re n < 0 exactly when the phase of n, half the sum, lies in (pi/2, pi].
  return {std::polar(modulus, 0.5 * phase), 0.5 * phase > 0.5 * std::numbers::pi};
}

inline bool is_left_handed(cplx eps, cplx mu) { return refractive_index(eps, mu).left_handed; }

inline ComplexIndex refractive_index(const MaterialSpec& spec, double omega) {
  return refractive_index(permittivity(spec, omega), permeability(spec, omega));
}

/// Dispersive field-energy check: Re d(omega eps)/d omega >= 0 and the same
/// for mu.  The finite-difference values are kept for cross-checking.
struct EnergyCheck {
  cplx d_omega_eps;
  cplx d_omega_mu;
  cplx fd_omega_eps;
  cplx fd_omega_mu;
  bool valid = false;
};

inline EnergyCheck dispersion_energy_check(const MaterialSpec& spec, double omega) {
  detail::require_positive_frequency(omega);
  EnergyCheck out;
  out.d_omega_eps = detail::evaluate_response(spec.electric, omega) +
                    omega * detail::response_derivative(spec.electric, omega);
  out.d_omega_mu = detail::evaluate_response(spec.magnetic, omega) +
                   omega * detail::response_derivative(spec.magnetic, omega);

  const double h = 1e-6 * omega;
  auto fd = [&](const Response& r) {
    return ((omega + h) * detail::evaluate_response(r, omega + h) -
            (omega - h) * detail::evaluate_response(r, omega - h)) /
           (2.0 * h);
  };
  out.fd_omega_eps = fd(spec.electric);
  out.fd_omega_mu = fd(spec.magnetic);
  out.valid = out.d_omega_eps.real() >= 0.0 && out.d_omega_mu.real() >= 0.0;
  return out;
}

/// Lossless negative-index bound: where n(omega0) = -1, causality and energy
/// positivity require d Re n / d omega >= 1 / omega0.
inline bool slope_bound_check(const std::function<cplx(double)>& index, double omega0) {
  detail::require_positive_frequency(omega0);
  const cplx n0 = index(omega0);
  if (std::abs(n0.real() + 1.0) > 1e-3)
    throw InputError("slope_bound_check: Re n(omega0) must equal -1 within 1e-3, got " +
                     std::to_string(n0.real()));
  const double h = 1e-6 * omega0;
  const double slope = (index(omega0 + h).real() - index(omega0 - h).real()) / (2.0 * h);
  return slope >= 1.0 / omega0;
}

inline bool slope_bound_check(const MaterialSpec& spec, double omega0) {
  return slope_bound_check([&spec](double w) { return refractive_index(spec, w).n; }, omega0);
}

}  // namespace negqed

#endif  // NEGQED_MATERIAL_HPP
