#ifndef NEGQED_DYNAMICS_HPP
#define NEGQED_DYNAMICS_HPP

#include <array>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "rates.hpp"

namespace negqed {

// Two emitters in the Dicke basis {|22>, |s>, |a>, |11>} with level shifts
// and coherences dropped.  Times in units of 1/Gamma0.

struct TwoAtomState {
  double rho22 = 0.0;
  double rho_ss = 0.0;
  double rho_aa = 0.0;
  double rho11 = 1.0;

  double trace() const { return rho22 + rho_ss + rho_aa + rho11; }

  void validate() const {
    for (double p : {rho22, rho_ss, rho_aa, rho11})
      if (!(p >= 0.0 && p <= 1.0)) throw InputError("populations must lie in [0, 1]");
    if (std::abs(trace() - 1.0) > 1e-12) throw InputError("populations must sum to 1");
  }

  static TwoAtomState doubly_excited() { return {1.0, 0.0, 0.0, 0.0}; }
  static TwoAtomState symmetric() { return {0.0, 1.0, 0.0, 0.0}; }
  static TwoAtomState antisymmetric() { return {0.0, 0.0, 1.0, 0.0}; }
};

struct Trajectory {
  std::vector<double> time;
  std::vector<TwoAtomState> states;
};

namespace detail {

inline void validate_rates(const RatePair& r) {
  if (!(r.gamma11 > 0.0)) throw InputError("gamma11 must be positive");
  if (!(std::abs(r.gamma12) <= r.gamma11))
    throw InputError("non-physical rates: |gamma12| must not exceed gamma11");
}

inline TwoAtomState cascade_rhs(const TwoAtomState& s, const RatePair& r) {
  const double up = r.gamma11 + r.gamma12;
  const double down = r.gamma11 - r.gamma12;
  return {-2.0 * r.gamma11 * s.rho22, -up * s.rho_ss + up * s.rho22,
          -down * s.rho_aa + down * s.rho22, up * s.rho_ss + down * s.rho_aa};
}

inline TwoAtomState axpy(const TwoAtomState& s, double h, const TwoAtomState& d) {
  return {s.rho22 + h * d.rho22, s.rho_ss + h * d.rho_ss, s.rho_aa + h * d.rho_aa,
          s.rho11 + h * d.rho11};
}

// (e^{-a t} - e^{-b t}) / (b - a), continuous through a = b.
inline double exp_difference(double a, double b, double t) {
  const double delta = b - a;
  if (std::abs(delta * t) < 1e-12) return t * std::exp(-a * t);
  return std::exp(-a * t) * (-std::expm1(-delta * t)) / delta;
}

}  // namespace detail

/// Classic fixed-step RK4 integration of the population cascade.  The final
/// step is shortened to land exactly on t_end.
inline Trajectory evolve(const TwoAtomState& state0, const RatePair& rates, double t_end,
                         double dt) {
  state0.validate();
  detail::validate_rates(rates);
  if (!(t_end >= 0.0)) throw InputError("t_end must be nonnegative");
  if (!(dt > 0.0) || dt > 0.01 / rates.gamma11 * (1.0 + 1e-12))
    throw InputError("time step must satisfy 0 < dt <= 0.01 / gamma11");

  Trajectory out;
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  out.time.reserve(steps + 1);
  out.states.reserve(steps + 1);
  out.time.push_back(0.0);
  out.states.push_back(state0);
  TwoAtomState s = state0;
  double t = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double h = std::min(dt, t_end - t);
    const auto k1 = detail::cascade_rhs(s, rates);
    const auto k2 = detail::cascade_rhs(detail::axpy(s, 0.5 * h, k1), rates);
    const auto k3 = detail::cascade_rhs(detail::axpy(s, 0.5 * h, k2), rates);
    const auto k4 = detail::cascade_rhs(detail::axpy(s, h, k3), rates);
    s = {s.rho22 + h / 6.0 * (k1.rho22 + 2.0 * k2.rho22 + 2.0 * k3.rho22 + k4.rho22),
         s.rho_ss + h / 6.0 * (k1.rho_ss + 2.0 * k2.rho_ss + 2.0 * k3.rho_ss + k4.rho_ss),
         s.rho_aa + h / 6.0 * (k1.rho_aa + 2.0 * k2.rho_aa + 2.0 * k3.rho_aa + k4.rho_aa),
         s.rho11 + h / 6.0 * (k1.rho11 + 2.0 * k2.rho11 + 2.0 * k3.rho11 + k4.rho11)};
    t = (i + 1 == steps) ? t_end : t + h;
    out.time.push_back(t);
    out.states.push_back(s);
  }
  return out;
}

/// Closed-form solution of the triangular linear cascade.
inline TwoAtomState analytic_solution(const TwoAtomState& state0, const RatePair& rates,
                                      double t) {
  state0.validate();
  detail::validate_rates(rates);
  const double g = rates.gamma11;
  const double up = g + rates.gamma12;
  const double down = g - rates.gamma12;
  TwoAtomState s;
  s.rho22 = state0.rho22 * std::exp(-2.0 * g * t);
  s.rho_ss = state0.rho_ss * std::exp(-up * t) +
             up * state0.rho22 * detail::exp_difference(up, 2.0 * g, t);
  s.rho_aa = state0.rho_aa * std::exp(-down * t) +
             down * state0.rho22 * detail::exp_difference(down, 2.0 * g, t);
  s.rho11 = 1.0 - s.rho22 - s.rho_ss - s.rho_aa;
  return s;
}

}  // namespace negqed

#endif  // NEGQED_DYNAMICS_HPP
