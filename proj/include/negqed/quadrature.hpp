#ifndef NEGQED_QUADRATURE_HPP
#define NEGQED_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <queue>
#include <vector>

#include "linalg.hpp"

namespace negqed {

/// Which k_perp windows a plane-wave integral covers.
enum class EvanescentMode {
  Auto,    // evanescent window only when the stack is lossy
  Always,  // both windows
  Never    // propagating window k_perp <= k only
};

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-13;
  int max_subdivisions = 4000;
  /// Initial truncation of the evanescent window, in units of k.
  double evanescent_cutoff = 12.0;
  /// Upper bound on evanescent window extensions before giving up.
  int max_tail_extensions = 60;
  EvanescentMode evanescent = EvanescentMode::Auto;
};

template <typename T>
struct IntegrationResult {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair (QUADPACK qk15 tables).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
struct Segment {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename T, typename F>
Segment<T> gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const T f1 = f(center - dx);
    const T f2 = f(center + dx);
    const T sum = f1 + f2;
    kronrod = kronrod + sum * kWgk[j];
    if (j % 2 == 1) gauss = gauss + sum * kWg[j / 2];
  }
  return {a, b, kronrod * half, max_abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
///
/// T is any vector-like value with +, -, scalar * and a max_abs() overload.
/// The interval is first split into `initial_pieces` equal parts, which keeps
/// oscillatory integrands from being accepted on a single lucky panel.
template <typename T, typename F>
IntegrationResult<T> integrate_adaptive(F&& f, double a, double b, double rel_tol,
                                        double abs_tol, int max_subdivisions,
                                        int initial_pieces = 1) {
  IntegrationResult<T> out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  initial_pieces = std::max(1, initial_pieces);
  std::priority_queue<detail::Segment<T>> heap;
  T total{};
  double total_err = 0.0;
  const double width = (b - a) / initial_pieces;
  for (int i = 0; i < initial_pieces; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == initial_pieces) ? b : lo + width;
    auto s = detail::gauss_kronrod_15<T>(f, lo, hi);
    total = total + s.value;
    total_err += s.error;
    heap.push(std::move(s));
  }
  int evaluations = 15 * initial_pieces;
  int segments = initial_pieces;
  auto tolerance = [&] { return std::max(abs_tol, rel_tol * max_abs(total)); };

  while (total_err > tolerance() && segments < max_subdivisions) {
    auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
    heap.pop();
    auto left = detail::gauss_kronrod_15<T>(f, worst.a, mid);
    auto right = detail::gauss_kronrod_15<T>(f, mid, worst.b);
    evaluations += 30;
    ++segments;
    total = total - worst.value + left.value + right.value;
    total_err += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
  }

  // Re-sum to shed the drift of the running updates.
  T resummed{};
  double err = 0.0;
  while (!heap.empty()) {
    resummed = resummed + heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = resummed;
  out.error = err;
  out.evaluations = evaluations;
  out.converged = err <= std::max(abs_tol, rel_tol * max_abs(resummed));
  return out;
}

/// Result of a k_perp (Sommerfeld) integral split into its two windows.
template <typename T>
struct SommerfeldResult {
  T value{};
  T propagating{};
  T evanescent{};
  double error = 0.0;
  double evanescent_extent = 0.0;  // largest k_perp / k reached
  bool evanescent_included = false;
  bool converged = false;
};

/// Evaluates  I = \int_0^\infty dk_perp (k_perp / k_z) F(k_perp, k_z)
/// with k_z = sqrt(k^2 - k_perp^2), Im k_z >= 0.
///
/// Propagating window: k_perp = k sin(theta), which cancels the 1/k_z branch
/// point.  Evanescent window: k_perp = k cosh(u), k_z = i k sinh(u), truncated
/// at cfg.evanescent_cutoff * k and extended chunk by chunk until a chunk adds
/// less than the tolerance.  `oscillation_hint` is the approximate number of
/// half-periods of the integrand across the propagating window.
template <typename T, typename F>
SommerfeldResult<T> sommerfeld_integrate(F&& integrand, double k, const QuadratureConfig& cfg,
                                         bool include_evanescent, double oscillation_hint = 0.0) {
  SommerfeldResult<T> out;
  const double half_pi = 0.5 * std::numbers::pi;

  auto propagating = [&](double theta) -> T {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    return integrand(k * s, cplx(k * c, 0.0)) * (k * s);
  };
  const int pieces = std::clamp(static_cast<int>(oscillation_hint) + 4, 4, 2000);
  auto prop = integrate_adaptive<T>(propagating, 0.0, half_pi, cfg.rel_tol, cfg.abs_tol,
                                    std::max(cfg.max_subdivisions, 2 * pieces), pieces);
  out.propagating = prop.value;
  out.error = prop.error;
  bool ok = prop.converged;

  if (include_evanescent) {
    out.evanescent_included = true;
    auto evanescent = [&](double u) -> T {
      const double ch = std::cosh(u);
      return integrand(k * ch, cplx(0.0, k * std::sinh(u))) * cplx(0.0, -k * ch);
    };
    const double u0 = std::acosh(std::max(cfg.evanescent_cutoff, 1.0 + 1e-12));
    // Adjacent chunks stay well resolved when they are a fixed size in u.
    auto head = integrate_adaptive<T>(evanescent, 0.0, u0, cfg.rel_tol, cfg.abs_tol,
                                      cfg.max_subdivisions, 16);
    T eva = head.value;
    double eva_err = head.error;
    ok = ok && head.converged;
    double u = u0;
    constexpr double kChunk = 0.5;
    bool tail_done = false;
    for (int i = 0; i < cfg.max_tail_extensions; ++i) {
      auto chunk = integrate_adaptive<T>(evanescent, u, u + kChunk, cfg.rel_tol, cfg.abs_tol,
                                         cfg.max_subdivisions, 2);
      u += kChunk;
      eva = eva + chunk.value;
      eva_err += chunk.error;
      ok = ok && chunk.converged;
      const double scale = max_abs(out.propagating + eva);
      if (max_abs(chunk.value) <= std::max(cfg.abs_tol, cfg.rel_tol * scale)) {
        tail_done = true;
        break;
      }
    }
    ok = ok && tail_done;
    out.evanescent = eva;
    out.error += eva_err;
    out.evanescent_extent = std::cosh(u);
  }
  out.value = out.propagating + out.evanescent;
  out.converged = ok || out.error <= std::max(cfg.abs_tol, cfg.rel_tol * max_abs(out.value));
  return out;
}

}  // namespace negqed

#endif  // NEGQED_QUADRATURE_HPP
