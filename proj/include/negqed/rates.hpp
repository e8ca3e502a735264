#ifndef NEGQED_RATES_HPP
#define NEGQED_RATES_HPP

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "layered_green.hpp"
#include "linalg.hpp"

namespace negqed {

/// Two-level emitter: position in c/omega_ref, unit orientation of the
/// transition dipole, transition frequency in omega_ref.
struct Dipole {
  Vec3 position;
  Vec3 orientation{1.0, 0.0, 0.0};
  double omega_a = 1.0;

  void validate() const {
    if (std::abs(norm(orientation) - 1.0) > 1e-9)
      throw InputError("dipole orientation must be a unit vector");
    if (!(omega_a > 0.0)) throw InputError("transition frequency must be positive");
  }
};

inline constexpr Vec3 kAxisX{1.0, 0.0, 0.0};
inline constexpr Vec3 kAxisY{0.0, 1.0, 0.0};
inline constexpr Vec3 kAxisZ{0.0, 0.0, 1.0};

/// Rates in units of the free-space rate Gamma0.
struct RatePair {
  double gamma11 = 1.0;
  double gamma12 = 0.0;
};

/// Ideal n = -1 slab (eps = mu = -1, lossless limit).
inline MaterialSpec ideal_lhm() { return MaterialSpec::fixed({-1.0, 0.0}, {-1.0, 0.0}); }

/// Slab of thickness d in front of a perfect mirror.
inline LayerStack mirror_stack(double d, const MaterialSpec& slab = ideal_lhm()) {
  return {d, slab, Backing::PerfectMirror};
}

/// Free-standing slab (Veselago-Pendry lens when slab = ideal_lhm()).
inline LayerStack lens_stack(double d, const MaterialSpec& slab = ideal_lhm()) {
  return {d, slab, Backing::Vacuum};
}

/// Gamma / Gamma0 = o_i Im G_ij(r_A, r_A) o_j with G in units of k/(6 pi).
inline double single_atom_rate(const LayerStack& stack, const Dipole& dipole,
                               const QuadratureConfig& cfg = {}) {
  dipole.validate();
  const auto g = green(stack, dipole.position, dipole.position, dipole.omega_a, cfg);
  return g.value.contract(dipole.orientation, dipole.orientation).imag();
}

/// Gamma12 / Gamma0 = o1_i Im G_ij(r1, r2) o2_j.
inline double cross_rate(const LayerStack& stack, const Dipole& first, const Dipole& second,
                         const QuadratureConfig& cfg = {}) {
  first.validate();
  second.validate();
  if (first.omega_a != second.omega_a)
    throw InputError("cross_rate: both emitters need the same transition frequency");
  const auto g = green(stack, first.position, second.position, first.omega_a, cfg);
  return g.value.contract(first.orientation, second.orientation).imag();
}

/// Rates of two identically oriented emitters.
inline RatePair rate_pair(const LayerStack& stack, const Dipole& first, const Dipole& second,
                          const QuadratureConfig& cfg = {}) {
  return {single_atom_rate(stack, first, cfg), cross_rate(stack, first, second, cfg)};
}

struct ProfilePoint {
  double offset = 0.0;
  double rate = 0.0;  // NaN when `error` is set
  std::string error;
};

/// Gamma/Gamma0 of an atom at z = d + offset in front of an ideal-LHM-coated
/// mirror; offset 0 is the focus, optical distance zero from the mirror.
inline std::vector<ProfilePoint> mirror_profile(double d, const std::vector<double>& offsets,
                                                Vec3 orientation,
                                                const QuadratureConfig& cfg = {},
                                                const MaterialSpec& slab = ideal_lhm()) {
  const auto stack = mirror_stack(d, slab);
  std::vector<ProfilePoint> out;
  out.reserve(offsets.size());
  for (double dz : offsets) {
    ProfilePoint p{dz, 0.0, {}};
    try {
      p.rate = single_atom_rate(stack, {{0.0, 0.0, d + dz}, orientation}, cfg);
    } catch (const std::exception& e) {
      p.rate = std::nan("");
      p.error = e.what();
    }
    out.push_back(std::move(p));
  }
  return out;
}

/// Focal pair of a lens of thickness d with the first atom at distance
/// `front_gap` before the slab; the image point lies 2d further down.
inline std::pair<Vec3, Vec3> focal_pair(double d, double front_gap) {
  return {{0.0, 0.0, front_gap}, {0.0, 0.0, front_gap - 2.0 * d}};
}

struct MapPoint {
  double x = 0.0;
  double z = 0.0;
  double ratio = 0.0;  // NaN when `error` is set
  std::string error;
};

/// Gamma12/Gamma11 with atom 1 at distance d/2 before an ideal lens and
/// atom 2 displaced by (x, 0, z) from its focal image.
inline std::vector<MapPoint> lens_map(double d, const std::vector<double>& x_grid,
                                      const std::vector<double>& z_grid, Vec3 orientation,
                                      const QuadratureConfig& cfg = {},
                                      const MaterialSpec& slab = ideal_lhm()) {
  const auto stack = lens_stack(d, slab);
  const auto [r1, image] = focal_pair(d, 0.5 * d);
  const Dipole first{r1, orientation};
  std::vector<MapPoint> out;
  out.reserve(x_grid.size() * z_grid.size());
  double gamma11 = std::nan("");
  std::string gamma11_error;
  try {
    gamma11 = single_atom_rate(stack, first, cfg);
  } catch (const std::exception& e) {
    gamma11_error = e.what();
  }
  for (double x : x_grid)
    for (double z : z_grid) {
      MapPoint p{x, z, std::nan(""), gamma11_error};
      if (gamma11_error.empty()) {
        try {
          const Dipole second{image + Vec3{x, 0.0, z}, orientation};
          p.ratio = cross_rate(stack, first, second, cfg) / gamma11;
        } catch (const std::exception& e) {
          p.error = e.what();
        }
      }
      out.push_back(std::move(p));
    }
  return out;
}

}  // namespace negqed

#endif  // NEGQED_RATES_HPP
