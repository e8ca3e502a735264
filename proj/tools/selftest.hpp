#ifndef NEGQED_TOOLS_SELFTEST_HPP
#define NEGQED_TOOLS_SELFTEST_HPP

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "emit.hpp"
#include "negqed/negqed.hpp"

namespace negqed::cli {

struct Anchor {
  std::string name;
  std::function<double()> measure;  // returns the deviation from the anchor
  double tolerance;
};

inline std::vector<Anchor> selftest_anchors() {
  std::vector<Anchor> a;
  a.push_back({"vacuum Im G_ii = 1", [] {
                 double dev = 0.0;
                 for (Vec3 o : {kAxisX, kAxisY, kAxisZ})
                   dev = std::max(dev, std::abs(single_atom_rate({0.0, MaterialSpec::vacuum()}, {{0, 0, 1}, o}) - 1.0));
                 return dev;
               }, 1e-8});
  a.push_back({"ideal index eps=mu=-1 gives n=-1", [] {
                 return std::abs(refractive_index(cplx(-1, 0), cplx(-1, 0)).n - cplx(-1, 0));
               }, 1e-12});
  a.push_back({"mirror focus Gamma_par = 0 (d=100)",
               [] { return std::abs(single_atom_rate(mirror_stack(100.0), {{0, 0, 100.0}, kAxisX})); }, 1e-6});
  a.push_back({"mirror focus Gamma_perp = 2 (d=100)",
               [] { return std::abs(single_atom_rate(mirror_stack(100.0), {{0, 0, 100.0}, kAxisZ}) - 2.0); }, 1e-6});
  a.push_back({"mirror profile equals bare mirror at z=0", [] {
                 double dev = 0.0;
                 const auto bare = mirror_stack(0.0, MaterialSpec::vacuum());
                 for (double dz : {0.3, 1.0, 2.5}) {
                   const double lhm = single_atom_rate(mirror_stack(10.0), {{0, 0, 10.0 + dz}, kAxisX});
                   const double ref = single_atom_rate(bare, {{0, 0, dz}, kAxisX});
                   dev = std::max(dev, std::abs(lhm - ref));
                 }
                 return dev;
               }, 1e-6});
  a.push_back({"lens focal pair Gamma12/Gamma11 = 1", [] {
                 double dev = 0.0;
                 for (double d : {1.0, 10.0, 100.0}) {
                   const auto [r1, r2] = focal_pair(d, 0.5 * d);
                   const auto st = lens_stack(d);
                   dev = std::max(dev, std::abs(cross_rate(st, {r1, kAxisX}, {r2, kAxisX}) /
                                                     single_atom_rate(st, {r1, kAxisX}) - 1.0));
                 }
                 return dev;
               }, 1e-6});
  a.push_back({"real cavity in vacuum = 1", [] { return std::abs(embedded_rate(1.0, 1.0, 0.01) - 1.0); }, 1e-14});
  a.push_back({"real cavity eps=4 -> 32/9 (Richardson)", [] {
                 const double r1 = embedded_rate(4.0, 1.0, 0.01), r2 = embedded_rate(4.0, 1.0, 0.005);
                 return std::abs((4.0 * r2 - r1) / 3.0 - 32.0 / 9.0) / (32.0 / 9.0);
               }, 1e-4});
  a.push_back({"real cavity eps=mu=-1 -> 9 (Richardson)", [] {
                 const double r1 = embedded_rate(-1.0, -1.0, 0.01), r2 = embedded_rate(-1.0, -1.0, 0.005);
                 return std::abs((4.0 * r2 - r1) / 3.0 - 9.0) / 9.0;
               }, 1e-4});
  a.push_back({"antisymmetric state trapped (gamma12=gamma11)", [] {
                 const auto s = analytic_solution(TwoAtomState::antisymmetric(), {1.0, 1.0}, 10.0);
                 return std::abs(s.rho_aa - 1.0);
               }, 1e-12});
  a.push_back({"symmetric state decays at 2 gamma11", [] {
                 const auto s = analytic_solution(TwoAtomState::symmetric(), {1.0, 1.0}, 3.0);
                 return std::abs(-std::log(s.rho_ss) / 3.0 - 2.0);
               }, 1e-10});
  a.push_back({"dispersion spectrum at omega0 = 1",
               [] { return std::abs(dispersion_spectrum(1.0, {45.0, 1.0}, {1.0}).front() - 1.0); }, 1e-6});
  return a;
}

inline bool run_selftest(std::ostream& os) {
  bool all = true;
  for (const auto& anchor : selftest_anchors()) {
    std::string status, detail;
    try {
      const double dev = anchor.measure();
      const bool ok = dev <= anchor.tolerance;
      all = all && ok;
      status = ok ? "PASS" : "FAIL";
      detail = "deviation=" + format_number(dev) + " tol=" + format_number(anchor.tolerance);
    } catch (const std::exception& e) {
      all = false;
      status = "FAIL";
      detail = std::string("error: ") + e.what();
    }
    os << status << "  " << anchor.name << "  (" << detail << ")\n";
  }
  return all;
}

}  // namespace negqed::cli

#endif  // NEGQED_TOOLS_SELFTEST_HPP
