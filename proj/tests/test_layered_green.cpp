#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "negqed/layered_green.hpp"
#include "oracles.hpp"

using namespace negqed;

namespace {

const cplx I(0.0, 1.0);

LayerStack vacuum_mirror(double d = 0.0) { return {d, MaterialSpec::vacuum(), Backing::PerfectMirror}; }
LayerStack ideal_lens(double d) {
  return {d, MaterialSpec::fixed({-1.0, 0.0}, {-1.0, 0.0}), Backing::Vacuum};
}

QuadratureConfig always(double rel = 1e-9) {
  QuadratureConfig c;
  c.rel_tol = rel;
  c.evanescent = EvanescentMode::Always;
  return c;
}

// Reflected part of the mirror Green tensor: an image dipole diag(-1, -1, 1)
// at the mirror image of the source.
oracle::Mat3 mirror_image(const Vec3& r, const Vec3& rp, double plane) {
  const Vec3 img{rp.x, rp.y, 2.0 * plane - rp.z};
  auto g = oracle::vacuum({r.x - img.x, r.y - img.y, r.z - img.z});
  for (auto& row : g) {
    row[0] = -row[0];
    row[1] = -row[1];
  }
  return g;
}

double max_diff(const Tensor3& a, const oracle::Mat3& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m = std::max(m, std::abs(a(i, j) - b[i][j]));
  return m;
}

double max_diff(const Tensor3& a, const Tensor3& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 9; ++i) m = std::max(m, std::abs(a.m[i] - b.m[i]));
  return m;
}

}  // namespace

TEST(Interface, IdenticalMediaGiveZero) {
  for (double kp : {0.0, 0.4, 0.99, 1.7}) {
    const auto c = interface_coeffs({2.0, 0.1}, {1.5, 0.0}, {2.0, 0.1}, {1.5, 0.0}, kp, 1.0);
    EXPECT_NEAR(std::abs(c.r), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.s), 0.0, 1e-15);
  }
}

TEST(Interface, VacuumToMatchedNegativeIsReflectionless) {
  for (double kp : {0.0, 0.5, 0.9}) {
    const auto c = interface_coeffs(1.0, 1.0, -1.0, -1.0, kp, 1.0);
    EXPECT_NEAR(std::abs(c.r), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.s), 0.0, 1e-15);
  }
}

TEST(Interface, NormalIncidenceDielectric) {
  // eps = 4: n = 2, R01 = (1 - 2)/(1 + 2), S01 = (4 - 2)/(4 + 2)
  const auto c = interface_coeffs(1.0, 1.0, 4.0, 1.0, 0.0, 1.0);
  EXPECT_NEAR(std::abs(c.r - (-1.0 / 3.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c.s - (1.0 / 3.0)), 0.0, 1e-15);
}

TEST(Interface, SurfacePoleThrows) {
  // eps = mu = -1 against vacuum: the TE denominator vanishes for every
  // evanescent k_perp.
  EXPECT_THROW(interface_coeffs(1.0, 1.0, -1.0, -1.0, 2.0, 1.0), PoleError);
}

TEST(WaveComponents, LeftHandedAxialSign) {
  const auto w = wave_components(ideal_lens(1.0), 0.6, 1.0);
  EXPECT_EQ(w.p, -1);
  EXPECT_NEAR(std::abs(w.k_1z + w.k_z), 0.0, 1e-15);
  const auto v = wave_components(vacuum_mirror(1.0), 0.6, 1.0);
  EXPECT_EQ(v.p, 1);
  EXPECT_NEAR(std::abs(v.k_1z - 0.8), 0.0, 1e-15);
}

TEST(SlabCoeffs, IdealLensTransmission) {
  const double d = 1.3;
  for (double kp : {0.0, 0.3, 0.95}) {
    const auto f = slab_coeffs(ideal_lens(d), kp, 1.0);
    const cplx expected = std::exp(-2.0 * I * std::sqrt(1.0 - kp * kp) * d);
    EXPECT_NEAR(std::abs(f.r_te), 0.0, 1e-14) << kp;
    EXPECT_NEAR(std::abs(f.r_tm), 0.0, 1e-14) << kp;
    EXPECT_NEAR(std::abs(f.t_te - expected), 0.0, 1e-12) << kp;
    EXPECT_NEAR(std::abs(f.t_tm - expected), 0.0, 1e-12) << kp;
  }
  // evanescent waves of the exact lens sit on the surface pole
  EXPECT_THROW(slab_coeffs(ideal_lens(d), 1.2, 1.0), PoleError);
}

TEST(SlabCoeffs, NearIdealLensAmplifiesEvanescentWaves) {
  const double d = 1.3;
  const LayerStack s{d, MaterialSpec::fixed({-1.0, 1e-9}, {-1.0, 1e-9}), Backing::Vacuum};
  for (double kp : {1.2, 2.0}) {
    const double kappa = std::sqrt(kp * kp - 1.0);
    const auto f = slab_coeffs(s, kp, 1.0);
    const double expected = std::exp(2.0 * kappa * d);
    EXPECT_NEAR(std::abs(f.t_te), expected, 1e-4 * expected) << kp;
    EXPECT_NEAR(std::abs(f.t_tm), expected, 1e-4 * expected) << kp;
  }
}

TEST(SlabCoeffs, ZeroThicknessIsTransparent) {
  const LayerStack s{0.0, MaterialSpec::fixed({3.0, 0.2}, {1.0, 0.0}), Backing::Vacuum};
  for (double kp : {0.0, 0.5, 1.5}) {
    const auto f = slab_coeffs(s, kp, 1.0);
    EXPECT_NEAR(std::abs(f.r_te), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(f.r_tm), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(f.t_te - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(f.t_tm - 1.0), 0.0, 1e-14);
  }
}

TEST(SlabCoeffs, VacuumSlabOnMirror) {
  const double d = 0.7;
  for (double kp : {0.0, 0.6, 1.4}) {
    const auto f = slab_coeffs(vacuum_mirror(d), kp, 1.0);
    const cplx kz = kp <= 1.0 ? cplx(std::sqrt(1.0 - kp * kp), 0.0) : cplx(0.0, std::sqrt(kp * kp - 1.0));
    const cplx phase = std::exp(2.0 * I * kz * d);
    EXPECT_NEAR(std::abs(f.r_te + phase), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(f.r_tm - phase), 0.0, 1e-14);
  }
}

TEST(SlabCoeffs, PropertyLosslessEnergyConservation) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double sign = u(rng) < 0.5 ? -1.0 : 1.0;
    const cplx eps(sign * (0.2 + 4.0 * u(rng)), 0.0), mu(sign * (0.2 + 4.0 * u(rng)), 0.0);
    const LayerStack s{3.0 * u(rng), MaterialSpec::fixed(eps, mu), Backing::Vacuum};
    const double kp = 0.999 * u(rng);
    FresnelSet f;
    try {
      f = slab_coeffs(s, kp, 1.0);
    } catch (const PoleError&) {
      continue;
    }
    EXPECT_NEAR(std::norm(f.r_te) + std::norm(f.t_te), 1.0, 1e-10) << eps << mu << kp;
    EXPECT_NEAR(std::norm(f.r_tm) + std::norm(f.t_tm), 1.0, 1e-10) << eps << mu << kp;
  }
}

TEST(SlabCoeffs, PropertyPassiveLossyAbsorbs) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const cplx eps(-3.0 + 6.0 * u(rng), 0.01 + u(rng)), mu(-3.0 + 6.0 * u(rng), 0.01 + u(rng));
    const LayerStack s{0.1 + 2.0 * u(rng), MaterialSpec::fixed(eps, mu), Backing::Vacuum};
    const auto f = slab_coeffs(s, 0.999 * u(rng), 1.0);
    EXPECT_LT(std::norm(f.r_te) + std::norm(f.t_te), 1.0);
    EXPECT_LT(std::norm(f.r_tm) + std::norm(f.t_tm), 1.0);
  }
}

TEST(Green, VacuumCoincidentIsIdentity) {
  const LayerStack s{};
  const auto g = green(s, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}, 1.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(g.value(i, j).imag(), i == j ? 1.0 : 0.0, 1e-12);
}

TEST(Green, UnitSlabEqualsVacuum) {
  const LayerStack s{2.0, MaterialSpec::fixed(1.0, 1.0), Backing::Vacuum};
  const Vec3 front{0.3, -0.2, 0.8}, other{-0.5, 0.4, 1.1}, back{0.7, 0.1, -3.4};
  const auto cfg = always();
  const auto same = green(s, front, other, 1.0, cfg);
  EXPECT_LT(max_diff(same.value, oracle::vacuum({0.8, -0.6, -0.3})), 1e-12);
  const auto cross = green(s, back, front, 1.0, cfg);
  EXPECT_TRUE(cross.evanescent_included);
  EXPECT_LT(max_diff(cross.value, oracle::vacuum({0.4, 0.3, -4.2})), 1e-8);
}

TEST(Green, MirrorMatchesImageDipole) {
  const auto cfg = always(1e-10);
  for (double h : {0.2, 0.5, 1.0, 3.0}) {
    const Vec3 r{0.0, 0.0, h};
    const auto g = green(vacuum_mirror(), r, r, 1.0, cfg);
    for (std::size_t a = 0; a < 3; ++a)
      EXPECT_NEAR(g.value(a, a).imag(), oracle::mirror_rate(h, static_cast<int>(a)), 1e-9) << h;
  }
}

TEST(Green, MirrorImageOffDiagonalAndLateral) {
  const auto cfg = always(1e-10);
  const Vec3 rp{0.1, -0.3, 0.6};
  for (Vec3 r : {Vec3{0.9, 0.5, 0.4}, Vec3{3.0, -2.0, 0.7}, Vec3{-0.2, 0.1, 1.5}}) {
    const auto g = green(vacuum_mirror(), r, rp, 1.0, cfg);
    auto ref = oracle::vacuum({r.x - rp.x, r.y - rp.y, r.z - rp.z});
    const auto img = mirror_image(r, rp, 0.0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) ref[i][j] += img[i][j];
    EXPECT_LT(max_diff(g.value, ref), 1e-8);
  }
}

TEST(Green, VacuumSlabShiftsMirrorPlane) {
  const double d = 0.8, h = 0.45;
  const Vec3 r{0.0, 0.0, h};
  const auto g = green(vacuum_mirror(d), r, r, 1.0, always());
  for (std::size_t a = 0; a < 3; ++a)
    EXPECT_NEAR(g.value(a, a).imag(), oracle::mirror_rate(h + d, static_cast<int>(a)), 1e-9);
}

TEST(Green, LateralOffsetDecaysToVacuum) {
  // Reflected contribution to Im G between laterally separated points falls
  // off with the offset; what remains tracks the direct vacuum term.
  const Vec3 rp{0.0, 0.0, 0.5};
  double prev = 1e9;
  for (double x : {2.0, 8.0, 32.0}) {
    const Vec3 r{x, 0.0, 0.5};
    const auto g = green(vacuum_mirror(), r, rp, 1.0, always());
    const auto vac = oracle::vacuum({x, 0.0, 0.0});
    const double refl = std::abs(g.value(2, 2).imag() - vac[2][2].imag());
    EXPECT_LT(refl, prev);
    prev = refl;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(Green, PropertyReciprocity) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-10;
  for (int i = 0; i < 12; ++i) {
    const cplx eps(-2.0 + 4.0 * u(rng), 0.05 + 0.5 * u(rng)), mu(-2.0 + 4.0 * u(rng), 0.05 + 0.5 * u(rng));
    const double d = 0.2 + u(rng);
    const LayerStack s{d, MaterialSpec::fixed(eps, mu), i % 2 ? Backing::PerfectMirror : Backing::Vacuum};
    const Vec3 r{u(rng) - 0.5, u(rng) - 0.5, 0.3 + u(rng)};
    const Vec3 rp{u(rng) - 0.5, u(rng) - 0.5, 0.3 + u(rng)};
    const auto a = green(s, r, rp, 1.0, cfg).value;
    const auto b = green(s, rp, r, 1.0, cfg).value.transposed();
    EXPECT_LT(max_diff(a, b), 1e-8 * std::max(1.0, max_abs(a))) << eps << mu << d;
    if (s.backing == Backing::Vacuum) {
      const Vec3 q{u(rng) - 0.5, u(rng) - 0.5, -d - 0.3 - u(rng)};
      const auto c = green(s, q, r, 1.0, cfg).value;
      const auto e = green(s, r, q, 1.0, cfg).value.transposed();
      EXPECT_LT(max_diff(c, e), 1e-8 * std::max(1.0, max_abs(c)));
      const auto back = green(s, q, q, 1.0, cfg).value;
      EXPECT_LT(max_diff(back, back.transposed()), 1e-8 * max_abs(back));
    }
  }
}

TEST(Green, LossySelfConvergence) {
  const LayerStack s{0.6, MaterialSpec::fixed({-1.0, 0.05}, {-1.0, 0.05}), Backing::PerfectMirror};
  const Vec3 r{0.0, 0.0, 0.6};
  QuadratureConfig a, b;
  a.rel_tol = 1e-8;
  b.rel_tol = 5e-9;
  const auto ga = green(s, r, r, 1.0, a);
  const auto gb = green(s, r, r, 1.0, b);
  EXPECT_TRUE(ga.evanescent_included);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_NEAR(ga.value(i, i).imag(), gb.value(i, i).imag(), 1e-6 * std::abs(gb.value(i, i).imag()));
}

TEST(Green, BoundModePolicy) {
  const LayerStack guiding{1.0, MaterialSpec::fixed(4.0, 1.0), Backing::Vacuum};
  const Vec3 r{0.0, 0.0, 0.5};
  EXPECT_THROW(green(guiding, r, r, 1.0), BoundModeError);
  QuadratureConfig never;
  never.evanescent = EvanescentMode::Never;
  const auto g = green(guiding, r, r, 1.0, never);
  EXPECT_FALSE(g.evanescent_included);
  EXPECT_GT(g.value(0, 0).imag(), 0.0);
}

TEST(Green, InputErrors) {
  const auto lens = ideal_lens(1.0);
  EXPECT_THROW(green(lens, {0.0, 0.0, -0.5}, {0.0, 0.0, 1.0}, 1.0), InputError);
  EXPECT_THROW(green(vacuum_mirror(1.0), {0.0, 0.0, -2.0}, {0.0, 0.0, 1.0}, 1.0), InputError);
  EXPECT_THROW(green(lens, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}, 0.0), InputError);
  EXPECT_THROW(green(LayerStack{-1.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}, 1.0), InputError);
}
