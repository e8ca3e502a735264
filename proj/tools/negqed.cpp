// negqed: spontaneous emission and two-atom coupling near negative-index slabs.
//
// Units: frequencies in omega_ref, lengths in c/omega_ref (so lambda/2pi = 1
// at omega = 1), rates in units of the free-space rate Gamma0.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emit.hpp"
#include "negqed/negqed.hpp"
#include "selftest.hpp"

namespace negqed::cli {
namespace {

constexpr const char* kTolEnv = "NEGQED_REL_TOL";

double default_rel_tol() {
  if (const char* env = std::getenv(kTolEnv); env && *env) {
    const double v = parse_double(env, kTolEnv);
    if (!(v > 0.0 && v < 1.0)) throw InputError(std::string(kTolEnv) + " must lie in (0, 1)");
    return v;
  }
  return QuadratureConfig{}.rel_tol;
}

// Options shared by every computing subcommand.
struct Common {
  std::string out = "-";
  std::string format;
  std::string config_path;
  double rel_tol = 1e-8;
  std::string evanescent = "auto";
  ConfigFile config;

  QuadratureConfig quadrature() const {
    QuadratureConfig q;
    q.rel_tol = rel_tol;
    if (evanescent == "always")
      q.evanescent = EvanescentMode::Always;
    else if (evanescent == "never")
      q.evanescent = EvanescentMode::Never;
    return q;
  }
};

void add_common(CLI::App* sub, Common& c, const std::string& default_format, double rel_tol,
                const std::string& default_evanescent = "auto") {
  c.format = default_format;
  c.rel_tol = rel_tol;
  c.evanescent = default_evanescent;
  sub->add_option("-o,--out", c.out, "Output path ('-' for stdout)")->capture_default_str();
  sub->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("--config", c.config_path,
                  "Key-value file: [electric]/[magnetic] material sections and a section named "
                  "after the subcommand whose keys set options not given on the command line");
  sub->add_option("--rel-tol", c.rel_tol,
                  std::string("Relative quadrature tolerance (default from ") + kTolEnv + ")")
      ->check(CLI::Range(1e-14, 0.1))
      ->capture_default_str();
  sub->add_option("--evanescent", c.evanescent, "Evanescent k_perp window: auto|always|never")
      ->check(CLI::IsMember({"auto", "always", "never"}))
      ->capture_default_str();
}

// Applies [<subcommand>] config keys to options the user did not set.
void apply_config(CLI::App* sub, Common& c) {
  if (c.config_path.empty()) return;
  c.config = load_config(c.config_path);
  const auto it = c.config.find(sub->get_name());
  if (it == c.config.end()) return;
  for (const auto& [key, value] : it->second) {
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt || key == "config")
      throw InputError("config [" + sub->get_name() + "]: unknown option '" + key + "'");
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

Format format_of(const Common& c) { return c.format == "json" ? Format::Json : Format::Csv; }

void stamp(Table& t, const std::string& command, const Common& c) {
  t.add_meta("command", command);
  t.add_meta("version", kVersion);
  t.add_meta("units", "omega in omega_ref; lengths in c/omega_ref (lambda/2pi at omega=1); rates in Gamma0");
  t.add_meta("rel_tol", format_number(c.rel_tol));
  t.add_meta("evanescent", c.evanescent);
}

Vec3 parse_orientation(const std::string& s) {
  if (s == "x") return kAxisX;
  if (s == "y") return kAxisY;
  if (s == "z") return kAxisZ;
  const auto v = parse_grid(s, "orientation");
  if (v.size() != 3) throw InputError("orientation must be x, y, z or 'a,b,c'");
  const Vec3 o{v[0], v[1], v[2]};
  const double n = norm(o);
  if (!(n > 0.0)) throw InputError("orientation must be nonzero");
  return (1.0 / n) * o;
}

Vec3 parse_point(const std::string& s, const char* what) {
  const auto v = parse_grid(s, what);
  if (v.size() != 3) throw InputError(std::string(what) + " must be 'x,y,z'");
  return {v[0], v[1], v[2]};
}

std::string fmt_response(const Response& r) {
  if (const auto* lp = std::get_if<LorentzParams>(&r))
    return "lorentz(omega_P=" + format_number(lp->omega_p) + " omega_T=" + format_number(lp->omega_t) +
           " gamma=" + format_number(lp->gamma) + ")";
  const cplx v = std::get<cplx>(r);
  return "fixed(" + format_number(v.real()) + "," + format_number(v.imag()) + ")";
}

void stamp_material(Table& t, const std::string& prefix, const MaterialSpec& m) {
  t.add_meta(prefix + "electric", fmt_response(m.electric));
  t.add_meta(prefix + "magnetic", fmt_response(m.magnetic));
}

// Slab for mirror/lens/cross: ideal n = -1 unless --n-imag or config sections say otherwise.
MaterialSpec slab_material(const Common& c, const std::optional<double>& n_imag) {
  const bool from_config = c.config.count("electric") || c.config.count("magnetic");
  if (n_imag && from_config)
    throw InputError("--n-imag and [electric]/[magnetic] config sections are mutually exclusive");
  if (n_imag) return absorbing_lhm(*n_imag);
  return material_from_config(c.config, ideal_lhm());
}

MaterialSpec figure_material() {
  return MaterialSpec::lorentz({0.46, 1.0, 0.01}, {0.46, 1.05, 0.01});
}

struct Outcome {
  Table table;
  std::size_t failed = 0;
  std::string first_error;

  void record(const std::string& err) {
    if (err.empty()) return;
    if (failed++ == 0) first_error = err;
  }
};

// ---------------------------------------------------------------------------

Outcome run_material(const Common& c, const std::string& grid) {
  const auto spec = material_from_config(c.config, figure_material());
  Outcome o;
  auto& t = o.table;
  stamp(t, "material", c);
  stamp_material(t, "", spec);
  t.columns = {"omega", "eps_re", "eps_im", "mu_re", "mu_im", "n_re", "n_im", "left_handed",
               "energy_valid"};
  for (double w : parse_grid(grid, "--omega")) {
    const cplx e = permittivity(spec, w), m = permeability(spec, w);
    const auto n = refractive_index(e, m);
    const auto en = dispersion_energy_check(spec, w);
    t.rows.push_back({w, e.real(), e.imag(), m.real(), m.imag(), n.n.real(), n.n.imag(),
                      n.left_handed ? 1.0 : 0.0, en.valid ? 1.0 : 0.0});
  }
  return o;
}

Outcome run_embedded(const Common& c, const std::string& grid, double rho) {
  const auto spec = material_from_config(c.config, figure_material());
  Outcome o;
  auto& t = o.table;
  stamp(t, "embedded", c);
  stamp_material(t, "host.", spec);
  t.add_meta("rho", format_number(rho));
  t.columns = {"omega", "eps_re", "eps_im", "mu_re", "mu_im", "rate"};
  for (const auto& p : resonance_sweep(spec, parse_grid(grid, "--omega"), rho)) {
    o.record(p.error);
    t.rows.push_back({p.omega, p.eps.real(), p.eps.imag(), p.mu.real(), p.mu.imag(), p.rate});
  }
  return o;
}

Outcome run_mirror(const Common& c, double d, const std::string& orientation, const std::string& grid,
                   const std::optional<double>& n_imag) {
  const auto slab = slab_material(c, n_imag);
  Outcome o;
  auto& t = o.table;
  stamp(t, "mirror", c);
  stamp_material(t, "slab.", slab);
  t.add_meta("d", format_number(d));
  t.add_meta("orientation", orientation);
  t.add_meta("geometry", "slab -d<=z<=0 on a perfect mirror at z=-d; atom at z=d+offset");
  t.columns = {"offset", "z", "rate"};
  for (const auto& p : mirror_profile(d, parse_grid(grid, "--zgrid"), parse_orientation(orientation),
                                      c.quadrature(), slab)) {
    o.record(p.error);
    t.rows.push_back({p.offset, d + p.offset, p.rate});
  }
  return o;
}

Outcome run_lens(const Common& c, double d, const std::string& orientation, const std::string& map,
                 const std::string& xgrid, const std::string& zgrid, const std::optional<double>& n_imag) {
  const auto slab = slab_material(c, n_imag);
  const auto xs = parse_grid(xgrid.empty() ? map : xgrid, "--xgrid");
  const auto zs = parse_grid(zgrid.empty() ? map : zgrid, "--zgrid");
  Outcome o;
  auto& t = o.table;
  stamp(t, "lens", c);
  stamp_material(t, "slab.", slab);
  t.add_meta("d", format_number(d));
  t.add_meta("orientation", orientation);
  t.add_meta("geometry",
             "slab -d<=z<=0, vacuum behind; atom 1 at z=d/2, atom 2 at (x, 0, d/2-2d+z)");
  t.columns = {"x", "z", "ratio"};
  for (const auto& p : lens_map(d, xs, zs, parse_orientation(orientation), c.quadrature(), slab)) {
    o.record(p.error);
    t.rows.push_back({p.x, p.z, p.ratio});
  }
  return o;
}

Outcome run_cross(const Common& c, double d, const std::string& backing, const std::string& r1,
                  const std::string& r2, const std::string& o1, const std::string& o2, double omega,
                  bool tensor, const std::optional<double>& n_imag) {
  const auto slab = slab_material(c, n_imag);
  LayerStack stack{d, slab, backing == "mirror" ? Backing::PerfectMirror : Backing::Vacuum};
  const Dipole a{parse_point(r1, "--r1"), parse_orientation(o1), omega};
  const Dipole b{parse_point(r2, "--r2"), parse_orientation(o2), omega};
  const auto q = c.quadrature();
  Outcome o;
  auto& t = o.table;
  stamp(t, "cross", c);
  stamp_material(t, "slab.", slab);
  t.add_meta("d", format_number(d));
  t.add_meta("backing", backing);
  t.add_meta("omega", format_number(omega));
  t.add_meta("r1", r1);
  t.add_meta("r2", r2);
  t.columns = {"gamma11", "gamma22", "gamma12"};
  std::vector<double> row = {single_atom_rate(stack, a, q), single_atom_rate(stack, b, q),
                             cross_rate(stack, a, b, q)};
  if (tensor) {
    const auto g = green(stack, a.position, b.position, omega, q);
    const char* axes = "xyz";
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const std::string name = std::string("G_") + axes[i] + axes[j];
        t.columns.push_back(name + "_re");
        t.columns.push_back(name + "_im");
        row.push_back(g.value(i, j).real());
        row.push_back(g.value(i, j).imag());
      }
  }
  t.rows.push_back(std::move(row));
  return o;
}

TwoAtomState parse_state(const std::string& s) {
  if (s == "22") return TwoAtomState::doubly_excited();
  if (s == "s") return TwoAtomState::symmetric();
  if (s == "a") return TwoAtomState::antisymmetric();
  const auto v = parse_grid(s, "--initial");
  if (v.size() != 4) throw InputError("--initial must be 22, s, a or 'rho22,rho_ss,rho_aa,rho11'");
  TwoAtomState st{v[0], v[1], v[2], v[3]};
  st.validate();
  return st;
}

Outcome run_dynamics(const Common& c, double g11, double g12, const std::string& initial, double t_end,
                     double dt, int every, bool analytic) {
  const RatePair rates{g11, g12};
  const auto traj = evolve(parse_state(initial), rates, t_end, dt);
  Outcome o;
  auto& t = o.table;
  stamp(t, "dynamics", c);
  t.add_meta("gamma11", format_number(g11));
  t.add_meta("gamma12", format_number(g12));
  t.add_meta("initial", initial);
  t.add_meta("dt", format_number(dt));
  t.add_meta("integrator", "rk4 fixed step");
  t.columns = {"t", "rho22", "rho_ss", "rho_aa", "rho11"};
  if (analytic)
    for (const char* n : {"exact_rho22", "exact_rho_ss", "exact_rho_aa", "exact_rho11"})
      t.columns.push_back(n);
  const std::size_t last = traj.time.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    if (i % static_cast<std::size_t>(every) != 0 && i != last) continue;
    const auto& s = traj.states[i];
    std::vector<double> row = {traj.time[i], s.rho22, s.rho_ss, s.rho_aa, s.rho11};
    if (analytic) {
      const auto e = analytic_solution(traj.states.front(), rates, traj.time[i]);
      row.insert(row.end(), {e.rho22, e.rho_ss, e.rho_aa, e.rho11});
    }
    t.rows.push_back(std::move(row));
  }
  return o;
}

Outcome run_absorption(const Common& c, const std::string& system, const std::string& d_list,
                       const std::string& grid, double fit_max) {
  const auto ds = parse_grid(d_list, "--d");
  const auto ni = parse_grid(grid, "--n-imag-grid");
  const bool lens = system == "lens";
  const auto q = c.quadrature();
  const auto curves = lens ? absorption_sweep_lens(ds, ni, q) : absorption_sweep_mirror(ds, ni, q);
  Outcome o;
  auto& t = o.table;
  stamp(t, "absorption", c);
  t.add_meta("system", system);
  t.add_meta("slab", "eps=mu=-1+i*n_imag (n=-1+i*n_imag)");
  t.add_meta("quantity", lens ? "Gamma12/Gamma11, focal pair at d/2, x dipoles"
                              : "Gamma_par/Gamma0 at the focus z=d");
  t.add_meta("fit", lens ? "log(value) vs n_imag*k0*d" : "log(1-value) vs n_imag*k0*d");
  t.columns = {"d", "n_imag", "value"};
  for (const auto& cv : curves) {
    try {
      const auto f = fit_attenuation(cv, lens ? AbsorptionSystem::Lens : AbsorptionSystem::Mirror, fit_max);
      t.add_meta("fit[d=" + format_number(cv.d) + "]",
                 "slope=" + format_number(f.slope) + " intercept=" + format_number(f.intercept) +
                     " r2=" + format_number(f.r_squared) + " points=" + std::to_string(f.points));
    } catch (const InputError&) {
      t.add_meta("fit[d=" + format_number(cv.d) + "]", "insufficient points");
    }
    for (std::size_t i = 0; i < cv.n_imag.size(); ++i) {
      o.record(cv.errors[i]);
      t.rows.push_back({cv.d, cv.n_imag[i], cv.value[i]});
    }
  }
  return o;
}

Outcome run_aperture(const Common& c, const std::string& system, double d, const std::string& agrid,
                     const std::string& extent) {
  const auto as = parse_grid(agrid, system == "lens" ? "--ratio-grid" : "--agrid");
  const auto q = c.quadrature();
  Outcome o;
  auto& t = o.table;
  stamp(t, "aperture", c);
  t.add_meta("system", system);
  t.add_meta("d", format_number(d));
  t.add_meta("model", "ray-optics estimate: hard k_perp cutoff, valid for d >> lambda");
  std::string warning;
  if (system == "lens") {
    t.add_meta("quantity", "Gamma12/Gamma11, symmetric focal pair (gaps d/2), x dipoles");
    t.columns = {"a_over_d", "a", "cutoff_k_perp", "ratio"};
    for (double r : as) {
      try {
        const auto res = aperture_lens({r * d, d}, q);
        warning = res.warning;
        t.rows.push_back({r, r * d, res.cutoff_k_perp, res.value});
      } catch (const NumericalError& e) {
        o.record(e.what());
        t.rows.push_back({r, r * d, std::nan(""), std::nan("")});
      }
    }
  } else {
    t.add_meta("quantity", "Gamma/Gamma0 at the mirror focus z=d, x dipole");
    t.columns = {"a", "a_over_d", "cutoff_k_perp"};
    std::vector<MirrorExtent> extents;
    if (extent != "same") {
      extents.push_back(MirrorExtent::Infinite);
      t.columns.push_back("infinite_mirror");
    }
    if (extent != "infinite") {
      extents.push_back(MirrorExtent::SameAsSlab);
      t.columns.push_back("same_as_slab");
    }
    for (double a : as) {
      std::vector<double> row = {a, a / d, std::nan("")};
      for (auto ext : extents) {
        try {
          const auto res = aperture_mirror({a, d, ext}, kAxisX, q);
          warning = res.warning;
          row[2] = res.cutoff_k_perp;
          row.push_back(res.value);
        } catch (const NumericalError& e) {
          o.record(e.what());
          row.push_back(std::nan(""));
        }
      }
      t.rows.push_back(std::move(row));
    }
  }
  if (!warning.empty()) {
    t.add_meta("warning", warning);
    std::cerr << "warning: " << warning << '\n';
  }
  return o;
}

Outcome run_dispersion(const Common& c, const std::string& d_list, double alpha, double omega0,
                       const std::string& grid, bool causal, double gamma, double gamma11) {
  const DispersionModel model{alpha, omega0};
  const auto ds = parse_grid(d_list, "--d");
  const auto ws = parse_grid(grid, "--omega");
  Outcome o;
  auto& t = o.table;
  stamp(t, "dispersion", c);
  t.add_meta("alpha", format_number(alpha));
  t.add_meta("omega0", format_number(omega0));
  t.add_meta("quantity", "Im G20_xx in units k/6pi, focal pair at gaps d/2");
  t.add_meta("linear_model", "n=-1+alpha*(omega-omega0) in the propagation phase only");
  std::optional<MaterialSpec> tuned;
  if (causal) {
    tuned = tune_lorentz_index(omega0, alpha, gamma);
    stamp_material(t, "causal.", *tuned);
  }
  t.columns = {"d", "omega", "beta", "linear"};
  if (causal) t.columns.push_back("causal");
  for (double d : ds) {
    const auto lin = dispersion_spectrum(d, model, ws, c.quadrature());
    const double fwhm = dispersion_fwhm(d, model, c.quadrature());
    const auto mb = markov_bound(gamma11, model, d);
    t.add_meta("spectrum[d=" + format_number(d) + "]",
               "fwhm=" + format_number(fwhm) + " fwhm*k0*d*alpha=" + format_number(fwhm * omega0 * d * alpha) +
                   " bandwidth=" + format_number(mb.bandwidth) + " bandwidth_limit=" +
                   format_number(mb.bandwidth_limit) + " max_distance=" + format_number(mb.max_distance) +
                   " markov_valid=" + (mb.markov_valid ? "1" : "0"));
    std::vector<double> cau;
    if (causal) {
      for (double w : ws) {
        try {
          cau.push_back(causal_dispersion_spectrum(d, *tuned, {w}, c.quadrature()).front());
        } catch (const std::exception& e) {
          o.record(e.what());
          cau.push_back(std::nan(""));
        }
      }
    }
    for (std::size_t i = 0; i < ws.size(); ++i) {
      std::vector<double> row = {d, ws[i], d * omega0 * alpha * (ws[i] - omega0), lin[i]};
      if (causal) row.push_back(cau[i]);
      t.rows.push_back(std::move(row));
    }
  }
  t.add_meta("gamma11", format_number(gamma11));
  return o;
}

int finish(Outcome& o, const Common& c) {
  if (o.failed) {
    o.table.add_meta("failed_points", std::to_string(o.failed));
    o.table.add_meta("first_error", o.first_error);
  }
  emit(o.table, format_of(c), c.out);
  if (o.failed) {
    std::cerr << "error: " << o.failed << " point(s) failed: " << o.first_error << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"negqed: emission rates and two-atom coupling near negative-index slabs.\n"
               "Units: omega in omega_ref, lengths in c/omega_ref, rates in Gamma0."};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.footer(std::string("Environment: ") + kTolEnv +
             " sets the default relative quadrature tolerance (default 1e-8).\n"
             "Exit codes: 0 success, 1 input error, 2 numerical non-convergence.");

  double rel_tol = 1e-8;
  try {
    rel_tol = default_rel_tol();
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  std::map<std::string, Common> common;
  std::function<Outcome()> job;
  std::function<int()> raw_job;
  CLI::App* active_sub = nullptr;
  auto make = [&](const std::string& name, const std::string& help, const std::string& fmt = "csv",
                  const std::string& evan = "auto") {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, common[name], fmt, rel_tol, evan);
    return sub;
  };

  // material
  std::string mat_grid = "0.8:1.3:0.001";
  auto* mat = make("material", "Permittivity, permeability and refractive index over a frequency grid "
                               "(default: single-resonance model, omega_P=0.46, omega_Te=1, omega_Tm=1.05, gamma=0.01)");
  mat->add_option("--omega", mat_grid, "Frequency grid start:stop:step")->capture_default_str();
  mat->callback([&] { active_sub = mat; job = [&] { return run_material(common["material"], mat_grid); }; });

  // embedded
  std::string emb_grid = "0.8:1.3:0.001";
  double rho = kDefaultCavityRadius;
  auto* emb = make("embedded", "Real-cavity emission rate of an atom embedded in the medium");
  emb->add_option("--omega", emb_grid, "Frequency grid start:stop:step")->capture_default_str();
  emb->add_option("--rho", rho, "Cavity radius in c/omega_A")->check(CLI::Range(1e-6, 0.999))->capture_default_str();
  emb->callback([&] { active_sub = emb; job = [&] { return run_embedded(common["embedded"], emb_grid, rho); }; });

  // mirror
  double mir_d = 100.0;
  std::string mir_or = "x", mir_grid = "-0.5:3:0.05";
  std::optional<double> mir_ni;
  auto* mir = make("mirror", "Emission rate vs distance from the focus of an n=-1 slab on a mirror");
  mir->add_option("--d", mir_d, "Slab thickness")->check(CLI::PositiveNumber)->capture_default_str();
  mir->add_option("--orientation", mir_or, "Dipole orientation x|y|z|'a,b,c'")->capture_default_str();
  mir->add_option("--zgrid", mir_grid, "Offsets from the focus start:stop:step")->capture_default_str();
  mir->add_option("--n-imag", mir_ni, "Use n=-1+i*n_imag (eps=mu=n) instead of the ideal slab")
      ->check(CLI::NonNegativeNumber);
  mir->callback([&] {
    active_sub = mir;
    job = [&] { return run_mirror(common["mirror"], mir_d, mir_or, mir_grid, mir_ni); };
  });

  // lens
  double lens_d = 100.0;
  std::string lens_or = "x", lens_map_grid = "-2:2:0.1", lens_x, lens_z;
  std::optional<double> lens_ni;
  auto* lens = make("lens", "Gamma12/Gamma11 map around the focal image of a Veselago-Pendry lens", "json");
  lens->add_option("--d", lens_d, "Slab thickness")->check(CLI::PositiveNumber)->capture_default_str();
  lens->add_option("--orientation", lens_or, "Dipole orientation (both atoms)")->capture_default_str();
  lens->add_option("--map", lens_map_grid, "Grid for both x and z displacements")->capture_default_str();
  lens->add_option("--xgrid", lens_x, "Lateral displacement grid (overrides --map)");
  lens->add_option("--zgrid", lens_z, "Axial displacement grid (overrides --map)");
  lens->add_option("--n-imag", lens_ni, "Use n=-1+i*n_imag (eps=mu=n)")->check(CLI::NonNegativeNumber);
  lens->callback([&] {
    active_sub = lens;
    job = [&] { return run_lens(common["lens"], lens_d, lens_or, lens_map_grid, lens_x, lens_z, lens_ni); };
  });

  // cross
  double cr_d = 1.0, cr_omega = 1.0;
  std::string cr_backing = "vacuum", cr_r1 = "0,0,0.5", cr_r2 = "0,0,-1.5", cr_o1 = "x", cr_o2 = "x";
  bool cr_tensor = false;
  std::optional<double> cr_ni;
  auto* cr = make("cross", "Single-atom and cross rates of two dipoles for an arbitrary stack");
  cr->add_option("--d", cr_d, "Slab thickness (slab occupies -d<=z<=0)")->check(CLI::NonNegativeNumber)->capture_default_str();
  cr->add_option("--backing", cr_backing, "vacuum|mirror")->check(CLI::IsMember({"vacuum", "mirror"}))->capture_default_str();
  cr->add_option("--r1", cr_r1, "Position of atom 1 'x,y,z'")->capture_default_str();
  cr->add_option("--r2", cr_r2, "Position of atom 2 'x,y,z'")->capture_default_str();
  cr->add_option("--o1", cr_o1, "Orientation of atom 1")->capture_default_str();
  cr->add_option("--o2", cr_o2, "Orientation of atom 2")->capture_default_str();
  cr->add_option("--omega", cr_omega, "Transition frequency")->check(CLI::PositiveNumber)->capture_default_str();
  cr->add_flag("--tensor", cr_tensor, "Append G(r1, r2) row-major as re/im pairs (units k/6pi)");
  cr->add_option("--n-imag", cr_ni, "Use n=-1+i*n_imag (eps=mu=n)")->check(CLI::NonNegativeNumber);
  cr->callback([&] {
    active_sub = cr;
    job = [&] {
      return run_cross(common["cross"], cr_d, cr_backing, cr_r1, cr_r2, cr_o1, cr_o2, cr_omega, cr_tensor, cr_ni);
    };
  });

  // dynamics
  double dy_g11 = 1.0, dy_g12 = 1.0, dy_t = 10.0, dy_dt = 1e-3;
  int dy_every = 10;
  std::string dy_init = "s";
  bool dy_exact = false;
  auto* dy = make("dynamics", "Two-atom Dicke-basis population cascade");
  dy->add_option("--gamma11", dy_g11, "Single-atom rate")->capture_default_str();
  dy->add_option("--gamma12", dy_g12, "Cross rate")->capture_default_str();
  dy->add_option("--initial", dy_init, "22|s|a|'rho22,rho_ss,rho_aa,rho11'")->capture_default_str();
  dy->add_option("--t-end", dy_t, "Final time (1/Gamma0)")->check(CLI::PositiveNumber)->capture_default_str();
  dy->add_option("--dt", dy_dt, "RK4 step, at most 0.01/gamma11")->check(CLI::PositiveNumber)->capture_default_str();
  dy->add_option("--every", dy_every, "Write every n-th step (and the last)")->check(CLI::PositiveNumber)->capture_default_str();
  dy->add_flag("--analytic", dy_exact, "Append the closed-form solution");
  dy->callback([&] {
    active_sub = dy;
    job = [&] { return run_dynamics(common["dynamics"], dy_g11, dy_g12, dy_init, dy_t, dy_dt, dy_every, dy_exact); };
  });

  // absorption
  std::string ab_sys = "lens", ab_d = "100,10,1", ab_grid = "0:0.05:0.0005";
  double ab_fit = 0.5;
  auto* ab = make("absorption", "Sweep of n=-1+i*n_imag: lens ratio or mirror-focus rate (propagating modes by default)",
                  "csv", "never");
  ab->add_option("--system", ab_sys, "lens|mirror")->check(CLI::IsMember({"lens", "mirror"}))->capture_default_str();
  ab->add_option("--d", ab_d, "Slab thicknesses (list or grid)")->capture_default_str();
  ab->add_option("--n-imag-grid", ab_grid, "n_imag grid")->capture_default_str();
  ab->add_option("--fit-max", ab_fit, "Upper n_imag*k0*d of the log-linear fit")->check(CLI::PositiveNumber)->capture_default_str();
  ab->callback([&] {
    active_sub = ab;
    job = [&] { return run_absorption(common["absorption"], ab_sys, ab_d, ab_grid, ab_fit); };
  });

  // aperture
  std::string ap_sys = "mirror", ap_grid, ap_ext = "both";
  double ap_d = 0.0;
  auto* ap = make("aperture", "Finite transverse radius a: ray-optics cutoff estimate "
                              "(mirror: d=3, a grid 0:30:0.25; lens: d=100, a/d grid 0:10:0.05)");
  ap->add_option("--system", ap_sys, "mirror|lens")->check(CLI::IsMember({"mirror", "lens"}))->capture_default_str();
  ap->add_option("--d", ap_d, "Slab thickness (default 3 for mirror, 100 for lens)")->check(CLI::PositiveNumber);
  ap->add_option("--agrid,--ratio-grid", ap_grid, "Grid of a (mirror) or a/d (lens)");
  ap->add_option("--mirror-extent", ap_ext, "both|infinite|same")->check(CLI::IsMember({"both", "infinite", "same"}))->capture_default_str();
  ap->callback([&] {
    active_sub = ap;
    job = [&] {
      const bool is_lens = ap_sys == "lens";
      const double d = ap_d > 0.0 ? ap_d : (is_lens ? 100.0 : 3.0);
      const std::string g = !ap_grid.empty() ? ap_grid : (is_lens ? "0:10:0.05" : "0:30:0.25");
      return run_aperture(common["aperture"], ap_sys, d, g, ap_ext);
    };
  });

  // dispersion
  std::string di_d = "1,0.2", di_grid = "0.8:1.2:0.0005";
  double di_alpha = 45.0, di_omega0 = 1.0, di_gamma = 0.0, di_g11 = 1e-6;
  bool di_no_causal = false;
  auto* di = make("dispersion", "Focal-pair Im G20 spectrum with linear dispersion, plus a tuned Lorentz lens",
                  "csv", "never");
  di->add_option("--d", di_d, "Thicknesses (d k0)")->capture_default_str();
  di->add_option("--alpha", di_alpha, "Slope dn/domega at omega0")->capture_default_str();
  di->add_option("--omega0", di_omega0, "Design frequency")->check(CLI::PositiveNumber)->capture_default_str();
  di->add_option("--omega", di_grid, "Frequency grid")->capture_default_str();
  di->add_option("--gamma", di_gamma, "Damping of the tuned Lorentz model")->check(CLI::NonNegativeNumber)->capture_default_str();
  di->add_option("--gamma11", di_g11, "Single-atom rate for the Markov bound")->check(CLI::PositiveNumber)->capture_default_str();
  di->add_flag("--no-causal", di_no_causal, "Skip the tuned Lorentz-model spectrum");
  di->callback([&] {
    active_sub = di;
    job = [&] {
      return run_dispersion(common["dispersion"], di_d, di_alpha, di_omega0, di_grid, !di_no_causal, di_gamma, di_g11);
    };
  });

  // selftest
  auto* st = app.add_subcommand("selftest", "Closed-form anchor checks, one PASS/FAIL line each");
  st->callback([&] { raw_job = [] { return run_selftest(std::cout) ? 0 : 2; }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (e.get_exit_code() != 0 && std::string(e.get_name()) != "CallForHelp" &&
        std::string(e.get_name()) != "CallForAllHelp")
      std::cerr << app.help();
    return e.get_exit_code() == 0 ? 0 : 1;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (raw_job) return raw_job();
    auto& c = common[active_sub->get_name()];
    apply_config(active_sub, c);
    Outcome o = job();
    return finish(o, c);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace negqed::cli

int main(int argc, char** argv) { return negqed::cli::run(argc, argv); }
