// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
// Usage: acceptance [baseline-file]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "romnls/closed_form.hpp"
#include "romnls/config.hpp"
#include "romnls/diagnostics.hpp"
#include "romnls/experiments.hpp"
#include "romnls/master.hpp"
#include "romnls/rons.hpp"
#include "romnls/text.hpp"
#include "support.hpp"

using namespace romnls;
using romnls::testing::Gen;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& note) {
    pass = pass && ok;
    notes.push_back(note + (ok ? "" : " [x]"));
  }
};

ExperimentConfig bundled(const std::string& name) {
  return load_config(std::string(ROMNLS_CONFIG_DIR) + "/" + name + ".cfg");
}

double fitted_velocity(const OdeTrajectory& traj, const AnsatzFamily& family, GridPtr grid) {
  const RunRecord rec = record_states(traj, family, grid);
  return group_velocity(rec.series, default_window(rec.series)).velocity;
}

Outcome oracle_equivalence() {
  Outcome out;
  const auto start = Clock::now();
  Gen gen(1001);
  const GridPtr grid = default_grid();
  const auto co = AnsatzFamily::gaussian_comoving();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    RealVector q = gen.gaussian_comoving();
    q[3] = 0.0;
    worst = std::max(worst, oracle_compare(ClosedFormSystem::NlsComovingGaussian,
                                           PdeKind::NlsComoving, co, co.make_state(q), *grid));
  }
  const double t = seconds_since(start);
  out.check(worst < 1e-6, "max rel err " + fmt(worst));
  out.check(t < 10.0, "runtime " + fmt(t) + " s");
  return out;
}

Outcome master_split() {
  Outcome out;
  const auto start = Clock::now();
  Gen gen(1002);
  const GridPtr grid = default_grid();
  const auto co = AnsatzFamily::gaussian_comoving();
  const auto pe = AnsatzFamily::poly_exponent(2);
  double real_vs_rons = 0.0, imag_vs_real = 0.0, block = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ParameterState q = co.make_state(gen.gaussian_comoving());
    const MasterSystem sys = assemble_master(NlsDensity::comoving(), co, q, *grid);
    const RealVector re = solve_real_part(sys);
    const RealVector rons = rons_rhs(assemble(PdeModel{PdeKind::NlsComoving}, co, q, *grid));
    const RealVector im = solve_imag_part(sys, co.names()).rate;
    const double scale = 1.0 + re.cwiseAbs().maxCoeff();
    real_vs_rons = std::max(real_vs_rons, (re - rons).cwiseAbs().maxCoeff() / scale);
    imag_vs_real = std::max(imag_vs_real, (im - re).cwiseAbs().maxCoeff() / scale);

    const ParameterState p = gaussian_to_poly_exponent(q);
    const BlockIdentityResiduals r =
        poly_exponent_block_residuals(assemble_master(NlsDensity::comoving(), pe, p, *grid));
    block = std::max({block, r.b_minus_d / r.scale, r.b_plus_i_c / r.scale});
  }
  const double t = seconds_since(start);
  out.check(real_vs_rons < 1e-8, "Re part vs RONS " + fmt(real_vs_rons));
  out.check(imag_vs_real < 1e-8, "Im part vs Re part " + fmt(imag_vs_real));
  out.check(block < 1e-10, "block identities " + fmt(block));
  out.check(t < 10.0, "runtime " + fmt(t) + " s");
  return out;
}

Outcome stationary_dichotomy(double& dns_mass_drift) {
  Outcome out;
  ExperimentConfig cfg = bundled("fig3");
  cfg.rom_method = RomMethod::Rons;
  const GridPtr grid = cfg.grid();

  const RomSetup rons = make_rom(cfg, grid);
  const OdeTrajectory rt = run_rom(rons, cfg);
  const double c_rons = rt.completed() ? fitted_velocity(rt, rons.family, grid) : NAN;
  out.check(std::abs(c_rons - 0.5) < 1e-4, "RONS c_g " + fmt(c_rons));

  Gen gen(1003);
  const auto tr = AnsatzFamily::gaussian_translating();
  bool always = true;
  for (int i = 0; i < 50; ++i) {
    const MasterSystem sys =
        assemble_master(NlsDensity::stationary(), tr, tr.make_state(gen.gaussian_translating()), *grid);
    const RankReport r = solve_imag_part(sys, tr.names());
    always = always && r.rank < r.dimension && r.undetermined.size() == 1 &&
             r.undetermined[0] == "x_c";
  }
  out.check(always, std::string("Im[M] rank-deficient in x_c at 50 states: ") + (always ? "yes" : "no"));

  const RomSetup rl = make_reduced_lagrangian(cfg, grid);
  const OdeTrajectory lt = run_rom(rl, cfg);
  const double c_rl = lt.completed() ? fitted_velocity(lt, rl.family, grid) : NAN;
  out.check(std::abs(c_rl) < 1e-4, "reduced-Lagrangian c_g " + fmt(c_rl));

  const auto start = Clock::now();
  const FieldTrajectory dns = run_dns(cfg, grid, cfg.initial_state());
  const double t = seconds_since(start);
  const RunRecord rec = record_fields(dns);
  const double c_dns = group_velocity(rec.series, default_window(rec.series)).velocity;
  out.check(dns.completed() && std::abs(c_dns - 0.5) / 0.5 < 0.02, "DNS c_g " + fmt(c_dns));
  out.check(t < 120.0, "DNS runtime " + fmt(t) + " s");

  const double m0 = rec.series.samples().front().mass;
  dns_mass_drift = 0.0;
  for (const auto& s : rec.series.samples()) {
    dns_mass_drift = std::max(dns_mass_drift, std::abs(s.mass - m0) / m0);
  }
  return out;
}

Outcome conservation(double dns_mass_drift) {
  Outcome out;
  Gen gen(1004);
  const GridPtr grid = default_grid();
  const auto co = AnsatzFamily::gaussian_comoving();
  const ConservedQuantitySet iq = ConservedQuantitySet::nls_gaussian(co, true);
  double lambda = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const TangentSystem sys =
        assemble(PdeModel{PdeKind::NlsComoving}, co, co.make_state(gen.gaussian_comoving()), *grid);
    lambda = std::max(lambda, constrained_rons_rhs(sys, iq).multipliers.cwiseAbs().maxCoeff());
  }
  out.check(lambda < 1e-8, "max |lambda| " + fmt(lambda));

  OdeSolverConfig ode;
  ode.t_final = 40.0;
  double drift1 = 0.0, drift2 = 0.0;
  for (int i = 0; i < 20; ++i) {
    const RealVector q0 = gen.gaussian_comoving();
    const OdeTrajectory traj = integrate_ode(
        [](double, const RealVector& q) {
          return closed_form_rhs(ClosedFormSystem::NlsComovingGaussian, q);
        },
        co.make_state(q0), ode);
    const double i1 = gaussian_mass(q0[0], q0[1]);
    const double i2 = gaussian_energy(q0[0], q0[1], q0[2]);
    for (const auto& q : traj.states) {
      drift1 = std::max(drift1, std::abs(gaussian_mass(q[0], q[1]) - i1) / i1);
      drift2 = std::max(drift2, std::abs(gaussian_energy(q[0], q[1], q[2]) - i2) / std::abs(i2));
    }
  }
  out.check(drift1 < 1e-8, "I1 drift " + fmt(drift1));
  out.check(drift2 < 1e-8, "I2 drift " + fmt(drift2));
  out.check(dns_mass_drift < 1e-8, "DNS mass drift " + fmt(dns_mass_drift));
  return out;
}

Outcome mnls_sweep() {
  Outcome out;
  const ExperimentConfig cfg = bundled("fig5");
  const auto start = Clock::now();
  const std::vector<SweepRow> rows = velocity_sweep(cfg, 8);
  const double t = seconds_since(start);
  double worst = 0.0;
  bool clean = rows.size() == 8;
  for (const auto& r : rows) {
    worst = std::max(worst, r.relative_error);
    clean = clean && r.event == "completed";
  }
  out.check(clean, std::to_string(rows.size()) + " cases without events");
  out.check(worst < 0.02, "max rel err " + fmt(worst));
  out.check(t < 900.0, "runtime " + fmt(t) + " s");
  return out;
}

Outcome focusing(const std::string& baseline_path) {
  Outcome out;
  double case_a = NAN;
  for (const char* name : {"fig4a", "fig4b", "fig4c"}) {
    const ExperimentConfig cfg = bundled(name);
    const GridPtr grid = cfg.grid();
    const RomSetup rom = make_rom(cfg, grid);
    const OdeTrajectory rt = run_rom(rom, cfg);
    const FieldTrajectory dns = run_dns(cfg, grid, cfg.initial_state());
    if (!rt.completed() || !dns.completed()) {
      out.check(false, std::string(name) + " run stopped early");
      continue;
    }
    CompareOptions options;
    options.focusing_threshold = cfg.focusing_threshold;
    const ComparisonReport r = compare(record_states(rt, rom.family, grid), record_fields(dns), options);
    out.check(r.focusing_class_rom == r.focusing_class_dns,
              std::string(name) + " " + std::string(to_string(r.focusing_class_rom)) + "/" +
                  std::string(to_string(r.focusing_class_dns)));
    if (std::string(name) == "fig4a") case_a = r.max_envelope_error;
  }

  double baseline = NAN;
  std::ifstream in(baseline_path);
  if (in >> baseline) {
    out.check(case_a <= 1.1 * baseline,
              "case (a) envelope err " + fmt(case_a) + " vs baseline " + fmt(baseline));
  } else if (std::isfinite(case_a)) {
    std::filesystem::create_directories(std::filesystem::path(baseline_path).parent_path());
    std::ofstream(baseline_path) << format_real(case_a) << '\n';
    out.check(true, "case (a) envelope err " + fmt(case_a) + " recorded as baseline");
  } else {
    out.check(false, "case (a) envelope error unavailable");
  }
  return out;
}

Outcome mass_constrained() {
  Outcome out;
  const auto start = Clock::now();
  Gen gen(1007);
  const GridPtr grid = default_grid();
  bool null_phi = true, spd = true;
  for (int i = 0; i < 50; ++i) {
    RealVector q(3);
    q << gen.uniform(5.0, 25.0), gen.uniform(-0.1, 0.1), gen.uniform(-kPi, kPi);
    const MassConstrainedReport r = mass_constrained_gaussian_check(gen.uniform(0.05, 0.8), q, *grid);
    const auto& u = r.imaginary.undetermined;
    null_phi = null_phi && std::find(u.begin(), u.end(), "phi") != u.end() && r.phi_column_norm < 1e-12;
    spd = spd && r.real_part_spd;
  }
  const double t = seconds_since(start);
  out.check(null_phi, std::string("phi in null space of Im[M]: ") + (null_phi ? "yes" : "no"));
  out.check(spd, std::string("Re[M] SPD: ") + (spd ? "yes" : "no"));
  out.check(t < 5.0, "runtime " + fmt(t) + " s");
  return out;
}

Outcome sech_properties() {
  Outcome out;
  const ExperimentConfig cfg = bundled("soliton");
  const GridPtr grid = cfg.grid();
  const RomSetup rom = make_rom(cfg, grid);
  const OdeTrajectory traj = run_rom(rom, cfg);
  const auto iAr = static_cast<Eigen::Index>(rom.family.index_of("A_r"));
  const auto iAi = static_cast<Eigen::Index>(rom.family.index_of("A_i"));
  const auto iL = static_cast<Eigen::Index>(rom.family.index_of("L"));
  const RealVector& q0 = traj.states.front();
  const double a0 = std::hypot(q0[iAr], q0[iAi]);
  double da = 0.0, dl = 0.0;
  for (const auto& q : traj.states) {
    da = std::max(da, std::abs(std::hypot(q[iAr], q[iAi]) - a0));
    dl = std::max(dl, std::abs(q[iL] - q0[iL]));
  }
  out.check(traj.completed() && da < 1e-4 && dl < 1e-4,
            "soliton |A| change " + fmt(da) + ", L change " + fmt(dl));

  Gen gen(1008);
  const auto sech = AnsatzFamily::sech();
  double imag_rate = 0.0, real_rate = INFINITY;
  for (int i = 0; i < 20; ++i) {
    const RealVector q = gen.sech();
    const double amp = std::hypot(q[iAr], q[iAi]);
    const MasterSystem sys = assemble_master(NlsDensity::comoving(), sech, sech.make_state(q), *grid);
    const RealVector im = solve_imag_part(sys, sech.names()).rate;
    const RealVector re = rons_rhs(assemble(PdeModel{PdeKind::NlsComoving}, sech, sech.make_state(q), *grid));
    imag_rate = std::max(imag_rate, std::abs(q[iAr] * im[iAr] + q[iAi] * im[iAi]) / amp);
    real_rate = std::min(real_rate, std::abs(q[iAr] * re[iAr] + q[iAi] * re[iAi]) / amp);
  }
  out.check(imag_rate < 1e-8, "Im-part max |d|A|/dt| " + fmt(imag_rate));
  out.check(real_rate > 1e-6, "RONS min |d|A|/dt| " + fmt(real_rate));
  return out;
}

double uniform_error(double c, double dt) {
  const GridPtr grid = make_grid(2.0 * kPi, 16);
  EtdSolverConfig cfg;
  cfg.dt = dt;
  cfg.t_final = 10.0;
  cfg.output_interval = 10.0;
  const ComplexField u0(grid, ComplexVector::Constant(16, Complex(c, 0.0)));
  const FieldTrajectory traj = integrate_etd(PdeModel{PdeKind::NlsComoving}, u0, cfg);
  const Complex exact = c * std::exp(Complex(0.0, -0.5 * c * c * cfg.t_final));
  return (traj.snapshots.back().array() - exact).abs().maxCoeff();
}

Outcome scheme_order() {
  Outcome out;
  const double e1 = uniform_error(1.0, 0.4);
  const double e2 = uniform_error(1.0, 0.2);
  const double e3 = uniform_error(1.0, 0.1);
  const double r1 = e1 / e2, r2 = e2 / e3;
  out.check(r1 >= 12.0 && r1 <= 20.0 && r2 >= 12.0 && r2 <= 20.0,
            "error ratios " + fmt(r1) + ", " + fmt(r2));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string baseline = argc > 1 ? argv[1] : ROMNLS_BASELINE_FILE;
  double dns_mass_drift = NAN;

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"master equation split", master_split},
      {"stationary-frame dichotomy", [&] { return stationary_dichotomy(dns_mass_drift); }},
      {"conservation audit", [&] { return conservation(dns_mass_drift); }},
      {"MNLS group velocity", mnls_sweep},
      {"focusing classification", [&] { return focusing(baseline); }},
      {"mass-constrained Gaussian", mass_constrained},
      {"sech properties", sech_properties},
      {"DNS scheme order", scheme_order},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.check(false, std::string("threw: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].name << ":";
    for (std::size_t k = 0; k < o.notes.size(); ++k) line << (k == 0 ? " " : "; ") << o.notes[k];
    std::cout << line.str() << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
