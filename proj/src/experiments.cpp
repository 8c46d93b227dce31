#include "romnls/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "romnls/closed_form.hpp"
#include "romnls/master.hpp"
#include "romnls/rons.hpp"
#include "romnls/text.hpp"

namespace romnls {

namespace {

constexpr const char* kVersion = "0.1.0";

std::optional<ClosedFormSystem> matching_system(PdeKind pde, FamilyId family) {
  for (auto s : {ClosedFormSystem::NlsComovingGaussian, ClosedFormSystem::NlsStationaryGaussian,
                 ClosedFormSystem::MnlsFullGaussian}) {
    if (pde_of(s) == pde && family_of(s) == family) return s;
  }
  return std::nullopt;
}

CompareOptions compare_options(const ExperimentConfig& cfg) {
  CompareOptions o;
  o.focusing_threshold = cfg.focusing_threshold;
  o.channel = cfg.channel;
  if (cfg.window) {
    o.use_window = true;
    o.window = *cfg.window;
  }
  return o;
}

FitWindow window_for(const ExperimentConfig& cfg, const ObservableSeries& series) {
  return cfg.window ? *cfg.window : default_window(series);
}

void prefixed(std::ostringstream& out, const std::string& prefix, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out << prefix << line << '\n';
}

std::string event_line(const std::string& what, IntegrationEvent event, double time,
                       const std::string& message) {
  return what + ": " + std::string(to_string(event)) + " at t = " + format_real(time) + " (" +
         message + ")";
}

RealVector random_gaussian_state(std::mt19937_64& rng, const AnsatzFamily& family) {
  std::uniform_real_distribution<double> amp(0.02, 0.2), width(5.0, 25.0), chirp(-0.1, 0.1),
      phase(-kPi, kPi), shift(-10.0, 10.0);
  RealVector q = RealVector::Zero(static_cast<Eigen::Index>(family.param_count()));
  for (std::size_t i = 0; i < family.param_count(); ++i) {
    const std::string& n = family.names()[i];
    double& v = q[static_cast<Eigen::Index>(i)];
    if (n == "A") v = amp(rng);
    if (n == "L") v = width(rng);
    if (n == "U") v = chirp(rng);
    if (n == "phi") v = phase(rng);
    if (n == "x_c") v = shift(rng);
  }
  return q;
}

}  // namespace

const OutputFile* ExperimentResult::file(const std::string& name) const {
  for (const auto& f : files) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

RomSetup make_rom(const ExperimentConfig& cfg, GridPtr grid) {
  const AnsatzFamily family = cfg.ansatz();
  const auto system = matching_system(cfg.pde, cfg.family);
  const bool closed_allowed = system && !cfg.rom_velocity_potential;
  if (cfg.rom_method == RomMethod::ClosedForm && !closed_allowed) {
    throw std::invalid_argument("rom.method = closed_form has no system for pde '" +
                                std::string(to_string(cfg.pde)) + "' and family '" +
                                std::string(to_string(cfg.family)) + "'");
  }
  if (closed_allowed && cfg.rom_method != RomMethod::Rons) {
    const ClosedFormSystem s = *system;
    return {family, [s](double, const RealVector& q) { return closed_form_rhs(s, q); },
            std::string("closed_form:") + std::string(to_string(s))};
  }
  const PdeModel model{cfg.pde, cfg.rom_velocity_potential};
  return {family,
          [model, family, grid](double, const RealVector& q) {
            return rons_rate(model, family, q, *grid);
          },
          "rons"};
}

RomSetup make_reduced_lagrangian(const ExperimentConfig& cfg, GridPtr grid) {
  if (cfg.pde == PdeKind::Mnls) {
    throw std::invalid_argument("the reduced Lagrangian is only available for the NLS densities");
  }
  const AnsatzFamily family = cfg.ansatz();
  const double gamma = cfg.pde == PdeKind::NlsStationary ? 1.0 : 0.0;
  return {family,
          [family, grid, gamma](double, const RealVector& q) {
            const MasterSystem sys =
                assemble_master(NlsDensity(gamma), family, family.make_state(q), *grid);
            return solve_imag_part(sys, family.names()).rate;
          },
          "reduced_lagrangian"};
}

OdeTrajectory run_rom(const RomSetup& rom, const ExperimentConfig& cfg) {
  const AnsatzFamily family = rom.family;
  return integrate_ode(rom.rhs, family.make_state(cfg.initial), cfg.ode,
                       [family](const RealVector& q) { return family.admissible(q); });
}

FieldTrajectory run_dns(const ExperimentConfig& cfg, GridPtr grid, const ParameterState& initial,
                        const FieldObserver& observer, bool store_snapshots) {
  const ComplexField u0 = evaluate(AnsatzFamily::for_state(initial), initial, grid).field;
  return integrate_etd(PdeModel{cfg.pde, cfg.dns_velocity_potential}, u0, cfg.dns, observer,
                       store_snapshots);
}

std::string states_csv(const OdeTrajectory& trajectory, const AnsatzFamily& family) {
  std::ostringstream out;
  out << 't';
  for (const auto& n : family.names()) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    out << format_real(trajectory.times[i]);
    for (Eigen::Index k = 0; k < trajectory.states[i].size(); ++k) {
      out << ',' << format_real(trajectory.states[i][k]);
    }
    out << '\n';
  }
  return out.str();
}

std::string envelope_csv(const FieldTrajectory& trajectory, double interval) {
  std::ostringstream out;
  out << "t,x,abs_u\n";
  double next = trajectory.times.empty() ? 0.0 : trajectory.times.front();
  for (std::size_t i = 0; i < trajectory.snapshots.size(); ++i) {
    const double t = trajectory.times[i];
    if (t + 1e-9 < next) continue;
    next += interval;
    const ComplexVector& u = trajectory.snapshots[i];
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      out << format_real(t) << ',' << format_real(trajectory.grid->point(static_cast<std::size_t>(j)))
          << ',' << format_real(std::abs(u[j])) << '\n';
    }
  }
  return out.str();
}

namespace {

void rom_run(const ExperimentConfig& cfg, ExperimentResult& result) {
  const GridPtr grid = cfg.grid();
  const RomSetup rom = make_rom(cfg, grid);
  const OdeTrajectory traj = run_rom(rom, cfg);
  ObservableSeries series(grid->domain_length());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    series.add(traj.times[i], observe_state(rom.family, traj.state(i), grid));
  }
  std::ostringstream report;
  report << "rom = " << rom.label << '\n';
  report << "event = " << to_string(traj.event) << '\n';
  report << "accepted_steps = " << traj.accepted_steps << '\n';
  report << "rejected_steps = " << traj.rejected_steps << '\n';
  if (series.size() >= 10) {
    const GroupVelocityFit fit = group_velocity(series, window_for(cfg, series), cfg.channel);
    report << "group_velocity = " << format_real(fit.velocity) << '\n';
  }
  report << "focusing_class = " << to_string(classify_focusing(series, cfg.focusing_threshold))
         << '\n';
  prefixed(report, "final.", serialize(traj.state(traj.times.size() - 1)));
  if (!traj.completed()) {
    result.status = 2;
    result.events.push_back(event_line("rom", traj.event, traj.event_time, traj.message));
  }
  result.files.push_back({"rom.csv", series.to_csv()});
  result.files.push_back({"rom_states.csv", states_csv(traj, rom.family)});
  result.files.push_back({"report.txt", report.str()});
}

void dns_run(const ExperimentConfig& cfg, ExperimentResult& result) {
  const GridPtr grid = cfg.grid();
  const FieldTrajectory traj = run_dns(cfg, grid, cfg.initial_state());
  const RunRecord rec = record_fields(traj);
  std::ostringstream report;
  report << "event = " << to_string(traj.event) << '\n';
  report << "last_valid_time = " << format_real(traj.last_valid_time) << '\n';
  const auto& s = rec.series.samples();
  report << "mass_drift = "
         << format_real(std::abs(s.back().mass - s.front().mass) / s.front().mass) << '\n';
  if (rec.series.size() >= 10) {
    const GroupVelocityFit fit =
        group_velocity(rec.series, window_for(cfg, rec.series), cfg.channel);
    report << "group_velocity = " << format_real(fit.velocity) << '\n';
    report << "group_velocity_low_confidence = " << (fit.low_confidence ? "yes" : "no") << '\n';
  }
  report << "focusing_class = "
         << to_string(classify_focusing(rec.series, cfg.focusing_threshold)) << '\n';
  if (!traj.completed()) {
    result.status = 2;
    result.events.push_back(
        event_line("dns", traj.event, traj.last_valid_time, traj.message));
  }
  result.files.push_back({"dns.csv", rec.series.to_csv()});
  result.files.push_back({"dns_envelopes.csv", envelope_csv(traj, cfg.envelope_interval)});
  result.files.push_back({"report.txt", report.str()});
}

void compare_run(const ExperimentConfig& cfg, ExperimentResult& result) {
  const GridPtr grid = cfg.grid();
  const CompareOptions options = compare_options(cfg);
  const FieldTrajectory dns = run_dns(cfg, grid, cfg.initial_state());
  const RunRecord dns_rec = record_fields(dns);
  if (!dns.completed()) {
    result.status = 2;
    result.events.push_back(event_line("dns", dns.event, dns.last_valid_time, dns.message));
  }
  result.files.push_back({"dns.csv", dns_rec.series.to_csv()});
  result.files.push_back({"dns_envelopes.csv", envelope_csv(dns, cfg.envelope_interval)});

  std::ostringstream report;
  auto one = [&](const RomSetup& rom, const std::string& tag) {
    const OdeTrajectory traj = run_rom(rom, cfg);
    if (!traj.completed()) {
      result.status = 2;
      result.events.push_back(event_line(tag, traj.event, traj.event_time, traj.message));
    }
    const RunRecord rec = record_states(traj, rom.family, grid);
    result.files.push_back({tag + ".csv", rec.series.to_csv()});
    result.files.push_back({tag + "_states.csv", states_csv(traj, rom.family)});
    report << tag << ".rom = " << rom.label << '\n';
    report << tag << ".event = " << to_string(traj.event) << '\n';
    try {
      const ComparisonReport cmp = compare(rec, dns_rec, options);
      prefixed(report, tag + ".", cmp.to_text());
      result.files.push_back({tag + "_envelope_error.csv", cmp.envelope_csv()});
    } catch (const std::invalid_argument& e) {
      report << tag << ".compare_error = " << e.what() << '\n';
    }
  };
  one(make_rom(cfg, grid), "rons");
  if (cfg.reduced_lagrangian) {
    const RomSetup rl = make_reduced_lagrangian(cfg, grid);
    const AnsatzFamily family = rl.family;
    const double gamma = cfg.pde == PdeKind::NlsStationary ? 1.0 : 0.0;
    const MasterSystem sys =
        assemble_master(NlsDensity(gamma), family, family.make_state(cfg.initial), *grid);
    prefixed(report, "reduced_lagrangian.initial_rank.",
             solve_imag_part(sys, family.names()).to_text());
    one(rl, "reduced_lagrangian");
  }
  result.files.push_back({"report.txt", report.str()});
}

void master_check(const ExperimentConfig& cfg, ExperimentResult& result) {
  const GridPtr grid = cfg.grid();
  std::mt19937_64 rng(cfg.seed);
  std::ostringstream report;

  {
    const AnsatzFamily family = AnsatzFamily::gaussian_comoving();
    const NlsDensity density = NlsDensity::comoving();
    double real_vs_rons = 0.0, imag_vs_real = 0.0, closed = 0.0;
    for (int s = 0; s < cfg.master_samples; ++s) {
      const ParameterState q = family.make_state(random_gaussian_state(rng, family));
      const MasterSystem sys = assemble_master(density, family, q, *grid);
      const RealVector re = solve_real_part(sys);
      const RealVector rons = rons_rate(PdeModel{PdeKind::NlsComoving}, family, q.values, *grid);
      const RealVector im = solve_imag_part(sys, family.names()).rate;
      const RealVector cf = closed_form_rhs(ClosedFormSystem::NlsComovingGaussian, q.values);
      const double scale = 1.0 + re.cwiseAbs().maxCoeff();
      real_vs_rons = std::max(real_vs_rons, (re - rons).cwiseAbs().maxCoeff() / scale);
      imag_vs_real = std::max(imag_vs_real, (im - re).cwiseAbs().maxCoeff() / scale);
      closed = std::max(closed, (cf - re).cwiseAbs().maxCoeff() / (1.0 + cf.cwiseAbs().maxCoeff()));
    }
    const bool coincide = imag_vs_real < 1e-8 && real_vs_rons < 1e-8;
    report << "gaussian_comoving.coincide = " << (coincide ? "yes" : "no") << '\n';
    report << "gaussian_comoving.max_deviation_imag_vs_real = " << format_real(imag_vs_real) << '\n';
    report << "gaussian_comoving.max_deviation_real_vs_rons = " << format_real(real_vs_rons) << '\n';
    report << "gaussian_comoving.max_deviation_closed_form = " << format_real(closed) << '\n';
    result.summary += std::string("GaussianComoving: coincide: ") + (coincide ? "yes" : "no") +
                      ", max deviation " + format_real(imag_vs_real) + "\n";
  }

  {
    const AnsatzFamily family = AnsatzFamily::gaussian_translating();
    const NlsDensity density = NlsDensity::stationary();
    int min_rank = static_cast<int>(family.param_count());
    std::set<std::string> undetermined;
    bool always_xc = true;
    for (int s = 0; s < cfg.master_samples; ++s) {
      const ParameterState q = family.make_state(random_gaussian_state(rng, family));
      const RankReport r =
          solve_imag_part(assemble_master(density, family, q, *grid), family.names());
      min_rank = std::min(min_rank, r.rank);
      undetermined.insert(r.undetermined.begin(), r.undetermined.end());
      always_xc = always_xc && r.undetermined == std::vector<std::string>{"x_c"};
    }
    std::string names;
    for (const auto& n : undetermined) names += (names.empty() ? "" : ", ") + n;
    report << "gaussian_translating.min_rank = " << min_rank << '\n';
    report << "gaussian_translating.dimension = " << family.param_count() << '\n';
    report << "gaussian_translating.undetermined = " << names << '\n';
    report << "gaussian_translating.x_c_only_at_every_state = " << (always_xc ? "yes" : "no")
           << '\n';
    result.summary += "GaussianTranslating/stationary: Im[M] " +
                      std::string(min_rank < static_cast<int>(family.param_count())
                                      ? "rank-deficient: "
                                      : "full rank") +
                      names + "\n";
  }

  {
    std::uniform_real_distribution<double> width(5.0, 25.0), chirp(-0.1, 0.1), phase(-kPi, kPi);
    bool phi_null = true, spd = true;
    double worst_column = 0.0;
    for (int s = 0; s < cfg.master_samples; ++s) {
      RealVector q(3);
      q << width(rng), chirp(rng), phase(rng);
      const MassConstrainedReport r = mass_constrained_gaussian_check(0.1 * std::sqrt(15.0), q, *grid);
      worst_column = std::max(worst_column, r.phi_column_norm);
      spd = spd && r.real_part_spd;
      phi_null = phi_null && std::find(r.imaginary.undetermined.begin(),
                                       r.imaginary.undetermined.end(),
                                       "phi") != r.imaginary.undetermined.end();
    }
    report << "mass_constrained.phi_in_null_space = " << (phi_null ? "yes" : "no") << '\n';
    report << "mass_constrained.max_phi_column = " << format_real(worst_column) << '\n';
    report << "mass_constrained.real_part_spd = " << (spd ? "yes" : "no") << '\n';
  }

  {
    // The sech packets are narrow; they get a finer grid of their own.
    const GridPtr fine = make_grid(64.0 * kPi, 2048);
    const AnsatzFamily family = AnsatzFamily::sech();
    const NlsDensity density = NlsDensity::comoving();
    std::uniform_real_distribution<double> ar(0.3, 1.0), ai(-0.3, 0.3), width(0.7, 2.0),
        chirp(-0.1, 0.1), shift(-5.0, 5.0);
    double max_imag_rate = 0.0, min_real_rate = std::numeric_limits<double>::infinity();
    int min_rank = 5;
    for (int s = 0; s < cfg.master_samples; ++s) {
      RealVector q(5);
      q << ar(rng), ai(rng), width(rng), chirp(rng), shift(rng);
      const MasterSystem sys = assemble_master(density, family, family.make_state(q), *fine);
      const RankReport r = solve_imag_part(sys, family.names());
      const RealVector re = solve_real_part(sys);
      const double amp = std::hypot(q[0], q[1]);
      auto rate = [&](const RealVector& v) { return (q[0] * v[0] + q[1] * v[1]) / amp; };
      max_imag_rate = std::max(max_imag_rate, std::abs(rate(r.rate)));
      min_real_rate = std::min(min_real_rate, std::abs(rate(re)));
      min_rank = std::min(min_rank, r.rank);
    }
    report << "sech.min_rank = " << min_rank << '\n';
    report << "sech.max_abs_amplitude_rate_imag = " << format_real(max_imag_rate) << '\n';
    report << "sech.min_abs_amplitude_rate_real = " << format_real(min_real_rate) << '\n';
  }

  {
    const AnsatzFamily gauss = AnsatzFamily::gaussian_comoving();
    const AnsatzFamily poly = AnsatzFamily::poly_exponent(2);
    double worst = 0.0;
    for (int s = 0; s < cfg.master_samples; ++s) {
      const ParameterState g = gauss.make_state(random_gaussian_state(rng, gauss));
      const ParameterState p = gaussian_to_poly_exponent(g);
      const BlockIdentityResiduals r =
          poly_exponent_block_residuals(assemble_master(NlsDensity::comoving(), poly, p, *grid));
      worst = std::max({worst, r.b_minus_d / r.scale, r.b_plus_i_c / r.scale});
    }
    report << "poly_exponent.max_block_residual = " << format_real(worst) << '\n';
  }
  result.files.push_back({"report.txt", report.str()});
}

void sweep_run(const ExperimentConfig& cfg, ExperimentResult& result, int threads) {
  const std::vector<SweepRow> rows = velocity_sweep(cfg, threads);
  std::ostringstream table;
  table << "A0,c_rom,c_dns,rel_err,low_confidence,event\n";
  double worst = 0.0;
  for (const auto& r : rows) {
    table << format_real(r.amplitude) << ',' << format_real(r.c_rom) << ',' << format_real(r.c_dns)
          << ',' << format_real(r.relative_error) << ',' << (r.low_confidence ? 1 : 0) << ','
          << r.event << '\n';
    worst = std::max(worst, r.relative_error);
    if (r.event != "completed") {
      result.status = 2;
      result.events.push_back("A0 = " + format_real(r.amplitude) + ": " + r.event);
    }
  }
  result.files.push_back({"sweep.csv", table.str()});
  result.files.push_back({"report.txt", "max_relative_error = " + format_real(worst) + "\n"});
}

void audit_run(const ExperimentConfig& cfg, ExperimentResult& result) {
  std::ostringstream report;
  const GridPtr grid = cfg.grid();
  std::mt19937_64 rng(cfg.seed);

  const AnsatzFamily family = AnsatzFamily::gaussian_comoving();
  const ConservedQuantitySet quantities = ConservedQuantitySet::nls_gaussian(family, true);
  double max_lambda = 0.0;
  for (int s = 0; s < cfg.audit_samples; ++s) {
    const ParameterState q = family.make_state(random_gaussian_state(rng, family));
    const TangentSystem sys = assemble(PdeModel{PdeKind::NlsComoving}, family, q, *grid);
    const ConstrainedSolution sol = constrained_rons_rhs(sys, quantities);
    max_lambda = std::max(max_lambda, sol.multipliers.cwiseAbs().maxCoeff());
  }
  report << "multipliers.samples = " << cfg.audit_samples << '\n';
  report << "multipliers.max_abs = " << format_real(max_lambda) << '\n';

  const double starts[][4] = {{0.1, 15.0, 0.0, 0.0},
                              {0.2, 10.0, 0.02, 0.0},
                              {0.05, 20.0, -0.03, 0.5},
                              {0.15, 8.0, 0.05, 0.0},
                              {0.1, 25.0, 0.0, 1.0}};
  OdeSolverConfig ode = cfg.ode;
  ode.t_final = cfg.audit_ode_final;
  double mass_drift = 0.0, energy_drift = 0.0;
  for (const auto& s : starts) {
    RealVector q0(4);
    q0 << s[0], s[1], s[2], s[3];
    const OdeTrajectory traj = integrate_ode(
        [](double, const RealVector& q) {
          return closed_form_rhs(ClosedFormSystem::NlsComovingGaussian, q);
        },
        family.make_state(q0), ode, [&](const RealVector& q) { return family.admissible(q); });
    if (!traj.completed()) {
      result.status = 2;
      result.events.push_back(event_line("rom", traj.event, traj.event_time, traj.message));
    }
    const double m0 = gaussian_mass(s[0], s[1]);
    const double e0 = gaussian_energy(s[0], s[1], s[2]);
    for (const auto& q : traj.states) {
      mass_drift = std::max(mass_drift, std::abs(gaussian_mass(q[0], q[1]) - m0) / m0);
      energy_drift =
          std::max(energy_drift, std::abs(gaussian_energy(q[0], q[1], q[2]) - e0) / std::abs(e0));
    }
  }
  report << "rom.t_final = " << format_real(ode.t_final) << '\n';
  report << "rom.max_mass_drift = " << format_real(mass_drift) << '\n';
  report << "rom.max_energy_drift = " << format_real(energy_drift) << '\n';

  ExperimentConfig dns_cfg = cfg;
  dns_cfg.dns.t_final = cfg.audit_dns_final;
  double m0 = 0.0, dns_drift = 0.0;
  bool first = true;
  const FieldTrajectory dns = run_dns(
      dns_cfg, grid, cfg.initial_state(),
      [&](double, const ComplexVector& u) {
        const double m = quadrature(u.cwiseAbs2(), *grid);
        if (first) {
          m0 = m;
          first = false;
        }
        dns_drift = std::max(dns_drift, std::abs(m - m0) / m0);
      },
      false);
  if (!dns.completed()) {
    result.status = 2;
    result.events.push_back(event_line("dns", dns.event, dns.last_valid_time, dns.message));
  }
  report << "dns.pde = " << to_string(cfg.pde) << '\n';
  report << "dns.t_final = " << format_real(dns_cfg.dns.t_final) << '\n';
  report << "dns.max_mass_drift = " << format_real(dns_drift) << '\n';
  result.files.push_back({"report.txt", report.str()});
}

}  // namespace

std::vector<SweepRow> velocity_sweep(const ExperimentConfig& cfg, int threads) {
  const GridPtr grid = cfg.grid();
  const std::size_t count = cfg.sweep_amplitudes.size();
  std::vector<SweepRow> rows(count);
  const std::size_t iA = cfg.ansatz().index_of("A");

  auto work = [&](std::size_t i) {
    ExperimentConfig c = cfg;
    c.initial[static_cast<Eigen::Index>(iA)] = cfg.sweep_amplitudes[i];
    SweepRow& row = rows[i];
    row.amplitude = cfg.sweep_amplitudes[i];

    const RomSetup rom = make_rom(c, grid);
    const OdeTrajectory traj = run_rom(rom, c);
    ObservableSeries rom_series(grid->domain_length());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      rom_series.add(traj.times[k], observe_state(rom.family, traj.state(k), grid));
    }

    ObservableSeries dns_series(grid->domain_length());
    const FieldTrajectory dns = run_dns(
        c, grid, c.initial_state(),
        [&](double t, const ComplexVector& u) {
          dns_series.add(t, observe_field(ComplexField(grid, u)));
        },
        false);
    row.event = std::string(to_string(dns.event));
    if (!traj.completed()) row.event = "rom_" + std::string(to_string(traj.event));
    try {
      const FitWindow w = window_for(c, dns_series);
      const GroupVelocityFit fr = group_velocity(rom_series, w, c.channel);
      const GroupVelocityFit fd = group_velocity(dns_series, w, c.channel);
      row.c_rom = fr.velocity;
      row.c_dns = fd.velocity;
      row.relative_error = std::abs(fr.velocity - fd.velocity) / std::abs(fd.velocity);
      row.low_confidence = fd.low_confidence;
    } catch (const std::invalid_argument& e) {
      row.event = std::string("fit_failed: ") + e.what();
      row.relative_error = std::numeric_limits<double>::infinity();
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers =
      std::min<std::size_t>(count, threads > 0 ? static_cast<std::size_t>(threads) : hw);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        work(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads) {
  ExperimentResult result;
  if (threads <= 0) threads = cfg.threads;
  switch (cfg.experiment) {
    case ExperimentKind::RomRun:
      rom_run(cfg, result);
      break;
    case ExperimentKind::DnsRun:
      dns_run(cfg, result);
      break;
    case ExperimentKind::Compare:
      compare_run(cfg, result);
      break;
    case ExperimentKind::MasterEqCheck:
      master_check(cfg, result);
      break;
    case ExperimentKind::VelocitySweep:
      sweep_run(cfg, result, threads);
      break;
    case ExperimentKind::ConservationAudit:
      audit_run(cfg, result);
      break;
  }
  return result;
}

std::string manifest(const ExperimentResult& result, const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "version = " << kVersion << '\n';
  out << "experiment = " << to_string(cfg.experiment) << '\n';
  out << "config_hash = " << hex64(fnv1a(cfg.canonical)) << '\n';
  out << "status = " << result.status << '\n';
  for (const auto& e : result.events) out << "event = " << e << '\n';
  for (const auto& f : result.files) {
    out << "file." << f.name << " = " << hex64(fnv1a(f.content)) << '\n';
  }
  prefixed(out, "config.", cfg.canonical);
  return out.str();
}

void write_outputs(const ExperimentResult& result, const ExperimentConfig& cfg,
                   const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(directory) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + (fs::path(directory) / name).string() + "'");
    out << content;
  };
  for (const auto& f : result.files) write(f.name, f.content);
  write("manifest.txt", manifest(result, cfg));
}

}  // namespace romnls
