#pragma once

#include <optional>
#include <string>
#include <vector>

#include "romnls/config.hpp"
#include "romnls/diagnostics.hpp"
#include "romnls/integrator.hpp"

namespace romnls {

struct OutputFile {
  std::string name;
  std::string content;
};

struct ExperimentResult {
  int status = 0;  // 0 completed, 2 a runtime event stopped some integration
  std::vector<OutputFile> files;
  std::vector<std::string> events;
  std::string summary;

  const OutputFile* file(const std::string& name) const;
};

// Parameter ODE of the configured ROM: a hand-written system when one matches
// the pde and family (and rom.method allows it), projected RONS otherwise.
struct RomSetup {
  AnsatzFamily family;
  OdeRhs rhs;
  std::string label;
};

RomSetup make_rom(const ExperimentConfig& cfg, GridPtr grid);
// Minimum-norm solution of Im[M] q_dot = Im[xi + eta] for the NLS density
// matching the pde.
RomSetup make_reduced_lagrangian(const ExperimentConfig& cfg, GridPtr grid);

OdeTrajectory run_rom(const RomSetup& rom, const ExperimentConfig& cfg);
FieldTrajectory run_dns(const ExperimentConfig& cfg, GridPtr grid, const ParameterState& initial,
                        const FieldObserver& observer = {}, bool store_snapshots = true);

struct SweepRow {
  double amplitude = 0.0;
  double c_rom = 0.0;
  double c_dns = 0.0;
  double relative_error = 0.0;
  bool low_confidence = false;
  std::string event;
};

// Group velocities per amplitude; rows are ordered like cfg.sweep_amplitudes
// whatever the thread count.
std::vector<SweepRow> velocity_sweep(const ExperimentConfig& cfg, int threads);

// Runs the configured experiment. threads <= 0 falls back to cfg.threads,
// then to the hardware count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads = 0);

// Writes every file plus manifest.txt into directory (created if needed).
void write_outputs(const ExperimentResult& result, const ExperimentConfig& cfg,
                   const std::string& directory);
std::string manifest(const ExperimentResult& result, const ExperimentConfig& cfg);

std::string states_csv(const OdeTrajectory& trajectory, const AnsatzFamily& family);
// Long format "t,x,abs_u" for snapshots spaced by interval.
std::string envelope_csv(const FieldTrajectory& trajectory, double interval);

}  // namespace romnls
