#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "romnls/ansatz.hpp"
#include "romnls/closed_form.hpp"
#include "romnls/diagnostics.hpp"
#include "romnls/integrator.hpp"
#include "romnls/pde.hpp"

namespace romnls {

enum class ExperimentKind { RomRun, DnsRun, Compare, MasterEqCheck, VelocitySweep, ConservationAudit };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(std::string_view name);

// Field-level configuration error: names the key and, when known, its line.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, int line, const std::string& message);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

enum class RomMethod { Auto, ClosedForm, Rons };

struct ExperimentConfig {
  std::string description;
  ExperimentKind experiment = ExperimentKind::RomRun;

  PdeKind pde = PdeKind::NlsComoving;
  bool rom_velocity_potential = false;
  bool dns_velocity_potential = true;

  double grid_length = 256.0 * kPi;
  std::size_t grid_points = 1024;

  FamilyId family = FamilyId::GaussianComoving;
  RealVector initial;  // ordered like the family's parameter names

  RomMethod rom_method = RomMethod::Auto;
  OdeSolverConfig ode;
  EtdSolverConfig dns;  // t_final and output_interval mirror the ode ones

  CenterChannel channel = CenterChannel::Centroid;
  double focusing_threshold = 0.05;
  std::optional<FitWindow> window;
  double envelope_interval = 10.0;  // spacing of stored |u| snapshots

  bool reduced_lagrangian = false;
  std::vector<double> sweep_amplitudes;

  std::uint64_t seed = 1;
  int audit_samples = 1000;
  double audit_ode_final = 40.0;
  double audit_dns_final = 100.0;
  int master_samples = 20;

  std::string output_dir = "out";
  int threads = 0;  // 0: one per hardware thread

  // Sorted "key = value" lines after overrides; hashed into the manifest.
  std::string canonical;

  AnsatzFamily ansatz() const;
  ParameterState initial_state() const;
  GridPtr grid() const;
};

// value := factor (('*' | '/') factor)*, factor := number | 'pi'.
double parse_real_expression(std::string_view text, std::string_view key);

// Overrides are "key=value" strings applied on top of the text.
ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t value);

struct CatalogEntry {
  std::string name;
  std::string path;
  std::string description;
};

std::vector<CatalogEntry> list_experiments(const std::string& directory = ROMNLS_CONFIG_DIR);

}  // namespace romnls
