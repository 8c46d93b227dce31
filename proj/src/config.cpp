#include "romnls/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "romnls/text.hpp"

namespace romnls {

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::RomRun:
      return "rom_run";
    case ExperimentKind::DnsRun:
      return "dns_run";
    case ExperimentKind::Compare:
      return "compare";
    case ExperimentKind::MasterEqCheck:
      return "master_eq_check";
    case ExperimentKind::VelocitySweep:
      return "velocity_sweep";
    case ExperimentKind::ConservationAudit:
      return "conservation_audit";
  }
  return "unknown";
}

ExperimentKind experiment_from_string(std::string_view name) {
  for (auto k : {ExperimentKind::RomRun, ExperimentKind::DnsRun, ExperimentKind::Compare,
                 ExperimentKind::MasterEqCheck, ExperimentKind::VelocitySweep,
                 ExperimentKind::ConservationAudit}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

ConfigError::ConfigError(const std::string& key, int line, const std::string& message)
    : std::invalid_argument((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                            key + ": " + message),
      key_(key),
      line_(line) {}

double parse_real_expression(std::string_view text, std::string_view key) {
  text = trim(text);
  if (text.empty()) throw std::invalid_argument(std::string(key) + ": empty value");
  double value = 1.0;
  char op = '*';
  std::size_t pos = 0;
  while (true) {
    const auto next = text.find_first_of("*/", pos);
    const auto token = trim(text.substr(pos, next == std::string_view::npos ? next : next - pos));
    double factor = 0.0;
    if (token == "pi") {
      factor = kPi;
    } else {
      factor = parse_real(token, key);
    }
    value = op == '*' ? value * factor : value / factor;
    if (next == std::string_view::npos) break;
    op = text[next];
    pos = next + 1;
  }
  if (!std::isfinite(value)) {
    throw std::invalid_argument(std::string(key) + ": '" + std::string(text) + "' is not finite");
  }
  return value;
}

namespace {

class Reader {
 public:
  explicit Reader(std::map<std::string, KeyValueLine> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::optional<KeyValueLine> take(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  template <typename F>
  auto convert(const KeyValueLine& kv, F&& f) -> decltype(f(kv.value)) {
    try {
      return f(kv.value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(kv.key, kv.line, e.what());
    }
  }

  void real(const std::string& key, double& out) {
    if (auto kv = take(key)) out = convert(*kv, [&](const std::string& v) {
        return parse_real_expression(v, key);
      });
  }

  void positive(const std::string& key, double& out) {
    real(key, out);
    if (has(key) && !(out > 0.0)) throw ConfigError(key, entries_.at(key).line, "must be positive");
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (auto kv = take(key)) {
      const double v = convert(*kv, [&](const std::string& s) { return parse_real(s, key); });
      if (v != std::floor(v) || v < 0.0 || v > 9.0e15) {
        throw ConfigError(key, kv->line, "'" + kv->value + "' is not a non-negative integer");
      }
      out = static_cast<Int>(v);
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (auto kv = take(key)) {
      const std::string& v = kv->value;
      if (v == "true" || v == "yes" || v == "on") {
        out = true;
      } else if (v == "false" || v == "no" || v == "off") {
        out = false;
      } else {
        throw ConfigError(key, kv->line, "'" + v + "' is not a boolean");
      }
    }
  }

  void string(const std::string& key, std::string& out) {
    if (auto kv = take(key)) out = kv->value;
  }

  template <typename T, typename F>
  void choice(const std::string& key, T& out, F&& from_string) {
    if (auto kv = take(key)) out = convert(*kv, from_string);
  }

  void real_list(const std::string& key, std::vector<double>& out) {
    if (auto kv = take(key)) {
      out.clear();
      std::string_view rest = kv->value;
      while (true) {
        const auto comma = rest.find(',');
        const auto item = rest.substr(0, comma);
        out.push_back(convert(*kv, [&](const std::string&) {
          return parse_real_expression(item, key);
        }));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
    }
  }

  // Every key not consumed so far; the first one is reported.
  void reject_unknown() const {
    for (const auto& [key, kv] : entries_) {
      if (!used_.count(key)) throw ConfigError(key, kv.line, "unknown key");
    }
  }

  int line(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

 private:
  std::map<std::string, KeyValueLine> entries_;
  std::set<std::string> used_;
};

RomMethod rom_method_from_string(const std::string& v) {
  if (v == "auto") return RomMethod::Auto;
  if (v == "closed_form") return RomMethod::ClosedForm;
  if (v == "rons") return RomMethod::Rons;
  throw std::invalid_argument("unknown rom method '" + v + "' (auto, closed_form, rons)");
}

}  // namespace

namespace {

AnsatzFamily configured_family(FamilyId family, int degree) {
  switch (family) {
    case FamilyId::GaussianComoving:
      return AnsatzFamily::gaussian_comoving();
    case FamilyId::GaussianTranslating:
      return AnsatzFamily::gaussian_translating();
    case FamilyId::GaussianFull:
      return AnsatzFamily::gaussian_full();
    case FamilyId::Sech:
      return AnsatzFamily::sech();
    case FamilyId::PolyExponent:
      return AnsatzFamily::poly_exponent(degree);
    case FamilyId::GaussianMassConstrained:
      break;
  }
  throw std::invalid_argument("family '" + std::string(to_string(family)) +
                              "' cannot be configured directly");
}

}  // namespace

AnsatzFamily ExperimentConfig::ansatz() const {
  return configured_family(family, static_cast<int>(initial.size() / 2) - 1);
}

ParameterState ExperimentConfig::initial_state() const { return ansatz().make_state(initial); }

GridPtr ExperimentConfig::grid() const { return make_grid(grid_length, grid_points); }

ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  std::map<std::string, KeyValueLine> entries;
  for (auto& kv : parse_key_values(text)) {
    if (entries.count(kv.key)) throw ConfigError(kv.key, kv.line, "duplicate key");
    entries[kv.key] = kv;
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(o, 0, "override must look like key=value");
    }
    const std::string key(trim(std::string_view(o).substr(0, eq)));
    const std::string value(trim(std::string_view(o).substr(eq + 1)));
    if (key.empty()) throw ConfigError(o, 0, "override has an empty key");
    entries[key] = {key, value, 0};
  }

  std::ostringstream canonical;
  for (const auto& [key, kv] : entries) canonical << key << " = " << kv.value << '\n';

  Reader r(entries);
  ExperimentConfig cfg;
  cfg.canonical = canonical.str();

  r.string("description", cfg.description);
  if (!r.has("experiment")) throw ConfigError("experiment", 0, "missing required key");
  r.choice("experiment", cfg.experiment,
           [](const std::string& v) { return experiment_from_string(v); });

  r.choice("pde.kind", cfg.pde, [](const std::string& v) { return pde_kind_from_string(v); });
  r.boolean("rom.velocity_potential", cfg.rom_velocity_potential);
  r.boolean("dns.velocity_potential", cfg.dns_velocity_potential);

  r.positive("grid.length", cfg.grid_length);
  r.integer("grid.points", cfg.grid_points);

  r.choice("ansatz.family", cfg.family, [](const std::string& v) { return family_from_string(v); });
  int degree = 2;
  r.integer("ansatz.degree", degree);
  if (cfg.family == FamilyId::GaussianMassConstrained) {
    throw ConfigError("ansatz.family", r.line("ansatz.family"),
                      "gaussian_mass_constrained is only used by master_eq_check internally");
  }
  const AnsatzFamily family = configured_family(cfg.family, degree);
  cfg.initial = RealVector::Zero(static_cast<Eigen::Index>(family.param_count()));
  for (std::size_t i = 0; i < family.param_count(); ++i) {
    r.real("initial." + family.names()[i], cfg.initial[static_cast<Eigen::Index>(i)]);
  }
  for (const auto& [key, kv] : entries) {
    if (key.rfind("initial.", 0) == 0) {
      const std::string name = key.substr(8);
      if (std::find(family.names().begin(), family.names().end(), name) == family.names().end()) {
        throw ConfigError(key, kv.line,
                          "'" + name + "' is not a parameter of " +
                              std::string(to_string(cfg.family)));
      }
    }
  }

  r.choice("rom.method", cfg.rom_method, rom_method_from_string);
  r.choice("ode.method", cfg.ode.method,
           [](const std::string& v) { return ode_method_from_string(v); });
  r.positive("ode.dt", cfg.ode.dt);
  r.positive("ode.rtol", cfg.ode.rtol);
  r.positive("ode.atol", cfg.ode.atol);
  r.positive("ode.dt_max", cfg.ode.dt_max);
  r.positive("ode.dt_min", cfg.ode.dt_min);

  double t_final = 100.0;
  double interval = 1.0;
  r.positive("time.final", t_final);
  r.positive("time.output_interval", interval);
  cfg.ode.t_final = cfg.dns.t_final = t_final;
  cfg.ode.output_interval = cfg.dns.output_interval = interval;

  r.positive("dns.dt", cfg.dns.dt);
  r.integer("dns.contour_points", cfg.dns.contour_points);
  r.boolean("dns.dealias", cfg.dns.dealias);
  r.positive("dns.blowup_threshold", cfg.dns.blowup_threshold);

  r.choice("diagnostics.channel", cfg.channel,
           [](const std::string& v) { return center_channel_from_string(v); });
  r.positive("diagnostics.focusing_threshold", cfg.focusing_threshold);
  if (r.has("diagnostics.window_start") || r.has("diagnostics.window_end")) {
    FitWindow w;
    if (!r.has("diagnostics.window_start") || !r.has("diagnostics.window_end")) {
      throw ConfigError("diagnostics.window_start", 0, "give both window_start and window_end");
    }
    r.real("diagnostics.window_start", w.start);
    r.real("diagnostics.window_end", w.end);
    if (!(w.end > w.start)) {
      throw ConfigError("diagnostics.window_end", r.line("diagnostics.window_end"),
                        "must exceed window_start");
    }
    cfg.window = w;
  }
  r.positive("output.envelope_interval", cfg.envelope_interval);

  r.boolean("compare.reduced_lagrangian", cfg.reduced_lagrangian);
  r.real_list("sweep.amplitudes", cfg.sweep_amplitudes);

  r.integer("seed", cfg.seed);
  r.integer("audit.samples", cfg.audit_samples);
  r.positive("audit.ode_final", cfg.audit_ode_final);
  r.positive("audit.dns_final", cfg.audit_dns_final);
  r.integer("master.samples", cfg.master_samples);

  r.string("output.dir", cfg.output_dir);
  r.integer("threads", cfg.threads);

  r.reject_unknown();

  // Cross-field checks.
  auto wrap = [&](const std::string& key, auto&& check) {
    try {
      check();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(key, r.line(key), e.what());
    }
  };
  wrap("grid.points", [&] { make_grid(cfg.grid_length, cfg.grid_points); });
  wrap("ode.dt", [&] { cfg.ode.validate(); });
  wrap("dns.dt", [&] { cfg.dns.validate(); });
  const bool needs_state = cfg.experiment == ExperimentKind::RomRun ||
                           cfg.experiment == ExperimentKind::DnsRun ||
                           cfg.experiment == ExperimentKind::Compare ||
                           cfg.experiment == ExperimentKind::VelocitySweep;
  if (needs_state) {
    wrap("ansatz.family", [&] { family.validate(cfg.initial); });
  }
  if (cfg.experiment == ExperimentKind::VelocitySweep) {
    if (cfg.sweep_amplitudes.empty()) {
      throw ConfigError("sweep.amplitudes", 0, "velocity_sweep needs at least one amplitude");
    }
    if (cfg.family == FamilyId::Sech || cfg.family == FamilyId::PolyExponent) {
      throw ConfigError("ansatz.family", r.line("ansatz.family"),
                        "velocity_sweep scales the Gaussian amplitude A");
    }
  }
  if (cfg.reduced_lagrangian && cfg.pde == PdeKind::Mnls) {
    throw ConfigError("compare.reduced_lagrangian", r.line("compare.reduced_lagrangian"),
                      "the reduced Lagrangian is only available for the NLS densities");
  }
  if (cfg.audit_samples < 1) throw ConfigError("audit.samples", r.line("audit.samples"), "must be >= 1");
  if (cfg.master_samples < 1) {
    throw ConfigError("master.samples", r.line("master.samples"), "must be >= 1");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str(), overrides);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, 0, e.what());
  }
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::vector<CatalogEntry> list_experiments(const std::string& directory) {
  std::vector<CatalogEntry> out;
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) return out;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.path().extension() != ".cfg") continue;
    std::ifstream in(entry.path());
    std::stringstream buffer;
    buffer << in.rdbuf();
    CatalogEntry item{entry.path().stem().string(), entry.path().string(), ""};
    for (const auto& kv : parse_key_values(buffer.str())) {
      if (kv.key == "description") item.description = kv.value;
    }
    out.push_back(std::move(item));
  }
  std::sort(out.begin(), out.end(),
            [](const CatalogEntry& a, const CatalogEntry& b) { return a.name < b.name; });
  return out;
}

}  // namespace romnls
