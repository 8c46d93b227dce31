#include "romnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "romnls/rons.hpp"
#include "romnls/text.hpp"

namespace romnls {

namespace {

Eigen::Index argmax(const RealVector& v) {
  Eigen::Index i = 0;
  v.maxCoeff(&i);
  return i;
}

bool second_peak(const RealVector& mod, Eigen::Index top) {
  const auto n = mod.size();
  const double limit = 0.9 * mod[top];
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index gap = std::min(std::abs(j - top), n - std::abs(j - top));
    if (gap <= 2) continue;
    const double left = mod[(j + n - 1) % n];
    const double right = mod[(j + 1) % n];
    if (mod[j] > limit && mod[j] >= left && mod[j] >= right) return true;
  }
  return false;
}

}  // namespace

double peak_center(const ComplexVector& values, const PeriodicGrid& grid) {
  const RealVector mod = values.cwiseAbs();
  const auto n = mod.size();
  const Eigen::Index j = argmax(mod);
  const double left = mod[(j + n - 1) % n];
  const double mid = mod[j];
  const double right = mod[(j + 1) % n];
  const double curvature = left - 2.0 * mid + right;
  double offset = 0.0;
  if (curvature < 0.0) offset = 0.5 * (left - right) / curvature;
  offset = std::clamp(offset, -0.5, 0.5);
  return grid.point(static_cast<std::size_t>(j)) + offset * grid.spacing();
}

double windowed_centroid(const ComplexVector& values, const PeriodicGrid& grid, double around) {
  const double L = grid.domain_length();
  double weight = 0.0;
  double moment = 0.0;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    const double w = std::norm(values[j]);
    const double y = std::remainder(grid.point(static_cast<std::size_t>(j)) - around, L);
    weight += w;
    moment += w * y;
  }
  if (weight == 0.0) return around;
  return around + moment / weight;
}

Observables observe_field(const ComplexField& field) {
  const PeriodicGrid& grid = field.grid();
  const ComplexVector& u = field.values();
  const RealVector density = u.cwiseAbs2();
  const ComplexVector ux = spectral_derivative(grid, u, 1);

  Observables o;
  o.mass = quadrature(density, grid);
  o.energy = quadrature(ux.cwiseAbs2(), grid) / 8.0 - quadrature(density.cwiseAbs2(), grid) / 4.0;
  const RealVector mod = u.cwiseAbs();
  o.peak_amplitude = mod.size() > 0 ? mod.maxCoeff() : 0.0;
  if (o.peak_amplitude == 0.0) return o;
  o.wave_center = peak_center(u, grid);
  o.centroid = windowed_centroid(u, grid, o.wave_center);
  o.ambiguous = second_peak(mod, argmax(mod));
  return o;
}

Observables observe_state(const AnsatzFamily& family, const ParameterState& state, GridPtr grid) {
  const FamilyId id = family.id();
  const RealVector& q = state.values;
  const bool plain_gaussian = id == FamilyId::GaussianComoving ||
                              id == FamilyId::GaussianTranslating ||
                              (id == FamilyId::GaussianFull && q[family.index_of("V")] == 0.0);
  if (plain_gaussian) {
    family.validate(q);
    const double A = q[family.index_of("A")];
    const double L = q[family.index_of("L")];
    const double U = q[family.index_of("U")];
    Observables o;
    o.mass = gaussian_mass(A, L);
    o.energy = gaussian_energy(A, L, U);
    o.peak_amplitude = A;
    if (const auto c = family.center_index()) o.wave_center = q[static_cast<Eigen::Index>(*c)];
    o.centroid = o.wave_center;
    return o;
  }
  const double period = grid->domain_length();
  Observables o = observe_field(evaluate(family, state, std::move(grid)).field);
  // The field only knows the center modulo the period; report the image
  // nearest to x_c so ROM centers need no unwrapping.
  if (const auto c = family.center_index()) {
    const double xc = q[static_cast<Eigen::Index>(*c)];
    o.wave_center = xc + std::remainder(o.wave_center - xc, period);
    o.centroid = xc + std::remainder(o.centroid - xc, period);
  }
  return o;
}

std::string_view to_string(CenterChannel channel) {
  return channel == CenterChannel::Centroid ? "centroid" : "peak";
}

CenterChannel center_channel_from_string(std::string_view name) {
  if (name == "centroid") return CenterChannel::Centroid;
  if (name == "peak") return CenterChannel::PeakFit;
  throw std::invalid_argument("unknown center channel '" + std::string(name) +
                              "' (centroid, peak)");
}

void ObservableSeries::add(double t, const Observables& sample) {
  if (!times_.empty() && !(t > times_.back())) {
    throw std::invalid_argument("observable times must increase strictly");
  }
  times_.push_back(t);
  samples_.push_back(sample);
}

std::vector<double> ObservableSeries::unwrapped(CenterChannel channel) const {
  std::vector<double> out;
  out.reserve(samples_.size());
  double shift = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double raw = channel == CenterChannel::Centroid ? samples_[i].centroid
                                                          : samples_[i].wave_center;
    if (i > 0 && domain_length_ > 0.0) {
      const double prev = out.back() - shift;
      shift += domain_length_ * std::round((prev - raw) / domain_length_);
    }
    out.push_back(raw + shift);
  }
  return out;
}

std::string ObservableSeries::to_csv() const {
  std::ostringstream out;
  out << "t,mass,energy,peak_amplitude,wave_center,centroid,ambiguous\n";
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const Observables& o = samples_[i];
    out << format_real(times_[i]) << ',' << format_real(o.mass) << ',' << format_real(o.energy)
        << ',' << format_real(o.peak_amplitude) << ',' << format_real(o.wave_center) << ','
        << format_real(o.centroid) << ',' << (o.ambiguous ? 1 : 0) << '\n';
  }
  return out.str();
}

FitWindow default_window(const ObservableSeries& series) {
  if (series.empty()) throw std::invalid_argument("empty observable series");
  const double t0 = series.times().front();
  const double span = series.times().back() - t0;
  return {t0 + 0.2 * span, t0 + 0.8 * span};
}

GroupVelocityFit group_velocity(const ObservableSeries& series, const FitWindow& window,
                                CenterChannel channel) {
  const std::vector<double> center = series.unwrapped(channel);
  const auto& times = series.times();
  const double tol = 1e-9 * (1.0 + std::abs(window.end));
  double st = 0.0, sx = 0.0;
  std::vector<std::size_t> picked;
  GroupVelocityFit fit;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window.start - tol || times[i] > window.end + tol) continue;
    picked.push_back(i);
    st += times[i];
    sx += center[i];
    fit.low_confidence = fit.low_confidence || series.samples()[i].ambiguous;
  }
  if (picked.size() < 10) {
    throw std::invalid_argument("fit window [" + format_real(window.start) + ", " +
                                format_real(window.end) + "] holds " +
                                std::to_string(picked.size()) + " samples; need at least 10");
  }
  const double n = static_cast<double>(picked.size());
  const double tm = st / n;
  const double xm = sx / n;
  double stt = 0.0, stx = 0.0;
  for (std::size_t i : picked) {
    stt += (times[i] - tm) * (times[i] - tm);
    stx += (times[i] - tm) * (center[i] - xm);
  }
  fit.velocity = stx / stt;
  fit.intercept = xm - fit.velocity * tm;
  double ss = 0.0;
  for (std::size_t i : picked) {
    const double r = center[i] - (fit.intercept + fit.velocity * times[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  fit.samples = picked.size();
  return fit;
}

RunRecord record_fields(const FieldTrajectory& trajectory) {
  if (trajectory.snapshots.size() != trajectory.times.size()) {
    throw std::invalid_argument("record_fields needs a trajectory with stored snapshots");
  }
  RunRecord rec{trajectory.grid, ObservableSeries(trajectory.grid->domain_length()), {}};
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const ComplexField field = trajectory.field(i);
    rec.series.add(trajectory.times[i], observe_field(field));
    rec.envelopes.push_back(field.values().cwiseAbs());
  }
  return rec;
}

RunRecord record_states(const OdeTrajectory& trajectory, const AnsatzFamily& family, GridPtr grid) {
  RunRecord rec{grid, ObservableSeries(grid->domain_length()), {}};
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    const ParameterState state = family.make_state(trajectory.states[i], trajectory.times[i]);
    rec.series.add(state.time, observe_state(family, state, grid));
    rec.envelopes.push_back(evaluate(family, state, grid).field.values().cwiseAbs());
  }
  return rec;
}

std::string_view to_string(FocusingClass cls) {
  switch (cls) {
    case FocusingClass::Focusing:
      return "focusing";
    case FocusingClass::Defocusing:
      return "defocusing";
    case FocusingClass::Neutral:
      return "neutral";
  }
  return "unknown";
}

FocusingClass classify_focusing(const ObservableSeries& series, double threshold) {
  if (series.empty()) throw std::invalid_argument("empty observable series");
  const double initial = series.samples().front().peak_amplitude;
  double highest = initial;
  for (const auto& s : series.samples()) highest = std::max(highest, s.peak_amplitude);
  if (highest > (1.0 + threshold) * initial) return FocusingClass::Focusing;
  if (series.samples().back().peak_amplitude < (1.0 - threshold) * initial) {
    return FocusingClass::Defocusing;
  }
  return FocusingClass::Neutral;
}

namespace {

std::pair<double, double> peak_of_peaks(const ObservableSeries& series,
                                        const std::vector<std::size_t>& rows) {
  double best = -1.0;
  double when = 0.0;
  for (std::size_t i : rows) {
    const double p = series.samples()[i].peak_amplitude;
    if (p > best) {
      best = p;
      when = series.times()[i];
    }
  }
  return {best, when};
}

ObservableSeries subset(const ObservableSeries& series, const std::vector<std::size_t>& rows) {
  ObservableSeries out(series.domain_length());
  for (std::size_t i : rows) out.add(series.times()[i], series.samples()[i]);
  return out;
}

}  // namespace

ComparisonReport compare(const RunRecord& rom, const RunRecord& dns, const CompareOptions& options) {
  if (!rom.grid || !dns.grid || rom.grid->size() != dns.grid->size() ||
      rom.grid->domain_length() != dns.grid->domain_length()) {
    throw std::invalid_argument("compare: ROM and DNS records live on different grids");
  }
  std::vector<std::size_t> rows_rom, rows_dns;
  const auto& tr = rom.series.times();
  const auto& td = dns.series.times();
  for (std::size_t i = 0, j = 0; i < tr.size() && j < td.size();) {
    const double tol = 1e-9 * (1.0 + std::abs(td[j]));
    if (std::abs(tr[i] - td[j]) <= tol) {
      rows_rom.push_back(i++);
      rows_dns.push_back(j++);
    } else if (tr[i] < td[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  if (rows_rom.size() < 2) throw std::invalid_argument("compare: fewer than two shared times");

  const ObservableSeries srom = subset(rom.series, rows_rom);
  const ObservableSeries sdns = subset(dns.series, rows_dns);

  ComparisonReport report;
  const FitWindow window = options.use_window ? options.window : default_window(sdns);
  const GroupVelocityFit vr = group_velocity(srom, window, options.channel);
  const GroupVelocityFit vd = group_velocity(sdns, window, options.channel);
  report.group_velocity_rom = vr.velocity;
  report.group_velocity_dns = vd.velocity;
  report.velocity_low_confidence = vr.low_confidence || vd.low_confidence;
  const double diff = std::abs(vr.velocity - vd.velocity);
  report.relative_velocity_error =
      diff == 0.0 ? 0.0
                  : (vd.velocity == 0.0 ? std::numeric_limits<double>::infinity()
                                        : diff / std::abs(vd.velocity));

  const bool envelopes = rom.envelopes.size() == tr.size() && dns.envelopes.size() == td.size();
  for (std::size_t k = 0; envelopes && k < rows_rom.size(); ++k) {
    const RealVector& a = rom.envelopes[rows_rom[k]];
    const RealVector& b = dns.envelopes[rows_dns[k]];
    const double denom = b.norm();
    const double num = (a - b).norm();
    const double err = num == 0.0 ? 0.0 : (denom == 0.0 ? std::numeric_limits<double>::infinity()
                                                        : num / denom);
    report.envelope_times.push_back(td[rows_dns[k]]);
    report.envelope_error_L2.push_back(err);
    report.max_envelope_error = std::max(report.max_envelope_error, err);
  }

  const auto [peak_rom, when_rom] = peak_of_peaks(rom.series, rows_rom);
  const auto [peak_dns, when_dns] = peak_of_peaks(dns.series, rows_dns);
  const double pdiff = std::abs(peak_rom - peak_dns);
  report.peak_amplitude_error =
      pdiff == 0.0 ? 0.0
                   : (peak_dns == 0.0 ? std::numeric_limits<double>::infinity() : pdiff / peak_dns);
  report.peak_time_error = std::abs(when_rom - when_dns);
  report.focusing_class_rom = classify_focusing(srom, options.focusing_threshold);
  report.focusing_class_dns = classify_focusing(sdns, options.focusing_threshold);
  return report;
}

std::string ComparisonReport::to_text() const {
  std::ostringstream out;
  out << "group_velocity_rom = " << format_real(group_velocity_rom) << '\n';
  out << "group_velocity_dns = " << format_real(group_velocity_dns) << '\n';
  out << "relative_velocity_error = " << format_real(relative_velocity_error) << '\n';
  out << "velocity_low_confidence = " << (velocity_low_confidence ? "yes" : "no") << '\n';
  out << "max_envelope_error_L2 = " << format_real(max_envelope_error) << '\n';
  out << "peak_amplitude_error = " << format_real(peak_amplitude_error) << '\n';
  out << "peak_time_error = " << format_real(peak_time_error) << '\n';
  out << "focusing_class_rom = " << to_string(focusing_class_rom) << '\n';
  out << "focusing_class_dns = " << to_string(focusing_class_dns) << '\n';
  return out.str();
}

std::string ComparisonReport::envelope_csv() const {
  std::ostringstream out;
  out << "t,envelope_error_L2\n";
  for (std::size_t i = 0; i < envelope_times.size(); ++i) {
    out << format_real(envelope_times[i]) << ',' << format_real(envelope_error_L2[i]) << '\n';
  }
  return out.str();
}

}  // namespace romnls
