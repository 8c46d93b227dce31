#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "romnls/ansatz.hpp"
#include "romnls/grid.hpp"
#include "romnls/integrator.hpp"

namespace romnls {

struct Observables {
  double mass = 0.0;            // int |u|^2 dx
  double energy = 0.0;          // 1/8 int |u_x|^2 dx - 1/4 int |u|^4 dx
  double peak_amplitude = 0.0;  // max |u|
  double wave_center = 0.0;     // argmax |u| refined by a three-point parabola
  double centroid = 0.0;        // int x |u|^2 / int |u|^2 over one period around the peak
  bool ambiguous = false;       // a second local maximum within 10% of the peak
};

// Quadrature on the samples; u_x is spectral.
Observables observe_field(const ComplexField& field);
// Closed forms for Gaussian states with V = 0 (the packet's center is x_c, or 0
// without one); every other state is rendered on the grid first.
Observables observe_state(const AnsatzFamily& family, const ParameterState& state, GridPtr grid);

// Sub-grid location of max |u|; the vertex of the parabola through the
// discrete maximum and its two periodic neighbours.
double peak_center(const ComplexVector& values, const PeriodicGrid& grid);
// Centroid of |u|^2 over the period [around - L/2, around + L/2).
double windowed_centroid(const ComplexVector& values, const PeriodicGrid& grid, double around);

enum class CenterChannel { Centroid, PeakFit };

std::string_view to_string(CenterChannel channel);
CenterChannel center_channel_from_string(std::string_view name);

class ObservableSeries {
 public:
  explicit ObservableSeries(double domain_length = 0.0) : domain_length_(domain_length) {}

  // Times must increase strictly.
  void add(double t, const Observables& sample);

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  double domain_length() const { return domain_length_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Observables>& samples() const { return samples_; }

  // The center channel with jumps of more than half a period removed.
  std::vector<double> unwrapped(CenterChannel channel) const;

  // One row per sample, header "t,mass,energy,peak_amplitude,wave_center,centroid,ambiguous".
  std::string to_csv() const;

 private:
  double domain_length_;
  std::vector<double> times_;
  std::vector<Observables> samples_;
};

struct FitWindow {
  double start = 0.0;
  double end = 0.0;
};

// The default window [0.2 T, 0.8 T] of a series ending at T.
FitWindow default_window(const ObservableSeries& series);

struct GroupVelocityFit {
  double velocity = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::size_t samples = 0;
  bool low_confidence = false;  // some sample in the window had two near-equal peaks
};

// Least-squares slope of the unwrapped center over the window. Throws
// std::invalid_argument for fewer than 10 samples in the window.
GroupVelocityFit group_velocity(const ObservableSeries& series, const FitWindow& window,
                                CenterChannel channel = CenterChannel::Centroid);

// What compare() needs from one run: observables plus |u| per sample.
struct RunRecord {
  GridPtr grid;
  ObservableSeries series;
  std::vector<RealVector> envelopes;
};

RunRecord record_fields(const FieldTrajectory& trajectory);
RunRecord record_states(const OdeTrajectory& trajectory, const AnsatzFamily& family, GridPtr grid);

enum class FocusingClass { Focusing, Defocusing, Neutral };

std::string_view to_string(FocusingClass cls);

// Focusing if max peak > (1 + threshold) peak(0), otherwise Defocusing if the
// terminal peak < (1 - threshold) peak(0), otherwise Neutral.
FocusingClass classify_focusing(const ObservableSeries& series, double threshold = 0.05);

struct CompareOptions {
  double focusing_threshold = 0.05;
  CenterChannel channel = CenterChannel::Centroid;
  // Unset means default_window over the shared time range.
  bool use_window = false;
  FitWindow window;
};

struct ComparisonReport {
  double group_velocity_rom = 0.0;
  double group_velocity_dns = 0.0;
  double relative_velocity_error = 0.0;
  bool velocity_low_confidence = false;
  std::vector<double> envelope_times;
  std::vector<double> envelope_error_L2;  // || |u_rom| - |u_dns| ||_2 / || |u_dns| ||_2
  double max_envelope_error = 0.0;
  double peak_amplitude_error = 0.0;  // |max peak_rom - max peak_dns| / max peak_dns
  double peak_time_error = 0.0;       // |argmax_t peak_rom - argmax_t peak_dns|
  FocusingClass focusing_class_rom = FocusingClass::Neutral;
  FocusingClass focusing_class_dns = FocusingClass::Neutral;

  std::string to_text() const;
  std::string envelope_csv() const;
};

// Pairs samples at equal times (to 1e-9). Throws std::invalid_argument when
// the grids differ or fewer than two times are shared.
ComparisonReport compare(const RunRecord& rom, const RunRecord& dns,
                         const CompareOptions& options = {});

}  // namespace romnls
