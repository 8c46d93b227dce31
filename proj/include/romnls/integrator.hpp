#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "romnls/ansatz.hpp"
#include "romnls/grid.hpp"
#include "romnls/pde.hpp"

namespace romnls {

enum class OdeMethod { Rk4Fixed, Rk45Adaptive };

std::string_view to_string(OdeMethod method);
OdeMethod ode_method_from_string(std::string_view name);

struct OdeSolverConfig {
  OdeMethod method = OdeMethod::Rk45Adaptive;
  double dt = 0.01;  // fixed step for Rk4Fixed, first trial step for Rk45Adaptive
  double rtol = 1e-10;
  double atol = 1e-10;
  double dt_max = 1.0;
  double dt_min = 1e-12;
  double t_final = 100.0;
  double output_interval = 1.0;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct EtdSolverConfig {
  double dt = 0.025;
  double t_final = 100.0;
  int contour_points = 32;
  bool dealias = false;
  double output_interval = 1.0;  // rounded to a whole number of steps
  double blowup_threshold = 1e8;  // max|u| beyond this counts as blow-up

  void validate() const;
  long steps_per_output() const;
};

enum class IntegrationEvent {
  Completed,
  Inadmissible,    // the state left the family's admissible region
  StepUnderflow,   // adaptive step fell below dt_min
  BlowUp,          // non-finite or huge DNS field
};

std::string_view to_string(IntegrationEvent event);

struct OdeTrajectory {
  FamilyId family = FamilyId::GaussianComoving;
  std::vector<double> times;
  std::vector<RealVector> states;
  IntegrationEvent event = IntegrationEvent::Completed;
  std::string message;
  double event_time = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;

  bool completed() const { return event == IntegrationEvent::Completed; }
  ParameterState state(std::size_t i) const { return {family, states.at(i), times.at(i)}; }
};

using OdeRhs = std::function<RealVector(double, const RealVector&)>;
using AdmissibleRegion = std::function<bool(const RealVector&)>;

// Integrates q' = rhs(t, q) from q0.time to cfg.t_final and stores the state at
// every multiple of cfg.output_interval plus t_final; steps are shortened to
// land on those times exactly. A rhs that throws AdmissibilityError or
// std::domain_error makes the adaptive method retry with a smaller step.
OdeTrajectory integrate_ode(const OdeRhs& rhs, const ParameterState& q0, const OdeSolverConfig& cfg,
                            const AdmissibleRegion& admissible = {});

// Coefficients of the fourth-order exponential Runge-Kutta scheme for a
// diagonal linear operator with symbol c (one entry per mode).
struct EtdCoefficients {
  ComplexVector E, E2, Q, f1, f2, f3;
};

EtdCoefficients etd_coefficients(const ComplexVector& symbol, double dt, int contour_points);

struct FieldTrajectory {
  GridPtr grid;
  std::vector<double> times;
  std::vector<ComplexVector> snapshots;
  IntegrationEvent event = IntegrationEvent::Completed;
  std::string message;
  double last_valid_time = 0.0;

  bool completed() const { return event == IntegrationEvent::Completed; }
  ComplexField field(std::size_t i) const { return ComplexField(grid, snapshots.at(i)); }
};

// Called at every output time with the physical-space field.
using FieldObserver = std::function<void(double, const ComplexVector&)>;

class EtdStepper {
 public:
  EtdStepper(const PdeModel& model, GridPtr grid, double dt, int contour_points, bool dealias);

  // One step on Fourier coefficients.
  void step(ComplexVector& coefficients) const;
  const EtdCoefficients& coefficients() const { return coeffs_; }

 private:
  ComplexVector nonlinear_hat(const ComplexVector& coefficients) const;

  PdeModel model_;
  GridPtr grid_;
  EtdCoefficients coeffs_;
  Eigen::ArrayXd mask_;
  bool dealias_;
};

// When store_snapshots is false only times are kept and the observer carries
// the data.
FieldTrajectory integrate_etd(const PdeModel& model, const ComplexField& u0,
                              const EtdSolverConfig& cfg, const FieldObserver& observer = {},
                              bool store_snapshots = true);

}  // namespace romnls
