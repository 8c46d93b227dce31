#include "romnls/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace romnls {

std::string_view to_string(OdeMethod method) {
  return method == OdeMethod::Rk4Fixed ? "rk4" : "rk45";
}

OdeMethod ode_method_from_string(std::string_view name) {
  if (name == "rk4") return OdeMethod::Rk4Fixed;
  if (name == "rk45") return OdeMethod::Rk45Adaptive;
  throw std::invalid_argument("unknown ode method '" + std::string(name) + "' (rk4, rk45)");
}

std::string_view to_string(IntegrationEvent event) {
  switch (event) {
    case IntegrationEvent::Completed:
      return "completed";
    case IntegrationEvent::Inadmissible:
      return "inadmissible";
    case IntegrationEvent::StepUnderflow:
      return "step_underflow";
    case IntegrationEvent::BlowUp:
      return "blow_up";
  }
  return "unknown";
}

namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(field) + " must be positive and finite");
  }
}

}  // namespace

void OdeSolverConfig::validate() const {
  require_positive(dt, "dt");
  require_positive(rtol, "rtol");
  require_positive(atol, "atol");
  require_positive(dt_max, "dt_max");
  require_positive(dt_min, "dt_min");
  require_positive(t_final, "t_final");
  require_positive(output_interval, "output_interval");
}

void EtdSolverConfig::validate() const {
  require_positive(dt, "dt");
  require_positive(t_final, "t_final");
  require_positive(output_interval, "output_interval");
  require_positive(blowup_threshold, "blowup_threshold");
  if (contour_points < 16 || contour_points % 2 != 0) {
    throw std::invalid_argument("contour_points must be even and at least 16");
  }
  if (output_interval < dt * (1.0 - 1e-12)) {
    throw std::invalid_argument("output_interval must be at least dt");
  }
}

long EtdSolverConfig::steps_per_output() const {
  return std::max(1L, std::lround(output_interval / dt));
}

// ---------------------------------------------------------------------------
// ODE

namespace {

// Dormand-Prince 5(4).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Rk45Step {
  RealVector y;
  RealVector k7;
  double error = 0.0;
};

Rk45Step dopri_step(const OdeRhs& f, double t, const RealVector& y, const RealVector& k1, double h,
                    const OdeSolverConfig& cfg) {
  const RealVector k2 = f(t + c2 * h, y + h * a21 * k1);
  const RealVector k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const RealVector k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const RealVector k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const RealVector k6 =
      f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  Rk45Step out;
  out.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  out.k7 = f(t + h, out.y);
  const RealVector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * out.k7);
  const RealVector scale =
      (cfg.atol + cfg.rtol * y.cwiseAbs().cwiseMax(out.y.cwiseAbs()).array()).matrix();
  out.error = std::sqrt((err.array() / scale.array()).square().mean());
  if (!std::isfinite(out.error)) out.error = std::numeric_limits<double>::infinity();
  return out;
}

RealVector rk4_step(const OdeRhs& f, double t, const RealVector& y, double h) {
  const RealVector k1 = f(t, y);
  const RealVector k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
  const RealVector k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
  const RealVector k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool usable(const RealVector& y, const AdmissibleRegion& admissible) {
  return y.allFinite() && (!admissible || admissible(y));
}

}  // namespace

OdeTrajectory integrate_ode(const OdeRhs& rhs, const ParameterState& q0, const OdeSolverConfig& cfg,
                            const AdmissibleRegion& admissible) {
  cfg.validate();
  const double t0 = q0.time;
  if (!(cfg.t_final > t0)) throw std::invalid_argument("t_final must exceed the initial time");

  OdeTrajectory traj;
  traj.family = q0.family;
  traj.times.push_back(t0);
  traj.states.push_back(q0.values);
  if (!usable(q0.values, admissible)) {
    traj.event = IntegrationEvent::Inadmissible;
    traj.event_time = t0;
    traj.message = "initial state is not admissible";
    return traj;
  }

  const auto output_count =
      static_cast<long>(std::ceil((cfg.t_final - t0) / cfg.output_interval - 1e-9));
  auto output_time = [&](long k) {
    return k >= output_count ? cfg.t_final : t0 + static_cast<double>(k) * cfg.output_interval;
  };

  double t = t0;
  RealVector y = q0.values;

  auto stop = [&](IntegrationEvent event, std::string message) {
    traj.event = event;
    traj.event_time = t;
    traj.message = std::move(message);
    return traj;
  };

  if (cfg.method == OdeMethod::Rk4Fixed) {
    for (long k = 1; k <= output_count; ++k) {
      const double target = output_time(k);
      const auto substeps = std::max(1L, static_cast<long>(std::ceil((target - t) / cfg.dt - 1e-9)));
      const double h = (target - t) / static_cast<double>(substeps);
      for (long s = 0; s < substeps; ++s) {
        RealVector next;
        try {
          next = rk4_step(rhs, t, y, h);
        } catch (const std::domain_error& e) {
          return stop(IntegrationEvent::Inadmissible, e.what());
        }
        if (!usable(next, admissible)) {
          return stop(IntegrationEvent::Inadmissible, "state left the admissible region");
        }
        y = std::move(next);
        t = (s + 1 == substeps) ? target : t + h;
        ++traj.accepted_steps;
      }
      traj.times.push_back(t);
      traj.states.push_back(y);
    }
    return traj;
  }

  RealVector k1;
  try {
    k1 = rhs(t, y);
  } catch (const std::domain_error& e) {
    return stop(IntegrationEvent::Inadmissible, e.what());
  }
  double h = std::min(cfg.dt, cfg.dt_max);
  for (long k = 1; k <= output_count; ++k) {
    const double target = output_time(k);
    while (t < target) {
      const bool last = h >= target - t;
      const double step = last ? target - t : h;
      Rk45Step trial;
      bool failed = false;
      try {
        trial = dopri_step(rhs, t, y, k1, step, cfg);
        failed = !usable(trial.y, admissible);
      } catch (const std::domain_error&) {
        failed = true;
      }
      if (!failed && trial.error <= 1.0) {
        t = last ? target : t + step;
        y = std::move(trial.y);
        k1 = std::move(trial.k7);
        ++traj.accepted_steps;
        const double grow =
            trial.error == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(trial.error, -0.2), 0.2, 5.0);
        // A step cut short to hit an output time says nothing about the
        // step size the tolerance allows.
        if (!last || step >= h) h = std::min(cfg.dt_max, step * grow);
        continue;
      }
      ++traj.rejected_steps;
      const double shrink =
          failed ? 0.25 : std::clamp(0.9 * std::pow(trial.error, -0.2), 0.1, 0.9);
      h = step * shrink;
      if (h < cfg.dt_min) {
        return stop(failed ? IntegrationEvent::Inadmissible : IntegrationEvent::StepUnderflow,
                    failed ? "state left the admissible region"
                           : "step size fell below dt_min");
      }
    }
    traj.times.push_back(t);
    traj.states.push_back(y);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// ETD

EtdCoefficients etd_coefficients(const ComplexVector& symbol, double dt, int contour_points) {
  if (contour_points < 16 || contour_points % 2 != 0) {
    throw std::invalid_argument("contour_points must be even and at least 16");
  }
  const auto n = symbol.size();
  // The symbol is imaginary, so the contour has to be the whole circle.
  ComplexVector roots(contour_points);
  for (int j = 0; j < contour_points; ++j) {
    roots[j] = std::exp(Complex(0.0, 2.0 * kPi * (j + 0.5) / contour_points));
  }
  EtdCoefficients c;
  c.E.resize(n);
  c.E2.resize(n);
  c.Q.resize(n);
  c.f1.resize(n);
  c.f2.resize(n);
  c.f3.resize(n);
  const double m = static_cast<double>(contour_points);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex hl = dt * symbol[i];
    c.E[i] = std::exp(hl);
    c.E2[i] = std::exp(hl / 2.0);
    Complex q(0.0), a(0.0), b(0.0), d(0.0);
    for (int j = 0; j < contour_points; ++j) {
      const Complex z = hl + roots[j];
      const Complex ez = std::exp(z);
      const Complex z3 = z * z * z;
      q += (std::exp(z / 2.0) - 1.0) / z;
      a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      b += (2.0 + z + ez * (z - 2.0)) / z3;
      d += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    c.Q[i] = dt * q / m;
    c.f1[i] = dt * a / m;
    c.f2[i] = dt * b / m;
    c.f3[i] = dt * d / m;
  }
  return c;
}

EtdStepper::EtdStepper(const PdeModel& model, GridPtr grid, double dt, int contour_points,
                       bool dealias)
    : model_(model),
      grid_(std::move(grid)),
      coeffs_(etd_coefficients(linear_symbol(model, *grid_), dt, contour_points)),
      dealias_(dealias) {
  const auto n = static_cast<Eigen::Index>(grid_->size());
  mask_ = Eigen::ArrayXd::Ones(n);
  if (dealias_) {
    // 2/3 rule: keep |m| <= N/3.
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index m = j < n / 2 ? j : j - n;
      if (3 * std::abs(m) > n) mask_[j] = 0.0;
    }
  }
}

ComplexVector EtdStepper::nonlinear_hat(const ComplexVector& coefficients) const {
  const ComplexVector u = grid_->inverse(coefficients);
  ComplexVector out = grid_->forward(nonlinear_term(model_, *grid_, u));
  if (dealias_) out.array() *= mask_.cast<Complex>();
  return out;
}

void EtdStepper::step(ComplexVector& v) const {
  const auto& c = coeffs_;
  const ComplexVector nv = nonlinear_hat(v);
  const ComplexVector a = (c.E2.array() * v.array() + c.Q.array() * nv.array()).matrix();
  const ComplexVector na = nonlinear_hat(a);
  const ComplexVector b = (c.E2.array() * v.array() + c.Q.array() * na.array()).matrix();
  const ComplexVector nb = nonlinear_hat(b);
  const ComplexVector cc =
      (c.E2.array() * a.array() + c.Q.array() * (2.0 * nb.array() - nv.array())).matrix();
  const ComplexVector nc = nonlinear_hat(cc);
  v = (c.E.array() * v.array() + c.f1.array() * nv.array() +
       2.0 * c.f2.array() * (na.array() + nb.array()) + c.f3.array() * nc.array())
          .matrix();
}

FieldTrajectory integrate_etd(const PdeModel& model, const ComplexField& u0,
                              const EtdSolverConfig& cfg, const FieldObserver& observer,
                              bool store_snapshots) {
  cfg.validate();
  const GridPtr grid = u0.grid_ptr();
  const EtdStepper stepper(model, grid, cfg.dt, cfg.contour_points, cfg.dealias);

  FieldTrajectory traj;
  traj.grid = grid;
  auto record = [&](double t, const ComplexVector& u) {
    traj.times.push_back(t);
    if (store_snapshots) traj.snapshots.push_back(u);
    if (observer) observer(t, u);
    traj.last_valid_time = t;
  };
  record(0.0, u0.values());

  const long total = std::lround(cfg.t_final / cfg.dt);
  const long stride = cfg.steps_per_output();
  ComplexVector v = grid->forward(u0.values());
  for (long s = 1; s <= total; ++s) {
    stepper.step(v);
    const double t = static_cast<double>(s) * cfg.dt;
    if (!v.allFinite()) {
      traj.event = IntegrationEvent::BlowUp;
      traj.message = "non-finite field at t = " + std::to_string(t);
      return traj;
    }
    if (s % stride == 0 || s == total) {
      const ComplexVector u = grid->inverse(v);
      if (!(u.cwiseAbs().maxCoeff() <= cfg.blowup_threshold)) {
        traj.event = IntegrationEvent::BlowUp;
        traj.message = "max|u| exceeded the blow-up threshold at t = " + std::to_string(t);
        return traj;
      }
      record(t, u);
    }
  }
  return traj;
}

}  // namespace romnls
