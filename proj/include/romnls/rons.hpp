#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "romnls/ansatz.hpp"
#include "romnls/grid.hpp"
#include "romnls/pde.hpp"

namespace romnls {

// Re[M] is not symmetric positive definite at this state.
class SingularMetricError : public std::runtime_error {
 public:
  SingularMetricError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

// The constraint gradients are linearly dependent (C is singular).
class DependentConstraintsError : public std::runtime_error {
 public:
  DependentConstraintsError(const std::string& what, std::string quantity)
      : std::runtime_error(what), quantity_(std::move(quantity)) {}
  const std::string& quantity() const { return quantity_; }

 private:
  std::string quantity_;
};

inline constexpr double kIllConditionedThreshold = 1e10;

// Metric tensor M_ij = <du/dq_i, du/dq_j> and forcing f_i = <du/dq_i, F(u)>
// at one parameter state, with <a, b> = int a conj(b) dx.
struct TangentSystem {
  Eigen::MatrixXcd metric;
  ComplexVector forcing;
  ParameterState state;
  double condition_estimate = 0.0;  // of Re[M]
  TailReport tail;

  bool ill_conditioned() const { return condition_estimate > kIllConditionedThreshold; }
};

struct SolveOptions {
  // Added to the diagonal of Re[M]. Zero keeps the solve exact.
  double tikhonov_shift = 0.0;
};

TangentSystem assemble(const PdeModel& model, const AnsatzFamily& family,
                       const ParameterState& state, const PeriodicGrid& grid);
TangentSystem assemble_from_jet(const PdeModel& model, const AnsatzJet& jet,
                                const ParameterState& state, const PeriodicGrid& grid);

// Ratio of extreme eigenvalues of a symmetric matrix; +inf if not positive.
double spd_condition_estimate(const Eigen::MatrixXd& matrix);

// Cholesky solve of Re[M] x = rhs; throws SingularMetricError on failure.
RealVector solve_metric(const Eigen::MatrixXd& metric, const RealVector& rhs,
                        const SolveOptions& options = {});

// q_dot = Re[M]^-1 Re[f].
RealVector rons_rhs(const TangentSystem& sys, const SolveOptions& options = {});

// Convenience: assemble + solve.
RealVector rons_rate(const PdeModel& model, const AnsatzFamily& family, const RealVector& q,
                     const PeriodicGrid& grid, const SolveOptions& options = {});

struct ConservedQuantity {
  std::string name;
  std::function<double(const RealVector&)> value;
  std::function<RealVector(const RealVector&)> gradient;
};

class ConservedQuantitySet {
 public:
  void add(ConservedQuantity quantity) { items_.push_back(std::move(quantity)); }
  const std::vector<ConservedQuantity>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  // Closed-form NLS mass and energy of the Gaussian packet. Energy requires
  // V = 0, so it is offered for GaussianComoving/GaussianTranslating only.
  static ConservedQuantitySet nls_gaussian(const AnsatzFamily& family, bool include_energy = true);
  // Mass and (optionally) energy by quadrature on the grid, gradients by
  // central differences. Works for every family.
  static ConservedQuantitySet by_quadrature(const AnsatzFamily& family, GridPtr grid,
                                            bool include_energy = true);

 private:
  std::vector<ConservedQuantity> items_;
};

// Central differences with step rel_step * (1 + |q_i|).
RealVector finite_difference_gradient(const std::function<double(const RealVector&)>& f,
                                      const RealVector& q, double rel_step = 1e-6);

double gaussian_mass(double A, double L);
double gaussian_energy(double A, double L, double U);

struct ConstrainedSolution {
  RealVector rate;
  RealVector multipliers;
  Eigen::MatrixXd constraint_matrix;
  RealVector constraint_rhs;
};

// Minimizes the residual subject to dI_k/dt = 0 via Lagrange multipliers:
// C lambda = b, q_dot = Re[M]^-1 (Re[f] - sum lambda_k grad I_k).
ConstrainedSolution constrained_rons_rhs(const TangentSystem& sys,
                                         const ConservedQuantitySet& quantities,
                                         const SolveOptions& options = {});

// 1/2 || sum_i qdot_i du/dq_i - F(u) ||^2.
double projection_cost(const AnsatzJet& jet, const ComplexVector& forcing_field,
                       const RealVector& qdot, const PeriodicGrid& grid);

// Full-precision text dump of M and f.
std::string dump(const TangentSystem& sys);

}  // namespace romnls
