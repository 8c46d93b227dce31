#include "romnls/rons.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "romnls/text.hpp"

namespace romnls {

TangentSystem assemble_from_jet(const PdeModel& model, const AnsatzJet& jet,
                                const ParameterState& state, const PeriodicGrid& grid) {
  const double dx = grid.spacing();
  const ComplexVector forcing_field = rhs_on_ansatz(model, jet, grid);

  TangentSystem sys;
  // M_ij = int dq_i conj(dq_j) dx, i.e. (dq^H dq)^T.
  sys.metric = dx * (jet.dq.adjoint() * jet.dq).transpose();
  sys.forcing = dx * (jet.dq.transpose() * forcing_field.conjugate());
  sys.state = state;
  sys.tail = jet.tail;
  sys.condition_estimate = spd_condition_estimate(sys.metric.real());
  return sys;
}

TangentSystem assemble(const PdeModel& model, const AnsatzFamily& family,
                       const ParameterState& state, const PeriodicGrid& grid) {
  if (state.family != family.id()) {
    throw std::invalid_argument("assemble: state family does not match the ansatz");
  }
  const AnsatzJet jet = family.sample(state.values, grid);
  return assemble_from_jet(model, jet, state, grid);
}

double spd_condition_estimate(const Eigen::MatrixXd& matrix) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  if (ev.size() == 0) return 1.0;
  if (!(ev[0] > 0.0)) return std::numeric_limits<double>::infinity();
  return ev[ev.size() - 1] / ev[0];
}

RealVector solve_metric(const Eigen::MatrixXd& metric, const RealVector& rhs,
                        const SolveOptions& options) {
  Eigen::MatrixXd shifted = metric;
  if (options.tikhonov_shift != 0.0) shifted.diagonal().array() += options.tikhonov_shift;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) {
    const double cond = spd_condition_estimate(shifted);
    throw SingularMetricError("Re[M] is not symmetric positive definite (condition estimate " +
                                  format_real(cond) + ")",
                              cond);
  }
  return llt.solve(rhs);
}

RealVector rons_rhs(const TangentSystem& sys, const SolveOptions& options) {
  return solve_metric(sys.metric.real(), sys.forcing.real(), options);
}

RealVector rons_rate(const PdeModel& model, const AnsatzFamily& family, const RealVector& q,
                     const PeriodicGrid& grid, const SolveOptions& options) {
  const AnsatzJet jet = family.sample(q, grid);
  const ParameterState state{family.id(), q, 0.0};
  return rons_rhs(assemble_from_jet(model, jet, state, grid), options);
}

double gaussian_mass(double A, double L) { return std::sqrt(kPi / 2.0) * A * A * L; }

double gaussian_energy(double A, double L, double U) {
  const double s2 = std::sqrt(2.0);
  return std::sqrt(kPi) * A * A * (s2 * (L * L * U * U + 1.0) - 2.0 * A * A * L * L) / (16.0 * L);
}

ConservedQuantitySet ConservedQuantitySet::nls_gaussian(const AnsatzFamily& family,
                                                        bool include_energy) {
  const FamilyId id = family.id();
  const bool gaussian = id == FamilyId::GaussianComoving || id == FamilyId::GaussianTranslating ||
                        id == FamilyId::GaussianFull;
  if (!gaussian) {
    throw std::invalid_argument("closed-form conserved quantities need a Gaussian family");
  }
  if (include_energy && id == FamilyId::GaussianFull) {
    throw std::invalid_argument("closed-form energy assumes V = 0; use by_quadrature");
  }
  const auto n = static_cast<Eigen::Index>(family.param_count());
  const auto iA = static_cast<Eigen::Index>(family.index_of("A"));
  const auto iL = static_cast<Eigen::Index>(family.index_of("L"));
  const auto iU = static_cast<Eigen::Index>(family.index_of("U"));

  ConservedQuantitySet set;
  set.add({"mass",
           [=](const RealVector& q) { return gaussian_mass(q[iA], q[iL]); },
           [=](const RealVector& q) {
             RealVector g = RealVector::Zero(n);
             const double c = std::sqrt(kPi / 2.0);
             g[iA] = 2.0 * c * q[iA] * q[iL];
             g[iL] = c * q[iA] * q[iA];
             return g;
           }});
  if (include_energy) {
    set.add({"energy",
             [=](const RealVector& q) { return gaussian_energy(q[iA], q[iL], q[iU]); },
             [=](const RealVector& q) {
               const double A = q[iA], L = q[iL], U = q[iU];
               const double s2 = std::sqrt(2.0);
               const double c = std::sqrt(kPi) / 16.0;
               RealVector g = RealVector::Zero(n);
               g[iA] = c * (2.0 * s2 * A * L * U * U + 2.0 * s2 * A / L - 8.0 * A * A * A * L);
               g[iL] = c * (s2 * A * A * U * U - s2 * A * A / (L * L) - 2.0 * A * A * A * A);
               g[iU] = c * 2.0 * s2 * A * A * L * U;
               return g;
             }});
  }
  return set;
}

ConservedQuantitySet ConservedQuantitySet::by_quadrature(const AnsatzFamily& family,
                                                         GridPtr grid, bool include_energy) {
  ConservedQuantitySet set;
  auto mass = [family, grid](const RealVector& q) {
    const AnsatzJet jet = family.sample(q, *grid);
    return quadrature(jet.value.cwiseAbs2(), *grid);
  };
  set.add({"mass", mass, [mass](const RealVector& q) { return finite_difference_gradient(mass, q); }});
  if (include_energy) {
    auto energy = [family, grid](const RealVector& q) {
      const AnsatzJet jet = family.sample(q, *grid);
      const double kinetic = quadrature(jet.dx.cwiseAbs2(), *grid) / 8.0;
      const double potential = quadrature(jet.value.cwiseAbs2().cwiseAbs2(), *grid) / 4.0;
      return kinetic - potential;
    };
    set.add({"energy", energy,
             [energy](const RealVector& q) { return finite_difference_gradient(energy, q); }});
  }
  return set;
}

RealVector finite_difference_gradient(const std::function<double(const RealVector&)>& f,
                                      const RealVector& q, double rel_step) {
  RealVector g(q.size());
  RealVector probe = q;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double h = rel_step * (1.0 + std::abs(q[i]));
    probe[i] = q[i] + h;
    const double up = f(probe);
    probe[i] = q[i] - h;
    const double down = f(probe);
    probe[i] = q[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

ConstrainedSolution constrained_rons_rhs(const TangentSystem& sys,
                                         const ConservedQuantitySet& quantities,
                                         const SolveOptions& options) {
  const Eigen::MatrixXd metric = sys.metric.real();
  const RealVector forcing = sys.forcing.real();
  const auto n = metric.rows();
  const auto m = static_cast<Eigen::Index>(quantities.size());

  Eigen::MatrixXd gradients(n, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    gradients.col(k) = quantities.items()[static_cast<std::size_t>(k)].gradient(sys.state.values);
  }

  Eigen::MatrixXd shifted = metric;
  if (options.tikhonov_shift != 0.0) shifted.diagonal().array() += options.tikhonov_shift;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) {
    const double cond = spd_condition_estimate(shifted);
    throw SingularMetricError("Re[M] is not symmetric positive definite", cond);
  }
  const RealVector unconstrained = llt.solve(forcing);
  const Eigen::MatrixXd minv_grad = llt.solve(gradients);

  ConstrainedSolution out;
  out.constraint_matrix = gradients.transpose() * minv_grad;
  out.constraint_rhs = gradients.transpose() * unconstrained;

  // Grow the Cholesky one quantity at a time so a failure names the first
  // gradient that is dependent on the ones before it.
  const double scale = out.constraint_matrix.diagonal().cwiseAbs().maxCoeff();
  for (Eigen::Index k = 1; k <= m; ++k) {
    const Eigen::MatrixXd lead = out.constraint_matrix.topLeftCorner(k, k);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(lead);
    const double pivot = ldlt.vectorD().minCoeff();
    if (ldlt.info() != Eigen::Success || !(pivot > 1e-12 * scale)) {
      const auto& name = quantities.items()[static_cast<std::size_t>(k - 1)].name;
      throw DependentConstraintsError(
          "constraint matrix is singular: gradient of '" + name + "' depends on earlier ones",
          name);
    }
  }

  out.multipliers = out.constraint_matrix.llt().solve(out.constraint_rhs);
  out.rate = unconstrained - minv_grad * out.multipliers;
  return out;
}

double projection_cost(const AnsatzJet& jet, const ComplexVector& forcing_field,
                       const RealVector& qdot, const PeriodicGrid& grid) {
  const ComplexVector residual = jet.dq * qdot.cast<Complex>() - forcing_field;
  return 0.5 * quadrature(residual.cwiseAbs2(), grid);
}

std::string dump(const TangentSystem& sys) {
  const AnsatzFamily family = AnsatzFamily::for_state(sys.state);
  std::ostringstream out;
  out << serialize(sys.state);
  out << "condition_estimate = " << format_real(sys.condition_estimate) << '\n';
  const auto n = sys.metric.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out << "M[" << family.names()[static_cast<std::size_t>(i)] << ","
          << family.names()[static_cast<std::size_t>(j)]
          << "] = " << format_real(sys.metric(i, j).real()) << " "
          << format_real(sys.metric(i, j).imag()) << '\n';
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    out << "f[" << family.names()[static_cast<std::size_t>(i)]
        << "] = " << format_real(sys.forcing[i].real()) << " "
        << format_real(sys.forcing[i].imag()) << '\n';
  }
  return out.str();
}

}  // namespace romnls
