#include "romnls/master.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "romnls/rons.hpp"
#include "romnls/text.hpp"

namespace romnls {

namespace {
constexpr Complex kI(0.0, 1.0);
}

std::string NlsDensity::name() const {
  return gamma_ == 0.0 ? "nls_comoving" : "nls_stationary";
}

Complex NlsDensity::value(const DensityPoint& p) const {
  const Complex advect = kI * p.ux * std::conj(p.u) - kI * p.u * std::conj(p.ux);
  const double u2 = std::norm(p.u);
  return gamma_ / 4.0 * advect + std::norm(p.ux) / 8.0 - u2 * u2 / 4.0;
}

Complex NlsDensity::d_u(const DensityPoint& p) const {
  return -kI * gamma_ / 4.0 * std::conj(p.ux) - 0.5 * std::norm(p.u) * std::conj(p.u);
}

Complex NlsDensity::d_conj_u(const DensityPoint& p) const {
  return kI * gamma_ / 4.0 * p.ux - 0.5 * std::norm(p.u) * p.u;
}

Complex NlsDensity::d_ux(const DensityPoint& p) const {
  return kI * gamma_ / 4.0 * std::conj(p.u) + std::conj(p.ux) / 8.0;
}

Complex NlsDensity::d_conj_ux(const DensityPoint& p) const {
  return -kI * gamma_ / 4.0 * p.u + p.ux / 8.0;
}

ComplexField induced_rhs(const LagrangianDensity& density, const ComplexField& field) {
  const PeriodicGrid& grid = field.grid();
  const ComplexVector& u = field.values();
  const ComplexVector ux = spectral_derivative(grid, u, 1);
  ComplexVector flux(u.size());
  ComplexVector source(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const DensityPoint p{u[j], ux[j]};
    flux[j] = density.d_conj_ux(p);
    source[j] = density.d_conj_u(p);
  }
  ComplexVector out = -kI * spectral_derivative(grid, flux, 1) + kI * source;
  return ComplexField(field.grid_ptr(), std::move(out));
}

MasterSystem assemble_master(const LagrangianDensity& density, const AnsatzFamily& family,
                             const ParameterState& state, const PeriodicGrid& grid) {
  if (state.family != family.id()) {
    throw std::invalid_argument("assemble_master: state family does not match the ansatz");
  }
  const AnsatzJet jet = family.sample(state.values, grid);
  const auto n = jet.value.size();
  ComplexVector dh_du(n);
  ComplexVector dh_dux(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const DensityPoint p{jet.value[j], jet.dx[j]};
    dh_du[j] = density.d_u(p);
    dh_dux[j] = density.d_ux(p);
  }
  const double dx = grid.spacing();
  MasterSystem sys;
  sys.metric = dx * (jet.dq.adjoint() * jet.dq).transpose();
  sys.xi = (-kI * dx) * (jet.dq.transpose() * dh_du);
  sys.eta = (-kI * dx) * (jet.dq_dx.transpose() * dh_dux);
  sys.state = state;
  return sys;
}

RealVector solve_real_part(const MasterSystem& sys) {
  return solve_metric(sys.metric.real(), (sys.xi + sys.eta).real());
}

RankReport solve_imag_part(const MasterSystem& sys, const std::vector<std::string>& names,
                           double rank_tolerance) {
  const Eigen::MatrixXd skew = sys.metric.imag();
  const RealVector rhs = (sys.xi + sys.eta).imag();
  const auto n = skew.rows();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(skew, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double cutoff = rank_tolerance * (sv.size() > 0 ? sv[0] : 0.0);

  RankReport report;
  report.dimension = static_cast<int>(n);
  report.singular_values = sv;
  report.parameter_names = names;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff && sv[i] > 0.0) ++rank;
  }
  report.rank = rank;

  // Minimum-norm least squares: drop the components along the null space.
  RealVector rate = RealVector::Zero(n);
  const RealVector projected = svd.matrixU().transpose() * rhs;
  for (int i = 0; i < rank; ++i) rate += (projected[i] / sv[i]) * svd.matrixV().col(i);
  report.rate = rate;
  report.residual = (skew * rate - rhs).norm();

  report.null_space = svd.matrixV().rightCols(n - rank);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double weight = report.null_space.cols() > 0 ? report.null_space.row(i).norm() : 0.0;
    if (weight > 1e-6) report.undetermined.push_back(names.at(static_cast<std::size_t>(i)));
  }
  return report;
}

std::string RankReport::to_text() const {
  std::ostringstream out;
  out << "dimension = " << dimension << '\n';
  out << "rank = " << rank << '\n';
  out << "full_rank = " << (full_rank() ? "yes" : "no") << '\n';
  out << "singular_values =";
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    out << (i == 0 ? " " : ", ") << format_real(singular_values[i]);
  }
  out << '\n';
  out << "undetermined =";
  for (std::size_t i = 0; i < undetermined.size(); ++i) {
    out << (i == 0 ? " " : ", ") << undetermined[i];
  }
  out << '\n';
  for (Eigen::Index c = 0; c < null_space.cols(); ++c) {
    for (Eigen::Index i = 0; i < null_space.rows(); ++i) {
      out << "null" << c << "." << parameter_names.at(static_cast<std::size_t>(i)) << " = "
          << format_real(null_space(i, c)) << '\n';
    }
  }
  for (Eigen::Index i = 0; i < rate.size(); ++i) {
    out << "rate." << parameter_names.at(static_cast<std::size_t>(i)) << " = "
        << format_real(rate[i]) << '\n';
  }
  out << "residual = " << format_real(residual) << '\n';
  return out.str();
}

MassConstrainedReport mass_constrained_gaussian_check(double amplitude_scale,
                                                      const RealVector& state,
                                                      const PeriodicGrid& grid) {
  const AnsatzFamily family = AnsatzFamily::gaussian_mass_constrained(amplitude_scale);
  const ParameterState q = family.make_state(state);
  const MasterSystem sys = assemble_master(NlsDensity::comoving(), family, q, grid);

  MassConstrainedReport report;
  report.imaginary = solve_imag_part(sys, family.names());
  const Eigen::MatrixXd re = sys.metric.real();
  report.real_part_spd = Eigen::LLT<Eigen::MatrixXd>(re).info() == Eigen::Success;
  report.real_part_condition = spd_condition_estimate(re);
  const auto phi = static_cast<Eigen::Index>(family.index_of("phi"));
  report.phi_column_norm = sys.metric.imag().col(phi).cwiseAbs().maxCoeff();
  return report;
}

BlockIdentityResiduals poly_exponent_block_residuals(const MasterSystem& sys) {
  if (sys.state.family != FamilyId::PolyExponent) {
    throw std::invalid_argument("block identities apply to PolyExponent states");
  }
  const auto half = sys.metric.rows() / 2;
  const Eigen::MatrixXcd B = sys.metric.topLeftCorner(half, half);
  const Eigen::MatrixXcd C = sys.metric.bottomLeftCorner(half, half);
  const Eigen::MatrixXcd D = sys.metric.bottomRightCorner(half, half);
  BlockIdentityResiduals r;
  r.b_minus_d = (B - D).cwiseAbs().maxCoeff();
  r.b_plus_i_c = (B + kI * C).cwiseAbs().maxCoeff();
  r.xi_stacking = (sys.xi.tail(half) - kI * sys.xi.head(half)).cwiseAbs().maxCoeff();
  r.eta_stacking = (sys.eta.tail(half) - kI * sys.eta.head(half)).cwiseAbs().maxCoeff();
  r.scale = sys.metric.cwiseAbs().maxCoeff();
  return r;
}

}  // namespace romnls
