#include "romnls/pde.hpp"

#include <stdexcept>
#include <string>

namespace romnls {

namespace {

// Pointwise F given all the derivatives; u_x* is conj(u_x) taken after
// differentiation.
ComplexVector assemble_rhs(const PdeModel& model, const ComplexVector& u, const ComplexVector& ux,
                           const ComplexVector& uxx, const ComplexVector* uxxx,
                           const RealVector* potential_gradient) {
  const Complex I(0.0, 1.0);
  const Eigen::ArrayXd density = u.cwiseAbs2().array();
  ComplexVector out = (-I / 8.0) * uxx;
  out.array() += (-0.5 * I) * density.cast<Complex>() * u.array();
  if (model.kind == PdeKind::NlsComoving) return out;

  out -= 0.5 * ux;
  if (model.kind == PdeKind::NlsStationary) return out;

  out += (1.0 / 16.0) * (*uxxx);
  out.array() += -1.5 * density.cast<Complex>() * ux.array();
  out.array() += 0.25 * u.array().square() * ux.array().conjugate();
  if (model.include_velocity_potential && potential_gradient != nullptr) {
    out.array() += -I * u.array() * potential_gradient->array().cast<Complex>();
  }
  return out;
}

}  // namespace

std::string_view to_string(PdeKind kind) {
  switch (kind) {
    case PdeKind::NlsStationary:
      return "nls_stationary";
    case PdeKind::NlsComoving:
      return "nls_comoving";
    case PdeKind::Mnls:
      return "mnls";
  }
  return "unknown";
}

PdeKind pde_kind_from_string(std::string_view name) {
  for (PdeKind k : {PdeKind::NlsStationary, PdeKind::NlsComoving, PdeKind::Mnls}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown pde kind '" + std::string(name) + "'");
}

ComplexField rhs(const PdeModel& model, const ComplexField& field) {
  const PeriodicGrid& grid = field.grid();
  const ComplexVector& u = field.values();
  const ComplexVector ux = spectral_derivative(grid, u, 1);
  const ComplexVector uxx = spectral_derivative(grid, u, 2);
  ComplexVector uxxx;
  RealVector phi_x;
  if (model.kind == PdeKind::Mnls) {
    uxxx = spectral_derivative(grid, u, 3);
    if (model.include_velocity_potential) phi_x = velocity_potential_gradient(grid, u);
  }
  return ComplexField(field.grid_ptr(), assemble_rhs(model, u, ux, uxx, &uxxx, &phi_x));
}

ComplexVector rhs_on_ansatz(const PdeModel& model, const AnsatzJet& jet,
                            const PeriodicGrid& grid) {
  RealVector phi_x;
  if (model.kind == PdeKind::Mnls && model.include_velocity_potential) {
    phi_x = velocity_potential_gradient(grid, jet.value);
  }
  return assemble_rhs(model, jet.value, jet.dx, jet.dxx, &jet.dxxx, &phi_x);
}

ComplexField rhs_on_ansatz(const PdeModel& model, const AnsatzFamily& family,
                           const ParameterState& q, GridPtr grid) {
  const AnsatzJet jet = family.sample(q.values, *grid);
  return ComplexField(grid, rhs_on_ansatz(model, jet, *grid));
}

ComplexVector linear_symbol(const PdeModel& model, const PeriodicGrid& grid) {
  const Complex I(0.0, 1.0);
  const auto& k = grid.wavenumbers();
  const auto nyquist = static_cast<Eigen::Index>(grid.nyquist_index());
  ComplexVector symbol(k.size());
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    // Odd powers of ik lose the Nyquist mode, matching spectral_derivative.
    const double k_odd = (j == nyquist) ? 0.0 : k[j];
    Complex s = I * (k[j] * k[j] / 8.0);  // -(i/8)(ik)^2
    if (model.kind != PdeKind::NlsComoving) s += -0.5 * I * k_odd;
    if (model.kind == PdeKind::Mnls) s += -I * (k_odd * k_odd * k_odd / 16.0);  // (ik)^3/16
    symbol[j] = s;
  }
  return symbol;
}

ComplexVector nonlinear_term(const PdeModel& model, const PeriodicGrid& grid,
                             const ComplexVector& values) {
  const Complex I(0.0, 1.0);
  const Eigen::ArrayXd density = values.cwiseAbs2().array();
  ComplexVector out = ((-0.5 * I) * density.cast<Complex>() * values.array()).matrix();
  if (model.kind != PdeKind::Mnls) return out;

  const ComplexVector ux = spectral_derivative(grid, values, 1);
  out.array() += -1.5 * density.cast<Complex>() * ux.array();
  out.array() += 0.25 * values.array().square() * ux.array().conjugate();
  if (model.include_velocity_potential) {
    const RealVector phi_x = velocity_potential_gradient(grid, values);
    out.array() += -I * values.array() * phi_x.array().cast<Complex>();
  }
  return out;
}

}  // namespace romnls
