#pragma once

#include <string_view>

#include "romnls/ansatz.hpp"
#include "romnls/grid.hpp"

namespace romnls {

enum class PdeKind {
  NlsStationary,  // u_t = -u_x/2 - (i/8) u_xx - (i/2)|u|^2 u
  NlsComoving,    // u_t = -(i/8) u_xx - (i/2)|u|^2 u
  Mnls,           // Dysthe's modified NLS
};

std::string_view to_string(PdeKind kind);
PdeKind pde_kind_from_string(std::string_view name);

struct PdeModel {
  PdeKind kind = PdeKind::NlsComoving;
  // Only read for Mnls: adds -i u dphi/dx|_{z=0}.
  bool include_velocity_potential = false;
};

// F(u) with spectral derivatives.
ComplexField rhs(const PdeModel& model, const ComplexField& field);

// F(u_hat) built from the ansatz's analytic derivatives. The velocity
// potential, when enabled, still needs a transform of |u_hat|^2.
ComplexVector rhs_on_ansatz(const PdeModel& model, const AnsatzJet& jet, const PeriodicGrid& grid);
ComplexField rhs_on_ansatz(const PdeModel& model, const AnsatzFamily& family,
                           const ParameterState& q, GridPtr grid);

// Split F(u) = F^-1[ linear_symbol * F[u] ] + nonlinear_term(u) used by the
// exponential integrator. The symbol is purely imaginary for every kind.
ComplexVector linear_symbol(const PdeModel& model, const PeriodicGrid& grid);
// Returns the physical-space nonlinear term; spatial derivatives inside it are
// spectral.
ComplexVector nonlinear_term(const PdeModel& model, const PeriodicGrid& grid,
                             const ComplexVector& values);

}  // namespace romnls
