#pragma once

#include <string_view>

#include "romnls/ansatz.hpp"
#include "romnls/grid.hpp"
#include "romnls/pde.hpp"

namespace romnls {

// Parameter ODEs of the Gaussian packet written out by hand.
enum class ClosedFormSystem {
  NlsComovingGaussian,    // (A, L, U, phi)
  NlsStationaryGaussian,  // (A, L, U, phi, x_c)
  MnlsFullGaussian,       // (A, L, U, V, phi, x_c)
};

std::string_view to_string(ClosedFormSystem system);
ClosedFormSystem closed_form_from_string(std::string_view name);

FamilyId family_of(ClosedFormSystem system);
PdeKind pde_of(ClosedFormSystem system);

// Throws AdmissibilityError unless A > 0 and L > 0.
RealVector closed_form_rhs(ClosedFormSystem system, const RealVector& q);
RealVector closed_form_rhs(ClosedFormSystem system, const ParameterState& q);

// ||closed - rons||_inf / (1 + ||closed||_inf). The velocity potential is off.
// Throws std::invalid_argument unless system, kind and family belong together.
double oracle_compare(ClosedFormSystem system, PdeKind kind, const AnsatzFamily& family,
                      const ParameterState& q, const PeriodicGrid& grid);

}  // namespace romnls
