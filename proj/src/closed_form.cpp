#include "romnls/closed_form.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "romnls/rons.hpp"

namespace romnls {

std::string_view to_string(ClosedFormSystem system) {
  switch (system) {
    case ClosedFormSystem::NlsComovingGaussian:
      return "nls_comoving_gaussian";
    case ClosedFormSystem::NlsStationaryGaussian:
      return "nls_stationary_gaussian";
    case ClosedFormSystem::MnlsFullGaussian:
      return "mnls_full_gaussian";
  }
  return "unknown";
}

ClosedFormSystem closed_form_from_string(std::string_view name) {
  for (auto s : {ClosedFormSystem::NlsComovingGaussian, ClosedFormSystem::NlsStationaryGaussian,
                 ClosedFormSystem::MnlsFullGaussian}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown closed-form system '" + std::string(name) + "'");
}

FamilyId family_of(ClosedFormSystem system) {
  switch (system) {
    case ClosedFormSystem::NlsComovingGaussian:
      return FamilyId::GaussianComoving;
    case ClosedFormSystem::NlsStationaryGaussian:
      return FamilyId::GaussianTranslating;
    case ClosedFormSystem::MnlsFullGaussian:
      return FamilyId::GaussianFull;
  }
  throw std::invalid_argument("unknown closed-form system");
}

PdeKind pde_of(ClosedFormSystem system) {
  switch (system) {
    case ClosedFormSystem::NlsComovingGaussian:
      return PdeKind::NlsComoving;
    case ClosedFormSystem::NlsStationaryGaussian:
      return PdeKind::NlsStationary;
    case ClosedFormSystem::MnlsFullGaussian:
      return PdeKind::Mnls;
  }
  throw std::invalid_argument("unknown closed-form system");
}

namespace {

void check_size(ClosedFormSystem system, const RealVector& q, Eigen::Index n) {
  if (q.size() != n) {
    throw std::invalid_argument(std::string(to_string(system)) + " expects " + std::to_string(n) +
                                " parameters, got " + std::to_string(q.size()));
  }
}

void check_admissible(double A, double L) {
  if (!(A > 0.0) || !(L > 0.0) || !std::isfinite(A) || !std::isfinite(L)) {
    throw AdmissibilityError("Gaussian state needs A > 0 and L > 0");
  }
}

RealVector comoving(double A, double L, double U) {
  const double s2 = std::sqrt(2.0);
  RealVector r(4);
  r << A * U / (4.0 * L), -U / 2.0, (s2 * A * A * L * L - 2.0) / (4.0 * L * L * L),
      1.0 / (4.0 * L * L) - 5.0 * A * A / (8.0 * s2);
  return r;
}

}  // namespace

RealVector closed_form_rhs(ClosedFormSystem system, const RealVector& q) {
  const double s2 = std::sqrt(2.0);
  switch (system) {
    case ClosedFormSystem::NlsComovingGaussian: {
      check_size(system, q, 4);
      check_admissible(q[0], q[1]);
      return comoving(q[0], q[1], q[2]);
    }
    case ClosedFormSystem::NlsStationaryGaussian: {
      check_size(system, q, 5);
      check_admissible(q[0], q[1]);
      RealVector r(5);
      r << comoving(q[0], q[1], q[2]), 0.5;
      return r;
    }
    case ClosedFormSystem::MnlsFullGaussian: {
      check_size(system, q, 6);
      const double A = q[0], L = q[1], U = q[2], V = q[3];
      check_admissible(A, L);
      const double A2 = A * A, L2 = L * L;
      RealVector r(6);
      r[0] = A * U * (2.0 - 3.0 * V) / (8.0 * L);
      r[1] = U * (3.0 * V - 2.0) / 4.0;
      r[2] = (s2 * A2 * L2 * (7.0 * V + 2.0) + 6.0 * V - 4.0) / (8.0 * L2 * L);
      r[3] = -A2 * U / (2.0 * s2 * L);
      r[4] = (L2 * (-5.0 * s2 * A2 * (5.0 * V + 2.0) + 6.0 * U * U * V + 4.0 * (V - 1.0) * V * V) -
              6.0 * V + 8.0) /
             (32.0 * L2);
      r[5] = (5.0 * s2 * A2 + 3.0 / L2 + 3.0 * U * U + V * (3.0 * V - 4.0) + 8.0) / 16.0;
      return r;
    }
  }
  throw std::invalid_argument("unknown closed-form system");
}

RealVector closed_form_rhs(ClosedFormSystem system, const ParameterState& q) {
  if (q.family != family_of(system)) {
    throw std::invalid_argument(std::string(to_string(system)) + " does not apply to family " +
                                std::string(to_string(q.family)));
  }
  return closed_form_rhs(system, q.values);
}

double oracle_compare(ClosedFormSystem system, PdeKind kind, const AnsatzFamily& family,
                      const ParameterState& q, const PeriodicGrid& grid) {
  if (pde_of(system) != kind || family_of(system) != family.id() || q.family != family.id()) {
    throw std::invalid_argument("oracle_compare: " + std::string(to_string(system)) +
                                " does not match pde '" + std::string(to_string(kind)) +
                                "' and family '" + std::string(to_string(family.id())) + "'");
  }
  const RealVector closed = closed_form_rhs(system, q.values);
  const RealVector numeric = rons_rate(PdeModel{kind, false}, family, q.values, grid);
  return (closed - numeric).cwiseAbs().maxCoeff() / (1.0 + closed.cwiseAbs().maxCoeff());
}

}  // namespace romnls
