#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "romnls/ansatz.hpp"
#include "romnls/grid.hpp"
#include "romnls/pde.hpp"

namespace romnls {

// Local arguments of a Lagrangian density h(u, u_x, u*, u_x*). The conjugate
// slots are implied by u and u_x.
struct DensityPoint {
  Complex u;
  Complex ux;
};

// A density h whose partial derivatives satisfy (dh/du)* = dh/du* and
// (dh/du_x)* = dh/du_x*. The induced PDE is
//   u_t = -i d/dx (dh/du_x*) + i dh/du*.
class LagrangianDensity {
 public:
  virtual ~LagrangianDensity() = default;
  virtual std::string name() const = 0;
  virtual Complex value(const DensityPoint& p) const = 0;
  virtual Complex d_u(const DensityPoint& p) const = 0;
  virtual Complex d_conj_u(const DensityPoint& p) const = 0;
  virtual Complex d_ux(const DensityPoint& p) const = 0;
  virtual Complex d_conj_ux(const DensityPoint& p) const = 0;
};

// h = gamma/4 (i u_x u* - i u u_x*) + |u_x|^2/8 - |u|^4/4.
// gamma = 1 gives the stationary-frame NLS, gamma = 0 the co-moving one.
class NlsDensity final : public LagrangianDensity {
 public:
  explicit NlsDensity(double gamma) : gamma_(gamma) {}
  static NlsDensity stationary() { return NlsDensity(1.0); }
  static NlsDensity comoving() { return NlsDensity(0.0); }

  double gamma() const { return gamma_; }
  PdeKind matching_pde() const {
    return gamma_ == 0.0 ? PdeKind::NlsComoving : PdeKind::NlsStationary;
  }

  std::string name() const override;
  Complex value(const DensityPoint& p) const override;
  Complex d_u(const DensityPoint& p) const override;
  Complex d_conj_u(const DensityPoint& p) const override;
  Complex d_ux(const DensityPoint& p) const override;
  Complex d_conj_ux(const DensityPoint& p) const override;

 private:
  double gamma_;
};

// The PDE generated by a density, evaluated on a field with spectral
// derivatives.
ComplexField induced_rhs(const LagrangianDensity& density, const ComplexField& field);

// M q_dot = xi + eta with
//   xi_k  = -i int du/dq_k    dh/du   dx,
//   eta_k = -i int du_x/dq_k  dh/du_x dx.
struct MasterSystem {
  Eigen::MatrixXcd metric;
  ComplexVector xi;
  ComplexVector eta;
  ParameterState state;
};

MasterSystem assemble_master(const LagrangianDensity& density, const AnsatzFamily& family,
                             const ParameterState& state, const PeriodicGrid& grid);

// Re[M] q_dot = Re[xi + eta]: the projection (RONS) model.
RealVector solve_real_part(const MasterSystem& sys);

inline constexpr double kRankTolerance = 1e-10;

// Im[M] q_dot = Im[xi + eta]: the reduced-Lagrangian model. Im[M] is
// skew-symmetric and may be singular; the minimum-norm least-squares rate is
// returned together with the numerical rank and the null space.
struct RankReport {
  RealVector rate;
  int rank = 0;
  int dimension = 0;
  RealVector singular_values;
  Eigen::MatrixXd null_space;  // orthonormal columns
  std::vector<std::string> parameter_names;
  std::vector<std::string> undetermined;  // parameters with weight in the null space
  double residual = 0.0;  // ||Im[M] rate - Im[xi + eta]||

  bool full_rank() const { return rank == dimension; }
  std::string to_text() const;
};

RankReport solve_imag_part(const MasterSystem& sys, const std::vector<std::string>& names,
                           double rank_tolerance = kRankTolerance);

// Rank analysis of the Gaussian with A = A0 sqrt(L0 / L) substituted,
// i.e. the (L, U, phi) family, under the co-moving NLS density.
struct MassConstrainedReport {
  RankReport imaginary;
  double real_part_condition = 0.0;
  bool real_part_spd = false;
  double phi_column_norm = 0.0;  // max |Im[M]_{i,phi}|
};

MassConstrainedReport mass_constrained_gaussian_check(double amplitude_scale,
                                                      const RealVector& state,
                                                      const PeriodicGrid& grid);

// Block structure of M for a PolyExponent state, ordered (alpha..., beta...):
//   M = [[B, C^H], [C, D]] with B = -iC = D, and xi = (xi1, i xi1).
struct BlockIdentityResiduals {
  double b_minus_d = 0.0;          // max |B - D|
  double b_plus_i_c = 0.0;         // max |B + iC|
  double xi_stacking = 0.0;        // max |xi2 - i xi1|
  double eta_stacking = 0.0;       // max |eta2 - i eta1|
  double scale = 0.0;              // max |M|
};

BlockIdentityResiduals poly_exponent_block_residuals(const MasterSystem& sys);

}  // namespace romnls
