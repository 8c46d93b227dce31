#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "romnls/grid.hpp"

namespace romnls {

enum class FamilyId {
  GaussianComoving,         // (A, L, U, phi)
  GaussianTranslating,      // (A, L, U, phi, x_c)
  GaussianFull,             // (A, L, U, V, phi, x_c)
  Sech,                     // (A_r, A_i, L, U, x_c)
  PolyExponent,             // (alpha0..alpha_m, beta0..beta_m)
  GaussianMassConstrained,  // (L, U, phi) with A = c / sqrt(L)
};

std::string_view to_string(FamilyId id);
FamilyId family_from_string(std::string_view name);

class AdmissibilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ParameterState {
  FamilyId family = FamilyId::GaussianComoving;
  RealVector values;
  double time = 0.0;
};

// Everything the projection needs from an ansatz on one grid: the samples,
// analytic spatial derivatives, parameter derivatives (one column per
// parameter) and mixed derivatives d^2 u / dq_i dx.
struct AnsatzJet {
  ComplexVector value;
  ComplexVector dx;
  ComplexVector dxx;
  ComplexVector dxxx;
  Eigen::MatrixXcd dq;
  Eigen::MatrixXcd dq_dx;
  TailReport tail;
};

namespace detail {

// Pointwise log-derivatives of u = exp(Q). y is the (wrapped) distance to the
// packet center for centered families and the raw coordinate otherwise.
struct LogJet {
  Complex value;
  Complex qx, qxx, qxxx;
};

class FamilyModel {
 public:
  virtual ~FamilyModel() = default;
  virtual void validate(const RealVector& q) const = 0;
  // Fills value/qx/qxx/qxxx and, per parameter, dQ/dq_i and dQ_x/dq_i.
  virtual void point(const RealVector& q, double y, LogJet& jet, Complex* dlog,
                     Complex* dlog_x) const = 0;
};

}  // namespace detail

class AnsatzFamily {
 public:
  static AnsatzFamily gaussian_comoving();
  static AnsatzFamily gaussian_translating();
  static AnsatzFamily gaussian_full();
  static AnsatzFamily sech();
  static AnsatzFamily poly_exponent(int degree);
  // Gaussian with the mass relation A = amplitude_scale / sqrt(L) eliminated.
  static AnsatzFamily gaussian_mass_constrained(double amplitude_scale);

  // Descriptor for a state; PolyExponent degree is inferred from the length.
  static AnsatzFamily for_state(const ParameterState& state);

  FamilyId id() const { return id_; }
  std::size_t param_count() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t index_of(std::string_view name) const;
  std::optional<std::size_t> center_index() const { return center_index_; }
  int degree() const { return degree_; }

  void validate(const RealVector& q) const;
  bool admissible(const RealVector& q) const;
  ParameterState make_state(RealVector values, double time = 0.0) const;

  AnsatzJet sample(const RealVector& q, const PeriodicGrid& grid) const;

 private:
  AnsatzFamily(FamilyId id, std::vector<std::string> names,
               std::shared_ptr<const detail::FamilyModel> model,
               std::optional<std::size_t> center_index, int degree = 0);

  FamilyId id_;
  std::vector<std::string> names_;
  std::shared_ptr<const detail::FamilyModel> model_;
  std::optional<std::size_t> center_index_;
  int degree_ = 0;
};

struct EvaluatedField {
  ComplexField field;
  TailReport tail;
};

// Samples of u(x_j, q). Families with a center x_c are sampled as their
// periodic image, so a packet that crosses the box edge wraps around exactly
// as the DNS field does.
EvaluatedField evaluate(const AnsatzFamily& family, const ParameterState& q, GridPtr grid);
std::vector<ComplexField> param_derivatives(const AnsatzFamily& family, const ParameterState& q,
                                            GridPtr grid);
ComplexField spatial_derivative_analytic(const AnsatzFamily& family, const ParameterState& q,
                                         GridPtr grid);

// Steady sech soliton of the co-moving NLS: |A| = 1 / (sqrt(2) L0).
ParameterState soliton_initial_state(double L0);

// (A, L, U, phi) -> (ln A, 0, -1/L^2, phi, 0, U/L) as a degree-2 PolyExponent.
ParameterState gaussian_to_poly_exponent(const ParameterState& gaussian);

// Plain-text record: "family = <id>", "time = <t>", then "<name> = <value>"
// per parameter, 17 significant digits.
std::string serialize(const ParameterState& state);
ParameterState parse_parameter_state(std::string_view text);

}  // namespace romnls
