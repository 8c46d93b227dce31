#include "romnls/ansatz.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "romnls/text.hpp"

namespace romnls {

namespace {

using detail::FamilyModel;
using detail::LogJet;

void require_finite(const RealVector& q, std::string_view family) {
  if (!q.allFinite()) {
    throw AdmissibilityError(std::string(family) + ": parameters must be finite");
  }
}

void require_size(const RealVector& q, std::size_t n, std::string_view family) {
  if (static_cast<std::size_t>(q.size()) != n) {
    throw std::invalid_argument(std::string(family) + ": expected " + std::to_string(n) +
                                " parameters, got " + std::to_string(q.size()));
  }
}

// Gaussian packet A exp[-y^2/L^2 + i y^2 U/L + i y V + i phi], y = x - x_c.
// Absent parameters (V, x_c) are held at zero.
class GaussianModel final : public FamilyModel {
 public:
  struct Layout {
    int A = -1, L = -1, U = -1, V = -1, phi = -1, xc = -1;
    std::size_t count = 0;
  };

  GaussianModel(Layout layout, std::string name, double mass_scale = 0.0)
      : layout_(layout), name_(std::move(name)), mass_scale_(mass_scale) {}

  void validate(const RealVector& q) const override {
    require_size(q, layout_.count, name_);
    require_finite(q, name_);
    if (!(q[layout_.L] > 0.0)) throw AdmissibilityError(name_ + ": L must be > 0");
    if (layout_.A >= 0 && !(q[layout_.A] > 0.0)) {
      throw AdmissibilityError(name_ + ": A must be > 0");
    }
    if (layout_.A < 0 && !(mass_scale_ > 0.0)) {
      throw AdmissibilityError(name_ + ": amplitude scale must be > 0");
    }
  }

  void point(const RealVector& q, double y, LogJet& jet, Complex* dlog,
             Complex* dlog_x) const override {
    const double L = q[layout_.L];
    const double U = q[layout_.U];
    const double V = layout_.V >= 0 ? q[layout_.V] : 0.0;
    const double phi = q[layout_.phi];
    const double A = layout_.A >= 0 ? q[layout_.A] : mass_scale_ / std::sqrt(L);
    const double L2 = L * L;
    const double L3 = L2 * L;
    const double y2 = y * y;
    const Complex I(0.0, 1.0);

    const Complex exponent(-y2 / L2, y2 * U / L + y * V + phi);
    jet.value = A * std::exp(exponent);
    jet.qx = Complex(-2.0 * y / L2, 2.0 * y * U / L + V);
    jet.qxx = Complex(-2.0 / L2, 2.0 * U / L);
    jet.qxxx = 0.0;

    if (layout_.A >= 0) {
      dlog[layout_.A] = 1.0 / A;
      dlog_x[layout_.A] = 0.0;
    }
    dlog[layout_.L] = Complex(2.0 * y2 / L3, -y2 * U / L2);
    if (layout_.A < 0) dlog[layout_.L] += -0.5 / L;
    dlog_x[layout_.L] = Complex(4.0 * y / L3, -2.0 * y * U / L2);
    dlog[layout_.U] = I * (y2 / L);
    dlog_x[layout_.U] = I * (2.0 * y / L);
    if (layout_.V >= 0) {
      dlog[layout_.V] = I * y;
      dlog_x[layout_.V] = I;
    }
    dlog[layout_.phi] = I;
    dlog_x[layout_.phi] = 0.0;
    if (layout_.xc >= 0) {
      dlog[layout_.xc] = -jet.qx;
      dlog_x[layout_.xc] = -jet.qxx;
    }
  }

 private:
  Layout layout_;
  std::string name_;
  double mass_scale_;
};

// A sech((x - x_c)/L) exp[i (x - x_c)^2 U] with complex A = A_r + i A_i.
// The chirp carries no 1/L, unlike the Gaussian families.
class SechModel final : public FamilyModel {
 public:
  void validate(const RealVector& q) const override {
    require_size(q, 5, "Sech");
    require_finite(q, "Sech");
    if (q[0] == 0.0 && q[1] == 0.0) throw AdmissibilityError("Sech: A must be nonzero");
    if (!(q[2] > 0.0)) throw AdmissibilityError("Sech: L must be > 0");
  }

  void point(const RealVector& q, double y, LogJet& jet, Complex* dlog,
             Complex* dlog_x) const override {
    const Complex A(q[0], q[1]);
    const double L = q[2];
    const double U = q[3];
    const double s = y / L;
    const double th = std::tanh(s);
    const double sech = 1.0 / std::cosh(s);
    const double sech2 = sech * sech;
    const Complex I(0.0, 1.0);

    jet.value = A * sech * std::exp(I * (y * y * U));
    jet.qx = Complex(-th / L, 2.0 * U * y);
    jet.qxx = Complex(-sech2 / (L * L), 2.0 * U);
    jet.qxxx = 2.0 * sech2 * th / (L * L * L);

    dlog[0] = 1.0 / A;
    dlog[1] = I / A;
    dlog[2] = s * th / L;
    dlog[3] = I * (y * y);
    dlog[4] = -jet.qx;
    dlog_x[0] = 0.0;
    dlog_x[1] = 0.0;
    dlog_x[2] = (s * sech2 + th) / (L * L);
    dlog_x[3] = I * (2.0 * y);
    dlog_x[4] = -jet.qxx;
  }
};

// exp(sum_j z_j x^j), z_j = alpha_j + i beta_j.
class PolyExponentModel final : public FamilyModel {
 public:
  explicit PolyExponentModel(int degree) : degree_(degree) {}

  void validate(const RealVector& q) const override {
    require_size(q, 2 * static_cast<std::size_t>(degree_ + 1), "PolyExponent");
    require_finite(q, "PolyExponent");
    int leading = 0;
    for (int j = degree_; j >= 1; --j) {
      if (q[j] != 0.0) {
        leading = j;
        break;
      }
    }
    if (leading == 0 || leading % 2 != 0 || !(q[leading] < 0.0)) {
      throw AdmissibilityError(
          "PolyExponent: leading real coefficient must have even degree and be negative");
    }
  }

  void point(const RealVector& q, double x, LogJet& jet, Complex* dlog,
             Complex* dlog_x) const override {
    const int m = degree_;
    Complex z[5];
    for (int j = 0; j <= m; ++j) z[j] = Complex(q[j], q[m + 1 + j]);
    double pw[6];
    pw[0] = 1.0;
    for (int j = 1; j <= 5; ++j) pw[j] = pw[j - 1] * x;

    Complex poly = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
    for (int j = 0; j <= m; ++j) {
      poly += z[j] * pw[j];
      if (j >= 1) d1 += static_cast<double>(j) * z[j] * pw[j - 1];
      if (j >= 2) d2 += static_cast<double>(j * (j - 1)) * z[j] * pw[j - 2];
      if (j >= 3) d3 += static_cast<double>(j * (j - 1) * (j - 2)) * z[j] * pw[j - 3];
    }
    jet.value = std::exp(poly);
    jet.qx = d1;
    jet.qxx = d2;
    jet.qxxx = d3;

    const Complex I(0.0, 1.0);
    for (int k = 0; k <= m; ++k) {
      const double dk = k >= 1 ? static_cast<double>(k) * pw[k - 1] : 0.0;
      dlog[k] = pw[k];
      dlog[m + 1 + k] = I * pw[k];
      dlog_x[k] = dk;
      dlog_x[m + 1 + k] = I * dk;
    }
  }

 private:
  int degree_;
};

const std::map<FamilyId, std::string_view>& family_names() {
  static const std::map<FamilyId, std::string_view> names{
      {FamilyId::GaussianComoving, "gaussian_comoving"},
      {FamilyId::GaussianTranslating, "gaussian_translating"},
      {FamilyId::GaussianFull, "gaussian_full"},
      {FamilyId::Sech, "sech"},
      {FamilyId::PolyExponent, "poly_exponent"},
      {FamilyId::GaussianMassConstrained, "gaussian_mass_constrained"},
  };
  return names;
}

}  // namespace

std::string_view to_string(FamilyId id) { return family_names().at(id); }

FamilyId family_from_string(std::string_view name) {
  for (const auto& [id, text] : family_names()) {
    if (text == name) return id;
  }
  throw std::invalid_argument("unknown ansatz family '" + std::string(name) + "'");
}

AnsatzFamily::AnsatzFamily(FamilyId id, std::vector<std::string> names,
                           std::shared_ptr<const detail::FamilyModel> model,
                           std::optional<std::size_t> center_index, int degree)
    : id_(id),
      names_(std::move(names)),
      model_(std::move(model)),
      center_index_(center_index),
      degree_(degree) {}

AnsatzFamily AnsatzFamily::gaussian_comoving() {
  GaussianModel::Layout l{.A = 0, .L = 1, .U = 2, .V = -1, .phi = 3, .xc = -1, .count = 4};
  return AnsatzFamily(FamilyId::GaussianComoving, {"A", "L", "U", "phi"},
                      std::make_shared<GaussianModel>(l, "GaussianComoving"), std::nullopt);
}

AnsatzFamily AnsatzFamily::gaussian_translating() {
  GaussianModel::Layout l{.A = 0, .L = 1, .U = 2, .V = -1, .phi = 3, .xc = 4, .count = 5};
  return AnsatzFamily(FamilyId::GaussianTranslating, {"A", "L", "U", "phi", "x_c"},
                      std::make_shared<GaussianModel>(l, "GaussianTranslating"), 4);
}

AnsatzFamily AnsatzFamily::gaussian_full() {
  GaussianModel::Layout l{.A = 0, .L = 1, .U = 2, .V = 3, .phi = 4, .xc = 5, .count = 6};
  return AnsatzFamily(FamilyId::GaussianFull, {"A", "L", "U", "V", "phi", "x_c"},
                      std::make_shared<GaussianModel>(l, "GaussianFull"), 5);
}

AnsatzFamily AnsatzFamily::sech() {
  return AnsatzFamily(FamilyId::Sech, {"A_r", "A_i", "L", "U", "x_c"},
                      std::make_shared<SechModel>(), 4);
}

AnsatzFamily AnsatzFamily::poly_exponent(int degree) {
  if (degree < 2 || degree > 4) {
    throw std::invalid_argument("PolyExponent degree must be in [2, 4], got " +
                                std::to_string(degree));
  }
  std::vector<std::string> names;
  for (int j = 0; j <= degree; ++j) names.push_back("alpha" + std::to_string(j));
  for (int j = 0; j <= degree; ++j) names.push_back("beta" + std::to_string(j));
  return AnsatzFamily(FamilyId::PolyExponent, std::move(names),
                      std::make_shared<PolyExponentModel>(degree), std::nullopt, degree);
}

AnsatzFamily AnsatzFamily::gaussian_mass_constrained(double amplitude_scale) {
  if (!(amplitude_scale > 0.0)) {
    throw AdmissibilityError("GaussianMassConstrained: amplitude scale must be > 0");
  }
  GaussianModel::Layout l{.A = -1, .L = 0, .U = 1, .V = -1, .phi = 2, .xc = -1, .count = 3};
  return AnsatzFamily(
      FamilyId::GaussianMassConstrained, {"L", "U", "phi"},
      std::make_shared<GaussianModel>(l, "GaussianMassConstrained", amplitude_scale),
      std::nullopt);
}

AnsatzFamily AnsatzFamily::for_state(const ParameterState& state) {
  switch (state.family) {
    case FamilyId::GaussianComoving:
      return gaussian_comoving();
    case FamilyId::GaussianTranslating:
      return gaussian_translating();
    case FamilyId::GaussianFull:
      return gaussian_full();
    case FamilyId::Sech:
      return sech();
    case FamilyId::PolyExponent: {
      const auto n = state.values.size();
      if (n % 2 != 0) throw std::invalid_argument("PolyExponent needs 2(m+1) parameters");
      return poly_exponent(static_cast<int>(n / 2 - 1));
    }
    case FamilyId::GaussianMassConstrained:
      break;
  }
  throw std::invalid_argument(
      "GaussianMassConstrained carries its amplitude scale in the family, not the state");
}

std::size_t AnsatzFamily::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw std::invalid_argument("family " + std::string(to_string(id_)) + " has no parameter '" +
                              std::string(name) + "'");
}

void AnsatzFamily::validate(const RealVector& q) const { model_->validate(q); }

bool AnsatzFamily::admissible(const RealVector& q) const {
  try {
    model_->validate(q);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

ParameterState AnsatzFamily::make_state(RealVector values, double time) const {
  validate(values);
  return ParameterState{id_, std::move(values), time};
}

AnsatzJet AnsatzFamily::sample(const RealVector& q, const PeriodicGrid& grid) const {
  validate(q);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto p = static_cast<Eigen::Index>(param_count());
  AnsatzJet jet;
  jet.value.resize(n);
  jet.dx.resize(n);
  jet.dxx.resize(n);
  jet.dxxx.resize(n);
  jet.dq.resize(n, p);
  jet.dq_dx.resize(n, p);

  const double center = center_index_ ? q[static_cast<Eigen::Index>(*center_index_)] : 0.0;
  const double period = grid.domain_length();
  std::vector<Complex> dlog(static_cast<std::size_t>(p));
  std::vector<Complex> dlog_x(static_cast<std::size_t>(p));
  detail::LogJet lj;
  for (Eigen::Index j = 0; j < n; ++j) {
    double y = grid.points()[j];
    if (center_index_) y = std::remainder(y - center, period);
    model_->point(q, y, lj, dlog.data(), dlog_x.data());
    const Complex u = lj.value;
    jet.value[j] = u;
    jet.dx[j] = lj.qx * u;
    jet.dxx[j] = (lj.qxx + lj.qx * lj.qx) * u;
    jet.dxxx[j] = (lj.qxxx + 3.0 * lj.qx * lj.qxx + lj.qx * lj.qx * lj.qx) * u;
    for (Eigen::Index i = 0; i < p; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      jet.dq(j, i) = dlog[ii] * u;
      jet.dq_dx(j, i) = (dlog_x[ii] + lj.qx * dlog[ii]) * u;
    }
  }
  if (center_index_) {
    // The periodic image puts the packet's far tail at the two edge samples
    // regardless of where x_c sits.
    ComplexVector recentred(n);
    const auto shift = static_cast<Eigen::Index>(
        std::llround(std::remainder(center, period) / grid.spacing()));
    for (Eigen::Index j = 0; j < n; ++j) recentred[j] = jet.value[((j + shift) % n + n) % n];
    jet.tail = tail_check(recentred);
  } else {
    jet.tail = tail_check(jet.value);
  }
  return jet;
}

EvaluatedField evaluate(const AnsatzFamily& family, const ParameterState& q, GridPtr grid) {
  AnsatzJet jet = family.sample(q.values, *grid);
  return EvaluatedField{ComplexField(std::move(grid), std::move(jet.value)), jet.tail};
}

std::vector<ComplexField> param_derivatives(const AnsatzFamily& family, const ParameterState& q,
                                            GridPtr grid) {
  const AnsatzJet jet = family.sample(q.values, *grid);
  std::vector<ComplexField> out;
  out.reserve(family.param_count());
  for (Eigen::Index i = 0; i < jet.dq.cols(); ++i) out.emplace_back(grid, jet.dq.col(i));
  return out;
}

ComplexField spatial_derivative_analytic(const AnsatzFamily& family, const ParameterState& q,
                                         GridPtr grid) {
  AnsatzJet jet = family.sample(q.values, *grid);
  return ComplexField(std::move(grid), std::move(jet.dx));
}

ParameterState soliton_initial_state(double L0) {
  if (!(L0 > 0.0) || !std::isfinite(L0)) {
    throw AdmissibilityError("soliton_initial_state: L0 must be > 0");
  }
  RealVector q(5);
  q << 1.0 / (std::sqrt(2.0) * L0), 0.0, L0, 0.0, 0.0;
  return ParameterState{FamilyId::Sech, q, 0.0};
}

ParameterState gaussian_to_poly_exponent(const ParameterState& gaussian) {
  if (gaussian.family != FamilyId::GaussianComoving) {
    throw std::invalid_argument("gaussian_to_poly_exponent expects a GaussianComoving state");
  }
  AnsatzFamily::gaussian_comoving().validate(gaussian.values);
  const double A = gaussian.values[0];
  const double L = gaussian.values[1];
  const double U = gaussian.values[2];
  const double phi = gaussian.values[3];
  RealVector q(6);
  q << std::log(A), 0.0, -1.0 / (L * L), phi, 0.0, U / L;
  return ParameterState{FamilyId::PolyExponent, q, gaussian.time};
}

std::string serialize(const ParameterState& state) {
  const AnsatzFamily family = AnsatzFamily::for_state(state);
  std::ostringstream out;
  out << "family = " << to_string(state.family) << '\n';
  out << "time = " << format_real(state.time) << '\n';
  for (std::size_t i = 0; i < family.param_count(); ++i) {
    out << family.names()[i] << " = " << format_real(state.values[static_cast<Eigen::Index>(i)])
        << '\n';
  }
  return out.str();
}

ParameterState parse_parameter_state(std::string_view text) {
  const auto lines = parse_key_values(text);
  std::optional<FamilyId> id;
  double time = 0.0;
  std::map<std::string, double> values;
  for (const auto& kv : lines) {
    if (kv.key == "family") {
      id = family_from_string(kv.value);
    } else if (kv.key == "time") {
      time = parse_real(kv.value, "time");
    } else {
      if (values.count(kv.key) != 0) {
        throw std::invalid_argument("duplicate parameter '" + kv.key + "'");
      }
      values[kv.key] = parse_real(kv.value, kv.key);
    }
  }
  if (!id) throw std::invalid_argument("parameter record has no 'family' line");

  ParameterState probe{*id, RealVector::Zero(static_cast<Eigen::Index>(values.size())), time};
  const AnsatzFamily family = AnsatzFamily::for_state(probe);
  if (family.param_count() != values.size()) {
    throw std::invalid_argument("parameter record for " + std::string(to_string(*id)) +
                                " has " + std::to_string(values.size()) + " values, expected " +
                                std::to_string(family.param_count()));
  }
  RealVector q(static_cast<Eigen::Index>(family.param_count()));
  for (std::size_t i = 0; i < family.param_count(); ++i) {
    const auto it = values.find(family.names()[i]);
    if (it == values.end()) {
      throw std::invalid_argument("parameter record is missing '" + family.names()[i] + "'");
    }
    q[static_cast<Eigen::Index>(i)] = it->second;
  }
  return family.make_state(std::move(q), time);
}

}  // namespace romnls
