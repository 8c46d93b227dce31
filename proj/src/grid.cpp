#include "romnls/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace romnls {

namespace {

// FFTW's planner is not re-entrant; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* scratch_in = fftw_alloc_complex(n);
    auto* scratch_out = fftw_alloc_complex(n);
    const int size = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_1d(size, scratch_in, scratch_out, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_1d(size, scratch_in, scratch_out, FFTW_BACKWARD, flags);
    fftw_free(scratch_in);
    fftw_free(scratch_out);
    if (forward_ == nullptr || backward_ == nullptr) {
      throw std::runtime_error("FFTW plan creation failed for size " + std::to_string(n));
    }
  }

  ~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void forward(const ComplexVector& in, ComplexVector& out) const { run(forward_, in, out); }
  void backward(const ComplexVector& in, ComplexVector& out) const { run(backward_, in, out); }

 private:
  void run(fftw_plan plan, const ComplexVector& in, ComplexVector& out) const {
    if (static_cast<std::size_t>(in.size()) != n_) {
      throw std::invalid_argument("transform size does not match grid");
    }
    out.resize(in.size());
    // fftw does not write to the input of an out-of-place c2c transform.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(plan, src, dst);
  }

  std::size_t n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

PeriodicGrid::PeriodicGrid(double domain_length, std::size_t num_points)
    : domain_length_(domain_length), num_points_(num_points) {
  if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
    throw std::invalid_argument("domain_length must be positive and finite");
  }
  if (num_points < 8 || !is_power_of_two(num_points)) {
    throw std::invalid_argument("num_points must be a power of two >= 8, got " +
                                std::to_string(num_points));
  }
  const auto n = static_cast<Eigen::Index>(num_points);
  const double dx = spacing();
  points_.resize(n);
  wavenumbers_.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    points_[j] = -0.5 * domain_length + static_cast<double>(j) * dx;
    const Eigen::Index m = (j < n / 2) ? j : j - n;
    wavenumbers_[j] = 2.0 * kPi * static_cast<double>(m) / domain_length;
  }
  plan_ = std::make_shared<const FftPlan>(num_points);
}

ComplexVector PeriodicGrid::forward(const ComplexVector& values) const {
  ComplexVector out;
  plan_->forward(values, out);
  return out;
}

ComplexVector PeriodicGrid::inverse(const ComplexVector& coefficients) const {
  ComplexVector out;
  plan_->backward(coefficients, out);
  out /= static_cast<double>(num_points_);
  return out;
}

GridPtr make_grid(double domain_length, std::size_t num_points) {
  return std::make_shared<const PeriodicGrid>(domain_length, num_points);
}

GridPtr default_grid() { return make_grid(256.0 * kPi, 1024); }

ComplexField::ComplexField(GridPtr grid, ComplexVector values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("ComplexField requires a grid");
  if (static_cast<std::size_t>(values_.size()) != grid_->size()) {
    throw std::invalid_argument("ComplexField: " + std::to_string(values_.size()) +
                                " samples for a grid of " + std::to_string(grid_->size()));
  }
  if (!values_.allFinite()) throw std::invalid_argument("ComplexField: non-finite sample");
}

ComplexField ComplexField::zeros(GridPtr grid) {
  const auto n = static_cast<Eigen::Index>(grid->size());
  return ComplexField(std::move(grid), ComplexVector::Zero(n));
}

ComplexVector forward_transform(const ComplexField& field) {
  return field.grid().forward(field.values());
}

ComplexField inverse_transform(GridPtr grid, const ComplexVector& coefficients) {
  ComplexVector values = grid->inverse(coefficients);
  return ComplexField(std::move(grid), std::move(values));
}

ComplexVector spectral_derivative(const PeriodicGrid& grid, const ComplexVector& values,
                                  int order) {
  if (order < 1 || order > 3) {
    throw std::invalid_argument("spectral_derivative: order must be 1, 2 or 3, got " +
                                std::to_string(order));
  }
  ComplexVector coeffs = grid.forward(values);
  const auto& k = grid.wavenumbers();
  for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
    coeffs[j] *= std::pow(Complex(0.0, k[j]), order);
  }
  if (order % 2 == 1) coeffs[static_cast<Eigen::Index>(grid.nyquist_index())] = 0.0;
  return grid.inverse(coeffs);
}

ComplexField spectral_derivative(const ComplexField& field, int order) {
  return ComplexField(field.grid_ptr(), spectral_derivative(field.grid(), field.values(), order));
}

RealVector velocity_potential_gradient(const PeriodicGrid& grid, const ComplexVector& values) {
  ComplexVector density = values.cwiseAbs2().cast<Complex>();
  ComplexVector coeffs = grid.forward(density);
  coeffs.array() *= grid.wavenumbers().array().abs().cast<Complex>();
  return -0.5 * grid.inverse(coeffs).real();
}

ComplexField hilbert_like_operator(const ComplexField& field) {
  RealVector phi_x = velocity_potential_gradient(field.grid(), field.values());
  return ComplexField(field.grid_ptr(), phi_x.cast<Complex>());
}

Complex inner_product(const ComplexVector& a, const ComplexVector& b, const PeriodicGrid& grid) {
  // Eigen's dot() conjugates the first argument.
  return grid.spacing() * b.dot(a);
}

TailReport tail_check(const ComplexVector& values, double rel_tol) {
  TailReport report;
  const double peak = values.cwiseAbs().maxCoeff();
  if (peak == 0.0) return report;
  const double edge = std::max(std::abs(values[0]), std::abs(values[values.size() - 1]));
  report.boundary_ratio = edge / peak;
  report.negligible = report.boundary_ratio < rel_tol;
  return report;
}

}  // namespace romnls
