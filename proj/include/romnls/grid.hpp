#pragma once

#include <complex>
#include <cstddef>
#include <memory>

#include <Eigen/Core>

namespace romnls {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

class FftPlan;

// Uniform periodic grid on [-L/2, L/2) with the matching discrete Fourier pair.
//
// Transform convention: forward c_m = sum_j u_j exp(-2 pi i m j / N) (no
// scaling), inverse divides by N. With this convention
//   sum_j |u_j|^2 dx = (dx / N) sum_m |c_m|^2.
// Wavenumbers use the split ordering k_m = 2 pi m / L with
// m = 0, 1, ..., N/2 - 1, -N/2, ..., -1; the Nyquist mode is on the negative
// side.
class PeriodicGrid {
 public:
  PeriodicGrid(double domain_length, std::size_t num_points);

  double domain_length() const { return domain_length_; }
  std::size_t size() const { return num_points_; }
  double spacing() const { return domain_length_ / static_cast<double>(num_points_); }

  const RealVector& points() const { return points_; }
  const RealVector& wavenumbers() const { return wavenumbers_; }
  double point(std::size_t j) const { return points_[static_cast<Eigen::Index>(j)]; }

  std::size_t nyquist_index() const { return num_points_ / 2; }

  ComplexVector forward(const ComplexVector& values) const;
  ComplexVector inverse(const ComplexVector& coefficients) const;

 private:
  double domain_length_;
  std::size_t num_points_;
  RealVector points_;
  RealVector wavenumbers_;
  std::shared_ptr<const FftPlan> plan_;
};

using GridPtr = std::shared_ptr<const PeriodicGrid>;

GridPtr make_grid(double domain_length, std::size_t num_points);

// The grid used for every DNS and ROM comparison: 256 pi box, 2^10 modes.
GridPtr default_grid();

// Complex envelope samples on a periodic grid. Always finite, always sized to
// the grid.
class ComplexField {
 public:
  ComplexField(GridPtr grid, ComplexVector values);

  static ComplexField zeros(GridPtr grid);

  const PeriodicGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const ComplexVector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

 private:
  GridPtr grid_;
  ComplexVector values_;
};

ComplexVector forward_transform(const ComplexField& field);
ComplexField inverse_transform(GridPtr grid, const ComplexVector& coefficients);

// d^order/dx^order by multiplication with (ik)^order; order in {1, 2, 3}.
// The Nyquist coefficient is zeroed for odd orders.
ComplexVector spectral_derivative(const PeriodicGrid& grid, const ComplexVector& values,
                                  int order);
ComplexField spectral_derivative(const ComplexField& field, int order);

// -1/2 F^-1[ |k| F[|u|^2] ], the surface velocity-potential gradient of the
// modified NLS equation. Real-valued up to round-off.
RealVector velocity_potential_gradient(const PeriodicGrid& grid, const ComplexVector& values);
ComplexField hilbert_like_operator(const ComplexField& field);

// Rectangle rule dx * sum(values).
template <typename Derived>
auto quadrature(const Eigen::MatrixBase<Derived>& values, const PeriodicGrid& grid) {
  return grid.spacing() * values.sum();
}

// L2(R, C) inner product <a, b> = int a conj(b) dx on the periodic box.
Complex inner_product(const ComplexVector& a, const ComplexVector& b, const PeriodicGrid& grid);

struct TailReport {
  double boundary_ratio = 0.0;  // max(|u| at the two edge samples) / max|u|
  bool negligible = true;
};

// The improper integrals over R are truncated to the box; trust them only if
// the edge samples are below rel_tol * max|u|.
TailReport tail_check(const ComplexVector& values, double rel_tol = 1e-12);

}  // namespace romnls
