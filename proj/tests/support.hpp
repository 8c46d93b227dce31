#pragma once

#include <cmath>
#include <random>

#include "romnls/ansatz.hpp"
#include "romnls/grid.hpp"

namespace romnls::testing {

// Seeded generators for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  ComplexVector field(std::size_t n, double scale = 1.0) {
    ComplexVector v(static_cast<Eigen::Index>(n));
    for (auto& z : v) z = Complex(uniform(-scale, scale), uniform(-scale, scale));
    return v;
  }

  // A in [0.02, 0.2], L in [5, 25], U in [-0.1, 0.1].
  RealVector gaussian_comoving() {
    RealVector q(4);
    q << uniform(0.02, 0.2), uniform(5.0, 25.0), uniform(-0.1, 0.1), uniform(-kPi, kPi);
    return q;
  }

  RealVector gaussian_translating() {
    RealVector q(5);
    q << gaussian_comoving(), uniform(-20.0, 20.0);
    return q;
  }

  RealVector gaussian_full() {
    RealVector q(6);
    q << uniform(0.02, 0.2), uniform(5.0, 25.0), uniform(-0.1, 0.1), uniform(-0.2, 0.2),
        uniform(-kPi, kPi), uniform(-20.0, 20.0);
    return q;
  }

  // Narrow packets; use with fine_grid().
  RealVector sech() {
    RealVector q(5);
    q << uniform(0.3, 1.0), uniform(-0.3, 0.3), uniform(0.7, 2.0), uniform(-0.1, 0.1),
        uniform(-5.0, 5.0);
    return q;
  }

  // Degree-2 PolyExponent from a random comoving Gaussian.
  RealVector poly_exponent2() {
    const RealVector g = gaussian_comoving();
    RealVector q(6);
    q << std::log(g[0]), 0.0, -1.0 / (g[1] * g[1]), g[3], 0.0, g[2] / g[1];
    return q;
  }

  // Degree 4 with a decaying quartic.
  RealVector poly_exponent4() {
    const double L = uniform(2.0, 5.0);
    RealVector q(10);
    q << uniform(-1.0, 0.0), uniform(-0.05, 0.05) / L, uniform(-0.5, 0.5) / (L * L),
        uniform(-0.05, 0.05) / (L * L * L), -uniform(0.5, 1.0) / (L * L * L * L),
        uniform(-1.0, 1.0), uniform(-0.1, 0.1) / L, uniform(-0.2, 0.2) / (L * L),
        uniform(-0.02, 0.02) / (L * L * L), uniform(-0.01, 0.01) / (L * L * L * L);
    return q;
  }

 private:
  std::mt19937_64 rng_;
};

inline GridPtr fine_grid() { return make_grid(64.0 * kPi, 2048); }

inline double rel_l2(const ComplexVector& a, const ComplexVector& b) {
  return (a - b).norm() / b.norm();
}

}  // namespace romnls::testing
