#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "romnls/closed_form.hpp"
#include "romnls/master.hpp"
#include "romnls/rons.hpp"
#include "support.hpp"

using namespace romnls;
using romnls::testing::Gen;

namespace {

double max_rel(const RealVector& a, const RealVector& b) {
  return (a - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff());
}

// Wirtinger derivatives of h by central differences in Re and Im.
Complex wirtinger(const LagrangianDensity& h, DensityPoint p, bool slot_ux, bool conjugate) {
  const double step = 1e-6;
  Complex& z = slot_ux ? p.ux : p.u;
  const Complex z0 = z;
  z = z0 + step;
  const Complex fr = h.value(p);
  z = z0 - step;
  const Complex br = h.value(p);
  z = z0 + Complex(0.0, step);
  const Complex fi = h.value(p);
  z = z0 - Complex(0.0, step);
  const Complex bi = h.value(p);
  const Complex dre = (fr - br) / (2.0 * step);
  const Complex dim = (fi - bi) / (2.0 * step);
  const Complex I(0.0, 1.0);
  return conjugate ? 0.5 * (dre + I * dim) : 0.5 * (dre - I * dim);
}

}  // namespace

TEST_CASE("density derivatives are the Wirtinger derivatives of h") {
  Gen gen(201);
  for (double gamma : {0.0, 1.0}) {
    const NlsDensity h(gamma);
    for (int trial = 0; trial < 50; ++trial) {
      const DensityPoint p{Complex(gen.uniform(-1, 1), gen.uniform(-1, 1)),
                           Complex(gen.uniform(-1, 1), gen.uniform(-1, 1))};
      CHECK(std::abs(h.value(p).imag()) < 1e-15);
      CHECK(std::abs(h.d_u(p) - wirtinger(h, p, false, false)) < 1e-8);
      CHECK(std::abs(h.d_conj_u(p) - wirtinger(h, p, false, true)) < 1e-8);
      CHECK(std::abs(h.d_ux(p) - wirtinger(h, p, true, false)) < 1e-8);
      CHECK(std::abs(h.d_conj_ux(p) - wirtinger(h, p, true, true)) < 1e-8);
      CHECK(std::abs(std::conj(h.d_u(p)) - h.d_conj_u(p)) < 1e-15);
      CHECK(std::abs(std::conj(h.d_ux(p)) - h.d_conj_ux(p)) < 1e-15);
    }
  }
  CHECK(NlsDensity::stationary().matching_pde() == PdeKind::NlsStationary);
  CHECK(NlsDensity::comoving().matching_pde() == PdeKind::NlsComoving);
}

TEST_CASE("the density generates the NLS right-hand side") {
  Gen gen(203);
  const GridPtr g = default_grid();
  const auto f = AnsatzFamily::gaussian_full();
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexField u = evaluate(f, f.make_state(gen.gaussian_full()), g).field;
    for (double gamma : {0.0, 1.0}) {
      const NlsDensity h(gamma);
      const ComplexVector a = induced_rhs(h, u).values();
      const ComplexVector b = rhs({h.matching_pde()}, u).values();
      CHECK((a - b).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("real part is RONS for every family") {
  Gen gen(207);
  const GridPtr g = default_grid();
  const GridPtr fine = testing::fine_grid();
  auto check = [](const AnsatzFamily& f, const RealVector& q, const PeriodicGrid& grid) {
    for (double gamma : {0.0, 1.0}) {
      const NlsDensity h(gamma);
      const ParameterState s = f.make_state(q);
      const MasterSystem m = assemble_master(h, f, s, grid);
      const TangentSystem t = assemble({h.matching_pde()}, f, s, grid);
      CHECK((m.metric - t.metric).cwiseAbs().maxCoeff() == 0.0);
      const double scale = 1.0 + t.forcing.cwiseAbs().maxCoeff();
      CHECK(((m.xi + m.eta) - t.forcing).cwiseAbs().maxCoeff() < 1e-10 * scale);
      CHECK(max_rel(solve_real_part(m), rons_rhs(t)) < 1e-8);
      const Eigen::MatrixXd im = m.metric.imag();
      CHECK((im + im.transpose()).cwiseAbs().maxCoeff() < 1e-10 * m.metric.cwiseAbs().maxCoeff());
    }
  };
  for (int trial = 0; trial < 10; ++trial) {
    check(AnsatzFamily::gaussian_comoving(), gen.gaussian_comoving(), *g);
    check(AnsatzFamily::gaussian_translating(), gen.gaussian_translating(), *g);
    check(AnsatzFamily::gaussian_full(), gen.gaussian_full(), *g);
    check(AnsatzFamily::sech(), gen.sech(), *fine);
    check(AnsatzFamily::poly_exponent(2), gen.poly_exponent2(), *g);
    check(AnsatzFamily::poly_exponent(4), gen.poly_exponent4(), *fine);
  }
}

TEST_CASE("comoving Gaussian: both parts give the closed-form system") {
  Gen gen(211);
  const GridPtr g = default_grid();
  const auto f = AnsatzFamily::gaussian_comoving();
  RealVector q0(4);
  q0 << 0.1, 15.0, 0.0, 0.0;
  const MasterSystem ref = assemble_master(NlsDensity::comoving(), f, f.make_state(q0), *g);
  const RealVector r = solve_real_part(ref);
  CHECK(std::abs(r[2] - 8.7554e-5) < 1e-6);
  CHECK(std::abs(r[3] + 3.3083e-3) < 1e-6);

  for (int trial = 0; trial < 30; ++trial) {
    const RealVector q = gen.gaussian_comoving();
    const MasterSystem m = assemble_master(NlsDensity::comoving(), f, f.make_state(q), *g);
    const RealVector re = solve_real_part(m);
    const RankReport im = solve_imag_part(m, f.names());
    CHECK(im.full_rank());
    CHECK(im.undetermined.empty());
    CHECK(max_rel(im.rate, re) < 1e-8);
    CHECK(max_rel(re, closed_form_rhs(ClosedFormSystem::NlsComovingGaussian, q)) < 1e-6);
  }
}

TEST_CASE("translating Gaussian in the stationary frame loses the wave speed") {
  Gen gen(213);
  const GridPtr g = default_grid();
  const auto f = AnsatzFamily::gaussian_translating();
  for (int trial = 0; trial < 20; ++trial) {
    const MasterSystem m =
        assemble_master(NlsDensity::stationary(), f, f.make_state(gen.gaussian_translating()), *g);
    CHECK(std::abs(solve_real_part(m)[4] - 0.5) < 1e-8);
    const RankReport im = solve_imag_part(m, f.names());
    CHECK(im.rank == 4);
    CHECK(im.rank % 2 == 0);
    REQUIRE(im.undetermined.size() == 1);
    CHECK(im.undetermined[0] == "x_c");
    CHECK(std::abs(std::abs(im.null_space(4, 0)) - 1.0) < 1e-10);
    CHECK(im.rate[4] == doctest::Approx(0.0));
    CHECK(im.residual < 1e-10);
    CHECK(im.to_text().find("undetermined = x_c") != std::string::npos);
  }
}

TEST_CASE("mass-constrained Gaussian has phi in the null space") {
  Gen gen(217);
  const GridPtr g = default_grid();
  for (int trial = 0; trial < 20; ++trial) {
    RealVector q(3);
    q << gen.uniform(5.0, 25.0), gen.uniform(-0.1, 0.1), gen.uniform(-kPi, kPi);
    const MassConstrainedReport r = mass_constrained_gaussian_check(gen.uniform(0.1, 0.8), q, *g);
    CHECK(r.real_part_spd);
    CHECK(std::isfinite(r.real_part_condition));
    CHECK(r.phi_column_norm < 1e-12);
    CHECK(r.imaginary.rank == 2);
    CHECK(r.imaginary.rank % 2 == 0);
    CHECK(std::find(r.imaginary.undetermined.begin(), r.imaginary.undetermined.end(), "phi") !=
          r.imaginary.undetermined.end());
  }
}

TEST_CASE("sech: Im[M] misses only the center, amplitude rates match RONS") {
  Gen gen(219);
  const GridPtr fine = testing::fine_grid();
  const auto f = AnsatzFamily::sech();
  for (int trial = 0; trial < 10; ++trial) {
    const RealVector q = gen.sech();
    const MasterSystem m = assemble_master(NlsDensity::comoving(), f, f.make_state(q), *fine);
    const RankReport im = solve_imag_part(m, f.names());
    CHECK(im.rank == 4);
    REQUIRE(im.undetermined.size() == 1);
    CHECK(im.undetermined[0] == "x_c");
    const RealVector re = solve_real_part(m);
    const double amp = std::hypot(q[0], q[1]);
    const double imag_rate = (q[0] * im.rate[0] + q[1] * im.rate[1]) / amp;
    const double real_rate = (q[0] * re[0] + q[1] * re[1]) / amp;
    CHECK(std::abs(imag_rate - real_rate) < 1e-8 * (1.0 + std::abs(real_rate)));
  }
}

TEST_CASE("poly-exponent block identities and coincidence") {
  Gen gen(223);
  const GridPtr g = default_grid();
  const GridPtr fine = testing::fine_grid();
  auto check = [](const AnsatzFamily& f, const RealVector& q, const PeriodicGrid& grid) {
    for (double gamma : {0.0, 1.0}) {
      const MasterSystem m = assemble_master(NlsDensity(gamma), f, f.make_state(q), grid);
      const BlockIdentityResiduals r = poly_exponent_block_residuals(m);
      CHECK(r.b_minus_d < 1e-10 * r.scale);
      CHECK(r.b_plus_i_c < 1e-10 * r.scale);
      const double fs = 1.0 + (m.xi + m.eta).cwiseAbs().maxCoeff();
      CHECK(r.xi_stacking < 1e-10 * fs);
      CHECK(r.eta_stacking < 1e-10 * fs);
      const RankReport im = solve_imag_part(m, f.names());
      CHECK(im.full_rank());
      CHECK(max_rel(im.rate, solve_real_part(m)) < 1e-8);
    }
  };
  for (int trial = 0; trial < 10; ++trial) {
    check(AnsatzFamily::poly_exponent(2), gen.poly_exponent2(), *g);
    check(AnsatzFamily::poly_exponent(4), gen.poly_exponent4(), *fine);
  }

  const auto co = AnsatzFamily::gaussian_comoving();
  RealVector q(4);
  q << 0.1, 15.0, 0.0, 0.0;
  const MasterSystem m = assemble_master(NlsDensity::comoving(), co, co.make_state(q), *g);
  CHECK_THROWS_AS(poly_exponent_block_residuals(m), std::invalid_argument);
}
