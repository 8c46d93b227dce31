#include <doctest.h>

#include <cmath>

#include "romnls/closed_form.hpp"
#include "romnls/rons.hpp"
#include "support.hpp"

using namespace romnls;
using romnls::testing::Gen;

namespace {

const PdeModel kComoving{PdeKind::NlsComoving};
const PdeModel kStationary{PdeKind::NlsStationary};
const PdeModel kMnls{PdeKind::Mnls, false};

RealVector state(std::initializer_list<double> v) {
  RealVector q(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) q[i++] = x;
  return q;
}

}  // namespace

TEST_CASE("metric entries of the Gaussian") {
  const auto f = AnsatzFamily::gaussian_comoving();
  const TangentSystem sys =
      assemble(kComoving, f, f.make_state(state({0.1, 15.0, 0.0, 0.0})), *default_grid());
  CHECK(std::abs(sys.metric(3, 3).real() - 0.18800) < 1e-5);
  CHECK(std::abs(sys.metric(3, 3).real() - gaussian_mass(0.1, 15.0)) < 1e-6);
  CHECK(std::abs(sys.metric(0, 0).real() - 18.800) < 1e-3);
  CHECK(std::abs(sys.metric(0, 0).real() - gaussian_mass(0.1, 15.0) / 0.01) < 1e-4);
  CHECK((sys.metric - sys.metric.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(sys.tail.negligible);
  CHECK_FALSE(sys.ill_conditioned());
  CHECK(dump(sys).find("M[A,A] = ") != std::string::npos);
}

TEST_CASE("metric structure for random states of every family") {
  Gen gen(101);
  const GridPtr g = default_grid();
  const GridPtr fine = testing::fine_grid();
  auto check = [](const AnsatzFamily& f, const RealVector& q, const PeriodicGrid& grid) {
    const TangentSystem sys = assemble(kMnls, f, f.make_state(q), grid);
    const double scale = sys.metric.cwiseAbs().maxCoeff();
    CHECK((sys.metric - sys.metric.adjoint()).cwiseAbs().maxCoeff() < 1e-10 * scale);
    const Eigen::MatrixXd im = sys.metric.imag();
    CHECK((im + im.transpose()).cwiseAbs().maxCoeff() < 1e-10 * scale);
    CHECK(std::isfinite(sys.condition_estimate));
    CHECK_NOTHROW(rons_rhs(sys));
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

TEST_CASE("rates at reference states") {
  const GridPtr g = default_grid();
  const RealVector r =
      rons_rate(kComoving, AnsatzFamily::gaussian_comoving(), state({0.1, 15.0, 0.0, 0.0}), *g);
  CHECK(std::abs(r[0]) < 1e-6);
  CHECK(std::abs(r[1]) < 1e-6);
  CHECK(std::abs(r[2] - 8.7554e-5) < 1e-6);
  CHECK(std::abs(r[3] - (-3.3083e-3)) < 1e-6);

  Gen gen(103);
  const auto tr = AnsatzFamily::gaussian_translating();
  for (int trial = 0; trial < 10; ++trial) {
    const RealVector q = state({0.1, 15.0, 0.0, 0.0, gen.uniform(-100.0, 100.0)});
    CHECK(std::abs(rons_rate(kStationary, tr, q, *g)[4] - 0.5) < 1e-8);
  }
}

TEST_CASE("sech soliton is steady in modulus") {
  const GridPtr fine = testing::fine_grid();
  const ParameterState s = soliton_initial_state(1.0);
  const RealVector r = rons_rate(kComoving, AnsatzFamily::sech(), s.values, *fine);
  const double amp = std::hypot(s.values[0], s.values[1]);
  const double damp = (s.values[0] * r[0] + s.values[1] * r[1]) / amp;
  CHECK(std::abs(damp) < 1e-6);
  CHECK(std::abs(r[2]) < 1e-6);
}

TEST_CASE("numeric RONS reproduces the closed-form Gaussian system") {
  Gen gen(107);
  const GridPtr g = default_grid();
  const auto f = AnsatzFamily::gaussian_comoving();
  for (int trial = 0; trial < 100; ++trial) {
    const RealVector q = gen.gaussian_comoving();
    const RealVector closed = closed_form_rhs(ClosedFormSystem::NlsComovingGaussian, q);
    const RealVector numeric = rons_rate(kComoving, f, q, *g);
    CHECK((closed - numeric).cwiseAbs().maxCoeff() / (1.0 + closed.cwiseAbs().maxCoeff()) < 1e-6);
  }
}

TEST_CASE("rate is the orthogonal projection and minimizes the cost") {
  Gen gen(109);
  const GridPtr g = default_grid();
  const auto f = AnsatzFamily::gaussian_full();
  for (int trial = 0; trial < 5; ++trial) {
    const RealVector q = gen.gaussian_full();
    const AnsatzJet jet = f.sample(q, *g);
    const ComplexVector F = rhs_on_ansatz(kMnls, jet, *g);
    const RealVector qdot = rons_rhs(assemble_from_jet(kMnls, jet, f.make_state(q), *g));
    const ComplexVector residual = jet.dq * qdot.cast<Complex>() - F;
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      const double proj = inner_product(jet.dq.col(j), residual, *g).real();
      CHECK(std::abs(proj) < 1e-10 * std::sqrt(quadrature(F.cwiseAbs2(), *g)) *
                                 jet.dq.col(j).norm());
    }
    const double best = projection_cost(jet, F, qdot, *g);
    for (int k = 0; k < 100; ++k) {
      RealVector other = qdot;
      for (Eigen::Index i = 0; i < other.size(); ++i) {
        other[i] += gen.uniform(-1.0, 1.0) * 1e-3 * (1e-3 + std::abs(qdot[i]));
      }
      CHECK(best <= projection_cost(jet, F, other, *g));
    }
  }
}

TEST_CASE("constrained projection") {
  Gen gen(113);
  const GridPtr g = default_grid();
  const auto f = AnsatzFamily::gaussian_comoving();
  const ConservedQuantitySet both = ConservedQuantitySet::nls_gaussian(f, true);
  const ConservedQuantitySet mass = ConservedQuantitySet::nls_gaussian(f, false);
  for (int trial = 0; trial < 200; ++trial) {
    const TangentSystem sys = assemble(kComoving, f, f.make_state(gen.gaussian_comoving()), *g);
    const RealVector free = rons_rhs(sys);
    const ConstrainedSolution c = constrained_rons_rhs(sys, both);
    CHECK(c.multipliers.size() == 2);
    CHECK(c.multipliers.cwiseAbs().maxCoeff() < 1e-8);
    CHECK((c.rate - free).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + free.cwiseAbs().maxCoeff()));
    const ConstrainedSolution m = constrained_rons_rhs(sys, mass);
    CHECK(std::abs(m.constraint_rhs[0]) < 1e-12);
    CHECK((m.rate - free).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + free.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("constraints actually bind when the flow does not conserve them") {
  // A quantity the flow does not conserve: pinning A must change the rate.
  const GridPtr g = default_grid();
  const auto f = AnsatzFamily::gaussian_comoving();
  const TangentSystem sys = assemble(kComoving, f, f.make_state(state({0.1, 15.0, 0.05, 0.0})), *g);
  ConservedQuantitySet pin;
  pin.add({"A", [](const RealVector& q) { return q[0]; },
           [](const RealVector& q) {
             RealVector e = RealVector::Zero(q.size());
             e[0] = 1.0;
             return e;
           }});
  const ConstrainedSolution c = constrained_rons_rhs(sys, pin);
  CHECK(std::abs(c.rate[0]) < 1e-14);
  CHECK(std::abs(c.multipliers[0]) > 0.0);
}

TEST_CASE("dependent constraints are named") {
  const GridPtr g = default_grid();
  const auto f = AnsatzFamily::gaussian_comoving();
  const TangentSystem sys = assemble(kComoving, f, f.make_state(state({0.1, 15.0, 0.0, 0.0})), *g);
  ConservedQuantitySet twice = ConservedQuantitySet::nls_gaussian(f, false);
  auto copy = twice.items()[0];
  copy.name = "mass_again";
  twice.add(copy);
  try {
    constrained_rons_rhs(sys, twice);
    FAIL("expected DependentConstraintsError");
  } catch (const DependentConstraintsError& e) {
    CHECK(e.quantity() == "mass_again");
  }
}

TEST_CASE("quadrature gradients agree with closed forms") {
  Gen gen(127);
  const GridPtr g = default_grid();
  const auto f = AnsatzFamily::gaussian_comoving();
  const ConservedQuantitySet closed = ConservedQuantitySet::nls_gaussian(f, true);
  const ConservedQuantitySet quad = ConservedQuantitySet::by_quadrature(f, g, true);
  for (int trial = 0; trial < 10; ++trial) {
    const RealVector q = gen.gaussian_comoving();
    for (std::size_t k = 0; k < 2; ++k) {
      const double a = closed.items()[k].value(q), b = quad.items()[k].value(q);
      CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
      const RealVector ga = closed.items()[k].gradient(q), gb = quad.items()[k].gradient(q);
      CHECK((ga - gb).cwiseAbs().maxCoeff() < 1e-6 * ga.cwiseAbs().maxCoeff());
    }
  }
  CHECK_THROWS(ConservedQuantitySet::nls_gaussian(AnsatzFamily::sech()));
  CHECK_THROWS(ConservedQuantitySet::nls_gaussian(AnsatzFamily::gaussian_full(), true));
}

TEST_CASE("mass is preserved along an MNLS trajectory") {
  const GridPtr g = default_grid();
  const auto f = AnsatzFamily::gaussian_full();
  const ConservedQuantitySet mass = ConservedQuantitySet::nls_gaussian(f, false);
  RealVector q = state({0.15, 12.0, 0.02, 0.01, 0.0, 0.0});
  const double h = 0.5;
  for (int step = 0; step < 20; ++step) {
    const RealVector qdot = rons_rate(kMnls, f, q, *g);
    const double rate = mass.items()[0].gradient(q).dot(qdot);
    CHECK(std::abs(rate) < 1e-10);
    const RealVector k2 = rons_rate(kMnls, f, q + 0.5 * h * qdot, *g);
    q += h * k2;
  }
}

TEST_CASE("metric solve failures") {
  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  const RealVector rhs = RealVector::Ones(2);
  try {
    solve_metric(singular, rhs);
    FAIL("expected SingularMetricError");
  } catch (const SingularMetricError& e) {
    CHECK(e.condition_estimate() > 1e10);
  }
  SolveOptions shifted;
  shifted.tikhonov_shift = 1e-3;
  CHECK(solve_metric(singular, rhs, shifted).allFinite());
  CHECK(spd_condition_estimate(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
}
