#include <doctest.h>

#include <cmath>

#include "nfg/data.hpp"
#include "nfg/problems.hpp"
#include "nfg/reference.hpp"
#include "nfg/shuffling.hpp"

using namespace nfg;

TEST_CASE("psi branch values") {
  CHECK(psi(0.0) == 0.0);
  CHECK(psi(0.5) == 0.0);
  CHECK(psi(-3.0) == 0.0);
  CHECK(psi(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // (2*0.75 - 1)^2 = 1/4, so psi = exp(1 - 4)
  CHECK(psi(0.75) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
}

TEST_CASE("psi is C1 at the seam") {
  CHECK(psi_prime(0.5) == 0.0);
  CHECK(psi_prime(0.5 - 1e-9) == 0.0);
  // right one-sided difference quotient collapses to zero
  for (double h : {1e-2, 1e-3, 1e-4}) {
    CHECK(std::fabs(psi(0.5 + h) - psi(0.5)) / h <= 1e-8);
  }
  // away from the seam psi_prime matches central differences
  for (double z : {0.7, 0.9, 1.3, 2.0}) {
    const double fd = (psi(z + 1e-6) - psi(z - 1e-6)) / 2e-6;
    CHECK(psi_prime(z) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("phi closed form against quadrature") {
  // half-Gaussian integral at zero
  CHECK(phi(0.0) ==
        doctest::Approx(std::sqrt(std::exp(1.0)) * std::sqrt(M_PI / 2.0)).epsilon(1e-14));
  CHECK(phi(-40.0) <= 1e-200);  // empty integral limit
  CHECK(phi(1.0) > phi(0.0));   // positive integrand
  for (double z : {-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0}) {
    const double q = phi_quadrature(z);
    CHECK(std::fabs(phi(z) - q) <= 1e-10 * std::max(1.0, std::fabs(q)));
  }
}

TEST_CASE("prog of explicit vectors") {
  CHECK(prog({0.0, 0.0, 0.0}) == 0);
  CHECK(prog({1.0, 0.0, 0.0}) == 1);
  CHECK(prog({0.0, 2.0, 0.0, -1.0, 0.0}) == 4);
  CHECK(prog({}) == 0);
}

TEST_CASE("zero-chain component split and origin gradients") {
  ZeroChainProblem chain(7, 3);
  CHECK(chain.block(0) == std::vector<std::size_t>{1, 4, 7});
  CHECK(chain.block(1) == std::vector<std::size_t>{2, 5});
  CHECK(chain.block(2) == std::vector<std::size_t>{3, 6});

  // psi(0) = 0 annihilates every l_j with j >= 2 at the origin
  ParamVector g(7);
  chain.component_gradient_raw(1, zeros(7), g);
  CHECK(g == zeros(7));
  chain.component_gradient_raw(2, zeros(7), g);
  CHECK(g == zeros(7));

  chain.component_gradient_raw(0, zeros(7), g);
  CHECK(g[0] == doctest::Approx(-std::sqrt(std::exp(1.0))).epsilon(1e-14));
  for (std::size_t k = 1; k < 7; ++k) CHECK(g[k] == 0.0);
}

TEST_CASE("zero-chain progress bound for component gradients") {
  const std::size_t d = 9, n = 4;
  ZeroChainProblem chain(d, n);
  CounterStream stream(33);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t p = stream.next_below(d + 1);
    ParamVector x = zeros(d);
    for (std::size_t k = 0; k < p; ++k) x[k] = 2.0 * stream.next_normal();
    if (p > 0 && x[p - 1] == 0.0) x[p - 1] = 1.0;
    ParamVector g(d);
    const std::size_t i = stream.next_below(n);
    chain.component_gradient_raw(i, x, g);
    CHECK(prog(g) <= prog(x) + 1);
  }
}

TEST_CASE("zero-chain gradient envelope") {
  const std::size_t d = 8;
  CounterStream stream(41);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = stream.next_below(d);  // keep the last coordinate zero
    ParamVector x = zeros(d);
    for (std::size_t k = 0; k < p; ++k) x[k] = 1.5 * stream.next_normal();
    const ParamVector g = zero_chain_l_gradient(x);
    CHECK(inf_norm(g) >= 1.0);
    CHECK(inf_norm(g) <= ZeroChainProblem::kChainGradBound);
  }
}

TEST_CASE("smoothness witness for quadratic and sigmoid problems") {
  QuadraticProblem quad = make_quadratic_suite(8, 5, 4.0, 0.25, 51);
  SigmoidLsqProblem sig = make_synthetic_sigmoid(8, 5, 53);
  CounterStream stream(55);
  for (const FiniteSumOracle* prob :
       {static_cast<const FiniteSumOracle*>(&quad), static_cast<const FiniteSumOracle*>(&sig)}) {
    const double bound = prob->smoothness().value() * (1.0 + 1e-9);
    for (int trial = 0; trial < 100; ++trial) {
      ParamVector x(5), y(5);
      for (std::size_t k = 0; k < 5; ++k) {
        x[k] = stream.next_normal();
        y[k] = stream.next_normal();
      }
      const std::size_t i = stream.next_below(8);
      ParamVector gx(5), gy(5);
      prob->component_gradient_raw(i, x, gx);
      prob->component_gradient_raw(i, y, gy);
      CHECK(norm(sub(gx, gy)) <= bound * norm(sub(x, y)));
    }
  }
}

TEST_CASE("quadratic closed-form minimizer") {
  QuadraticProblem quad = make_quadratic_suite(30, 6, 2.0, 0.5, 61);
  const ParamVector star = quad.minimizer();
  const ParamVector g = full_gradient_untallied(quad, star);
  CHECK(norm(g) <= 1e-12);
  CHECK(loss(quad, star) == doctest::Approx(quad.optimal_value()));
  // any perturbation increases the loss
  ParamVector bumped = star;
  bumped[0] += 0.1;
  CHECK(loss(quad, bumped) > quad.optimal_value());
}
