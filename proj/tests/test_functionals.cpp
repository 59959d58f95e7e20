#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "critnls/errors.hpp"
#include "critnls/functionals.hpp"
#include "critnls/groundstate.hpp"
#include "support.hpp"

using namespace critnls;
using namespace critnls::testing;

namespace {

std::string rule_message(int d, double p, double mu, double omega, Admissibility rules = {}) {
  try {
    Parameters::make(d, p, mu, omega, rules);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("parameters: admissibility rules are named when violated") {
  CHECK(rule_message(3, 5.0, 1, 1).find("p < 2* - 1") != std::string::npos);
  CHECK(rule_message(3, 3.0, 1, 1).empty());
  CHECK(rule_message(4, 2.0, 1, 1).find("p > 1 + 4/d") != std::string::npos);
  CHECK(rule_message(4, 2.5, 0, 1).find("mu > 0") != std::string::npos);
  CHECK(rule_message(4, 2.5, -1, 1, {true, false}).empty());
  CHECK(rule_message(4, 2.5, 1, 0).find("omega > 0") != std::string::npos);
  CHECK(rule_message(2, 2.5, 1, 1).find("d >= 3") != std::string::npos);
  CHECK(rule_message(4, 3.0, 1, 1, {false, true}).empty());
  CHECK(rule_message(4, 3.0, 1, 1).find("p < 2* - 1") != std::string::npos);
}

TEST_CASE("parameters: default power is the midpoint of the admissible interval") {
  CHECK(Parameters::default_p(3) == doctest::Approx(11.0 / 3.0).epsilon(1e-15));
  CHECK(Parameters::default_p(4) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(Parameters::default_p(5) == doctest::Approx(31.0 / 15.0).epsilon(1e-15));
}

TEST_CASE("grid: quadrature reproduces ball volume and Gaussian moments") {
  for (int d : {3, 4, 5}) {
    const auto g = make_grid(d, 4096, 40.0);
    double vol = 0.0;
    for (double w : g->weights()) vol += w;
    CHECK(rel(vol, g->ball_volume()) < 1e-12);
  }
  // exp(-r^2/2) in d = 4 has squared L2 norm pi^2. For even d the integrand is odd at the
  // origin, so the trapezoid error is O(h^4) there.
  const auto g = default_grid();
  const auto u = RealRadialField::sample(g, [](double r) { return std::exp(-0.5 * r * r); });
  const NormSet n = norms(u, default_params());
  CHECK(rel(n.mass, std::numbers::pi * std::numbers::pi) < 1e-9);
}

TEST_CASE("functionals: Gaussian norms match closed forms") {
  SUBCASE("d = 4, p = 2.5") {
    const auto u = RealRadialField::sample(default_grid(), [](double r) { return std::exp(-r * r); });
    const NormSet n = norms(u, default_params());
    CHECK(rel(n.mass, oracle::gauss4_mass) < 1e-8);
    CHECK(rel(n.grad2, oracle::gauss4_grad2) < 1e-8);
    CHECK(rel(n.lp1, oracle::gauss4_lp1) < 1e-8);
    CHECK(rel(n.lcrit, oracle::gauss4_lcrit) < 1e-8);
  }
  SUBCASE("d = 3, p = 3") {
    const auto g = make_grid(3, 4096, 40.0);
    const auto u = RealRadialField::sample(g, [](double r) { return std::exp(-r * r); });
    const NormSet n = norms(u, Parameters::make(3, 3.0, 1, 1));
    CHECK(rel(n.mass, oracle::gauss3_mass) < 1e-12);
    CHECK(rel(n.grad2, oracle::gauss3_grad2) < 1e-8);
    CHECK(rel(n.lp1, oracle::gauss3_lp1) < 1e-12);
    CHECK(rel(n.lcrit, oracle::gauss3_lcrit) < 1e-12);
  }
}

TEST_CASE("functionals: zero field gives zero everywhere") {
  const auto z = RealRadialField::zeros(default_grid());
  const FunctionalReport r = report(z, default_params());
  for (double v : {r.mass, r.grad2, r.lp1, r.lcrit, r.H, r.S_omega, r.K, r.I_omega}) CHECK(v == 0.0);
}

TEST_CASE("functionals: Talenti profile saturates the Sobolev identity when mu = 0") {
  Parameters q = default_params();
  q.mu = 0.0;
  const auto g = make_grid(4, 16384, 160.0);
  const auto w = talenti(1.0, 4).sample(g);
  const FunctionalReport r = report(w, q);
  CHECK(std::abs(r.K) < 0.01 * r.grad2);
  CHECK(rel(r.H, 0.5 * oracle::sobolev_pow_d4) < 0.01);
  CHECK(lambda_star(w, q) == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("functionals: K(T_lambda W) follows its closed form for mu = 0") {
  // With exact norms K(T_lambda W) = 2 lambda^2 s - 2 lambda^{2*} s, s = sigma^{d/2}, root at 1.
  Parameters q = default_params();
  q.mu = 0.0;
  const NormSet n{0.0, oracle::sobolev_pow_d4, 0.0, oracle::sobolev_pow_d4};
  CHECK(lambda_star(n, q) == doctest::Approx(1.0).epsilon(1e-12));
  for (double lam : {0.5, 0.9, 1.3, 2.0}) {
    const FunctionalReport r = FunctionalReport::from_norms(n.scaled(lam, q), q);
    const double expected = 2 * lam * lam * oracle::sobolev_pow_d4 - 2 * std::pow(lam, 4) * oracle::sobolev_pow_d4;
    CHECK(r.K == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("dilation: identity, mass invariance and gradient scaling") {
  const auto q = default_params();
  const auto u = random_bump(default_grid(), 11);
  const auto same = l2_scale(u, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) REQUIRE(same[i] == doctest::Approx(u[i]).epsilon(1e-14));
  const NormSet n0 = norms(u, q);
  for (double lam : {0.5, 2.0}) {
    const NormSet n = norms(l2_scale(u, lam), q);
    CHECK(rel(n.mass, n0.mass) < 1e-6);
    CHECK(rel(n.grad2, lam * lam * n0.grad2) < 1e-4);
    const NormSet exact = n0.scaled(lam, q);
    CHECK(rel(n.lcrit, exact.lcrit) < 1e-4);
    CHECK(rel(n.lp1, exact.lp1) < 1e-4);
  }
  CHECK_THROWS_AS(l2_scale(u, 0.0), Error);
}

TEST_CASE("lambda_star: K changes sign exactly once at the root") {
  const auto q = default_params();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const NormSet n = norms(random_bump(default_grid(), seed), q);
    const double ls = lambda_star(n, q);
    for (int k = 0; k < 50; ++k) {
      const double lam = ls * std::pow(4.0, (k - 24.5) / 25.0);
      const double K = FunctionalReport::from_norms(n.scaled(lam, q), q).K;
      if (lam < ls) CHECK(K > 0.0);
      else CHECK(K < 0.0);
    }
  }
  // A field on the Nehari manifold is its own root.
  const NormSet nq = norms(default_ground().Q, q);
  CHECK(lambda_star(nq, q) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("action profile: identity, argmax and concavity for 20 random bumps") {
  const auto q = default_params();
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto diag = action_profile_check(random_bump(default_grid(), seed), q);
    CAPTURE(seed);
    CHECK(diag.lambdas.size() == 50);
    CHECK(diag.max_identity_residual < 1e-5);
    CHECK(diag.argmax_matches);
    CHECK(diag.concave_beyond);
  }
}

TEST_CASE("rearrangement: fixed points, measure preservation and K monotonicity") {
  const auto q = default_params();
  const auto g = default_grid();
  const auto dec = RealRadialField::sample(g, [](double r) { return 2.0 / (1.0 + r * r * r); });
  const auto same = schwarz_rearrange(dec);
  for (std::size_t i = 0; i < dec.size(); ++i) REQUIRE(same[i] == doctest::Approx(dec[i]).epsilon(1e-12));

  const auto two = RealRadialField::sample(
      g, [](double r) { return std::exp(-4 * (r - 1) * (r - 1)) + 0.7 * std::exp(-8 * (r - 3) * (r - 3)); });
  const auto star = schwarz_rearrange(two);
  const NormSet a = norms(two, q), b = norms(star, q);
  CHECK(rel(b.mass, a.mass) < 1e-3);
  CHECK(rel(b.lcrit, a.lcrit) < 1e-3);
  CHECK(b.grad2 <= a.grad2);
  for (std::size_t i = 1; i < star.size(); ++i) REQUIRE(star[i] <= star[i - 1]);

  for (std::uint64_t seed = 200; seed < 210; ++seed) {
    auto u = random_bump(g, seed);
    const double ls = lambda_star(u, q);
    u = l2_scale(u, 1.1 * ls);  // K(u) < 0
    const double K = report(u, q).K;
    REQUIRE(K < 0.0);
    CHECK(report(schwarz_rearrange(u), q).K <= K + 1e-3 * std::abs(K));
  }
}
