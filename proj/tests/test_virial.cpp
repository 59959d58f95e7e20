#include <doctest.h>

#include <cmath>

#include "critnls/errors.hpp"
#include "critnls/virial.hpp"
#include "support.hpp"

using namespace critnls;
using namespace critnls::testing;

TEST_CASE("bump: normalisation, symmetry and the primitives of w") {
  CHECK(rel(bump::normalization(), oracle::bump_c) < 1e-13);
  CHECK(bump::cumulative(1.0) == 0.0);
  CHECK(bump::cumulative(3.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bump::cumulative(2.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(bump::first_moment(3.0) == doctest::Approx(2.0).epsilon(1e-14));
  for (double x : {1.2, 1.5, 1.9}) CHECK(bump::rho(x) == doctest::Approx(bump::rho(4.0 - x)).epsilon(1e-14));
  for (double s : {0.0, 0.3, 1.0}) CHECK(bump::w(s) == s);
  for (double s : {3.0, 4.5, 100.0}) CHECK(bump::w(s) == doctest::Approx(2.0).epsilon(1e-14));
  // Derivatives against central differences.
  const double h = 1e-5;
  for (double s : {1.3, 1.8, 2.2, 2.7}) {
    CHECK(bump::w_prime(s) == doctest::Approx((bump::w(s + h) - bump::w(s - h)) / (2 * h)).epsilon(1e-8));
    CHECK(bump::rho_prime(s) == doctest::Approx((bump::rho(s + h) - bump::rho(s - h)) / (2 * h)).epsilon(1e-6));
    CHECK(bump::rho_second(s) ==
          doctest::Approx((bump::rho_prime(s + h) - bump::rho_prime(s - h)) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("weight: invariants hold for R in {5, 10, 20}") {
  const auto g = default_grid();
  double bilap_scaled[3];
  int k = 0;
  for (double R : {5.0, 10.0, 20.0}) {
    CAPTURE(R);
    const VirialWeight w = build_weight(R, g, 4);
    double bmax = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double r = g->r(i);
      if (r <= R) REQUIRE(w.W[i] == doctest::Approx(r * r).epsilon(1e-14));
      if (r >= std::sqrt(3.0) * R) REQUIRE(w.W[i] == doctest::Approx(2.0 * R * R).epsilon(1e-13));
      REQUIRE(w.grad[i] * w.grad[i] <= 4.0 * w.W[i] * (1 + 1e-13) + 1e-300);
      REQUIRE(w.W[i] <= 2.0 * R * R * (1 + 1e-14));
      if (r <= R) {
        REQUIRE(w.kappa1[i] == 0.0);
        REQUIRE(w.kappa2[i] == 0.0);
      }
      bmax = std::max(bmax, std::abs(w.bilap[i]));
    }
    bilap_scaled[k++] = bmax * R * R;
    CHECK(w.W_constant == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(w.grad_sup() == doctest::Approx(w.grad_constant * R));
  }
  // ||Delta^2 W_R|| R^2 is the same constant for every R.
  CHECK(bilap_scaled[1] == doctest::Approx(bilap_scaled[0]).epsilon(1e-2));
  CHECK(bilap_scaled[2] == doctest::Approx(bilap_scaled[0]).epsilon(1e-2));
  CHECK(build_weight(10.0, g, 4).bilap_constant == doctest::Approx(bilap_scaled[0]).epsilon(1e-2));
}

TEST_CASE("weight: the radius must fit inside the grid") {
  const auto g = default_grid();
  CHECK_THROWS_AS(build_weight(0.0, g, 4), Error);
  CHECK_THROWS_AS(build_weight(-1.0, g, 4), Error);
  CHECK_THROWS_AS(build_weight(25.0, g, 4), Error);  // sqrt(3) * 25 > 40
}

TEST_CASE("localized K: vanishes inside R and tends to K as R shrinks") {
  const auto q = default_params();
  const auto g = default_grid();
  const auto inside = RealRadialField::sample(g, [](double r) { return r < 4.0 ? std::pow(std::cos(r * 0.39), 4) : 0.0; });
  CHECK(localized_k(inside, build_weight(5.0, g, 4), q) == 0.0);

  const auto v = RealRadialField::sample(g, [](double r) { return std::exp(-r * r); });
  const double K = report(v, q).K;
  const double KR = localized_k(v, build_weight(0.01, g, 4), q);
  CHECK(std::abs(KR - K) < 1e-3 * std::abs(K));
  CHECK(localized_k(to_complex(v), build_weight(0.01, g, 4), q) == doctest::Approx(KR).epsilon(1e-14));
}

TEST_CASE("localized K: sign is controlled by tail gradient versus tail amplitude") {
  const auto q = default_params();
  const auto g = default_grid();
  const VirialWeight w = build_weight(5.0, g, 4);
  const auto oscillating =
      RealRadialField::sample(g, [](double r) { return 0.05 * std::exp(-std::pow(r - 12, 2)) * std::sin(20 * r); });
  CHECK(localized_k(oscillating, w, q) > 0.0);
  const auto flat = RealRadialField::sample(g, [](double r) { return 3.0 * std::exp(-std::pow((r - 12) / 3, 2)); });
  CHECK(localized_k(flat, w, q) < 0.0);
}

TEST_CASE("strauss: fitted constant is bounded across a random family") {
  const auto g = default_grid();
  const VirialWeight w = build_weight(5.0, g, 4);
  const StraussFamily fam = strauss_family(g, w.kappa2_profile(), 50, 7, 5.0);
  REQUIRE(fam.fitted_C.size() == 50);
  CHECK(std::isfinite(fam.max_C));
  CHECK(fam.max_C > 0.0);
  CHECK(fam.max_second_half <= 2.0 * fam.max_first_half);
  CHECK(fam.analytic_C == doctest::Approx(oracle::strauss_c_d4).epsilon(1e-14));

  const auto inside = RealRadialField::sample(g, [](double r) { return std::exp(-r * r); });
  CHECK(strauss_check(inside, w.kappa2_profile()).lhs < 1e-10);

  const auto u = random_bump(g, 3);
  const auto u2 = RealRadialField::sample(g, [&](double r) {
    const std::size_t i = static_cast<std::size_t>(std::lround(r / g->spacing()));
    return 2.0 * u[i];
  });
  const auto shifted = build_weight(0.5, g, 4);
  const StraussDiagnostic a = strauss_check(u, shifted.kappa2_profile());
  const StraussDiagnostic b = strauss_check(u2, shifted.kappa2_profile());
  CHECK(b.fitted_C == doctest::Approx(a.fitted_C).epsilon(1e-12));

  const RadialProfile negative{[](double) { return -1.0; }, [](double) { return 0.0; }};
  CHECK_THROWS_AS(strauss_check(u, negative), Error);
}

TEST_CASE("certificate: gate on epsilon0 and the parabola at t = 0") {
  const auto q = default_params();
  const auto g = default_grid();
  const VirialWeight w = build_weight(10.0, g, 4);
  const auto psi0 = to_complex(l2_scale(default_ground().Q, 1.2));
  CHECK_THROWS_AS(make_certificate(psi0, 0.0, w, q), Error);
  CHECK_THROWS_AS(make_certificate(psi0, -1.0, w, q), Error);
  MStarOptions mo;
  mo.budget = 40;
  const BlowupCertificate c = make_certificate(psi0, 89.0, w, q, mo);
  CHECK(c.parabola(0.0) == c.M0);
  CHECK(c.P0 == doctest::Approx(0.0).epsilon(1e-12));  // real data carry no momentum
  CHECK(c.delta2_bound == doctest::Approx(w.bilap_sup() * c.mass0));
  CHECK(c.delta2_ok);
  CHECK(c.tail_ok);
  CHECK(c.weighted_ok);
  CHECK(c.valid());
  CHECK(c.t_star > 0.0);
  CHECK(c.parabola(c.t_star) == doctest::Approx(0.0).epsilon(1e-9).scale(c.M0));
  CHECK(c.m_star_budget == 40);
  CHECK(c.m_star > 0.0);
  CHECK(c.m_star <= c.mass0 * (1 + 1e-12));
  // Same seed, same surrogate.
  const BlowupCertificate c2 = make_certificate(psi0, 89.0, w, q, mo);
  CHECK(c2.m_star == c.m_star);
  // A small radius violates the Delta^2 condition and invalidates the certificate.
  const BlowupCertificate small = make_certificate(psi0, 89.0, build_weight(2.0, g, 4), q, mo);
  CHECK_FALSE(small.delta2_ok);
  CHECK_FALSE(small.valid());
}

TEST_CASE("virial identity: free flow and short nonlinear windows") {
  const auto q = default_params();
  const auto g = default_grid();
  SUBCASE("linear evolution") {
    const VirialWeight w = build_weight(2.0, g, 4);
    EvolveOptions o;
    o.linear_only = true;
    o.sample_interval = 0.01;
    o.observer = virial_observer(w, q, true);
    o.observer_columns = virial_columns();
    const auto psi0 = ComplexRadialField::sample(g, [](double r) { return cplx(std::exp(-r * r / 4), 0.0); });
    const TrajectoryRecord tr = evolve(psi0, q, 0.3, nullptr, o);
    const VirialResidual vr = virial_residual(tr, w, q);
    CHECK(vr.t.size() >= 20);
    CHECK(vr.max_relative < 1e-3);
  }
  SUBCASE("standing wave") {
    const VirialWeight w = build_weight(5.0, g, 4);
    EvolveOptions o;
    o.sample_interval = 2e-3;
    o.observer = virial_observer(w, q);
    o.observer_columns = virial_columns();
    const TrajectoryRecord tr = evolve(to_complex(default_ground().Q), q, 0.02, &default_ground(), o);
    const VirialResidual vr = virial_residual(tr, w, q);
    const double scale = 2.0 * tr.samples.front().grad2;
    for (std::size_t i = 0; i < vr.t.size(); ++i) {
      CHECK(std::abs(vr.rhs[i]) < 1e-3 * scale);
      CHECK(std::abs(vr.lhs[i]) < 1e-3 * scale);
    }
    CHECK(vr.max_relative < 1e-3);
  }
  SUBCASE("too few samples") {
    const VirialWeight w = build_weight(5.0, g, 4);
    EvolveOptions o;
    o.sample_interval = 1e-3;
    o.observer = virial_observer(w, q);
    o.observer_columns = virial_columns();
    const TrajectoryRecord tr = evolve(to_complex(default_ground().Q), q, 1e-3, &default_ground(), o);
    CHECK_THROWS_AS(virial_residual(tr, w, q), Error);
  }
}
