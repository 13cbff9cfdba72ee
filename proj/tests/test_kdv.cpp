#include <doctest.h>

#include "kgb/closed_form.hpp"
#include "kgb/errors.hpp"
#include "kgb/kdv.hpp"

#include <cmath>

using namespace kgb;

TEST_CASE("long-wave initial data") {
  const double eps = 0.05, c = 0.8, alpha = 1.0, a_uu = 1.0;
  auto g = build_grid(40.0 / eps, 8192); // eps * L = 40 exactly
  auto d = build_initial_data(eps, c, alpha, a_uu, g);

  CHECK(norms(d.u0).sup == doctest::Approx(0.006).epsilon(1e-12));
  CHECK(norms(d.v0).sup == 0.0);
  CHECK(norms(d.v1).sup == 0.0);
  CHECK(std::abs(mean(d.u1)) < 1e-15);

  // u1 is the exact traveling-frame time derivative: compare against a
  // centered difference of the closed form in t
  const double delta = 1e-6;
  double sup = 0.0;
  for (int j = 0; j < g->N; j += 17) {
    const double x = g->x[j];
    const double fd = (kdv_soliton(eps, c, alpha, a_uu, x, delta) -
                       kdv_soliton(eps, c, alpha, a_uu, x, -delta)) /
                      (2 * delta);
    sup = std::max(sup, std::abs(d.u1.v[j] - fd));
  }
  CHECK(sup < 1e-9);

  auto gshort = build_grid(100.0, 1024);
  CHECK_THROWS_WITH_AS(build_initial_data(eps, c, alpha, a_uu, gshort),
                       doctest::Contains("GridTooShort"), ValidationError);
}

TEST_CASE("error measurement at t = 0 vanishes against the datum") {
  const double eps = 0.1, c = 0.8, alpha = 1.0, a_uu = 1.0;
  auto g = build_grid(400.0, 2048);
  auto d = build_initial_data(eps, c, alpha, a_uu, g);

  EvolutionState s;
  s.grid = g;
  s.u = d.u0;
  s.w = make_field(g);
  s.v = d.v0;
  s.z = d.v1;
  s.t = 0.0;
  auto rows = measure_error({s}, eps, c, alpha, a_uu);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].epsilon == eps);
  CHECK(rows[0].t == 0.0);
  CHECK(rows[0].sup_error_u < 1e-14);
  CHECK(rows[0].sup_error_v == 0.0);

  // a deliberately translated state shows up as an O(amplitude) error
  EvolutionState shifted = s;
  shifted.t = 30.0; // reference moved, field did not
  auto rows2 = measure_error({shifted}, eps, c, alpha, a_uu);
  CHECK(rows2[0].sup_error_u > 1e-3);
}

TEST_CASE("reference center wraps around the periodic domain") {
  const double eps = 0.1, c = 0.8, alpha = 1.0, a_uu = 1.0;
  auto g = build_grid(400.0, 2048);
  auto d = build_initial_data(eps, c, alpha, a_uu, g);

  // after one full period 2L/speed the soliton returns to its datum
  const double speed = alpha * (1.0 + c * eps * eps);
  EvolutionState s;
  s.grid = g;
  s.u = d.u0;
  s.w = make_field(g);
  s.v = d.v0;
  s.z = d.v1;
  s.t = 2.0 * g->L / speed;
  auto rows = measure_error({s}, eps, c, alpha, a_uu);
  CHECK(rows[0].sup_error_u < 1e-13);
}

TEST_CASE("exponent fit recovers synthetic power laws") {
  auto rows_for = [](double expnt, double coef) {
    std::vector<KdvErrorRow> rows;
    for (double eps : {0.1, 0.075, 0.05}) {
      for (double t : {10.0, 50.0, 100.0}) {
        KdvErrorRow r;
        r.epsilon = eps;
        r.t = t;
        // max over t attained at t = 100
        r.sup_error_u = coef * std::pow(eps, expnt) * (0.5 + 0.005 * t);
        r.sup_error_v = 0.0;
        rows.push_back(r);
      }
    }
    return rows;
  };

  auto fit35 = fit_exponent(rows_for(3.5, 2.0));
  CHECK(fit35.slope == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(fit35.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit35.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-10));

  auto fit2 = fit_exponent(rows_for(2.0, 0.7));
  CHECK(fit2.slope == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<KdvErrorRow> single;
  KdvErrorRow r;
  r.epsilon = 0.1;
  r.sup_error_u = 1e-3;
  single.push_back(r);
  CHECK_THROWS_WITH_AS(fit_exponent(single), doctest::Contains("TooFewGroups"),
                       ValidationError);
}
