#include <doctest.h>

#include "kgb/errors.hpp"
#include "kgb/spectral.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace kgb;

namespace {
double sup_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (size_t j = 0; j < a.v.size(); ++j)
    m = std::max(m, std::abs(a.v[j] - b.v[j]));
  return m;
}
} // namespace

TEST_CASE("grid construction") {
  auto g = build_grid(M_PI, 8);
  CHECK(g->h == doctest::Approx(M_PI / 4).epsilon(1e-15));
  CHECK(g->x[0] == -M_PI);
  CHECK(g->x[7] == doctest::Approx(M_PI - M_PI / 4));
  // wavenumbers are integers on L = pi, FFT bin order
  CHECK(g->k[0] == 0.0);
  CHECK(g->k[1] == doctest::Approx(1.0));
  CHECK(g->k[3] == doctest::Approx(3.0));
  CHECK(g->k[4] == doctest::Approx(-4.0)); // Nyquist
  CHECK(g->k[7] == doctest::Approx(-1.0));

  auto g2 = build_grid(50, 1024);
  CHECK(g2->h == doctest::Approx(0.09765625).epsilon(1e-16));

  CHECK_THROWS_WITH_AS(build_grid(1, 7), doctest::Contains("OddN"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(build_grid(-2, 8), doctest::Contains("NonPositiveL"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(build_grid(1, 4), doctest::Contains("TooFewPoints"),
                       ValidationError);
}

TEST_CASE("round trip is identity") {
  auto g = build_grid(13.7, 128);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(-1, 1);
  RealField f = make_field(g);
  for (auto& a : f.v)
    a = dist(rng);
  RealField back = inverse_fft(g, forward_fft(f));
  CHECK(sup_diff(f, back) < 1e-12 * norms(f).sup);
}

TEST_CASE("identity symbol returns input") {
  auto g = build_grid(5.0, 64);
  RealField f = sample(g, [](double x) { return std::exp(-x * x); });
  RealField same = apply_fourier_symbol(f, [](double) {
    return std::complex<double>(1.0, 0.0);
  });
  CHECK(sup_diff(f, same) < 1e-13);
}

TEST_CASE("spectral derivative of sine") {
  auto g = build_grid(M_PI, 64);
  RealField f = sample(g, [](double x) { return std::sin(x); });
  RealField d =
      apply_fourier_symbol(f, [](double k) { return std::complex<double>(0, k); });
  RealField expect = sample(g, [](double x) { return std::cos(x); });
  CHECK(sup_diff(d, expect) < 1e-12);

  RealField d2 = derivative(f, 2);
  RealField expect2 = sample(g, [](double x) { return -std::sin(x); });
  CHECK(sup_diff(d2, expect2) < 1e-12);
}

TEST_CASE("derivative of constant vanishes") {
  auto g = build_grid(3.0, 32);
  RealField f = sample(g, [](double) { return 4.25; });
  CHECK(norms(derivative(f, 1)).sup < 1e-13);
}

TEST_CASE("fourth derivative matches repeated first derivatives") {
  auto g = build_grid(20.0, 256);
  RealField f = sample(g, [](double x) {
    double s = 1.0 / std::cosh(x);
    return s * s;
  });
  RealField d4 = derivative(f, 4);
  RealField d1111 = derivative(derivative(derivative(derivative(f, 1), 1), 1), 1);
  // agreement is limited by k_max^4 * eps roundoff amplification (~1e-8 here)
  CHECK(sup_diff(d4, d1111) < 1e-7);
}

TEST_CASE("non-conjugate-symmetric symbol is rejected") {
  auto g = build_grid(M_PI, 32);
  RealField f = sample(g, [](double x) { return std::cos(x); });
  CHECK_THROWS_WITH_AS(
      apply_fourier_symbol(f,
                           [](double k) {
                             return k >= 0 ? std::complex<double>(0, 1)
                                           : std::complex<double>(0, -0.5);
                           }),
      doctest::Contains("NonRealOutput"), ValidationError);
}

TEST_CASE("antiderivative inverts derivative on mean-zero fields") {
  auto g = build_grid(M_PI, 64);
  RealField f = sample(g, [](double x) { return std::cos(x); });
  RealField F = antiderivative_zero_mean(f);
  RealField expect = sample(g, [](double x) { return std::sin(x); });
  CHECK(sup_diff(F, expect) < 1e-12);

  CHECK(norms(antiderivative_zero_mean(make_field(g))).sup == 0.0);

  RealField one = sample(g, [](double) { return 1.0; });
  CHECK_THROWS_WITH_AS(antiderivative_zero_mean(one),
                       doctest::Contains("NonZeroMean"), ValidationError);

  // two-sided inverse on a generic mean-zero smooth field
  auto g2 = build_grid(15.0, 256);
  RealField h = sample(g2, [](double x) {
    return std::exp(-x * x / 4) * std::sin(1.3 * x);
  });
  double m = mean(h);
  for (auto& a : h.v)
    a -= m;
  CHECK(sup_diff(antiderivative_zero_mean(derivative(h, 1)), h) < 1e-10);
  CHECK(sup_diff(derivative(antiderivative_zero_mean(h), 1), h) < 1e-10);
}

TEST_CASE("norms") {
  auto g = build_grid(1.0, 16);
  RealField z = make_field(g);
  Norms nz = norms(z);
  CHECK(nz.l2 == 0.0);
  CHECK(nz.sup == 0.0);
  CHECK(nz.h1 == 0.0);

  RealField one = sample(g, [](double) { return 1.0; });
  Norms n1 = norms(one);
  CHECK(n1.l2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(n1.sup == 1.0);

  auto gs = build_grid(M_PI, 64);
  RealField s = sample(gs, [](double x) { return std::sin(x); });
  CHECK(norms(s).l2 == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  // |sin|_H1^2 = pi + pi
  CHECK(norms(s).h1 == doctest::Approx(std::sqrt(2 * M_PI)).epsilon(1e-12));
}

TEST_CASE("integral") {
  auto g = build_grid(4.0, 32);
  CHECK(integral(make_field(g)) == 0.0);
  RealField c = sample(g, [](double) { return -2.5; });
  CHECK(integral(c) == doctest::Approx(-2.5 * 8.0).epsilon(1e-14));

  auto g2 = build_grid(40.0, 1024);
  RealField s2 = sample(g2, [](double x) {
    double s = 1.0 / std::cosh(x);
    return s * s;
  });
  CHECK(integral(s2) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("parseval") {
  auto g = build_grid(7.3, 128);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1, 1);
  RealField f = make_field(g);
  for (auto& a : f.v)
    a = dist(rng);
  double phys = 0.0;
  for (double a : f.v)
    phys += a * a;
  phys *= g->h;
  Spectrum c = forward_fft(f);
  double spec = 0.0;
  for (const auto& z : c)
    spec += std::norm(z);
  spec *= 2.0 * g->L;
  CHECK(phys == doctest::Approx(spec).epsilon(1e-10));
}

TEST_CASE("integral of derivative vanishes") {
  auto g = build_grid(9.0, 128);
  RealField f = sample(g, [](double x) { return std::exp(std::sin(x)); });
  CHECK(std::abs(integral(derivative(f, 1))) < 1e-10);
}

TEST_CASE("dealiasing zeroes the top third") {
  auto g = build_grid(M_PI, 32); // N/3 = 10: keep |m| <= 10
  RealField f = sample(g, [](double x) {
    return std::cos(4.0 * x) + 0.5 * std::cos(12.0 * x);
  });
  RealField d = dealias_two_thirds(f);
  RealField kept = sample(g, [](double x) { return std::cos(4.0 * x); });
  CHECK(sup_diff(d, kept) < 1e-13);
}
