#include <doctest.h>

#include "kgb/errors.hpp"
#include "kgb/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace kgb;

namespace {

ModelCoefficients quad(double a_uu) {
  ModelCoefficients c;
  c.alpha = 1.0; // overwritten per test
  c.a_uu = a_uu;
  c.b_uv = 1.0;
  return c;
}

} // namespace

TEST_CASE("linearization parameters at reference speeds") {
  ModelCoefficients c = quad(1.0);
  c.alpha = 0.6;
  auto p = linearization_params(c, 0.8);
  CHECK(p.mu == doctest::Approx(0.4375).epsilon(1e-15));
  CHECK(p.A == doctest::Approx(1.2152777777777778).epsilon(1e-14));
  CHECK(p.B == doctest::Approx(3.2152777777777778).epsilon(1e-14));

  c.alpha = 1.12;
  auto q = linearization_params(c, 1.4);
  CHECK(q.mu == doctest::Approx(0.36).epsilon(1e-13));
  CHECK(q.A == doctest::Approx(-0.375).epsilon(1e-13));
  CHECK(q.B == doctest::Approx(-0.68166666666666667).epsilon(1e-13));

  c.alpha = 1.2;
  auto r = linearization_params(c, 1.1);
  CHECK(r.mu == doctest::Approx(-0.19008264462809917).epsilon(1e-13));
  CHECK(r.A == doctest::Approx(0.90515545060999607).epsilon(1e-13));
  CHECK(r.B == doctest::Approx(-4.9519874065328611).epsilon(1e-13));

  CHECK_THROWS_WITH_AS(linearization_params(c, 1.0),
                       doctest::Contains("SpeedSingular"), ValidationError);
  CHECK_THROWS_WITH_AS(linearization_params(c, -1.0),
                       doctest::Contains("SpeedSingular"), ValidationError);
  CHECK_THROWS_WITH_AS(linearization_params(c, 0.0),
                       doctest::Contains("Degenerate"), ValidationError);
}

TEST_CASE("quartic roots on factorable cases") {
  // lambda^4 - 5 lambda^2 + 4 = 0 -> {+-1, +-2}
  auto r = quartic_roots(4.0, 5.0);
  std::vector<double> re;
  for (auto z : r) {
    CHECK(std::abs(z.imag()) < 1e-14);
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(re[1] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(re[2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(re[3] == doctest::Approx(2.0).epsilon(1e-14));

  // lambda^4 + lambda^2 = 0 -> {0, 0, +-i}
  auto s = quartic_roots(0.0, -1.0);
  int zeros = 0, imags = 0;
  for (auto z : s) {
    if (std::abs(z) < 1e-14)
      ++zeros;
    else if (std::abs(z.real()) < 1e-14 &&
             std::abs(std::abs(z.imag()) - 1.0) < 1e-14)
      ++imags;
  }
  CHECK(zeros == 2);
  CHECK(imags == 2);
}

TEST_CASE("quartic roots satisfy Vieta on random coefficients") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    double A = d(rng), B = d(rng);
    auto r = quartic_roots(A, B);
    std::complex<double> sum2 = 0.0, prod = 1.0;
    for (auto z : r) {
      prod *= z;
      sum2 += z * z;
    }
    // sum of squares = 2B (each lambda^2 root of the quadratic, twice);
    // product of the four roots = A.
    CHECK(std::abs(sum2 - 2.0 * B) < 1e-10 * (1 + std::abs(B)));
    CHECK(std::abs(prod - A) < 1e-10 * (1 + std::abs(A)));
    // residual of the defining quartic at each root
    for (auto z : r) {
      auto z2 = z * z;
      CHECK(std::abs(z2 * z2 - B * z2 + A) < 1e-9 * (1 + std::abs(A) + std::abs(B)));
    }
  }
}

TEST_CASE("discriminant of the quadratic in lambda^2 is never negative") {
  // B^2 - 4A = (mu - 1/(1-c_s^2))^2 identically, so off-axis quartic roots
  // cannot occur for any admissible (alpha, c_s).
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> da(0.05, 3.0);
  std::uniform_real_distribution<double> dc(0.05, 3.0);
  ModelCoefficients c = quad(1.0);
  for (int i = 0; i < 100000; ++i) {
    double alpha = da(rng), cs = dc(rng);
    if (std::abs(cs * cs - 1.0) < 1e-6)
      continue;
    c.alpha = alpha;
    auto p = linearization_params(c, cs);
    double disc = p.B * p.B - 4 * p.A;
    double ident = p.mu - 1.0 / (1.0 - cs * cs);
    CHECK(disc >= -1e-12 * (1 + p.B * p.B));
    CHECK(disc == doctest::Approx(ident * ident)
                      .epsilon(1e-9)); // algebraic identity
  }
}

TEST_CASE("z_pm thresholds") {
  auto [zm, zp] = z_pm(1.0);
  CHECK(zm == doctest::Approx(0.38196601125010515).epsilon(1e-15));
  CHECK(zp == doctest::Approx(2.6180339887498948).epsilon(1e-15));
  // golden-ratio identities at alpha=1: z- z+ = 1, z- + z+ = 3
  CHECK(zm * zp == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(zm + zp == doctest::Approx(3.0).epsilon(1e-14));
  // ordering z- < min(1, alpha^2) <= max(1, alpha^2) < z+ for a range
  for (double a : {0.3, 0.7, 1.0, 1.5, 2.5}) {
    auto [m, pz] = z_pm(a);
    CHECK(m < std::min(1.0, a * a));
    CHECK(pz > std::max(1.0, a * a));
    CHECK(m > 0.0);
  }
}

TEST_CASE("classification at reference points") {
  ModelCoefficients c = quad(1.0);

  c.alpha = 0.6;
  auto r2 = classify(c, 0.8);
  CHECK(r2.label == RegionLabel::Region2);
  CHECK(r2.predicted == WaveType::CSW);
  CHECK(classify_by_root_signature(r2.roots, r2.lin.B) == RegionLabel::Region2);

  c.alpha = 1.12;
  auto r3 = classify(c, 1.4);
  CHECK(r3.label == RegionLabel::Region3L);
  CHECK(r3.predicted == WaveType::GSW);
  CHECK(classify_by_root_signature(r3.roots, r3.lin.B) ==
        RegionLabel::Region3L);

  // same region but with a_uu = 0: the GSW prediction must be withheld
  ModelCoefficients c0 = quad(0.0);
  c0.a_vv = 1.0;
  c0.alpha = 1.12;
  auto r3z = classify(c0, 1.4);
  CHECK(r3z.label == RegionLabel::Region3L);
  CHECK(r3z.predicted == WaveType::None);
  CHECK(!r3z.warnings.empty());

  c.alpha = 1.2;
  auto r4 = classify(c, 1.1);
  CHECK(r4.label == RegionLabel::Region4);
  CHECK(r4.predicted == WaveType::Periodic);
  CHECK(classify_by_root_signature(r4.roots, r4.lin.B) == RegionLabel::Region4);

  // Region 3 with mu < 0 (c_s^2 < 1 < alpha^2 side): periodic prediction
  c.alpha = 1.5;
  auto r3m = classify(c, 0.9);
  CHECK(r3m.lin.mu < 0.0);
  CHECK(r3m.lin.A < 0.0);
  CHECK((r3m.label == RegionLabel::Region3L ||
         r3m.label == RegionLabel::Region3R));
  CHECK(r3m.predicted == WaveType::Periodic);

  // curves: mu = 0 at c_s = +-alpha
  c.alpha = 0.6;
  auto cc0 = classify(c, 0.6);
  CHECK(cc0.label == RegionLabel::C0);
  CHECK(cc0.predicted == WaveType::None);
  c.alpha = 1.3;
  auto cc1 = classify(c, 1.3);
  CHECK(cc1.label == RegionLabel::C1);
  CHECK(cc1.predicted == WaveType::None);

  // far-from-curve warning
  c.alpha = 0.2;
  auto far = classify(c, 0.95);
  bool warned = false;
  for (auto& w : far.warnings)
    warned = warned || w.find("asymptotic") != std::string::npos;
  CHECK(warned);

  CHECK_THROWS_WITH_AS(classify(c, 1.0), doctest::Contains("SpeedSingular"),
                       ValidationError);
  CHECK_THROWS_WITH_AS(classify(c, 0.0), doctest::Contains("Degenerate"),
                       ValidationError);
}

TEST_CASE("C1 curve roots are 0,0,+-i/sqrt(alpha^2-1)") {
  ModelCoefficients c = quad(1.0);
  c.alpha = 1.3;
  auto rep = classify(c, 1.3); // mu = 0, c_s^2 = 1.69 > 1
  const double expect = 1.0 / std::sqrt(1.3 * 1.3 - 1.0);
  int zeros = 0, imags = 0;
  for (auto z : rep.roots) {
    if (std::abs(z) < 1e-12)
      ++zeros;
    else if (std::abs(z.real()) < 1e-12) {
      ++imags;
      CHECK(std::abs(z.imag()) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  CHECK(zeros == 2);
  CHECK(imags == 2);
  CHECK(classify_by_root_signature(rep.roots, rep.lin.B) == RegionLabel::C1);
}

TEST_CASE("signature classifier agrees with region logic on a random sweep") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> d(0.1, 2.5);
  ModelCoefficients c = quad(1.0);
  for (int i = 0; i < 100000; ++i) {
    double alpha = d(rng), cs = d(rng);
    if (std::abs(cs * cs - 1.0) < 1e-3 || std::abs(cs - alpha) < 1e-3)
      continue; // skip near-curve/near-singular points; tested separately
    c.alpha = alpha;
    auto rep = classify(c, cs);
    auto sig = classify_by_root_signature(rep.roots, rep.lin.B);
    CHECK(sig == rep.label);
    // no admissible point may produce the four-off-axis-roots signature
    CHECK(sig != RegionLabel::Singular);
  }
}

TEST_CASE("z_pm are exactly the sign changes of B in c_s^2") {
  // B vanishes at c_s^2 = z_pm(alpha): crossing z- (below 1) or z+ (above
  // max(1, alpha^2)) flips Region3L <-> Region3R.
  ModelCoefficients c = quad(1.0);
  c.alpha = 1.4; // alpha^2 = 1.96, so Region2 is empty and c_s^2 < 1 is all A<0
  auto [zm, zp] = z_pm(1.4);
  auto label_at = [&](double cs2) {
    return classify(c, std::sqrt(cs2)).label;
  };
  CHECK(label_at(0.5 * (1.0 + 1.96)) == RegionLabel::Region4);
  CHECK(label_at(0.5 * zm) == RegionLabel::Region3L);  // t < z-: B < 0
  CHECK(label_at(zm * 1.02) == RegionLabel::Region3R); // z- < t < 1: B > 0
  CHECK(label_at(0.5 * (1.96 + zp)) == RegionLabel::Region3L); // B < 0
  CHECK(label_at(zp * 1.02) == RegionLabel::Region3R);         // t > z+
  // B really changes sign across each threshold
  auto B_at = [&](double cs2) {
    return linearization_params(c, std::sqrt(cs2)).B;
  };
  CHECK(B_at(zm * 0.98) < 0.0);
  CHECK(B_at(zm * 1.02) > 0.0);
  CHECK(B_at(zp * 0.98) < 0.0);
  CHECK(B_at(zp * 1.02) > 0.0);
}
