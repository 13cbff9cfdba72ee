#include "kgb/regimes.hpp"

#include "kgb/errors.hpp"

#include <cmath>

namespace kgb {

const char* to_string(RegionLabel l) {
  switch (l) {
  case RegionLabel::C0: return "C0";
  case RegionLabel::C1: return "C1";
  case RegionLabel::Region2: return "Region2";
  case RegionLabel::Region3L: return "Region3L";
  case RegionLabel::Region3R: return "Region3R";
  case RegionLabel::Region4: return "Region4";
  case RegionLabel::Singular: return "Singular";
  }
  return "?";
}

const char* to_string(WaveType t) {
  switch (t) {
  case WaveType::CSW: return "CSW";
  case WaveType::GSW: return "GSW";
  case WaveType::Periodic: return "Periodic";
  case WaveType::None: return "None";
  }
  return "?";
}

LinearizationParams linearization_params(const ModelCoefficients& c,
                                         double c_s) {
  if (c_s == 0.0)
    throw ValidationError("Degenerate", "c_s must be nonzero");
  const double cs2 = c_s * c_s;
  if (std::abs(cs2 - 1.0) <= 1e-12)
    throw ValidationError("SpeedSingular",
                          "linearization parameters blow up at c_s^2 = 1");
  LinearizationParams p;
  p.mu = 1.0 - c.alpha * c.alpha / cs2;
  p.A = p.mu / (1.0 - cs2);
  p.B = p.mu + 1.0 / (1.0 - cs2);
  return p;
}

std::array<std::complex<double>, 4> quartic_roots(double A, double B) {
  // lambda^2 = (B +- sqrt(B^2 - 4A)) / 2
  const std::complex<double> disc =
      std::sqrt(std::complex<double>(B * B - 4.0 * A, 0.0));
  const std::complex<double> s1 = std::sqrt((B + disc) / 2.0);
  const std::complex<double> s2 = std::sqrt((B - disc) / 2.0);
  return {s1, -s1, s2, -s2};
}

std::pair<double, double> z_pm(double alpha) {
  const double a2 = alpha * alpha;
  const double d = std::sqrt(a2 * a2 + 4.0);
  return {(2.0 + a2 - d) / 2.0, (2.0 + a2 + d) / 2.0};
}

RegionLabel classify_by_root_signature(
    const std::array<std::complex<double>, 4>& roots, double B, double tol) {
  double scale = 0.0;
  for (const auto& r : roots)
    scale = std::max(scale, std::abs(r));
  const double eps = tol * std::max(1.0, scale);

  int zero = 0, real = 0, imag = 0, offaxis = 0;
  for (const auto& r : roots) {
    const bool re0 = std::abs(r.real()) <= eps;
    const bool im0 = std::abs(r.imag()) <= eps;
    if (re0 && im0)
      ++zero;
    else if (im0)
      ++real;
    else if (re0)
      ++imag;
    else
      ++offaxis;
  }
  if (offaxis > 0)
    return RegionLabel::Singular; // "region 1" signature; empty for this model
  if (zero == 2 && real == 2)
    return RegionLabel::C0;
  if (zero == 2 && imag == 2)
    return RegionLabel::C1;
  if (real == 4)
    return RegionLabel::Region2;
  if (imag == 4)
    return RegionLabel::Region4;
  if (real == 2 && imag == 2)
    return B > 0.0 ? RegionLabel::Region3R : RegionLabel::Region3L;
  return RegionLabel::Singular;
}

RegionReport classify(const ModelCoefficients& c, double c_s) {
  RegionReport rep;
  rep.alpha = c.alpha;
  rep.c_s = c_s;
  rep.lin = linearization_params(c, c_s); // Degenerate / SpeedSingular
  rep.roots = quartic_roots(rep.lin.A, rep.lin.B);
  std::tie(rep.z_minus, rep.z_plus) = z_pm(c.alpha);
  const double cs2 = c_s * c_s;
  rep.c20 = -c.a_uu / cs2;

  const double mu = rep.lin.mu;
  constexpr double curve_tol = 1e-9; // curves are measure-zero; snap to them

  if (std::abs(mu) <= curve_tol) {
    rep.label = cs2 < 1.0 ? RegionLabel::C0 : RegionLabel::C1;
    rep.predicted = WaveType::None;
  } else if (rep.lin.A < 0.0) {
    rep.label =
        rep.lin.B > 0.0 ? RegionLabel::Region3R : RegionLabel::Region3L;
    if (mu > 0.0) {
      // continuation of the bounded solutions emerging from the A=0, B<0
      // curve: homoclinics to small periodic orbits
      if (std::abs(rep.c20) < 1e-12) {
        rep.predicted = WaveType::None;
        rep.warnings.push_back(
            "quadratic normal-form coefficient c20 vanishes; no GSW "
            "prediction");
      } else {
        rep.predicted = WaveType::GSW;
      }
    } else {
      rep.predicted = WaveType::Periodic;
    }
  } else if (mu > 0.0) { // A > 0, B > 0: alpha^2 < c_s^2 < 1
    rep.label = RegionLabel::Region2;
    rep.predicted = WaveType::CSW;
  } else { // A > 0, B < 0: 1 < c_s^2 < alpha^2
    rep.label = RegionLabel::Region4;
    rep.predicted = WaveType::Periodic;
  }

  if (std::abs(mu) > 0.5)
    rep.warnings.push_back("outside asymptotic regime (|mu| > 0.5); "
                           "prediction is an extrapolation");
  return rep;
}

} // namespace kgb
