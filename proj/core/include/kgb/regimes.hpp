#pragma once

// Linearization of the traveling-wave system at the origin: the quartic
// lambda^4 - B lambda^2 + A = 0, its root signature, the bifurcation-curve /
// region classification, and the predicted solution type.

#include "kgb/model.hpp"

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace kgb {

enum class RegionLabel { C0, C1, Region2, Region3L, Region3R, Region4, Singular };
enum class WaveType { CSW, GSW, Periodic, None };

const char* to_string(RegionLabel l);
const char* to_string(WaveType t);

struct LinearizationParams {
  double mu = 0.0; // 1 - alpha^2/c_s^2
  double A = 0.0;  // mu / (1 - c_s^2)
  double B = 0.0;  // mu + 1/(1 - c_s^2)
};

// Errors: SpeedSingular (c_s^2 = 1 within 1e-12), Degenerate (c_s = 0).
LinearizationParams linearization_params(const ModelCoefficients& c,
                                         double c_s);

// Roots of lambda^4 - B lambda^2 + A = 0 via the quadratic in lambda^2,
// ordered (+r1, -r1, +r2, -r2).
std::array<std::complex<double>, 4> quartic_roots(double A, double B);

// z_pm(alpha) = ((2 + alpha^2) +- sqrt(alpha^4 + 4)) / 2; the region-3
// speed windows of the classification table are intervals between these.
std::pair<double, double> z_pm(double alpha);

struct RegionReport {
  double alpha = 0.0;
  double c_s = 0.0;
  LinearizationParams lin;
  std::array<std::complex<double>, 4> roots{};
  RegionLabel label = RegionLabel::Singular;
  double z_minus = 0.0, z_plus = 0.0;
  WaveType predicted = WaveType::None;
  double c20 = 0.0; // -a_uu/c_s^2; GSW prediction needs c20 != 0
  std::vector<std::string> warnings;
};

// Curve/region logic: C0 iff mu=0, c_s^2<1; C1 iff mu=0, c_s^2>1 (curve
// membership |mu| <= 1e-9); Region2 iff alpha^2 < c_s^2 < 1; Region4 iff
// 1 < c_s^2 < alpha^2; Region3R/3L by the sign of B when A < 0.
// Predictions: Region2 -> CSW; Region3 with mu>0 -> GSW (withheld when
// |c20| < 1e-12); Region3 with mu<0 and Region4 -> Periodic; curves -> None.
// |mu| > 0.5 is flagged as outside the asymptotic regime.
// Errors: SpeedSingular, Degenerate.
RegionReport classify(const ModelCoefficients& c, double c_s);

// Label from the root signature alone (counts of real / imaginary / zero /
// off-axis roots); used to cross-check classify. Returns Region2, Region3L
// (tie-broken by sign of B, as the signature alone cannot split 3L/3R),
// Region4, C0, C1, or Singular for signatures outside the model's range.
RegionLabel classify_by_root_signature(
    const std::array<std::complex<double>, 4>& roots, double B,
    double tol = 1e-9);

} // namespace kgb
