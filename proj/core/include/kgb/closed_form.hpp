#pragma once

// Analytic oracles: the special-coefficient exact solitary wave, the KdV
// soliton of the long-wave limit and its corrections, the improved-Boussinesq
// soliton, exponential convolution kernels, and constant fixed points of the
// traveling-wave system.

#include "kgb/model.hpp"
#include "kgb/spectral.hpp"

#include <vector>

namespace kgb {

// u(xi) = A1 sech^2(b xi), v(xi) = A2 sech(b xi) solves the profile system
//   (c_s^2 - alpha^2) u - c_s^2 u'' = a_uu u^2 + a_vv v^2
//   v - (1 - c_s^2) v'' = 2 b_uv u v
// when b^2 = 1/(1-c_s^2), a_uu = 6 (b^2-1) b_uv, A1 = 1/b_uv and
// A2^2 = (c_s^2 - alpha^2 - 4 b^2 c_s^2) / (a_vv b_uv).
struct ExactCswParams {
  ModelCoefficients coeffs; // a_uv = b_uu = b_vv = 0 by construction
  double c_s = 0.0;
  double b = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;

  double u(double xi) const;
  double v(double xi) const;
};

// Errors: SuperSonic (c_s^2 >= 1), ZeroBuv, NegativeRadicand.
ExactCswParams exact_csw_special(double alpha, double c_s, double b_uv,
                                 double a_vv);

// eps^2 (3 c alpha^2 / a_uu) sech^2(|alpha| sqrt(c/2) (eps(x - alpha t) - c eps^3 alpha t)).
// Errors: NonPositiveAuu, NonPositiveC, NonPositiveEps.
double kdv_soliton(double eps, double c, double alpha, double a_uu, double x,
                   double t);

// 2 alpha^2 dT A + dXXX A + a_uu dX(A^2) for a right-travelling profile
// A(X - cT), so dT A = -c dX A. Evaluated spectrally on A's grid.
RealField kdv_residual(const RealField& A, double c, double alpha,
                       double a_uu);

// B1 = b_uu A^2, B2 = (1 - alpha^2) dXX B1 + 2 b_uv A B1.
std::pair<RealField, RealField> kdv_corrections(const RealField& A,
                                                const ModelCoefficients& c,
                                                double alpha);

// Super-luminal solitary wave of the single improved-Boussinesq equation
// (the alpha = 1 case): Q_cs(x) = (c_s^2-1)^{1/(p-1)} Q(sqrt((c_s^2-1)/c_s^2) x),
// Q(r) = ((p+1)/2 sech^2((p-1) r / 2))^{1/(p-1)}; solves
// (c_s^2 - 1) Q - c_s^2 Q'' = Q^p. Errors: SubSonic, BadPower.
double imbq_soliton(int p, double c_s, double x);

// Inverses of the profile operators as convolutions with exponential
// kernels. Normalization is fixed so that convolution with base_u/base_v
// inverts p1/p2 exactly: base_u(x) = e^{-s|x|}/(2 s c_s^2) has continuous
// transform 1/p1(k); scaling by a_gb / b_gb gives the kernel family.
struct KernelPair {
  double alpha = 0.0, c_s = 0.0;
  double s = 0.0; // sqrt(1 - alpha^2/c_s^2)
  double r = 0.0; // 1/sqrt(1 - c_s^2)

  double base_u(double x) const; // e^{-s|x|} / (2 s c_s^2)
  double base_v(double x) const; // e^{-r|x|} / (2 r (1 - c_s^2))
  double symbol_u(double k) const; // 1 / (c_s^2 (s^2 + k^2)), from (s, c_s)
  double symbol_v(double k) const; // 1 / ((1-c_s^2) (r^2 + k^2))
};

// Requires the decaying-kernel regime alpha^2 < c_s^2 < 1. Errors: OutOfRegime.
KernelPair green_kernels(const ModelCoefficients& c, double c_s);

// Constant solutions of the profile system: (c_s^2 - alpha^2) X = f1(X, Y),
// Y = f2(X, Y). residual_direct_* is that system's defect; residual_halved_*
// is the defect of the variant with halved linear terms that appears in the
// positive-operator account (the two disagree by a factor of 2; both are
// reported rather than silently reconciled).
struct ConstantFixedPoint {
  double X = 0.0, Y = 0.0;
  double residual_direct_u = 0.0, residual_direct_v = 0.0;
  double residual_halved_u = 0.0, residual_halved_v = 0.0;
};

std::vector<ConstantFixedPoint>
constant_fixed_points(const ModelCoefficients& c, double c_s);

} // namespace kgb
