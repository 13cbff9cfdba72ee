#include "kgb/closed_form.hpp"

#include "kgb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kgb {

namespace {
double sech(double x) { return 1.0 / std::cosh(x); }
} // namespace

double ExactCswParams::u(double xi) const {
  const double s = sech(b * xi);
  return A1 * s * s;
}

double ExactCswParams::v(double xi) const { return A2 * sech(b * xi); }

ExactCswParams exact_csw_special(double alpha, double c_s, double b_uv,
                                 double a_vv) {
  const double cs2 = c_s * c_s;
  if (cs2 >= 1.0)
    throw ValidationError("SuperSonic",
                          "closed-form wave needs c_s^2 < 1, got " +
                              std::to_string(cs2));
  if (b_uv == 0.0)
    throw ValidationError("ZeroBuv", "closed-form wave needs b_uv != 0");

  ExactCswParams p;
  p.c_s = c_s;
  const double b2 = 1.0 / (1.0 - cs2);
  p.b = std::sqrt(b2);
  p.A1 = 1.0 / b_uv;
  const double radicand =
      (cs2 - alpha * alpha - 4.0 * b2 * cs2) / (a_vv * b_uv);
  if (radicand <= 0.0)
    throw ValidationError("NegativeRadicand",
                          "closed-form v-amplitude needs (c_s^2 - alpha^2 - "
                          "4 b^2 c_s^2)/(a_vv b_uv) > 0, got " +
                              std::to_string(radicand));
  p.A2 = std::sqrt(radicand);

  p.coeffs.alpha = alpha;
  p.coeffs.a_uu = 6.0 * (b2 - 1.0) * b_uv;
  p.coeffs.a_uv = 0.0;
  p.coeffs.a_vv = a_vv;
  p.coeffs.b_uu = 0.0;
  p.coeffs.b_uv = b_uv;
  p.coeffs.b_vv = 0.0;
  return p;
}

double kdv_soliton(double eps, double c, double alpha, double a_uu, double x,
                   double t) {
  if (!(a_uu > 0.0))
    throw ValidationError("NonPositiveAuu", "soliton needs a_uu > 0");
  if (!(c > 0.0))
    throw ValidationError("NonPositiveC", "soliton needs c > 0");
  if (!(eps > 0.0))
    throw ValidationError("NonPositiveEps", "soliton needs eps > 0");
  const double amp = 3.0 * c * alpha * alpha / a_uu;
  const double arg = std::abs(alpha) * std::sqrt(c / 2.0) *
                     (eps * (x - alpha * t) - c * eps * eps * eps * alpha * t);
  const double s = sech(arg);
  return eps * eps * amp * s * s;
}

RealField kdv_residual(const RealField& A, double c, double alpha,
                       double a_uu) {
  // traveling profile: dT A = -c dX A
  RealField Ax = derivative(A, 1);
  RealField Axxx = derivative(A, 3);
  RealField A2 = make_field(A.grid);
  for (size_t j = 0; j < A.v.size(); ++j)
    A2.v[j] = A.v[j] * A.v[j];
  RealField A2x = derivative(A2, 1);

  RealField res = make_field(A.grid);
  const double two_a2 = 2.0 * alpha * alpha;
  for (size_t j = 0; j < res.v.size(); ++j)
    res.v[j] = two_a2 * (-c * Ax.v[j]) + Axxx.v[j] + a_uu * A2x.v[j];
  return res;
}

std::pair<RealField, RealField> kdv_corrections(const RealField& A,
                                                const ModelCoefficients& c,
                                                double alpha) {
  RealField B1 = make_field(A.grid);
  for (size_t j = 0; j < A.v.size(); ++j)
    B1.v[j] = c.b_uu * A.v[j] * A.v[j];
  RealField B1xx = derivative(B1, 2);
  RealField B2 = make_field(A.grid);
  const double one_m_a2 = 1.0 - alpha * alpha;
  for (size_t j = 0; j < A.v.size(); ++j)
    B2.v[j] = one_m_a2 * B1xx.v[j] + 2.0 * c.b_uv * A.v[j] * B1.v[j];
  return {std::move(B1), std::move(B2)};
}

double imbq_soliton(int p, double c_s, double x) {
  if (p < 2)
    throw ValidationError("BadPower", "nonlinearity power must be >= 2");
  const double cs2 = c_s * c_s;
  if (cs2 <= 1.0)
    throw ValidationError("SubSonic",
                          "solitary wave needs |c_s| > 1, got c_s^2 = " +
                              std::to_string(cs2));
  const double pm1 = p - 1;
  const double r = std::sqrt((cs2 - 1.0) / cs2) * x;
  const double core = 0.5 * (p + 1) * std::pow(sech(0.5 * pm1 * r), 2.0);
  return std::pow(cs2 - 1.0, 1.0 / pm1) * std::pow(core, 1.0 / pm1);
}

double KernelPair::base_u(double x) const {
  return std::exp(-s * std::abs(x)) / (2.0 * s * c_s * c_s);
}

double KernelPair::base_v(double x) const {
  return std::exp(-r * std::abs(x)) / (2.0 * r * (1.0 - c_s * c_s));
}

double KernelPair::symbol_u(double k) const {
  return 1.0 / (c_s * c_s * (s * s + k * k));
}

double KernelPair::symbol_v(double k) const {
  return 1.0 / ((1.0 - c_s * c_s) * (r * r + k * k));
}

KernelPair green_kernels(const ModelCoefficients& c, double c_s) {
  const double cs2 = c_s * c_s;
  const double a2 = c.alpha * c.alpha;
  if (!(a2 < cs2 && cs2 < 1.0))
    throw ValidationError("OutOfRegime",
                          "decaying kernels need alpha^2 < c_s^2 < 1");
  KernelPair kp;
  kp.alpha = c.alpha;
  kp.c_s = c_s;
  kp.s = std::sqrt(1.0 - a2 / cs2);
  kp.r = 1.0 / std::sqrt(1.0 - cs2);
  return kp;
}

namespace {

struct Pair2 {
  double f1, f2;
};

Pair2 fixed_point_lhs(const ModelCoefficients& c, double X, double Y) {
  return {c.a_uu * X * X + 2.0 * c.a_uv * X * Y + c.a_vv * Y * Y,
          c.b_uu * X * X + 2.0 * c.b_uv * X * Y + c.b_vv * Y * Y};
}

} // namespace

std::vector<ConstantFixedPoint>
constant_fixed_points(const ModelCoefficients& c, double c_s) {
  const double cs2 = c_s * c_s;
  const double lam = cs2 - c.alpha * c.alpha; // linear factor of the u-part

  // residuals of (c_s^2 - alpha^2) X = f1, Y = f2
  auto direct_res = [&](double X, double Y) {
    Pair2 f = fixed_point_lhs(c, X, Y);
    return Pair2{f.f1 - lam * X, f.f2 - Y};
  };

  // damped Newton on the direct system from a coarse grid of starts
  auto refine = [&](double X, double Y, bool& ok) {
    ok = false;
    for (int it = 0; it < 80; ++it) {
      Pair2 r = direct_res(X, Y);
      const double n0 = std::abs(r.f1) + std::abs(r.f2);
      if (n0 < 1e-13) {
        ok = true;
        return std::make_pair(X, Y);
      }
      // Jacobian of the residual
      const double j11 = 2.0 * c.a_uu * X + 2.0 * c.a_uv * Y - lam;
      const double j12 = 2.0 * c.a_uv * X + 2.0 * c.a_vv * Y;
      const double j21 = 2.0 * c.b_uu * X + 2.0 * c.b_uv * Y;
      const double j22 = 2.0 * c.b_uv * X + 2.0 * c.b_vv * Y - 1.0;
      const double det = j11 * j22 - j12 * j21;
      if (std::abs(det) < 1e-14)
        return std::make_pair(X, Y);
      double dX = -(r.f1 * j22 - r.f2 * j12) / det;
      double dY = -(j11 * r.f2 - j21 * r.f1) / det;
      double step = 1.0;
      for (int back = 0; back < 30; ++back) {
        Pair2 rn = direct_res(X + step * dX, Y + step * dY);
        if (std::abs(rn.f1) + std::abs(rn.f2) < n0)
          break;
        step *= 0.5;
      }
      X += step * dX;
      Y += step * dY;
    }
    Pair2 r = direct_res(X, Y);
    ok = std::abs(r.f1) + std::abs(r.f2) < 1e-11;
    return std::make_pair(X, Y);
  };

  std::vector<std::pair<double, double>> roots;
  const double span = 2.0 * (std::abs(lam) + 1.0);
  const int G = 13;
  for (int i = 0; i < G; ++i) {
    for (int j = 0; j < G; ++j) {
      const double X0 = -span + 2.0 * span * i / (G - 1);
      const double Y0 = -span + 2.0 * span * j / (G - 1);
      bool ok = false;
      auto [X, Y] = refine(X0, Y0, ok);
      if (!ok)
        continue;
      bool dup = false;
      for (auto& [Xr, Yr] : roots)
        if (std::abs(X - Xr) <= 1e-9 * std::max(1.0, std::abs(Xr)) &&
            std::abs(Y - Yr) <= 1e-9 * std::max(1.0, std::abs(Yr))) {
          dup = true;
          break;
        }
      if (!dup)
        roots.emplace_back(X, Y);
    }
  }

  std::sort(roots.begin(), roots.end());
  std::vector<ConstantFixedPoint> out;
  out.reserve(roots.size());
  for (auto& [X, Y] : roots) {
    ConstantFixedPoint fp;
    fp.X = X;
    fp.Y = Y;
    Pair2 rd = direct_res(X, Y);
    fp.residual_direct_u = rd.f1;
    fp.residual_direct_v = rd.f2;
    Pair2 f = fixed_point_lhs(c, X, Y);
    fp.residual_halved_u = f.f1 - 0.5 * lam * X;
    fp.residual_halved_v = f.f2 - 0.5 * Y;
    out.push_back(fp);
  }
  return out;
}

} // namespace kgb
