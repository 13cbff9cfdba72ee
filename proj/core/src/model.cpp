#include "kgb/model.hpp"

#include "kgb/errors.hpp"

#include <cmath>
#include <string>

namespace kgb {

void ModelCoefficients::validate() const {
  if (alpha == 0.0)
    throw ValidationError("ZeroAlpha", "alpha must be nonzero");
  if (a_uu == 0.0 && a_uv == 0.0 && a_vv == 0.0 && b_uu == 0.0 &&
      b_uv == 0.0 && b_vv == 0.0)
    throw ValidationError("AllQuadraticZero",
                          "at least one quadratic coefficient must be nonzero");
}

std::optional<HamiltonianStructure>
hamiltonian_structure(const ModelCoefficients& c, double tol) {
  if (std::abs(c.b_uu + c.a_uv) > tol || std::abs(c.b_uv + c.a_vv) > tol)
    return std::nullopt;
  return HamiltonianStructure{c.b_uu, c.b_uv};
}

HamiltonianStructure require_hamiltonian(const ModelCoefficients& c,
                                         double tol) {
  auto H = hamiltonian_structure(c, tol);
  if (!H)
    throw ValidationError("NotHamiltonian",
                          "need b_uu = -a_uv and b_uv = -a_vv; E is not "
                          "guaranteed conserved otherwise");
  return *H;
}

std::pair<RealField, RealField>
eval_nonlinearities(const ModelCoefficients& c, const RealField& u,
                    const RealField& v) {
  if (!same_grid(u, v))
    throw ValidationError("GridMismatch", "u and v must share one grid");
  RealField f1 = make_field(u.grid), f2 = make_field(u.grid);
  for (size_t j = 0; j < u.v.size(); ++j) {
    const double uj = u.v[j], vj = v.v[j];
    f1.v[j] = c.a_uu * uj * uj + 2.0 * c.a_uv * uj * vj + c.a_vv * vj * vj;
    f2.v[j] = c.b_uu * uj * uj + 2.0 * c.b_uv * uj * vj + c.b_vv * vj * vj;
  }
  return {std::move(f1), std::move(f2)};
}

namespace {

double cubic_potential_integral(const ModelCoefficients& c,
                                const HamiltonianStructure& H,
                                const RealField& u, const RealField& v) {
  // FF = -(a_uu/3) u^3 + (b_vv/3) v^3 + B u^2 v + C u v^2
  double s = 0.0;
  for (size_t j = 0; j < u.v.size(); ++j) {
    const double uj = u.v[j], vj = v.v[j];
    s += -(c.a_uu / 3.0) * uj * uj * uj + (c.b_vv / 3.0) * vj * vj * vj +
         H.B_ham * uj * uj * vj + H.C_ham * uj * vj * vj;
  }
  return u.grid->h * s;
}

} // namespace

double energy(const ModelCoefficients& c, const HamiltonianStructure& H,
              const EvolutionState& s) {
  RealField wx = derivative(s.w, 1);
  RealField vx = derivative(s.v, 1);
  double quad = 0.0;
  for (size_t j = 0; j < s.u.v.size(); ++j) {
    const double uj = s.u.v[j], wj = s.w.v[j], vj = s.v.v[j], zj = s.z.v[j];
    quad += c.alpha * c.alpha * uj * uj + wj * wj + wx.v[j] * wx.v[j] +
            vj * vj + vx.v[j] * vx.v[j] + zj * zj;
  }
  return 0.5 * s.grid->h * quad - cubic_potential_integral(c, H, s.u, s.v);
}

double momentum(const EvolutionState& s) {
  RealField ux = derivative(s.u, 1);
  RealField wx = derivative(s.w, 1);
  RealField vx = derivative(s.v, 1);
  double f = 0.0;
  for (size_t j = 0; j < s.u.v.size(); ++j)
    f += s.u.v[j] * s.w.v[j] + ux.v[j] * wx.v[j] + vx.v[j] * s.z.v[j];
  return s.grid->h * f;
}

double k0_constant(const ModelCoefficients& c, const HamiltonianStructure& H) {
  if (H.B_ham != 0.0)
    throw ValidationError("BNonZero",
                          "K0 closed form covers only B = 0 (got B = " +
                              std::to_string(H.B_ham) + ")");
  return std::pow(5.0, -0.75) * std::sqrt(6.0) * std::abs(c.b_vv) +
         std::pow(2.0, -0.25) * std::sqrt(std::abs(H.C_ham));
}

GbThreshold lemma_gb_threshold(double C1, double C2, double s) {
  if (!(s > 1.0))
    throw ValidationError("BadExponent", "lemma needs s > 1");
  if (!(C2 > 0.0) || C1 < 0.0)
    throw ValidationError("BadConstants", "lemma needs C1 >= 0, C2 > 0");
  GbThreshold t;
  t.A = std::pow(s * C2, 1.0 / (1.0 - s));
  t.admissible = C1 < (s - 1.0) / s * t.A;
  return t;
}

GlobalExistenceReport global_existence_predicate(
    const ModelCoefficients& c, const HamiltonianStructure& H,
    const RealField& u0, const RealField& u1, const RealField& v0,
    const RealField& v1) {
  if (c.a_uu != 0.0)
    throw ValidationError("AuuNonZero",
                          "global existence criterion requires a_uu = 0");
  GlobalExistenceReport r;
  r.k0 = k0_constant(c, H); // throws BNonZero when B != 0

  EvolutionState s0;
  s0.grid = u0.grid;
  s0.u = u0;
  s0.w = antiderivative_zero_mean(u1); // throws NonZeroMean
  s0.v = v0;
  s0.z = v1;
  r.energy0 = energy(c, H, s0);

  const Norms nu0 = norms(u0), nu1 = norms(u1), nv0 = norms(v0),
              nv1 = norms(v1);
  const Norms nv0x = norms(derivative(v0, 1));
  r.norm_sum = nu1.l2 * nu1.l2 + c.alpha * c.alpha * nu0.l2 * nu0.l2 +
               nv0.l2 * nv0.l2 + nv1.l2 * nv1.l2 + nv0x.l2 * nv0x.l2;

  r.energy_bound = std::pow(r.k0, -6.0) / 6.0;
  r.norm_bound = std::pow(r.k0, -3.0);
  // Composing the lemma with y <= 2E(0) + (2/3) K0 y^{3/2} gives the
  // K0^{-2} bound instead; both are reported, neither is silently chosen.
  r.energy_bound_alt = std::pow(r.k0, -2.0) / 6.0;

  r.satisfied = r.energy0 < r.energy_bound && r.norm_sum < r.norm_bound;
  return r;
}

BlowupVerdict blowup_predicate(const ModelCoefficients& c,
                               const HamiltonianStructure& H,
                               const RealField& u0, const RealField& u1,
                               const RealField& v0, const RealField& v1) {
  if (std::abs(mean(u0)) > 1e-10)
    throw ValidationError("NonZeroMean", "blow-up criterion needs mean-zero u0");

  EvolutionState s0;
  s0.grid = u0.grid;
  s0.u = u0;
  s0.w = antiderivative_zero_mean(u1); // throws NonZeroMean on u1
  s0.v = v0;
  s0.z = v1;

  BlowupVerdict verdict;
  verdict.energy0 = energy(c, H, s0);
  if (verdict.energy0 < 0.0) {
    verdict.which = BlowupCase::NegativeEnergy;
    return verdict;
  }

  const RealField du0 = antiderivative_zero_mean(u0);
  const RealField du1 = s0.w;
  const double num = inner_product(du0, du1) + inner_product(u0, u1) +
                     inner_product(v0, v1);
  const double den =
      std::sqrt(inner_product(du0, du0) + inner_product(u0, u0) +
                inner_product(v0, v0));
  verdict.condition_lhs = std::sqrt(2.0 * verdict.energy0);
  verdict.condition_rhs = (den > 0.0) ? num / den : 0.0;
  if (den > 0.0 && verdict.condition_lhs < verdict.condition_rhs)
    verdict.which = BlowupCase::PositiveEnergyCondition;
  return verdict;
}

} // namespace kgb
