#pragma once

// Model coefficients, the quadratic nonlinearities f1/f2, the Hamiltonian
// compatibility check, conserved functionals E and F, and the sufficient
// conditions for global existence and for blow-up.

#include "kgb/spectral.hpp"
#include "kgb/state.hpp"

#include <optional>
#include <utility>

namespace kgb {

// u_tt = alpha^2 u_xx + u_ttxx + (f1(u,v))_xx,  v_tt = v_xx - v + f2(u,v)
// f1 = a_uu u^2 + 2 a_uv u v + a_vv v^2,  f2 = b_uu u^2 + 2 b_uv u v + b_vv v^2
struct ModelCoefficients {
  double alpha = 0.0;
  double a_uu = 0.0, a_uv = 0.0, a_vv = 0.0;
  double b_uu = 0.0, b_uv = 0.0, b_vv = 0.0;

  // alpha nonzero, at least one quadratic coefficient nonzero. Enforced at
  // the configuration boundary; library ops take the struct as given.
  void validate() const;
};

// Exists iff b_uu = -a_uv and b_uv = -a_vv (within tol): then the system is
// Hamiltonian with B := b_uu, C := b_uv and E below is conserved.
struct HamiltonianStructure {
  double B_ham = 0.0;
  double C_ham = 0.0;
};

std::optional<HamiltonianStructure>
hamiltonian_structure(const ModelCoefficients& c, double tol = 1e-12);

// Same, throwing NotHamiltonian instead of returning empty.
HamiltonianStructure require_hamiltonian(const ModelCoefficients& c,
                                         double tol = 1e-12);

struct InvariantSnapshot {
  double t = 0.0;
  double E = 0.0;
  double F = 0.0;
};

// Errors: GridMismatch.
std::pair<RealField, RealField> eval_nonlinearities(const ModelCoefficients& c,
                                                    const RealField& u,
                                                    const RealField& v);

// E = 1/2 int(alpha^2 u^2 + w^2 + w_x^2 + v^2 + v_x^2 + z^2) - int(FF),
// FF = -(a_uu/3) u^3 + (b_vv/3) v^3 + B u^2 v + C u v^2.
double energy(const ModelCoefficients& c, const HamiltonianStructure& H,
              const EvolutionState& s);

// F = int(u w + u_x w_x + v_x z).
double momentum(const EvolutionState& s);

// K0 = 5^{-3/4} sqrt(6) |b_vv| + 2^{-1/4} sqrt(|C|); closed form only for
// B = 0. Errors: BNonZero.
double k0_constant(const ModelCoefficients& c, const HamiltonianStructure& H);

// For 0 <= y <= C1 + C2 y^s (s > 1): threshold A = (s C2)^{1/(1-s)},
// admissible iff C1 < ((s-1)/s) A.
struct GbThreshold {
  double A = 0.0;
  bool admissible = false;
};
GbThreshold lemma_gb_threshold(double C1, double C2, double s);

struct GlobalExistenceReport {
  bool satisfied = false;
  double energy0 = 0.0;
  double k0 = 0.0;
  double norm_sum = 0.0;       // |u1|^2 + a^2|u0|^2 + |v0|^2 + |v1|^2 + |(v0)_x|^2
  double energy_bound = 0.0;   // (1/6) K0^{-6}, as stated
  double norm_bound = 0.0;     // K0^{-3}
  double energy_bound_alt = 0.0; // (1/6) K0^{-2}: what the proof's own
                                 // composition gives; reported side by side
                                 // because it disagrees with the stated bound
};

// Sufficient condition for global existence. Requires a_uu = 0 and B = 0
// (the only case with an explicit K0). satisfied iff
// energy0 < energy_bound and norm_sum < norm_bound.
// Errors: AuuNonZero, BNonZero, NonZeroMean (on u1, for the energy).
GlobalExistenceReport global_existence_predicate(
    const ModelCoefficients& c, const HamiltonianStructure& H,
    const RealField& u0, const RealField& u1, const RealField& v0,
    const RealField& v1);

enum class BlowupCase { None, NegativeEnergy, PositiveEnergyCondition };

struct BlowupVerdict {
  BlowupCase which = BlowupCase::None;
  double energy0 = 0.0;
  // Both sides of the E(0) >= 0 criterion
  //   sqrt(2 E(0)) < (<dxinv u0, dxinv u1> + <u0,u1> + <v0,v1>)
  //                  / sqrt(|dxinv u0|^2 + |u0|^2 + |v0|^2)
  double condition_lhs = 0.0;
  double condition_rhs = 0.0;
};

// Sufficient conditions for finite-time blow-up: (i) E(0) < 0, or
// (ii) E(0) >= 0 and the inequality above. Requires mean-zero u0 and u1
// (periodic antiderivative). Errors: NonZeroMean.
BlowupVerdict blowup_predicate(const ModelCoefficients& c,
                               const HamiltonianStructure& H,
                               const RealField& u0, const RealField& u1,
                               const RealField& v0, const RealField& v1);

} // namespace kgb
