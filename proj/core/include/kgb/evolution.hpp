#pragma once

// Method-of-lines integration of the first-order system
//   u_t = w_x, (I - dxx) w_t = (alpha^2 u + f1)_x, v_t = z, z_t = v_xx - v + f2
// with classical RK4, the exact propagator of the linear part, and invariant
// and blow-up monitoring.

#include "kgb/model.hpp"
#include "kgb/spectral.hpp"
#include "kgb/state.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kgb {

// w(0) = antiderivative of u1, so u1 must be mean-zero. Errors: NonZeroMean.
EvolutionState to_first_order(const RealField& u0, const RealField& u1,
                              const RealField& v0, const RealField& v1);

struct StateDerivative {
  RealField du, dw, dv, dz;
};

// Quadratic products are dealiased (2/3 rule) before entering the symbols.
StateDerivative rhs(const EvolutionState& s, const ModelCoefficients& c);

// One classical RK4 step; preserves mean(u) to round-off.
// Errors: NonFinite.
EvolutionState step_rk4(const EvolutionState& s, const ModelCoefficients& c,
                        double dt);

// Exact solution of the linear system (all quadratic terms zero):
// u-hat evolves with frequency |alpha k|/sqrt(1+k^2) (k = 0: u-hat0 + t u-hat1),
// v-hat with sqrt(1+k^2). Returns (u, u_t, v, v_t) at time t.
struct LinearSolution {
  RealField u, ut, v, vt;
};
LinearSolution linear_propagate(const RealField& u0, const RealField& u1,
                                const RealField& v0, const RealField& v1,
                                double alpha, double t);

// I(t) = |dxinv u|^2 + |u|^2 + |v|^2 + beta (t + t0)^2 and I1 = I^{-1/4};
// on a blow-up trajectory I is convex increasing and I1 concave decreasing.
struct BlowupSample {
  double t = 0.0;
  double I = 0.0;
  double I1 = 0.0;
  double dI = 0.0; // centered finite difference, filled a posteriori
};

struct BlowupMonitor {
  double beta = 0.0;
  double t0 = 1.0;
  bool enabled = false; // needs mean-zero u along the trajectory
  std::vector<BlowupSample> series;
};

enum class RunStatus { Completed, BlowupSuspected };

struct EvolveConfig {
  ModelCoefficients coeffs;
  double T = 10.0;
  // dt <= 0 picks the default min(0.5 h / max(1, |alpha|), 1e-2)
  double dt = 0.0;
  int monitor_stride = 10; // steps between snapshots
  std::optional<double> beta; // default max(0, -E(0)) when Hamiltonian, else 0
  double t0 = 1.0;
  double amplitude_limit = 1e8; // sup|fields| beyond this -> BlowupSuspected
  bool keep_snapshots = true;
};

struct EvolveResult {
  RunStatus status = RunStatus::Completed;
  std::string stop_reason;
  EvolutionState final_state;
  std::vector<EvolutionState> snapshots; // at monitor strides (optional)
  std::vector<InvariantSnapshot> invariants; // when Hamiltonian structure exists
  bool hamiltonian = false;
  BlowupMonitor monitor;
  double dt_used = 0.0;
  int steps_taken = 0;
  // sup of |fields| over the outer 10% of the domain at the final time;
  // reported so periodic wrap-around contamination is visible
  double boundary_sup = 0.0;
};

EvolveResult evolve(const EvolutionState& initial, const EvolveConfig& cfg);

} // namespace kgb
