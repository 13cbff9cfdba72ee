#pragma once

// Petviashvili iteration in Fourier space for traveling-wave profiles, with
// stabilizing factor, residual control, optional vector extrapolation, and a
// normal-form-shaped initial guess.

#include "kgb/model.hpp"
#include "kgb/regimes.hpp"
#include "kgb/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kgb {

// Diagonal symbols of the profile system per grid wavenumber:
// p1(k) = c_s^2 - alpha^2 + c_s^2 k^2, p2(k) = 1 + (1 - c_s^2) k^2.
struct SymbolMatrix {
  GridPtr grid;
  double c_s = 0.0;
  std::vector<double> p1, p2; // indexed like grid->k
};

// |p1|, |p2| > 1e-10 required on every grid wavenumber; the resonance
// condition p1(k) = 0 (c_s^2 = alpha^2/(1+k^2)) or p2(k) = 0
// (c_s^2 = 1 + 1/k^2) is reported with the offending k.
// Errors: SingularSymbol.
SymbolMatrix assemble_symbols(const ModelCoefficients& c, double c_s,
                              GridPtr grid);

struct TraceEntry {
  int n = 0;
  double M = 0.0;      // stabilizing factor
  double res = 0.0;    // spectral residual norm
  double change = 0.0; // sup |profile_n - profile_{n-1}|
};

enum class SolveStatus { Converged, Stagnated, MaxIterations };

struct WaveProfile {
  GridPtr grid;
  RealField u, v;
  double c_s = 0.0;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  double final_res = 0.0;
  std::vector<TraceEntry> trace;
  RegionReport classified;
  // sup of |v| over the outer quarter of the domain; the GSW signature is a
  // non-decaying ripple there, which the periodic iteration cannot remove
  double ripple_sup = 0.0;
  std::vector<std::string> warnings;
};

enum class GuessKind { CswNormalForm, Custom };

// CswNormalForm: u0 = A_u sech^2(sqrt(mu) x / 2), A_u = 3 (c_s^2 - alpha^2) /
// (2 a_uu); v0 = b_uu u0^2 (the leading long-wave correction shape).
// Errors: ZeroAuu, NonPositiveMu.
std::pair<RealField, RealField> initial_guess(GuessKind kind,
                                              const ModelCoefficients& c,
                                              double c_s, GridPtr grid);

// Spectral residual norm: the discrete L2 norm (Parseval weighting) of
// S(k)(u-hat, v-hat) - (f1-hat, f2-hat); coincides with the real-space
// residual's l2 norm up to round-off.
double residual(const RealField& u, const RealField& v, const SymbolMatrix& S,
                const ModelCoefficients& c);

// One update u-hat <- M^2 p1^{-1} f1-hat (same for v). M is the ratio of the
// real parts of the Hermitian products <S U-hat, U-hat> and <F-hat, U-hat>
// over the concatenated 2N spectral coefficients; real parts keep M real.
// Errors: DegenerateStabilizer (|denominator| <= 1e-14).
struct StepResult {
  RealField u, v;
  double M = 0.0;
  double res = 0.0; // residual of the *input* profile
};
StepResult petviashvili_step(const RealField& u, const RealField& v,
                             const SymbolMatrix& S,
                             const ModelCoefficients& c);

// Minimal-polynomial extrapolation over a window of iterates (flattened
// (u, v) vectors); exact on geometric sequences. Falls back to the last
// iterate when the difference matrix is rank-deficient or the extrapolation
// weights degenerate.
std::pair<RealField, RealField>
extrapolate_cycle(const std::vector<std::pair<RealField, RealField>>& iterates);

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 500;
  bool extrapolate = false;
  int extrapolation_window = 5;
  std::optional<std::pair<RealField, RealField>> custom_guess;
  // Stagnation: relative RES drop < stagnation_rtol over stagnation_span
  // consecutive iterations while still above tol.
  double stagnation_rtol = 1e-3;
  int stagnation_span = 20;
};

// Iterate to RES < tol, stagnation, or max_iter. Diverged when RES exceeds
// 1e6 times its running minimum or turns non-finite.
// Errors: SingularSymbol, Diverged, DegenerateStabilizer.
WaveProfile solve_wave(const ModelCoefficients& c, double c_s, GridPtr grid,
                       const SolveOptions& opt = {});

} // namespace kgb
