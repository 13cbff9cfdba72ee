#include "kgb/wave_solver.hpp"

#include "kgb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kgb {

SymbolMatrix assemble_symbols(const ModelCoefficients& c, double c_s,
                              GridPtr grid) {
  constexpr double delta = 1e-10;
  SymbolMatrix S;
  S.grid = grid;
  S.c_s = c_s;
  const double cs2 = c_s * c_s, a2 = c.alpha * c.alpha;
  S.p1.resize(grid->k.size());
  S.p2.resize(grid->k.size());
  for (size_t j = 0; j < grid->k.size(); ++j) {
    const double k2 = grid->k[j] * grid->k[j];
    S.p1[j] = cs2 - a2 + cs2 * k2;
    S.p2[j] = 1.0 + (1.0 - cs2) * k2;
    if (std::abs(S.p1[j]) <= delta)
      throw NumericalError("SingularSymbol",
                           "p1 vanishes at wavenumber k = " +
                               std::to_string(grid->k[j]) +
                               " (resonance c_s^2 = alpha^2/(1+k^2))");
    if (std::abs(S.p2[j]) <= delta)
      throw NumericalError("SingularSymbol",
                           "p2 vanishes at wavenumber k = " +
                               std::to_string(grid->k[j]) +
                               " (resonance c_s^2 = 1 + 1/k^2)");
  }
  return S;
}

std::pair<RealField, RealField> initial_guess(GuessKind kind,
                                              const ModelCoefficients& c,
                                              double c_s, GridPtr grid) {
  if (kind == GuessKind::Custom)
    throw ValidationError("CustomGuessMissing",
                          "custom guesses are passed in solver options");
  if (c.a_uu == 0.0)
    throw ValidationError("ZeroAuu",
                          "normal-form guess amplitude needs a_uu != 0");
  const double cs2 = c_s * c_s;
  const double mu = 1.0 - c.alpha * c.alpha / cs2;
  if (!(mu > 0.0))
    throw ValidationError("NonPositiveMu",
                          "normal-form guess needs mu > 0, got " +
                              std::to_string(mu));
  const double A_u = 3.0 * (cs2 - c.alpha * c.alpha) / (2.0 * c.a_uu);
  const double decay = 0.5 * std::sqrt(mu);
  RealField u = sample(grid, [&](double x) {
    const double s = 1.0 / std::cosh(decay * x);
    return A_u * s * s;
  });
  RealField v = make_field(grid);
  for (size_t j = 0; j < v.v.size(); ++j)
    v.v[j] = c.b_uu * u.v[j] * u.v[j];
  return {std::move(u), std::move(v)};
}

namespace {

struct SpectralWork {
  Spectrum uh, vh, f1h, f2h;
};

SpectralWork transform_all(const RealField& u, const RealField& v,
                           const ModelCoefficients& c) {
  auto [f1, f2] = eval_nonlinearities(c, u, v);
  return {forward_fft(u), forward_fft(v), forward_fft(f1), forward_fft(f2)};
}

// discrete L2 norm of the spectral defect; by Parseval this equals the l2
// norm of the real-space profile-equation residual
double residual_from(const SpectralWork& w, const SymbolMatrix& S) {
  double acc = 0.0;
  for (size_t j = 0; j < w.uh.size(); ++j) {
    acc += std::norm(S.p1[j] * w.uh[j] - w.f1h[j]);
    acc += std::norm(S.p2[j] * w.vh[j] - w.f2h[j]);
  }
  return std::sqrt(2.0 * S.grid->L * acc);
}

double stabilizer_from(const SpectralWork& w, const SymbolMatrix& S) {
  double num = 0.0, den = 0.0;
  for (size_t j = 0; j < w.uh.size(); ++j) {
    num += S.p1[j] * std::norm(w.uh[j]) + S.p2[j] * std::norm(w.vh[j]);
    den += (w.f1h[j] * std::conj(w.uh[j])).real() +
           (w.f2h[j] * std::conj(w.vh[j])).real();
  }
  if (std::abs(den) <= 1e-14)
    throw NumericalError("DegenerateStabilizer",
                         "stabilizing-factor denominator is " +
                             std::to_string(den));
  return num / den;
}

} // namespace

double residual(const RealField& u, const RealField& v, const SymbolMatrix& S,
                const ModelCoefficients& c) {
  return residual_from(transform_all(u, v, c), S);
}

StepResult petviashvili_step(const RealField& u, const RealField& v,
                             const SymbolMatrix& S,
                             const ModelCoefficients& c) {
  SpectralWork w = transform_all(u, v, c);
  StepResult r;
  r.res = residual_from(w, S);
  r.M = stabilizer_from(w, S);
  const double M2 = r.M * r.M;
  Spectrum uh(w.uh.size()), vh(w.vh.size());
  for (size_t j = 0; j < uh.size(); ++j) {
    uh[j] = M2 * w.f1h[j] / S.p1[j];
    vh[j] = M2 * w.f2h[j] / S.p2[j];
  }
  r.u = inverse_fft(u.grid, uh);
  r.v = inverse_fft(v.grid, vh);
  return r;
}

namespace {

// minimal-polynomial extrapolation over flattened (u, v) iterates; exact on
// geometric sequences, fallback to the last iterate on degeneracy
bool mpe(const std::vector<std::vector<double>>& xs, std::vector<double>& out) {
  const int m = static_cast<int>(xs.size());
  if (m < 3)
    return false;
  const int k = m - 2;
  const size_t n = xs[0].size();

  std::vector<std::vector<double>> d(static_cast<size_t>(k + 1),
                                     std::vector<double>(n));
  for (int i = 0; i <= k; ++i)
    for (size_t j = 0; j < n; ++j)
      d[i][j] = xs[i + 1][j] - xs[i][j];

  // least squares U c = -d_k by modified Gram-Schmidt on the k columns
  std::vector<std::vector<double>> q(static_cast<size_t>(k));
  std::vector<std::vector<double>> R(static_cast<size_t>(k),
                                     std::vector<double>(static_cast<size_t>(k), 0.0));
  auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t j = 0; j < n; ++j)
      s += a[j] * b[j];
    return s;
  };
  for (int i = 0; i < k; ++i) {
    std::vector<double> w = d[i];
    const double orig = std::sqrt(dot(w, w));
    for (int p = 0; p < i; ++p) {
      R[p][i] = dot(q[p], w);
      for (size_t j = 0; j < n; ++j)
        w[j] -= R[p][i] * q[p][j];
    }
    R[i][i] = std::sqrt(dot(w, w));
    if (!(R[i][i] > 1e-13 * std::max(orig, 1e-300)))
      return false; // RankDeficient
    for (size_t j = 0; j < n; ++j)
      w[j] /= R[i][i];
    q[i] = std::move(w);
  }

  std::vector<double> rhs(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i)
    rhs[i] = -dot(q[i], d[static_cast<size_t>(k)]);
  std::vector<double> cvec(static_cast<size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int p = i + 1; p < k; ++p)
      s -= R[i][p] * cvec[p];
    cvec[i] = s / R[i][i];
  }

  double gsum = 1.0;
  double gmax = 1.0;
  for (double g : cvec) {
    gsum += g;
    gmax = std::max(gmax, std::abs(g));
  }
  if (std::abs(gsum) <= 1e-14 * gmax)
    return false; // weights degenerate

  out.assign(n, 0.0);
  for (int i = 0; i <= k; ++i) {
    const double xi = (i < k ? cvec[i] : 1.0) / gsum;
    for (size_t j = 0; j < n; ++j)
      out[j] += xi * xs[i][j];
  }
  return true;
}

std::vector<double> flatten(const RealField& u, const RealField& v) {
  std::vector<double> x;
  x.reserve(u.v.size() + v.v.size());
  x.insert(x.end(), u.v.begin(), u.v.end());
  x.insert(x.end(), v.v.begin(), v.v.end());
  return x;
}

} // namespace

std::pair<RealField, RealField> extrapolate_cycle(
    const std::vector<std::pair<RealField, RealField>>& iterates) {
  if (iterates.size() < 3)
    throw ValidationError("TooFewIterates",
                          "extrapolation needs at least 3 iterates");
  std::vector<std::vector<double>> xs;
  xs.reserve(iterates.size());
  for (const auto& [u, v] : iterates)
    xs.push_back(flatten(u, v));

  const auto& last = iterates.back();
  std::vector<double> star;
  if (!mpe(xs, star))
    return last; // RankDeficient fallback

  const size_t N = last.first.v.size();
  RealField u = make_field(last.first.grid), v = make_field(last.second.grid);
  std::copy(star.begin(), star.begin() + N, u.v.begin());
  std::copy(star.begin() + N, star.end(), v.v.begin());
  return {std::move(u), std::move(v)};
}

WaveProfile solve_wave(const ModelCoefficients& c, double c_s, GridPtr grid,
                       const SolveOptions& opt) {
  SymbolMatrix S = assemble_symbols(c, c_s, grid);

  WaveProfile out;
  out.grid = grid;
  out.c_s = c_s;
  try {
    out.classified = classify(c, c_s);
  } catch (const ValidationError&) {
    out.classified.label = RegionLabel::Singular;
    out.classified.predicted = WaveType::None;
  }

  RealField u = make_field(grid), v = make_field(grid);
  if (opt.custom_guess) {
    u = opt.custom_guess->first;
    v = opt.custom_guess->second;
    if (!same_grid(u, v) || u.grid->N != grid->N || u.grid->L != grid->L)
      throw ValidationError("GridMismatch", "custom guess is on another grid");
  } else {
    std::tie(u, v) = initial_guess(GuessKind::CswNormalForm, c, c_s, grid);
  }

  double res_min = std::numeric_limits<double>::infinity();
  double prev_sup_change = 0.0;
  RealField u_prev = u, v_prev = v;
  std::vector<std::pair<RealField, RealField>> window;
  if (opt.extrapolate)
    window.emplace_back(u, v);

  for (int n = 0; n <= opt.max_iter; ++n) {
    SpectralWork w = transform_all(u, v, c);
    const double res = residual_from(w, S);

    if (!std::isfinite(res))
      throw NumericalError("Diverged", "residual is not finite");

    TraceEntry te;
    te.n = n;
    te.res = res;
    te.change = prev_sup_change;
    te.M = 0.0; // filled below unless we stop here

    if (res < opt.tol) {
      out.trace.push_back(te);
      out.status = SolveStatus::Converged;
      out.iterations = n;
      out.final_res = res;
      break;
    }
    res_min = std::min(res_min, res);
    if (res > 1e6 * res_min)
      throw NumericalError("Diverged",
                           "residual grew 1e6x from its minimum (" +
                               std::to_string(res_min) + " -> " +
                               std::to_string(res) + ")");

    // stagnation: no meaningful relative progress over a trailing span
    if (static_cast<int>(out.trace.size()) >= opt.stagnation_span) {
      const double ref =
          out.trace[out.trace.size() - opt.stagnation_span].res;
      if (ref > 0.0 && (ref - res) / ref < opt.stagnation_rtol) {
        out.trace.push_back(te);
        out.status = SolveStatus::Stagnated;
        out.iterations = n;
        out.final_res = res;
        break;
      }
    }

    if (n == opt.max_iter) {
      out.trace.push_back(te);
      out.status = SolveStatus::MaxIterations;
      out.iterations = n;
      out.final_res = res;
      break;
    }

    const double M = stabilizer_from(w, S);
    te.M = M;
    out.trace.push_back(te);

    const double M2 = M * M;
    Spectrum uh(w.uh.size()), vh(w.vh.size());
    for (size_t j = 0; j < uh.size(); ++j) {
      uh[j] = M2 * w.f1h[j] / S.p1[j];
      vh[j] = M2 * w.f2h[j] / S.p2[j];
    }
    u_prev = u;
    v_prev = v;
    u = inverse_fft(grid, uh);
    v = inverse_fft(grid, vh);
    double ch = 0.0;
    for (size_t j = 0; j < u.v.size(); ++j) {
      ch = std::max(ch, std::abs(u.v[j] - u_prev.v[j]));
      ch = std::max(ch, std::abs(v.v[j] - v_prev.v[j]));
    }
    prev_sup_change = ch;

    if (opt.extrapolate) {
      window.emplace_back(u, v);
      if (static_cast<int>(window.size()) >= opt.extrapolation_window) {
        std::tie(u, v) = extrapolate_cycle(window);
        window.clear();
        window.emplace_back(u, v);
      }
    }
  }

  out.u = std::move(u);
  out.v = std::move(v);

  // tail-ripple diagnostic: sup |v| over the outer quarter of the domain
  const double Lq = 0.75 * grid->L;
  for (int j = 0; j < grid->N; ++j)
    if (std::abs(grid->x[j]) >= Lq)
      out.ripple_sup = std::max(out.ripple_sup, std::abs(out.v.v[j]));

  // no dealiasing inside the loop; warn when the top third carries energy
  {
    Spectrum uh = forward_fft(out.u), vh = forward_fft(out.v);
    double top = 0.0, tot = 0.0;
    for (int j = 0; j < grid->N; ++j) {
      const int m = (j < grid->N / 2) ? j : j - grid->N;
      const double e = std::norm(uh[j]) + std::norm(vh[j]);
      tot += e;
      if (std::abs(m) > grid->N / 3)
        top += e;
    }
    if (tot > 0.0 && top / tot > 1e-8)
      out.warnings.push_back(
          "top-third spectral energy fraction " + std::to_string(top / tot) +
          " exceeds 1e-8; increase N to resolve the profile");
  }

  return out;
}

} // namespace kgb
