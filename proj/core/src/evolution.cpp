#include "kgb/evolution.hpp"

#include "kgb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kgb {

EvolutionState to_first_order(const RealField& u0, const RealField& u1,
                              const RealField& v0, const RealField& v1) {
  EvolutionState s;
  s.grid = u0.grid;
  s.u = u0;
  s.w = antiderivative_zero_mean(u1); // NonZeroMean when mean(u1) != 0
  s.v = v0;
  s.z = v1;
  s.t = 0.0;
  return s;
}

StateDerivative rhs(const EvolutionState& s, const ModelCoefficients& c) {
  const auto& k = s.grid->k;
  const int N = s.grid->N;

  auto [f1, f2] = eval_nonlinearities(c, s.u, s.v);
  Spectrum f1h = forward_fft(f1);
  Spectrum f2h = forward_fft(f2);
  dealias_two_thirds_inplace(*s.grid, f1h);
  dealias_two_thirds_inplace(*s.grid, f2h);

  Spectrum uh = forward_fft(s.u);
  Spectrum wh = forward_fft(s.w);
  Spectrum vh = forward_fft(s.v);

  const double a2 = c.alpha * c.alpha;
  Spectrum duh(static_cast<size_t>(N)), dwh(static_cast<size_t>(N)),
      dzh(static_cast<size_t>(N));
  for (int j = 0; j < N; ++j) {
    const std::complex<double> ik(0.0, k[j]);
    duh[j] = ik * wh[j];
    dwh[j] = ik / (1.0 + k[j] * k[j]) * (a2 * uh[j] + f1h[j]);
    dzh[j] = -(k[j] * k[j] + 1.0) * vh[j] + f2h[j];
  }
  // odd symbols have no real Nyquist representative
  duh[static_cast<size_t>(N / 2)] = 0.0;
  dwh[static_cast<size_t>(N / 2)] = 0.0;

  StateDerivative d;
  d.du = inverse_fft(s.grid, duh);
  d.dw = inverse_fft(s.grid, dwh);
  d.dv = s.z;
  d.dz = inverse_fft(s.grid, dzh);
  return d;
}

namespace {

EvolutionState advance(const EvolutionState& s, const StateDerivative& d,
                       double dt) {
  EvolutionState r = s;
  for (size_t j = 0; j < r.u.v.size(); ++j) {
    r.u.v[j] += dt * d.du.v[j];
    r.w.v[j] += dt * d.dw.v[j];
    r.v.v[j] += dt * d.dv.v[j];
    r.z.v[j] += dt * d.dz.v[j];
  }
  r.t = s.t + dt;
  return r;
}

bool all_finite(const EvolutionState& s) {
  for (const auto* f : {&s.u, &s.w, &s.v, &s.z})
    for (double a : f->v)
      if (!std::isfinite(a))
        return false;
  return true;
}

double sup_all(const EvolutionState& s) {
  double m = 0.0;
  for (const auto* f : {&s.u, &s.w, &s.v, &s.z})
    for (double a : f->v)
      m = std::max(m, std::abs(a));
  return m;
}

} // namespace

EvolutionState step_rk4(const EvolutionState& s, const ModelCoefficients& c,
                        double dt) {
  if (!(dt > 0.0))
    throw ValidationError("NonPositiveDt", "time step must be positive");
  StateDerivative k1 = rhs(s, c);
  StateDerivative k2 = rhs(advance(s, k1, dt / 2.0), c);
  StateDerivative k3 = rhs(advance(s, k2, dt / 2.0), c);
  StateDerivative k4 = rhs(advance(s, k3, dt), c);

  EvolutionState r = s;
  const double w6 = dt / 6.0, w3 = dt / 3.0;
  for (size_t j = 0; j < r.u.v.size(); ++j) {
    r.u.v[j] += w6 * (k1.du.v[j] + k4.du.v[j]) + w3 * (k2.du.v[j] + k3.du.v[j]);
    r.w.v[j] += w6 * (k1.dw.v[j] + k4.dw.v[j]) + w3 * (k2.dw.v[j] + k3.dw.v[j]);
    r.v.v[j] += w6 * (k1.dv.v[j] + k4.dv.v[j]) + w3 * (k2.dv.v[j] + k3.dv.v[j]);
    r.z.v[j] += w6 * (k1.dz.v[j] + k4.dz.v[j]) + w3 * (k2.dz.v[j] + k3.dz.v[j]);
  }
  r.t = s.t + dt;
  if (!all_finite(r))
    throw NumericalError("NonFinite",
                         "state overflow at t = " + std::to_string(r.t));
  return r;
}

LinearSolution linear_propagate(const RealField& u0, const RealField& u1,
                                const RealField& v0, const RealField& v1,
                                double alpha, double t) {
  const auto& k = u0.grid->k;
  const int N = u0.grid->N;
  Spectrum u0h = forward_fft(u0), u1h = forward_fft(u1);
  Spectrum v0h = forward_fft(v0), v1h = forward_fft(v1);

  Spectrum uh(static_cast<size_t>(N)), uth(static_cast<size_t>(N));
  Spectrum vh(static_cast<size_t>(N)), vth(static_cast<size_t>(N));
  for (int j = 0; j < N; ++j) {
    const double k2 = k[j] * k[j];
    const double wu = std::abs(alpha * k[j]) / std::sqrt(1.0 + k2);
    if (wu == 0.0) { // zero mode drifts linearly
      uh[j] = u0h[j] + t * u1h[j];
      uth[j] = u1h[j];
    } else {
      uh[j] = std::cos(wu * t) * u0h[j] + std::sin(wu * t) / wu * u1h[j];
      uth[j] = -wu * std::sin(wu * t) * u0h[j] + std::cos(wu * t) * u1h[j];
    }
    const double wv = std::sqrt(1.0 + k2);
    vh[j] = std::cos(wv * t) * v0h[j] + std::sin(wv * t) / wv * v1h[j];
    vth[j] = -wv * std::sin(wv * t) * v0h[j] + std::cos(wv * t) * v1h[j];
  }

  LinearSolution r;
  r.u = inverse_fft(u0.grid, uh);
  r.ut = inverse_fft(u0.grid, uth);
  r.v = inverse_fft(v0.grid, vh);
  r.vt = inverse_fft(v0.grid, vth);
  return r;
}

EvolveResult evolve(const EvolutionState& initial, const EvolveConfig& cfg) {
  EvolveResult res;
  const auto& c = cfg.coeffs;

  auto H = hamiltonian_structure(c);
  res.hamiltonian = H.has_value();

  double dt = cfg.dt;
  if (!(dt > 0.0))
    dt = std::min(0.5 * initial.grid->h / std::max(1.0, std::abs(c.alpha)),
                  1e-2);
  res.dt_used = dt;

  // the blow-up functional needs the zero-mean antiderivative of u
  const bool mean_zero_u = std::abs(mean(initial.u)) <= 1e-10;
  res.monitor.enabled = mean_zero_u;
  res.monitor.t0 = cfg.t0;
  if (cfg.beta) {
    res.monitor.beta = *cfg.beta;
  } else if (H) {
    res.monitor.beta = std::max(0.0, -energy(c, *H, initial));
  }

  auto sample_monitors = [&](const EvolutionState& s) {
    if (H)
      res.invariants.push_back({s.t, energy(c, *H, s), momentum(s)});
    if (res.monitor.enabled) {
      RealField du = antiderivative_zero_mean(s.u, 1e-6);
      const double tt = s.t + res.monitor.t0;
      const double I = inner_product(du, du) + inner_product(s.u, s.u) +
                       inner_product(s.v, s.v) + res.monitor.beta * tt * tt;
      BlowupSample bs;
      bs.t = s.t;
      bs.I = I;
      bs.I1 = I > 0.0 ? std::pow(I, -0.25) : 0.0;
      res.monitor.series.push_back(bs);
    }
    if (cfg.keep_snapshots)
      res.snapshots.push_back(s);
  };

  EvolutionState s = initial;
  sample_monitors(s);

  const double T = cfg.T;
  int step_count = 0;
  while (s.t < T - 1e-12 * std::max(1.0, T)) {
    const double dt_step = std::min(dt, T - s.t);
    try {
      s = step_rk4(s, c, dt_step);
    } catch (const NumericalError&) {
      res.status = RunStatus::BlowupSuspected;
      res.stop_reason = "non-finite state during step";
      break;
    }
    ++step_count;

    const double amp = sup_all(s);
    if (!std::isfinite(amp) || amp > cfg.amplitude_limit) {
      res.status = RunStatus::BlowupSuspected;
      res.stop_reason = "amplitude " + std::to_string(amp) +
                        " beyond limit " +
                        std::to_string(cfg.amplitude_limit);
      sample_monitors(s);
      break;
    }
    if (step_count % std::max(1, cfg.monitor_stride) == 0 ||
        !(s.t < T - 1e-12 * std::max(1.0, T)))
      sample_monitors(s);
  }
  res.steps_taken = step_count;
  res.final_state = s;

  // centered finite differences of I (one-sided at the ends)
  auto& ser = res.monitor.series;
  if (ser.size() >= 2) {
    for (size_t i = 0; i < ser.size(); ++i) {
      const size_t ip = std::min(i + 1, ser.size() - 1);
      const size_t im = i > 0 ? i - 1 : 0;
      if (ser[ip].t > ser[im].t)
        ser[i].dI = (ser[ip].I - ser[im].I) / (ser[ip].t - ser[im].t);
    }
  }

  double bsup = 0.0;
  for (int j = 0; j < s.grid->N; ++j)
    if (std::abs(s.grid->x[j]) >= 0.9 * s.grid->L)
      for (const auto* f : {&s.u, &s.w, &s.v, &s.z})
        bsup = std::max(bsup, std::abs(f->v[j]));
  res.boundary_sup = bsup;

  return res;
}

} // namespace kgb
