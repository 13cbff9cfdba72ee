#include "kgb/spectral.hpp"

#include "kgb/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace kgb {

GridPtr build_grid(double L, int N) {
  if (!(L > 0.0))
    throw ValidationError("NonPositiveL", "grid half-length must be positive");
  if (N % 2 != 0)
    throw ValidationError("OddN", "node count must be even");
  if (N < 8)
    throw ValidationError("TooFewPoints", "node count must be at least 8");

  auto g = std::make_shared<PeriodicGrid>();
  g->L = L;
  g->N = N;
  g->h = 2.0 * L / N;
  g->x.resize(N);
  g->k.resize(N);
  for (int j = 0; j < N; ++j) {
    g->x[j] = -L + j * g->h;
    int m = (j < N / 2) ? j : j - N;
    g->k[j] = M_PI * m / L;
  }
  return g;
}

RealField make_field(GridPtr g) {
  return RealField{g, std::vector<double>(static_cast<size_t>(g->N), 0.0)};
}

RealField sample(GridPtr g, const std::function<double(double)>& f) {
  RealField out = make_field(g);
  for (int j = 0; j < g->N; ++j)
    out.v[j] = f(g->x[j]);
  return out;
}

bool same_grid(const RealField& a, const RealField& b) {
  if (a.grid == b.grid)
    return true;
  return a.grid && b.grid && a.grid->N == b.grid->N && a.grid->L == b.grid->L;
}

namespace {

// One forward/backward plan pair per size. FFTW_UNALIGNED lets the cached
// plan execute on any caller buffer; FFTW_ESTIMATE keeps planning
// deterministic (no runtime measurement), so reruns are byte-identical.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

PlanPair& plans_for(int N) {
  static std::map<int, PlanPair> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(N);
  if (it != cache.end())
    return it->second;

  std::vector<std::complex<double>> a(static_cast<size_t>(N)),
      b(static_cast<size_t>(N));
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  PlanPair p;
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.fwd = fftw_plan_dft_1d(N, pa, pb, FFTW_FORWARD, flags);
  p.bwd = fftw_plan_dft_1d(N, pa, pb, FFTW_BACKWARD, flags);
  return cache.emplace(N, p).first->second;
}

} // namespace

Spectrum forward_fft(const RealField& f) {
  const int N = f.grid->N;
  Spectrum in(f.v.begin(), f.v.end());
  Spectrum out(static_cast<size_t>(N));
  PlanPair& p = plans_for(N);
  fftw_execute_dft(p.fwd, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / N;
  for (auto& c : out)
    c *= scale;
  return out;
}

RealField inverse_fft(GridPtr g, const Spectrum& coef, double realness_tol) {
  const int N = g->N;
  Spectrum in(coef);
  Spectrum out(static_cast<size_t>(N));
  PlanPair& p = plans_for(N);
  fftw_execute_dft(p.bwd, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));

  double max_abs = 0.0, max_imag = 0.0;
  for (const auto& c : out) {
    max_abs = std::max(max_abs, std::abs(c.real()));
    max_imag = std::max(max_imag, std::abs(c.imag()));
  }
  if (max_imag > realness_tol * std::max(1.0, max_abs))
    throw ValidationError("NonRealOutput",
                          "inverse transform has imaginary residue " +
                              std::to_string(max_imag) +
                              "; symbol not conjugate-symmetric?");

  RealField r = make_field(g);
  for (int j = 0; j < N; ++j)
    r.v[j] = out[j].real();
  return r;
}

RealField apply_fourier_symbol(const RealField& f, const SymbolFn& sigma,
                               double realness_tol) {
  Spectrum c = forward_fft(f);
  const auto& k = f.grid->k;
  for (size_t j = 0; j < c.size(); ++j)
    c[j] *= sigma(k[j]);
  return inverse_fft(f.grid, c, realness_tol);
}

RealField derivative(const RealField& f, int order) {
  if (order <= 0)
    throw ValidationError("NonPositiveOrder", "derivative order must be >= 1");
  Spectrum c = forward_fft(f);
  const auto& k = f.grid->k;
  const int N = f.grid->N;
  for (int j = 0; j < N; ++j)
    c[j] *= std::pow(std::complex<double>(0.0, k[j]), order);
  if (order % 2 != 0)
    c[static_cast<size_t>(N / 2)] = 0.0; // Nyquist has no odd-symbol partner
  return inverse_fft(f.grid, c);
}

RealField antiderivative_zero_mean(const RealField& f, double mean_tol) {
  Spectrum c = forward_fft(f);
  const double m0 = std::abs(c[0]);
  if (m0 > mean_tol)
    throw ValidationError("NonZeroMean",
                          "antiderivative needs mean-zero input, |mean| = " +
                              std::to_string(m0));
  const auto& k = f.grid->k;
  const int N = f.grid->N;
  c[0] = 0.0;
  for (int j = 1; j < N; ++j)
    c[j] /= std::complex<double>(0.0, k[j]);
  c[static_cast<size_t>(N / 2)] = 0.0;
  return inverse_fft(f.grid, c);
}

Norms norms(const RealField& f) {
  Norms n;
  double s2 = 0.0;
  for (double a : f.v) {
    s2 += a * a;
    n.sup = std::max(n.sup, std::abs(a));
  }
  n.l2 = std::sqrt(f.grid->h * s2);
  RealField df = derivative(f, 1);
  double d2 = 0.0;
  for (double a : df.v)
    d2 += a * a;
  n.h1 = std::sqrt(f.grid->h * (s2 + d2));
  return n;
}

double integral(const RealField& f) {
  double s = 0.0;
  for (double a : f.v)
    s += a;
  return f.grid->h * s;
}

double mean(const RealField& f) { return integral(f) / (2.0 * f.grid->L); }

double inner_product(const RealField& a, const RealField& b) {
  double s = 0.0;
  for (size_t j = 0; j < a.v.size(); ++j)
    s += a.v[j] * b.v[j];
  return a.grid->h * s;
}

void dealias_two_thirds_inplace(const PeriodicGrid& g, Spectrum& coef) {
  const int N = g.N;
  const int keep = N / 3; // zero every |m| > N/3
  for (int j = 0; j < N; ++j) {
    int m = (j < N / 2) ? j : j - N;
    if (std::abs(m) > keep)
      coef[j] = 0.0;
  }
}

RealField dealias_two_thirds(const RealField& f) {
  Spectrum c = forward_fft(f);
  dealias_two_thirds_inplace(*f.grid, c);
  return inverse_fft(f.grid, c);
}

} // namespace kgb
