#pragma once

// Periodic pseudospectral toolbox: grid, FFT contract, spectral
// differentiation/antidifferentiation, norms, quadrature. Everything else in
// the library sits on top of this.
//
// Transform convention: forward_fft returns coefficients indexed in FFT bin
// order (bin j holds mode m = j for j < N/2, m = j-N otherwise) with 1/N
// normalization, taken against the grid *index*, not against x. The phase
// factor relating the two conventions cancels in every symbol application and
// in Parseval, so no caller sees it. Round trip is identity to round-off.

#include <complex>
#include <functional>
#include <memory>
#include <vector>

namespace kgb {

struct PeriodicGrid {
  double L = 0.0; // half-length; domain is [-L, L)
  int N = 0;      // even node count
  double h = 0.0; // 2L/N
  std::vector<double> x; // nodes, x[0] = -L, strictly increasing
  std::vector<double> k; // wavenumber of FFT bin j: pi*m/L, m in [-N/2, N/2)
};

using GridPtr = std::shared_ptr<const PeriodicGrid>;

// L > 0, N even, N >= 8. Errors: NonPositiveL, OddN, TooFewPoints.
GridPtr build_grid(double L, int N);

struct RealField {
  GridPtr grid;
  std::vector<double> v;
};

RealField make_field(GridPtr g); // zero field
RealField sample(GridPtr g, const std::function<double(double)>& f);
bool same_grid(const RealField& a, const RealField& b);

using Spectrum = std::vector<std::complex<double>>;
using SymbolFn = std::function<std::complex<double>(double)>;

// 1/N-normalized forward transform; bin 0 is the mean.
Spectrum forward_fft(const RealField& f);

// Unnormalized inverse; imaginary residue beyond realness_tol (relative to
// the field scale) means the spectrum was not conjugate-symmetric.
// Errors: NonRealOutput.
RealField inverse_fft(GridPtr g, const Spectrum& coef,
                      double realness_tol = 1e-12);

// Multiply f-hat by sigma(k) binwise and invert. sigma must satisfy
// sigma(-k) = conj(sigma(k)); violations surface as NonRealOutput.
RealField apply_fourier_symbol(const RealField& f, const SymbolFn& sigma,
                               double realness_tol = 1e-12);

// (ik)^order; the Nyquist bin is zeroed for odd orders (it has no real-signal
// representative under an odd symbol).
RealField derivative(const RealField& f, int order);

// Divide by ik away from the zero mode; requires |mean(f)| <= mean_tol.
// Nyquist is zeroed so this inverts derivative(.,1) exactly on its range.
// Errors: NonZeroMean.
RealField antiderivative_zero_mean(const RealField& f,
                                   double mean_tol = 1e-10);

struct Norms {
  double l2 = 0.0;  // sqrt(h * sum f^2)
  double sup = 0.0; // max |f_j|
  double h1 = 0.0;  // sqrt(l2^2 + l2(f')^2)
};
Norms norms(const RealField& f);

double integral(const RealField& f); // h * sum f_j
double mean(const RealField& f);
double inner_product(const RealField& a, const RealField& b); // h * sum a_j b_j

// 2/3-rule: zero every bin with |m| > N/3. Applied to quadratic products.
RealField dealias_two_thirds(const RealField& f);
void dealias_two_thirds_inplace(const PeriodicGrid& g, Spectrum& coef);

} // namespace kgb
