#pragma once

#include <complex>

namespace nfcorr {

// Largest |argument| accepted by the I0 evaluators. I0(x) ~ e^x/sqrt(2 pi x)
// overflows double range just above x = 709; 700 leaves headroom.
inline constexpr double kBesselMaxArg = 700.0;

// Modified Bessel function of the first kind, order zero, real argument.
// Power series for |x| <= 20, large-argument asymptotic expansion beyond.
// Relative error <= 1e-12. Throws std::range_error for |x| > kBesselMaxArg.
double bessel_i0(double x);

// log(I0(x)), stable for arbitrarily large x (no overflow guard needed).
double log_bessel_i0(double x);

// I0 for complex argument. Power series for |z| <= 20, asymptotic expansion
// otherwise; the argument is first mapped into the first quadrant through
// I0(-z) = I0(z) and I0(conj z) = conj(I0(z)), which makes evenness exact.
std::complex<double> bessel_i0(std::complex<double> z);

// (1/2pi) Int_{-pi}^{pi} exp(x cos(phi) + y sin(phi)) dphi = I0(sqrt(x^2+y^2)).
// The identity holds for real x, y and extends to complex values because both
// sides are entire in x^2+y^2; evenness of I0 makes the square-root branch
// irrelevant.
std::complex<double> von_mises_characteristic_integral(std::complex<double> x,
                                                       std::complex<double> y);

namespace detail {

// Individual evaluation paths, exposed for the switchover cross-validation
// tests. Both accept any z within the overflow guard.
std::complex<double> bessel_i0_series(std::complex<double> z);
std::complex<double> bessel_i0_asymptotic(std::complex<double> z);

}  // namespace detail

}  // namespace nfcorr
