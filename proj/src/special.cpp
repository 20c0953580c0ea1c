#include "nfcorr/special.hpp"

#include <cmath>
#include <stdexcept>

// I0 evaluation notes
//
// Power series (Abramowitz & Stegun 9.6.12):
//   I0(z) = sum_k (z^2/4)^k / (k!)^2.
// For complex z near the imaginary axis the series alternates and cancels;
// at |z| = 20 the largest term is ~8e6 against a result of ~0.17, which costs
// about eight digits. Accumulating in long double (64-bit significand on
// x86-64) keeps the relative error near 1e-11 at the switchover ring.
//
// Asymptotic expansion (DLMF 10.40.5, nu = 0):
//   I0(z) ~ [ e^z P(1/z) + i e^{-z} P(-1/z) ] / sqrt(2 pi z),
//   P(u)  = sum_k c_k u^k,  c_k = ((2k-1)!!)^2 / (k! 8^k),
// valid for -pi/2 < ph z < 3pi/2. Arguments are mapped into the first
// quadrant first, so the sector condition always holds and the subdominant
// e^{-z} term carries the +i coefficient. Truncation at the smallest term
// leaves a relative error below e^{-2|z|} (~4e-18 at |z| = 20).

namespace nfcorr {

namespace {

using cld = std::complex<long double>;

constexpr long double kTwoPiL = 6.283185307179586476925286766559L;

cld i0_series_ld(cld z) {
    const cld q = 0.25L * z * z;
    cld term(1.0L, 0.0L);
    cld sum(1.0L, 0.0L);
    for (int k = 1; k <= 256; ++k) {
        term *= q / (static_cast<long double>(k) * static_cast<long double>(k));
        sum += term;
        if (std::abs(term) < 1e-25L * (1.0L + std::abs(sum))) break;
    }
    return sum;
}

// Requires Re(z) >= 0, Im(z) >= 0 and |z| large enough for the expansion.
cld i0_asymptotic_ld(cld z) {
    const cld inv = 1.0L / z;
    cld power(1.0L, 0.0L);
    cld sum_plus(1.0L, 0.0L);   // P(1/z)
    cld sum_minus(1.0L, 0.0L);  // P(-1/z)
    long double coeff = 1.0L;
    long double prev_mag = 1e30L;
    for (int k = 1; k <= 60; ++k) {
        const long double odd = 2.0L * k - 1.0L;
        coeff *= odd * odd / (8.0L * k);
        power *= inv;
        const cld term = coeff * power;
        const long double mag = std::abs(term);
        if (mag > prev_mag) break;  // smallest-term truncation
        sum_plus += term;
        sum_minus += (k % 2 != 0) ? -term : term;
        prev_mag = mag;
        if (mag < 1e-24L) break;
    }
    const cld root = std::sqrt(kTwoPiL * z);
    return (std::exp(z) * sum_plus + cld(0.0L, 1.0L) * std::exp(-z) * sum_minus) / root;
}

long double i0_series_real_ld(long double x) {
    const long double q = 0.25L * x * x;
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int k = 1; k <= 2048; ++k) {
        term *= q / (static_cast<long double>(k) * static_cast<long double>(k));
        sum += term;
        if (term < 1e-25L * sum) break;
    }
    return sum;
}

// P(1/x) of the asymptotic expansion, real positive x.
long double asym_p_real_ld(long double x) {
    const long double inv = 1.0L / x;
    long double power = 1.0L;
    long double sum = 1.0L;
    long double coeff = 1.0L;
    long double prev_mag = 1e30L;
    for (int k = 1; k <= 60; ++k) {
        const long double odd = 2.0L * k - 1.0L;
        coeff *= odd * odd / (8.0L * k);
        power *= inv;
        const long double term = coeff * power;
        if (std::fabs(term) > prev_mag) break;
        sum += term;
        prev_mag = std::fabs(term);
        if (std::fabs(term) < 1e-24L) break;
    }
    return sum;
}

void check_finite(std::complex<double> z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument("bessel_i0: non-finite argument");
}

// Maps z into the first quadrant; sets conjugate_result when the output must
// be conjugated back. Exact: only sign flips are applied.
std::complex<double> to_first_quadrant(std::complex<double> z, bool& conjugate_result) {
    if (z.real() < 0.0) z = -z;
    conjugate_result = z.imag() < 0.0;
    if (conjugate_result) z = std::conj(z);
    return z;
}

std::complex<double> to_double(cld v) {
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

}  // namespace

double bessel_i0(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("bessel_i0: non-finite argument");
    x = std::fabs(x);
    if (x > kBesselMaxArg) throw std::range_error("bessel_i0: argument beyond overflow guard (|x| > 700)");
    if (x <= 20.0) return static_cast<double>(i0_series_real_ld(x));
    // The e^{-x} companion term is below e^{-2x} relative here; irrelevant.
    const long double xl = x;
    return static_cast<double>(std::exp(xl) * asym_p_real_ld(xl) / std::sqrt(kTwoPiL * xl));
}

double log_bessel_i0(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("log_bessel_i0: non-finite argument");
    x = std::fabs(x);
    if (x <= 20.0) return static_cast<double>(std::log(i0_series_real_ld(x)));
    const long double xl = x;
    return static_cast<double>(xl + std::log(asym_p_real_ld(xl)) - 0.5L * std::log(kTwoPiL * xl));
}

std::complex<double> bessel_i0(std::complex<double> z) {
    check_finite(z);
    if (std::abs(z) > kBesselMaxArg)
        throw std::range_error("bessel_i0: argument beyond overflow guard (|z| > 700)");
    bool conj_back = false;
    z = to_first_quadrant(z, conj_back);
    const cld zl(z.real(), z.imag());
    const cld r = (std::abs(z) <= 20.0) ? i0_series_ld(zl) : i0_asymptotic_ld(zl);
    const std::complex<double> out = to_double(r);
    return conj_back ? std::conj(out) : out;
}

std::complex<double> von_mises_characteristic_integral(std::complex<double> x,
                                                       std::complex<double> y) {
    check_finite(x);
    check_finite(y);
    return bessel_i0(std::sqrt(x * x + y * y));
}

namespace detail {

std::complex<double> bessel_i0_series(std::complex<double> z) {
    check_finite(z);
    bool conj_back = false;
    z = to_first_quadrant(z, conj_back);
    const std::complex<double> out = to_double(i0_series_ld(cld(z.real(), z.imag())));
    return conj_back ? std::conj(out) : out;
}

std::complex<double> bessel_i0_asymptotic(std::complex<double> z) {
    check_finite(z);
    bool conj_back = false;
    z = to_first_quadrant(z, conj_back);
    const std::complex<double> out = to_double(i0_asymptotic_ld(cld(z.real(), z.imag())));
    return conj_back ? std::conj(out) : out;
}

}  // namespace detail

}  // namespace nfcorr
