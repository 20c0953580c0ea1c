#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfcorr/geometry.hpp"
#include "nfcorr/scattering.hpp"

namespace nfcorr {

// Thrown when a quadrature node (or scatterer) falls within 1e-6 wavelengths
// of an array element, where the near-field integrand diverges. The message
// names the offending node; no regularization is attempted.
class singularity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Periodic trapezoid quadrature over [-pi, pi) with automatic node doubling:
// the node count doubles until the maximum entrywise change drops below
// refinement_tolerance * beta0 or max_doublings is reached (in which case the
// result carries quadrature_converged = false).
struct QuadratureSpec {
    int node_count = 4096;  // >= 64, power of two
    double refinement_tolerance = 1e-8;
    int max_doublings = 4;
    void validate() const;
};

// N x N Hermitian spatial correlation matrix. Hermitian symmetry holds
// exactly (mirror fill of the upper triangle); diagonal entries are real with
// +0 imaginary part. Entries are addressable either by storage index (0-based
// at(i, j)) or by the signed element index convention entry(n, m) with
// n, m in [min_index, max_index] of the owning geometry.
class CorrelationMatrix {
public:
    CorrelationMatrix(ArrayGeometry geometry, double beta0, std::string method_tag);
    static CorrelationMatrix from_entries(ArrayGeometry geometry, double beta0,
                                          std::string method_tag,
                                          std::vector<std::complex<double>> row_major);

    int size() const { return n_; }
    const ArrayGeometry& geometry() const { return geom_; }
    double beta0() const { return beta0_; }
    const std::string& method_tag() const { return tag_; }

    std::complex<double> at(int i, int j) const { return data_[idx(i, j)]; }
    std::complex<double>& at(int i, int j) { return data_[idx(i, j)]; }
    std::complex<double> entry(int n, int m) const {
        return at(n - geom_.min_index(), m - geom_.min_index());
    }
    const std::vector<std::complex<double>>& data() const { return data_; }

    double trace_real() const;
    // entry(i,j) == conj(entry(j,i)) under IEEE comparison for every pair.
    bool hermitian_exact() const;
    // Copies the strict upper triangle onto the lower one (conjugated) and
    // clears the sign of the diagonal imaginary zeros.
    void mirror_from_upper();

    // Quadrature provenance (meaningful for quadrature-built matrices).
    int nodes_used = 0;
    bool quadrature_converged = true;

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

    ArrayGeometry geom_;
    int n_;
    double beta0_;
    std::string tag_;
    std::vector<std::complex<double>> data_;
};

// c_nm = (2 pi R / lambda)(1/sqrt(a_n) - 1/sqrt(a_m))
// d_nm = (2 pi R d / (lambda S))(n/sqrt(a_n) - m/sqrt(a_m))
// e_nm = 2 pi R (n - m) d cos(Psi) / (lambda S)
struct ClosedFormTerms {
    double c;
    double d;
    double e;
};

// --- Integral builders -----------------------------------------------------
//
// Near-field builders accumulate rank-1 outer products R = sum_k w_k v_k v_k^H
// over quadrature nodes (the integrand factorizes), which costs O(N^2 K) and
// makes the quadrature result positive semidefinite by construction.
// Far-field builders evaluate one integral per index lag and fill the matrix
// Toeplitz-by-construction from that lag vector.

// General near-field correlation for any power location spectrum:
//   entry(n,m) = beta0 Int r^2(s)/(r_n(s) r_m(s)) e^{-j(2pi/lambda)(r_n - r_m)} f(s) ds.
// Ring spectra integrate over the ring angle; PointSet/TabulatedPolar reduce
// to exact weighted sums over their nodes.
CorrelationMatrix nf_correlation_general(const PowerLocationSpectrum& pls,
                                         const ArrayGeometry& geom,
                                         const QuadratureSpec& quad, double beta0 = 1.0);

// Far-field correlation from a power angular spectrum:
//   entry(n,m) = beta0 Int e^{-j(2pi/lambda)(m-n) d sin(theta)} f(theta) dtheta.
CorrelationMatrix ff_correlation(const AngularPdf& pas, const ArrayGeometry& geom,
                                 const QuadratureSpec& quad, double beta0 = 1.0);

// Near-field one-ring specialization (ring-angle parameterization of the
// general integral).
CorrelationMatrix nf_one_ring_correlation(const GeneralizedOneRing& ring,
                                          const ArrayGeometry& geom,
                                          const QuadratureSpec& quad, double beta0 = 1.0);

// Far-field limit of the one-ring model, with effective angle term
// (S sin Psi + R sin phi)/sqrt(S^2 + R^2 + 2 S R cos(Psi - phi)).
CorrelationMatrix ff_one_ring_correlation(const GeneralizedOneRing& ring,
                                          const ArrayGeometry& geom,
                                          const QuadratureSpec& quad, double beta0 = 1.0);

// S >> R near-field approximation: amplitude 1/sqrt(a_n a_m), phase
// S(sqrt(a_n)-sqrt(a_m)) + R(b_n/sqrt(a_n) - b_m/sqrt(a_m)). Requires S > 0.
CorrelationMatrix nf_lemma2_correlation(const GeneralizedOneRing& ring,
                                        const ArrayGeometry& geom,
                                        const QuadratureSpec& quad, double beta0 = 1.0);

// S >> R far-field approximation: phase (m-n) d (sin Psi + (R/S) cos Psi
// sin(phi - Psi)). Requires S > 0.
CorrelationMatrix ff_lemma3_correlation(const GeneralizedOneRing& ring,
                                        const ArrayGeometry& geom,
                                        const QuadratureSpec& quad, double beta0 = 1.0);

// --- Closed forms (von Mises / uniform angular densities) ------------------

// Requires S > 0; throws std::domain_error otherwise.
ClosedFormTerms closed_form_terms(const GeneralizedOneRing& ring, const ArrayGeometry& geom,
                                  int n, int m);

// Closed form of the S >> R near-field correlation, evaluated through the
// characteristic integral: entry(n,m) = beta0 e^{-j(2pi/lambda) S (sqrt(a_n) -
// sqrt(a_m))} I0(sqrt(x^2+y^2)) / (sqrt(a_n a_m) I0(kappa)) with
// x = kappa cos(mu) - j c_nm cos(Psi), y = kappa sin(mu) - j(c_nm sin(Psi) - d_nm).
// The angular density must be uniform or von Mises.
CorrelationMatrix nf_closed_form(const GeneralizedOneRing& ring, const ArrayGeometry& geom,
                                 double beta0 = 1.0);

// Closed form of the S >> R far-field correlation:
// entry(n,m) = beta0 e^{-j(2pi/lambda)(m-n) d sin(Psi)}
//              I0(sqrt(kappa^2 - e_nm^2 + 2 j kappa e_nm sin(mu - Psi))) / I0(kappa).
CorrelationMatrix ff_closed_form(const GeneralizedOneRing& ring, const ArrayGeometry& geom,
                                 double beta0 = 1.0);

// Literal transcriptions of the printed closed-form expressions, which place
// a factor j outside the square root. These disagree with the defining
// integrals (the argument above reduces to an oscillatory J0 form in the
// uniform limit; the printed reading produces an exponentially growing I0
// instead) and are retained only to generate the documented comparison
// artifact. Entries whose Bessel argument overflows are reported as inf.
CorrelationMatrix nf_closed_form_printed(const GeneralizedOneRing& ring,
                                         const ArrayGeometry& geom, double beta0 = 1.0);
CorrelationMatrix ff_closed_form_printed(const GeneralizedOneRing& ring,
                                         const ArrayGeometry& geom, double beta0 = 1.0);

// Largest entrywise |A - B|; the shapes must match.
double max_entry_distance(const CorrelationMatrix& a, const CorrelationMatrix& b);
// ||A - B||_F / ||B||_F.
double frobenius_relative_distance(const CorrelationMatrix& a, const CorrelationMatrix& b);

}  // namespace nfcorr
