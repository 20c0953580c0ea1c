#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "nfcorr/geometry.hpp"
#include "nfcorr/rng.hpp"

namespace nfcorr {

// Angular power density over [-pi, pi). Uniform, von Mises
// exp(kappa cos(phi - mu)) / (2 pi I0(kappa)), or a tabulated density with
// periodic linear interpolation (renormalized at construction).
class AngularPdf {
public:
    enum class Kind { Uniform, VonMises, Tabulated };

    static AngularPdf uniform();
    static AngularPdf von_mises(double kappa, double mu);
    // Nodes strictly ascending in [-pi, pi), densities >= 0 and not all zero.
    static AngularPdf tabulated(std::vector<double> nodes, std::vector<double> densities);

    Kind kind() const { return kind_; }
    bool is_von_mises_family() const { return kind_ != Kind::Tabulated; }
    double kappa() const { return kappa_; }  // 0 for Uniform
    double mu() const { return mu_; }

    // Density at phi (1/radian); non-negative. Von Mises is evaluated in log
    // space, so arbitrarily large kappa is fine.
    double value(double phi) const;

    // Numerical integral of the density over one period. Uniform/von Mises
    // use an 8192-node trapezoid rule; Tabulated uses the exact integral of
    // its piecewise-linear representation.
    double integral_check() const;

    // Draws an angle distributed per the density. Non-uniform variants use
    // inverse-CDF lookup on a 2^16-entry quantile table with linear
    // interpolation (built once at construction); deterministic given the
    // stream state.
    double sample(RandomStream& rng) const;

private:
    AngularPdf() = default;
    void build_quantile_table();

    Kind kind_ = Kind::Uniform;
    double kappa_ = 0.0;
    double mu_ = 0.0;
    double log_i0_kappa_ = 0.0;
    std::vector<double> nodes_;      // tabulated breakpoints, ascending in [-pi, pi)
    std::vector<double> densities_;  // renormalized
    std::shared_ptr<const std::vector<double>> quantile_;  // 2^16 + 1 entries
};

// Ring of scatterers of radius R > 0 centred at polar (S, Psi) with an
// angular density along the ring; S = 0 is the conventional one-ring model.
class GeneralizedOneRing {
public:
    GeneralizedOneRing(double center_distance, double center_angle, double radius,
                       AngularPdf angular_pdf);

    double center_distance() const { return S_; }
    double center_angle() const { return Psi_; }
    double radius() const { return R_; }
    const AngularPdf& angular_pdf() const { return pdf_; }

    Vec2 point(double phi) const { return ring_point(S_, Psi_, R_, phi); }
    double origin_distance(double phi) const { return norm(point(phi)); }  // r(phi)
    double distance(const ArrayGeometry& geom, int n, double phi) const {
        return ring_distance(S_, Psi_, R_, phi, geom, n);
    }
    OneRingTerms terms(const ArrayGeometry& geom, int n, double phi) const {
        return one_ring_terms(S_, Psi_, geom, n, phi);
    }
    double lemma2_distance(const ArrayGeometry& geom, int n, double phi) const {
        return lemma2_distance_approx(S_, Psi_, R_, geom, n, phi);
    }

private:
    double S_;
    double Psi_;
    double R_;
    AngularPdf pdf_;
};

struct WeightedLocation {
    PolarPoint location;
    double weight;
};

// Scatterer power distribution over 2D locations: a generalized one-ring, a
// finite point set, or a tabulated polar grid. Discrete variants carry
// weights normalized to unit total mass.
class PowerLocationSpectrum {
public:
    enum class Kind { Ring, PointSet, TabulatedPolar };

    static PowerLocationSpectrum ring(GeneralizedOneRing ring);
    // Weights >= 0 summing to 1 within 1e-9 (renormalized exactly); radii > 0.
    static PowerLocationSpectrum point_set(std::vector<PolarPoint> points,
                                           std::vector<double> weights);
    // Rectangular grid: density_grid is row-major over radii x angles; cell
    // mass is density * r * dr * dtheta with midpoint cell measures,
    // renormalized to unit total.
    static PowerLocationSpectrum tabulated_polar(std::vector<double> radii,
                                                 std::vector<double> angles,
                                                 std::vector<double> density_grid);

    Kind kind() const { return kind_; }
    const GeneralizedOneRing& as_ring() const;
    // Quadrature nodes of the discrete variants (PointSet, TabulatedPolar).
    const std::vector<WeightedLocation>& discrete_nodes() const;

    PolarPoint sample(RandomStream& rng) const;

private:
    PowerLocationSpectrum() = default;
    void build_cdf();

    Kind kind_ = Kind::PointSet;
    std::optional<GeneralizedOneRing> ring_;
    std::vector<WeightedLocation> nodes_;
    std::vector<double> cdf_;
    std::vector<double> cell_dr_;  // TabulatedPolar in-cell jitter extents
    std::vector<double> cell_dt_;
};

}  // namespace nfcorr
