#pragma once

#include <cmath>

namespace nfcorr {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

// Wraps an angle into [-pi, pi).
double normalize_angle(double a);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double norm(Vec2 v) { return std::sqrt(v.x * v.x + v.y * v.y); }

// Polar location in the array plane. Radius in meters (>= 0), angle measured
// from the positive x axis and normalized into [-pi, pi).
struct PolarPoint {
    double radius;
    double angle;
    PolarPoint(double radius_m, double angle_rad);
    Vec2 to_cartesian() const { return {radius * std::cos(angle), radius * std::sin(angle)}; }
};

// Transmitter at distance D > 0 from the origin, angle Phi in [-pi/2, pi/2].
struct TransmitterLocation {
    double distance;
    double angle;
    TransmitterLocation(double distance_m, double angle_rad);
    Vec2 to_cartesian() const { return {distance * std::cos(angle), distance * std::sin(angle)}; }
};

// Uniform linear array along the y axis. Element n sits at (0, n d) for
// signed indices n in [-ceil((N-1)/2), floor((N-1)/2)]; N may be even, in
// which case the n = 0 reference element is off-center.
class ArrayGeometry {
public:
    ArrayGeometry(int num_elements, double spacing_m, double wavelength_m);

    int num_elements() const { return n_; }
    double spacing() const { return d_; }
    double wavelength() const { return lambda_; }
    double wavenumber() const { return 2.0 * M_PI / lambda_; }
    double aperture() const { return n_ * d_; }

    int min_index() const { return -((n_ - 1) + 1) / 2; }  // -ceil((N-1)/2)
    int max_index() const { return (n_ - 1) / 2; }
    bool contains(int n) const { return n >= min_index() && n <= max_index(); }

    // Position (0, n d); throws std::out_of_range for an invalid index.
    Vec2 element_position(int n) const;

private:
    int n_;
    double d_;
    double lambda_;
};

// a_n = 1 + (nd/S)^2 - 2 (nd/S) sin(Psi),  b_n = cos(Psi - phi) - (nd/S) sin(phi).
struct OneRingTerms {
    double a;
    double b;
};

// Distance from a scatterer to array element n, computed as the Cartesian
// norm ||s - w_n|| (numerically stabler than the algebraic square-root form
// when nd is close to the scatterer radius). Returns 0 when the scatterer
// sits exactly on the element; callers dividing by the result must guard.
double distance_to_element(const PolarPoint& s, const ArrayGeometry& geom, int n);

// sqrt(r^2 + D^2 - 2 r D cos(theta - Phi)), via the Cartesian norm.
double transmitter_scatterer_distance(const TransmitterLocation& e, const PolarPoint& s);

// First-order (plane-wave) approximation r - n d sin(theta). Intended for
// the regime N d << r; not enforced.
double farfield_distance_approx(const PolarPoint& s, const ArrayGeometry& geom, int n);

// Generalized one-ring geometry: scatterer ring of radius R centred at polar
// (S, Psi). Pure functions of the ring parameters.
Vec2 ring_point(double S, double Psi, double R, double phi);
double ring_distance(double S, double Psi, double R, double phi,
                     const ArrayGeometry& geom, int n);

// Requires S > 0 (throws std::domain_error otherwise). a_n is checked
// positive, which holds for |Psi| < pi/2.
OneRingTerms one_ring_terms(double S, double Psi, const ArrayGeometry& geom, int n, double phi);

// S sqrt(a_n) + R b_n / sqrt(a_n); second-order accurate in R/S.
double lemma2_distance_approx(double S, double Psi, double R,
                              const ArrayGeometry& geom, int n, double phi);

}  // namespace nfcorr
