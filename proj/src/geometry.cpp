#include "nfcorr/geometry.hpp"

#include <stdexcept>
#include <string>

namespace nfcorr {

double normalize_angle(double a) {
    double r = a - 2.0 * M_PI * std::floor((a + M_PI) / (2.0 * M_PI));
    if (r >= M_PI) r = -M_PI;  // guard against rounding right at the seam
    return r;
}

PolarPoint::PolarPoint(double radius_m, double angle_rad) : radius(radius_m), angle(0.0) {
    if (!(radius_m >= 0.0)) throw std::invalid_argument("PolarPoint: radius must be >= 0");
    angle = normalize_angle(angle_rad);
}

TransmitterLocation::TransmitterLocation(double distance_m, double angle_rad)
    : distance(distance_m), angle(angle_rad) {
    if (!(distance_m > 0.0)) throw std::invalid_argument("TransmitterLocation: distance must be > 0");
    if (!(angle_rad >= -M_PI / 2.0 && angle_rad <= M_PI / 2.0))
        throw std::invalid_argument("TransmitterLocation: angle must lie in [-pi/2, pi/2]");
}

ArrayGeometry::ArrayGeometry(int num_elements, double spacing_m, double wavelength_m)
    : n_(num_elements), d_(spacing_m), lambda_(wavelength_m) {
    if (num_elements < 1) throw std::invalid_argument("ArrayGeometry: need at least one element");
    if (!(spacing_m > 0.0)) throw std::invalid_argument("ArrayGeometry: spacing must be > 0");
    if (!(wavelength_m > 0.0)) throw std::invalid_argument("ArrayGeometry: wavelength must be > 0");
}

Vec2 ArrayGeometry::element_position(int n) const {
    if (!contains(n))
        throw std::out_of_range("ArrayGeometry: element index " + std::to_string(n) +
                                " outside [" + std::to_string(min_index()) + ", " +
                                std::to_string(max_index()) + "]");
    return {0.0, n * d_};
}

double distance_to_element(const PolarPoint& s, const ArrayGeometry& geom, int n) {
    const Vec2 w = geom.element_position(n);
    const Vec2 p = s.to_cartesian();
    const double dx = p.x - w.x;
    const double dy = p.y - w.y;
    return std::sqrt(dx * dx + dy * dy);
}

double transmitter_scatterer_distance(const TransmitterLocation& e, const PolarPoint& s) {
    const Vec2 a = e.to_cartesian();
    const Vec2 b = s.to_cartesian();
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

double farfield_distance_approx(const PolarPoint& s, const ArrayGeometry& geom, int n) {
    if (!geom.contains(n))
        throw std::out_of_range("farfield_distance_approx: element index out of range");
    return s.radius - n * geom.spacing() * std::sin(s.angle);
}

Vec2 ring_point(double S, double Psi, double R, double phi) {
    return {S * std::cos(Psi) + R * std::cos(phi), S * std::sin(Psi) + R * std::sin(phi)};
}

double ring_distance(double S, double Psi, double R, double phi,
                     const ArrayGeometry& geom, int n) {
    const Vec2 p = ring_point(S, Psi, R, phi);
    const Vec2 w = geom.element_position(n);
    const double dx = p.x - w.x;
    const double dy = p.y - w.y;
    return std::sqrt(dx * dx + dy * dy);
}

OneRingTerms one_ring_terms(double S, double Psi, const ArrayGeometry& geom, int n, double phi) {
    if (!(S > 0.0)) throw std::domain_error("one_ring_terms: undefined for S = 0");
    if (!geom.contains(n)) throw std::out_of_range("one_ring_terms: element index out of range");
    const double x = n * geom.spacing() / S;
    const double a = 1.0 + x * x - 2.0 * x * std::sin(Psi);
    if (!(a > 0.0)) throw std::domain_error("one_ring_terms: a_n not positive (|Psi| too close to pi/2)");
    const double b = std::cos(Psi - phi) - x * std::sin(phi);
    return {a, b};
}

double lemma2_distance_approx(double S, double Psi, double R,
                              const ArrayGeometry& geom, int n, double phi) {
    const OneRingTerms t = one_ring_terms(S, Psi, geom, n, phi);
    const double root_a = std::sqrt(t.a);
    return S * root_a + R * t.b / root_a;
}

}  // namespace nfcorr
