#include "nfcorr/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nfcorr/special.hpp"

namespace nfcorr {

namespace {

constexpr int kQuantileBits = 16;
constexpr int kQuantileSize = 1 << kQuantileBits;  // 2^16 intervals
constexpr int kCheckNodes = 8192;

}  // namespace

AngularPdf AngularPdf::uniform() {
    AngularPdf p;
    p.kind_ = Kind::Uniform;
    return p;
}

AngularPdf AngularPdf::von_mises(double kappa, double mu) {
    if (!(kappa >= 0.0)) throw std::invalid_argument("AngularPdf: kappa must be >= 0");
    AngularPdf p;
    p.kind_ = Kind::VonMises;
    p.kappa_ = kappa;
    p.mu_ = normalize_angle(mu);
    p.log_i0_kappa_ = log_bessel_i0(kappa);
    p.build_quantile_table();
    return p;
}

AngularPdf AngularPdf::tabulated(std::vector<double> nodes, std::vector<double> densities) {
    if (nodes.size() < 2 || nodes.size() != densities.size())
        throw std::invalid_argument("AngularPdf: tabulated input needs matching nodes/densities, >= 2 points");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!(nodes[i] >= -M_PI && nodes[i] < M_PI))
            throw std::invalid_argument("AngularPdf: tabulated nodes must lie in [-pi, pi)");
        if (i > 0 && !(nodes[i] > nodes[i - 1]))
            throw std::invalid_argument("AngularPdf: tabulated nodes must be strictly ascending");
        if (!(densities[i] >= 0.0))
            throw std::invalid_argument("AngularPdf: tabulated densities must be non-negative");
    }

    // Exact integral of the piecewise-linear, periodically wrapped density.
    double total = 0.0;
    const std::size_t m = nodes.size();
    for (std::size_t i = 0; i + 1 < m; ++i)
        total += 0.5 * (densities[i] + densities[i + 1]) * (nodes[i + 1] - nodes[i]);
    total += 0.5 * (densities[m - 1] + densities[0]) * (2.0 * M_PI - (nodes[m - 1] - nodes[0]));
    if (!(total > 0.0))
        throw std::invalid_argument("AngularPdf: tabulated density is not normalizable (zero mass)");

    AngularPdf p;
    p.kind_ = Kind::Tabulated;
    p.nodes_ = std::move(nodes);
    p.densities_ = std::move(densities);
    for (double& d : p.densities_) d /= total;
    p.build_quantile_table();

    const double check = p.integral_check();
    if (std::fabs(check - 1.0) > 1e-9)
        throw std::invalid_argument("AngularPdf: tabulated density failed normalization check");
    return p;
}

double AngularPdf::value(double phi) const {
    phi = normalize_angle(phi);
    switch (kind_) {
        case Kind::Uniform:
            return 1.0 / (2.0 * M_PI);
        case Kind::VonMises:
            return std::exp(kappa_ * std::cos(phi - mu_) - log_i0_kappa_) / (2.0 * M_PI);
        case Kind::Tabulated: {
            const std::size_t m = nodes_.size();
            // Wrap segment between the last node and the first node + 2pi.
            if (phi < nodes_.front() || phi >= nodes_.back()) {
                const double span = 2.0 * M_PI - (nodes_.back() - nodes_.front());
                double t = phi - nodes_.back();
                if (t < 0.0) t += 2.0 * M_PI;
                const double frac = (span > 0.0) ? t / span : 0.0;
                return densities_[m - 1] + frac * (densities_[0] - densities_[m - 1]);
            }
            const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), phi);
            const std::size_t hi = static_cast<std::size_t>(it - nodes_.begin());
            const std::size_t lo = hi - 1;
            const double frac = (phi - nodes_[lo]) / (nodes_[hi] - nodes_[lo]);
            return densities_[lo] + frac * (densities_[hi] - densities_[lo]);
        }
    }
    return 0.0;  // unreachable
}

double AngularPdf::integral_check() const {
    if (kind_ == Kind::Tabulated) {
        double total = 0.0;
        const std::size_t m = nodes_.size();
        for (std::size_t i = 0; i + 1 < m; ++i)
            total += 0.5 * (densities_[i] + densities_[i + 1]) * (nodes_[i + 1] - nodes_[i]);
        total += 0.5 * (densities_[m - 1] + densities_[0]) * (2.0 * M_PI - (nodes_[m - 1] - nodes_[0]));
        return total;
    }
    // Periodic trapezoid rule; spectrally accurate for the smooth variants.
    const double h = 2.0 * M_PI / kCheckNodes;
    double sum = 0.0;
    for (int k = 0; k < kCheckNodes; ++k) sum += value(-M_PI + h * k);
    return sum * h;
}

void AngularPdf::build_quantile_table() {
    // March the CDF on a fine uniform angle grid, then invert it onto a
    // uniform probability grid. The marching grid matches the table size, so
    // even a kappa ~ 1e4 spike (width ~ 1/sqrt(kappa)) spans ~100 cells.
    const int grid = kQuantileSize;
    const double h = 2.0 * M_PI / grid;
    std::vector<double> cdf(grid + 1, 0.0);
    double prev = value(-M_PI);
    for (int i = 1; i <= grid; ++i) {
        const double cur = value(-M_PI + h * i);
        cdf[i] = cdf[i - 1] + 0.5 * (prev + cur) * h;
        prev = cur;
    }
    const double total = cdf[grid];
    if (!(total > 0.0)) throw std::invalid_argument("AngularPdf: zero-mass density");
    for (double& c : cdf) c /= total;
    cdf[grid] = 1.0;

    auto table = std::make_shared<std::vector<double>>(kQuantileSize + 1);
    auto& q = *table;
    int seg = 0;
    for (int j = 0; j <= kQuantileSize; ++j) {
        const double u = static_cast<double>(j) / kQuantileSize;
        while (seg < grid && cdf[seg + 1] < u) ++seg;
        const double lo = cdf[seg], hi = cdf[seg + 1];
        const double frac = (hi > lo) ? (u - lo) / (hi - lo) : 0.0;
        q[j] = -M_PI + h * (seg + frac);
    }
    q[0] = -M_PI;
    quantile_ = std::move(table);
}

double AngularPdf::sample(RandomStream& rng) const {
    if (kind_ == Kind::Uniform) return -M_PI + 2.0 * M_PI * rng.uniform01();
    const double u = rng.uniform01();
    const double t = u * kQuantileSize;
    const int i = std::min(static_cast<int>(t), kQuantileSize - 1);
    const double frac = t - i;
    const auto& q = *quantile_;
    return normalize_angle(q[i] + frac * (q[i + 1] - q[i]));
}

GeneralizedOneRing::GeneralizedOneRing(double center_distance, double center_angle,
                                       double radius, AngularPdf angular_pdf)
    : S_(center_distance), Psi_(center_angle), R_(radius), pdf_(std::move(angular_pdf)) {
    if (!(S_ >= 0.0)) throw std::invalid_argument("GeneralizedOneRing: center distance must be >= 0");
    if (!(R_ > 0.0)) throw std::invalid_argument("GeneralizedOneRing: radius must be > 0");
    if (!(std::fabs(Psi_) < M_PI / 2.0))
        throw std::invalid_argument("GeneralizedOneRing: center angle must satisfy |Psi| < pi/2");
}

PowerLocationSpectrum PowerLocationSpectrum::ring(GeneralizedOneRing ring) {
    PowerLocationSpectrum p;
    p.kind_ = Kind::Ring;
    p.ring_.emplace(std::move(ring));
    return p;
}

PowerLocationSpectrum PowerLocationSpectrum::point_set(std::vector<PolarPoint> points,
                                                       std::vector<double> weights) {
    if (points.empty() || points.size() != weights.size())
        throw std::invalid_argument("PowerLocationSpectrum: point set needs matching points/weights");
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].radius > 0.0))
            throw std::invalid_argument("PowerLocationSpectrum: point radii must be strictly positive");
        if (!(weights[i] >= 0.0))
            throw std::invalid_argument("PowerLocationSpectrum: weights must be non-negative");
        total += weights[i];
    }
    if (std::fabs(total - 1.0) > 1e-9)
        throw std::invalid_argument("PowerLocationSpectrum: point-set weights must sum to 1 (within 1e-9)");

    PowerLocationSpectrum p;
    p.kind_ = Kind::PointSet;
    p.nodes_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        p.nodes_.push_back({points[i], weights[i] / total});
    p.build_cdf();
    return p;
}

PowerLocationSpectrum PowerLocationSpectrum::tabulated_polar(std::vector<double> radii,
                                                             std::vector<double> angles,
                                                             std::vector<double> density_grid) {
    const std::size_t nr = radii.size();
    const std::size_t nt = angles.size();
    if (nr < 1 || nt < 1 || density_grid.size() != nr * nt)
        throw std::invalid_argument("PowerLocationSpectrum: grid dimensions do not match density table");
    for (std::size_t i = 0; i < nr; ++i) {
        if (!(radii[i] > 0.0))
            throw std::invalid_argument("PowerLocationSpectrum: grid radii must be strictly positive");
        if (i > 0 && !(radii[i] > radii[i - 1]))
            throw std::invalid_argument("PowerLocationSpectrum: grid radii must be strictly ascending");
    }
    for (std::size_t j = 0; j < nt; ++j) {
        if (!(angles[j] >= -M_PI && angles[j] < M_PI))
            throw std::invalid_argument("PowerLocationSpectrum: grid angles must lie in [-pi, pi)");
        if (j > 0 && !(angles[j] > angles[j - 1]))
            throw std::invalid_argument("PowerLocationSpectrum: grid angles must be strictly ascending");
    }

    // Midpoint cell measures; angle cells wrap periodically.
    auto spacing = [](const std::vector<double>& v, std::size_t i, bool periodic) {
        const std::size_t m = v.size();
        if (m == 1) return periodic ? 2.0 * M_PI : 1.0;
        if (periodic) {
            const double lo = (i == 0) ? v.back() - 2.0 * M_PI : v[i - 1];
            const double hi = (i + 1 == m) ? v.front() + 2.0 * M_PI : v[i + 1];
            return 0.5 * (hi - lo);
        }
        if (i == 0) return v[1] - v[0];
        if (i + 1 == m) return v[m - 1] - v[m - 2];
        return 0.5 * (v[i + 1] - v[i - 1]);
    };

    PowerLocationSpectrum p;
    p.kind_ = Kind::TabulatedPolar;
    double total = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
        const double dr = spacing(radii, i, false);
        for (std::size_t j = 0; j < nt; ++j) {
            const double f = density_grid[i * nt + j];
            if (!(f >= 0.0))
                throw std::invalid_argument("PowerLocationSpectrum: grid densities must be non-negative");
            const double dt = spacing(angles, j, true);
            const double mass = f * radii[i] * dr * dt;  // f(s) r dr dtheta
            if (mass > 0.0) {
                p.nodes_.push_back({PolarPoint(radii[i], angles[j]), mass});
                p.cell_dr_.push_back(dr);
                p.cell_dt_.push_back(dt);
            }
            total += mass;
        }
    }
    if (!(total > 0.0))
        throw std::invalid_argument("PowerLocationSpectrum: tabulated grid has zero mass");
    for (auto& n : p.nodes_) n.weight /= total;
    p.build_cdf();
    return p;
}

void PowerLocationSpectrum::build_cdf() {
    cdf_.resize(nodes_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        acc += nodes_[i].weight;
        cdf_[i] = acc;
    }
    if (!cdf_.empty()) cdf_.back() = 1.0;
}

const GeneralizedOneRing& PowerLocationSpectrum::as_ring() const {
    if (kind_ != Kind::Ring)
        throw std::logic_error("PowerLocationSpectrum: not a ring spectrum");
    return *ring_;
}

const std::vector<WeightedLocation>& PowerLocationSpectrum::discrete_nodes() const {
    if (kind_ == Kind::Ring)
        throw std::logic_error("PowerLocationSpectrum: ring spectrum has no discrete nodes");
    return nodes_;
}

PolarPoint PowerLocationSpectrum::sample(RandomStream& rng) const {
    if (kind_ == Kind::Ring) {
        const double phi = ring_->angular_pdf().sample(rng);
        const Vec2 p = ring_->point(phi);
        return PolarPoint(std::sqrt(p.x * p.x + p.y * p.y), std::atan2(p.y, p.x));
    }
    const double u = rng.uniform01();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t i = std::min(static_cast<std::size_t>(it - cdf_.begin()), nodes_.size() - 1);
    if (kind_ == Kind::PointSet) return nodes_[i].location;
    // Tabulated polar: uniform jitter within the cell, keeping the radius positive.
    const double r0 = nodes_[i].location.radius;
    const double t0 = nodes_[i].location.angle;
    const double rlo = std::max(r0 - 0.5 * cell_dr_[i], 0.25 * r0);
    const double rhi = r0 + 0.5 * cell_dr_[i];
    const double r = rng.uniform(rlo, rhi);
    const double t = t0 + cell_dt_[i] * (rng.uniform01() - 0.5);
    return PolarPoint(r, t);
}

}  // namespace nfcorr
