#include "nfcorr/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>

#include "nfcorr/parallel.hpp"
#include "nfcorr/special.hpp"

namespace nfcorr {

namespace {

constexpr double kSingularityWavelengthFraction = 1e-6;

// Packed upper-triangle accumulator with separate real/imaginary planes; the
// rank-1 update is the hot loop of every near-field build.
struct TriAccumulator {
    int n = 0;
    std::vector<double> re, im;

    explicit TriAccumulator(int size)
        : n(size),
          re(static_cast<std::size_t>(size) * (size + 1) / 2, 0.0),
          im(static_cast<std::size_t>(size) * (size + 1) / 2, 0.0) {}

    // Adds w * v v^H restricted to i <= j.
    void rank1(double w, const double* vre, const double* vim) {
        std::size_t k = 0;
        for (int i = 0; i < n; ++i) {
            const double a = w * vre[i];
            const double b = w * vim[i];
            const double* pr = vre + i;
            const double* pi = vim + i;
            double* outr = re.data() + k;
            double* outi = im.data() + k;
            const int len = n - i;
            for (int j = 0; j < len; ++j) {
                outr[j] += a * pr[j] + b * pi[j];
                outi[j] += b * pr[j] - a * pi[j];
            }
            k += static_cast<std::size_t>(len);
        }
    }

    void add(const TriAccumulator& o) {
        for (std::size_t k = 0; k < re.size(); ++k) {
            re[k] += o.re[k];
            im[k] += o.im[k];
        }
    }
};

double max_abs_diff(const TriAccumulator& a, const TriAccumulator& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.re.size(); ++k) {
        const double dr = a.re[k] - b.re[k];
        const double di = a.im[k] - b.im[k];
        worst = std::max(worst, std::sqrt(dr * dr + di * di));
    }
    return worst;
}

// Fills v_k (element-wise real/imag parts) for quadrature node k and returns
// the node weight (already scaled by beta0).
using NodeEval = std::function<double(int k, std::span<double> vre, std::span<double> vim)>;

// Block decomposition depends on the node count only, and blocks are combined
// in a fixed pairwise tree, so the result is independent of the worker count.
TriAccumulator assemble_rank1(int n, int num_nodes, const NodeEval& eval) {
    const int block = std::max(64, num_nodes / 16);
    const std::size_t num_blocks = static_cast<std::size_t>((num_nodes + block - 1) / block);
    std::vector<TriAccumulator> parts(num_blocks, TriAccumulator(n));

    parallel_for(num_blocks, [&](std::size_t b) {
        std::vector<double> vre(static_cast<std::size_t>(n));
        std::vector<double> vim(static_cast<std::size_t>(n));
        const int lo = static_cast<int>(b) * block;
        const int hi = std::min(num_nodes, lo + block);
        for (int k = lo; k < hi; ++k) {
            const double w = eval(k, vre, vim);
            parts[b].rank1(w, vre.data(), vim.data());
        }
    });

    for (std::size_t stride = 1; stride < num_blocks; stride *= 2)
        for (std::size_t i = 0; i + stride < num_blocks; i += 2 * stride)
            parts[i].add(parts[i + stride]);
    return std::move(parts[0]);
}

CorrelationMatrix matrix_from_tri(const TriAccumulator& acc, const ArrayGeometry& geom,
                                  double beta0, std::string tag) {
    CorrelationMatrix m(geom, beta0, std::move(tag));
    const int n = acc.n;
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j, ++k) m.at(i, j) = {acc.re[k], acc.im[k]};
    m.mirror_from_upper();
    return m;
}

// Normalized von Mises/uniform/tabulated weights on a K-node periodic grid.
// Normalizing by the discrete mass (rather than 2pi/K alone) keeps the
// zero-lag entry at beta0 exactly.
struct AngularGrid {
    std::vector<double> phi;
    std::vector<double> weight;
};

AngularGrid angular_grid(const AngularPdf& pdf, int num_nodes, double beta0) {
    AngularGrid g;
    g.phi.resize(num_nodes);
    g.weight.resize(num_nodes);
    double mass = 0.0;
    for (int k = 0; k < num_nodes; ++k) {
        g.phi[k] = -M_PI + 2.0 * M_PI * k / num_nodes;
        g.weight[k] = pdf.value(g.phi[k]);
        mass += g.weight[k];
    }
    if (!(mass > 0.0)) throw std::invalid_argument("angular quadrature: zero-mass density");
    const double scale = beta0 / mass;
    for (double& w : g.weight) w *= scale;
    return g;
}

[[noreturn]] void throw_singular(int node, double phi, int element, double dist) {
    throw singularity_error("quadrature node " + std::to_string(node) + " (phi=" +
                            std::to_string(phi) + ") is " + std::to_string(dist) +
                            " m from array element " + std::to_string(element) +
                            "; the correlation integrand diverges there");
}

// Shared driver: evaluates the accumulator at the initial node count, then
// doubles until converged or the doubling budget is exhausted.
CorrelationMatrix refine_rank1(const ArrayGeometry& geom, const QuadratureSpec& quad,
                               double beta0, std::string tag,
                               const std::function<NodeEval(int)>& make_eval) {
    quad.validate();
    const int n = geom.num_elements();
    int nodes = quad.node_count;
    TriAccumulator acc = assemble_rank1(n, nodes, make_eval(nodes));
    bool converged = false;
    for (int pass = 0; pass < quad.max_doublings; ++pass) {
        const int next_nodes = nodes * 2;
        TriAccumulator refined = assemble_rank1(n, next_nodes, make_eval(next_nodes));
        const double delta = max_abs_diff(acc, refined);
        acc = std::move(refined);
        nodes = next_nodes;
        if (delta <= quad.refinement_tolerance * beta0) {
            converged = true;
            break;
        }
    }
    CorrelationMatrix m = matrix_from_tri(acc, geom, beta0, std::move(tag));
    m.nodes_used = nodes;
    m.quadrature_converged = converged;
    return m;
}

// Far-field lag integrals rho_l = beta0 sum_k w_k e^{-j (2pi/lambda) d l alpha_k},
// where alpha_k is the effective sine of the arrival angle at node k.
std::vector<std::complex<double>> lag_vector(const ArrayGeometry& geom,
                                             const std::vector<double>& alpha,
                                             const std::vector<double>& weight) {
    const int n = geom.num_elements();
    const double step = geom.wavenumber() * geom.spacing();
    std::vector<std::complex<double>> rho(static_cast<std::size_t>(n));
    const std::size_t num_nodes = alpha.size();
    // One lag per task; every lag is summed sequentially over all nodes, so
    // the result does not depend on the parallel grain.
    const std::size_t block = 16;
    const std::size_t num_blocks = (static_cast<std::size_t>(n) + block - 1) / block;
    parallel_for(num_blocks, [&](std::size_t b) {
        for (std::size_t l = b * block; l < std::min<std::size_t>(n, (b + 1) * block); ++l) {
            double sr = 0.0, si = 0.0;
            for (std::size_t k = 0; k < num_nodes; ++k) {
                const double th = -step * static_cast<double>(l) * alpha[k];
                sr += weight[k] * std::cos(th);
                si += weight[k] * std::sin(th);
            }
            rho[l] = {sr, si};
        }
    });
    return rho;
}

double max_abs_diff(const std::vector<std::complex<double>>& a,
                    const std::vector<std::complex<double>>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

CorrelationMatrix toeplitz_from_lags(const std::vector<std::complex<double>>& rho,
                                     const ArrayGeometry& geom, double beta0, std::string tag) {
    const int n = geom.num_elements();
    CorrelationMatrix m(geom, beta0, std::move(tag));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int lag = j - i;
            m.at(i, j) = lag >= 0 ? rho[static_cast<std::size_t>(lag)]
                                  : std::conj(rho[static_cast<std::size_t>(-lag)]);
        }
    for (int i = 0; i < n; ++i) m.at(i, i) = {m.at(i, i).real(), 0.0};
    return m;
}

// Effective sine alpha(phi) per far-field variant, evaluated on a fresh grid
// for each refinement pass.
CorrelationMatrix refine_toeplitz(const AngularPdf& pdf, const ArrayGeometry& geom,
                                  const QuadratureSpec& quad, double beta0, std::string tag,
                                  const std::function<double(double)>& alpha_of_phi) {
    quad.validate();
    int nodes = quad.node_count;
    auto lags_at = [&](int k) {
        AngularGrid g = angular_grid(pdf, k, beta0);
        std::vector<double> alpha(g.phi.size());
        for (std::size_t i = 0; i < g.phi.size(); ++i) alpha[i] = alpha_of_phi(g.phi[i]);
        return lag_vector(geom, alpha, g.weight);
    };
    std::vector<std::complex<double>> rho = lags_at(nodes);
    bool converged = false;
    for (int pass = 0; pass < quad.max_doublings; ++pass) {
        const int next_nodes = nodes * 2;
        std::vector<std::complex<double>> refined = lags_at(next_nodes);
        const double delta = max_abs_diff(rho, refined);
        rho = std::move(refined);
        nodes = next_nodes;
        if (delta <= quad.refinement_tolerance * beta0) {
            converged = true;
            break;
        }
    }
    CorrelationMatrix m = toeplitz_from_lags(rho, geom, beta0, std::move(tag));
    m.nodes_used = nodes;
    m.quadrature_converged = converged;
    return m;
}

struct ElementAxis {
    std::vector<double> y;  // n d for each storage index
    std::vector<int> index;  // signed element index
};

ElementAxis element_axis(const ArrayGeometry& geom) {
    ElementAxis ax;
    const int n = geom.num_elements();
    ax.y.resize(static_cast<std::size_t>(n));
    ax.index.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ax.index[i] = geom.min_index() + i;
        ax.y[i] = ax.index[i] * geom.spacing();
    }
    return ax;
}

// v_k(n) = (r/r_n) e^{-j (2pi/lambda) r_n} for a scatterer at Cartesian (x, y).
// Throws through throw_singular when the point touches an element.
void fill_spherical_vector(double x, double y, double r, const ElementAxis& ax,
                           double wavenumber, double singular_dist, int node_label,
                           double phi_label, std::span<double> vre, std::span<double> vim) {
    for (std::size_t i = 0; i < ax.y.size(); ++i) {
        const double dy = y - ax.y[i];
        const double rn = std::sqrt(x * x + dy * dy);
        if (rn < singular_dist) throw_singular(node_label, phi_label, ax.index[i], rn);
        const double amp = r / rn;
        const double ph = -wavenumber * rn;
        vre[i] = amp * std::cos(ph);
        vim[i] = amp * std::sin(ph);
    }
}

CorrelationMatrix nf_from_discrete_nodes(const PowerLocationSpectrum& pls,
                                         const ArrayGeometry& geom, double beta0,
                                         std::string tag) {
    const auto& nodes = pls.discrete_nodes();
    const ElementAxis ax = element_axis(geom);
    const double k_wave = geom.wavenumber();
    const double singular = kSingularityWavelengthFraction * geom.wavelength();
    NodeEval eval = [&](int k, std::span<double> vre, std::span<double> vim) {
        const auto& node = nodes[static_cast<std::size_t>(k)];
        const Vec2 p = node.location.to_cartesian();
        fill_spherical_vector(p.x, p.y, node.location.radius, ax, k_wave, singular, k,
                              node.location.angle, vre, vim);
        return beta0 * node.weight;
    };
    TriAccumulator acc = assemble_rank1(geom.num_elements(), static_cast<int>(nodes.size()), eval);
    CorrelationMatrix m = matrix_from_tri(acc, geom, beta0, std::move(tag));
    m.nodes_used = static_cast<int>(nodes.size());
    m.quadrature_converged = true;  // exact weighted sum
    return m;
}

void require_von_mises_family(const GeneralizedOneRing& ring, const char* where) {
    if (!ring.angular_pdf().is_von_mises_family())
        throw std::invalid_argument(std::string(where) +
                                    ": closed form requires a uniform or von Mises angular density");
}

void require_positive_center_distance(const GeneralizedOneRing& ring, const char* where) {
    if (!(ring.center_distance() > 0.0))
        throw std::domain_error(std::string(where) + ": undefined for S = 0");
}

struct LemmaTerms {
    std::vector<double> sqrt_a, inv_sqrt_a, x;  // x = n d / S
};

LemmaTerms lemma_terms(const GeneralizedOneRing& ring, const ArrayGeometry& geom) {
    const ElementAxis ax = element_axis(geom);
    const double S = ring.center_distance();
    const double sin_psi = std::sin(ring.center_angle());
    LemmaTerms t;
    const std::size_t n = ax.y.size();
    t.sqrt_a.resize(n);
    t.inv_sqrt_a.resize(n);
    t.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = ax.y[i] / S;
        const double a = 1.0 + x * x - 2.0 * x * sin_psi;
        if (!(a > 0.0)) throw std::domain_error("lemma terms: a_n not positive");
        t.x[i] = x;
        t.sqrt_a[i] = std::sqrt(a);
        t.inv_sqrt_a[i] = 1.0 / t.sqrt_a[i];
    }
    return t;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (node_count < 64) throw std::invalid_argument("QuadratureSpec: node_count must be >= 64");
    if ((node_count & (node_count - 1)) != 0)
        throw std::invalid_argument("QuadratureSpec: node_count must be a power of two");
    if (!(refinement_tolerance > 0.0))
        throw std::invalid_argument("QuadratureSpec: refinement_tolerance must be > 0");
    if (max_doublings < 0) throw std::invalid_argument("QuadratureSpec: max_doublings must be >= 0");
}

CorrelationMatrix::CorrelationMatrix(ArrayGeometry geometry, double beta0, std::string method_tag)
    : geom_(geometry), n_(geometry.num_elements()), beta0_(beta0), tag_(std::move(method_tag)),
      data_(static_cast<std::size_t>(n_) * n_, std::complex<double>(0.0, 0.0)) {
    if (!(beta0 > 0.0)) throw std::invalid_argument("CorrelationMatrix: beta0 must be > 0");
}

CorrelationMatrix CorrelationMatrix::from_entries(ArrayGeometry geometry, double beta0,
                                                  std::string method_tag,
                                                  std::vector<std::complex<double>> row_major) {
    const std::size_t n = static_cast<std::size_t>(geometry.num_elements());
    if (row_major.size() != n * n)
        throw std::invalid_argument("CorrelationMatrix: entry count does not match geometry");
    CorrelationMatrix m(geometry, beta0, std::move(method_tag));
    m.data_ = std::move(row_major);
    return m;
}

double CorrelationMatrix::trace_real() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += at(i, i).real();
    return t;
}

bool CorrelationMatrix::hermitian_exact() const {
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) {
            const std::complex<double> u = at(i, j);
            const std::complex<double> l = at(j, i);
            if (!(u.real() == l.real() && u.imag() == -l.imag())) return false;
        }
    return true;
}

void CorrelationMatrix::mirror_from_upper() {
    for (int i = 0; i < n_; ++i) {
        at(i, i) = {at(i, i).real(), 0.0};
        for (int j = i + 1; j < n_; ++j) at(j, i) = std::conj(at(i, j));
    }
}

CorrelationMatrix nf_correlation_general(const PowerLocationSpectrum& pls,
                                         const ArrayGeometry& geom,
                                         const QuadratureSpec& quad, double beta0) {
    if (pls.kind() != PowerLocationSpectrum::Kind::Ring)
        return nf_from_discrete_nodes(pls, geom, beta0, "nf-general");

    const GeneralizedOneRing& ring = pls.as_ring();
    const ElementAxis ax = element_axis(geom);
    const double k_wave = geom.wavenumber();
    const double singular = kSingularityWavelengthFraction * geom.wavelength();
    auto make_eval = [&, beta0](int num_nodes) -> NodeEval {
        auto grid = std::make_shared<AngularGrid>(angular_grid(ring.angular_pdf(), num_nodes, beta0));
        return [&, grid](int k, std::span<double> vre, std::span<double> vim) {
            const double phi = grid->phi[static_cast<std::size_t>(k)];
            // Route through the generic polar-point machinery; the one-ring
            // builder below keeps its own specialized parameterization.
            const Vec2 p = ring.point(phi);
            const PolarPoint s(std::sqrt(p.x * p.x + p.y * p.y), std::atan2(p.y, p.x));
            const Vec2 cart = s.to_cartesian();
            fill_spherical_vector(cart.x, cart.y, s.radius, ax, k_wave, singular, k, phi, vre, vim);
            return grid->weight[static_cast<std::size_t>(k)];
        };
    };
    return refine_rank1(geom, quad, beta0, "nf-general", make_eval);
}

CorrelationMatrix ff_correlation(const AngularPdf& pas, const ArrayGeometry& geom,
                                 const QuadratureSpec& quad, double beta0) {
    return refine_toeplitz(pas, geom, quad, beta0, "ff-pas",
                           [](double theta) { return std::sin(theta); });
}

CorrelationMatrix nf_one_ring_correlation(const GeneralizedOneRing& ring,
                                          const ArrayGeometry& geom,
                                          const QuadratureSpec& quad, double beta0) {
    const ElementAxis ax = element_axis(geom);
    const double k_wave = geom.wavenumber();
    const double singular = kSingularityWavelengthFraction * geom.wavelength();
    const double S = ring.center_distance();
    const double Psi = ring.center_angle();
    const double R = ring.radius();
    const double cx = S * std::cos(Psi);
    const double cy = S * std::sin(Psi);
    auto make_eval = [&, beta0](int num_nodes) -> NodeEval {
        auto grid = std::make_shared<AngularGrid>(angular_grid(ring.angular_pdf(), num_nodes, beta0));
        return [&, grid](int k, std::span<double> vre, std::span<double> vim) {
            const double phi = grid->phi[static_cast<std::size_t>(k)];
            const double x = cx + R * std::cos(phi);
            const double y = cy + R * std::sin(phi);
            const double r0 = std::sqrt(x * x + y * y);
            fill_spherical_vector(x, y, r0, ax, k_wave, singular, k, phi, vre, vim);
            return grid->weight[static_cast<std::size_t>(k)];
        };
    };
    return refine_rank1(geom, quad, beta0, "nf-integral", make_eval);
}

CorrelationMatrix ff_one_ring_correlation(const GeneralizedOneRing& ring,
                                          const ArrayGeometry& geom,
                                          const QuadratureSpec& quad, double beta0) {
    const double S = ring.center_distance();
    const double Psi = ring.center_angle();
    const double R = ring.radius();
    auto alpha = [S, Psi, R](double phi) {
        const double num = S * std::sin(Psi) + R * std::sin(phi);
        const double den = std::sqrt(S * S + R * R + 2.0 * S * R * std::cos(Psi - phi));
        return num / den;  // den > 0 because R > 0 and |Psi - phi| spans the ring
    };
    return refine_toeplitz(ring.angular_pdf(), geom, quad, beta0, "ff-integral", alpha);
}

CorrelationMatrix nf_lemma2_correlation(const GeneralizedOneRing& ring,
                                        const ArrayGeometry& geom,
                                        const QuadratureSpec& quad, double beta0) {
    require_positive_center_distance(ring, "nf_lemma2_correlation");
    const LemmaTerms t = lemma_terms(ring, geom);
    const double k_wave = geom.wavenumber();
    const double S = ring.center_distance();
    const double Psi = ring.center_angle();
    const double R = ring.radius();
    const std::size_t n = t.x.size();
    auto make_eval = [&, beta0](int num_nodes) -> NodeEval {
        auto grid = std::make_shared<AngularGrid>(angular_grid(ring.angular_pdf(), num_nodes, beta0));
        return [&, grid](int k, std::span<double> vre, std::span<double> vim) {
            const double phi = grid->phi[static_cast<std::size_t>(k)];
            const double cos_pp = std::cos(Psi - phi);
            const double sin_phi = std::sin(phi);
            for (std::size_t i = 0; i < n; ++i) {
                const double b = cos_pp - t.x[i] * sin_phi;
                const double ph = -k_wave * (S * t.sqrt_a[i] + R * b * t.inv_sqrt_a[i]);
                vre[i] = t.inv_sqrt_a[i] * std::cos(ph);
                vim[i] = t.inv_sqrt_a[i] * std::sin(ph);
            }
            return grid->weight[static_cast<std::size_t>(k)];
        };
    };
    return refine_rank1(geom, quad, beta0, "nf-lemma2", make_eval);
}

CorrelationMatrix ff_lemma3_correlation(const GeneralizedOneRing& ring,
                                        const ArrayGeometry& geom,
                                        const QuadratureSpec& quad, double beta0) {
    require_positive_center_distance(ring, "ff_lemma3_correlation");
    const double S = ring.center_distance();
    const double Psi = ring.center_angle();
    const double R = ring.radius();
    auto alpha = [S, Psi, R](double phi) {
        return std::sin(Psi) + (R / S) * std::cos(Psi) * std::sin(phi - Psi);
    };
    return refine_toeplitz(ring.angular_pdf(), geom, quad, beta0, "ff-lemma3", alpha);
}

ClosedFormTerms closed_form_terms(const GeneralizedOneRing& ring, const ArrayGeometry& geom,
                                  int n, int m) {
    require_positive_center_distance(ring, "closed_form_terms");
    if (!geom.contains(n) || !geom.contains(m))
        throw std::out_of_range("closed_form_terms: element index out of range");
    const double S = ring.center_distance();
    const double Psi = ring.center_angle();
    const double R = ring.radius();
    const double k_wave = geom.wavenumber();
    const double d = geom.spacing();
    const double xn = n * d / S;
    const double xm = m * d / S;
    const double an = 1.0 + xn * xn - 2.0 * xn * std::sin(Psi);
    const double am = 1.0 + xm * xm - 2.0 * xm * std::sin(Psi);
    ClosedFormTerms t;
    t.c = k_wave * R * (1.0 / std::sqrt(an) - 1.0 / std::sqrt(am));
    t.d = k_wave * R * d / S * (n / std::sqrt(an) - m / std::sqrt(am));
    t.e = k_wave * R * (n - m) * d * std::cos(Psi) / S;
    return t;
}

namespace {

// Shared scaffolding of the two closed-form readings; `reading` maps
// (x, y, brace) to the Bessel value.
CorrelationMatrix nf_closed_impl(const GeneralizedOneRing& ring, const ArrayGeometry& geom,
                                 double beta0, std::string tag, bool printed_reading) {
    require_positive_center_distance(ring, tag.c_str());
    require_von_mises_family(ring, tag.c_str());
    const LemmaTerms t = lemma_terms(ring, geom);
    const double S = ring.center_distance();
    const double Psi = ring.center_angle();
    const double R = ring.radius();
    const double k_wave = geom.wavenumber();
    const double d = geom.spacing();
    const double kappa = ring.angular_pdf().kappa();
    const double mu = ring.angular_pdf().mu();
    const double i0_kappa = bessel_i0(kappa);
    const double cos_psi = std::cos(Psi);
    const double sin_psi = std::sin(Psi);

    CorrelationMatrix mtx(geom, beta0, std::move(tag));
    const int n = geom.num_elements();
    const std::size_t block = 8;
    const std::size_t num_blocks = (static_cast<std::size_t>(n) + block - 1) / block;
    parallel_for(num_blocks, [&](std::size_t blk) {
        for (std::size_t i = blk * block; i < std::min<std::size_t>(n, (blk + 1) * block); ++i) {
            for (std::size_t j = i; j < static_cast<std::size_t>(n); ++j) {
                const double c = k_wave * R * (t.inv_sqrt_a[i] - t.inv_sqrt_a[j]);
                const double dd = k_wave * R * (t.x[i] * t.inv_sqrt_a[i] - t.x[j] * t.inv_sqrt_a[j]);
                std::complex<double> bessel;
                if (!printed_reading) {
                    const std::complex<double> x(kappa * std::cos(mu), -c * cos_psi);
                    const std::complex<double> y(kappa * std::sin(mu), -(c * sin_psi - dd));
                    bessel = von_mises_characteristic_integral(x, y);
                } else {
                    const std::complex<double> brace(
                        kappa * kappa - c * c - dd * dd + 2.0 * c * dd * sin_psi,
                        2.0 * kappa * (dd * std::sin(mu) - c * std::cos(mu - Psi)));
                    const std::complex<double> arg =
                        std::complex<double>(0.0, 1.0) * std::sqrt(brace);
                    try {
                        bessel = bessel_i0(arg);
                    } catch (const std::range_error&) {
                        bessel = {std::numeric_limits<double>::infinity(), 0.0};
                    }
                }
                const double ph = -k_wave * S * (t.sqrt_a[i] - t.sqrt_a[j]);
                const std::complex<double> pref(std::cos(ph), std::sin(ph));
                const double amp = beta0 * t.inv_sqrt_a[i] * t.inv_sqrt_a[j] / i0_kappa;
                mtx.at(static_cast<int>(i), static_cast<int>(j)) = amp * pref * bessel;
            }
        }
    });
    mtx.mirror_from_upper();
    mtx.quadrature_converged = true;
    return mtx;
}

CorrelationMatrix ff_closed_impl(const GeneralizedOneRing& ring, const ArrayGeometry& geom,
                                 double beta0, std::string tag, bool printed_reading) {
    require_positive_center_distance(ring, tag.c_str());
    require_von_mises_family(ring, tag.c_str());
    const double S = ring.center_distance();
    const double Psi = ring.center_angle();
    const double R = ring.radius();
    const double k_wave = geom.wavenumber();
    const double d = geom.spacing();
    const double kappa = ring.angular_pdf().kappa();
    const double mu = ring.angular_pdf().mu();
    const double i0_kappa = bessel_i0(kappa);

    // Toeplitz: one evaluation per lag l = m - n, so e_nm = -l * 2piRd cosPsi/(lambda S).
    const int n = geom.num_elements();
    std::vector<std::complex<double>> rho(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        const double e = -k_wave * R * l * d * std::cos(Psi) / S;
        std::complex<double> bessel;
        if (!printed_reading) {
            const std::complex<double> x(kappa * std::cos(mu - Psi), 0.0);
            const std::complex<double> y(kappa * std::sin(mu - Psi), e);
            bessel = von_mises_characteristic_integral(x, y);
        } else {
            const std::complex<double> brace(kappa * kappa - e * e,
                                             2.0 * kappa * e * std::sin(mu - Psi));
            try {
                bessel = bessel_i0(std::complex<double>(0.0, 1.0) * std::sqrt(brace));
            } catch (const std::range_error&) {
                bessel = {std::numeric_limits<double>::infinity(), 0.0};
            }
        }
        const double ph = -k_wave * l * d * std::sin(Psi);
        rho[static_cast<std::size_t>(l)] =
            beta0 / i0_kappa * std::complex<double>(std::cos(ph), std::sin(ph)) * bessel;
    }
    CorrelationMatrix mtx = toeplitz_from_lags(rho, geom, beta0, std::move(tag));
    mtx.quadrature_converged = true;
    return mtx;
}

}  // namespace

CorrelationMatrix nf_closed_form(const GeneralizedOneRing& ring, const ArrayGeometry& geom,
                                 double beta0) {
    return nf_closed_impl(ring, geom, beta0, "nf-closed", false);
}

CorrelationMatrix ff_closed_form(const GeneralizedOneRing& ring, const ArrayGeometry& geom,
                                 double beta0) {
    return ff_closed_impl(ring, geom, beta0, "ff-closed", false);
}

CorrelationMatrix nf_closed_form_printed(const GeneralizedOneRing& ring,
                                         const ArrayGeometry& geom, double beta0) {
    return nf_closed_impl(ring, geom, beta0, "nf-closed-printed", true);
}

CorrelationMatrix ff_closed_form_printed(const GeneralizedOneRing& ring,
                                         const ArrayGeometry& geom, double beta0) {
    return ff_closed_impl(ring, geom, beta0, "ff-closed-printed", true);
}

double max_entry_distance(const CorrelationMatrix& a, const CorrelationMatrix& b) {
    if (a.size() != b.size()) throw std::invalid_argument("max_entry_distance: size mismatch");
    double worst = 0.0;
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a.at(i, j) - b.at(i, j)));
    return worst;
}

double frobenius_relative_distance(const CorrelationMatrix& a, const CorrelationMatrix& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("frobenius_relative_distance: size mismatch");
    double num = 0.0, den = 0.0;
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) {
            num += std::norm(a.at(i, j) - b.at(i, j));
            den += std::norm(b.at(i, j));
        }
    return std::sqrt(num / den);
}

}  // namespace nfcorr
