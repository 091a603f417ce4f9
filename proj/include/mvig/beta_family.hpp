#pragma once

// The exponential family nu^{W,theta} of random potentials beta on a network:
// density, Laplace transform, inverse-Gaussian marginals, the theta-rescaling
// that reduces everything to theta = 1, and an exact sequential sampler.
//
// The sampler walks the vertices in a chosen order and draws each pivot of
// the triangular recursion from a one-dimensional GIG(1/2) law whose
// parameters depend only on the earlier pivots:
//
//   x_m ~ const * x^{-1/2} exp(-(theta_m x + r_m^2 / x) / 2),
//   r_m = sum_{j>m} H_{m,j} sqrt(theta_j),
//
// then maps pivots back through Psi (potentials_from_pivots). The last
// vertex, and any vertex with no later couplings, has r = 0 and degenerates
// to a Gamma(1/2) pivot.

#include "mvig/graph.hpp"
#include "mvig/linalg.hpp"
#include "mvig/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mvig {

struct FamilyParams {
    FamilyParams(Network network, std::vector<double> theta_values)
        : net(std::move(network)), theta(std::move(theta_values)) {
        if (static_cast<int>(theta.size()) != net.size())
            throw std::invalid_argument("FamilyParams: |theta| != |V|");
        for (double t : theta)
            if (!(t > 0.0))
                throw std::invalid_argument("FamilyParams: theta must be > 0");
    }

    Network net;
    std::vector<double> theta;
};

struct IgParams {
    double mu = 0.0;
    double lambda = 0.0;
};

inline double sample_inverse_gaussian(const IgParams& p, Rng& rng) {
    if (!(p.mu > 0.0) || !(p.lambda > 0.0))
        throw std::invalid_argument("sample_inverse_gaussian: need mu, lambda > 0");
    return sample_inverse_gaussian_raw(p.mu, p.lambda, rng);
}

// Density proportional to x^{-1/2} exp(-(a x + b / x)/2) on (0, inf).
// b = 0 is the Gamma(1/2, a/2) boundary case; b > 0 is the reciprocal of an
// inverse Gaussian: X = 1/Y with Y ~ IG(sqrt(a/b), a).
inline double sample_gig_half(double a, double b, Rng& rng) {
    if (!(a > 0.0) || b < 0.0)
        throw std::invalid_argument("sample_gig_half: need a > 0, b >= 0");
    if (b == 0.0) return rng.gamma(0.5, 0.5 * a);
    return 1.0 / sample_inverse_gaussian_raw(std::sqrt(a / b), a, rng);
}

// log of the nu^{W,theta} density at beta with respect to Lebesgue d beta:
//   (2/pi)^{n/2} exp(-<theta, beta> + sum_E W_ij sqrt(theta_i theta_j))
//     * prod_i sqrt(theta_i) / sqrt(det(2 beta - P)),
// and -inf outside the cone {2 beta - P > 0}.
inline double log_density_nu(const FamilyParams& p,
                             const std::vector<double>& beta) {
    const int n = p.net.size();
    if (static_cast<int>(beta.size()) != n)
        throw std::invalid_argument("log_density_nu: |beta| != |V|");
    const PotentialMatrix m(p.net, beta);
    const TriangularFactors f = lu_factorize(m, VertexOrdering::identity(n));
    if (!f.positive_definite())
        return -std::numeric_limits<double>::infinity();

    double log_f = 0.5 * n * std::log(2.0 / 3.14159265358979323846);
    for (int i = 0; i < n; ++i) {
        log_f -= p.theta[i] * beta[i];
        log_f += 0.5 * std::log(p.theta[i]);
    }
    for (const Edge& e : p.net.edges())
        log_f += e.w * std::sqrt(p.theta[e.u] * p.theta[e.v]);
    log_f -= 0.5 * f.log_determinant();
    return log_f;
}

// Closed-form Laplace transform E[exp(-<lambda, beta>)]:
//   exp(-sum_E W_ij (sqrt((l_i+t_i)(l_j+t_j)) - sqrt(t_i t_j)))
//     * prod_i sqrt(t_i / (l_i + t_i)),
// defined for lambda_i + theta_i > 0.
inline double laplace_transform(const FamilyParams& p,
                                const std::vector<double>& lambda) {
    const int n = p.net.size();
    if (static_cast<int>(lambda.size()) != n)
        throw std::invalid_argument("laplace_transform: |lambda| != |V|");
    double log_v = 0.0;
    for (int i = 0; i < n; ++i) {
        const double shifted = lambda[i] + p.theta[i];
        if (!(shifted > 0.0))
            throw std::invalid_argument(
                "laplace_transform: need lambda_i + theta_i > 0");
        log_v += 0.5 * (std::log(p.theta[i]) - std::log(shifted));
    }
    for (const Edge& e : p.net.edges())
        log_v -= e.w * (std::sqrt((lambda[e.u] + p.theta[e.u]) *
                                  (lambda[e.v] + p.theta[e.v])) -
                        std::sqrt(p.theta[e.u] * p.theta[e.v]));
    return std::exp(log_v);
}

// Marginal law at vertex i: 1 / (2 theta_i beta_i) is inverse Gaussian with
// lambda = 1 and mu = 1 / sum_{j ~ i} W_ij sqrt(theta_i theta_j). For an
// isolated-looking limit (single vertex) mu is +inf and the law degenerates
// to the reciprocal chi-square, which the IG cdf handles continuously.
inline IgParams marginal_ig_params(const FamilyParams& p, int i) {
    if (i < 0 || i >= p.net.size())
        throw std::invalid_argument("marginal_ig_params: vertex out of range");
    double s = 0.0;
    for (auto [j, w] : p.net.neighbors(i))
        s += w * std::sqrt(p.theta[i] * p.theta[j]);
    return {s > 0.0 ? 1.0 / s : std::numeric_limits<double>::infinity(), 1.0};
}

// The family is a one-parameter-per-vertex tilt of its theta = 1 member:
// beta ~ nu^{W,theta} iff (theta_i beta_i) ~ nu^{W^theta, 1} with
// W^theta_ij = W_ij sqrt(theta_i theta_j). Returns the rescaled parameters.
inline FamilyParams rescale_theta(const FamilyParams& p) {
    std::vector<Edge> edges = p.net.edges();
    for (Edge& e : edges) e.w *= std::sqrt(p.theta[e.u] * p.theta[e.v]);
    return FamilyParams(Network(p.net.size(), std::move(edges)),
                        std::vector<double>(p.net.size(), 1.0));
}

// Exact draw from nu^{W,theta}. The output always lies in {2 beta - P > 0}:
// the pivots are sampled positive and beta = Psi(x) by construction.
inline std::vector<double> sample_beta(const FamilyParams& p,
                                       const VertexOrdering& order, Rng& rng) {
    const int n = p.net.size();
    if (order.size() != n)
        throw std::invalid_argument("sample_beta: ordering size mismatch");

    std::vector<double> x(n, 0.0);
    std::vector<double> h(static_cast<std::size_t>(n) * n, 0.0);
    auto at = [n](int i, int j) -> std::size_t {
        return static_cast<std::size_t>(i) * n + j;
    };
    auto theta_at = [&](int pos) { return p.theta[order.vertex_at(pos)]; };

    for (int m = 0; m < n; ++m) {
        double r = 0.0;
        for (int j = m + 1; j < n; ++j) {
            double hmj = p.net.weight(order.vertex_at(m), order.vertex_at(j));
            for (int k = 0; k < m; ++k)
                hmj += h[at(k, m)] * h[at(k, j)] / x[k];
            h[at(m, j)] = hmj;
            r += hmj * std::sqrt(theta_at(j));
        }
        x[m] = sample_gig_half(theta_at(m), r * r, rng);
    }

    std::vector<double> beta(n, 0.0);
    for (int m = 0; m < n; ++m) {
        double b = 0.5 * x[m];
        for (int k = 0; k < m; ++k)
            b += h[at(k, m)] * h[at(k, m)] / (2.0 * x[k]);
        beta[order.vertex_at(m)] = b;
    }
    return beta;
}

// Convenience overload: identity ordering.
inline std::vector<double> sample_beta(const FamilyParams& p, Rng& rng) {
    return sample_beta(p, VertexOrdering::identity(p.net.size()), rng);
}

} // namespace mvig
