#pragma once

// The mixing measure of the edge-reinforced random walk on the simplex-like
// state space {y : y_e > 0, y_{e0} = 1}: explicit density, normalizing
// constant, closed-form annealed path probabilities, and a sampler realized
// through independent Gamma edge weights and one mixing-field draw.
//
// With vertex sums y_i = sum_{e ni i} y_e and D(y) the spanning-tree
// polynomial in the conductances y,
//
//   M^{(a)}_{i0}(dy) = C(a, i0) sqrt(y_{i0})
//                      prod_e y_e^{a_e} / prod_i y_i^{(a_i+1)/2}
//                      sqrt(D(y)) prod_{e != e0} dy_e / y_e,
//
//   C(a, i0) = 2^{1 - |V| + sum_e a_e} / sqrt(pi)^{|V|-1}
//              * prod_i Gamma((a_i + 1 - 1_{i=i0}) / 2) / prod_e Gamma(a_e),
//
// where a_i = sum_{e ni i} a_e. ERRW(a) started at i0 is the y-mixture of
// reversible random walks, which gives every annealed path probability as a
// ratio of two C constants.

#include "mvig/graph.hpp"
#include "mvig/mixing_field.hpp"
#include "mvig/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mvig {

// a_i = sum of initial weights over edges incident to i.
inline std::vector<double> magic_vertex_weights(const Network& net,
                                                const std::vector<double>& a) {
    if (a.size() != net.edges().size())
        throw std::invalid_argument("magic: |a| != |E|");
    std::vector<double> av(net.size(), 0.0);
    for (std::size_t e = 0; e < a.size(); ++e) {
        if (!(a[e] > 0.0))
            throw std::invalid_argument("magic: a must be > 0");
        av[net.edges()[e].u] += a[e];
        av[net.edges()[e].v] += a[e];
    }
    return av;
}

inline double log_constant_c(const Network& net, const std::vector<double>& a,
                             int i0) {
    if (i0 < 0 || i0 >= net.size())
        throw std::invalid_argument("magic: vertex out of range");
    const std::vector<double> av = magic_vertex_weights(net, a);
    double sum_a = 0.0;
    for (double v : a) sum_a += v;

    double log_c = (1.0 - net.size() + sum_a) * std::log(2.0) -
                   0.5 * (net.size() - 1) *
                       std::log(3.14159265358979323846);
    for (int i = 0; i < net.size(); ++i)
        log_c += std::lgamma(0.5 * (av[i] + 1.0 - (i == i0 ? 1.0 : 0.0)));
    for (double v : a) log_c -= std::lgamma(v);
    return log_c;
}

// log density of M^{(a)}_{i0} at y (y_{e0} = 1 required) with respect to
// prod_{e != e0} dy_e / y_e.
inline double log_density_magic(const Network& net,
                                const std::vector<double>& a, int i0, int e0,
                                const std::vector<double>& y) {
    if (y.size() != net.edges().size())
        throw std::invalid_argument("magic: |y| != |E|");
    if (e0 < 0 || e0 >= static_cast<int>(net.edges().size()))
        throw std::invalid_argument("magic: reference edge out of range");
    for (double v : y)
        if (!(v > 0.0)) throw std::invalid_argument("magic: y must be > 0");
    if (std::abs(y[e0] - 1.0) > 1e-12)
        throw std::invalid_argument("magic: y must satisfy y_{e0} = 1");

    const std::vector<double> av = magic_vertex_weights(net, a);
    std::vector<double> yv(net.size(), 0.0);
    for (std::size_t e = 0; e < y.size(); ++e) {
        yv[net.edges()[e].u] += y[e];
        yv[net.edges()[e].v] += y[e];
    }

    double log_f = log_constant_c(net, a, i0) + 0.5 * std::log(yv[i0]);
    for (std::size_t e = 0; e < y.size(); ++e) log_f += a[e] * std::log(y[e]);
    for (int i = 0; i < net.size(); ++i)
        log_f -= 0.5 * (av[i] + 1.0) * std::log(yv[i]);

    // spanning-tree polynomial in the conductances y: reuse the u-weighted
    // Laplacian with u = 0 over the y-weighted network
    std::vector<Edge> yedges = net.edges();
    for (std::size_t e = 0; e < y.size(); ++e) yedges[e].w = y[e];
    const Network ynet(net.size(), std::move(yedges));
    log_f += 0.5 * log_spanning_tree_polynomial(
                       ynet, std::vector<double>(net.size(), 0.0));
    return log_f;
}

// Independent W_e ~ Gamma(a_e, 1).
inline std::vector<double> sample_mixed_weights(const Network& net,
                                                const std::vector<double>& a,
                                                Rng& rng) {
    if (a.size() != net.edges().size())
        throw std::invalid_argument("magic: |a| != |E|");
    std::vector<double> w(a.size());
    for (std::size_t e = 0; e < a.size(); ++e) {
        if (!(a[e] > 0.0))
            throw std::invalid_argument("magic: a must be > 0");
        w[e] = rng.gamma(a[e], 1.0);
    }
    return w;
}

// One draw from M^{(a)}_{i0}: W_e ~ Gamma(a_e, 1) independently, u a mixing
// field for (W, phi = 1) based at i0, then y_e = W_e e^{u_i + u_j}
// normalized so y_{e0} = 1.
inline std::vector<double> sample_magic_point(const Network& net,
                                              const std::vector<double>& a,
                                              int i0, int e0, Rng& rng) {
    if (e0 < 0 || e0 >= static_cast<int>(net.edges().size()))
        throw std::invalid_argument("magic: reference edge out of range");
    const std::vector<double> w = sample_mixed_weights(net, a, rng);
    std::vector<Edge> wedges = net.edges();
    for (std::size_t e = 0; e < w.size(); ++e) wedges[e].w = w[e];
    const Network wnet(net.size(), std::move(wedges));
    const USample us =
        sample_u(wnet, std::vector<double>(net.size(), 1.0), i0, rng);

    std::vector<double> y(w.size());
    for (std::size_t e = 0; e < w.size(); ++e)
        y[e] = w[e] * std::exp(us.u[net.edges()[e].u] +
                               us.u[net.edges()[e].v]);
    const double ref = y[e0];
    for (double& v : y) v /= ref;
    return y;
}

// Path probability of the reversible walk in conductances y:
//   p^y(sigma) = prod_k y_{e_k} / y_{sigma_k}.
inline double markov_path_probability(const Network& net,
                                      const std::vector<double>& y,
                                      const std::vector<int>& path) {
    if (y.size() != net.edges().size())
        throw std::invalid_argument("magic: |y| != |E|");
    if (path.empty()) throw std::invalid_argument("magic: empty path");
    std::vector<double> yv(net.size(), 0.0);
    for (std::size_t e = 0; e < y.size(); ++e) {
        yv[net.edges()[e].u] += y[e];
        yv[net.edges()[e].v] += y[e];
    }
    double prob = 1.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const int e = net.edge_index(path[k], path[k + 1]);
        if (e < 0) throw std::invalid_argument("magic: path uses a non-edge");
        prob *= y[e] / yv[path[k]];
    }
    return prob;
}

// Annealed (ERRW) probability of a finite path started at i0, in closed form:
//   integral p^y(sigma) dM^{(a)}_{i0}(y) = C(a, i0) / C(a + N, sigma_end),
// N(e) the number of crossings of e by sigma.
inline double path_probability_closed(const Network& net,
                                      const std::vector<double>& a, int i0,
                                      const std::vector<int>& path) {
    if (path.empty() || path.front() != i0)
        throw std::invalid_argument("magic: path must start at i0");
    std::vector<double> tilde = a;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const int e = net.edge_index(path[k], path[k + 1]);
        if (e < 0) throw std::invalid_argument("magic: path uses a non-edge");
        tilde[e] += 1.0;
    }
    return std::exp(log_constant_c(net, a, i0) -
                    log_constant_c(net, tilde, path.back()));
}

} // namespace mvig
