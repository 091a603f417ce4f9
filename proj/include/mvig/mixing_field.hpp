#pragma once

// The change of variables between a potential beta in {2 beta - P > 0} and
// the pair (u, gamma) pinned at a base vertex i0:
//
//   u_j = log( G(i0, j) / G(i0, i0) ),   u_{i0} = 0,
//   gamma = 1 / (2 G(i0, i0)),
//   beta_i = (1/2) sum_j W_ij e^{u_j - u_i} + 1_{i = i0} gamma,
//
// with G = (2 beta - P)^{-1}. Under beta ~ nu^{W, phi^2} the field u has the
// law Q^{W,phi}_{i0} (the mixing field of the vertex-reinforced jump process)
// and gamma is an independent Gamma(1/2, rate phi_{i0}^2) variable. The
// module provides both directions, the density of Q, samplers, the coupled
// two-base construction, and the determinant / Jacobian identities that tie
// the two coordinate systems together.

#include "mvig/beta_family.hpp"
#include "mvig/graph.hpp"
#include "mvig/linalg.hpp"
#include "mvig/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mvig {

struct USample {
    std::vector<double> u;
    double gamma = 0.0;
};

namespace detail {

inline void check_phi(const Network& net, const std::vector<double>& phi) {
    if (static_cast<int>(phi.size()) != net.size())
        throw std::invalid_argument("mixing field: |phi| != |V|");
    for (double v : phi)
        if (!(v > 0.0))
            throw std::invalid_argument("mixing field: phi must be > 0");
}

inline void check_vertex(const Network& net, int i0, const char* who) {
    if (i0 < 0 || i0 >= net.size())
        throw std::invalid_argument(std::string(who) + ": vertex out of range");
}

} // namespace detail

inline std::vector<double> u_from_beta(const Network& net,
                                       const std::vector<double>& beta,
                                       int i0) {
    detail::check_vertex(net, i0, "u_from_beta");
    const std::vector<double> g = green_column(PotentialMatrix(net, beta), i0);
    std::vector<double> u(net.size());
    for (int j = 0; j < net.size(); ++j) u[j] = std::log(g[j] / g[i0]);
    u[i0] = 0.0;
    return u;
}

inline double gamma_from_beta(const Network& net,
                              const std::vector<double>& beta, int i0) {
    detail::check_vertex(net, i0, "gamma_from_beta");
    const std::vector<double> g = green_column(PotentialMatrix(net, beta), i0);
    return 1.0 / (2.0 * g[i0]);
}

inline std::vector<double> beta_from_u_gamma(const Network& net,
                                             const std::vector<double>& u,
                                             double gamma, int i0) {
    detail::check_vertex(net, i0, "beta_from_u_gamma");
    if (static_cast<int>(u.size()) != net.size())
        throw std::invalid_argument("beta_from_u_gamma: |u| != |V|");
    if (u[i0] != 0.0)
        throw std::invalid_argument("beta_from_u_gamma: u must vanish at i0");
    if (!(gamma > 0.0))
        throw std::invalid_argument("beta_from_u_gamma: gamma must be > 0");
    std::vector<double> beta(net.size(), 0.0);
    for (int i = 0; i < net.size(); ++i) {
        double b = (i == i0) ? gamma : 0.0;
        for (auto [j, w] : net.neighbors(i))
            b += 0.5 * w * std::exp(u[j] - u[i]);
        beta[i] = b;
    }
    return beta;
}

// log density of Q^{W,phi}_{i0} at u (u_{i0} = 0) with respect to
// prod_{j != i0} du_j:
//   prod_{j != i0} phi_j / sqrt(2 pi)^{|V|-1} * e^{-sum_j u_j}
//   * exp(-(1/2) sum_E W_ij (e^{u_i-u_j} phi_j^2 + e^{u_j-u_i} phi_i^2
//                            - 2 phi_i phi_j))
//   * sqrt(D(W, u)).
inline double log_density_q(const Network& net, const std::vector<double>& phi,
                            int i0, const std::vector<double>& u) {
    detail::check_phi(net, phi);
    detail::check_vertex(net, i0, "log_density_q");
    if (static_cast<int>(u.size()) != net.size())
        throw std::invalid_argument("log_density_q: |u| != |V|");
    if (u[i0] != 0.0)
        throw std::invalid_argument("log_density_q: u must vanish at i0");

    const int n = net.size();
    double log_f = -0.5 * (n - 1) * std::log(2.0 * 3.14159265358979323846);
    for (int j = 0; j < n; ++j) {
        if (j != i0) log_f += std::log(phi[j]);
        log_f -= u[j];
    }
    for (const Edge& e : net.edges())
        log_f -= 0.5 * (std::exp(u[e.u] - u[e.v]) * phi[e.v] * phi[e.v] +
                        std::exp(u[e.v] - u[e.u]) * phi[e.u] * phi[e.u] -
                        2.0 * phi[e.u] * phi[e.v]) *
                 e.w;
    // Deep in the tails the exchange terms alone put the density below the
    // smallest positive double, while e^{u_i - u_j} can overflow inside the
    // Laplacian of D(W, u); answer -inf without evaluating it.
    if (!(log_f > -2000.0))
        return -std::numeric_limits<double>::infinity();
    log_f += 0.5 * log_spanning_tree_polynomial(net, u);
    return log_f;
}

// One draw of (u, gamma) under Q^{W,phi}_{i0} x Gamma(1/2, phi_{i0}^2),
// realized through a beta draw from nu^{W, phi^2}.
inline USample sample_u(const Network& net, const std::vector<double>& phi,
                        int i0, const VertexOrdering& order, Rng& rng) {
    detail::check_phi(net, phi);
    detail::check_vertex(net, i0, "sample_u");
    std::vector<double> theta(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) theta[i] = phi[i] * phi[i];
    const FamilyParams params(net, std::move(theta));
    const std::vector<double> beta = sample_beta(params, order, rng);
    return {u_from_beta(net, beta, i0), gamma_from_beta(net, beta, i0)};
}

inline USample sample_u(const Network& net, const std::vector<double>& phi,
                        int i0, Rng& rng) {
    return sample_u(net, phi, i0, VertexOrdering::identity(net.size()), rng);
}

// All mixing fields of one underlying potential at once: row i of the result
// is u_from_beta(net, beta, i), i.e. u(i, j) = log(G(i,j)/G(i,i)). The
// diagonal is zero, and symmetry of G gives the coupling identity
//   e^{u(i,j)} G(i,i) = G(i,j) = G(j,i) = e^{u(j,i)} G(j,j).
inline std::vector<std::vector<double>> couple_u_fields(
    const Network& net, const std::vector<double>& beta) {
    std::vector<std::vector<double>> rows(net.size());
    for (int i = 0; i < net.size(); ++i) rows[i] = u_from_beta(net, beta, i);
    return rows;
}

// log |det J| of the map (u_{j != i0}, gamma) -> beta:
//   |J_{Phi^{-1}}| = 2^{-(|V|-1)} e^{-2 sum_j u_j} D(W, u).
inline double log_jacobian_phi_inverse(const Network& net,
                                       const std::vector<double>& u) {
    double sum_u = 0.0;
    for (double v : u) sum_u += v;
    return -(net.size() - 1) * std::log(2.0) - 2.0 * sum_u +
           log_spanning_tree_polynomial(net, u);
}

// log density of Gamma(shape 1/2, rate phi_i0^2) at gamma.
inline double log_density_gamma_half(double rate, double gamma) {
    return 0.5 * std::log(rate) - 0.5 * std::log(3.14159265358979323846) -
           0.5 * std::log(gamma) - rate * gamma;
}

// Residual of the determinant identity
//   det(2 beta - P) = 2 gamma e^{-2 sum_j u_j} D(W, u),
// in log form, relative to max(1, |log det|).
inline double determinant_identity_residual(const Network& net,
                                            const std::vector<double>& beta,
                                            int i0) {
    const double log_det = log_determinant(PotentialMatrix(net, beta));
    const std::vector<double> u = u_from_beta(net, beta, i0);
    const double gamma = gamma_from_beta(net, beta, i0);
    double sum_u = 0.0;
    for (double v : u) sum_u += v;
    const double rhs = std::log(2.0 * gamma) - 2.0 * sum_u +
                       log_spanning_tree_polynomial(net, u);
    return std::abs(log_det - rhs) / std::max(1.0, std::abs(log_det));
}

// Residual of the change-of-variables identity between the two densities:
//   log nu^{W,phi^2}(beta) + log|J_{Phi^{-1}}(u)|
//     = log Q^{W,phi}_{i0}(u) + log f_{Gamma(1/2, phi_{i0}^2)}(gamma),
// evaluated at (u, gamma) = Phi(beta). Zero in exact arithmetic.
inline double change_of_variables_residual(const Network& net,
                                           const std::vector<double>& phi,
                                           int i0,
                                           const std::vector<double>& beta) {
    detail::check_phi(net, phi);
    std::vector<double> theta(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) theta[i] = phi[i] * phi[i];
    const FamilyParams params(net, std::move(theta));

    const std::vector<double> u = u_from_beta(net, beta, i0);
    const double gamma = gamma_from_beta(net, beta, i0);
    const double lhs = log_density_nu(params, beta) +
                       log_jacobian_phi_inverse(net, u);
    const double rhs = log_density_q(net, phi, i0, u) +
                       log_density_gamma_half(phi[i0] * phi[i0], gamma);
    return lhs - rhs;
}

// |det| of the finite-difference Jacobian of (u_{j != i0}, gamma) -> beta,
// central differences with step h. Test machinery for the closed form above.
inline double fd_jacobian_abs_det(const Network& net,
                                  const std::vector<double>& u, double gamma,
                                  int i0, double h = 1e-6) {
    const int n = net.size();
    Eigen::MatrixXd jac(n, n);
    std::vector<int> coords; // the n free coordinates: u_j (j != i0), gamma
    for (int j = 0; j < n; ++j)
        if (j != i0) coords.push_back(j);

    for (int c = 0; c < n; ++c) {
        std::vector<double> up = u, dn = u;
        double gp = gamma, gd = gamma;
        if (c < n - 1) {
            up[coords[c]] += h;
            dn[coords[c]] -= h;
        } else {
            gp += h;
            gd -= h;
        }
        const std::vector<double> bp = beta_from_u_gamma(net, up, gp, i0);
        const std::vector<double> bd = beta_from_u_gamma(net, dn, gd, i0);
        for (int r = 0; r < n; ++r) jac(r, c) = (bp[r] - bd[r]) / (2.0 * h);
    }
    return std::abs(jac.determinant());
}

} // namespace mvig
