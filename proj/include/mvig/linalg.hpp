#pragma once

// The potential matrix M = 2 beta - P and its ordered triangular recursion
//
//   x_i = 2 beta_i - sum_{k<i} H_{k,i}^2 / x_k,
//   H_{i,j} = W_{i,j} + sum_{k<i} H_{k,i} H_{k,j} / x_k   (i < j),
//
// all indices taken in a chosen vertex ordering. The recursion is an LDL^T
// factorization in disguise (L_{ik} = -H_{k,i}/x_k, D = diag(x)): M is
// positive definite iff every pivot x_i is positive, det M is the product of
// the pivots, and one column of the Green function G = M^{-1} falls out of
// two triangular sweeps. The inverse map Psi (pivots -> potentials) is also
// here since the sequential sampler and the quadrature oracles both need it.

#include "mvig/graph.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mvig {

// M = 2 diag(beta) - P over a fixed network. Indices are original vertex
// labels. Also exposes the Schroedinger form M = -Delta_W + V with
// V_i = 2 beta_i - W_i.
struct PotentialMatrix {
    PotentialMatrix(Network network, std::vector<double> beta_values)
        : net(std::move(network)), beta(std::move(beta_values)) {
        if (static_cast<int>(beta.size()) != net.size())
            throw std::invalid_argument("PotentialMatrix: |beta| != |V|");
    }

    double entry(int i, int j) const {
        return i == j ? 2.0 * beta[i] : -net.weight(i, j);
    }

    double schroedinger_potential(int i) const {
        return 2.0 * beta[i] - net.strength(i);
    }

    Eigen::MatrixXd dense() const {
        const int n = net.size();
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = entry(i, j);
        return m;
    }

    Network net;
    std::vector<double> beta;
};

// Relative pivot tolerance: a pivot x_i <= tol * max(1, |2 beta_i|) is
// treated as a failed (non-positive) pivot.
inline constexpr double kPivotTolerance = 1e-12;

// Result of the ordered recursion. `pivots` and the packed upper field H are
// valid for positions < failure_position (all positions when PD).
class TriangularFactors {
  public:
    TriangularFactors(VertexOrdering order, std::vector<double> pivots,
                      std::vector<double> upper,
                      std::optional<int> failure_position)
        : order_(std::move(order)),
          pivots_(std::move(pivots)),
          upper_(std::move(upper)),
          failure_position_(failure_position) {}

    bool positive_definite() const { return !failure_position_.has_value(); }

    // First ordered position with a non-positive pivot, when not PD.
    std::optional<int> failure_position() const { return failure_position_; }

    const VertexOrdering& ordering() const { return order_; }
    const std::vector<double>& pivots() const { return pivots_; }

    // H_{i,j} for ordered positions i < j.
    double h(int i, int j) const {
        return upper_[static_cast<std::size_t>(i) * order_.size() + j];
    }

    // log det M = sum_i log x_i; only meaningful when positive definite.
    double log_determinant() const {
        if (!positive_definite())
            throw std::domain_error(
                "TriangularFactors::log_determinant: matrix not positive "
                "definite");
        double s = 0.0;
        for (double x : pivots_) s += std::log(x);
        return s;
    }

  private:
    VertexOrdering order_;
    std::vector<double> pivots_;
    std::vector<double> upper_;
    std::optional<int> failure_position_;
};

inline TriangularFactors lu_factorize(const PotentialMatrix& m,
                                      const VertexOrdering& order,
                                      double pivot_tol = kPivotTolerance) {
    const int n = m.net.size();
    if (order.size() != n)
        throw std::invalid_argument("lu_factorize: ordering size mismatch");

    std::vector<double> x(n, 0.0);
    std::vector<double> h(static_cast<std::size_t>(n) * n, 0.0);
    auto at = [n](int i, int j) -> std::size_t {
        return static_cast<std::size_t>(i) * n + j;
    };

    for (int i = 0; i < n; ++i) {
        const double two_beta = 2.0 * m.beta[order.vertex_at(i)];
        double pivot = two_beta;
        for (int k = 0; k < i; ++k) pivot -= h[at(k, i)] * h[at(k, i)] / x[k];
        if (pivot <= pivot_tol * std::max(1.0, std::abs(two_beta))) {
            x.resize(i);
            return TriangularFactors(order, std::move(x), std::move(h), i);
        }
        x[i] = pivot;
        for (int j = i + 1; j < n; ++j) {
            double hij = m.net.weight(order.vertex_at(i), order.vertex_at(j));
            for (int k = 0; k < i; ++k)
                hij += h[at(k, i)] * h[at(k, j)] / x[k];
            h[at(i, j)] = hij;
        }
    }
    return TriangularFactors(order, std::move(x), std::move(h), std::nullopt);
}

inline bool is_positive_definite(const PotentialMatrix& m) {
    return lu_factorize(m, VertexOrdering::identity(m.net.size()))
        .positive_definite();
}

inline double log_determinant(const PotentialMatrix& m) {
    return lu_factorize(m, VertexOrdering::identity(m.net.size()))
        .log_determinant();
}

// Column i0 of G = M^{-1}, via forward/backward sweeps through the factors:
//   L y = e_{i0}:        y_i = 1_{i=i0} + sum_{k<i} (H_{k,i}/x_k) y_k,
//   L^T g = D^{-1} y:    g_i = (y_i + sum_{j>i} H_{i,j} g_j) / x_i.
// Requires M positive definite; every entry of the result is then > 0. The
// factorization runs with zero pivot tolerance: the sweeps stay exact for
// pivots of any positive size, and exact samples from the potential family
// may land arbitrarily close to the cone boundary.
inline std::vector<double> green_column(const PotentialMatrix& m, int i0) {
    const int n = m.net.size();
    if (i0 < 0 || i0 >= n)
        throw std::invalid_argument("green_column: vertex out of range");
    const TriangularFactors f =
        lu_factorize(m, VertexOrdering::identity(n), 0.0);
    if (!f.positive_definite())
        throw std::domain_error("green_column: matrix not positive definite");

    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double v = (i == i0) ? 1.0 : 0.0;
        for (int k = 0; k < i; ++k) v += f.h(k, i) / f.pivots()[k] * y[k];
        y[i] = v;
    }
    std::vector<double> g(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double v = y[i];
        for (int j = i + 1; j < n; ++j) v += f.h(i, j) * g[j];
        g[i] = v / f.pivots()[i];
    }
    return g;
}

// Ordering used by the stability certificate: vertices sorted by decreasing
// hop distance from i0 (ties by label), i0 last. Every vertex then has a
// strictly later neighbor on a shortest path toward i0, which makes the
// partial row sums strictly positive for valid certificates.
inline VertexOrdering certificate_ordering(const Network& net, int i0) {
    std::vector<int> dist = graph_distances_from(net, i0);
    std::vector<int> ord(net.size());
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
        return dist[a] > dist[b];
    });
    return VertexOrdering(std::move(ord));
}

// Checks the sufficient positivity certificate: in the given ordering, with
// xi > 0 componentwise,
//   (a) (M xi)_k >= 0 for all k with at least one strict entry, and
//   (b) the partial sums sum_{j<=k} a_{k,j} xi_j are strictly positive.
// Row (a) is allowed a small relative slack: for xi built from a Green
// column, M xi vanishes exactly off the base vertex. The strictness cut
// sits just above accumulated roundoff, since at the base vertex the one
// genuinely positive row equals twice gamma, which can be many orders
// below the row scale on skewed instances.
inline bool positive_stability_certificate(const PotentialMatrix& m,
                                           const std::vector<double>& xi,
                                           const VertexOrdering& order) {
    const int n = m.net.size();
    if (static_cast<int>(xi.size()) != n || order.size() != n)
        throw std::invalid_argument(
            "positive_stability_certificate: size mismatch");
    for (double v : xi)
        if (!(v > 0.0)) return false;

    bool some_strict = false;
    for (int k = 0; k < n; ++k) {
        const int row = order.vertex_at(k);
        double partial = 0.0, full = 0.0, scale = 0.0;
        for (int j = 0; j < n; ++j) {
            const int col = order.vertex_at(j);
            const double term = m.entry(row, col) * xi[col];
            full += term;
            scale += std::abs(term);
            if (j <= k) partial += term;
        }
        if (full < -1e-9 * scale) return false;
        if (full > 1e-13 * scale) some_strict = true;
        if (!(partial > 1e-12 * scale)) return false;
    }
    return some_strict;
}

// The inverse bijection Psi of the triangular recursion: given positive
// pivots x in the given ordering, return the unique beta (original labels)
// whose factorization reproduces exactly those pivots:
//   beta_{order(i)} = x_i / 2 + sum_{k<i} H_{k,i}^2 / (2 x_k),
// with H built from the same recursion (it depends only on W and x).
inline std::vector<double> potentials_from_pivots(const Network& net,
                                                  const VertexOrdering& order,
                                                  const std::vector<double>& x) {
    const int n = net.size();
    if (static_cast<int>(x.size()) != n || order.size() != n)
        throw std::invalid_argument("potentials_from_pivots: size mismatch");
    for (double v : x)
        if (!(v > 0.0))
            throw std::invalid_argument(
                "potentials_from_pivots: pivots must be positive");

    std::vector<double> h(static_cast<std::size_t>(n) * n, 0.0);
    auto at = [n](int i, int j) -> std::size_t {
        return static_cast<std::size_t>(i) * n + j;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double hij = net.weight(order.vertex_at(i), order.vertex_at(j));
            for (int k = 0; k < i; ++k)
                hij += h[at(k, i)] * h[at(k, j)] / x[k];
            h[at(i, j)] = hij;
        }

    std::vector<double> beta(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double b = 0.5 * x[i];
        for (int k = 0; k < i; ++k)
            b += h[at(k, i)] * h[at(k, i)] / (2.0 * x[k]);
        beta[order.vertex_at(i)] = b;
    }
    return beta;
}

} // namespace mvig
