#pragma once

// Finite weighted graphs (V, E, W) and the combinatorial quantities the rest
// of the library is built on: the coupling matrix P, hop distances, vertex
// orderings, and the spanning-tree polynomial D(W, u) of the weighted
// Laplacian (matrix-tree route, with a brute-force enumeration for small
// graphs used as its independent cross-check).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mvig {

struct Edge {
    int u = 0;
    int v = 0;
    double w = 0.0;
};

// Connected undirected graph, positive edge weights, no self-loops or
// parallel edges. Immutable after construction.
class Network {
  public:
    Network(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
        if (n_ <= 0) throw std::invalid_argument("Network: need n >= 1");
        adj_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
        eidx_.assign(static_cast<std::size_t>(n_) * n_, -1);
        neighbors_.resize(n_);
        for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
            const Edge& ed = edges_[e];
            if (ed.u < 0 || ed.u >= n_ || ed.v < 0 || ed.v >= n_)
                throw std::invalid_argument("Network: vertex out of range");
            if (ed.u == ed.v)
                throw std::invalid_argument("Network: self-loop");
            if (!(ed.w > 0.0))
                throw std::invalid_argument("Network: edge weight must be > 0");
            if (adj_[idx(ed.u, ed.v)] != 0.0)
                throw std::invalid_argument("Network: duplicate edge");
            adj_[idx(ed.u, ed.v)] = ed.w;
            adj_[idx(ed.v, ed.u)] = ed.w;
            eidx_[idx(ed.u, ed.v)] = e;
            eidx_[idx(ed.v, ed.u)] = e;
            neighbors_[ed.u].push_back({ed.v, ed.w});
            neighbors_[ed.v].push_back({ed.u, ed.w});
        }
        if (!connected())
            throw std::invalid_argument("Network: graph must be connected");
    }

    int size() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }

    // W_{ij}; zero when {i,j} is not an edge.
    double weight(int i, int j) const { return adj_[idx(i, j)]; }

    // Index into edges() of the edge {i,j}, or -1 if not an edge.
    int edge_index(int i, int j) const { return eidx_[idx(i, j)]; }

    const std::vector<std::pair<int, double>>& neighbors(int i) const {
        return neighbors_[i];
    }

    // W_i = sum of weights incident to i.
    double strength(int i) const {
        double s = 0.0;
        for (auto [j, w] : neighbors_[i]) s += w;
        return s;
    }

    // Dense symmetric coupling matrix P, row-major, zero diagonal.
    std::vector<double> coupling_matrix() const { return adj_; }

  private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * n_ + j;
    }

    bool connected() const {
        std::vector<char> seen(n_, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!q.empty()) {
            int i = q.front();
            q.pop();
            for (auto [j, w] : neighbors_[i])
                if (!seen[j]) {
                    seen[j] = 1;
                    ++reached;
                    q.push(j);
                }
        }
        return reached == n_;
    }

    int n_;
    std::vector<Edge> edges_;
    std::vector<double> adj_;
    std::vector<int> eidx_;
    std::vector<std::vector<std::pair<int, double>>> neighbors_;
};

// Hop distances from source to every vertex (weights ignored).
inline std::vector<int> graph_distances_from(const Network& net, int source) {
    if (source < 0 || source >= net.size())
        throw std::invalid_argument("graph_distances_from: vertex out of range");
    std::vector<int> dist(net.size(), -1);
    std::queue<int> q;
    dist[source] = 0;
    q.push(source);
    while (!q.empty()) {
        int i = q.front();
        q.pop();
        for (auto [j, w] : net.neighbors(i))
            if (dist[j] < 0) {
                dist[j] = dist[i] + 1;
                q.push(j);
            }
    }
    return dist;
}

inline int graph_distance(const Network& net, int i, int j) {
    return graph_distances_from(net, i)[j];
}

// A total order on the vertices: order[k] is the vertex placed at position k.
// The triangular recursion, the sequential sampler and the stability
// certificate all consume one of these.
class VertexOrdering {
  public:
    explicit VertexOrdering(std::vector<int> order) : order_(std::move(order)) {
        const int n = static_cast<int>(order_.size());
        std::vector<char> seen(n, 0);
        for (int v : order_) {
            if (v < 0 || v >= n || seen[v])
                throw std::invalid_argument(
                    "VertexOrdering: not a permutation of 0..n-1");
            seen[v] = 1;
        }
        position_.resize(n);
        for (int k = 0; k < n; ++k) position_[order_[k]] = k;
    }

    static VertexOrdering identity(int n) {
        std::vector<int> ord(n);
        std::iota(ord.begin(), ord.end(), 0);
        return VertexOrdering(std::move(ord));
    }

    int size() const { return static_cast<int>(order_.size()); }
    int vertex_at(int position) const { return order_[position]; }
    int position_of(int vertex) const { return position_[vertex]; }
    const std::vector<int>& order() const { return order_; }

  private:
    std::vector<int> order_;
    std::vector<int> position_;
};

// log D(W, u) where D(W, u) = sum over spanning trees T of
// prod_{{i,j} in T} W_{ij} e^{u_i + u_j}. Computed by the matrix-tree theorem:
// D equals any principal minor of the weighted Laplacian. The e^{u} scale is
// pulled out of the determinant (L = diag(e^u) M diag(e^u)) so large |u| does
// not overflow. D(W, u) = 1 for a single vertex.
inline double log_spanning_tree_polynomial(const Network& net,
                                           const std::vector<double>& u,
                                           int deleted_vertex = 0) {
    const int n = net.size();
    if (static_cast<int>(u.size()) != n)
        throw std::invalid_argument("log_spanning_tree_polynomial: |u| != |V|");
    if (deleted_vertex < 0 || deleted_vertex >= n)
        throw std::invalid_argument(
            "log_spanning_tree_polynomial: vertex out of range");
    if (n == 1) return 0.0;

    // M_{ij} = -W_{ij} off the diagonal, M_{ii} = sum_j W_{ij} e^{u_j - u_i}.
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n - 1, n - 1);
    auto row_of = [&](int i) { return i < deleted_vertex ? i : i - 1; };
    for (int i = 0; i < n; ++i) {
        if (i == deleted_vertex) continue;
        double diag = 0.0;
        for (auto [j, w] : net.neighbors(i)) {
            diag += w * std::exp(u[j] - u[i]);
            if (j != deleted_vertex) m(row_of(i), row_of(j)) = -w;
        }
        m(row_of(i), row_of(i)) = diag;
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    double log_abs = 0.0;
    double sign = lu.permutationP().determinant();
    for (int k = 0; k < n - 1; ++k) {
        const double pivot = lu.matrixLU()(k, k);
        sign *= (pivot < 0.0 ? -1.0 : 1.0);
        log_abs += std::log(std::abs(pivot));
    }
    if (sign <= 0.0)
        throw std::runtime_error(
            "log_spanning_tree_polynomial: non-positive determinant");

    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        if (i != deleted_vertex) scale += 2.0 * u[i];
    return scale + log_abs;
}

inline double spanning_tree_polynomial(const Network& net,
                                       const std::vector<double>& u,
                                       int deleted_vertex = 0) {
    return std::exp(log_spanning_tree_polynomial(net, u, deleted_vertex));
}

namespace detail {

class UnionFind {
  public:
    explicit UnionFind(int n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    bool merge(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[a] = b;
        return true;
    }

  private:
    std::vector<int> parent_;
};

} // namespace detail

// All spanning trees, each as a sorted list of edge indices into net.edges().
// Exhaustive over (n-1)-subsets of the edge set; guarded to small graphs,
// where it serves as the oracle for the determinant route.
inline std::vector<std::vector<int>> enumerate_spanning_trees(
    const Network& net) {
    const int n = net.size();
    if (n > 10)
        throw std::invalid_argument(
            "enumerate_spanning_trees: brute force is limited to n <= 10");
    const int m = static_cast<int>(net.edges().size());
    const int k = n - 1;
    std::vector<std::vector<int>> trees;
    if (k == 0) {
        trees.push_back({});
        return trees;
    }
    if (m < k) return trees;

    std::vector<int> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    for (;;) {
        detail::UnionFind uf(n);
        bool acyclic = true;
        for (int e : pick)
            if (!uf.merge(net.edges()[e].u, net.edges()[e].v)) {
                acyclic = false;
                break;
            }
        if (acyclic) trees.push_back(pick); // n-1 merges => spanning

        // next k-combination of {0..m-1}
        int i = k - 1;
        while (i >= 0 && pick[i] == m - k + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return trees;
}

} // namespace mvig
