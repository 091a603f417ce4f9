#include "test_util.hpp"

#include "mvig/magic_measure.hpp"
#include "mvig/quadrature.hpp"
#include "mvig/simulate.hpp"
#include "mvig/stats.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <vector>

using namespace mvig;

namespace {

// Independent oracle for the annealed path probability, organized as grouped
// rising factorials instead of sequential conditionals: crossing counts N(e)
// in the numerator, departure counts N(i) in the denominator. The start
// vertex has seen 2k crossings before its k-th departure, every other vertex
// 2k + 1.
double rising_factorial_oracle(const Network& net, const std::vector<double>& a,
                               const std::vector<int>& path) {
    const std::vector<double> av = magic_vertex_weights(net, a);
    std::vector<int> edge_cross(a.size(), 0);
    std::vector<int> departures(net.size(), 0);
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        ++edge_cross[net.edge_index(path[k], path[k + 1])];
        ++departures[path[k]];
    }
    double num = 1.0;
    for (std::size_t e = 0; e < a.size(); ++e)
        for (int k = 0; k < edge_cross[e]; ++k) num *= a[e] + k;
    double den = 1.0;
    for (int i = 0; i < net.size(); ++i) {
        const double off = i == path.front() ? 0.0 : 1.0;
        for (int k = 0; k < departures[i]; ++k) den *= av[i] + off + 2.0 * k;
    }
    return num / den;
}

void all_paths(const Network& net, int from, int steps, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
    if (steps == 0) {
        out.push_back(cur);
        return;
    }
    for (auto [j, w] : net.neighbors(from)) {
        cur.push_back(j);
        all_paths(net, j, steps - 1, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> paths_from(const Network& net, int i0,
                                         int steps) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur{i0};
    all_paths(net, i0, steps, cur, out);
    return out;
}

Network cycle4() {
    return Network(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 1.0}});
}

} // namespace

TEST_CASE("normalizing constant on the single edge", "[magic]") {
    // duplication formula collapses C(a, i0) to 1 for every a and both bases
    const Network net = testutil::single_edge();
    for (double a : {0.3, 1.0, 2.5, 7.0}) {
        CHECK(log_constant_c(net, {a}, 0) == Catch::Approx(0.0).margin(1e-12));
        CHECK(log_constant_c(net, {a}, 1) == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("constant ratio matches the one-step probability", "[magic]") {
    // C(a, i0) / C(a + delta_e, j) for e = {i0, j} reduces through
    // Gamma(x + 1) = x Gamma(x) to a_e / a_{i0}
    const Network net = testutil::triangle();
    Rng rng(501);
    for (int rep = 0; rep < 20; ++rep) {
        const std::vector<double> a =
            testutil::random_positive_vector(3, rng, 0.3, 2.5);
        std::vector<double> bumped = a;
        bumped[0] += 1.0; // edge {0,1}
        const double ratio =
            std::exp(log_constant_c(net, a, 0) - log_constant_c(net, bumped, 1));
        const double direct = a[0] / (a[0] + a[1]);
        CHECK(ratio == Catch::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("closed path probability agrees with two other routes", "[magic]") {
    Rng rng(502);
    const std::vector<Network> nets{testutil::single_edge(),
                                    testutil::triangle(), cycle4(),
                                    testutil::random_connected_network(4, 0.5,
                                                                       rng)};
    for (const Network& net : nets) {
        for (int rep = 0; rep < 3; ++rep) {
            const std::vector<double> a = testutil::random_positive_vector(
                static_cast<int>(net.edges().size()), rng, 0.3, 2.5);
            for (int steps = 1; steps <= 5; ++steps) {
                for (const auto& path : paths_from(net, 0, steps)) {
                    const double closed =
                        path_probability_closed(net, a, 0, path);
                    const double direct =
                        errw_path_probability_direct(net, a, path);
                    const double oracle =
                        rising_factorial_oracle(net, a, path);
                    CHECK(closed == Catch::Approx(direct).epsilon(1e-12));
                    CHECK(closed == Catch::Approx(oracle).epsilon(1e-12));
                }
            }
        }
    }

    const Network tri = testutil::triangle();
    const std::vector<double> ones{1.0, 1.0, 1.0};
    CHECK(path_probability_closed(tri, ones, 0, {0, 1}) ==
          Catch::Approx(0.5).margin(1e-12));
    CHECK(path_probability_closed(tri, ones, 0, {0, 1, 0}) ==
          Catch::Approx(1.0 / 3.0).margin(1e-12));
}

TEST_CASE("closed probabilities sum to one over each depth", "[magic]") {
    Rng rng(503);
    for (const Network& net : {testutil::triangle(), cycle4()}) {
        const std::vector<double> a = testutil::random_positive_vector(
            static_cast<int>(net.edges().size()), rng, 0.3, 2.5);
        for (int steps = 1; steps <= 4; ++steps) {
            double total = 0.0;
            for (const auto& path : paths_from(net, 0, steps))
                total += path_probability_closed(net, a, 0, path);
            CHECK(total == Catch::Approx(1.0).margin(1e-12));
        }
    }
}

TEST_CASE("mixed weight sampler", "[magic]") {
    Rng rng(504);
    const Network net = testutil::triangle();
    const std::vector<double> a{1.0, 2.5, 0.3};
    const int n = 100000;
    std::vector<std::vector<double>> draws(3);
    for (int k = 0; k < n; ++k) {
        const auto w = sample_mixed_weights(net, a, rng);
        for (int e = 0; e < 3; ++e) draws[e].push_back(w[e]);
    }
    for (int e = 0; e < 3; ++e) {
        const MeanResult m = mc_mean(draws[e]);
        CHECK(std::abs(m.mean - a[e]) < 4.0 * m.se);
    }
    // a_e = 1 edge is Exp(1)
    CHECK(ks_test(draws[0], [](double x) {
              return exponential_cdf(x, 1.0);
          }).p_value > 0.001);
}

TEST_CASE("magic point sampler basics", "[magic]") {
    Rng rng(505);
    const Network tri = testutil::triangle();
    const std::vector<double> a{1.0, 1.0, 1.0};
    for (int k = 0; k < 500; ++k) {
        const auto y = sample_magic_point(tri, a, 0, 1, rng);
        REQUIRE(y.size() == 3);
        CHECK(y[1] == 1.0);
        for (double v : y) CHECK(v > 0.0);
    }
    const Network edge = testutil::single_edge();
    for (int k = 0; k < 20; ++k) {
        const auto y = sample_magic_point(edge, {0.7}, 0, 0, rng);
        CHECK(y[0] == 1.0);
    }
}

TEST_CASE("sampled mixture reproduces the annealed probabilities", "[magic]") {
    Rng rng(506);
    const Network net = testutil::triangle();
    const std::vector<int> path{0, 1, 0};
    const int n = 30000;

    SECTION("uniform initial weights") {
        const std::vector<double> a{1.0, 1.0, 1.0};
        std::vector<double> vals;
        for (int k = 0; k < n; ++k)
            vals.push_back(markov_path_probability(
                net, sample_magic_point(net, a, 0, 2, rng), path));
        const MeanResult m = mc_mean(vals);
        CHECK(std::abs(m.mean - 1.0 / 3.0) < 4.0 * m.se);
    }
    SECTION("random initial weights") {
        const std::vector<double> a{1.7, 0.6, 2.3};
        const double closed = path_probability_closed(net, a, 0, path);
        std::vector<double> vals;
        for (int k = 0; k < n; ++k)
            vals.push_back(markov_path_probability(
                net, sample_magic_point(net, a, 0, 2, rng), path));
        const MeanResult m = mc_mean(vals);
        CHECK(std::abs(m.mean - closed) < 4.0 * m.se);
    }
}

TEST_CASE("density quadrature matches sampler and symmetry", "[magic]") {
    // statistic f(y) = y_{01} / (y_{01} + y_{02}) has mean 1/2 by the
    // automorphism fixing the base vertex; integrate f against the density in
    // log coordinates of the two free edges (reference edge {1,2})
    const Network net = testutil::triangle();
    const std::vector<double> a{1.0, 1.0, 1.0};
    const int i0 = 0, e0 = 2;

    const std::function<double(const std::vector<double>&)> integrand =
        [&](const std::vector<double>& st) {
            const std::vector<double> y{std::exp(st[0]), std::exp(st[1]), 1.0};
            const double f = y[0] / (y[0] + y[1]);
            return f * std::exp(log_density_magic(net, a, i0, e0, y));
        };
    const quad::Result q =
        quad::integrate_box(integrand, {-14.0, -14.0}, {14.0, 14.0}, 1e-5);
    CHECK(q.value == Catch::Approx(0.5).margin(2e-3));

    Rng rng(507);
    std::vector<double> vals;
    for (int k = 0; k < 30000; ++k) {
        const auto y = sample_magic_point(net, a, i0, e0, rng);
        vals.push_back(y[0] / (y[0] + y[1]));
    }
    const MeanResult m = mc_mean(vals);
    CHECK(std::abs(m.mean - 0.5) < 4.0 * m.se);
    CHECK(std::abs(m.mean - q.value) < 4.0 * m.se + 2e-3);
}

TEST_CASE("reference edge does not matter for ratio statistics", "[magic]") {
    Rng rng(508);
    const Network net = testutil::triangle();
    const std::vector<double> a{1.3, 0.8, 1.1};
    const int n = 20000;
    auto ratio_mean = [&](int e0, Rng& r) {
        std::vector<double> vals;
        for (int k = 0; k < n; ++k) {
            const auto y = sample_magic_point(net, a, 0, e0, r);
            vals.push_back(y[0] / (y[0] + y[1] + y[2]));
        }
        return mc_mean(vals);
    };
    Rng r1 = rng.stream(1);
    Rng r2 = rng.stream(2);
    const MeanResult m0 = ratio_mean(0, r1);
    const MeanResult m2 = ratio_mean(2, r2);
    CHECK(std::abs(m0.mean - m2.mean) <
          4.0 * std::sqrt(m0.se * m0.se + m2.se * m2.se));
}

TEST_CASE("magic input validation", "[magic]") {
    const Network net = testutil::triangle();
    CHECK_THROWS_AS(magic_vertex_weights(net, {1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(magic_vertex_weights(net, {1.0, -1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(log_constant_c(net, {1.0, 1.0, 1.0}, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        log_density_magic(net, {1.0, 1.0, 1.0}, 0, 0, {2.0, 1.0, 1.0}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        log_density_magic(net, {1.0, 1.0, 1.0}, 0, 0, {1.0, -1.0, 1.0}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        log_density_magic(net, {1.0, 1.0, 1.0}, 0, 5, {1.0, 1.0, 1.0}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        path_probability_closed(net, {1.0, 1.0, 1.0}, 1, {0, 1}),
        std::invalid_argument);
    CHECK_THROWS_AS(path_probability_closed(testutil::path3(), {1.0, 1.0}, 0,
                                            {0, 2}),
                    std::invalid_argument);
    Rng rng(509);
    CHECK_THROWS_AS(sample_mixed_weights(net, {1.0, 0.0, 1.0}, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_magic_point(net, {1.0, 1.0, 1.0}, 0, 7, rng),
                    std::invalid_argument);
}
