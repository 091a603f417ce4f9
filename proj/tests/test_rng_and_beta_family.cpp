#include "test_util.hpp"

#include "mvig/beta_family.hpp"
#include "mvig/quadrature.hpp"
#include "mvig/rng.hpp"
#include "mvig/stats.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace mvig;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> draw_many(int n, const std::function<double()>& f) {
    std::vector<double> v(n);
    for (double& x : v) x = f();
    return v;
}

void check_mean(const std::vector<double>& v, double expected) {
    const MeanResult m = mc_mean(v);
    CHECK(std::abs(m.mean - expected) < 4.0 * m.se);
}
} // namespace

TEST_CASE("rng determinism and substreams", "[rng]") {
    Rng a(42), b(42);
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng base(42);
    Rng s0 = base.stream(0);
    Rng s1 = base.stream(1);
    CHECK(s0.next_u64() != s1.next_u64());
    // substreams depend only on (seed, index), not on how much the parent
    // has already consumed
    base.next_u64();
    Rng s0_again = base.stream(0);
    Rng s0_ref = Rng(42).stream(0);
    CHECK(s0_again.next_u64() == s0_ref.next_u64());
}

TEST_CASE("basic generator moments", "[rng]") {
    Rng rng(201);
    const int n = 100000;

    auto u = draw_many(n, [&] { return rng.uniform(); });
    check_mean(u, 0.5);
    for (double v : u) REQUIRE((v > 0.0 && v < 1.0));

    check_mean(draw_many(n, [&] { return rng.normal(); }), 0.0);
    check_mean(draw_many(n, [&] { return rng.exponential(2.0); }), 0.5);
    check_mean(draw_many(n, [&] { return rng.gamma(3.5, 2.0); }), 1.75);
    check_mean(draw_many(n, [&] { return rng.gamma(0.5, 0.5); }), 1.0);
}

TEST_CASE("inverse gaussian sampler", "[rng][beta-family]") {
    Rng rng(202);
    const int n = 200000;

    auto x = draw_many(n, [&] {
        return sample_inverse_gaussian({1.0, 1.0}, rng);
    });
    check_mean(x, 1.0);
    auto inv = x;
    for (double& v : inv) v = 1.0 / v;
    check_mean(inv, 2.0); // E[1/X] = 1/mu + 1/lambda

    x.resize(10000);
    CHECK(ks_test(x, [](double s) {
              return inverse_gaussian_cdf(s, 1.0, 1.0);
          }).p_value > 0.001);

    SECTION("large-lambda degeneracy to the mean") {
        auto y = draw_many(10000, [&] {
            return sample_inverse_gaussian({1.0, 1e6}, rng);
        });
        check_mean(y, 1.0);
        double ss = 0.0;
        const double mean = mc_mean(y).mean;
        for (double v : y) ss += (v - mean) * (v - mean);
        CHECK(ss / (y.size() - 1) < 2e-6); // Var = mu^3/lambda = 1e-6
    }

    CHECK_THROWS_AS(sample_inverse_gaussian({-1.0, 1.0}, rng),
                    std::invalid_argument);
}

TEST_CASE("gig(1/2) sampler and its normalizing constants", "[beta-family]") {
    Rng rng(203);

    SECTION("b = 0 reduces to gamma(1/2, a/2)") {
        auto x = draw_many(100000, [&] { return sample_gig_half(2.0, 0.0, rng); });
        check_mean(x, 0.5);
        x.resize(10000);
        CHECK(ks_test(x, [](double s) { return gamma_half_cdf(s, 1.0); })
                  .p_value > 0.001);
    }

    SECTION("normalization: integral of x^{-1/2} e^{-(ax+b/x)/2}") {
        const double inf = std::numeric_limits<double>::infinity();
        const struct {
            double a, b;
        } cases[] = {{1.0, 1.0}, {1.0, 4.0}, {2.3, 0.7}, {1.0, 0.0}};
        for (const auto& c : cases) {
            const double z =
                quad::integrate(
                    [&](double x) {
                        return std::exp(-0.5 * (c.a * x + c.b / x)) /
                               std::sqrt(x);
                    },
                    0.0, inf, 1e-11)
                    .value;
            const double closed =
                std::exp(-std::sqrt(c.a * c.b)) * std::sqrt(2.0 * kPi / c.a);
            CHECK(z == Catch::Approx(closed).epsilon(1e-8));
        }
    }

    SECTION("a=1, b=4: E[1/X] by MC against the quadrature of the density") {
        const double inf = std::numeric_limits<double>::infinity();
        auto dens = [](double x) {
            return std::exp(-0.5 * (x + 4.0 / x)) / std::sqrt(x);
        };
        const double z = quad::integrate(dens, 0.0, inf, 1e-11).value;
        const double moment =
            quad::integrate([&](double x) { return dens(x) / x; }, 0.0, inf,
                            1e-11)
                .value /
            z;
        auto inv = draw_many(100000, [&] {
            return 1.0 / sample_gig_half(1.0, 4.0, rng);
        });
        const MeanResult m = mc_mean(inv);
        CHECK(std::abs(m.mean - moment) < 0.01 * moment);
        CHECK(moment == Catch::Approx(0.5).epsilon(1e-6)); // sqrt(a/b)
    }

    SECTION("law for b > 0 via the reciprocal-IG cdf") {
        auto x = draw_many(10000, [&] { return sample_gig_half(1.0, 1.0, rng); });
        CHECK(ks_test(x, [](double s) {
                  return 1.0 - inverse_gaussian_cdf(1.0 / s, 1.0, 1.0);
              }).p_value > 0.001);
    }

    CHECK_THROWS_AS(sample_gig_half(0.0, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_gig_half(1.0, -1.0, rng), std::invalid_argument);
}

TEST_CASE("sequential sampler: elementary laws", "[beta-family]") {
    Rng rng(204);

    SECTION("n = 1: beta ~ gamma(1/2, theta)") {
        const FamilyParams p(Network(1, {}), {1.0});
        auto beta = draw_many(100000, [&] { return sample_beta(p, rng)[0]; });
        check_mean(beta, 0.5);
        beta.resize(10000);
        CHECK(ks_test(beta, [](double s) { return gamma_half_cdf(s, 1.0); })
                  .p_value > 0.001);
    }

    SECTION("n = 2: reciprocal marginals are IG(1,1)") {
        const FamilyParams p(testutil::single_edge(), {1.0, 1.0});
        std::vector<double> r0, r1;
        for (int k = 0; k < 100000; ++k) {
            const auto b = sample_beta(p, rng);
            r0.push_back(1.0 / (2.0 * b[0]));
            r1.push_back(1.0 / (2.0 * b[1]));
        }
        check_mean(r0, 1.0);
        check_mean(r1, 1.0);
        r0.resize(10000);
        CHECK(ks_test(r0, [](double s) {
                  return inverse_gaussian_cdf(s, 1.0, 1.0);
              }).p_value > 0.001);
    }
}

TEST_CASE("sampler output stays in the cone and inverts the recursion",
          "[beta-family]") {
    Rng rng(205);
    const Network nets[] = {testutil::triangle(), testutil::k4(),
                            testutil::path5()};
    for (const Network& net : nets) {
        const FamilyParams p(net, testutil::random_positive_vector(
                                      net.size(), rng, 0.5, 1.5));
        for (int k = 0; k < 150; ++k) {
            const VertexOrdering ord =
                testutil::random_ordering(net.size(), rng);
            const auto beta = sample_beta(p, ord, rng);
            const PotentialMatrix m(net, beta);
            const auto f = lu_factorize(m, ord);
            REQUIRE(f.positive_definite());
            // Psi round trip: the sampled beta is the image of its pivots
            const auto back = potentials_from_pivots(net, ord, f.pivots());
            for (int i = 0; i < net.size(); ++i)
                CHECK(back[i] == Catch::Approx(beta[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("density values of nu", "[beta-family]") {
    SECTION("n = 1 at beta = 1") {
        const FamilyParams p(Network(1, {}), {1.0});
        CHECK(log_density_nu(p, {1.0}) ==
              Catch::Approx(-0.5 * std::log(kPi) - 1.0).margin(1e-13));
    }
    SECTION("n = 2 at beta = (1,1)") {
        const FamilyParams p(testutil::single_edge(), {1.0, 1.0});
        CHECK(log_density_nu(p, {1.0, 1.0}) ==
              Catch::Approx(std::log(2.0 / kPi) - 1.0 - 0.5 * std::log(3.0))
                  .margin(1e-13));
    }
    SECTION("outside the cone") {
        const FamilyParams p(testutil::single_edge(), {1.0, 1.0});
        CHECK(std::isinf(log_density_nu(p, {0.4, 0.4})));
        CHECK(log_density_nu(p, {0.4, 0.4}) < 0.0);
    }
}

TEST_CASE("laplace transform closed form", "[beta-family]") {
    const FamilyParams p2(testutil::single_edge(), {1.0, 1.0});
    CHECK(laplace_transform(p2, {0.0, 0.0}) == 1.0);
    CHECK(laplace_transform(p2, {3.0, 0.0}) ==
          Catch::Approx(std::exp(-1.0) / 2.0).margin(1e-14));

    const FamilyParams p1(Network(1, {}), {1.0});
    for (double t : {0.5, 2.0})
        CHECK(laplace_transform(p1, {t}) ==
              Catch::Approx(1.0 / std::sqrt(1.0 + t)).margin(1e-14));

    SECTION("MC agreement on the triangle") {
        Rng rng(206);
        const FamilyParams p(testutil::triangle(), {1.0, 0.7, 1.4});
        const std::vector<double> lambda{0.4, 1.1, 0.2};
        std::vector<double> vals;
        for (int k = 0; k < 20000; ++k) {
            const auto b = sample_beta(p, rng);
            vals.push_back(std::exp(-lambda[0] * b[0] - lambda[1] * b[1] -
                                    lambda[2] * b[2]));
        }
        const MeanResult m = mc_mean(vals);
        CHECK(std::abs(m.mean - laplace_transform(p, lambda)) < 4.0 * m.se);
    }

    CHECK_THROWS_AS(laplace_transform(p2, {-2.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("marginal parameters", "[beta-family]") {
    const FamilyParams p2(testutil::single_edge(), {1.0, 1.0});
    CHECK(marginal_ig_params(p2, 0).mu == 1.0);
    CHECK(marginal_ig_params(p2, 0).lambda == 1.0);

    const FamilyParams star(testutil::star4(), {1.0, 1.0, 1.0, 1.0});
    CHECK(marginal_ig_params(star, 0).mu ==
          Catch::Approx(1.0 / 3.0).margin(1e-15));

    const FamilyParams doubled(testutil::single_edge(), {2.0, 2.0});
    CHECK(marginal_ig_params(doubled, 0).mu ==
          Catch::Approx(0.5).margin(1e-15));

    SECTION("n = 1 degenerates to the mu = inf limit") {
        const FamilyParams p1(Network(1, {}), {1.0});
        CHECK(std::isinf(marginal_ig_params(p1, 0).mu));
        Rng rng(207);
        std::vector<double> r;
        for (int k = 0; k < 10000; ++k)
            r.push_back(1.0 / (2.0 * sample_beta(p1, rng)[0]));
        CHECK(ks_test(r, [](double s) {
                  return inverse_gaussian_cdf(
                      s, std::numeric_limits<double>::infinity(), 1.0);
              }).p_value > 0.001);
    }
}

TEST_CASE("theta rescaling", "[beta-family]") {
    SECTION("theta = 1 is the identity") {
        const FamilyParams p(testutil::triangle(2.0), {1.0, 1.0, 1.0});
        const FamilyParams r = rescale_theta(p);
        for (std::size_t e = 0; e < r.net.edges().size(); ++e)
            CHECK(r.net.edges()[e].w == p.net.edges()[e].w);
    }
    SECTION("n = 2 parameters") {
        const FamilyParams p(testutil::single_edge(), {4.0, 1.0});
        const FamilyParams r = rescale_theta(p);
        CHECK(r.net.weight(0, 1) == Catch::Approx(2.0).margin(1e-15));
        CHECK(r.theta[0] == 1.0);
        CHECK(r.theta[1] == 1.0);
    }
    SECTION("law equality by two-sample KS") {
        Rng rng(208);
        const FamilyParams p(testutil::single_edge(), {4.0, 1.0});
        const FamilyParams r = rescale_theta(p);
        std::vector<double> scaled, direct;
        for (int k = 0; k < 20000; ++k) {
            scaled.push_back(4.0 * sample_beta(p, rng)[0]);
            direct.push_back(sample_beta(r, rng)[0]);
        }
        CHECK(ks_test_two_sample(scaled, direct).p_value > 0.001);
    }
}

TEST_CASE("ordering invariance of the sampled law", "[beta-family]") {
    Rng rng(209);
    const FamilyParams p(testutil::triangle(), {0.8, 1.0, 1.3});
    const VertexOrdering fwd = VertexOrdering::identity(3);
    const VertexOrdering rev({2, 1, 0});
    std::vector<std::vector<double>> a(3), b(3);
    for (int k = 0; k < 20000; ++k) {
        const auto x = sample_beta(p, fwd, rng);
        const auto y = sample_beta(p, rev, rng);
        for (int i = 0; i < 3; ++i) {
            a[i].push_back(x[i]);
            b[i].push_back(y[i]);
        }
    }
    for (int i = 0; i < 3; ++i)
        CHECK(ks_test_two_sample(a[i], b[i]).p_value > 0.001 / 3.0);
}

TEST_CASE("family parameter validation", "[beta-family]") {
    CHECK_THROWS_AS(FamilyParams(testutil::single_edge(), {1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(FamilyParams(testutil::single_edge(), {1.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(FamilyParams(testutil::single_edge(), {1.0, -2.0}),
                    std::invalid_argument);
}
