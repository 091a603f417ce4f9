#include "test_util.hpp"

#include "mvig/quadrature.hpp"
#include "mvig/rng.hpp"
#include "mvig/stats.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace mvig;

namespace {
constexpr double kPi = 3.14159265358979323846;

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

double ig_pdf(double x, double mu, double lambda) {
    if (x <= 0.0) return 0.0;
    if (std::isinf(mu))
        return std::sqrt(lambda / (2.0 * kPi * x * x * x)) *
               std::exp(-0.5 * lambda / x);
    const double d = x - mu;
    return std::sqrt(lambda / (2.0 * kPi * x * x * x)) *
           std::exp(-lambda * d * d / (2.0 * mu * mu * x));
}

// Exact Kolmogorov survival function by the alternating series, summed far
// past machine precision; independent of the branch logic under test.
double ks_q_series(double lambda) {
    double q = 0.0;
    for (int k = 1; k <= 60; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        q += 2.0 * (k % 2 == 1 ? term : -term);
    }
    return q;
}
} // namespace

TEST_CASE("one-dimensional quadrature calibration", "[quadrature]") {
    CHECK(quad::integrate([](double x) { return std::exp(-x); }, 0.0,
                          std::numeric_limits<double>::infinity(), 1e-10)
              .value == Catch::Approx(1.0).margin(1e-9));
    CHECK(quad::integrate(normal_pdf,
                          -std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity(), 1e-10)
              .value == Catch::Approx(1.0).margin(1e-8));
    CHECK(quad::integrate([](double x) { return 3.0 * x * x; }, 0.0, 1.0,
                          1e-12)
              .value == Catch::Approx(1.0).margin(1e-12));
    CHECK(quad::integrate([](double x) { return std::exp(x); },
                          -std::numeric_limits<double>::infinity(), 0.0,
                          1e-10)
              .value == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("iterated quadrature over boxes", "[quadrature]") {
    const double inf = std::numeric_limits<double>::infinity();
    SECTION("2-d gaussian mass") {
        auto f = [](const std::vector<double>& p) {
            return normal_pdf(p[0]) * normal_pdf(p[1]);
        };
        CHECK(quad::integrate_box(f, {-inf, -inf}, {inf, inf}, 1e-8).value ==
              Catch::Approx(1.0).margin(1e-6));
    }
    SECTION("3-d product of exponentials") {
        auto f = [](const std::vector<double>& p) {
            return std::exp(-p[0] - 2.0 * p[1] - 3.0 * p[2]) * 6.0;
        };
        CHECK(quad::integrate_box(f, {0.0, 0.0, 0.0}, {inf, inf, inf}, 1e-7)
                  .value == Catch::Approx(1.0).margin(1e-5));
    }
}

TEST_CASE("closed-form cdfs against density quadrature", "[stats]") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.959963984540054) ==
          Catch::Approx(0.975).margin(1e-12));

    SECTION("inverse gaussian") {
        const struct {
            double x, mu, lambda;
        } cases[] = {{1.0, 1.0, 1.0}, {0.5, 1.0, 1.0}, {2.3, 2.0, 1.7}};
        for (const auto& c : cases) {
            const double mass =
                quad::integrate(
                    [&](double s) { return ig_pdf(s, c.mu, c.lambda); }, 0.0,
                    c.x, 1e-11)
                    .value;
            CHECK(inverse_gaussian_cdf(c.x, c.mu, c.lambda) ==
                  Catch::Approx(mass).margin(1e-8));
        }
        // the mu = +inf degenerate limit (reciprocal chi-square)
        const double inf = std::numeric_limits<double>::infinity();
        const double mass =
            quad::integrate([&](double s) { return ig_pdf(s, inf, 1.0); },
                            0.0, 1.5, 1e-11)
                .value;
        CHECK(inverse_gaussian_cdf(1.5, inf, 1.0) ==
              Catch::Approx(mass).margin(1e-8));
        CHECK(inverse_gaussian_cdf(0.0, 1.0, 1.0) == 0.0);
        CHECK(inverse_gaussian_cdf(1e6, 1.0, 1.0) ==
              Catch::Approx(1.0).margin(1e-6));
    }

    SECTION("gamma(1/2) and exponential") {
        CHECK(gamma_half_cdf(1.0, 1.0) ==
              Catch::Approx(std::erf(1.0)).margin(1e-14));
        const double rate = 2.7;
        const double mass =
            quad::integrate(
                [&](double s) {
                    return std::sqrt(rate / (kPi * s)) *
                           std::exp(-rate * s);
                },
                0.0, 0.8, 1e-11)
                .value;
        CHECK(gamma_half_cdf(0.8, rate) == Catch::Approx(mass).margin(1e-7));
        CHECK(exponential_cdf(std::log(2.0), 1.0) ==
              Catch::Approx(0.5).margin(1e-14));
    }
}

TEST_CASE("kolmogorov survival function branches", "[stats]") {
    for (double lambda : {0.4, 0.8, 1.0, 1.17, 1.19, 1.5, 2.0})
        CHECK(ks_q(lambda) ==
              Catch::Approx(ks_q_series(lambda)).margin(1e-6));
    CHECK(ks_q(1e-9) == 1.0);
}

TEST_CASE("ks test calibration and power", "[stats]") {
    SECTION("null: uniform samples against the uniform cdf") {
        Rng rng(101);
        int below_001 = 0;
        double best_p = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> s(10000);
            for (double& v : s) v = rng.uniform();
            const KsResult r = ks_test(s, [](double x) { return x; });
            if (r.p_value < 0.01) ++below_001;
            best_p = std::max(best_p, r.p_value);
        }
        CHECK(below_001 <= 2);
        CHECK(best_p > 0.3);
    }
    SECTION("IG(1,1) samples pass against their own cdf") {
        Rng rng(102);
        std::vector<double> s(10000);
        for (double& v : s) v = sample_inverse_gaussian_raw(1.0, 1.0, rng);
        const KsResult r = ks_test(
            s, [](double x) { return inverse_gaussian_cdf(x, 1.0, 1.0); });
        CHECK(r.p_value > 0.01);
    }
    SECTION("IG(1,1) samples fail against IG(2,1)") {
        Rng rng(103);
        std::vector<double> s(100000);
        for (double& v : s) v = sample_inverse_gaussian_raw(1.0, 1.0, rng);
        const KsResult r = ks_test(
            s, [](double x) { return inverse_gaussian_cdf(x, 2.0, 1.0); });
        CHECK(r.p_value < 1e-6);
    }
    SECTION("two-sample variant") {
        Rng rng(104);
        std::vector<double> a(20000), b(20000), c(20000);
        for (double& v : a) v = rng.gamma(0.5, 1.0);
        for (double& v : b) v = rng.gamma(0.5, 1.0);
        for (double& v : c) v = rng.gamma(1.0, 1.0);
        CHECK(ks_test_two_sample(a, b).p_value > 0.01);
        CHECK(ks_test_two_sample(a, c).p_value < 1e-6);
    }
}

TEST_CASE("monte carlo means on known gamma and IG moments", "[stats]") {
    Rng rng(105);
    const int n = 50000;

    auto window_check = [&](auto draw, double expected) {
        std::vector<double> v(n);
        for (double& x : v) x = draw();
        const MeanResult m = mc_mean(v);
        CHECK(std::abs(m.mean - expected) < 4.0 * m.se);
    };
    window_check([&] { return rng.gamma(2.0, 1.0); }, 2.0);
    window_check([&] { return rng.gamma(0.5, 0.5); }, 1.0);
    window_check([&] { return sample_inverse_gaussian_raw(1.0, 2.0, rng); },
                 1.0);

    SECTION("standard error scale") {
        std::vector<double> v(n);
        for (double& x : v) x = rng.uniform();
        const MeanResult m = mc_mean(v);
        const double exact_se = std::sqrt(1.0 / 12.0 / n);
        CHECK(m.se == Catch::Approx(exact_se).epsilon(0.05));
    }
}

TEST_CASE("correlation scan calibration", "[stats]") {
    SECTION("deterministic correlations") {
        const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
        const std::vector<double> y{2.0, 4.0, 6.0, 8.0};
        const std::vector<double> z{4.0, 3.0, 2.0, 1.0};
        CHECK(pearson_correlation(x, y) == Catch::Approx(1.0).margin(1e-12));
        CHECK(pearson_correlation(x, z) == Catch::Approx(-1.0).margin(1e-12));
    }
    SECTION("iid gamma columns are uncorrelated") {
        Rng rng(106);
        const int n = 20000;
        std::vector<std::vector<double>> cols(4, std::vector<double>(n));
        for (auto& col : cols)
            for (double& v : col) v = rng.gamma(1.5, 1.0);
        for (std::size_t i = 0; i < cols.size(); ++i)
            for (std::size_t j = i + 1; j < cols.size(); ++j)
                CHECK(std::abs(pearson_correlation(cols[i], cols[j])) <
                      4.0 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("report rows", "[stats]") {
    CHECK(report_upper("r", 0.5, 1.0).passed);
    CHECK_FALSE(report_upper("r", 2.0, 1.0).passed);
    CHECK(report_lower("p", 0.02, 0.01).passed);
    CHECK_FALSE(report_lower("p", 0.005, 0.01).passed);
}
