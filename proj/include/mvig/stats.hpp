#pragma once

// Statistical verification helpers: Kolmogorov-Smirnov tests (one- and
// two-sample, asymptotic p-values with the small-sample correction),
// Monte-Carlo means with standard errors, correlation scans, the closed-form
// cdfs the acceptance suite compares against, and the report row format
// shared by the test harness and the CLI `verify` verb.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvig {

// --- cdfs -------------------------------------------------------------------

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.70710678118654752440);
}

// log Phi(-z) without underflow for large z.
inline double log_normal_sf(double z) {
    if (z < 8.0) return std::log(0.5 * std::erfc(z * 0.70710678118654752440));
    const double z2 = z * z;
    return -0.5 * z2 - std::log(z * 2.50662827463100050242) +
           std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
}

// Inverse Gaussian IG(mu, lambda) cdf; mu = +inf degenerates continuously to
// the reciprocal chi-square limit 2 Phi(-sqrt(lambda/x)).
inline double inverse_gaussian_cdf(double x, double mu, double lambda) {
    if (x <= 0.0) return 0.0;
    const double s = std::sqrt(lambda / x);
    if (std::isinf(mu)) return 2.0 * normal_cdf(-s);
    const double term1 = normal_cdf(s * (x / mu - 1.0));
    const double term2 =
        std::exp(2.0 * lambda / mu + log_normal_sf(s * (x / mu + 1.0)));
    return term1 + term2;
}

// Gamma(1/2, rate) cdf.
inline double gamma_half_cdf(double x, double rate) {
    return x <= 0.0 ? 0.0 : std::erf(std::sqrt(rate * x));
}

inline double exponential_cdf(double x, double rate) {
    return x <= 0.0 ? 0.0 : -std::expm1(-rate * x);
}

// --- Kolmogorov-Smirnov -----------------------------------------------------

// Q_KS survival function of the Kolmogorov distribution.
inline double ks_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    if (lambda < 1.18) {
        const double t = std::exp(-1.23370055013616983 / (lambda * lambda));
        // pi^2/8 = 1.2337...; two terms of the theta-function expansion
        return 1.0 - 2.50662827463100050242 / lambda *
                         (t + std::pow(t, 9.0) + std::pow(t, 25.0));
    }
    const double y = std::exp(-2.0 * lambda * lambda);
    return 2.0 * (y - std::pow(y, 4.0) + std::pow(y, 9.0));
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// One-sample KS against a continuous cdf.
inline KsResult ks_test(std::vector<double> samples,
                        const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_test: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    const double sq = std::sqrt(n);
    return {d, ks_q((sq + 0.12 + 0.11 / sq) * d)};
}

// Two-sample KS.
inline KsResult ks_test_two_sample(std::vector<double> a,
                                   std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_test_two_sample: no samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    const double ne = static_cast<double>(a.size()) * b.size() /
                      (a.size() + b.size());
    const double sq = std::sqrt(ne);
    return {d, ks_q((sq + 0.12 + 0.11 / sq) * d)};
}

// --- moments ----------------------------------------------------------------

struct MeanResult {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanResult mc_mean(const std::vector<double>& values) {
    if (values.size() < 2) throw std::invalid_argument("mc_mean: need n >= 2");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / values.size();
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = ss / (values.size() - 1);
    return {mean, std::sqrt(var / values.size())};
}

inline double pearson_correlation(const std::vector<double>& x,
                                  const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson_correlation: size mismatch");
    const double mx = mc_mean(x).mean, my = mc_mean(y).mean;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// --- reporting --------------------------------------------------------------

struct TestReport {
    std::string name;
    double statistic = 0.0; // the measured quantity (KS D, |z|, residual, ...)
    double threshold = 0.0; // pass boundary for the statistic
    bool higher_is_better = false; // true for p-values
    bool passed = false;
    long sample_size = 0;
    std::uint64_t seed = 0;
    std::string detail;
};

inline TestReport report_upper(std::string name, double statistic,
                               double threshold, std::string detail = "") {
    TestReport r;
    r.name = std::move(name);
    r.statistic = statistic;
    r.threshold = threshold;
    r.higher_is_better = false;
    r.passed = statistic <= threshold;
    r.detail = std::move(detail);
    return r;
}

inline TestReport report_lower(std::string name, double statistic,
                               double threshold, std::string detail = "") {
    TestReport r;
    r.name = std::move(name);
    r.statistic = statistic;
    r.threshold = threshold;
    r.higher_is_better = true;
    r.passed = statistic > threshold;
    r.detail = std::move(detail);
    return r;
}

} // namespace mvig
