#pragma once

// Adaptive Gauss-Kronrod 7/15 quadrature, with the standard rational
// transforms for half-infinite and doubly infinite intervals and an iterated
// driver for 2-d and 3-d integrals. Node/weight constants are the QUADPACK
// dqk15 values; the suite calibrates the whole stack against closed forms.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace mvig {
namespace quad {

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

namespace detail {

// Kronrod abscissae (positive half) and weights; Gauss-7 weights align with
// the odd-indexed abscissae plus the center.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15(const F& f, double a, double b, double& kronrod, double& gauss) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double fsum = f(c - x) + f(c + x);
        resk += kWgk[j] * fsum;
        if (j % 2 == 1) resg += kWg[j / 2] * fsum;
    }
    kronrod = resk * h;
    gauss = resg * h;
}

template <class F>
double adapt(const F& f, double a, double b, double tol, int depth,
             Result& out) {
    double k, g;
    gk15(f, a, b, k, g);
    out.evaluations += 15;
    const double err = std::abs(k - g);
    if (err <= tol || depth >= 48 || !(b - a > 1e-300)) {
        out.error_estimate += err;
        return k;
    }
    const double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * tol, depth + 1, out) +
           adapt(f, m, b, 0.5 * tol, depth + 1, out);
}

} // namespace detail

// Integral of f over (a, b); either endpoint may be +/- infinity. abs_tol is
// the absolute tolerance budget for the whole interval.
template <class F>
Result integrate(const F& f, double a, double b, double abs_tol) {
    Result out;
    const double inf = std::numeric_limits<double>::infinity();
    if (a > -inf && b < inf) {
        out.value = detail::adapt(f, a, b, abs_tol, 0, out);
    } else if (a > -inf && b == inf) {
        // x = a + t/(1-t), dx = dt/(1-t)^2
        auto g = [&](double t) {
            const double om = 1.0 - t;
            return f(a + t / om) / (om * om);
        };
        out.value = detail::adapt(g, 0.0, 1.0, abs_tol, 0, out);
    } else if (a == -inf && b < inf) {
        auto g = [&](double t) {
            const double om = 1.0 - t;
            return f(b - t / om) / (om * om);
        };
        out.value = detail::adapt(g, 0.0, 1.0, abs_tol, 0, out);
    } else {
        // x = t/(1-t^2), dx = (1+t^2)/(1-t^2)^2 dt
        auto g = [&](double t) {
            const double om = 1.0 - t * t;
            return f(t / om) * (1.0 + t * t) / (om * om);
        };
        out.value = detail::adapt(g, -1.0, 1.0, abs_tol, 0, out);
    }
    return out;
}

// Iterated integral over a box (entries may be infinite). The inner levels
// run at a fraction of the outer tolerance; d <= 3 in practice.
inline Result integrate_box(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> lower, std::vector<double> upper, double abs_tol,
    double inner_shrink = 0.05) {
    struct Level {
        const std::function<double(const std::vector<double>&)>* f;
        const std::vector<double>* lower;
        const std::vector<double>* upper;
        std::vector<double> point;
        double inner_shrink;
        long evaluations = 0;
        double inner_error = 0.0;

        double run(std::size_t dim, double tol) {
            if (dim == lower->size()) {
                ++evaluations;
                return (*f)(point);
            }
            point.resize(dim + 1);
            auto slice = [&](double x) {
                point.resize(dim + 1);
                point[dim] = x;
                return run(dim + 1, tol * inner_shrink);
            };
            Result r = integrate(slice, (*lower)[dim], (*upper)[dim], tol);
            evaluations += 0; // counted at the leaves
            if (dim > 0) inner_error += r.error_estimate;
            if (dim == 0) outer_error = r.error_estimate;
            return r.value;
        }
        double outer_error = 0.0;
    };

    Level level{&f, &lower, &upper, {}, inner_shrink};
    Result out;
    out.value = level.run(0, abs_tol);
    out.error_estimate = level.outer_error;
    out.evaluations = level.evaluations;
    return out;
}

} // namespace quad
} // namespace mvig
