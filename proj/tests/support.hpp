#pragma once

// Shared helpers for the test suites: finite-difference oracles and a
// random expression generator kept independent of the AD evaluation
// paths it is used to check.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fnbrack/expr.hpp"
#include "fnbrack/rng.hpp"
#include "fnbrack/smooth.hpp"

namespace testsupport {

using fnbrack::Rng;
using fnbrack::Vec;

inline Vec random_point(Rng& rng, const fnbrack::Chart& c)
{
    Vec p(c.dim);
    for (int i = 0; i < c.dim; ++i) p[i] = rng.uniform(c.box_lo[i], c.box_hi[i]);
    return p;
}

inline Vec random_vector(Rng& rng, int dim, double scale = 1.0)
{
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.uniform(-scale, scale);
    return v;
}

// Scalar function of a real vector for FD checks.
using RealFn = std::function<double(const Vec&)>;

inline double fd_partial(const RealFn& f, Vec x, int j, double h)
{
    x[j] += h;
    const double fp = f(x);
    x[j] -= 2 * h;
    const double fm = f(x);
    return (fp - fm) / (2 * h);
}

inline double fd_second(const RealFn& f, Vec x, int i, int j, double h)
{
    if (i == j) {
        const double f0 = f(x);
        x[i] += h;
        const double fp = f(x);
        x[i] -= 2 * h;
        const double fm = f(x);
        return (fp - 2 * f0 + fm) / (h * h);
    }
    Vec y = x;
    y[i] += h; y[j] += h;
    const double fpp = f(y);
    y = x; y[i] += h; y[j] -= h;
    const double fpm = f(y);
    y = x; y[i] -= h; y[j] += h;
    const double fmp = f(y);
    y = x; y[i] -= h; y[j] -= h;
    const double fmm = f(y);
    return (fpp - fpm - fmp + fmm) / (4 * h * h);
}

// Jacobian of a SmoothMap by central differences.
inline fnbrack::Mat fd_jacobian(const fnbrack::SmoothMap& f, const Vec& p, double h = 1e-6)
{
    const int n = f.source.dim, m = f.target.dim;
    fnbrack::Mat j(m, n);
    for (int c = 0; c < n; ++c) {
        Vec xp = p, xm = p;
        xp[c] += h;
        xm[c] -= h;
        const Vec fp = f.apply(xp);
        const Vec fm = f.apply(xm);
        for (int r = 0; r < m; ++r) j(r, c) = (fp[r] - fm[r]) / (2 * h);
    }
    return j;
}

// Random expression source text, depth-bounded, avoiding domain
// boundaries (denominators, log and sqrt arguments are kept positive
// by construction so FD probes stay in-domain).
inline std::string random_expr_text(Rng& rng, int arity, int depth)
{
    auto lit = [&]() {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", rng.uniform(-2.0, 2.0));
        std::string s(buf);
        if (s[0] == '-') return "(0 " + s.insert(1, " ") + ")";  // "-c" -> "(0 - c)"
        return s;
    };
    auto var = [&]() { return "x" + std::to_string(1 + rng.below(arity)); };
    if (depth <= 0) return rng.uniform01() < 0.6 ? var() : lit();
    switch (rng.below(8)) {
    case 0: return "(" + random_expr_text(rng, arity, depth - 1) + " + " + random_expr_text(rng, arity, depth - 1) + ")";
    case 1: return "(" + random_expr_text(rng, arity, depth - 1) + " - " + random_expr_text(rng, arity, depth - 1) + ")";
    case 2: return "(" + random_expr_text(rng, arity, depth - 1) + "*" + random_expr_text(rng, arity, depth - 1) + ")";
    case 3: return "(" + random_expr_text(rng, arity, depth - 1) + "/(2 + (" + random_expr_text(rng, arity, depth - 1) + ")^2))";
    case 4: return "sin(" + random_expr_text(rng, arity, depth - 1) + ")";
    case 5: return "cos(" + random_expr_text(rng, arity, depth - 1) + ")";
    case 6: return "atan(" + random_expr_text(rng, arity, depth - 1) + ")";
    default: return "log(2 + (" + random_expr_text(rng, arity, depth - 1) + ")^2)";
    }
}

// Smooth polynomial/trig coefficient text for random forms: globally
// smooth, bounded growth.
inline std::string random_coeff_text(Rng& rng, int arity)
{
    auto term = [&]() -> std::string {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", rng.uniform(-1.0, 1.0));
        std::string c = std::string("(0 + ") + buf + ")";
        switch (rng.below(4)) {
        case 0: return c;
        case 1: return c + "*x" + std::to_string(1 + rng.below(arity));
        case 2: return c + "*x" + std::to_string(1 + rng.below(arity)) + "*x" +
                       std::to_string(1 + rng.below(arity));
        default: return c + "*sin(x" + std::to_string(1 + rng.below(arity)) + ")";
        }
    };
    return term() + " + " + term();
}

}  // namespace testsupport
