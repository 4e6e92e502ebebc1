#pragma once

// Small dense linear algebra generic over the jet scalar. Pivoting
// decisions use the innermost real value, so a solve over nested duals
// follows the same elimination order as the underlying real solve.

#include <cmath>
#include <vector>

#include "fnbrack/errors.hpp"
#include "fnbrack/jet.hpp"

namespace fnbrack::detail {

template <class S>
struct SMat {
    int rows = 0;
    int cols = 0;
    std::vector<S> a;

    SMat() = default;
    SMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, from_real<S>(0.0)) {}

    S& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const S& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

// Solve the square system M x = b in place (Gaussian elimination,
// partial pivoting on real parts).
template <class S>
std::vector<S> solve_square(SMat<S> m, std::vector<S> b)
{
    const int n = m.rows;
    if (m.cols != n || static_cast<int>(b.size()) != n)
        throw DimensionError("solve_square: shape mismatch");
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(value_of(m(k, k)));
        for (int i = k + 1; i < n; ++i) {
            const double c = std::fabs(value_of(m(i, k)));
            if (c > best) { best = c; piv = i; }
        }
        if (best == 0.0) throw Error("solve_square: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            S f = m(i, k) / m(k, k);
            for (int j = k; j < n; ++j) m(i, j) = m(i, j) - f * m(k, j);
            b[i] = b[i] - f * b[k];
        }
    }
    std::vector<S> x(n, from_real<S>(0.0));
    for (int i = n - 1; i >= 0; --i) {
        S acc = b[i];
        for (int j = i + 1; j < n; ++j) acc = acc - m(i, j) * x[j];
        x[i] = acc / m(i, i);
    }
    return x;
}

// Least-squares solution of the overdetermined system M x = b via the
// normal equations; M must have full column rank.
template <class S>
std::vector<S> solve_least_squares(const SMat<S>& m, const std::vector<S>& b)
{
    const int r = m.rows, c = m.cols;
    if (static_cast<int>(b.size()) != r) throw DimensionError("solve_least_squares: shape mismatch");
    SMat<S> mtm(c, c);
    std::vector<S> mtb(c, from_real<S>(0.0));
    for (int i = 0; i < c; ++i) {
        for (int j = 0; j < c; ++j) {
            S acc = from_real<S>(0.0);
            for (int k = 0; k < r; ++k) acc = acc + m(k, i) * m(k, j);
            mtm(i, j) = acc;
        }
        S acc = from_real<S>(0.0);
        for (int k = 0; k < r; ++k) acc = acc + m(k, i) * b[k];
        mtb[i] = acc;
    }
    return solve_square(std::move(mtm), std::move(mtb));
}

// Determinant by Laplace expansion; fine for the k x k minors that show
// up when evaluating forms (k <= 4).
template <class S>
S det_laplace(const SMat<S>& m)
{
    const int n = m.rows;
    if (n == 0) return from_real<S>(1.0);
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    S acc = from_real<S>(0.0);
    SMat<S> sub(n - 1, n - 1);
    for (int jc = 0; jc < n; ++jc) {
        for (int i = 1; i < n; ++i) {
            int js = 0;
            for (int j = 0; j < n; ++j) {
                if (j == jc) continue;
                sub(i - 1, js++) = m(i, j);
            }
        }
        S term = m(0, jc) * det_laplace(sub);
        acc = (jc % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

}  // namespace fnbrack::detail
