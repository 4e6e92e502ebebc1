#pragma once

// Dense vectors and matrices at desk scale (dims <= ~16). Row-major.

#include <cstddef>
#include <vector>

#include "fnbrack/errors.hpp"

namespace fnbrack {

using Vec = std::vector<double>;

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Mat identity(int n)
    {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Vec matvec(const Mat& m, const Vec& x)
{
    if (static_cast<int>(x.size()) != m.cols) throw DimensionError("matvec: size mismatch");
    Vec y(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) y[i] += m(i, j) * x[j];
    return y;
}

inline Mat matmul(const Mat& a, const Mat& b)
{
    if (a.cols != b.rows) throw DimensionError("matmul: size mismatch");
    Mat c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline double max_abs(const Vec& v)
{
    double m = 0.0;
    for (double x : v) {
        const double a = x < 0 ? -x : x;
        if (a > m) m = a;
    }
    return m;
}

inline double max_abs_diff(const Vec& a, const Vec& b)
{
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        if (d < 0) d = -d;
        if (d > m) m = d;
    }
    return m;
}

inline Vec axpy(double alpha, const Vec& x, const Vec& y)
{
    Vec r(x.size());
    for (size_t i = 0; i < x.size(); ++i) r[i] = alpha * x[i] + y[i];
    return r;
}

}  // namespace fnbrack
