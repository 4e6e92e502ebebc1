#pragma once

// Truncated nested dual numbers. Nesting Dual<Dual<double>> propagates
// second-order directional derivatives; all evaluation code in this
// library is generic over the scalar so the same expression tree yields
// values, Jacobians and mixed partials.

#include <cmath>
#include <type_traits>

namespace fnbrack {

template <class T>
struct Dual {
    T v{};  // value
    T d{};  // infinitesimal part

    Dual() = default;
    Dual(const T& v_) : v(v_) {}
    Dual(const T& v_, const T& d_) : v(v_), d(d_) {}

    // promote a real constant through every nesting level
    template <class U = T, class = std::enable_if_t<!std::is_same_v<U, double>>>
    Dual(double x) : v(x) {}
};

using Jet0 = double;
using Jet1 = Dual<double>;
using Jet2 = Dual<Jet1>;
using Jet3 = Dual<Jet2>;

// ----- arithmetic -----

template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator+(const Dual<T>& a, double b) { return {a.v + b, a.d}; }
template <class T> Dual<T> operator+(double a, const Dual<T>& b) { return {a + b.v, b.d}; }

template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double b) { return {a.v - b, a.d}; }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return {a - b.v, -b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }

template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return {a.v * b, a.d * b}; }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return {a * b.v, a * b.d}; }

template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b)
{
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return {a.v / b, a.d / b}; }
template <class T> Dual<T> operator/(double a, const Dual<T>& b)
{
    return {a / b.v, -(a * b.d) / (b.v * b.v)};
}

template <class T> Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) { a = a + b; return a; }
template <class T> Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) { a = a - b; return a; }

// ----- elementary functions -----

template <class T> Dual<T> sin(const Dual<T>& a)
{
    using std::sin; using std::cos;
    return {sin(a.v), cos(a.v) * a.d};
}

template <class T> Dual<T> cos(const Dual<T>& a)
{
    using std::sin; using std::cos;
    return {cos(a.v), -(sin(a.v) * a.d)};
}

template <class T> Dual<T> tan(const Dual<T>& a)
{
    using std::tan; using std::cos;
    auto c = cos(a.v);
    return {tan(a.v), a.d / (c * c)};
}

template <class T> Dual<T> exp(const Dual<T>& a)
{
    using std::exp;
    auto e = exp(a.v);
    return {e, e * a.d};
}

template <class T> Dual<T> log(const Dual<T>& a)
{
    using std::log;
    return {log(a.v), a.d / a.v};
}

template <class T> Dual<T> sqrt(const Dual<T>& a)
{
    using std::sqrt;
    auto s = sqrt(a.v);
    return {s, a.d / (2.0 * s)};
}

template <class T> Dual<T> atan(const Dual<T>& a)
{
    using std::atan;
    return {atan(a.v), a.d / (1.0 + a.v * a.v)};
}

// Innermost real value of a (possibly nested) jet.
inline double value_of(double x) { return x; }
template <class T> double value_of(const Dual<T>& a) { return value_of(a.v); }

// Promote a real constant to any jet depth.
template <class S> S from_real(double x) { return S(x); }
template <> inline double from_real<double>(double x) { return x; }

// Integer power by repeated multiplication; valid for any base,
// including negative values and zero with n >= 0.
template <class S> S pow_int(const S& base, long n)
{
    if (n < 0) return from_real<S>(1.0) / pow_int(base, -n);
    S r = from_real<S>(1.0);
    S b = base;
    while (n > 0) {
        if (n & 1) r = r * b;
        b = b * b;
        n >>= 1;
    }
    return r;
}

inline double pow_real(double a, double p) { return std::pow(a, p); }
template <class T> Dual<T> pow_real(const Dual<T>& a, double p)
{
    return {pow_real(a.v, p), p * pow_real(a.v, p - 1.0) * a.d};
}

// General a^b for positive a.
template <class S> S pow_general(const S& a, const S& b) { return exp(b * log(a)); }
inline double pow_general(double a, double b) { return std::pow(a, b); }

}  // namespace fnbrack
