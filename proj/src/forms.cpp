#include "fnbrack/forms.hpp"

#include <algorithm>
#include <cmath>

#include "fnbrack/detail/multiindex.hpp"
#include "fnbrack/detail/slinalg.hpp"
#include "fnbrack/errors.hpp"

namespace fnbrack {

using detail::binomial;
using detail::increasing_indices;
using detail::rank_of;
using detail::shuffle_sign;
using detail::sort_with_sign;
using detail::SMat;

long form_component_count(int dim, int degree) { return binomial(dim, degree); }

void DerivationReport::merge(double residual, const Vec& point, const std::vector<Vec>& vectors,
                             const std::string& label)
{
    ++samples;
    if (residual > max_residual) {
        max_residual = residual;
        worst_point = point;
        worst_vectors = vectors;
        worst_label = label;
    }
}

namespace {

void require_same_chart(const Chart& a, const Chart& b, const char* who)
{
    if (a.dim != b.dim) throw DimensionError(std::string(who) + ": charts do not match");
}

// ----- simple coefficient nodes -----

class AxpyCoeff final : public SmoothFnCRTP<AxpyCoeff> {
public:
    AxpyCoeff(double a, SmoothFnPtr x, double b, SmoothFnPtr y)
        : a_(a), x_(std::move(x)), b_(b), y_(std::move(y))
    {
        if (y_ && (x_->arity_in() != y_->arity_in() || x_->arity_out() != y_->arity_out()))
            throw DimensionError("axpy: shape mismatch");
    }
    int arity_in() const override { return x_->arity_in(); }
    int arity_out() const override { return x_->arity_out(); }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        std::vector<S> xv(x_->arity_out());
        x_->eval(in, std::span<S>(xv));
        if (y_) {
            std::vector<S> yv(y_->arity_out());
            y_->eval(in, std::span<S>(yv));
            for (size_t i = 0; i < xv.size(); ++i) out[i] = a_ * xv[i] + b_ * yv[i];
        } else {
            for (size_t i = 0; i < xv.size(); ++i) out[i] = a_ * xv[i];
        }
    }

private:
    double a_;
    SmoothFnPtr x_;
    double b_;
    SmoothFnPtr y_;
};

// out[t] = scale[t] * in[perm[t]] of the wrapped function's output.
class PermuteScaleCoeff final : public SmoothFnCRTP<PermuteScaleCoeff> {
public:
    PermuteScaleCoeff(SmoothFnPtr inner, std::vector<int> perm, std::vector<double> scale)
        : inner_(std::move(inner)), perm_(std::move(perm)), scale_(std::move(scale)) {}
    int arity_in() const override { return inner_->arity_in(); }
    int arity_out() const override { return static_cast<int>(perm_.size()); }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        std::vector<S> v(inner_->arity_out());
        inner_->eval(in, std::span<S>(v));
        for (size_t t = 0; t < perm_.size(); ++t) out[t] = scale_[t] * v[perm_[t]];
    }

private:
    SmoothFnPtr inner_;
    std::vector<int> perm_;
    std::vector<double> scale_;
};

// ----- insertion -----

struct InsertTerm {
    int out_index;  // multi-index rank of the result
    int k_index;    // flat index into the VForm coefficients
    int w_index;    // multi-index rank into the SForm coefficients
    double weight;
};

// Terms of i_K w by shuffle enumeration: for each increasing J of
// length k+p-1 and each k-subset A of its positions,
//   sgn(shuffle) * w(K(e_{J_A}), e_{J_B}).
std::vector<InsertTerm> insert_terms_shuffle(int n, int k, int p)
{
    std::vector<InsertTerm> terms;
    const int m = k + p - 1;
    const auto js = increasing_indices(n, m);
    const auto subsets = increasing_indices(m, k);
    for (size_t jr = 0; jr < js.size(); ++jr) {
        const auto& j = js[jr];
        for (const auto& a : subsets) {
            const int s0 = shuffle_sign(a);
            std::vector<int> ja(k);
            for (int t = 0; t < k; ++t) ja[t] = j[a[t]];
            std::vector<int> jb;
            jb.reserve(m - k);
            {
                size_t ai = 0;
                for (int pos = 0; pos < m; ++pos) {
                    if (ai < a.size() && a[ai] == pos) { ++ai; continue; }
                    jb.push_back(j[pos]);
                }
            }
            const long ka = rank_of(ja, n);
            for (int i = 0; i < n; ++i) {
                std::vector<int> w_idx;
                w_idx.reserve(p);
                w_idx.push_back(i);
                w_idx.insert(w_idx.end(), jb.begin(), jb.end());
                const int s1 = sort_with_sign(w_idx);
                if (s1 == 0) continue;
                terms.push_back({static_cast<int>(jr), static_cast<int>(ka * n + i),
                                 static_cast<int>(rank_of(w_idx, n)),
                                 static_cast<double>(s0 * s1)});
            }
        }
    }
    return terms;
}

// Same operator through the full S_{k+p-1} sum with 1/(k!(p-1)!).
std::vector<InsertTerm> insert_terms_full(int n, int k, int p)
{
    std::vector<InsertTerm> terms;
    const int m = k + p - 1;
    const auto js = increasing_indices(n, m);
    std::vector<std::pair<std::vector<int>, int>> perms;
    detail::permutations_with_sign(m, perms);
    double norm = 1.0;
    for (int t = 2; t <= k; ++t) norm *= t;
    for (int t = 2; t <= p - 1; ++t) norm *= t;
    norm = 1.0 / norm;
    for (size_t jr = 0; jr < js.size(); ++jr) {
        const auto& j = js[jr];
        for (const auto& [perm, psign] : perms) {
            std::vector<int> ja(k);
            for (int t = 0; t < k; ++t) ja[t] = j[perm[t]];
            const int sa = sort_with_sign(ja);
            if (sa == 0) throw Error("insert_terms_full: repeated index");
            const long ka = rank_of(ja, n);
            std::vector<int> jb(m - k);
            for (int t = k; t < m; ++t) jb[t - k] = j[perm[t]];
            for (int i = 0; i < n; ++i) {
                std::vector<int> w_idx;
                w_idx.reserve(p);
                w_idx.push_back(i);
                w_idx.insert(w_idx.end(), jb.begin(), jb.end());
                const int s1 = sort_with_sign(w_idx);
                if (s1 == 0) continue;
                terms.push_back({static_cast<int>(jr), static_cast<int>(ka * n + i),
                                 static_cast<int>(rank_of(w_idx, n)),
                                 norm * psign * sa * s1});
            }
        }
    }
    return terms;
}

class InsertCoeff final : public SmoothFnCRTP<InsertCoeff> {
public:
    InsertCoeff(SmoothFnPtr kc, SmoothFnPtr wc, int n, long out_comps, std::vector<InsertTerm> terms)
        : kc_(std::move(kc)), wc_(std::move(wc)), n_(n), out_(out_comps), terms_(std::move(terms)) {}
    int arity_in() const override { return n_; }
    int arity_out() const override { return static_cast<int>(out_); }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        std::vector<S> kv(kc_->arity_out()), wv(wc_->arity_out());
        kc_->eval(in, std::span<S>(kv));
        wc_->eval(in, std::span<S>(wv));
        for (long t = 0; t < out_; ++t) out[t] = from_real<S>(0.0);
        for (const auto& tm : terms_)
            out[tm.out_index] = out[tm.out_index] + tm.weight * (kv[tm.k_index] * wv[tm.w_index]);
    }

private:
    SmoothFnPtr kc_;
    SmoothFnPtr wc_;
    int n_;
    long out_;
    std::vector<InsertTerm> terms_;
};

SForm insert_with_terms(const VForm& k, const SForm& w, bool full)
{
    require_same_chart(k.chart, w.chart, "insert");
    const int n = k.chart.dim;
    if (w.degree == 0) return sform_zero(k.chart, std::max(k.degree - 1, 0));
    const int m = k.degree + w.degree - 1;
    const long out = binomial(n, m);
    auto terms = full ? insert_terms_full(n, k.degree, w.degree)
                      : insert_terms_shuffle(n, k.degree, w.degree);
    return {k.chart, m,
            std::make_shared<InsertCoeff>(k.coeff, w.coeff, n, out, std::move(terms))};
}

// ----- exterior differential -----

class ExtDCoeff final : public SmoothFnCRTPDepthRaising<ExtDCoeff> {
public:
    ExtDCoeff(SmoothFnPtr wc, int n, int p) : wc_(std::move(wc)), n_(n), p_(p)
    {
        const auto js = increasing_indices(n, p + 1);
        for (const auto& j : js) {
            std::vector<std::pair<int, int>> row;  // (coordinate, sub-multi-index rank)
            for (int a = 0; a <= p; ++a) {
                std::vector<int> sub;
                for (int t = 0; t <= p; ++t)
                    if (t != a) sub.push_back(j[t]);
                row.push_back({j[a], static_cast<int>(rank_of(sub, n))});
            }
            table_.push_back(std::move(row));
        }
    }
    int arity_in() const override { return n_; }
    int arity_out() const override { return static_cast<int>(table_.size()); }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        const int nc = wc_->arity_out();
        // partials[r][c] = d_r w_c
        std::vector<std::vector<S>> partials(n_);
        std::vector<Dual<S>> x(n_), y(nc);
        for (int r = 0; r < n_; ++r) {
            for (int i = 0; i < n_; ++i) x[i] = Dual<S>(in[i], from_real<S>(i == r ? 1.0 : 0.0));
            wc_->eval(std::span<const Dual<S>>(x), std::span<Dual<S>>(y));
            partials[r].resize(nc);
            for (int c = 0; c < nc; ++c) partials[r][c] = y[c].d;
        }
        for (size_t jr = 0; jr < table_.size(); ++jr) {
            S acc = from_real<S>(0.0);
            int sign = 1;
            for (const auto& [coord, sub] : table_[jr]) {
                acc = sign > 0 ? acc + partials[coord][sub] : acc - partials[coord][sub];
                sign = -sign;
            }
            out[jr] = acc;
        }
    }

private:
    SmoothFnPtr wc_;
    int n_;
    int p_;
    std::vector<std::vector<std::pair<int, int>>> table_;
};

// ----- pullback -----

class PullbackCoeff final : public SmoothFnCRTPDepthRaising<PullbackCoeff> {
public:
    PullbackCoeff(SmoothFnPtr map, SmoothFnPtr wc, int q)
        : map_(std::move(map)), wc_(std::move(wc)), q_(q),
          ns_(map_->arity_in()), nt_(map_->arity_out()),
          src_idx_(increasing_indices(ns_, q)), tgt_idx_(increasing_indices(nt_, q)) {}
    int arity_in() const override { return ns_; }
    int arity_out() const override { return static_cast<int>(src_idx_.size()); }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        // y = f(x) and the Jacobian columns in one sweep
        std::vector<Dual<S>> x(ns_), yj(nt_);
        SMat<S> jac(nt_, ns_);
        std::vector<S> y(nt_);
        for (int c = 0; c < ns_; ++c) {
            for (int i = 0; i < ns_; ++i) x[i] = Dual<S>(in[i], from_real<S>(i == c ? 1.0 : 0.0));
            map_->eval(std::span<const Dual<S>>(x), std::span<Dual<S>>(yj));
            for (int r = 0; r < nt_; ++r) jac(r, c) = yj[r].d;
            if (c == 0)
                for (int r = 0; r < nt_; ++r) y[r] = yj[r].v;
        }
        std::vector<S> wv(wc_->arity_out());
        wc_->eval(std::span<const S>(y), std::span<S>(wv));
        SMat<S> minor(q_, q_);
        for (size_t jr = 0; jr < src_idx_.size(); ++jr) {
            S acc = from_real<S>(0.0);
            for (size_t ir = 0; ir < tgt_idx_.size(); ++ir) {
                for (int a = 0; a < q_; ++a)
                    for (int b = 0; b < q_; ++b)
                        minor(a, b) = jac(tgt_idx_[ir][a], src_idx_[jr][b]);
                acc = acc + wv[ir] * detail::det_laplace(minor);
            }
            out[jr] = acc;
        }
    }

private:
    SmoothFnPtr map_;
    SmoothFnPtr wc_;
    int q_;
    int ns_;
    int nt_;
    std::vector<std::vector<int>> src_idx_;
    std::vector<std::vector<int>> tgt_idx_;
};

// ----- Nijenhuis tensor and projection curvature -----

// Both need the pointwise matrix K^i_j and its first partials; the
// argument vectors are extended as coordinate-constant fields, which is
// sound because the results are tensors.
class EndoBracketCoeff final : public SmoothFnCRTPDepthRaising<EndoBracketCoeff> {
public:
    enum class Mode { Nijenhuis, Curvature };
    EndoBracketCoeff(SmoothFnPtr kc, int n, Mode mode, double proj_tol)
        : kc_(std::move(kc)), n_(n), mode_(mode), proj_tol_(proj_tol),
          pairs_(increasing_indices(n, 2)) {}
    int arity_in() const override { return n_; }
    int arity_out() const override { return static_cast<int>(pairs_.size()) * n_; }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        const int n = n_;
        std::vector<S> kv(n * n);
        std::vector<std::vector<S>> dk(n);  // dk[r][j*n+i] = d_r K^i_j
        {
            std::vector<Dual<S>> x(n), y(n * n);
            for (int r = 0; r < n; ++r) {
                for (int i = 0; i < n; ++i) x[i] = Dual<S>(in[i], from_real<S>(i == r ? 1.0 : 0.0));
                kc_->eval(std::span<const Dual<S>>(x), std::span<Dual<S>>(y));
                dk[r].resize(n * n);
                for (int t = 0; t < n * n; ++t) dk[r][t] = y[t].d;
                if (r == 0)
                    for (int t = 0; t < n * n; ++t) kv[t] = y[t].v;
            }
        }
        if (mode_ == Mode::Curvature) {
            double worst = 0.0;
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    double acc = 0.0;
                    for (int t = 0; t < n; ++t)
                        acc += value_of(kv[t * n + i]) * value_of(kv[j * n + t]);
                    worst = std::max(worst, std::fabs(acc - value_of(kv[j * n + i])));
                }
            if (worst > proj_tol_)
                throw NotAProjection("projection_curvature: |K^2 - K| = " + std::to_string(worst));
        }

        auto col = [&](int j, int i) -> const S& { return kv[j * n + i]; };
        auto dcol = [&](int r, int j, int i) -> const S& { return dk[r][j * n + i]; };

        std::vector<S> u(n), v(n), lie(n), w(n), res(n);
        for (size_t pr = 0; pr < pairs_.size(); ++pr) {
            const int a = pairs_[pr][0], b = pairs_[pr][1];
            if (mode_ == Mode::Nijenhuis) {
                // N(e_a, e_b) = [K_a, K_b] - K(d_a K_b - d_b K_a), constant-field brackets vanish
                for (int i = 0; i < n; ++i) {
                    S acc = from_real<S>(0.0);
                    for (int j = 0; j < n; ++j)
                        acc = acc + col(a, j) * dcol(j, b, i) - col(b, j) * dcol(j, a, i);
                    lie[i] = acc;
                    w[i] = dcol(a, b, i) - dcol(b, a, i);
                }
                for (int i = 0; i < n; ++i) {
                    S acc = lie[i];
                    for (int j = 0; j < n; ++j) acc = acc - col(j, i) * w[j];
                    res[i] = acc;
                }
            } else {
                // R(e_a, e_b) = K([H e_a, H e_b]) with H = Id - K
                for (int i = 0; i < n; ++i) {
                    u[i] = (i == a ? from_real<S>(1.0) : from_real<S>(0.0)) - col(a, i);
                    v[i] = (i == b ? from_real<S>(1.0) : from_real<S>(0.0)) - col(b, i);
                }
                for (int i = 0; i < n; ++i) {
                    S acc = from_real<S>(0.0);
                    for (int j = 0; j < n; ++j)
                        acc = acc - u[j] * dcol(j, b, i) + v[j] * dcol(j, a, i);
                    lie[i] = acc;
                }
                for (int i = 0; i < n; ++i) {
                    S acc = from_real<S>(0.0);
                    for (int j = 0; j < n; ++j) acc = acc + col(j, i) * lie[j];
                    res[i] = acc;
                }
            }
            for (int i = 0; i < n; ++i) out[pr * n + i] = res[i];
        }
    }

private:
    SmoothFnPtr kc_;
    int n_;
    Mode mode_;
    double proj_tol_;
    std::vector<std::vector<int>> pairs_;
};

// ----- product / transported forms -----

class ProductVFormCoeff final : public SmoothFnCRTP<ProductVFormCoeff> {
public:
    ProductVFormCoeff(SmoothFnPtr c1, SmoothFnPtr c2, int n1, int n2, int degree)
        : c1_(std::move(c1)), c2_(std::move(c2)), n1_(n1), n2_(n2)
    {
        const int n = n1 + n2;
        const auto js = increasing_indices(n, degree);
        map_.assign(js.size() * static_cast<size_t>(n), {-1, -1});
        for (size_t jr = 0; jr < js.size(); ++jr) {
            const auto& j = js[jr];
            const bool in1 = std::all_of(j.begin(), j.end(), [&](int t) { return t < n1; });
            const bool in2 = std::all_of(j.begin(), j.end(), [&](int t) { return t >= n1; });
            if (in1) {
                const long r1 = rank_of(j, n1);
                for (int i = 0; i < n1; ++i) map_[jr * n + i] = {1, static_cast<int>(r1 * n1 + i)};
            } else if (in2 && degree > 0) {
                std::vector<int> shifted(j.size());
                for (size_t t = 0; t < j.size(); ++t) shifted[t] = j[t] - n1;
                const long r2 = rank_of(shifted, n2);
                for (int i = 0; i < n2; ++i)
                    map_[jr * n + n1 + i] = {2, static_cast<int>(r2 * n2 + i)};
            } else if (in2 && degree == 0) {
                for (int i = 0; i < n2; ++i)
                    map_[jr * n + n1 + i] = {2, i};
            }
        }
        out_ = static_cast<int>(map_.size());
    }
    int arity_in() const override { return n1_ + n2_; }
    int arity_out() const override { return out_; }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        std::vector<S> v1(c1_->arity_out()), v2(c2_->arity_out());
        c1_->eval(in.subspan(0, n1_), std::span<S>(v1));
        c2_->eval(in.subspan(n1_, n2_), std::span<S>(v2));
        for (int t = 0; t < out_; ++t) {
            const auto& [which, idx] = map_[t];
            if (which == 1) out[t] = v1[idx];
            else if (which == 2) out[t] = v2[idx];
            else out[t] = from_real<S>(0.0);
        }
    }

private:
    SmoothFnPtr c1_;
    SmoothFnPtr c2_;
    int n1_;
    int n2_;
    int out_ = 0;
    std::vector<std::pair<int, int>> map_;
};

class TransportVFormCoeff final : public SmoothFnCRTPDepthRaising<TransportVFormCoeff> {
public:
    TransportVFormCoeff(SmoothFnPtr fwd, SmoothFnPtr inv, SmoothFnPtr kc, int n, int degree)
        : fwd_(std::move(fwd)), inv_(std::move(inv)), kc_(std::move(kc)), n_(n), k_(degree),
          idx_(increasing_indices(n, degree)) {}
    int arity_in() const override { return n_; }
    int arity_out() const override { return static_cast<int>(idx_.size()) * n_; }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        const int n = n_;
        // x = f^{-1}(y), Jg = D f^{-1}(y), Jf = D f(x)
        std::vector<S> x(n);
        SMat<S> jg(n, n), jf(n, n);
        {
            std::vector<Dual<S>> yy(n), xx(n);
            for (int c = 0; c < n; ++c) {
                for (int i = 0; i < n; ++i) yy[i] = Dual<S>(in[i], from_real<S>(i == c ? 1.0 : 0.0));
                inv_->eval(std::span<const Dual<S>>(yy), std::span<Dual<S>>(xx));
                for (int r = 0; r < n; ++r) jg(r, c) = xx[r].d;
                if (c == 0)
                    for (int r = 0; r < n; ++r) x[r] = xx[r].v;
            }
            for (int c = 0; c < n; ++c) {
                for (int i = 0; i < n; ++i) xx[i] = Dual<S>(x[i], from_real<S>(i == c ? 1.0 : 0.0));
                fwd_->eval(std::span<const Dual<S>>(xx), std::span<Dual<S>>(yy));
                for (int r = 0; r < n; ++r) jf(r, c) = yy[r].d;
            }
        }
        std::vector<S> kv(kc_->arity_out());
        kc_->eval(std::span<const S>(x), std::span<S>(kv));
        SMat<S> minor(k_, k_);
        std::vector<S> acc(n);
        for (size_t jr = 0; jr < idx_.size(); ++jr) {
            for (int i = 0; i < n; ++i) acc[i] = from_real<S>(0.0);
            for (size_t ir = 0; ir < idx_.size(); ++ir) {
                for (int a = 0; a < k_; ++a)
                    for (int b = 0; b < k_; ++b) minor(a, b) = jg(idx_[ir][a], idx_[jr][b]);
                const S det = detail::det_laplace(minor);
                for (int i = 0; i < n; ++i) acc[i] = acc[i] + kv[ir * n + i] * det;
            }
            // push the value through Jf
            for (int i = 0; i < n; ++i) {
                S s = from_real<S>(0.0);
                for (int j = 0; j < n; ++j) s = s + jf(i, j) * acc[j];
                out[jr * n + i] = s;
            }
        }
    }

private:
    SmoothFnPtr fwd_;
    SmoothFnPtr inv_;
    SmoothFnPtr kc_;
    int n_;
    int k_;
    std::vector<std::vector<int>> idx_;
};

// ----- evaluation on concrete vectors -----

double minor_det(const Mat& cols, const std::vector<int>& rows)
{
    const int k = static_cast<int>(rows.size());
    SMat<double> m(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) m(a, b) = cols(rows[a], b);
    return detail::det_laplace(m);
}

Mat columns_from(const std::vector<Vec>& vectors, int dim)
{
    Mat m(dim, static_cast<int>(vectors.size()));
    for (size_t c = 0; c < vectors.size(); ++c) {
        if (static_cast<int>(vectors[c].size()) != dim)
            throw DimensionError("form evaluation: vector has wrong dimension");
        for (int r = 0; r < dim; ++r) m(r, static_cast<int>(c)) = vectors[c][r];
    }
    return m;
}

// the coordinate function x^i as a one-output SmoothFn
SmoothFnPtr coordinate_fn(int dim, int i) { return fn_select({i}, dim); }

SForm lie_derivative_of_coordinate(const VForm& m, int i)
{
    // L_M x^i = (-1)^m i_M dx^i; dx^i is constant so no differentiation
    // happens at this level.
    const double sign = (m.degree % 2 == 0) ? 1.0 : -1.0;
    return sform_scale(sign, insert(m, sform_dx(m.chart, i)));
}

}  // namespace

// ----- constructors -----

SForm sform_from_exprs(Chart chart, int degree, std::string_view components)
{
    auto fn = expr::parse(components, chart.dim);
    if (fn.arity_out != form_component_count(chart.dim, degree))
        throw DimensionError("sform_from_exprs: expected " +
                             std::to_string(form_component_count(chart.dim, degree)) +
                             " components, got " + std::to_string(fn.arity_out));
    return {std::move(chart), degree, fn_from_expr(std::move(fn))};
}

SForm sform_zero(Chart chart, int degree)
{
    const long nc = form_component_count(chart.dim, degree);
    const int dim = chart.dim;
    return {std::move(chart), degree, fn_constant(Vec(nc, 0.0), dim)};
}

SForm sform_constant(Chart chart, int degree, Vec coeffs)
{
    if (static_cast<long>(coeffs.size()) != form_component_count(chart.dim, degree))
        throw DimensionError("sform_constant: wrong component count");
    const int dim = chart.dim;
    return {std::move(chart), degree, fn_constant(std::move(coeffs), dim)};
}

SForm coordinate_sform(Chart chart, int i)
{
    const int dim = chart.dim;
    if (i < 0 || i >= dim) throw DimensionError("coordinate_sform: index out of range");
    return {std::move(chart), 0, coordinate_fn(dim, i)};
}

SForm sform_dx(Chart chart, int i)
{
    const int dim = chart.dim;
    if (i < 0 || i >= dim) throw DimensionError("sform_dx: index out of range");
    Vec c(dim, 0.0);
    c[i] = 1.0;
    return {std::move(chart), 1, fn_constant(std::move(c), dim)};
}

SForm sform_axpy(double a, const SForm& x, double b, const SForm& y)
{
    require_same_chart(x.chart, y.chart, "sform_axpy");
    if (x.degree != y.degree) throw DimensionError("sform_axpy: degree mismatch");
    return {x.chart, x.degree, std::make_shared<AxpyCoeff>(a, x.coeff, b, y.coeff)};
}

SForm sform_scale(double a, const SForm& x)
{
    return {x.chart, x.degree, std::make_shared<AxpyCoeff>(a, x.coeff, 0.0, nullptr)};
}

VForm vform_from_exprs(Chart chart, int degree, std::string_view components)
{
    auto fn = expr::parse(components, chart.dim);
    const long want = chart.dim * form_component_count(chart.dim, degree);
    if (fn.arity_out != want)
        throw DimensionError("vform_from_exprs: expected " + std::to_string(want) +
                             " components, got " + std::to_string(fn.arity_out));
    return {std::move(chart), degree, fn_from_expr(std::move(fn))};
}

VForm vform_zero(Chart chart, int degree)
{
    const long nc = chart.dim * form_component_count(chart.dim, degree);
    const int dim = chart.dim;
    return {std::move(chart), degree, fn_constant(Vec(nc, 0.0), dim)};
}

VForm vform_identity(Chart chart)
{
    const int n = chart.dim;
    Vec c(static_cast<size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j) c[static_cast<size_t>(j) * n + j] = 1.0;
    return {std::move(chart), 1, fn_constant(std::move(c), n)};
}

VForm vform_constant(Chart chart, int degree, Vec coeffs)
{
    if (static_cast<long>(coeffs.size()) != chart.dim * form_component_count(chart.dim, degree))
        throw DimensionError("vform_constant: wrong component count");
    const int dim = chart.dim;
    return {std::move(chart), degree, fn_constant(std::move(coeffs), dim)};
}

VForm vform_axpy(double a, const VForm& x, double b, const VForm& y)
{
    require_same_chart(x.chart, y.chart, "vform_axpy");
    if (x.degree != y.degree) throw DimensionError("vform_axpy: degree mismatch");
    return {x.chart, x.degree, std::make_shared<AxpyCoeff>(a, x.coeff, b, y.coeff)};
}

VForm vform_scale(double a, const VForm& x)
{
    return {x.chart, x.degree, std::make_shared<AxpyCoeff>(a, x.coeff, 0.0, nullptr)};
}

VForm product_vform(const VForm& k1, const VForm& k2, const Chart& product)
{
    if (k1.degree != k2.degree) throw DimensionError("product_vform: degree mismatch");
    if (product.dim != k1.chart.dim + k2.chart.dim)
        throw DimensionError("product_vform: chart is not the product");
    return {product, k1.degree,
            std::make_shared<ProductVFormCoeff>(k1.coeff, k2.coeff, k1.chart.dim, k2.chart.dim,
                                                k1.degree)};
}

VForm pushforward_vform(const SmoothMap& f, const SmoothMap& f_inv, const VForm& k)
{
    require_same_chart(f.source, k.chart, "pushforward_vform");
    require_same_chart(f.source, f.target, "pushforward_vform (diffeo)");
    return {f.target, k.degree,
            std::make_shared<TransportVFormCoeff>(f.fn, f_inv.fn, k.coeff, k.chart.dim, k.degree)};
}

// ----- evaluation -----

Vec sform_coefficients(const SForm& w, const Vec& x)
{
    Vec out(w.coeff->arity_out());
    w.coeff->eval(std::span<const double>(x), std::span<double>(out));
    return out;
}

Vec vform_coefficients(const VForm& k, const Vec& x)
{
    Vec out(k.coeff->arity_out());
    k.coeff->eval(std::span<const double>(x), std::span<double>(out));
    return out;
}

double eval_sform(const SForm& w, const Vec& x, const std::vector<Vec>& vectors)
{
    if (static_cast<int>(vectors.size()) != w.degree)
        throw DimensionError("eval_sform: wrong number of vectors");
    const Vec c = sform_coefficients(w, x);
    if (w.degree == 0) return c[0];
    const Mat cols = columns_from(vectors, w.chart.dim);
    const auto idx = increasing_indices(w.chart.dim, w.degree);
    double acc = 0.0;
    for (size_t jr = 0; jr < idx.size(); ++jr) acc += c[jr] * minor_det(cols, idx[jr]);
    return acc;
}

Vec eval_vform(const VForm& k, const Vec& x, const std::vector<Vec>& vectors)
{
    if (static_cast<int>(vectors.size()) != k.degree)
        throw DimensionError("eval_vform: wrong number of vectors");
    const int n = k.chart.dim;
    const Vec c = vform_coefficients(k, x);
    Vec out(n, 0.0);
    if (k.degree == 0) {
        for (int i = 0; i < n; ++i) out[i] = c[i];
        return out;
    }
    const Mat cols = columns_from(vectors, n);
    const auto idx = increasing_indices(n, k.degree);
    for (size_t jr = 0; jr < idx.size(); ++jr) {
        const double d = minor_det(cols, idx[jr]);
        for (int i = 0; i < n; ++i) out[i] += c[jr * n + i] * d;
    }
    return out;
}

Vec eval_vector_form(const VectorForm& r, const Vec& x, const std::vector<Vec>& vectors)
{
    if (static_cast<int>(vectors.size()) != r.degree)
        throw DimensionError("eval_vector_form: wrong number of vectors");
    Vec c(r.coeff->arity_out());
    r.coeff->eval(std::span<const double>(x), std::span<double>(c));
    Vec out(r.value_dim, 0.0);
    if (r.degree == 0) {
        for (int i = 0; i < r.value_dim; ++i) out[i] = c[i];
        return out;
    }
    const Mat cols = columns_from(vectors, r.chart.dim);
    const auto idx = increasing_indices(r.chart.dim, r.degree);
    for (size_t jr = 0; jr < idx.size(); ++jr) {
        const double d = minor_det(cols, idx[jr]);
        for (int i = 0; i < r.value_dim; ++i) out[i] += c[jr * r.value_dim + i] * d;
    }
    return out;
}

// ----- derivations -----

SForm insert(const VForm& k, const SForm& w) { return insert_with_terms(k, w, false); }

SForm insert_full_sum(const VForm& k, const SForm& w) { return insert_with_terms(k, w, true); }

SForm exterior_d(const SForm& w)
{
    return {w.chart, w.degree + 1,
            std::make_shared<ExtDCoeff>(w.coeff, w.chart.dim, w.degree)};
}

SForm lie_derivative(const VForm& k, const SForm& w)
{
    require_same_chart(k.chart, w.chart, "lie_derivative");
    const double sign = (k.degree % 2 == 0) ? 1.0 : -1.0;  // -(-1)^{k-1}
    if (w.degree == 0) {
        // i_K w vanishes on functions, leaving L_K w = -(-1)^{k-1} i_K dw
        return sform_scale(sign, insert(k, exterior_d(w)));
    }
    return sform_axpy(1.0, exterior_d(insert(k, w)), sign, insert(k, exterior_d(w)));
}

VForm fn_bracket(const VForm& k, const VForm& l)
{
    require_same_chart(k.chart, l.chart, "fn_bracket");
    const int n = k.chart.dim;
    const int m = k.degree + l.degree;
    if (m > n) return vform_zero(k.chart, m);
    const double comm_sign = (k.degree * l.degree) % 2 == 0 ? -1.0 : 1.0;
    const double extract_sign = (m % 2 == 0) ? 1.0 : -1.0;  // L_M x^i = (-1)^m i_M dx^i

    std::vector<SmoothFnPtr> per_coordinate;
    per_coordinate.reserve(n);
    for (int i = 0; i < n; ++i) {
        SForm g = sform_axpy(1.0, lie_derivative(k, lie_derivative_of_coordinate(l, i)),
                             comm_sign, lie_derivative(l, lie_derivative_of_coordinate(k, i)));
        per_coordinate.push_back(g.coeff);
    }
    auto stacked = fn_stack(std::move(per_coordinate));  // [i][J] order
    const long nc = form_component_count(n, m);
    std::vector<int> perm(static_cast<size_t>(nc) * n);
    std::vector<double> scale(perm.size(), extract_sign);
    for (long j = 0; j < nc; ++j)
        for (int i = 0; i < n; ++i) perm[j * n + i] = static_cast<int>(i * nc + j);
    return {k.chart, m,
            std::make_shared<PermuteScaleCoeff>(std::move(stacked), std::move(perm),
                                                std::move(scale))};
}

VForm nijenhuis_tensor(const VForm& k)
{
    if (k.degree != 1) throw DimensionError("nijenhuis_tensor: degree must be 1");
    return {k.chart, 2,
            std::make_shared<EndoBracketCoeff>(k.coeff, k.chart.dim,
                                               EndoBracketCoeff::Mode::Nijenhuis, 0.0)};
}

VForm projection_curvature(const VForm& k, double projection_tol)
{
    if (k.degree != 1) throw DimensionError("projection_curvature: degree must be 1");
    return {k.chart, 2,
            std::make_shared<EndoBracketCoeff>(k.coeff, k.chart.dim,
                                               EndoBracketCoeff::Mode::Curvature, projection_tol)};
}

VForm projection_cocurvature(const VForm& k, double projection_tol)
{
    return projection_curvature(vform_axpy(-1.0, k, 1.0, vform_identity(k.chart)), projection_tol);
}

SForm pullback_sform(const SmoothMap& f, const SForm& w)
{
    require_same_chart(f.target, w.chart, "pullback_sform");
    if (w.degree == 0) return {f.source, 0, fn_compose(w.coeff, f.fn)};
    if (w.degree > f.source.dim) return sform_zero(f.source, w.degree);
    return {f.source, w.degree, std::make_shared<PullbackCoeff>(f.fn, w.coeff, w.degree)};
}

DerivationReport check_f_related(const SmoothMap& f, const VForm& k1, const VForm& k2, Rng& rng,
                                 const RelatednessOptions& opts)
{
    require_same_chart(f.source, k1.chart, "check_f_related (source)");
    require_same_chart(f.target, k2.chart, "check_f_related (target)");
    if (k1.degree != k2.degree) throw DimensionError("check_f_related: degree mismatch");
    const int n = f.source.dim;
    const int deg = k1.degree;
    DerivationReport rep;
    for (int s = 0; s < opts.samples; ++s) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = rng.uniform(f.source.box_lo[i], f.source.box_hi[i]);
        for (int vs = 0; vs < opts.vector_sets_per_point; ++vs) {
            std::vector<Vec> xs(deg);
            std::vector<Vec> pushed(deg);
            Vec y;
            for (int t = 0; t < deg; ++t) {
                xs[t].resize(n);
                for (int i = 0; i < n; ++i) xs[t][i] = rng.uniform(-1.0, 1.0);
                auto pv = f.pushforward({x, xs[t]});
                pushed[t] = pv.vec;
                y = pv.base;
            }
            if (deg == 0) y = f.apply(x);
            const Vec lhs = eval_vform(k2, y, pushed);
            const Vec rhs = f.pushforward({x, eval_vform(k1, x, xs)}).vec;
            rep.merge(max_abs_diff(lhs, rhs), x, xs, "f-relatedness");
        }
    }
    return rep;
}

}  // namespace fnbrack
