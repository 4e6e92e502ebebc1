#include "fnbrack/bundle.hpp"

#include <cmath>

#include "fnbrack/detail/multiindex.hpp"
#include "fnbrack/sampling.hpp"

namespace fnbrack {

namespace {

std::vector<int> iota_range(int start, int count)
{
    std::vector<int> v(count);
    for (int i = 0; i < count; ++i) v[i] = start + i;
    return v;
}

std::vector<int> cat(std::vector<int> a, const std::vector<int>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// Projector coefficients shared by Theta on the total space (one base
// leg) and K on the gauge chart (two base legs with opposite signs).
// Layout of the produced endomorphism is column-major like every VForm.
class ConnectionProjCoeff final : public SmoothFnCRTP<ConnectionProjCoeff> {
public:
    // legs: list of (base-slot offset, sign); k-block starts after all legs.
    ConnectionProjCoeff(std::vector<SmoothFnPtr> a, int base_dim, int group_dim,
                        std::vector<std::pair<int, double>> legs)
        : a_(std::move(a)), n_(base_dim), m_(group_dim), legs_(std::move(legs))
    {
        dim_ = static_cast<int>(legs_.size()) * n_ + m_;
    }
    int arity_in() const override { return dim_; }
    int arity_out() const override { return dim_ * dim_; }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        for (int t = 0; t < dim_ * dim_; ++t) out[t] = from_real<S>(0.0);
        const int krow0 = static_cast<int>(legs_.size()) * n_;
        std::vector<S> av(n_);
        for (int alpha = 0; alpha < m_; ++alpha) {
            for (size_t leg = 0; leg < legs_.size(); ++leg) {
                const auto& [off, sign] = legs_[leg];
                a_[alpha]->eval(in.subspan(off, n_), std::span<S>(av));
                for (int j = 0; j < n_; ++j)
                    out[(off + j) * dim_ + krow0 + alpha] = sign * av[j];
            }
            out[(krow0 + alpha) * dim_ + krow0 + alpha] = from_real<S>(1.0);
        }
    }

private:
    std::vector<SmoothFnPtr> a_;
    int n_;
    int m_;
    std::vector<std::pair<int, double>> legs_;
    int dim_ = 0;
};

// F(e_i, e_j)(x) = -theta([H_i, H_j]) evaluated at (x, 0) on the total
// chart, where H_i are the horizontal lifts of the coordinate fields
// and the bracket is the generic degree-0 Frölicher-Nijenhuis bracket.
class CurvatureFCoeff final : public SmoothFnCRTPDepthRaising<CurvatureFCoeff> {
public:
    CurvatureFCoeff(const TrivialBundle& b, const Connection& c)
        : n_(b.base.dim), m_(b.group_dim),
          pairs_(detail::increasing_indices(n_, 2)), theta_(c.theta.coeff)
    {
        VForm horiz = vform_axpy(-1.0, c.theta, 1.0, vform_identity(b.total));
        std::vector<VForm> h;
        for (int i = 0; i < n_; ++i) {
            // column i of Id - Theta as a vector field on P
            std::vector<int> sel(n_ + m_);
            for (int r = 0; r < n_ + m_; ++r) sel[r] = i * (n_ + m_) + r;
            h.push_back({b.total, 0, fn_compose(fn_select(sel, (n_ + m_) * (n_ + m_)), horiz.coeff)});
        }
        for (const auto& pr : pairs_)
            brackets_.push_back(fn_bracket(h[pr[0]], h[pr[1]]).coeff);
    }
    int arity_in() const override { return n_; }
    int arity_out() const override { return static_cast<int>(pairs_.size()) * m_; }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        const int d = n_ + m_;
        std::vector<S> p(d), v(d), th(d * d);
        for (int i = 0; i < n_; ++i) p[i] = in[i];
        for (int i = n_; i < d; ++i) p[i] = from_real<S>(0.0);
        theta_->eval(std::span<const S>(p), std::span<S>(th));
        for (size_t pr = 0; pr < pairs_.size(); ++pr) {
            brackets_[pr]->eval(std::span<const S>(p), std::span<S>(v));
            // theta(v), keep the Lie-algebra components, flip the sign
            for (int alpha = 0; alpha < m_; ++alpha) {
                S acc = from_real<S>(0.0);
                for (int j = 0; j < d; ++j) acc = acc + th[j * d + (n_ + alpha)] * v[j];
                out[pr * m_ + alpha] = -acc;
            }
        }
    }

private:
    int n_;
    int m_;
    std::vector<std::vector<int>> pairs_;
    SmoothFnPtr theta_;
    std::vector<SmoothFnPtr> brackets_;
};

Vec eval_rk_phi(const VForm& rk, const VerticalIso& iso, const Vec& at,
                const Vec& z1, const Vec& z2)
{
    return iso.apply(eval_vform(rk, at, {z1, z2}), 1e-6);
}

}  // namespace

TrivialBundle make_trivial_bundle(Chart base, int group_dim)
{
    TrivialBundle b;
    b.total = product_chart(base, Chart::cube(group_dim, "g"), base.name + "xg");
    b.base = std::move(base);
    b.group_dim = group_dim;
    {
        const int n = b.base.dim, m = group_dim;
        Mat mm(n + m, n + 2 * m);
        for (int i = 0; i < n; ++i) mm(i, i) = 1.0;
        for (int i = 0; i < m; ++i) {
            mm(n + i, n + i) = 1.0;
            mm(n + i, n + m + i) = 1.0;
        }
        const Chart dom = product_chart(b.total, Chart::cube(m, "h"), b.total.name + "xg");
        b.action = {dom, b.total, fn_linear(std::move(mm), Vec(n + m, 0.0))};
    }
    return b;
}

Connection make_connection(const TrivialBundle& b, std::vector<SForm> a)
{
    if (static_cast<int>(a.size()) != b.group_dim)
        throw DimensionError("make_connection: need one 1-form per Lie-algebra component");
    std::vector<SmoothFnPtr> coeffs;
    for (const auto& w : a) {
        if (w.degree != 1 || w.chart.dim != b.base.dim)
            throw DimensionError("make_connection: components must be 1-forms on the base");
        coeffs.push_back(w.coeff);
    }
    Connection c;
    c.a = std::move(a);
    c.theta = {b.total, 1,
               std::make_shared<ConnectionProjCoeff>(std::move(coeffs), b.base.dim, b.group_dim,
                                                     std::vector<std::pair<int, double>>{{0, 1.0}})};
    return c;
}

Connection connection_from_exprs(const TrivialBundle& b, std::string_view components)
{
    auto fn = expr::parse(components, b.base.dim);
    if (fn.arity_out != b.group_dim * b.base.dim)
        throw DimensionError("connection_from_exprs: expected group_dim * base_dim components");
    std::vector<SForm> a;
    for (int alpha = 0; alpha < b.group_dim; ++alpha) {
        expr::ExprFn part;
        part.arity_in = b.base.dim;
        part.arity_out = b.base.dim;
        for (int j = 0; j < b.base.dim; ++j)
            part.components.push_back(fn.components[alpha * b.base.dim + j]);
        a.push_back({b.base, 1, fn_from_expr(std::move(part))});
    }
    return make_connection(b, std::move(a));
}

GaugeGroupoid make_gauge_groupoid(const TrivialBundle& b)
{
    const int n = b.base.dim, m = b.group_dim;
    GaugeGroupoid gg;
    gg.bundle = b;
    Groupoid& g = gg.gpd;
    g.name = "gauge(" + b.base.name + ",R" + std::to_string(m) + ")";

    const Chart kchart = Chart::cube(m, "k");
    g.chart_M = b.base;
    g.chart_G = product_chart(product_chart(b.base, b.base, "MxM"), kchart, g.name);

    g.tgt = {g.chart_G, b.base, fn_select(iota_range(0, n), 2 * n + m)};
    g.src = {g.chart_G, b.base, fn_select(iota_range(n, n), 2 * n + m)};
    g.unit = {b.base, g.chart_G,
              fn_stack({fn_identity(n), fn_identity(n), fn_constant(Vec(m, 0.0), n)})};
    {
        Mat neg = Mat::identity(m);
        for (int i = 0; i < m; ++i) neg(i, i) = -1.0;
        g.inv = {g.chart_G, g.chart_G,
                 fn_stack({fn_select(iota_range(n, n), 2 * n + m),
                           fn_select(iota_range(0, n), 2 * n + m),
                           fn_compose(fn_linear(std::move(neg), Vec(m, 0.0)),
                                      fn_select(iota_range(2 * n, m), 2 * n + m))})};
    }

    NerveLevelSpec l2;
    // chart coords: (x, y, z, k1, k2)  [x,y,z of dim n; k1,k2 of dim m]
    {
        Chart c = b.base;
        c = product_chart(c, b.base, "xy");
        c = product_chart(c, b.base, "xyz");
        c = product_chart(c, kchart, "xyzk1");
        c = product_chart(c, kchart, g.name + "(2)");
        l2.chart = c;
    }
    l2.slots = {cat(cat(iota_range(0, n), iota_range(n, n)), iota_range(3 * n, m)),
                cat(cat(iota_range(n, n), iota_range(2 * n, n)), iota_range(3 * n + m, m))};
    l2.join = cat(cat(cat(cat(iota_range(0, 2 * n), iota_range(3 * n + m, n)), iota_range(2 * n, m)),
                      iota_range(4 * n + m, m)),
                  std::vector<int>{});
    {
        // (x, y, z, k1, k2) -> (x, z, k1 + k2)
        Mat mm(2 * n + m, 3 * n + 2 * m);
        for (int i = 0; i < n; ++i) {
            mm(i, i) = 1.0;
            mm(n + i, 2 * n + i) = 1.0;
        }
        for (int i = 0; i < m; ++i) {
            mm(2 * n + i, 3 * n + i) = 1.0;
            mm(2 * n + i, 3 * n + m + i) = 1.0;
        }
        g.mult = {l2.chart, g.chart_G, fn_linear(std::move(mm), Vec(2 * n + m, 0.0))};
    }

    NerveLevelSpec l3;
    {
        Chart c = b.base;
        c = product_chart(c, b.base, "xy");
        c = product_chart(c, b.base, "xyz");
        c = product_chart(c, b.base, "xyzw");
        c = product_chart(c, kchart, "k1");
        c = product_chart(c, kchart, "k2");
        c = product_chart(c, kchart, g.name + "(3)");
        l3.chart = c;
    }
    l3.slots = {cat(cat(iota_range(0, n), iota_range(n, n)), iota_range(4 * n, m)),
                cat(cat(iota_range(n, n), iota_range(2 * n, n)), iota_range(4 * n + m, m)),
                cat(cat(iota_range(2 * n, n), iota_range(3 * n, n)), iota_range(4 * n + 2 * m, m))};
    l3.join = cat(cat(cat(cat(cat(iota_range(0, 2 * n), iota_range(3 * n + m, n)),
                              iota_range(5 * n + 2 * m, n)),
                          iota_range(2 * n, m)),
                      iota_range(4 * n + m, m)),
                  iota_range(6 * n + 2 * m, m));

    g.string_levels = {l2, l3};
    return gg;
}

VForm connection_to_projection(const GaugeGroupoid& gg, const Connection& c)
{
    const int n = gg.bundle.base.dim, m = gg.bundle.group_dim;
    std::vector<SmoothFnPtr> coeffs;
    for (const auto& w : c.a) coeffs.push_back(w.coeff);
    // legs: target copy of M with +A, source copy with -A
    return {gg.gpd.chart_G, 1,
            std::make_shared<ConnectionProjCoeff>(
                std::move(coeffs), n, m,
                std::vector<std::pair<int, double>>{{0, 1.0}, {n, -1.0}})};
}

Connection projection_to_connection(const GaugeGroupoid& gg, const VForm& k, Rng& rng,
                                    int samples, double tol)
{
    const int n = gg.bundle.base.dim, m = gg.bundle.group_dim;
    const int d = 2 * n + m;
    if (k.chart.dim != d || k.degree != 1)
        throw DimensionError("projection_to_connection: K must be an endomorphism of the gauge chart");

    // sampled hypotheses: K^2 = K, image inside the vertical distribution
    for (int s = 0; s < samples; ++s) {
        const Vec p = sample_point(gg.gpd.chart_G, rng);
        const Vec kc = vform_coefficients(k, p);
        double proj = 0.0, vert = 0.0;
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i) {
                double acc = 0.0;
                for (int t = 0; t < d; ++t) acc += kc[t * d + i] * kc[j * d + t];
                proj = std::max(proj, std::fabs(acc - kc[j * d + i]));
                if (i < 2 * n) vert = std::max(vert, std::fabs(kc[j * d + i]));
            }
        if (proj > tol)
            throw NotAProjection("projection_to_connection: K^2 != K (residual " +
                                 std::to_string(proj) + ")");
        if (vert > tol)
            throw NotAProjection("projection_to_connection: image of K is not vertical (residual " +
                                 std::to_string(vert) + ")");
    }
    {
        auto mrep = check_multiplicative(gg.gpd, k, vform_zero(gg.bundle.base, 1), rng);
        if (!mrep.pass)
            throw NotMultiplicative("projection_to_connection: K is not multiplicative (residual " +
                                    std::to_string(mrep.max_residual()) + ")");
    }

    // A^alpha_j(x) = K^{k_alpha}_{x_j} along the units (x, x, 0)
    auto embed = fn_stack({fn_identity(n), fn_identity(n), fn_constant(Vec(m, 0.0), n)});
    auto along_units = fn_compose(k.coeff, embed);
    std::vector<SForm> a;
    for (int alpha = 0; alpha < m; ++alpha) {
        std::vector<int> sel(n);
        for (int j = 0; j < n; ++j) sel[j] = j * d + (2 * n + alpha);
        a.push_back({gg.bundle.base, 1, fn_compose(fn_select(sel, d * d), along_units)});
    }
    return make_connection(gg.bundle, std::move(a));
}

VectorForm curvature_2form(const TrivialBundle& b, const Connection& c)
{
    return {b.base, 2, b.group_dim, std::make_shared<CurvatureFCoeff>(b, c)};
}

Vec VerticalIso::apply(const Vec& tangent, double tol) const
{
    if (static_cast<int>(tangent.size()) != 2 * base_dim + group_dim)
        throw DimensionError("VerticalIso::apply: wrong tangent dimension");
    for (int i = 0; i < 2 * base_dim; ++i)
        if (std::fabs(tangent[i]) > tol)
            throw DomainViolation("VerticalIso::apply: tangent is not vertical");
    return Vec(tangent.begin() + 2 * base_dim, tangent.end());
}

Vec VerticalIso::inverse(const Vec& value) const
{
    if (static_cast<int>(value.size()) != group_dim)
        throw DimensionError("VerticalIso::inverse: wrong value dimension");
    Vec t(2 * base_dim + group_dim, 0.0);
    for (int i = 0; i < group_dim; ++i) t[2 * base_dim + i] = value[i];
    return t;
}

VerticalIso vertical_iso(const GaugeGroupoid& gg)
{
    return {gg.bundle.base.dim, gg.bundle.group_dim};
}

DerivationReport check_vertical_iso_morphism(const GaugeGroupoid& gg, Rng& rng, int samples)
{
    const auto iso = vertical_iso(gg);
    const Groupoid& g = gg.gpd;
    const int m = gg.bundle.group_dim;
    DerivationReport rep;
    for (int s = 0; s < samples; ++s) {
        const Vec w = sample_point(g.level(2).chart, rng);
        const Vec u1 = sample_vector(m, rng), u2 = sample_vector(m, rng);
        const Vec x = iso.inverse(u1), y = iso.inverse(u2);
        const Vec lifted = lift_pair_tangent(g, w, x, y);
        const Vec tm = g.mult.pushforward({w, lifted}).vec;
        Vec lhs = iso.apply(tm, 1e-8);
        for (int i = 0; i < m; ++i) lhs[i] -= u1[i] + u2[i];  // trivial adjoint action
        rep.merge(max_abs(lhs), w, {x, y}, "vertical iso morphism");
    }
    return rep;
}

DerivationReport check_curvature_identity(const GaugeGroupoid& gg, const Connection& c, Rng& rng,
                                          int samples)
{
    const Groupoid& g = gg.gpd;
    const int n = gg.bundle.base.dim;
    const int d = 2 * n + gg.bundle.group_dim;
    const auto iso = vertical_iso(gg);
    VForm k = connection_to_projection(gg, c);
    VForm rk = projection_curvature(k);
    VectorForm f = curvature_2form(gg.bundle, c);

    DerivationReport rep;
    for (int s = 0; s < samples; ++s) {
        const Vec at = sample_point(g.chart_G, rng);
        const Vec x(at.begin(), at.begin() + n);
        const Vec y(at.begin() + n, at.begin() + 2 * n);
        const Vec z1 = sample_vector(d, rng), z2 = sample_vector(d, rng);

        // lhs: phi(R_K(Z1, Z2))
        Vec lhs = eval_rk_phi(rk, iso, at, z1, z2);

        // rhs: g.(s*F) - t*F with the trivial adjoint action
        const Vec s1(z1.begin() + n, z1.begin() + 2 * n), s2(z2.begin() + n, z2.begin() + 2 * n);
        const Vec t1(z1.begin(), z1.begin() + n), t2(z2.begin(), z2.begin() + n);
        const Vec fs = eval_vector_form(f, y, {s1, s2});
        const Vec ft = eval_vector_form(f, x, {t1, t2});
        for (size_t i = 0; i < lhs.size(); ++i) lhs[i] -= fs[i] - ft[i];
        rep.merge(max_abs(lhs), at, {z1, z2}, "phi(R_K) = g.s*F - t*F");
    }

    // multiplicativity of phi o R_K as a representation-valued form
    auto pr1 = g.slot_map(2, 0);
    auto pr2 = g.slot_map(2, 1);
    for (int s = 0; s < samples; ++s) {
        const Vec w = sample_point(g.level(2).chart, rng);
        const int dc = g.level(2).chart.dim;
        const Vec z1 = sample_vector(dc, rng), z2 = sample_vector(dc, rng);
        auto push_pair = [&](const SmoothMap& mp) {
            return std::vector<Vec>{mp.pushforward({w, z1}).vec, mp.pushforward({w, z2}).vec};
        };
        const auto zm = push_pair(g.mult);
        const auto za = push_pair(pr1);
        const auto zb = push_pair(pr2);
        Vec lhs = eval_rk_phi(rk, iso, g.mult.apply(w), zm[0], zm[1]);
        const Vec ra = eval_rk_phi(rk, iso, pr1.apply(w), za[0], za[1]);
        const Vec rb = eval_rk_phi(rk, iso, pr2.apply(w), zb[0], zb[1]);
        for (size_t i = 0; i < lhs.size(); ++i) lhs[i] -= ra[i] + rb[i];
        rep.merge(max_abs(lhs), w, {z1, z2}, "m*R' = pr1*R' + g.pr2*R'");
    }
    return rep;
}

DerivationReport check_image_closed_under_mult(const GaugeGroupoid& gg, const VForm& p, Rng& rng,
                                               int samples)
{
    const Groupoid& g = gg.gpd;
    const int dg = g.chart_G.dim;
    auto pr1 = g.slot_map(2, 0);
    auto pr2 = g.slot_map(2, 1);
    DerivationReport rep;
    for (int s = 0; s < samples; ++s) {
        const Vec w = sample_point(g.level(2).chart, rng);
        const int dc = g.level(2).chart.dim;
        // one comp-chart tangent pushed through both projections keeps
        // the pair composable after applying the projector
        const Vec z = sample_vector(dc, rng);
        const Vec a = eval_vform(p, pr1.apply(w), {pr1.pushforward({w, z}).vec});
        const Vec b = eval_vform(p, pr2.apply(w), {pr2.pushforward({w, z}).vec});
        const Vec lifted = lift_pair_tangent(g, w, a, b);
        const Vec v = g.mult.pushforward({w, lifted}).vec;
        // distance from the image of the projector: (Id - P) v
        const Vec pv = eval_vform(p, g.mult.apply(w), {v});
        Vec res(dg);
        for (int i = 0; i < dg; ++i) res[i] = v[i] - pv[i];
        rep.merge(max_abs(res), w, {z}, "image closed under Tm");
    }
    return rep;
}

}  // namespace fnbrack
