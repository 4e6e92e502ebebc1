#include "fnbrack/groupoid.hpp"

#include <algorithm>
#include <cmath>

#include "fnbrack/detail/slinalg.hpp"
#include "fnbrack/sampling.hpp"

namespace fnbrack {

using detail::SMat;

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

Mat neg_identity(int n)
{
    Mat m = Mat::identity(n);
    for (int i = 0; i < n; ++i) m(i, i) = -1.0;
    return m;
}

// d/dx m(x, a) (left = true) or d/dy m(a, y) at the given point,
// generic over the jet scalar.
template <class S>
SMat<S> mult_partial_jac(const Groupoid& g, bool left, std::span<const S> at,
                         std::span<const S> other)
{
    const int n = g.chart_G.dim;
    const auto& l2 = g.level(2);
    SMat<S> out(n, n);
    std::vector<Dual<S>> concat(2 * n), comp(l2.chart.dim), y(n);
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) {
            const S& xi = left ? at[i] : other[i];
            const S& yi = left ? other[i] : at[i];
            concat[i] = Dual<S>(xi, from_real<S>(left && i == c ? 1.0 : 0.0));
            concat[n + i] = Dual<S>(yi, from_real<S>(!left && i == c ? 1.0 : 0.0));
        }
        for (int t = 0; t < l2.chart.dim; ++t) comp[t] = concat[l2.join[t]];
        g.mult.fn->eval(std::span<const Dual<S>>(comp), std::span<Dual<S>>(y));
        for (int r = 0; r < n; ++r) out(r, c) = y[r].d;
    }
    return out;
}

Mat to_mat(const SMat<double>& m)
{
    Mat out(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) out(i, j) = m(i, j);
    return out;
}

// Jacobian at the unit of x -> g x g^{-1}.
Mat conjugation_jac(const Groupoid& g, const Vec& at)
{
    const int n = g.chart_G.dim;
    const Vec ginv = g.inv.apply(at);
    const auto& l2 = g.level(2);
    Mat out(n, n);
    std::vector<Jet1> concat(2 * n), comp(l2.chart.dim), u(n);
    const Vec e = g.unit.apply(Vec{});
    for (int c = 0; c < n; ++c) {
        // u = m(g, x) with x seeded at the unit
        for (int i = 0; i < n; ++i) {
            concat[i] = Jet1(at[i], 0.0);
            concat[n + i] = Jet1(e[i], i == c ? 1.0 : 0.0);
        }
        for (int t = 0; t < l2.chart.dim; ++t) comp[t] = concat[l2.join[t]];
        g.mult.fn->eval(std::span<const Jet1>(comp), std::span<Jet1>(u));
        // v = m(u, g^{-1})
        for (int i = 0; i < n; ++i) {
            concat[i] = u[i];
            concat[n + i] = Jet1(ginv[i], 0.0);
        }
        for (int t = 0; t < l2.chart.dim; ++t) comp[t] = concat[l2.join[t]];
        std::vector<Jet1> v(n);
        g.mult.fn->eval(std::span<const Jet1>(comp), std::span<Jet1>(v));
        for (int r = 0; r < n; ++r) out(r, c) = v[r].d;
    }
    return out;
}

NerveLevelSpec lift_level_whitney(const NerveLevelSpec& l, int dim_g, int k)
{
    NerveLevelSpec out;
    out.chart = whitney_chart(l.chart, k);
    const int dp = l.chart.dim;
    for (const auto& slot : l.slots) {
        std::vector<int> ns;
        ns.reserve(slot.size() * (k + 1));
        for (int b = 0; b <= k; ++b)
            for (int s : slot) ns.push_back(b * dp + s);
        out.slots.push_back(std::move(ns));
    }
    const int blocks = 1 + k;
    out.join.resize(static_cast<size_t>(dp) * blocks);
    for (int b = 0; b <= k; ++b)
        for (int t = 0; t < dp; ++t) {
            const int arrow = l.join[t] / dim_g;
            const int r = l.join[t] % dim_g;
            out.join[static_cast<size_t>(b) * dp + t] = arrow * blocks * dim_g + b * dim_g + r;
        }
    return out;
}

// K evaluated on pushforwards of sampled tangent vectors.
Vec eval_pushed(const VForm& k, const SmoothMap& f, const Vec& at,
                const std::vector<Vec>& vectors)
{
    std::vector<Vec> pushed(vectors.size());
    Vec base;
    for (size_t i = 0; i < vectors.size(); ++i) {
        auto pv = f.pushforward({at, vectors[i]});
        pushed[i] = pv.vec;
        base = pv.base;
    }
    if (vectors.empty()) base = f.apply(at);
    return eval_vform(k, base, pushed);
}

class RightInvariantEndoCoeff final : public SmoothFnCRTPDepthRaising<RightInvariantEndoCoeff> {
public:
    RightInvariantEndoCoeff(const Groupoid& g, Mat c)
        : g_(g), c_(std::move(c)), n_(g.chart_G.dim), unit_(g.unit.apply(Vec{})) {}
    int arity_in() const override { return n_; }
    int arity_out() const override { return n_ * n_; }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        const int n = n_;
        std::vector<S> ginv(n), e(n);
        g_.inv.fn->eval(in, std::span<S>(ginv));
        for (int i = 0; i < n; ++i) e[i] = from_real<S>(unit_[i]);
        // triv = d/dx m(x, g^{-1}) at g; untriv = d/dx m(x, g) at e
        SMat<S> triv = mult_partial_jac<S>(g_, true, in, std::span<const S>(ginv));
        SMat<S> untriv = mult_partial_jac<S>(g_, true, std::span<const S>(e), in);
        for (int j = 0; j < n; ++j) {
            // column j: untriv * C * triv * e_j
            std::vector<S> v(n, from_real<S>(0.0)), w(n, from_real<S>(0.0));
            for (int i = 0; i < n; ++i) v[i] = triv(i, j);
            for (int i = 0; i < n; ++i) {
                S acc = from_real<S>(0.0);
                for (int t = 0; t < n; ++t) acc = acc + c_(i, t) * v[t];
                w[i] = acc;
            }
            for (int i = 0; i < n; ++i) {
                S acc = from_real<S>(0.0);
                for (int t = 0; t < n; ++t) acc = acc + untriv(i, t) * w[t];
                out[static_cast<size_t>(j) * n + i] = acc;
            }
        }
    }

private:
    Groupoid g_;
    Mat c_;
    int n_;
    Vec unit_;
};

}  // namespace

const NerveLevelSpec& Groupoid::level(int p) const
{
    if (!has_level(p))
        throw DimensionError("groupoid '" + name + "' has no chart for composable strings of length " +
                             std::to_string(p));
    return string_levels[p - 2];
}

bool Groupoid::has_level(int p) const
{
    return p >= 2 && p - 2 < static_cast<int>(string_levels.size());
}

SmoothMap Groupoid::slot_map(int p, int j) const
{
    const auto& l = level(p);
    return {l.chart, chart_G, fn_select(l.slots[j], l.chart.dim)};
}

Vec Groupoid::pair_to_comp(const Vec& a, const Vec& b) const
{
    const auto& l = level(2);
    Vec concat = a;
    concat.insert(concat.end(), b.begin(), b.end());
    Vec out(l.chart.dim);
    for (int t = 0; t < l.chart.dim; ++t) out[t] = concat[l.join[t]];
    return out;
}

Vec Groupoid::triple_to_level3(const Vec& a, const Vec& b, const Vec& c) const
{
    const auto& l = level(3);
    Vec concat = a;
    concat.insert(concat.end(), b.begin(), b.end());
    concat.insert(concat.end(), c.begin(), c.end());
    Vec out(l.chart.dim);
    for (int t = 0; t < l.chart.dim; ++t) out[t] = concat[l.join[t]];
    return out;
}

Groupoid make_pair_groupoid(const Chart& base)
{
    const int n = base.dim;
    Groupoid g;
    g.name = "pair(" + base.name + ")";
    g.chart_M = base;
    g.chart_G = product_chart(base, base, g.name);

    g.src = {g.chart_G, base, fn_select(iota_range(n, n), 2 * n)};
    g.tgt = {g.chart_G, base, fn_select(iota_range(0, n), 2 * n)};
    g.unit = {base, g.chart_G, fn_stack({fn_identity(n), fn_identity(n)})};
    g.inv = {g.chart_G, g.chart_G, fn_select(cat(iota_range(n, n), iota_range(0, n)), 2 * n)};

    NerveLevelSpec l2;
    l2.chart = product_chart(g.chart_G, base, g.name + "(2)");
    l2.slots = {iota_range(0, 2 * n), iota_range(n, 2 * n)};
    l2.join = cat(iota_range(0, 2 * n), iota_range(3 * n, n));
    g.mult = {l2.chart, g.chart_G,
              fn_select(cat(iota_range(0, n), iota_range(2 * n, n)), 3 * n)};

    NerveLevelSpec l3;
    l3.chart = product_chart(l2.chart, base, g.name + "(3)");
    l3.slots = {iota_range(0, 2 * n), iota_range(n, 2 * n), iota_range(2 * n, 2 * n)};
    l3.join = cat(cat(iota_range(0, 2 * n), iota_range(3 * n, n)), iota_range(5 * n, n));

    g.string_levels = {l2, l3};
    return g;
}

Groupoid make_group_groupoid(const SmoothMap& mult, Vec unit_point, const SmoothMap& inv)
{
    const int n = mult.target.dim;
    if (mult.source.dim != 2 * n) throw DimensionError("make_group_groupoid: mult must act on G x G");
    if (inv.source.dim != n || inv.target.dim != n)
        throw DimensionError("make_group_groupoid: inv must map G to G");
    if (static_cast<int>(unit_point.size()) != n)
        throw DimensionError("make_group_groupoid: unit point has wrong dim");

    Groupoid g;
    g.chart_G = mult.target;
    g.name = "group(" + g.chart_G.name + ")";
    g.chart_M = Chart::cube(0, "pt");
    g.src = {g.chart_G, g.chart_M, fn_constant({}, n)};
    g.tgt = g.src;
    g.unit = {g.chart_M, g.chart_G, fn_constant(std::move(unit_point), 0)};
    g.inv = inv;

    NerveLevelSpec l2;
    l2.chart = mult.source;
    l2.slots = {iota_range(0, n), iota_range(n, n)};
    l2.join = iota_range(0, 2 * n);
    g.mult = mult;

    NerveLevelSpec l3;
    l3.chart = product_chart(mult.source, g.chart_G, g.name + "(3)");
    l3.slots = {iota_range(0, n), iota_range(n, n), iota_range(2 * n, n)};
    l3.join = iota_range(0, 3 * n);

    g.string_levels = {l2, l3};
    return g;
}

Groupoid make_vb_groupoid(const Chart& base, int fiber_dim)
{
    const int n = base.dim, f = fiber_dim;
    Groupoid g;
    g.name = "vb(" + base.name + "," + std::to_string(f) + ")";
    g.chart_M = base;
    g.chart_G = product_chart(base, Chart::cube(f, "fiber"), g.name);

    g.src = {g.chart_G, base, fn_select(iota_range(0, n), n + f)};
    g.tgt = g.src;
    g.unit = {base, g.chart_G, fn_stack({fn_identity(n), fn_constant(Vec(f, 0.0), n)})};
    g.inv = {g.chart_G, g.chart_G,
             fn_stack({fn_select(iota_range(0, n), n + f),
                       fn_compose(fn_linear(neg_identity(f), Vec(f, 0.0)),
                                  fn_select(iota_range(n, f), n + f))})};

    NerveLevelSpec l2;
    l2.chart = product_chart(g.chart_G, Chart::cube(f, "fiber"), g.name + "(2)");
    l2.slots = {cat(iota_range(0, n), iota_range(n, f)), cat(iota_range(0, n), iota_range(n + f, f))};
    l2.join = cat(iota_range(0, n + f), iota_range(2 * n + f, f));
    {
        // (x, e1, e2) -> (x, e1 + e2)
        Mat m(n + f, n + 2 * f);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        for (int i = 0; i < f; ++i) {
            m(n + i, n + i) = 1.0;
            m(n + i, n + f + i) = 1.0;
        }
        g.mult = {l2.chart, g.chart_G, fn_linear(std::move(m), Vec(n + f, 0.0))};
    }

    NerveLevelSpec l3;
    l3.chart = product_chart(l2.chart, Chart::cube(f, "fiber"), g.name + "(3)");
    l3.slots = {cat(iota_range(0, n), iota_range(n, f)),
                cat(iota_range(0, n), iota_range(n + f, f)),
                cat(iota_range(0, n), iota_range(n + 2 * f, f))};
    l3.join = cat(cat(iota_range(0, n + f), iota_range(2 * n + f, f)),
                  iota_range(2 * (n + f) + n, f));

    g.string_levels = {l2, l3};
    return g;
}

Groupoid make_semidirect(const Groupoid& base, const SmoothMap& action, int fiber_dim,
                         Rng& rng, int validation_samples, double tol)
{
    const int ng = base.chart_G.dim, f = fiber_dim;
    if (action.source.dim != ng + f || action.target.dim != f)
        throw DimensionError("make_semidirect: action must map (G, fiber) to fiber");

    auto act = [&](const Vec& arrow, const Vec& e) {
        Vec in = arrow;
        in.insert(in.end(), e.begin(), e.end());
        return action.apply(in);
    };

    // representation axioms at samples
    for (int s = 0; s < validation_samples; ++s) {
        const Vec w = sample_point(base.level(2).chart, rng);
        const Vec g1 = base.slot_map(2, 0).apply(w);
        const Vec g2 = base.slot_map(2, 1).apply(w);
        const Vec gh = base.mult.apply(w);
        const Vec e = sample_vector(f, rng);
        const Vec e2 = sample_vector(f, rng);
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);

        Vec lin_in(f);
        for (int i = 0; i < f; ++i) lin_in[i] = a * e[i] + b * e2[i];
        Vec lhs = act(g1, lin_in);
        const Vec t1 = act(g1, e), t2 = act(g1, e2);
        for (int i = 0; i < f; ++i) lhs[i] -= a * t1[i] + b * t2[i];
        if (max_abs(lhs) > tol)
            throw Error("make_semidirect: action is not linear on the fiber");

        Vec func = act(g1, act(g2, e));
        const Vec fr = act(gh, e);
        for (int i = 0; i < f; ++i) func[i] -= fr[i];
        if (max_abs(func) > tol)
            throw Error("make_semidirect: action is not functorial");

        const Vec x = sample_point(base.chart_M, rng);
        Vec un = act(base.unit.apply(x), e);
        for (int i = 0; i < f; ++i) un[i] -= e[i];
        if (max_abs(un) > tol)
            throw Error("make_semidirect: units do not act trivially");
    }

    Groupoid g;
    g.name = "semidirect(" + base.name + "," + std::to_string(f) + ")";
    g.chart_M = base.chart_M;
    g.chart_G = product_chart(base.chart_G, Chart::cube(f, "fiber"), g.name);
    const auto sel_g = fn_select(iota_range(0, ng), ng + f);
    const auto sel_e = fn_select(iota_range(ng, f), ng + f);

    g.src = {g.chart_G, g.chart_M, fn_compose(base.src.fn, sel_g)};
    g.tgt = {g.chart_G, g.chart_M, fn_compose(base.tgt.fn, sel_g)};
    g.unit = {g.chart_M, g.chart_G,
              fn_stack({base.unit.fn, fn_constant(Vec(f, 0.0), base.chart_M.dim)})};
    {
        auto ginv = fn_compose(base.inv.fn, sel_g);
        auto e_new = fn_compose(fn_linear(neg_identity(f), Vec(f, 0.0)),
                                fn_compose(action.fn, fn_stack({ginv, sel_e})));
        g.inv = {g.chart_G, g.chart_G, fn_stack({ginv, e_new})};
    }

    // remap of base join indices into the concat of (g, e) arrow blocks
    auto remap = [&](const std::vector<int>& join) {
        std::vector<int> out(join.size());
        for (size_t t = 0; t < join.size(); ++t)
            out[t] = join[t] + (join[t] / ng) * f;
        return out;
    };

    auto build_level = [&](const NerveLevelSpec& bl, int arrows) {
        NerveLevelSpec l;
        l.chart = bl.chart;
        for (int a = 0; a < arrows; ++a)
            l.chart = product_chart(l.chart, Chart::cube(f, "fiber"),
                                    g.name + "(" + std::to_string(arrows) + ")");
        const int bd = bl.chart.dim;
        for (int a = 0; a < arrows; ++a)
            l.slots.push_back(cat(bl.slots[a], iota_range(bd + a * f, f)));
        l.join = remap(bl.join);
        for (int a = 0; a < arrows; ++a)
            l.join = cat(l.join, iota_range(a * (ng + f) + ng, f));
        return l;
    };

    NerveLevelSpec l2 = build_level(base.level(2), 2);
    {
        const int bd = base.level(2).chart.dim;
        auto base_w = fn_select(iota_range(0, bd), bd + 2 * f);
        auto g1 = fn_select(base.level(2).slots[0], bd + 2 * f);
        auto e1 = fn_select(iota_range(bd, f), bd + 2 * f);
        auto e2 = fn_select(iota_range(bd + f, f), bd + 2 * f);
        Mat sum(f, 2 * f);
        for (int i = 0; i < f; ++i) {
            sum(i, i) = 1.0;
            sum(i, f + i) = 1.0;
        }
        auto e_part = fn_compose(fn_linear(std::move(sum), Vec(f, 0.0)),
                                 fn_stack({e1, fn_compose(action.fn, fn_stack({g1, e2}))}));
        g.mult = {l2.chart, g.chart_G,
                  fn_stack({fn_compose(base.mult.fn, base_w), e_part})};
    }

    g.string_levels = {l2};
    if (base.has_level(3)) g.string_levels.push_back(build_level(base.level(3), 3));
    return g;
}

Groupoid whitney_sum(const Groupoid& base, int k)
{
    if (k < 1) throw DimensionError("whitney_sum: k must be >= 1");
    Groupoid g;
    g.name = (k == 1 ? "T" : "W" + std::to_string(k)) + base.name;
    g.chart_G = whitney_chart(base.chart_G, k);
    g.chart_M = whitney_chart(base.chart_M, k);
    g.src = whitney_map(base.src, k);
    g.tgt = whitney_map(base.tgt, k);
    g.unit = whitney_map(base.unit, k);
    g.inv = whitney_map(base.inv, k);
    g.mult = whitney_map(base.mult, k);
    for (const auto& l : base.string_levels)
        g.string_levels.push_back(lift_level_whitney(l, base.chart_G.dim, k));
    // mult's source must be the lifted level-2 chart
    g.mult.source = g.string_levels[0].chart;
    return g;
}

Groupoid tangent_groupoid(const Groupoid& base) { return whitney_sum(base, 1); }

Groupoid make_abelian_group_groupoid(int n)
{
    const Chart gch = Chart::cube(n, "R" + std::to_string(n));
    const Chart g2 = product_chart(gch, gch, "R^2n");
    std::string mtext, itext;
    for (int i = 0; i < n; ++i) {
        if (i) { mtext += "; "; itext += "; "; }
        mtext += "x" + std::to_string(i + 1) + " + x" + std::to_string(n + i + 1);
        itext += "-x" + std::to_string(i + 1);
    }
    return make_group_groupoid(map_from_exprs(g2, gch, mtext), Vec(n, 0.0),
                               map_from_exprs(gch, gch, itext));
}

Groupoid make_aff1_groupoid()
{
    Chart gch = Chart::box(2, "Aff1", {0.5, -1.0}, {2.0, 1.0});
    gch.domain = std::make_shared<expr::ExprFn>(expr::parse("x1", 2));
    const Chart g2 = product_chart(gch, gch, "Aff1^2");
    auto mult = map_from_exprs(g2, gch, "x1*x3; x1*x4 + x2");
    auto inv = map_from_exprs(gch, gch, "1/x1; -x2/x1");
    return make_group_groupoid(mult, {1.0, 0.0}, inv);
}

GroupoidCheckReport check_groupoid_axioms(const Groupoid& g, Rng& rng, int samples)
{
    GroupoidCheckReport rep;
    auto note = [&](double r, const char* law) {
        ++rep.samples;
        if (r > rep.max_residual) {
            rep.max_residual = r;
            rep.worst_law = law;
        }
    };

    for (int s = 0; s < samples; ++s) {
        const Vec x = sample_point(g.chart_M, rng);
        const Vec ex = g.unit.apply(x);
        note(max_abs_diff(g.src.apply(ex), x), "s(unit(x)) = x");
        note(max_abs_diff(g.tgt.apply(ex), x), "t(unit(x)) = x");

        const Vec gg = sample_point(g.chart_G, rng);
        note(max_abs_diff(g.mult.apply(g.pair_to_comp(g.unit.apply(g.tgt.apply(gg)), gg)), gg),
             "left unit law");
        note(max_abs_diff(g.mult.apply(g.pair_to_comp(gg, g.unit.apply(g.src.apply(gg)))), gg),
             "right unit law");
        note(max_abs_diff(g.mult.apply(g.pair_to_comp(gg, g.inv.apply(gg))),
                          g.unit.apply(g.tgt.apply(gg))),
             "g . inv(g) = unit(t(g))");

        const Vec w = sample_point(g.level(2).chart, rng);
        const Vec a = g.slot_map(2, 0).apply(w);
        const Vec b = g.slot_map(2, 1).apply(w);
        note(max_abs_diff(g.src.apply(a), g.tgt.apply(b)), "s(pr1) = t(pr2)");
        const Vec ab = g.mult.apply(w);
        note(max_abs_diff(g.src.apply(ab), g.src.apply(b)), "s(gh) = s(h)");
        note(max_abs_diff(g.tgt.apply(ab), g.tgt.apply(a)), "t(gh) = t(g)");

        if (g.has_level(3)) {
            const Vec u = sample_point(g.level(3).chart, rng);
            const Vec g1 = g.slot_map(3, 0).apply(u);
            const Vec g2 = g.slot_map(3, 1).apply(u);
            const Vec g3 = g.slot_map(3, 2).apply(u);
            const Vec left = g.mult.apply(g.pair_to_comp(g.mult.apply(g.pair_to_comp(g1, g2)), g3));
            const Vec right = g.mult.apply(g.pair_to_comp(g1, g.mult.apply(g.pair_to_comp(g2, g3))));
            note(max_abs_diff(left, right), "associativity");
        }
    }
    return rep;
}

Vec lift_pair_tangent(const Groupoid& g, const Vec& w, const Vec& a, const Vec& b)
{
    const auto& l2 = g.level(2);
    const int n = g.chart_G.dim, d = l2.chart.dim;
    const Mat j1 = g.slot_map(2, 0).jacobian(w);
    const Mat j2 = g.slot_map(2, 1).jacobian(w);
    SMat<double> m(2 * n, d);
    std::vector<double> rhs(2 * n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < d; ++c) {
            m(r, c) = j1(r, c);
            m(n + r, c) = j2(r, c);
        }
        rhs[r] = a[r];
        rhs[n + r] = b[r];
    }
    auto x = detail::solve_least_squares(m, rhs);
    return Vec(x.begin(), x.end());
}

MultReport check_multiplicative(const Groupoid& g, const VForm& k, const VForm& k_m, Rng& rng,
                                const MultOptions& opts)
{
    if (k.chart.dim != g.chart_G.dim || k_m.chart.dim != g.chart_M.dim)
        throw DimensionError("check_multiplicative: form charts do not match the groupoid");
    if (k.degree != k_m.degree)
        throw DimensionError("check_multiplicative: degrees of K and K_M differ");
    const int deg = k.degree;
    const int ng = g.chart_G.dim;
    const auto& l2 = g.level(2);
    auto pr1 = g.slot_map(2, 0);
    auto pr2 = g.slot_map(2, 1);

    MultReport rep;
    rep.tolerance = opts.tolerance;
    for (int s = 0; s < opts.samples; ++s) {
        // s- and t-relatedness at points of G
        const Vec gg = sample_point(g.chart_G, rng);
        for (int vs = 0; vs < opts.vector_sets_per_point; ++vs) {
            const auto xs = sample_vectors(ng, deg, rng);
            const Vec kx = eval_vform(k, gg, xs);
            rep.s_residual = std::max(
                rep.s_residual,
                max_abs_diff(eval_pushed(k_m, g.src, gg, xs), g.src.pushforward({gg, kx}).vec));
            rep.t_residual = std::max(
                rep.t_residual,
                max_abs_diff(eval_pushed(k_m, g.tgt, gg, xs), g.tgt.pushforward({gg, kx}).vec));
        }

        // m-relatedness on composable tangent tuples
        const Vec w = sample_point(l2.chart, rng);
        const Vec ga = pr1.apply(w);
        const Vec gb = pr2.apply(w);
        for (int vs = 0; vs < opts.vector_sets_per_point; ++vs) {
            const auto zs = sample_vectors(l2.chart.dim, deg, rng);
            std::vector<Vec> xs(deg), ys(deg);
            for (int t = 0; t < deg; ++t) {
                xs[t] = pr1.pushforward({w, zs[t]}).vec;
                ys[t] = pr2.pushforward({w, zs[t]}).vec;
            }
            const Vec lhs = eval_pushed(k, g.mult, w, zs);
            const Vec ka = eval_vform(k, ga, xs);
            const Vec kb = eval_vform(k, gb, ys);
            const Vec lifted = lift_pair_tangent(g, w, ka, kb);
            const Vec rhs = g.mult.pushforward({w, lifted}).vec;
            rep.m_residual = std::max(rep.m_residual, max_abs_diff(lhs, rhs));
        }
        ++rep.samples;
    }
    rep.pass = rep.max_residual() < rep.tolerance;
    return rep;
}

MultReport lie_group_mult_check(const Groupoid& g, const VForm& k, Rng& rng,
                                const MultOptions& opts)
{
    if (g.chart_M.dim != 0) throw Error("lie_group_mult_check: groupoid is not a Lie group");
    const int n = g.chart_G.dim;
    const int deg = k.degree;
    const auto& l2 = g.level(2);
    const Vec e = g.unit.apply(Vec{});

    auto jac_left = [&](const Vec& at, const Vec& other) {
        return to_mat(mult_partial_jac<double>(g, true, std::span<const double>(at),
                                               std::span<const double>(other)));
    };

    MultReport rep;
    rep.tolerance = opts.tolerance;
    for (int s = 0; s < opts.samples; ++s) {
        const Vec w = sample_point(l2.chart, rng);
        const Vec ga = g.slot_map(2, 0).apply(w);
        const Vec gb = g.slot_map(2, 1).apply(w);
        const Vec gh = g.mult.apply(w);

        const Mat triv_a = jac_left(ga, g.inv.apply(ga));
        const Mat triv_b = jac_left(gb, g.inv.apply(gb));
        const Mat untriv_ab = jac_left(e, gh);
        const Mat ad = conjugation_jac(g, ga);

        for (int vs = 0; vs < opts.vector_sets_per_point; ++vs) {
            const auto zs = sample_vectors(l2.chart.dim, deg, rng);
            std::vector<Vec> xs(deg), ys(deg);
            for (int t = 0; t < deg; ++t) {
                xs[t] = g.slot_map(2, 0).pushforward({w, zs[t]}).vec;
                ys[t] = g.slot_map(2, 1).pushforward({w, zs[t]}).vec;
            }
            const Vec lhs = eval_pushed(k, g.mult, w, zs);
            const Vec u = matvec(triv_a, eval_vform(k, ga, xs));
            const Vec v = matvec(ad, matvec(triv_b, eval_vform(k, gb, ys)));
            Vec sum(n);
            for (int i = 0; i < n; ++i) sum[i] = u[i] + v[i];
            const Vec rhs = matvec(untriv_ab, sum);
            rep.m_residual = std::max(rep.m_residual, max_abs_diff(lhs, rhs));
        }
        ++rep.samples;
    }
    rep.pass = rep.max_residual() < rep.tolerance;
    return rep;
}

VForm right_invariant_endo(const Groupoid& group, const Mat& c)
{
    if (group.chart_M.dim != 0) throw Error("right_invariant_endo: groupoid is not a Lie group");
    if (c.rows != group.chart_G.dim || c.cols != group.chart_G.dim)
        throw DimensionError("right_invariant_endo: matrix shape");
    return {group.chart_G, 1, std::make_shared<RightInvariantEndoCoeff>(group, c)};
}

}  // namespace fnbrack
