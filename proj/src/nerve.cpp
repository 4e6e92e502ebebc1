#include "fnbrack/nerve.hpp"

#include <cmath>

#include "fnbrack/detail/multiindex.hpp"
#include "fnbrack/detail/slinalg.hpp"
#include "fnbrack/sampling.hpp"

namespace fnbrack {

using detail::SMat;

namespace {

// map chart_p -> comp chart for the pair (slot a, slot b)
SmoothFnPtr pair_fn(const Groupoid& g, const NerveLevelSpec& l, int a, int b)
{
    const int n = g.chart_G.dim;
    auto stacked = fn_stack({fn_select(l.slots[a], l.chart.dim), fn_select(l.slots[b], l.chart.dim)});
    return fn_compose(fn_select(g.level(2).join, 2 * n), stacked);
}

class ProductLiftCoeff final : public SmoothFnCRTPDepthRaising<ProductLiftCoeff> {
public:
    ProductLiftCoeff(const Groupoid& g, int p, const VForm& k)
        : n_(g.chart_G.dim), p_(p), deg_(k.degree), kc_(k.coeff)
    {
        const auto& l = g.level(p);
        d_ = l.chart.dim;
        for (int j = 0; j < p; ++j) slot_fns_.push_back(fn_select(l.slots[j], d_));
        idx_ = detail::increasing_indices(d_, deg_);
        kidx_ = detail::increasing_indices(n_, deg_);
    }
    int arity_in() const override { return d_; }
    int arity_out() const override { return static_cast<int>(idx_.size()) * d_; }
    template <class S>
    void run(std::span<const S> in, std::span<S> out) const
    {
        // slot points, slot Jacobians, K coefficients per slot
        std::vector<std::vector<S>> points(p_), kvals(p_);
        std::vector<SMat<S>> jac(p_, SMat<S>(n_, d_));
        {
            std::vector<Dual<S>> x(d_), y(n_);
            for (int j = 0; j < p_; ++j) {
                for (int c = 0; c < d_; ++c) {
                    for (int i = 0; i < d_; ++i)
                        x[i] = Dual<S>(in[i], from_real<S>(i == c ? 1.0 : 0.0));
                    slot_fns_[j]->eval(std::span<const Dual<S>>(x), std::span<Dual<S>>(y));
                    for (int r = 0; r < n_; ++r) jac[j](r, c) = y[r].d;
                    if (c == 0) {
                        points[j].resize(n_);
                        for (int r = 0; r < n_; ++r) points[j][r] = y[r].v;
                    }
                }
                kvals[j].resize(kc_->arity_out());
                kc_->eval(std::span<const S>(points[j]), std::span<S>(kvals[j]));
            }
        }
        // stacked slot Jacobians (constant in the basis loop)
        SMat<S> m(p_ * n_, d_);
        for (int j = 0; j < p_; ++j)
            for (int r = 0; r < n_; ++r)
                for (int c = 0; c < d_; ++c) m(j * n_ + r, c) = jac[j](r, c);

        SMat<S> minor(deg_, deg_);
        std::vector<S> rhs(p_ * n_);
        for (size_t jr = 0; jr < idx_.size(); ++jr) {
            for (int j = 0; j < p_; ++j) {
                // K(A_j e_{J_1}, ..., A_j e_{J_deg}) at the slot point
                for (int i = 0; i < n_; ++i) rhs[j * n_ + i] = from_real<S>(0.0);
                for (size_t ir = 0; ir < kidx_.size(); ++ir) {
                    for (int a = 0; a < deg_; ++a)
                        for (int b = 0; b < deg_; ++b)
                            minor(a, b) = jac[j](kidx_[ir][a], idx_[jr][b]);
                    const S det = detail::det_laplace(minor);
                    for (int i = 0; i < n_; ++i)
                        rhs[j * n_ + i] = rhs[j * n_ + i] + kvals[j][ir * n_ + i] * det;
                }
            }
            auto w = detail::solve_least_squares(m, rhs);
            for (int i = 0; i < d_; ++i) out[jr * d_ + i] = w[i];
        }
    }

private:
    int n_;
    int p_;
    int deg_;
    SmoothFnPtr kc_;
    int d_ = 0;
    std::vector<SmoothFnPtr> slot_fns_;
    std::vector<std::vector<int>> idx_;
    std::vector<std::vector<int>> kidx_;
};

}  // namespace

std::vector<NerveLevel> build_nerve(const Groupoid& g, int p_max)
{
    if (p_max < 2 || p_max > 3) throw DimensionError("build_nerve: p_max must be 2 or 3");
    if (!g.has_level(p_max))
        throw DimensionError("build_nerve: groupoid '" + g.name + "' has no level-" +
                             std::to_string(p_max) + " chart");

    std::vector<NerveLevel> out;
    NerveLevel l0;
    l0.p = 0;
    l0.chart = g.chart_M;
    out.push_back(std::move(l0));

    NerveLevel l1;
    l1.p = 1;
    l1.chart = g.chart_G;
    l1.faces = {g.src, g.tgt};
    l1.degens = {g.unit};
    l1.slots = {map_identity(g.chart_G)};
    out.push_back(std::move(l1));

    for (int p = 2; p <= p_max; ++p) {
        const auto& spec = g.level(p);
        NerveLevel lv;
        lv.p = p;
        lv.chart = spec.chart;
        for (int j = 0; j < p; ++j) lv.slots.push_back(g.slot_map(p, j));

        const Chart& below = out[p - 1].chart;
        auto assemble = [&](const std::vector<SmoothFnPtr>& parts) -> SmoothFnPtr {
            if (p - 1 == 1) return parts[0];
            auto stacked = fn_stack(parts);
            return fn_compose(fn_select(g.level(p - 1).join, (p - 1) * g.chart_G.dim), stacked);
        };

        // faces: drop the first arrow, multiply an adjacent pair, drop the last
        for (int i = 0; i <= p; ++i) {
            std::vector<SmoothFnPtr> parts;
            if (i == 0) {
                for (int j = 1; j < p; ++j) parts.push_back(fn_select(spec.slots[j], spec.chart.dim));
            } else if (i == p) {
                for (int j = 0; j < p - 1; ++j)
                    parts.push_back(fn_select(spec.slots[j], spec.chart.dim));
            } else {
                for (int j = 0; j < i - 1; ++j)
                    parts.push_back(fn_select(spec.slots[j], spec.chart.dim));
                parts.push_back(fn_compose(g.mult.fn, pair_fn(g, spec, i - 1, i)));
                for (int j = i + 1; j < p; ++j)
                    parts.push_back(fn_select(spec.slots[j], spec.chart.dim));
            }
            lv.faces.push_back(SmoothMap{spec.chart, below, assemble(parts)});
        }

        // degeneracies: insert a unit before arrow i+1
        const auto& below_spec_slots = out[p - 1].slots;
        for (int i = 0; i <= p - 1; ++i) {
            std::vector<SmoothFnPtr> parts;
            for (int j = 0; j < i; ++j) parts.push_back(below_spec_slots[j].fn);
            if (i == 0)
                parts.push_back(fn_compose(g.unit.fn, fn_compose(g.tgt.fn, below_spec_slots[0].fn)));
            else
                parts.push_back(
                    fn_compose(g.unit.fn, fn_compose(g.src.fn, below_spec_slots[i - 1].fn)));
            for (int j = i; j < p - 1; ++j) parts.push_back(below_spec_slots[j].fn);
            auto stacked = fn_stack(parts);
            auto fn = fn_compose(fn_select(spec.join, p * g.chart_G.dim), stacked);
            lv.degens.push_back(SmoothMap{below, spec.chart, fn});
        }
        out.push_back(std::move(lv));
    }
    return out;
}

SimplicialReport check_simplicial_identities(const std::vector<NerveLevel>& levels, Rng& rng,
                                             int samples)
{
    SimplicialReport rep;
    auto note = [&](double r, const std::string& label) {
        ++rep.samples;
        if (r > rep.max_residual) {
            rep.max_residual = r;
            rep.worst_identity = label;
        }
    };

    const int p_max = static_cast<int>(levels.size()) - 1;
    for (int p = 2; p <= p_max; ++p) {
        const auto& lp = levels[p];
        const auto& lbelow = levels[p - 1];
        for (int s = 0; s < samples; ++s) {
            const Vec u = sample_point(lbelow.chart, rng);
            for (int i = 0; i <= p - 1; ++i) {
                const Vec su = lp.degens[i].apply(u);
                for (int j = 0; j <= p; ++j) {
                    const Vec lhs = lp.faces[j].apply(su);
                    Vec rhs;
                    std::string label = "face_" + std::to_string(j) + " o degen_" +
                                        std::to_string(i) + " at level " + std::to_string(p);
                    if (j == i || j == i + 1) {
                        rhs = u;
                    } else if (j < i) {
                        rhs = lbelow.degens[i - 1].apply(lbelow.faces[j].apply(u));
                    } else {
                        rhs = lbelow.degens[i].apply(lbelow.faces[j - 1].apply(u));
                    }
                    note(max_abs_diff(lhs, rhs), label);
                }
            }
        }
    }
    return rep;
}

SForm bss_delta(const std::vector<NerveLevel>& levels, int p, const SForm& w)
{
    if (p < 1 || p >= static_cast<int>(levels.size()))
        throw DimensionError("bss_delta: level out of range");
    const auto& lv = levels[p];
    if (w.chart.dim != levels[p - 1].chart.dim)
        throw DimensionError("bss_delta: form does not live on level p-1");
    SForm acc = pullback_sform(lv.faces[0], w);
    for (int i = 1; i <= p; ++i)
        acc = sform_axpy(1.0, acc, i % 2 == 0 ? 1.0 : -1.0, pullback_sform(lv.faces[i], w));
    return acc;
}

VForm product_lift_vform(const Groupoid& g, int p, const VForm& k)
{
    if (k.chart.dim != g.chart_G.dim)
        throw DimensionError("product_lift_vform: form does not live on the arrow chart");
    if (p == 1) return k;
    return {g.level(p).chart, k.degree, std::make_shared<ProductLiftCoeff>(g, p, k)};
}

DerivationTower lift_tower(const Groupoid& g, const VForm& k, const VForm& k_m, int p_max,
                           Rng& rng, bool validate, const MultOptions& opts)
{
    if (validate) {
        auto rep = check_multiplicative(g, k, k_m, rng, opts);
        if (!rep.pass)
            throw NotMultiplicative("lift_tower: K is not multiplicative (residual " +
                                    std::to_string(rep.max_residual()) + ")");
    }
    DerivationTower t;
    t.k.push_back(k_m);
    t.k.push_back(k);
    for (int p = 2; p <= p_max; ++p) t.k.push_back(product_lift_vform(g, p, k));
    return t;
}

TowerReport check_tower_relations(const std::vector<NerveLevel>& levels,
                                  const DerivationTower& tower, Rng& rng,
                                  const TowerOptions& opts)
{
    const int p_max = std::min(static_cast<int>(levels.size()),
                               static_cast<int>(tower.k.size())) - 1;
    const int kdeg = tower.k[1].degree;
    const double dsign = kdeg % 2 == 0 ? 1.0 : -1.0;
    TowerReport rep;

    auto residual_on = [&](const SForm& a, const SForm& b, const Chart& chart, double& slot) {
        for (int s = 0; s < opts.samples; ++s) {
            const Vec x = sample_point(chart, rng);
            const double r = max_abs_diff(sform_coefficients(a, x), sform_coefficients(b, x));
            slot = std::max(slot, r);
            ++rep.samples;
        }
    };

    for (int p = 0; p <= p_max; ++p) {
        for (int t = 0; t < opts.forms_per_level; ++t) {
            // de Rham compatibility at level p
            {
                const int q = static_cast<int>(rng.below(opts.max_form_degree + 1));
                SForm w = random_sform(levels[p].chart, q, rng);
                SForm lhs = lie_derivative(tower.k[p], exterior_d(w));
                SForm rhs = sform_scale(dsign, exterior_d(lie_derivative(tower.k[p], w)));
                residual_on(lhs, rhs, levels[p].chart, rep.derham_residual);
            }
            if (p >= 1) {
                // degeneracy compatibility: (s_i^p)* L_p = L_{p-1} (s_i^p)*
                const int q = static_cast<int>(rng.below(opts.max_form_degree + 1));
                SForm w = random_sform(levels[p].chart, q, rng);
                SForm lw = lie_derivative(tower.k[p], w);
                for (int i = 0; i < p; ++i) {
                    SForm lhs = pullback_sform(levels[p].degens[i], lw);
                    SForm rhs =
                        lie_derivative(tower.k[p - 1], pullback_sform(levels[p].degens[i], w));
                    residual_on(lhs, rhs, levels[p - 1].chart, rep.degeneracy_residual);
                }
                // delta compatibility: L_p delta = delta L_{p-1}
                SForm v = random_sform(levels[p - 1].chart, q, rng);
                SForm lhs = lie_derivative(tower.k[p], bss_delta(levels, p, v));
                SForm rhs = bss_delta(levels, p, lie_derivative(tower.k[p - 1], v));
                residual_on(lhs, rhs, levels[p].chart, rep.delta_residual);
            }
        }
    }
    return rep;
}

}  // namespace fnbrack
