#include "fnbrack/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fnbrack/bundle.hpp"
#include "fnbrack/nerve.hpp"
#include "fnbrack/sampling.hpp"

namespace fnbrack {

namespace {

using clock_type = std::chrono::steady_clock;

struct Runner {
    SuiteResult res;
    Rng rng;
    clock_type::time_point t0 = clock_type::now();
    bool sub_failed = false;

    Runner(const SuiteInfo& info, const SuiteRequest& req)
        : rng(Rng(req.seed).split(info.name))
    {
        res.suite = info.name;
        res.tolerance = req.tolerance >= 0.0 ? req.tolerance : info.default_tolerance;
        res.samples = 0;
    }

    void observe(double residual, long count = 1)
    {
        res.max_residual = std::max(res.max_residual, residual);
        res.samples += count;
    }

    // a sub-criterion with its own pinned threshold
    void require(double residual, double threshold, long count = 1)
    {
        if (residual >= threshold) sub_failed = true;
        res.samples += count;
    }

    SuiteResult finish()
    {
        res.pass = res.max_residual < res.tolerance && !sub_failed;
        res.millis = std::chrono::duration_cast<std::chrono::milliseconds>(clock_type::now() - t0)
                         .count();
        return res;
    }
};

long samples_or(const SuiteRequest& req, long fallback)
{
    return req.samples > 0 ? req.samples : fallback;
}

const Chart kR2 = Chart::cube(2, "R2");
const Chart kR3 = Chart::cube(3, "R3");

// ----- fn-defining-property -----

SuiteResult suite_defining_property(const SuiteInfo& info, const SuiteRequest& req)
{
    Runner r(info, req);
    const long total = samples_or(req, 100);
    const std::vector<std::pair<int, int>> degrees{{1, 1}, {1, 2}, {0, 1}};
    // two random (K, L) draws per degree pair, test forms of degree 0 and 1
    const long batches = static_cast<long>(4 * degrees.size());
    const long per_form = (total + batches - 1) / batches;
    for (const auto& [dk, dl] : degrees) {
        for (int rep = 0; rep < 2; ++rep) {
            VForm k = random_vform(kR3, dk, r.rng);
            VForm l = random_vform(kR3, dl, r.rng);
            VForm kl = fn_bracket(k, l);
            const double csign = (dk * dl) % 2 == 0 ? -1.0 : 1.0;
            for (int p = 0; p <= 1; ++p) {
                SForm w = random_sform(kR3, p, r.rng);
                SForm lhs = lie_derivative(kl, w);
                SForm rhs = sform_axpy(1.0, lie_derivative(k, lie_derivative(l, w)), csign,
                                       lie_derivative(l, lie_derivative(k, w)));
                for (long s = 0; s < per_form; ++s) {
                    const Vec x = sample_point(kR3, r.rng);
                    r.observe(max_abs_diff(sform_coefficients(lhs, x), sform_coefficients(rhs, x)));
                }
            }
        }
    }
    return r.finish();
}

// ----- vector-field-reduction -----

SuiteResult suite_vector_field_reduction(const SuiteInfo& info, const SuiteRequest& req)
{
    Runner r(info, req);
    const long total = samples_or(req, 50);
    VForm x_f = random_vform(kR3, 0, r.rng);
    VForm y_f = random_vform(kR3, 0, r.rng);
    VForm b = fn_bracket(x_f, y_f);
    for (long s = 0; s < total; ++s) {
        const Vec p = sample_point(kR3, r.rng);
        Vec expect(3, 0.0);
        for (int rr = 0; rr < 3; ++rr) {
            std::vector<Jet1> in(3), xo(3), yo(3);
            for (int i = 0; i < 3; ++i) in[i] = Jet1(p[i], i == rr ? 1.0 : 0.0);
            x_f.coeff->eval(std::span<const Jet1>(in), std::span<Jet1>(xo));
            y_f.coeff->eval(std::span<const Jet1>(in), std::span<Jet1>(yo));
            for (int i = 0; i < 3; ++i) expect[i] += xo[rr].v * yo[i].d - yo[rr].v * xo[i].d;
        }
        r.observe(max_abs_diff(eval_vform(b, p, {}), expect));
    }
    return r.finish();
}

// ----- nijenhuis-identity -----

SuiteResult suite_nijenhuis(const SuiteInfo& info, const SuiteRequest& req)
{
    Runner r(info, req);
    const long total = samples_or(req, 50);
    for (int rep = 0; rep < 3; ++rep) {
        VForm k = random_vform(kR3, 1, r.rng);
        VForm nk = nijenhuis_tensor(k);
        VForm half = vform_scale(0.5, fn_bracket(k, k));
        for (long s = 0; s < (total + 2) / 3; ++s) {
            const Vec x = sample_point(kR3, r.rng);
            r.observe(max_abs_diff(vform_coefficients(nk, x), vform_coefficients(half, x)));
        }
    }
    // constant complex structure: exactly integrable
    VForm j = vform_constant(kR2, 1, {0.0, 1.0, -1.0, 0.0});
    VForm nj = nijenhuis_tensor(j);
    for (int s = 0; s < 10; ++s)
        r.require(max_abs(vform_coefficients(nj, sample_point(kR2, r.rng))), 1e-12);
    return r.finish();
}

// ----- projection-curvature -----

SuiteResult suite_projection_curvature(const SuiteInfo& info, const SuiteRequest& req)
{
    Runner r(info, req);
    const long total = samples_or(req, 50);

    std::vector<VForm> family;
    family.push_back(vform_from_exprs(kR3, 1, "0;0;0; 0;0;-x1; 0;0;1"));  // Heisenberg
    family.push_back(vform_constant(kR3, 1, {1, 0, 0, 0, 0, 0, 0, 0, 0}));  // flat
    {
        const std::string f = random_smooth_coeff(r.rng, 3);
        const std::string g = random_smooth_coeff(r.rng, 3);
        const std::string h = random_smooth_coeff(r.rng, 3);
        family.push_back(vform_from_exprs(
            kR3, 1, "1;0;0; -(" + f + ");0;0; (" + f + ")*(" + h + ") - (" + g + ");0;0"));
    }
    for (const auto& k : family) {
        VForm half = vform_scale(0.5, fn_bracket(k, k));
        VForm rk = projection_curvature(k);
        VForm co = projection_cocurvature(k);
        for (long s = 0; s < (total + 2) / 3; ++s) {
            const Vec x = sample_point(kR3, r.rng);
            Vec sum = vform_coefficients(rk, x);
            const Vec cc = vform_coefficients(co, x);
            for (size_t i = 0; i < sum.size(); ++i) sum[i] += cc[i];
            r.observe(max_abs_diff(vform_coefficients(half, x), sum));
        }
    }
    // Heisenberg curvature value R_K(dx, dy) = d/dz
    VForm rk = projection_curvature(family[0]);
    for (int s = 0; s < 10; ++s) {
        const Vec v = eval_vform(rk, sample_point(kR3, r.rng), {{1, 0, 0}, {0, 1, 0}});
        const double res = std::max({std::fabs(v[0]), std::fabs(v[1]), std::fabs(v[2] - 1.0)});
        r.require(res, 1e-10);
    }
    return r.finish();
}

// ----- mult-bracket-closure -----

SuiteResult suite_bracket_closure(const SuiteInfo& info, const SuiteRequest& req)
{
    Runner r(info, req);
    MultOptions opts;
    opts.samples = static_cast<int>(samples_or(req, 50));
    opts.tolerance = r.res.tolerance;

    {
        auto g = make_pair_groupoid(kR2);
        VForm km = random_vform(kR2, 1, r.rng);
        VForm lm = random_vform(kR2, 1, r.rng);
        VForm k = product_vform(km, km, g.chart_G);
        VForm l = product_vform(lm, lm, g.chart_G);
        auto rep = check_multiplicative(g, fn_bracket(k, l), fn_bracket(km, lm), r.rng, opts);
        r.observe(rep.max_residual(), rep.samples);
    }
    {
        auto gg = make_gauge_groupoid(make_trivial_bundle(kR2, 1));
        auto c = connection_from_exprs(gg.bundle, "0; x1");
        VForm k = connection_to_projection(gg, c);
        VForm id = vform_identity(gg.gpd.chart_G);
        auto rep1 = check_multiplicative(gg.gpd, fn_bracket(k, id),
                                         vform_zero(gg.bundle.base, 2), r.rng, opts);
        r.observe(rep1.max_residual(), rep1.samples);
        VForm rk = projection_curvature(k);
        auto rep2 = check_multiplicative(gg.gpd, fn_bracket(k, rk),
                                         vform_zero(gg.bundle.base, 3), r.rng, opts);
        r.observe(rep2.max_residual(), rep2.samples);
    }
    return r.finish();
}

// ----- connection-correspondence -----

SuiteResult suite_connection_correspondence(const SuiteInfo& info, const SuiteRequest& req)
{
    Runner r(info, req);
    const long total = samples_or(req, 50);
    auto gg = make_gauge_groupoid(make_trivial_bundle(kR2, 1));

    for (const std::string& a_text :
         {std::string("0; x1"), "0.3*x2; " + random_smooth_coeff(r.rng, 2)}) {
        auto c = connection_from_exprs(gg.bundle, a_text);
        VForm k = connection_to_projection(gg, c);
        auto c2 = projection_to_connection(gg, k, r.rng);
        VForm k2 = connection_to_projection(gg, c2);
        for (long s = 0; s < total / 2; ++s) {
            const Vec x = sample_point(gg.bundle.base, r.rng);
            r.observe(max_abs_diff(sform_coefficients(c.a[0], x), sform_coefficients(c2.a[0], x)));
            const Vec p = sample_point(gg.gpd.chart_G, r.rng);
            r.observe(max_abs_diff(vform_coefficients(k, p), vform_coefficients(k2, p)));
        }
    }
    // the identity endomorphism must be rejected (image not vertical)
    bool rejected = false;
    try {
        projection_to_connection(gg, vform_identity(gg.gpd.chart_G), r.rng);
    } catch (const NotAProjection&) {
        rejected = true;
    }
    r.require(rejected ? 0.0 : 1.0, 0.5);
    return r.finish();
}

// ----- cohomological-triviality -----

SuiteResult suite_cohomological_triviality(const SuiteInfo& info, const SuiteRequest& req)
{
    Runner r(info, req);
    const int total = static_cast<int>(samples_or(req, 30));

    // a scenario-declared bundle/connection replaces the default family
    if (auto it = req.params.strings.find("connection"); it != req.params.strings.end()) {
        const int base_dim = static_cast<int>(req.params.number_or("bundle_base_dim", 2));
        const int group_dim = static_cast<int>(req.params.number_or("bundle_group_dim", 1));
        auto b = make_trivial_bundle(Chart::cube(base_dim, "R" + std::to_string(base_dim)),
                                     group_dim);
        auto gg = make_gauge_groupoid(b);
        auto rep = check_curvature_identity(gg, connection_from_exprs(b, it->second), r.rng, total);
        r.observe(rep.max_residual, rep.samples);
        return r.finish();
    }

    auto gg = make_gauge_groupoid(make_trivial_bundle(kR2, 1));
    for (const char* a_text : {"0; 0", "0; x1", "0; x1^2"}) {
        auto c = connection_from_exprs(gg.bundle, a_text);
        auto rep = check_curvature_identity(gg, c, r.rng, total);
        r.observe(rep.max_residual, rep.samples);
    }
    // F(d/dx, d/dy) = 1 for A = x dy
    auto c = connection_from_exprs(gg.bundle, "0; x1");
    VectorForm f = curvature_2form(gg.bundle, c);
    for (int s = 0; s < 10; ++s) {
        const Vec v = eval_vector_form(f, sample_point(gg.bundle.base, r.rng), {{1, 0}, {0, 1}});
        r.require(std::fabs(v[0] - 1.0), 1e-8);
    }
    return r.finish();
}

// ----- nerve-bss -----

SuiteResult suite_nerve_bss(const SuiteInfo& info, const SuiteRequest& req)
{
    Runner r(info, req);
    const double perturb = req.params.number_or("perturb", 0.0);
    TowerOptions topts;
    topts.samples = static_cast<int>(samples_or(req, 8));

    auto run_groupoid = [&](const Groupoid& g, const VForm& k, const VForm& k_m) {
        auto levels = build_nerve(g, 3);
        auto srep = check_simplicial_identities(levels, r.rng, 100);
        r.require(srep.max_residual, 1e-12, srep.samples);

        // delta^2 = 0 on a random 1-form on the arrows
        SForm w = random_sform(levels[1].chart, 1, r.rng);
        SForm dd = bss_delta(levels, 3, bss_delta(levels, 2, w));
        for (int s = 0; s < 10; ++s)
            r.require(max_abs(sform_coefficients(dd, sample_point(levels[3].chart, r.rng))), 1e-9);

        auto tower = lift_tower(g, k, k_m, 2, r.rng);
        if (perturb > 0.0) {
            const long nc =
                levels[2].chart.dim * form_component_count(levels[2].chart.dim, k.degree);
            tower.k[2] = vform_axpy(1.0, tower.k[2], 1.0,
                                    vform_constant(levels[2].chart, k.degree, Vec(nc, perturb)));
        }
        auto trep = check_tower_relations(levels, tower, r.rng, topts);
        r.observe(trep.max_residual(), trep.samples);

        if (perturb == 0.0) {
            // sensitivity: a 1e-3 perturbation of the middle level must
            // push the delta relation above 1e-4
            auto bad = tower;
            const long nc =
                levels[2].chart.dim * form_component_count(levels[2].chart.dim, k.degree);
            bad.k[2] = vform_axpy(1.0, bad.k[2], 1.0,
                                  vform_constant(levels[2].chart, k.degree, Vec(nc, 1e-3)));
            auto brep = check_tower_relations(levels, bad, r.rng, topts);
            r.require(brep.delta_residual >= 1e-4 ? 0.0 : 1.0, 0.5);
        }
    };

    {
        auto g = make_pair_groupoid(Chart::cube(1, "R"));
        VForm km = random_vform(g.chart_M, 1, r.rng);
        run_groupoid(g, product_vform(km, km, g.chart_G), km);
    }
    {
        auto gg = make_gauge_groupoid(make_trivial_bundle(kR2, 1));
        auto c = connection_from_exprs(gg.bundle, "0; x1");
        run_groupoid(gg.gpd, connection_to_projection(gg, c), vform_zero(gg.bundle.base, 1));
    }
    return r.finish();
}

// ----- naturality-relatedness -----

SuiteResult suite_naturality(const SuiteInfo& info, const SuiteRequest& req)
{
    Runner r(info, req);
    RelatednessOptions ropts;
    ropts.samples = static_cast<int>(samples_or(req, 30));

    {
        // transport along a polynomial diffeomorphism of R^2
        SmoothMap f = map_from_exprs(kR2, kR2, "x1 + x2^2; x2");
        SmoothMap f_inv = map_from_exprs(kR2, kR2, "x1 - x2^2; x2");
        VForm k1 = random_vform(kR2, 1, r.rng);
        VForm l1 = random_vform(kR2, 1, r.rng);
        VForm k2 = pushforward_vform(f, f_inv, k1);
        VForm l2 = pushforward_vform(f, f_inv, l1);
        auto rep = check_f_related(f, fn_bracket(k1, l1), fn_bracket(k2, l2), r.rng, ropts);
        r.observe(rep.max_residual, rep.samples);
    }
    {
        // product projection
        const Chart r2x2 = product_chart(kR2, kR2, "R2xR2");
        SmoothMap pr1 = map_from_exprs(r2x2, kR2, "x1; x2");
        VForm km = random_vform(kR2, 1, r.rng);
        VForm lm = random_vform(kR2, 1, r.rng);
        VForm k = product_vform(km, km, r2x2);
        VForm l = product_vform(lm, lm, r2x2);
        auto rep = check_f_related(pr1, fn_bracket(k, l), fn_bracket(km, lm), r.rng, ropts);
        r.observe(rep.max_residual, rep.samples);
    }
    {
        // [K,L]^(2) = [K^(2), L^(2)] on the pair groupoid
        auto g = make_pair_groupoid(Chart::cube(1, "R"));
        VForm km = random_vform(g.chart_M, 1, r.rng);
        VForm lm = random_vform(g.chart_M, 1, r.rng);
        VForm k = product_vform(km, km, g.chart_G);
        VForm l = product_vform(lm, lm, g.chart_G);
        VForm lhs = product_lift_vform(g, 2, fn_bracket(k, l));
        VForm rhs = fn_bracket(product_lift_vform(g, 2, k), product_lift_vform(g, 2, l));
        for (int s = 0; s < ropts.samples; ++s) {
            const Vec u = sample_point(g.level(2).chart, r.rng);
            r.observe(max_abs_diff(vform_coefficients(lhs, u), vform_coefficients(rhs, u)));
        }
    }
    return r.finish();
}

// ----- check-mult (scenario-declared objects) -----

SuiteResult suite_check_mult(const SuiteInfo& info, const SuiteRequest& req)
{
    Runner r(info, req);
    if (!req.params.groupoid || !req.params.k || !req.params.k_m)
        throw ConfigError("check-mult: scenario must declare a groupoid and forms named K and K_M");
    MultOptions opts;
    opts.samples = static_cast<int>(samples_or(req, 50));
    opts.tolerance = r.res.tolerance;
    auto rep = check_multiplicative(*req.params.groupoid, *req.params.k, *req.params.k_m, r.rng,
                                    opts);
    r.observe(rep.max_residual(), rep.samples);
    return r.finish();
}

template <SuiteResult (*Impl)(const SuiteInfo&, const SuiteRequest&)>
SuiteResult entry(const SuiteRequest& req);

std::vector<SuiteInfo> make_registry()
{
    std::vector<SuiteInfo> v;
    auto add = [&](const char* name, const char* desc, double tol, long samples, SuiteFn fn) {
        v.push_back({name, desc, tol, samples, fn});
    };
    add("check-mult", "multiplicativity of a scenario-declared form over a declared groupoid",
        1e-7, 50, entry<suite_check_mult>);
    add("cohomological-triviality",
        "curvature of a connection-induced projector against base curvature pullbacks", 1e-8, 30,
        entry<suite_cohomological_triviality>);
    add("connection-correspondence",
        "round-trips between connections and multiplicative vertical projectors", 1e-9, 50,
        entry<suite_connection_correspondence>);
    add("fn-defining-property",
        "L_[K,L] equals the graded commutator [L_K, L_L] on random forms", 1e-8, 100,
        entry<suite_defining_property>);
    add("mult-bracket-closure",
        "brackets of multiplicative forms stay multiplicative (pair and gauge groupoids)", 1e-7,
        50, entry<suite_bracket_closure>);
    add("naturality-relatedness",
        "f-relatedness is preserved by the bracket; product lifts commute with it", 1e-7, 30,
        entry<suite_naturality>);
    add("nerve-bss",
        "simplicial identities, delta^2 = 0, derivation-tower relations and their sensitivity",
        1e-7, 8, entry<suite_nerve_bss>);
    add("nijenhuis-identity", "half bracket of a degree-1 form equals its Nijenhuis tensor", 1e-8,
        50, entry<suite_nijenhuis>);
    add("projection-curvature",
        "half bracket of a projection splits into curvature plus co-curvature", 1e-8, 50,
        entry<suite_projection_curvature>);
    add("vector-field-reduction", "degree-0 bracket reduces to the Lie bracket of vector fields",
        1e-10, 50, entry<suite_vector_field_reduction>);
    std::sort(v.begin(), v.end(), [](const SuiteInfo& a, const SuiteInfo& b) { return a.name < b.name; });
    return v;
}

template <SuiteResult (*Impl)(const SuiteInfo&, const SuiteRequest&)>
SuiteResult entry(const SuiteRequest& req)
{
    for (const auto& info : suite_registry())
        if (info.fn == static_cast<SuiteFn>(&entry<Impl>)) return Impl(info, req);
    throw Error("suite registry inconsistency");
}

}  // namespace

const std::vector<SuiteInfo>& suite_registry()
{
    static const std::vector<SuiteInfo> registry = make_registry();
    return registry;
}

const SuiteInfo* find_suite(const std::string& name)
{
    for (const auto& info : suite_registry())
        if (info.name == name) return &info;
    return nullptr;
}

SuiteResult run_suite(const std::string& name, const SuiteRequest& req)
{
    const SuiteInfo* info = find_suite(name);
    if (!info) throw ConfigError("unknown suite '" + name + "'");
    return info->fn(req);
}

}  // namespace fnbrack
