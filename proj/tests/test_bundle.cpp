#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fnbrack/bundle.hpp"
#include "fnbrack/sampling.hpp"
#include "support.hpp"

using namespace fnbrack;

namespace {

// base M = R^2, structure group R; A = x dy unless stated otherwise
TrivialBundle std_bundle() { return make_trivial_bundle(Chart::cube(2, "R2"), 1); }

}  // namespace

TEST_CASE("gauge groupoid satisfies the structural laws")
{
    Rng rng(3001);
    auto gg = make_gauge_groupoid(std_bundle());
    auto rep = check_groupoid_axioms(gg.gpd, rng, 50);
    INFO("worst law: ", rep.worst_law);
    CHECK(rep.max_residual < 1e-12);
}

TEST_CASE("bundle right action is free and composes contravariantly")
{
    Rng rng(3014);
    auto b = std_bundle();
    for (int s = 0; s < 20; ++s) {
        const Vec p = sample_point(b.total, rng);
        const Vec g = sample_vector(b.group_dim, rng);
        const Vec h = sample_vector(b.group_dim, rng);

        // psi_e = id
        Vec in = p;
        in.insert(in.end(), b.group_dim, 0.0);
        CHECK(max_abs_diff(b.action.apply(in), p) < 1e-15);

        // psi_g(psi_h(p)) = psi_{hg}(p)
        Vec ph = p;
        ph.insert(ph.end(), h.begin(), h.end());
        Vec inner = b.action.apply(ph);
        inner.insert(inner.end(), g.begin(), g.end());
        const Vec lhs = b.action.apply(inner);
        Vec hg(b.group_dim);
        for (int i = 0; i < b.group_dim; ++i) hg[i] = h[i] + g[i];
        Vec phg = p;
        phg.insert(phg.end(), hg.begin(), hg.end());
        CHECK(max_abs_diff(lhs, b.action.apply(phg)) < 1e-15);
    }
}

TEST_CASE("connection projector on the total space")
{
    Rng rng(3015);
    auto b = std_bundle();
    auto c = connection_from_exprs(b, random_smooth_coeff(rng, 2) + "; " +
                                          random_smooth_coeff(rng, 2));
    const int d = b.total.dim;
    for (int s = 0; s < 20; ++s) {
        const Vec p = sample_point(b.total, rng);
        const Vec tc = vform_coefficients(c.theta, p);
        // Theta^2 = Theta with image the vertical bundle
        double proj = 0.0, vert = 0.0;
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i) {
                double acc = 0.0;
                for (int t = 0; t < d; ++t) acc += tc[t * d + i] * tc[j * d + t];
                proj = std::max(proj, std::fabs(acc - tc[j * d + i]));
                if (i < b.base.dim) vert = std::max(vert, std::fabs(tc[j * d + i]));
            }
        CHECK(proj < 1e-12);
        CHECK(vert < 1e-15);

        // equivariance under the (translation) action at sampled group elements
        const Vec h = sample_vector(b.group_dim, rng);
        Vec in = p;
        in.insert(in.end(), h.begin(), h.end());
        const Vec moved = b.action.apply(in);
        CHECK(max_abs_diff(tc, vform_coefficients(c.theta, moved)) < 1e-12);
    }
}

TEST_CASE("connection projector has the derived chart coefficients")
{
    auto b = std_bundle();
    auto gg = make_gauge_groupoid(b);
    auto c = connection_from_exprs(b, "0; x1");  // A = x dy
    VForm k = connection_to_projection(gg, c);

    // K(dx, dy, dk) = (0, 0, dk + x1 dx2 - y1 dy2) in chart (x1,x2,y1,y2,k)
    Rng rng(3002);
    for (int t = 0; t < 10; ++t) {
        const Vec p = sample_point(gg.gpd.chart_G, rng);
        const Vec z = sample_vector(5, rng);
        const Vec v = eval_vform(k, p, {z});
        CHECK(std::fabs(v[0]) < 1e-14);
        CHECK(std::fabs(v[1]) < 1e-14);
        CHECK(std::fabs(v[2]) < 1e-14);
        CHECK(std::fabs(v[3]) < 1e-14);
        CHECK(std::fabs(v[4] - (z[4] + p[0] * z[1] - p[2] * z[3])) < 1e-12);
    }
}

TEST_CASE("flat connection gives the plain vertical projector with zero curvature")
{
    auto b = std_bundle();
    auto gg = make_gauge_groupoid(b);
    auto c = connection_from_exprs(b, "0; 0");
    VForm k = connection_to_projection(gg, c);
    Rng rng(3003);
    for (int t = 0; t < 5; ++t) {
        const Vec p = sample_point(gg.gpd.chart_G, rng);
        const Vec z = sample_vector(5, rng);
        const Vec v = eval_vform(k, p, {z});
        CHECK(std::fabs(v[4] - z[4]) < 1e-14);
    }
    VForm rk = projection_curvature(k);
    CHECK(max_abs(vform_coefficients(rk, {0.1, 0.2, 0.3, 0.4, 0.5})) < 1e-12);
    VectorForm f = curvature_2form(b, c);
    CHECK(max_abs(eval_vector_form(f, {0.3, 0.4}, {{1, 0}, {0, 1}})) < 1e-12);
}

TEST_CASE("projector induced by a random connection is an exact projection")
{
    Rng rng(3004);
    auto b = std_bundle();
    auto gg = make_gauge_groupoid(b);
    const std::string a_text = random_smooth_coeff(rng, 2) + "; " + random_smooth_coeff(rng, 2);
    auto c = connection_from_exprs(b, a_text);
    VForm k = connection_to_projection(gg, c);
    const int d = 5;
    for (int s = 0; s < 50; ++s) {
        const Vec p = sample_point(gg.gpd.chart_G, rng);
        const Vec kc = vform_coefficients(k, p);
        double worst = 0.0;
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i) {
                double acc = 0.0;
                for (int t = 0; t < d; ++t) acc += kc[t * d + i] * kc[j * d + t];
                worst = std::max(worst, std::fabs(acc - kc[j * d + i]));
            }
        CHECK(worst < 1e-10);
    }

    // multiplicative over the zero base form
    auto rep = check_multiplicative(gg.gpd, k, vform_zero(b.base, 1), rng);
    CHECK(rep.pass);
    CHECK(rep.max_residual() < 1e-9);
}

TEST_CASE("connection <-> projection round-trips")
{
    Rng rng(3005);
    auto b = std_bundle();
    auto gg = make_gauge_groupoid(b);

    SUBCASE("A = x dy")
    {
        auto c = connection_from_exprs(b, "0; x1");
        VForm k = connection_to_projection(gg, c);
        auto c2 = projection_to_connection(gg, k, rng);
        VForm k2 = connection_to_projection(gg, c2);
        for (int t = 0; t < 20; ++t) {
            const Vec p = sample_point(gg.gpd.chart_G, rng);
            CHECK(max_abs_diff(vform_coefficients(k, p), vform_coefficients(k2, p)) < 1e-9);
            const Vec x = sample_point(b.base, rng);
            for (int alpha = 0; alpha < 1; ++alpha)
                CHECK(max_abs_diff(sform_coefficients(c.a[alpha], x),
                                   sform_coefficients(c2.a[alpha], x)) < 1e-9);
        }
    }

    SUBCASE("flat connection round-trips exactly")
    {
        auto c = connection_from_exprs(b, "0; 0");
        auto c2 = projection_to_connection(gg, connection_to_projection(gg, c), rng);
        const Vec x = {0.3, -0.4};
        CHECK(max_abs(sform_coefficients(c2.a[0], x)) < 1e-14);
    }

    SUBCASE("identity is rejected: image is not vertical")
    {
        CHECK_THROWS_AS(projection_to_connection(gg, vform_identity(gg.gpd.chart_G), rng),
                        NotAProjection);
    }

    SUBCASE("a non-multiplicative vertical projector is rejected")
    {
        // k-dependent coefficients break multiplicativity but keep K^2 = K
        VForm bad = vform_from_exprs(gg.gpd.chart_G, 1,
                                     "0;0;0;0;x5; 0;0;0;0;0; 0;0;0;0;0; 0;0;0;0;0; 0;0;0;0;1");
        CHECK_THROWS_AS(projection_to_connection(gg, bad, rng), NotMultiplicative);
    }
}

TEST_CASE("curvature 2-form")
{
    Rng rng(3006);
    auto b = std_bundle();

    SUBCASE("A = x dy has F(d/dx, d/dy) = 1")
    {
        auto c = connection_from_exprs(b, "0; x1");
        VectorForm f = curvature_2form(b, c);
        for (int t = 0; t < 10; ++t) {
            const Vec x = sample_point(b.base, rng);
            const Vec v = eval_vector_form(f, x, {{1, 0}, {0, 1}});
            CHECK(std::fabs(v[0] - 1.0) < 1e-10);
        }
    }

    SUBCASE("abelian curvature equals dA")
    {
        for (int trial = 0; trial < 3; ++trial) {
            const std::string text = random_smooth_coeff(rng, 2) + "; " + random_smooth_coeff(rng, 2);
            auto c = connection_from_exprs(b, text);
            VectorForm f = curvature_2form(b, c);
            SForm da = exterior_d(c.a[0]);
            for (int t = 0; t < 10; ++t) {
                const Vec x = sample_point(b.base, rng);
                const auto xs = testsupport::random_point(rng, b.base);
                const std::vector<Vec> vs{sample_vector(2, rng), sample_vector(2, rng)};
                CHECK(std::fabs(eval_vector_form(f, x, vs)[0] - eval_sform(da, x, vs)) < 1e-9);
            }
        }
    }
}

TEST_CASE("vertical isomorphism")
{
    Rng rng(3007);
    auto gg = make_gauge_groupoid(std_bundle());
    const auto iso = vertical_iso(gg);

    // chart transcription: (0,0,w) -> w
    CHECK(iso.apply({0, 0, 0, 0, 0.7})[0] == doctest::Approx(0.7));
    CHECK(iso.inverse({0.7})[4] == doctest::Approx(0.7));
    // diagonal representatives map to zero
    CHECK(std::fabs(iso.apply(iso.inverse({0.0}))[0]) < 1e-15);
    CHECK_THROWS_AS(iso.apply({0.5, 0, 0, 0, 1.0}), DomainViolation);

    auto rep = check_vertical_iso_morphism(gg, rng, 30);
    CHECK(rep.max_residual < 1e-9);
}

TEST_CASE("curvature identity through the vertical isomorphism")
{
    Rng rng(3008);
    auto b = std_bundle();
    auto gg = make_gauge_groupoid(b);
    for (const char* a_text : {"0; 0", "0; x1", "0; x1^2"}) {
        auto c = connection_from_exprs(b, a_text);
        auto rep = check_curvature_identity(gg, c, rng, 30);
        INFO("A components: ", a_text, ", worst: ", rep.worst_label);
        CHECK(rep.max_residual < 1e-8);
    }
}

TEST_CASE("curvature of the induced projector is multiplicative")
{
    Rng rng(3009);
    auto b = std_bundle();
    auto gg = make_gauge_groupoid(b);
    auto c = connection_from_exprs(b, "0; x1");
    VForm k = connection_to_projection(gg, c);
    VForm rk = projection_curvature(k);
    auto rep = check_multiplicative(gg.gpd, rk, vform_zero(b.base, 2), rng);
    CHECK(rep.pass);
    CHECK(rep.max_residual() < 1e-8);
}

TEST_CASE("vertical and horizontal distributions close under multiplication")
{
    Rng rng(3010);
    auto b = std_bundle();
    auto gg = make_gauge_groupoid(b);
    auto c = connection_from_exprs(b, "0; x1");
    VForm k = connection_to_projection(gg, c);
    VForm h = vform_axpy(-1.0, k, 1.0, vform_identity(gg.gpd.chart_G));

    CHECK(check_image_closed_under_mult(gg, k, rng, 30).max_residual < 1e-9);
    CHECK(check_image_closed_under_mult(gg, h, rng, 30).max_residual < 1e-9);
}

TEST_CASE("projector multiplicativity tracks distribution closure both ways")
{
    Rng rng(3011);
    auto b = std_bundle();
    auto gg = make_gauge_groupoid(b);

    // passing case: connection-induced K
    auto c = connection_from_exprs(b, "0; x1 + 0.3*x2");
    VForm good = connection_to_projection(gg, c);
    CHECK(check_multiplicative(gg.gpd, good, vform_zero(b.base, 1), rng).pass);
    CHECK(check_image_closed_under_mult(gg, good, rng, 30).max_residual < 1e-9);

    // failing case: k-dependent vertical projector
    VForm bad = vform_from_exprs(gg.gpd.chart_G, 1,
                                 "0;0;0;0;x5; 0;0;0;0;0; 0;0;0;0;0; 0;0;0;0;0; 0;0;0;0;1");
    auto rep = check_multiplicative(gg.gpd, bad, vform_zero(b.base, 1), rng);
    CHECK(!rep.pass);
    VForm bad_h = vform_axpy(-1.0, bad, 1.0, vform_identity(gg.gpd.chart_G));
    const double closure = std::max(check_image_closed_under_mult(gg, bad, rng, 30).max_residual,
                                    check_image_closed_under_mult(gg, bad_h, rng, 30).max_residual);
    CHECK(closure > 1e-3);
}

TEST_CASE("half bracket splits into curvature and co-curvature on the gauge groupoid")
{
    Rng rng(3012);
    auto b = std_bundle();
    auto gg = make_gauge_groupoid(b);
    auto c = connection_from_exprs(b, "0; x1^2");
    VForm k = connection_to_projection(gg, c);
    VForm half = vform_scale(0.5, fn_bracket(k, k));
    VForm rk = projection_curvature(k);
    VForm co = projection_cocurvature(k);
    for (int t = 0; t < 10; ++t) {
        const Vec p = sample_point(gg.gpd.chart_G, rng);
        const Vec a = vform_coefficients(half, p);
        Vec sum = vform_coefficients(rk, p);
        const Vec cc = vform_coefficients(co, p);
        for (size_t i = 0; i < sum.size(); ++i) sum[i] += cc[i];
        CHECK(max_abs_diff(a, sum) < 1e-8);
    }
}

TEST_CASE("bracket of a multiplicative projector with its curvature stays multiplicative")
{
    Rng rng(3013);
    auto b = std_bundle();
    auto gg = make_gauge_groupoid(b);
    auto c = connection_from_exprs(b, "0; x1");
    VForm k = connection_to_projection(gg, c);
    VForm rk = projection_curvature(k);
    auto rep = check_multiplicative(gg.gpd, fn_bracket(k, rk), vform_zero(b.base, 3), rng);
    CHECK(rep.pass);
    CHECK(rep.max_residual() < 1e-7);
}
