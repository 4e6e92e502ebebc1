#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fnbrack/smooth.hpp"
#include "support.hpp"

using namespace fnbrack;
using testsupport::random_point;
using testsupport::random_vector;

TEST_CASE("apply")
{
    const Chart r2 = Chart::cube(2, "R2");
    const Chart r1 = Chart::cube(1, "R1");

    auto id = map_identity(r2);
    CHECK(id.apply({1, 2}) == Vec{1, 2});

    // pair groupoid source on R x R, cross-checked against the left
    // unit law m(eps(s(g)), ...) -- here directly: m((y,y),(y,z)) = (y,z)
    auto s = map_from_exprs(r2, r1, "x2");
    CHECK(s.apply({1, 2}) == Vec{2});
    const Chart comp = Chart::cube(3, "comp");
    auto m = map_from_exprs(comp, r2, "x1; x3");
    const Vec g{1, 2};
    const Vec s_g = s.apply(g);
    const Vec back = m.apply({s_g[0], s_g[0], 2.0});
    CHECK(back[0] == doctest::Approx(2.0));
    CHECK(back[1] == doctest::Approx(2.0));

    // Aff(1) product
    const Chart g2 = Chart::cube(4, "G2");
    auto aff = map_from_exprs(g2, r2, "x1*x3; x1*x4 + x2");
    const Vec r = aff.apply({2, 1, 3, 4});
    CHECK(r[0] == doctest::Approx(6.0));
    CHECK(r[1] == doctest::Approx(9.0));
}

TEST_CASE("pushforward")
{
    const Chart r1 = Chart::cube(1, "R1");
    auto sq = map_from_exprs(r1, r1, "x1^2");
    auto pv = sq.pushforward({{3.0}, {1.0}});
    CHECK(pv.base[0] == doctest::Approx(9.0));
    CHECK(pv.vec[0] == doctest::Approx(6.0));

    auto id = map_identity(Chart::cube(3, "R3"));
    PointVec in{{1, 2, 3}, {4, 5, 6}};
    auto out = id.pushforward(in);
    CHECK(out.base == in.base);
    CHECK(out.vec == in.vec);

    // tangent of the Aff(1) product, against a finite-difference Jacobian
    const Chart g2 = Chart::cube(4, "G2");
    auto aff = map_from_exprs(g2, Chart::cube(2, "G"), "x1*x3; x1*x4 + x2");
    const Vec w{2, 1, 3, 4};
    const Vec z{1, 0, 0, 1};
    auto push = aff.pushforward({w, z});
    Mat jfd = testsupport::fd_jacobian(aff, w);
    Vec expect = matvec(jfd, z);
    CHECK(std::fabs(push.vec[0] - expect[0]) < 1e-6);
    CHECK(std::fabs(push.vec[1] - expect[1]) < 1e-6);
    CHECK(push.vec[0] == doctest::Approx(3.0));
    CHECK(push.vec[1] == doctest::Approx(6.0));
}

TEST_CASE("jacobian")
{
    // linear map: jacobian equals the matrix everywhere
    Mat a(2, 3);
    a(0, 0) = 1; a(0, 1) = -2; a(0, 2) = 0.5;
    a(1, 0) = 0; a(1, 1) = 3;  a(1, 2) = -1;
    SmoothMap lin{Chart::cube(3, "R3"), Chart::cube(2, "R2"), fn_linear(a, {0, 0})};
    Rng rng(99);
    for (int t = 0; t < 5; ++t) {
        const Vec p = random_vector(rng, 3);
        Mat j = lin.jacobian(p);
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 3; ++k) CHECK(j(i, k) == doctest::Approx(a(i, k)));
    }

    auto f = map_from_exprs(Chart::cube(2, "R2"), Chart::cube(2, "R2"), "x1*x2; x1 + x2");
    Mat j = f.jacobian({2, 3});
    CHECK(j(0, 0) == doctest::Approx(3.0));
    CHECK(j(0, 1) == doctest::Approx(2.0));
    CHECK(j(1, 0) == doctest::Approx(1.0));
    CHECK(j(1, 1) == doctest::Approx(1.0));

    // columns are pushforwards of basis vectors, exactly
    for (int c = 0; c < 2; ++c) {
        Vec e(2, 0.0);
        e[c] = 1.0;
        auto pv = f.pushforward({{2, 3}, e});
        for (int r = 0; r < 2; ++r) CHECK(pv.vec[r] == j(r, c));
    }
}

TEST_CASE("chain rule on random composites")
{
    Rng rng(4242);
    for (int t = 0; t < 20; ++t) {
        const int n = 2 + static_cast<int>(rng.below(2));
        const Chart cn = Chart::cube(n, "Cn");
        std::string fsrc, gsrc;
        for (int i = 0; i < n; ++i) {
            if (i) { fsrc += "; "; gsrc += "; "; }
            fsrc += testsupport::random_coeff_text(rng, n);
            gsrc += testsupport::random_coeff_text(rng, n);
        }
        auto f = map_from_exprs(cn, cn, fsrc);
        auto g = map_from_exprs(cn, cn, gsrc);
        auto gf = compose(g, f);
        const Vec p = random_point(rng, cn);
        Mat lhs = gf.jacobian(p);
        Mat rhs = matmul(g.jacobian(f.apply(p)), f.jacobian(p));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) CHECK(std::fabs(lhs(i, j) - rhs(i, j)) < 1e-10);
    }
}

TEST_CASE("pushforward is linear in the vector")
{
    Rng rng(31337);
    const Chart c = Chart::cube(3, "C");
    auto f = map_from_exprs(c, c, "sin(x1)*x2; x3^2 + x1; x2*x3");
    for (int t = 0; t < 20; ++t) {
        const Vec p = random_point(rng, c);
        const Vec u = random_vector(rng, 3), v = random_vector(rng, 3);
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        Vec au_bv(3);
        for (int i = 0; i < 3; ++i) au_bv[i] = a * u[i] + b * v[i];
        const Vec lhs = f.pushforward({p, au_bv}).vec;
        const Vec pu = f.pushforward({p, u}).vec;
        const Vec pv = f.pushforward({p, v}).vec;
        for (int i = 0; i < 3; ++i) CHECK(std::fabs(lhs[i] - (a * pu[i] + b * pv[i])) < 1e-12);
    }
}

TEST_CASE("tangent and whitney lifts")
{
    const Chart r1 = Chart::cube(1, "R1");
    auto sq = map_from_exprs(r1, r1, "x1^3");
    auto tsq = tangent_map(sq);
    CHECK(tsq.source.dim == 2);
    const Vec out = tsq.apply({2.0, 1.0});
    CHECK(out[0] == doctest::Approx(8.0));
    CHECK(out[1] == doctest::Approx(12.0));

    auto w2 = whitney_map(sq, 2);
    const Vec wout = w2.apply({2.0, 1.0, 5.0});
    CHECK(wout[0] == doctest::Approx(8.0));
    CHECK(wout[1] == doctest::Approx(12.0));
    CHECK(wout[2] == doctest::Approx(60.0));
}

TEST_CASE("domain predicates guard application")
{
    Chart half = Chart::box(1, "half", {0.5}, {2.0});
    half.domain = std::make_shared<expr::ExprFn>(expr::parse("x1", 1));
    auto f = map_from_exprs(half, half, "x1");
    CHECK(f.apply({1.0})[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(f.apply({-1.0}), DomainViolation);
}
