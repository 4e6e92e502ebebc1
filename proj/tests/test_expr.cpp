#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fnbrack/expr.hpp"
#include "support.hpp"

using namespace fnbrack;
using testsupport::random_expr_text;

namespace {

double eval1(const expr::ExprFn& f, const Vec& x)
{
    Vec out(f.arity_out);
    expr::evaluate(f, std::span<const double>(x), std::span<double>(out));
    return out[0];
}

double ad_partial(const expr::ExprFn& f, const Vec& x, int j)
{
    std::vector<Jet1> in(x.size()), out(f.arity_out);
    for (size_t i = 0; i < x.size(); ++i) in[i] = Jet1(x[i], static_cast<int>(i) == j ? 1.0 : 0.0);
    expr::evaluate(f, std::span<const Jet1>(in), std::span<Jet1>(out));
    return out[0].d;
}

double ad_second(const expr::ExprFn& f, const Vec& x, int i, int j)
{
    std::vector<Jet2> in(x.size()), out(f.arity_out);
    for (size_t k = 0; k < x.size(); ++k) {
        const double di = static_cast<int>(k) == i ? 1.0 : 0.0;
        const double dj = static_cast<int>(k) == j ? 1.0 : 0.0;
        in[k] = Jet2(Jet1(x[k], dj), Jet1(di, 0.0));
    }
    expr::evaluate(f, std::span<const Jet2>(in), std::span<Jet2>(out));
    return out[0].d.d;
}

}  // namespace

TEST_CASE("arithmetic and multi-component evaluation")
{
    auto f = expr::parse("x1 + x2", 2);
    CHECK(eval1(f, {1, 2}) == doctest::Approx(3.0));

    auto g = expr::parse("x1*x2; x1 - x2", 2);
    Vec out(2);
    expr::evaluate(g, std::span<const double>(Vec{3, 4}), std::span<double>(out));
    CHECK(out[0] == doctest::Approx(12.0));
    CHECK(out[1] == doctest::Approx(-1.0));

    auto h = expr::parse("sin(x1)^2 + cos(x1)^2", 1);
    for (double x : {-2.3, 0.0, 0.7, 11.0})
        CHECK(std::fabs(eval1(h, {x}) - 1.0) < 1e-12);
}

TEST_CASE("precedence and associativity")
{
    CHECK(eval1(expr::parse("2^3^2", 0), {}) == doctest::Approx(512.0));
    CHECK(eval1(expr::parse("-x1^2", 1), {2}) == doctest::Approx(-4.0));
    CHECK(eval1(expr::parse("x1^-2", 1), {2}) == doctest::Approx(0.25));
    CHECK(eval1(expr::parse("1 - 2 - 3", 0), {}) == doctest::Approx(-4.0));
    CHECK(eval1(expr::parse("2*x1^2", 1), {3}) == doctest::Approx(18.0));
    CHECK(eval1(expr::parse("(-2)^3", 0), {}) == doctest::Approx(-8.0));
    CHECK(eval1(expr::parse(" x1\n + 2 ", 1), {1}) == doctest::Approx(3.0));
}

TEST_CASE("named variables")
{
    auto f = expr::parse("a*b; a + b", std::vector<std::string>{"a", "b"});
    Vec out(2);
    expr::evaluate(f, std::span<const double>(Vec{2, 5}), std::span<double>(out));
    CHECK(out[0] == doctest::Approx(10.0));
    CHECK(out[1] == doctest::Approx(7.0));
}

TEST_CASE("first derivatives by seeding")
{
    auto f = expr::parse("x1^2", 1);
    std::vector<Jet1> in{Jet1(3.0, 1.0)}, out(1);
    expr::evaluate(f, std::span<const Jet1>(in), std::span<Jet1>(out));
    CHECK(out[0].v == doctest::Approx(9.0));
    CHECK(out[0].d == doctest::Approx(6.0));

    auto g = expr::parse("exp(x1)", 1);
    in[0] = Jet1(0.0, 1.0);
    expr::evaluate(g, std::span<const Jet1>(in), std::span<Jet1>(out));
    CHECK(out[0].v == doctest::Approx(1.0));
    CHECK(out[0].d == doctest::Approx(1.0));
}

TEST_CASE("mixed second derivative agrees with central differences")
{
    auto f = expr::parse("x1*x2", 2);
    const Vec x{0.37, -1.21};
    const double ad = ad_second(f, x, 0, 1);
    auto realf = [&](const Vec& p) { return eval1(f, p); };
    const double fd = testsupport::fd_second(realf, x, 0, 1, 1e-4);
    CHECK(std::fabs(fd - 1.0) < 1e-6);  // oracle value
    CHECK(std::fabs(ad - fd) < 1e-6);
    CHECK(ad == doctest::Approx(1.0));
}

TEST_CASE("random expressions: AD matches finite differences")
{
    Rng rng(20240811);
    int tested = 0;
    while (tested < 200) {
        const int arity = 1 + static_cast<int>(rng.below(3));
        const std::string text = random_expr_text(rng, arity, 1 + static_cast<int>(rng.below(5)));
        auto f = expr::parse(text, arity);
        auto realf = [&](const Vec& p) { return eval1(f, p); };

        bool usable = true;
        std::vector<Vec> points;
        for (int s = 0; s < 10; ++s) {
            Vec x(arity);
            for (int i = 0; i < arity; ++i) x[i] = rng.uniform(-1.0, 1.0);
            if (std::fabs(realf(x)) > 1e6) { usable = false; break; }
            points.push_back(x);
        }
        if (!usable) continue;
        ++tested;

        for (const Vec& x : points) {
            for (int j = 0; j < arity; ++j) {
                const double ad = ad_partial(f, x, j);
                const double fd = testsupport::fd_partial(realf, x, j, 1e-5);
                const double scale = std::max({1.0, std::fabs(ad), std::fabs(fd)});
                CHECK(std::fabs(ad - fd) / scale < 1e-6);
            }
        }
    }
}

TEST_CASE("random expressions: nested AD matches second-order differences")
{
    Rng rng(77002);
    int tested = 0;
    while (tested < 40) {
        const int arity = 2;
        const std::string text = random_expr_text(rng, arity, 1 + static_cast<int>(rng.below(4)));
        auto f = expr::parse(text, arity);
        auto realf = [&](const Vec& p) { return eval1(f, p); };
        Vec x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        if (std::fabs(realf(x)) > 1e4) continue;
        ++tested;
        for (int i = 0; i < arity; ++i)
            for (int j = 0; j < arity; ++j) {
                const double ad = ad_second(f, x, i, j);
                const double fd = testsupport::fd_second(realf, x, i, j, 1e-4);
                const double scale = std::max({1.0, std::fabs(ad), std::fabs(fd)});
                CHECK(std::fabs(ad - fd) / scale < 1e-4);
            }
    }
}

TEST_CASE("print/parse round-trip")
{
    Rng rng(5150);
    for (int k = 0; k < 60; ++k) {
        const int arity = 1 + static_cast<int>(rng.below(3));
        const std::string text = random_expr_text(rng, arity, 1 + static_cast<int>(rng.below(5)));
        auto f = expr::parse(text, arity);
        const std::string printed = expr::print(f);
        auto g = expr::parse(printed, arity);
        REQUIRE(f.components.size() == g.components.size());
        for (size_t i = 0; i < f.components.size(); ++i)
            CHECK(expr::structurally_equal(f.components[i], g.components[i]));
        for (int s = 0; s < 10; ++s) {
            Vec x(arity);
            for (int i = 0; i < arity; ++i) x[i] = rng.uniform(-1.0, 1.0);
            CHECK(eval1(f, x) == eval1(g, x));  // bitwise identical trees
        }
    }
}

TEST_CASE("parse errors carry position")
{
    CHECK_THROWS_AS(expr::parse("x1 +", 1), ParseError);
    CHECK_THROWS_AS(expr::parse("((x1)", 1), ParseError);
    CHECK_THROWS_AS(expr::parse("y1", 1), ParseError);
    CHECK_THROWS_AS(expr::parse("foo(x1)", 1), ParseError);
    CHECK_THROWS_AS(expr::parse("x3", 2), ParseError);
    try {
        expr::parse("x1 +\n  $", 1);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.col == 3);
    }
}

TEST_CASE("domain errors are loud and located")
{
    auto logf = expr::parse("log(x1)", 1);
    Vec out(1);
    CHECK_THROWS_AS(expr::evaluate(logf, std::span<const double>(Vec{-1.0}), std::span<double>(out)),
                    EvalDomainError);

    auto divf = expr::parse("1/x1", 1);
    CHECK_THROWS_AS(expr::evaluate(divf, std::span<const double>(Vec{0.0}), std::span<double>(out)),
                    EvalDomainError);

    auto sq = expr::parse("sqrt(x1)", 1);
    CHECK_THROWS_AS(expr::evaluate(sq, std::span<const double>(Vec{-2.0}), std::span<double>(out)),
                    EvalDomainError);

    try {
        auto f = expr::parse("x1 +\nlog(x1 - 2)", 1);
        expr::evaluate(f, std::span<const double>(Vec{1.0}), std::span<double>(out));
        FAIL("expected EvalDomainError");
    } catch (const EvalDomainError& e) {
        CHECK(e.line == 2);
    }
}
