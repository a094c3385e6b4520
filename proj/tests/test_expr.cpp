#include "tlsurf/error.hpp"
#include "tlsurf/expr.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

using namespace tlsurf;

namespace {

const std::vector<std::string> kS{"s"};

// Random expression in s whose every subexpression is defined on [-1, 1].
Expr random_expr(std::mt19937_64& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 9 : 1);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    const Expr s = Expr::variable("s", kS);
    switch (pick(rng)) {
        case 0: return Expr(std::round(c(rng) * 100) / 100, kS);
        case 1: return s;
        case 2: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
        case 3: return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
        case 4: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
        case 5: return random_expr(rng, depth - 1) / (2.5 + sin(random_expr(rng, depth - 1)));
        case 6: return sin(random_expr(rng, depth - 1));
        case 7: return exp(0.3 * cos(random_expr(rng, depth - 1)));
        case 8: return sqrt(1.0 + pow(random_expr(rng, depth - 1), 2));
        default: return ln(2.0 + cos(random_expr(rng, depth - 1)));
    }
}

} // namespace

TEST_CASE("parse and evaluate")
{
    const Expr e = parse("sin(2*s)+s^2", kS);
    CHECK(e(0.0) == 0.0);
    CHECK(e(1.5) == doctest::Approx(std::sin(3.0) + 2.25));
    CHECK(eval(parse("exp(ln(x))", {"x"}), {{"x", 2.5}}) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(parse("-2^2", kS)(0.0) == -4.0);
    CHECK(parse("2^-1", kS)(0.0) == 0.5);
    CHECK(parse("2^3^2", kS)(0.0) == 512.0);
    CHECK(parse("1 - 2 - 3", kS)(0.0) == -4.0);
    CHECK(parse("8 / 4 / 2", kS)(0.0) == 1.0);
    CHECK(parse("1.5e2 + .5", kS)(0.0) == 150.5);
    CHECK(parse("sinh(s)*cosh(s)", kS)(0.7) == doctest::Approx(std::sinh(0.7) * std::cosh(0.7)));
    CHECK(parse("u*v", {"u", "v"})(std::vector<double>{3.0, 4.0}) == 12.0);
}

TEST_CASE("syntax errors carry the byte offset")
{
    auto offset = [](const std::string& text) {
        try {
            parse(text, kS);
        } catch (const ParseError& e) {
            return static_cast<long>(e.offset());
        }
        return -1L;
    };
    CHECK(offset("1+") == 2);
    CHECK(offset("(s") == 2);
    CHECK(offset("2s") == 1);
    CHECK(offset("s $ 1") == 2);
    CHECK(offset("") == 0);
    CHECK(offset("sin s") == 4);
    CHECK_THROWS_AS(parse("s^s", kS), ParseError);
}

TEST_CASE("unknown identifiers are named")
{
    try {
        parse("exp(q)", kS);
        FAIL("expected an error");
    } catch (const UnknownIdentifierError& e) {
        CHECK(e.name() == "q");
        CHECK(std::string(e.what()).find("\"q\"") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("foo(s)", kS), UnknownIdentifierError);
}

TEST_CASE("domain errors")
{
    CHECK_THROWS_AS(eval(parse("1/x", {"x"}), {{"x", 0.0}}), DomainError);
    CHECK_THROWS_AS(parse("ln(s)", kS)(0.0), DomainError);
    CHECK_THROWS_AS(parse("ln(s)", kS)(-1.0), DomainError);
    CHECK_THROWS_AS(parse("sqrt(s)", kS)(-1.0), DomainError);
    CHECK_THROWS_AS(parse("s^0.5", kS)(-1.0), DomainError);
    CHECK_THROWS_AS(parse("exp(s)", kS)(1000.0), DomainError);
    CHECK(parse("s^2", kS)(-3.0) == 9.0);
    CHECK(parse("s^-1", kS)(-2.0) == -0.5);
}

TEST_CASE("symbolic derivatives")
{
    CHECK(differentiate(parse("s^2", kS), "s")(3.0) == 6.0);
    CHECK(differentiate(parse("cos(t)", {"t"}), "t")(0.0) == 0.0);
    CHECK(differentiate(parse("u*v^3", {"u", "v"}), "v")(std::vector<double>{2.0, 1.0}) == 6.0);
    CHECK(differentiate(parse("7", kS), "s").is_constant());
    CHECK_THROWS_AS(differentiate(parse("s", kS), "t"), UnknownIdentifierError);
}

TEST_CASE("derivatives agree with central differences on random expressions")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> x(-1.0, 1.0);
    for (int k = 0; k < 30; ++k) {
        const Expr e = random_expr(rng, 4);
        const Expr d = differentiate(e, "s");
        for (int p = 0; p < 20; ++p) {
            const double s = x(rng);
            const double h = 1e-5;
            const double fd = (e(s + h) - e(s - h)) / (2 * h);
            INFO(e.str(), " at s=", s);
            REQUIRE(std::abs(d(s) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("printing round-trips")
{
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> x(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const Expr e = random_expr(rng, 4);
        const Expr back = parse(e.str(), kS);
        for (int p = 0; p < 100; ++p) {
            const double s = x(rng);
            const double a = e(s), b = back(s);
            INFO(e.str());
            REQUIRE(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
        }
    }
    CHECK(parse("(1-s)-(2-s)", kS).str() == "1-s-(2-s)");
    CHECK(parse("-(-s)", kS)(2.0) == 2.0);
}

TEST_CASE("differentiation is linear")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> x(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const Expr f = random_expr(rng, 3), g = random_expr(rng, 3);
        const double a = 1.75, b = -0.5;
        const Expr lhs = differentiate(a * f + b * g, "s");
        const Expr df = differentiate(f, "s"), dg = differentiate(g, "s");
        for (int p = 0; p < 20; ++p) {
            const double s = x(rng);
            const double r = a * df(s) + b * dg(s);
            REQUIRE(std::abs(lhs(s) - r) <= 1e-12 * std::max(1.0, std::abs(r)));
        }
    }
}

TEST_CASE("substitution and rebinding")
{
    const Expr p = parse("x^2 + 1", {"x"});
    const std::vector<std::string> uv{"u", "v"};
    const Expr arg = Expr::variable("u", uv) + Expr::variable("v", uv);
    const Expr composed = substitute(p, {arg});
    CHECK(composed(std::vector<double>{1.0, 2.0}) == 10.0);
    CHECK(differentiate(composed, "v")(std::vector<double>{1.0, 2.0}) == 6.0);

    const Expr r = rebind(parse("s*2", kS), {"u", "s"});
    CHECK(r(std::vector<double>{100.0, 3.0}) == 6.0);
    CHECK_THROWS_AS(rebind(parse("s", kS), {"u"}), UnknownIdentifierError);
    CHECK(parse("3", {"x"}).depends_on("x") == false);
}
