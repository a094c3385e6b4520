#include "support.hpp"

#include "tlsurf/error.hpp"

#include <doctest.h>

#include <functional>

using namespace testing;

namespace {

const AmbientSpec kFlat = AmbientSpec::make(Family::neutral, 0.0);
const AmbientSpec kSphere = AmbientSpec::make(Family::neutral, 1.0);
const AmbientSpec kLorentz = AmbientSpec::make(Family::lorentzian, 0.0);

Expr st(const std::string& text) { return parse(text, kST); }

void check_fields(const FundamentalData& d, const std::map<std::string, double>& expected)
{
    for (std::string_view name : kFundamentalFieldNames) {
        const auto it = expected.find(std::string(name));
        const double want = it == expected.end() ? 0.0 : it->second;
        INFO(name);
        CHECK(max_abs(d.field(name).values() - want) <= 1e-15);
    }
}

double gcr_max(const FundamentalData& d)
{
    const GcrResiduals r = gcr_residuals(d);
    double m = std::max(max_abs(r.gauss.values()), max_abs(r.ricci.values()));
    for (const auto& c : r.codazzi) m = std::max(m, max_abs(c.values()));
    return m;
}

// max residual at n and 2n-1 points per axis
std::pair<double, double> refine(const std::function<FundamentalData(int)>& build, int n)
{
    return {max_residual(residual_report(build(n))), max_residual(residual_report(build(2 * n - 1)))};
}

FundamentalData flat_normal(int n)
{
    const Grid g = st_grid(0, 0.5, 0, 0.5, n);
    const ScalarField lambda = goursat_scalar({1.0, 1, st("0"), st("0"), g, {}});
    SignChoice signs;
    signs.epsilon_prime_minus = -1;
    return build_flat_normal(kSphere, lambda, field("s*t", g), 0.3, signs).data;
}

FundamentalData one_lift(int n)
{
    const Grid g = st_grid(0, 0.5, 0, 0.5, n);
    const auto [f1, f2] = goursat_system({0.0, -1, st("0"), st("0"), st("0"), st("0"), g, {}});
    SignChoice signs;
    signs.epsilon = -1;
    return build_one_lift(kFlat, f1, f2, field("0.2*u", g), signs).data;
}

} // namespace

TEST_CASE("sign choices")
{
    SignChoice s;
    CHECK_NOTHROW(s.validate());
    s.epsilon_prime_minus = 0;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("epsilon_prime_minus"), Error);
}

TEST_CASE("case (i)")
{
    const Grid g = uv_grid(0, 1, 0, 1, 17);
    const ScalarField zero = ScalarField::constant(g, 0.0);
    const FundamentalData d = build_case_i(kFlat, zero, fuv("0"), fx("1"), fx("0"), 1).data;
    check_fields(d, {{"alpha1", 0.5}, {"alpha2", 0.5}, {"beta1", 0.5}, {"beta2", 0.5}});
    CHECK(gcr_max(d) == 0.0);
    const ParacomplexField q = quartic_Q(d);
    CHECK(max_abs(q.re) == 0.0);
    CHECK(max_abs(q.im) == 0.0);

    check_fields(build_case_i(kFlat, zero, fuv("0"), fx("0"), fx("0"), -1).data, {});

    const Grid lg = uv_grid(0, 0.5, 2, 2.5, 129);
    const FundamentalData l = build_case_i(kSphere, field("-ln(v)", lg), fuv("u*v"), fx("1"), fx("1"), 1).data;
    CHECK(residual_report(l).compatibility.pass);
}

TEST_CASE("case (ii)")
{
    const Grid g = uv_grid(0, 1, 0, 1, 17);
    const ScalarField zero = ScalarField::constant(g, 0.0);
    check_fields(build_case_ii(kFlat, zero, fuv("u - v"), fx("0"), fx("0"), 1).data,
                 {{"mu1", 1.0}, {"mu2", -1.0}});
    const FundamentalData d = build_case_ii(kFlat, zero, fuv("0"), fx("1"), fx("0"), 1).data;
    check_fields(d, {{"alpha1", 0.5}, {"alpha2", 0.5}, {"beta1", -0.5}, {"beta2", -0.5}});
    CHECK(max_abs(gcr_residuals(d).gauss.values()) == 0.0);

    const Grid lg = uv_grid(0, 0.5, 2, 2.5, 129);
    const ClassificationReport r = classify(
        build_case_ii(kSphere, field("-ln(v)", lg), fuv("0.3*u*v"), fx("sin(x)"), fx("0.5*cos(x)"), -1).data);
    CHECK(r.k_equals_L0.holds);
    CHECK(r.lift_plus->status == LiftStatus::zero_or_lightlike);
    CHECK(r.lift_minus->status == LiftStatus::zero_or_lightlike);
}

TEST_CASE("flat normal bundle: constant examples")
{
    const Grid g = uv_grid(0, 1, 0, 1, 17);
    const ScalarField zero = ScalarField::constant(g, 0.0);
    const AmbientSpec amb = AmbientSpec::make(Family::neutral, -1.0);
    SignChoice signs;
    signs.epsilon = -1;
    const FundamentalData d = build_flat_normal(amb, zero, zero, 0.0, signs).data;
    check_fields(d, {{"alpha2", 1.0}});
    CHECK(gcr_max(d) == 0.0);
    CHECK(max_abs(curvature_K(d).values()) == 0.0);

    signs.epsilon_prime_minus = -1;
    const FundamentalData e = build_flat_normal(amb, zero, zero, 0.0, signs).data;
    check_fields(e, {{"beta1", 1.0}});
    CHECK(gcr_max(e) == 0.0);
}

TEST_CASE("flat normal bundle: Goursat conformal factor")
{
    const FundamentalData d = flat_normal(129);
    const ClassificationReport r = classify(d);
    CHECK(r.residuals.all_pass());
    CHECK(r.normal_flat.holds);
    CHECK_FALSE(r.k_equals_L0.holds);
    // |X±^2 - Y±^2| = e^R
    const DerivedInvariants inv = derive(d);
    const Array eR = (-2.0 * d.lambda.values()).exp();
    const Array Dp = inv.x_plus.values().square() - inv.y_plus.values().square();
    const Array Dm = inv.x_minus.values().square() - inv.y_minus.values().square();
    CHECK(max_abs(Dp.abs() - eR) <= 1e-12);
    CHECK(max_abs(Dm.abs() - eR) <= 1e-12);
    CHECK(eR.minCoeff() > 0.0);
}

TEST_CASE("one light-like lift")
{
    const FundamentalData d = one_lift(129);
    const DerivedInvariants inv = derive(d);
    CHECK(max_abs(inv.x_minus.values() - inv.y_minus.values()) <= 1e-15);
    CHECK(inv.x_minus.values().abs().minCoeff() > 0.0);
    CHECK(residual_report(d).compatibility.pass);
    const ClassificationReport r = classify(d);
    CHECK(*r.q_status == QStatus::null_nonzero);
    CHECK(r.lift_minus->status == LiftStatus::zero_or_lightlike);
    CHECK(r.lift_plus->status == LiftStatus::not_lightlike);
}

TEST_CASE("Lorentzian ambient")
{
    const Grid g = uv_grid(0, 1, 0, 1, 17);
    const ScalarField zero = ScalarField::constant(g, 0.0);
    const FundamentalData d = build_lorentzian(kLorentz, zero, fuv("0"), fx("2"), 1).data;
    check_fields(d, {{"alpha1", 1.0}, {"alpha2", 1.0}});
    CHECK(gcr_max(d) == 0.0);
    CHECK(max_abs(compatibility_residual(d).values()) == 0.0);
    check_fields(build_lorentzian(kLorentz, zero, fuv("u"), fx("0"), -1).data, {{"mu1", 1.0}});

    const Grid fine = uv_grid(0, 1, 0, 1, 129);
    const FundamentalData w = build_lorentzian(kLorentz, ScalarField::constant(fine, 0.0), fuv("u+v"), fx("1"), 1).data;
    CHECK(residual_report(w).all_pass());
    const Array lhs = w.alpha1.values().square() + w.beta1.values().square();
    const Array rhs = w.alpha2.values().square() + w.beta2.values().square();
    CHECK(max_abs(lhs - rhs) <= 1e-12);
}

TEST_CASE("family mismatches")
{
    const Grid g = uv_grid(0, 1, 0, 1, 9);
    const ScalarField zero = ScalarField::constant(g, 0.0);
    CHECK_THROWS_AS(build_case_i(kLorentz, zero, fuv("0"), fx("1"), fx("0"), 1), FamilyMismatchError);
    CHECK_THROWS_AS(build_case_ii(kLorentz, zero, fuv("0"), fx("1"), fx("0"), 1), FamilyMismatchError);
    CHECK_THROWS_AS(build_flat_normal(kLorentz, zero, zero, 0, {}), FamilyMismatchError);
    CHECK_THROWS_AS(build_one_lift(kLorentz, zero, zero, zero, {}), FamilyMismatchError);
    CHECK_THROWS_AS(build_lorentzian(kFlat, zero, fuv("0"), fx("1"), 1), FamilyMismatchError);
}

TEST_CASE("preconditions are checked")
{
    const Grid g = uv_grid(0, 1, 0, 1, 33);
    try {
        build_case_i(kFlat, field("u^2", g), fuv("0"), fx("1"), fx("0"), 1);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(e.attained() == doctest::Approx(2.0));
    }
    CHECK_THROWS_AS(build_case_ii(kSphere, ScalarField::constant(g, 0.0), fuv("0"), fx("1"), fx("0"), 1),
                    PreconditionError);
    SignChoice signs;
    signs.epsilon = -1;
    CHECK_THROWS_AS(build_flat_normal(kSphere, ScalarField::constant(g, 0.0), ScalarField::constant(g, 0.0), 0, signs),
                    PreconditionError);
    const Grid sg = st_grid(0, 1, 0, 1, 33);
    CHECK_THROWS_AS(build_one_lift(kSphere, ScalarField::constant(sg, 0.0), ScalarField::constant(sg, 0.0),
                                   ScalarField::constant(sg, 0.0), signs),
                    PreconditionError);
    CHECK_THROWS_AS(build_case_i(kFlat, ScalarField::constant(g, 0.0), fuv("0"), parse("u*v", kUV), fx("0"), 1),
                    Error);
    CHECK_THROWS_AS(build_case_i(kFlat, ScalarField::constant(g, 0.0), fuv("0"), fx("1"), fx("0"), 2), Error);
}

TEST_CASE("builder residuals converge at second order")
{
    const AmbientSpec sphere = kSphere;
    const std::vector<std::pair<std::string, std::function<FundamentalData(int)>>> builders = {
        {"case_i",
         [&](int n) {
             const Grid g = uv_grid(0, 0.5, 2, 2.5, n);
             return build_case_i(sphere, field("-ln(v)", g), fuv("0.5*u*v"), fx("cos(x)"), fx("exp(0.2*x)"), -1).data;
         }},
        {"case_ii",
         [&](int n) {
             const Grid g = uv_grid(0, 0.5, 2, 2.5, n);
             return build_case_ii(sphere, field("-ln(v)", g), fuv("0.3*u*v"), fx("sin(x)"), fx("0.5*cos(x)"), 1).data;
         }},
        {"flat_normal", flat_normal},
        {"one_lift", one_lift},
        {"lorentzian",
         [&](int n) {
             const Grid g = uv_grid(0, 1, 0, 1, n);
             return build_lorentzian(kLorentz, ScalarField::constant(g, 0.0), fuv("0.5*u*v"), fx("1 + 0.5*x"), 1).data;
         }},
    };
    for (const auto& [name, build] : builders) {
        const auto [coarse, fine] = refine(build, 65);
        INFO(name, ": ", coarse, " -> ", fine);
        CHECK(fine <= 1e-3);
        CHECK(coarse / fine >= 3.5);
    }
}
