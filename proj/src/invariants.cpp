#include "tlsurf/invariants.hpp"

#include "tlsurf/error.hpp"

#include <string>

namespace tlsurf {

namespace {

using Mat5 = Eigen::Matrix<double, 5, 5>;

struct Gcr
{
    GcrResiduals residual;
    // sums of absolute values of the terms of each equation, for tolerance scaling
    Array gauss_scale;
    std::array<Array, 4> codazzi_scale;
    Array ricci_scale;
};

Gcr compute_gcr(const FundamentalData& d)
{
    validate(d);
    const double sg = d.ambient.family == Family::neutral ? 1.0 : -1.0;
    const Array& a1 = d.alpha1.values();
    const Array& a2 = d.alpha2.values();
    const Array& b1 = d.beta1.values();
    const Array& b2 = d.beta2.values();
    const Array& m1 = d.mu1.values();
    const Array& m2 = d.mu2.values();
    const Array lu = partial(d.lambda, Coord::u).values();
    const Array lv = partial(d.lambda, Coord::v).values();
    const Array wave = wave_operator(d.lambda).values();
    const Array curv = d.ambient.L0 * (2.0 * d.lambda.values()).exp();

    const Array a1u = partial(d.alpha1, Coord::u).values(), a1v = partial(d.alpha1, Coord::v).values();
    const Array a2u = partial(d.alpha2, Coord::u).values(), a2v = partial(d.alpha2, Coord::v).values();
    const Array b1u = partial(d.beta1, Coord::u).values(), b1v = partial(d.beta1, Coord::v).values();
    const Array b2u = partial(d.beta2, Coord::u).values(), b2v = partial(d.beta2, Coord::v).values();
    const Array m1v = partial(d.mu1, Coord::v).values();
    const Array m2u = partial(d.mu2, Coord::u).values();

    const Grid& g = d.grid();
    // neutral: a1^2 - a2^2 - (b1^2 - b2^2); lorentzian: a1^2 - a2^2 + (b1^2 - b2^2)
    const Array gauss = wave + curv - (a1.square() - a2.square() - sg * (b1.square() - b2.square()));
    const Array gauss_scale = wave.abs() + curv.abs() + a1.square() + a2.square() + b1.square() + b2.square();

    std::array<Array, 4> terms_rhs = {
        a2 * lu - a1 * lv + sg * (b2 * m1 - b1 * m2),
        a1 * lu - a2 * lv + sg * (b1 * m1 - b2 * m2),
        b2 * lu - b1 * lv + a2 * m1 - a1 * m2,
        b1 * lu - b2 * lv + a1 * m1 - a2 * m2,
    };
    std::array<Array, 4> terms_lhs = {a1v - a2u, a2v - a1u, b1v - b2u, b2v - b1u};
    std::array<Array, 4> codazzi_scale = {
        a1v.abs() + a2u.abs() + (a2 * lu).abs() + (a1 * lv).abs() + (b2 * m1).abs() + (b1 * m2).abs(),
        a2v.abs() + a1u.abs() + (a1 * lu).abs() + (a2 * lv).abs() + (b1 * m1).abs() + (b2 * m2).abs(),
        b1v.abs() + b2u.abs() + (b2 * lu).abs() + (b1 * lv).abs() + (a2 * m1).abs() + (a1 * m2).abs(),
        b2v.abs() + b1u.abs() + (b1 * lu).abs() + (b2 * lv).abs() + (a1 * m1).abs() + (a2 * m2).abs(),
    };

    const Array ricci = m1v - m2u - 2.0 * (a1 * b2 - a2 * b1);
    const Array ricci_scale = m1v.abs() + m2u.abs() + 2.0 * ((a1 * b2).abs() + (a2 * b1).abs());

    return Gcr{
        GcrResiduals{
            ScalarField(g, gauss),
            {ScalarField(g, terms_lhs[0] - terms_rhs[0]), ScalarField(g, terms_lhs[1] - terms_rhs[1]),
             ScalarField(g, terms_lhs[2] - terms_rhs[2]), ScalarField(g, terms_lhs[3] - terms_rhs[3])},
            ScalarField(g, ricci),
        },
        gauss_scale,
        codazzi_scale,
        ricci_scale,
    };
}

struct Compatibility
{
    Array residual;
    Array scale;
};

Compatibility compute_compatibility(const FundamentalData& d)
{
    const FrameCoefficients c = frame_coefficients(d);
    const Grid& g = d.grid();
    std::array<Array, 25> Sv, Tu;
    for (int k = 0; k < 25; ++k) {
        Sv[k] = partial(ScalarField(g, c.S[k]), Coord::v).values();
        Tu[k] = partial(ScalarField(g, c.T[k]), Coord::u).values();
    }
    Compatibility out{Array(g.n1, g.n2), Array(g.n1, g.n2)};
    for (int i = 0; i < g.n1; ++i) {
        for (int j = 0; j < g.n2; ++j) {
            Mat5 sv, tu;
            for (int k = 0; k < 25; ++k) {
                sv(k / 5, k % 5) = Sv[k](i, j);
                tu(k / 5, k % 5) = Tu[k](i, j);
            }
            const Mat5 S = c.S_at(i, j);
            const Mat5 T = c.T_at(i, j);
            const Mat5 ST = S * T;
            const Mat5 TS = T * S;
            out.residual(i, j) = (sv - tu - (ST - TS)).cwiseAbs().maxCoeff();
            out.scale(i, j) = (sv.cwiseAbs() + tu.cwiseAbs() + ST.cwiseAbs() + TS.cwiseAbs()).maxCoeff();
        }
    }
    return out;
}

void require_neutral(const AmbientSpec& a, std::string_view what)
{
    if (a.family != Family::neutral)
        throw FamilyMismatchError(std::string(what) + " is defined for neutral ambient space forms only");
}

ResidualEntry make_entry(const Array& residual, const Array& scale, const Grid& g, const Tolerances& tol)
{
    ResidualEntry e;
    e.max = interior_max_abs(residual, tol.margin);
    e.tolerance = scaled_tolerance(g, interior_max_abs(scale, tol.margin), tol);
    e.pass = e.max <= e.tolerance;
    return e;
}

LiftVerdict lift_verdict(const ScalarField& x, const ScalarField& y, const Tolerances& tol)
{
    const Array dev = (x.values().square() - y.values().square()).abs();
    const double magnitude = (x.values().square() + y.values().square()).maxCoeff();
    LiftVerdict v;
    v.tolerance = scaled_tolerance(x.grid(), magnitude, tol);
    v.max_deviation = dev.maxCoeff();
    v.min_deviation = dev.minCoeff();
    if (v.max_deviation <= v.tolerance) v.status = LiftStatus::zero_or_lightlike;
    else if (v.min_deviation > v.tolerance) v.status = LiftStatus::not_lightlike;
    else v.status = LiftStatus::mixed;
    return v;
}

QStatus q_status(const ParacomplexField& q, const CausalTolerance& causal)
{
    bool any_zero = false, any_null = false, any_non_null = false;
    for (int i = 0; i < q.grid.n1; ++i) {
        for (int j = 0; j < q.grid.n2; ++j) {
            switch (classify(q.at(i, j), causal)) {
                case CausalClass::zero: any_zero = true; break;
                case CausalClass::null_nonzero: any_null = true; break;
                default: any_non_null = true; break;
            }
        }
    }
    if (any_non_null) return (any_zero || any_null) ? QStatus::mixed : QStatus::non_null;
    return any_null ? QStatus::null_nonzero : QStatus::zero;
}

} // namespace

std::string_view to_string(Family f) { return f == Family::neutral ? "neutral" : "lorentzian"; }

std::string_view to_string(QStatus s)
{
    switch (s) {
        case QStatus::zero: return "zero";
        case QStatus::null_nonzero: return "null_nonzero";
        case QStatus::non_null: return "non_null";
        case QStatus::mixed: return "mixed";
    }
    return "?";
}

std::string_view to_string(LiftStatus s)
{
    switch (s) {
        case LiftStatus::zero_or_lightlike: return "zero_or_lightlike";
        case LiftStatus::not_lightlike: return "not";
        case LiftStatus::mixed: return "mixed";
    }
    return "?";
}

AmbientSpec AmbientSpec::make(Family family, double L0)
{
    if (!std::isfinite(L0)) throw Error("L0 must be finite");
    AmbientSpec a;
    a.family = family;
    a.L0 = L0;
    if (family == Family::neutral) {
        if (L0 == 0.0) a.signature = {1, 1, -1, -1};
        else if (L0 > 0.0) a.signature = {1, 1, 1, -1, -1};
        else a.signature = {1, 1, -1, -1, -1};
    } else {
        if (L0 == 0.0) a.signature = {1, 1, 1, -1};
        else if (L0 > 0.0) a.signature = {1, 1, 1, 1, -1};
        else a.signature = {1, 1, 1, -1, -1};
    }
    a.dim = static_cast<int>(a.signature.size());
    return a;
}

Eigen::VectorXd AmbientSpec::metric() const
{
    Eigen::VectorXd m(dim);
    for (int k = 0; k < dim; ++k) m(k) = signature[static_cast<std::size_t>(k)];
    return m;
}

const ScalarField& FundamentalData::field(std::string_view name) const
{
    if (name == "lambda") return lambda;
    if (name == "alpha1") return alpha1;
    if (name == "alpha2") return alpha2;
    if (name == "beta1") return beta1;
    if (name == "beta2") return beta2;
    if (name == "mu1") return mu1;
    if (name == "mu2") return mu2;
    throw Error("unknown fundamental field \"" + std::string(name) + "\"");
}

FundamentalData FundamentalData::with_field(std::string_view name, ScalarField value) const
{
    FundamentalData out = *this;
    if (name == "lambda") out.lambda = std::move(value);
    else if (name == "alpha1") out.alpha1 = std::move(value);
    else if (name == "alpha2") out.alpha2 = std::move(value);
    else if (name == "beta1") out.beta1 = std::move(value);
    else if (name == "beta2") out.beta2 = std::move(value);
    else if (name == "mu1") out.mu1 = std::move(value);
    else if (name == "mu2") out.mu2 = std::move(value);
    else throw Error("unknown fundamental field \"" + std::string(name) + "\"");
    validate(out);
    return out;
}

void validate(const FundamentalData& d)
{
    const Grid& g = d.lambda.grid();
    for (const auto* f : {&d.alpha1, &d.alpha2, &d.beta1, &d.beta2, &d.mu1, &d.mu2})
        if (!(f->grid() == g)) throw GridError("fundamental data fields must share one grid");
}

Eigen::Matrix<double, 5, 5> FrameCoefficients::S_at(int i, int j) const
{
    Mat5 m;
    for (int k = 0; k < 25; ++k) m(k / 5, k % 5) = S[k](i, j);
    return m;
}

Eigen::Matrix<double, 5, 5> FrameCoefficients::T_at(int i, int j) const
{
    Mat5 m;
    for (int k = 0; k < 25; ++k) m(k / 5, k % 5) = T[k](i, j);
    return m;
}

FrameCoefficients frame_coefficients(const FundamentalData& d)
{
    validate(d);
    const Grid& g = d.grid();
    const double sg = d.ambient.family == Family::neutral ? 1.0 : -1.0;
    const Array lu = partial(d.lambda, Coord::u).values();
    const Array lv = partial(d.lambda, Coord::v).values();
    const Array curv = d.ambient.L0 * (2.0 * d.lambda.values()).exp();
    const Array& a1 = d.alpha1.values();
    const Array& a2 = d.alpha2.values();
    const Array& b1 = d.beta1.values();
    const Array& b2 = d.beta2.values();
    const Array& m1 = d.mu1.values();
    const Array& m2 = d.mu2.values();
    const Array zero = Array::Zero(g.n1, g.n2);
    const Array one = Array::Ones(g.n1, g.n2);

    FrameCoefficients c;
    c.grid = g;
    c.S = {
        lu,     lv,   -a1, sg * b1,  one,
        lv,     lu,    a2, -sg * b2, zero,
        a1,     a2,    lu, sg * m1,  zero,
        b1,     b2,    m1, lu,       zero,
        -curv,  zero, zero, zero,    zero,
    };
    c.T = {
        lv,   lu,    -a2, sg * b2,  zero,
        lu,   lv,     a1, -sg * b1, one,
        a2,   a1,     lv, sg * m2,  zero,
        b2,   b1,     m2, lv,       zero,
        zero, curv, zero, zero,     zero,
    };
    return c;
}

ScalarField wave_operator(const ScalarField& f)
{
    if (f.grid().kind == CoordKind::st) {
        ScalarField mixed = diff(diff(f, 1, 1), 2, 1);
        return ScalarField(f.grid(), 2.0 * mixed.values());
    }
    return ScalarField(f.grid(), diff(f, 1, 2).values() - diff(f, 2, 2).values());
}

DerivedInvariants derive(const FundamentalData& d)
{
    validate(d);
    const Grid& g = d.grid();
    const Array lu = partial(d.lambda, Coord::u).values();
    const Array lv = partial(d.lambda, Coord::v).values();
    const Array& a1 = d.alpha1.values();
    const Array& a2 = d.alpha2.values();
    const Array& b1 = d.beta1.values();
    const Array& b2 = d.beta2.values();
    return DerivedInvariants{
        d.ambient,
        ScalarField(g, a1 + b2),
        ScalarField(g, a1 - b2),
        ScalarField(g, a2 + b1),
        ScalarField(g, a2 - b1),
        ScalarField(g, lu - d.mu2.values()),
        ScalarField(g, lu + d.mu2.values()),
        ScalarField(g, lv - d.mu1.values()),
        ScalarField(g, lv + d.mu1.values()),
        curvature_K(d),
        ParacomplexField{g, a1, b1},
        ParacomplexField{g, a2, b2},
    };
}

ScalarField curvature_K(const FundamentalData& d)
{
    const Array w = wave_operator(d.lambda).values();
    return ScalarField(d.grid(), -(-2.0 * d.lambda.values()).exp() * w);
}

GcrResiduals gcr_residuals(const FundamentalData& d) { return compute_gcr(d).residual; }

ScalarField compatibility_residual(const FundamentalData& d)
{
    return ScalarField(d.grid(), compute_compatibility(d).residual);
}

ParacomplexField quartic_Q(const FundamentalData& d)
{
    validate(d);
    require_neutral(d.ambient, "the quartic differential");
    const Array& a1 = d.alpha1.values();
    const Array& a2 = d.alpha2.values();
    const Array& b1 = d.beta1.values();
    const Array& b2 = d.beta2.values();
    const Array w = 0.25 * (2.0 * d.lambda.values()).exp();
    const Array n1 = (a1 - b1) * (a1 + b1);
    const Array n2 = (a2 - b2) * (a2 + b2);
    return ParacomplexField{d.grid(), w * (n1 + n2), w * 2.0 * (a1 * a2 - b1 * b2)};
}

ScalarField paraholomorphy_residual(const ParacomplexField& q)
{
    const ScalarField a(q.grid, q.re);
    const ScalarField b(q.grid, q.im);
    const Array r1 = (partial(a, Coord::u).values() - partial(b, Coord::v).values()).abs();
    const Array r2 = (partial(a, Coord::v).values() - partial(b, Coord::u).values()).abs();
    return ScalarField(q.grid, r1.max(r2));
}

TwistorNorms twistor_norms(const DerivedInvariants& inv)
{
    require_neutral(inv.ambient, "the twistor lift norms");
    const Grid& g = inv.x_plus.grid();
    const Array dp = inv.x_plus.values().square() - inv.y_plus.values().square();
    const Array dm = inv.x_minus.values().square() - inv.y_minus.values().square();
    return TwistorNorms{ScalarField(g, -dp), ScalarField(g, dp), ScalarField(g, -dm), ScalarField(g, dm)};
}

double scaled_tolerance(const Grid& grid, double magnitude, const Tolerances& tol)
{
    if (tol.absolute) return *tol.absolute;
    const double h = grid.h();
    return tol.factor * h * h * std::max(1.0, magnitude);
}

double ResidualReport::codazzi_max() const
{
    double m = 0.0;
    for (const auto& c : codazzi) m = std::max(m, c.max);
    return m;
}

bool ResidualReport::all_pass() const { return failing().empty(); }

std::vector<std::string> ResidualReport::failing() const
{
    std::vector<std::string> out;
    if (!gauss.pass) out.push_back("gauss");
    for (int k = 0; k < 4; ++k)
        if (!codazzi[static_cast<std::size_t>(k)].pass) out.push_back("codazzi" + std::to_string(k + 1));
    if (!ricci.pass) out.push_back("ricci");
    if (!compatibility.pass) out.push_back("compatibility");
    if (paraholomorphy && !paraholomorphy->pass) out.push_back("paraholomorphy");
    return out;
}

ResidualReport residual_report(const FundamentalData& d, const Tolerances& tol)
{
    const Gcr gcr = compute_gcr(d);
    const Compatibility comp = compute_compatibility(d);
    const Grid& g = d.grid();
    ResidualReport r;
    r.gauss = make_entry(gcr.residual.gauss.values(), gcr.gauss_scale, g, tol);
    for (std::size_t k = 0; k < 4; ++k)
        r.codazzi[k] = make_entry(gcr.residual.codazzi[k].values(), gcr.codazzi_scale[k], g, tol);
    r.ricci = make_entry(gcr.residual.ricci.values(), gcr.ricci_scale, g, tol);
    r.compatibility = make_entry(comp.residual, comp.scale, g, tol);
    if (d.ambient.family == Family::neutral) {
        const ParacomplexField q = quartic_Q(d);
        const ScalarField a(g, q.re), b(g, q.im);
        const Array scale = partial(a, Coord::u).values().abs() + partial(a, Coord::v).values().abs() +
                            partial(b, Coord::u).values().abs() + partial(b, Coord::v).values().abs();
        r.paraholomorphy = make_entry(paraholomorphy_residual(q).values(), scale, g, tol);
    }
    return r;
}

ClassificationReport classify(const FundamentalData& d, const Tolerances& tol)
{
    validate(d);
    const Grid& g = d.grid();
    ClassificationReport rep;

    const Array K = curvature_K(d).values();
    rep.k_equals_L0.attained = interior_max_abs(K - d.ambient.L0, tol.margin);
    rep.k_equals_L0.tolerance =
        scaled_tolerance(g, interior_max_abs(K, tol.margin) + std::abs(d.ambient.L0), tol);
    rep.k_equals_L0.holds = rep.k_equals_L0.attained <= rep.k_equals_L0.tolerance;

    const Array m1v = partial(d.mu1, Coord::v).values();
    const Array m2u = partial(d.mu2, Coord::u).values();
    rep.normal_flat.attained = interior_max_abs(m1v - m2u, tol.margin);
    rep.normal_flat.tolerance = scaled_tolerance(g, interior_max_abs(m1v.abs() + m2u.abs(), tol.margin), tol);
    rep.normal_flat.holds = rep.normal_flat.attained <= rep.normal_flat.tolerance;

    if (d.ambient.family == Family::neutral) {
        const DerivedInvariants inv = derive(d);
        const ParacomplexField q = quartic_Q(d);
        rep.q_status = q_status(q, tol.causal);
        rep.q_max_abs = std::max(q.re.abs().maxCoeff(), q.im.abs().maxCoeff());
        rep.lift_plus = lift_verdict(inv.x_plus, inv.y_plus, tol);
        rep.lift_minus = lift_verdict(inv.x_minus, inv.y_minus, tol);
    }
    rep.residuals = residual_report(d, tol);
    return rep;
}

} // namespace tlsurf
