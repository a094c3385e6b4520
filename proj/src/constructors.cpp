#include "tlsurf/constructors.hpp"

#include "tlsurf/error.hpp"

#include <cmath>
#include <string>

namespace tlsurf {

namespace {

const std::vector<std::string> kCoordVars{"u", "v", "s", "t"};

void check_sign(int value, std::string_view name)
{
    if (value != 1 && value != -1) throw Error("sign " + std::string(name) + " must be +1 or -1");
}

void check_one_variable(const Expr& f, std::string_view name)
{
    if (f.variables().size() > 1) throw Error(std::string(name) + " must be declared over one variable");
}

void check_same_grid(const ScalarField& a, const ScalarField& b, std::string_view name)
{
    if (!(a.grid() == b.grid())) throw GridError(std::string(name) + " must live on the grid of the other inputs");
}

// f(u + k v) at every gridpoint
Array sample_along(const Expr& f, const Grid& g, double k)
{
    Array out(g.n1, g.n2);
    for (int i = 0; i < g.n1; ++i) {
        for (int j = 0; j < g.n2; ++j) {
            const UvPoint p = g.uv_at(i, j);
            try {
                out(i, j) = f(p.u + k * p.v);
            } catch (const DomainError& err) {
                throw DomainError(std::string(err.what()) + " at gridpoint (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
            }
        }
    }
    return out;
}

struct Gauge
{
    Array value, du, dv;
};

// gamma and its exact u,v derivatives; s and t enter through the chain rule
Gauge sample_gauge(const Expr& gamma, const Grid& g)
{
    const Expr e = rebind(gamma, kCoordVars);
    const Expr ds = differentiate(e, "s");
    const Expr dt = differentiate(e, "t");
    const Expr du = differentiate(e, "u") + M_SQRT1_2 * (ds + dt);
    const Expr dv = differentiate(e, "v") + M_SQRT1_2 * (ds - dt);
    return Gauge{sample(e, g).values(), sample(du, g).values(), sample(dv, g).values()};
}

void require(const Verdict& v, std::string_view what)
{
    if (!v.holds)
        throw PreconditionError(std::string(what) + ": max residual " + format_double(v.attained) +
                                    " exceeds tolerance " + format_double(v.tolerance),
                                v.attained);
}

Verdict verdict(const Array& residual, const Array& scale, const Grid& g, const Tolerances& tol)
{
    Verdict v;
    v.attained = interior_max_abs(residual, tol.margin);
    v.tolerance = scaled_tolerance(g, interior_max_abs(scale, tol.margin), tol);
    v.holds = v.attained <= v.tolerance;
    return v;
}

void require_family(const AmbientSpec& a, Family f, std::string_view builder)
{
    if (a.family != f)
        throw FamilyMismatchError(std::string(builder) + " needs a " + std::string(to_string(f)) + " ambient");
}

FundamentalData assemble(const AmbientSpec& ambient, const ScalarField& lambda, const Array& a1, const Array& a2,
                         const Array& b1, const Array& b2, const Array& m1, const Array& m2)
{
    const Grid& g = lambda.grid();
    return FundamentalData{ambient,
                           lambda,
                           ScalarField(g, a1),
                           ScalarField(g, a2),
                           ScalarField(g, b1),
                           ScalarField(g, b2),
                           ScalarField(g, m1),
                           ScalarField(g, m2)};
}

struct XY
{
    Array x_plus, y_plus, x_minus, y_minus;
};

FundamentalData from_xy(const AmbientSpec& ambient, const ScalarField& lambda, const XY& xy, const Array& m1,
                        const Array& m2)
{
    const Array a1 = 0.5 * (xy.x_plus + xy.x_minus);
    const Array a2 = 0.5 * (xy.y_plus + xy.y_minus);
    const Array b1 = 0.5 * (xy.y_plus - xy.y_minus);
    const Array b2 = 0.5 * (xy.x_plus - xy.x_minus);
    return assemble(ambient, lambda, a1, a2, b1, b2, m1, m2);
}

} // namespace

void SignChoice::validate() const
{
    check_sign(epsilon, "epsilon");
    check_sign(epsilon_prime_plus, "epsilon_prime_plus");
    check_sign(epsilon_prime_minus, "epsilon_prime_minus");
    check_sign(epsilon_prime, "epsilon_prime");
    check_sign(epsilon_double_prime, "epsilon_double_prime");
}

Verdict liouville_check(double L0, const ScalarField& lambda, const Tolerances& tol)
{
    const Array wave = wave_operator(lambda).values();
    const Array curv = L0 * (2.0 * lambda.values()).exp();
    return verdict(wave + curv, wave.abs() + curv.abs(), lambda.grid(), tol);
}

Construction build_case_i(const AmbientSpec& ambient, const ScalarField& lambda, const Expr& gamma,
                          const Expr& p_plus, const Expr& p_minus, int epsilon, const Tolerances& tol)
{
    require_family(ambient, Family::neutral, "build_case_i");
    check_sign(epsilon, "epsilon");
    check_one_variable(p_plus, "p_plus");
    check_one_variable(p_minus, "p_minus");
    require(liouville_check(ambient.L0, lambda, tol), "lambda does not solve the constant-curvature equation");

    const Grid& g = lambda.grid();
    const Gauge gm = sample_gauge(gamma, g);
    const Array w = (-lambda.values() - epsilon * gm.value).exp();
    const Array pp = sample_along(p_plus, g, 1.0);
    const Array pm = sample_along(p_minus, g, -1.0);
    const Array a1 = 0.5 * (pp + pm) * w;
    const Array a2 = 0.5 * (pp - pm) * w;
    return {assemble(ambient, lambda, a1, a2, epsilon * a1, epsilon * a2, gm.du, gm.dv), {}};
}

Construction build_case_ii(const AmbientSpec& ambient, const ScalarField& lambda, const Expr& gamma,
                           const Expr& phi, const Expr& psi, int epsilon, const Tolerances& tol)
{
    require_family(ambient, Family::neutral, "build_case_ii");
    check_sign(epsilon, "epsilon");
    check_one_variable(phi, "phi");
    check_one_variable(psi, "psi");
    require(liouville_check(ambient.L0, lambda, tol), "lambda does not solve the constant-curvature equation");

    const Grid& g = lambda.grid();
    const Gauge gm = sample_gauge(gamma, g);
    const Array f = sample_along(phi, g, epsilon) * gm.value.exp();
    const Array h = sample_along(psi, g, epsilon) * (-gm.value).exp();
    const Array w = 0.5 * (-lambda.values()).exp();
    const Array a1 = w * (f + h);
    const Array b1 = -w * (f - h);
    return {assemble(ambient, lambda, a1, epsilon * a1, b1, epsilon * b1, gm.du, gm.dv), {}};
}

Construction build_flat_normal(const AmbientSpec& ambient, const ScalarField& lambda, const ScalarField& P_plus,
                               double c, const SignChoice& signs, const Tolerances& tol)
{
    require_family(ambient, Family::neutral, "build_flat_normal");
    signs.validate();
    check_same_grid(lambda, P_plus, "P_plus");
    if (!std::isfinite(c)) throw Error("c must be finite");
    const Grid& g = lambda.grid();
    const double eps = signs.epsilon;

    const Array wave = wave_operator(lambda).values();
    const Array curv = ambient.L0 * (2.0 * lambda.values()).exp();
    const Array eterm = eps * (-2.0 * lambda.values()).exp();
    require(verdict(wave + curv - eterm, wave.abs() + curv.abs() + eterm.abs(), g, tol),
            "lambda does not solve the flat-normal lambda equation");

    const Array R = -2.0 * lambda.values();
    const Array& Pp = P_plus.values();
    const Array Pm = R - Pp - c;
    const Array Qp = R - Pp;
    const Array Qm = Pp + c;

    const Array dQs = partial(ScalarField(g, Qp - Qm), Coord::s).values();
    const Array dPt = partial(ScalarField(g, Pp - Pm), Coord::t).values();
    const double k = 0.5 * M_SQRT1_2;
    const Array m1 = k * (dQs - dPt);
    const Array m2 = k * (dQs + dPt);

    const double ep = 0.5 * signs.epsilon_prime_plus;
    const double em = 0.5 * signs.epsilon_prime_minus;
    const XY xy{ep * (Pp.exp() + eps * Qp.exp()), ep * (Pp.exp() - eps * Qp.exp()),
                em * (Pm.exp() + eps * Qm.exp()), em * (Pm.exp() - eps * Qm.exp())};

    ConstructionState st;
    st.P_plus = P_plus;
    st.P_minus = ScalarField(g, Pm);
    st.Q_plus = ScalarField(g, Qp);
    st.Q_minus = ScalarField(g, Qm);
    st.R = ScalarField(g, R);
    st.c = c;
    return {from_xy(ambient, lambda, xy, m1, m2), std::move(st)};
}

Construction build_one_lift(const AmbientSpec& ambient, const ScalarField& f1, const ScalarField& f2,
                            const ScalarField& P_tilde_minus, const SignChoice& signs, const Tolerances& tol)
{
    require_family(ambient, Family::neutral, "build_one_lift");
    signs.validate();
    check_same_grid(f1, f2, "f2");
    check_same_grid(f1, P_tilde_minus, "P_tilde_minus");
    const Grid& g = f1.grid();
    const double eps = signs.epsilon;

    const Array e1 = ambient.L0 * (-f1.values() - f2.values()).exp();
    const Array e2 = -0.5 * eps * (f1.values() + 2.0 * f2.values()).exp();
    const Array f1st = partial2(f1, Coord::s, Coord::t).values();
    const Array f2st = partial2(f2, Coord::s, Coord::t).values();
    require(verdict(f1st - e1, f1st.abs() + e1.abs(), g, tol), "f1 does not solve its characteristic equation");
    require(verdict(f2st - e2, f2st.abs() + e2.abs(), g, tol), "f2 does not solve its characteristic equation");

    const Array& Pt = P_tilde_minus.values();
    const Array Qp = f2.values() + Pt;
    const Array Pp = f1.values() + f2.values() - Pt;
    const ScalarField lambda(g, -0.5 * (Pp + Pt));

    const ScalarField P(g, Pp), Q(g, Qp);
    const Array Qs = M_SQRT1_2 * partial(Q, Coord::s).values();
    const Array m1 = -0.5 * partial(P, Coord::u).values() + Qs - 0.5 * partial(P_tilde_minus, Coord::v).values();
    const Array m2 = -0.5 * partial(P, Coord::v).values() + Qs - 0.5 * partial(P_tilde_minus, Coord::u).values();

    const double ep = 0.5 * signs.epsilon_prime;
    const Array xm = 0.5 * signs.epsilon_double_prime * Pt.exp();
    const XY xy{ep * (Pp.exp() + eps * Qp.exp()), ep * (Pp.exp() - eps * Qp.exp()), xm, xm};

    ConstructionState st;
    st.P_plus = P;
    st.Q_plus = Q;
    st.P_tilde_minus = P_tilde_minus;
    return {from_xy(ambient, lambda, xy, m1, m2), std::move(st)};
}

Construction build_lorentzian(const AmbientSpec& ambient, const ScalarField& lambda, const Expr& gamma,
                              const Expr& C, int epsilon, const Tolerances& tol)
{
    require_family(ambient, Family::lorentzian, "build_lorentzian");
    check_sign(epsilon, "epsilon");
    check_one_variable(C, "C");
    require(liouville_check(ambient.L0, lambda, tol), "lambda does not solve the constant-curvature equation");

    const Grid& g = lambda.grid();
    const Gauge gm = sample_gauge(gamma, g);
    const Array w = 0.5 * sample_along(C, g, epsilon) * (-lambda.values()).exp();
    const Array a1 = w * gm.value.cos();
    const Array b1 = -w * gm.value.sin();
    return {assemble(ambient, lambda, a1, epsilon * a1, b1, epsilon * b1, gm.du, gm.dv), {}};
}

} // namespace tlsurf
