#include "tlsurf/pde.hpp"

#include "tlsurf/error.hpp"

#include <array>
#include <cmath>
#include <string>

namespace tlsurf {

namespace {

const std::vector<std::string> kStVars{"s", "t"};

Expr one_variable(const Expr& f, std::string_view what)
{
    if (f.variables().size() > 1) throw Error(std::string(what) + " must be declared over one variable");
    return f;
}

// f(c * x) with x one of s,t
Expr compose_scaled(const Expr& f, double c, std::string_view x)
{
    const Expr arg = c * Expr::variable(x, kStVars);
    if (f.variables().empty()) return rebind(f, kStVars);
    return substitute(f, std::vector<Expr>(f.variables().size(), arg));
}

Expr derivative(const Expr& f)
{
    for (const auto& name : f.variables())
        if (f.depends_on(name)) return differentiate(f, name);
    return Expr(0.0, f.variables());
}

Array edge_values(const Expr& e, const Grid& g, int axis)
{
    // axis 1: values along the edge t = t0 (index j = 0); axis 2: along s = s0 (i = 0)
    const int n = axis == 1 ? g.n1 : g.n2;
    Array out(n, 1);
    const Expr bound = rebind(e, kStVars);
    for (int k = 0; k < n; ++k) {
        const double st[2] = {axis == 1 ? g.x1(k) : g.min1, axis == 1 ? g.min2 : g.x2(k)};
        try {
            out(k) = bound(std::span<const double>(st, 2));
        } catch (const DomainError& err) {
            throw DomainError(std::string(err.what()) + " on the boundary at s=" + format_double(st[0]) +
                              ", t=" + format_double(st[1]));
        }
    }
    return out;
}

void check_st(const Grid& g)
{
    if (g.kind != CoordKind::st) throw GridError("Goursat problems need a characteristic (s,t) grid");
}

Array boundary_frame(const Expr& on_s0, const Expr& on_t0, const Grid& g, std::string_view name)
{
    check_st(g);
    const Array row = edge_values(on_t0, g, 1);
    const Array col = edge_values(on_s0, g, 2);
    if (std::abs(row(0) - col(0)) > kCornerTolerance)
        throw Error("boundary data for " + std::string(name) + " disagree at the corner: " + format_double(row(0)) +
                    " vs " + format_double(col(0)));
    Array a = Array::Zero(g.n1, g.n2);
    a.col(0) = row.col(0);
    a.row(0) = col.col(0).transpose();
    a(0, 0) = row(0);
    return a;
}

void guard(double value, std::string_view name, int i, int j)
{
    if (!std::isfinite(value) || std::abs(value) > kBlowUpBound)
        throw BlowUpError("solution " + std::string(name) + " blows up at cell (" + std::to_string(i) + "," +
                              std::to_string(j) + ")",
                          i, j);
}

// One characteristic-rectangle sweep for an N-component system with right-hand side rhs(values).
template <std::size_t N, typename Rhs>
void sweep(std::array<Array*, N> f, const Grid& g, Rhs rhs, const std::array<std::string_view, N>& names)
{
    const double area = g.h1() * g.h2();
    using Vec = std::array<double, N>;
    for (int i = 0; i + 1 < g.n1; ++i) {
        for (int j = 0; j + 1 < g.n2; ++j) {
            Vec avg, pred;
            for (std::size_t c = 0; c < N; ++c)
                avg[c] = ((*f[c])(i, j) + (*f[c])(i + 1, j) + (*f[c])(i, j + 1)) / 3.0;
            Vec G = rhs(avg);
            for (std::size_t c = 0; c < N; ++c)
                pred[c] = (*f[c])(i + 1, j) + (*f[c])(i, j + 1) - (*f[c])(i, j) + area * G[c];
            for (std::size_t c = 0; c < N; ++c)
                avg[c] = ((*f[c])(i, j) + (*f[c])(i + 1, j) + (*f[c])(i, j + 1) + pred[c]) / 4.0;
            G = rhs(avg);
            for (std::size_t c = 0; c < N; ++c) {
                const double value = (*f[c])(i + 1, j) + (*f[c])(i, j + 1) - (*f[c])(i, j) + area * G[c];
                guard(value, names[c], i + 1, j + 1);
                (*f[c])(i + 1, j + 1) = value;
            }
        }
    }
}

double scalar_rhs(const GoursatScalarProblem& p, double lambda)
{
    double g = 0.0;
    if (p.terms.curvature) g -= 0.5 * p.L0 * std::exp(2.0 * lambda);
    if (p.terms.epsilon) g += 0.5 * p.epsilon * std::exp(-2.0 * lambda);
    return g;
}

std::array<double, 2> system_rhs(const GoursatSystemProblem& p, double f1, double f2)
{
    return {p.terms.curvature ? p.L0 * std::exp(-f1 - f2) : 0.0,
            p.terms.epsilon ? -0.5 * p.epsilon * std::exp(f1 + 2.0 * f2) : 0.0};
}

void check_sign(int e)
{
    if (e != 1 && e != -1) throw Error("epsilon must be +1 or -1");
}

} // namespace

Expr liouville_lambda(double L0, const Expr& p, const Expr& q)
{
    one_variable(p, "p");
    one_variable(q, "q");
    if (L0 == 0.0) return compose_scaled(p, 1.0, "s") + compose_scaled(q, 1.0, "t");
    const double a = std::sqrt(std::abs(L0));
    const Expr P = compose_scaled(p, a, "s");
    const Expr Q = compose_scaled(q, a, "t");
    const Expr dP = compose_scaled(derivative(p), a, "s");
    const Expr dQ = compose_scaled(derivative(q), a, "t");
    const Expr denom = L0 > 0.0 ? P - Q : P + Q;
    return Expr(0.5, kStVars) * ln(2.0 * dP * dQ) - Expr(0.5, kStVars) * ln(pow(denom, 2.0));
}

ScalarField liouville_closed_form(double L0, const Expr& p, const Expr& q, const Grid& grid)
{
    one_variable(p, "p");
    one_variable(q, "q");
    if (L0 != 0.0) {
        const double a = std::sqrt(std::abs(L0));
        const Expr dp = derivative(p);
        const Expr dq = derivative(q);
        int sign0 = 0;
        for (int i = 0; i < grid.n1; ++i) {
            for (int j = 0; j < grid.n2; ++j) {
                const CharPoint c = grid.st_at(i, j);
                const double P = p(a * c.s), Q = q(a * c.t);
                const double d = L0 > 0.0 ? P - Q : P + Q;
                const int sign = (d > 0.0) - (d < 0.0);
                if (sign == 0 || (sign0 != 0 && sign != sign0))
                    throw SingularDomainError("closed form is singular near gridpoint (" + std::to_string(i) + "," +
                                              std::to_string(j) + ") [s=" + format_double(c.s) +
                                              ", t=" + format_double(c.t) + "]");
                sign0 = sign;
                if (!(dp(a * c.s) * dq(a * c.t) > 0.0))
                    throw DomainError("non-positive e^{2 lambda} (p'q' <= 0) at gridpoint (" + std::to_string(i) +
                                      "," + std::to_string(j) + ")");
            }
        }
    }
    return sample(liouville_lambda(L0, p, q), grid);
}

ScalarField goursat_scalar(const GoursatScalarProblem& prob)
{
    check_sign(prob.epsilon);
    const Grid& g = prob.grid;
    Array lambda = boundary_frame(prob.on_s0, prob.on_t0, g, "lambda");
    sweep<1>({&lambda}, g, [&](const std::array<double, 1>& x) { return std::array<double, 1>{scalar_rhs(prob, x[0])}; },
             {"lambda"});
    return ScalarField(g, std::move(lambda));
}

std::pair<ScalarField, ScalarField> goursat_system(const GoursatSystemProblem& prob)
{
    check_sign(prob.epsilon);
    const Grid& g = prob.grid;
    Array f1 = boundary_frame(prob.f1_on_s0, prob.f1_on_t0, g, "f1");
    Array f2 = boundary_frame(prob.f2_on_s0, prob.f2_on_t0, g, "f2");
    sweep<2>({&f1, &f2}, g, [&](const std::array<double, 2>& x) { return system_rhs(prob, x[0], x[1]); },
             {"f1", "f2"});
    return {ScalarField(g, std::move(f1)), ScalarField(g, std::move(f2))};
}

ScalarField goursat_scalar_residual(const GoursatScalarProblem& prob, const ScalarField& lambda)
{
    const Array lst = partial2(lambda, Coord::s, Coord::t).values();
    return ScalarField(lambda.grid(), lst - lambda.values().unaryExpr([&](double x) { return scalar_rhs(prob, x); }));
}

std::pair<ScalarField, ScalarField> goursat_system_residual(const GoursatSystemProblem& prob, const ScalarField& f1,
                                                            const ScalarField& f2)
{
    const Grid& g = f1.grid();
    const Array a = partial2(f1, Coord::s, Coord::t).values();
    const Array b = partial2(f2, Coord::s, Coord::t).values();
    Array r1(g.n1, g.n2), r2(g.n1, g.n2);
    for (int i = 0; i < g.n1; ++i) {
        for (int j = 0; j < g.n2; ++j) {
            const auto G = system_rhs(prob, f1(i, j), f2(i, j));
            r1(i, j) = a(i, j) - G[0];
            r2(i, j) = b(i, j) - G[1];
        }
    }
    return {ScalarField(g, std::move(r1)), ScalarField(g, std::move(r2))};
}

} // namespace tlsurf
