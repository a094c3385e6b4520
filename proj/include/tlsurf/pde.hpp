#ifndef TLSURF_PDE_HPP
#define TLSURF_PDE_HPP

#include "tlsurf/expr.hpp"
#include "tlsurf/fields.hpp"

#include <utility>

namespace tlsurf {

/// Which right-hand-side terms are kept. Only tests switch terms off.
struct RhsTerms
{
    bool curvature = true; // the L0 term
    bool epsilon = true;   // the epsilon term
};

/**
 * Goursat problem for  lambda_st = -(L0/2) e^{2 lambda} + (eps/2) e^{-2 lambda}
 * on an st-grid, with data on the characteristics s = s0 and t = t0 (the
 * lower edges of the grid). Boundary expressions are over {s,t}; only their
 * restriction to the respective edge is used.
 */
struct GoursatScalarProblem
{
    double L0 = 0.0;
    int epsilon = 1;
    Expr on_s0; // lambda(s0, t)
    Expr on_t0; // lambda(s, t0)
    Grid grid;
    RhsTerms terms;
};

/// (f1)_st = L0 e^{-f1-f2},  (f2)_st = -(eps/2) e^{f1+2 f2}.
struct GoursatSystemProblem
{
    double L0 = 0.0;
    int epsilon = 1;
    Expr f1_on_s0, f1_on_t0;
    Expr f2_on_s0, f2_on_t0;
    Grid grid;
    RhsTerms terms;
};

/// Solutions whose magnitude exceeds this are reported as blow-up.
inline constexpr double kBlowUpBound = 1e8;

/// Corner agreement required of the two boundary expressions.
inline constexpr double kCornerTolerance = 1e-10;

/**
 * Closed-form solution of lambda_uu - lambda_vv + L0 e^{2 lambda} = 0 as an expression in {s,t}:
 *   L0 > 0:  e^{2 lambda} = 2 p'(a s) q'(a t) / (p(a s) - q(a t))^2,  a = sqrt(L0)
 *   L0 < 0:  e^{2 lambda} = 2 p'(a s) q'(a t) / (p(a s) + q(a t))^2,  a = sqrt(-L0)
 *   L0 = 0:  lambda = p(s) + q(t)
 * p and q are expressions in one variable.
 */
Expr liouville_lambda(double L0, const Expr& p, const Expr& q);

/// Samples liouville_lambda on any grid after checking that the denominator neither vanishes nor
/// changes sign (SingularDomainError) and that p'q' > 0 (DomainError).
ScalarField liouville_closed_form(double L0, const Expr& p, const Expr& q, const Grid& grid);

ScalarField goursat_scalar(const GoursatScalarProblem& prob);

std::pair<ScalarField, ScalarField> goursat_system(const GoursatSystemProblem& prob);

/// Finite-difference lambda_st minus the right-hand side, pointwise.
ScalarField goursat_scalar_residual(const GoursatScalarProblem& prob, const ScalarField& lambda);

std::pair<ScalarField, ScalarField> goursat_system_residual(const GoursatSystemProblem& prob,
                                                            const ScalarField& f1, const ScalarField& f2);

} // namespace tlsurf

#endif // TLSURF_PDE_HPP
