#ifndef TLSURF_CONSTRUCTORS_HPP
#define TLSURF_CONSTRUCTORS_HPP

#include "tlsurf/expr.hpp"
#include "tlsurf/fields.hpp"
#include "tlsurf/invariants.hpp"

#include <optional>

namespace tlsurf {

/// Sign parameters; every value must be +1 or -1.
struct SignChoice
{
    int epsilon = 1;
    int epsilon_prime_plus = 1;  // flat normal bundle construction
    int epsilon_prime_minus = 1;
    int epsilon_prime = 1;       // one-lift construction
    int epsilon_double_prime = 1;

    /// Throws Error naming the offending sign.
    void validate() const;
};

/// Intermediate fields of the flat-normal and one-lift constructions.
struct ConstructionState
{
    std::optional<ScalarField> P_plus, P_minus, Q_plus, Q_minus, R, P_tilde_minus;
    std::optional<double> c;
};

struct Construction
{
    FundamentalData data;
    ConstructionState state;
};

/**
 * Free functions of one variable (p, q, phi, psi, C) are expressions declared over at most one
 * variable. The gauge gamma is an expression over any of {u,v,s,t}. All fields are produced on
 * the grid of the lambda (or f1) input, which may be a (u,v) or an (s,t) grid.
 *
 * Each builder checks the equation its lambda input must satisfy and throws PreconditionError
 * carrying the attained residual when it exceeds the tolerance.
 */

/// Light-like normal with vanishing shape operator.
Construction build_case_i(const AmbientSpec& ambient, const ScalarField& lambda, const Expr& gamma,
                          const Expr& p_plus, const Expr& p_minus, int epsilon, const Tolerances& tol = {});

/// Shape operators all zero or light-like.
Construction build_case_ii(const AmbientSpec& ambient, const ScalarField& lambda, const Expr& gamma,
                           const Expr& phi, const Expr& psi, int epsilon, const Tolerances& tol = {});

/// Flat normal connection with K != L0; lambda solves wave(lambda) + L0 e^{2 lambda} - eps e^{-2 lambda} = 0.
Construction build_flat_normal(const AmbientSpec& ambient, const ScalarField& lambda, const ScalarField& P_plus,
                               double c, const SignChoice& signs, const Tolerances& tol = {});

/// Exactly one light-like twistor lift; (f1, f2) solve the semilinear characteristic system.
Construction build_one_lift(const AmbientSpec& ambient, const ScalarField& f1, const ScalarField& f2,
                            const ScalarField& P_tilde_minus, const SignChoice& signs, const Tolerances& tol = {});

/// Lorentzian ambient space forms.
Construction build_lorentzian(const AmbientSpec& ambient, const ScalarField& lambda, const Expr& gamma,
                              const Expr& C, int epsilon, const Tolerances& tol = {});

/// max interior |wave(lambda) + L0 e^{2 lambda}| and the tolerance it is held to.
Verdict liouville_check(double L0, const ScalarField& lambda, const Tolerances& tol = {});

} // namespace tlsurf

#endif // TLSURF_CONSTRUCTORS_HPP
