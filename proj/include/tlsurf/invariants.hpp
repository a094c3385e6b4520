#ifndef TLSURF_INVARIANTS_HPP
#define TLSURF_INVARIANTS_HPP

#include "tlsurf/fields.hpp"
#include "tlsurf/paracomplex.hpp"

#include <Eigen/Core>

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace tlsurf {

enum class Family { neutral, lorentzian };

std::string_view to_string(Family f);

/**
 * Flat model of the ambient space form. For L0 = 0 the space itself
 * (dim 4); otherwise the quadric <x,x> = 1/L0 in a 5-dimensional
 * pseudo-Euclidean space. Signature slots:
 *
 *   neutral     L0=0 (+,+,-,-)   L0>0 (+,+,+,-,-)   L0<0 (+,+,-,-,-)
 *   lorentzian  L0=0 (+,+,+,-)   L0>0 (+,+,+,+,-)   L0<0 (+,+,+,-,-)
 */
struct AmbientSpec
{
    Family family = Family::neutral;
    double L0 = 0.0;
    int dim = 4;
    std::vector<int> signature{1, 1, -1, -1};

    static AmbientSpec make(Family family, double L0);

    Eigen::VectorXd metric() const;
};

/// First and second fundamental data of a conformal time-like surface on one grid.
struct FundamentalData
{
    AmbientSpec ambient;
    ScalarField lambda, alpha1, alpha2, beta1, beta2, mu1, mu2;

    const Grid& grid() const { return lambda.grid(); }

    /// Named access ("lambda", "alpha1", ..., "mu2"); throws Error on unknown names.
    const ScalarField& field(std::string_view name) const;
    FundamentalData with_field(std::string_view name, ScalarField value) const;
};

/// Throws GridError if the seven fields do not share a grid.
void validate(const FundamentalData& data);

inline constexpr std::array<std::string_view, 7> kFundamentalFieldNames = {
    "lambda", "alpha1", "alpha2", "beta1", "beta2", "mu1", "mu2"};

struct ParacomplexField
{
    Grid grid;
    Array re, im;

    Paracomplexd at(int i, int j) const { return {re(i, j), im(i, j)}; }
};

struct DerivedInvariants
{
    AmbientSpec ambient;
    ScalarField x_plus, x_minus, y_plus, y_minus;
    ScalarField phi_plus, phi_minus, psi_plus, psi_minus;
    ScalarField K;
    ParacomplexField gamma1, gamma2;
};

struct GcrResiduals
{
    ScalarField gauss;
    std::array<ScalarField, 4> codazzi;
    ScalarField ricci;
};

/// Entries of S and T (row-major 5x5) at every gridpoint: the generators of the frame system
/// d/du M = M S, d/dv M = M T for M = (T1 T2 N1 N2 F).
struct FrameCoefficients
{
    Grid grid;
    std::array<Array, 25> S, T;

    Eigen::Matrix<double, 5, 5> S_at(int i, int j) const;
    Eigen::Matrix<double, 5, 5> T_at(int i, int j) const;
};

FrameCoefficients frame_coefficients(const FundamentalData& data);

/// lambda_uu - lambda_vv; equals 2 lambda_st on characteristic grids.
ScalarField wave_operator(const ScalarField& f);

DerivedInvariants derive(const FundamentalData& data);

/// K = -e^{-2 lambda} (lambda_uu - lambda_vv).
ScalarField curvature_K(const FundamentalData& data);

/// Left minus right side of the Gauss, Codazzi and Ricci equations, pointwise.
GcrResiduals gcr_residuals(const FundamentalData& data);

/// || S_v - T_u - (ST - TS) ||_inf at every gridpoint.
ScalarField compatibility_residual(const FundamentalData& data);

/// Coefficient of the quartic differential; neutral ambients only.
ParacomplexField quartic_Q(const FundamentalData& data);

/// max(|a_u - b_v|, |a_v - b_u|) for q = a + j b.
ScalarField paraholomorphy_residual(const ParacomplexField& q);

/// Squared norms of the covariant derivatives of the two twistor lifts:
/// |d_T1 Theta_pm|^2 = Y_pm^2 - X_pm^2, |d_T2 Theta_pm|^2 = X_pm^2 - Y_pm^2.
struct TwistorNorms
{
    ScalarField t1_plus, t2_plus, t1_minus, t2_minus;
};

TwistorNorms twistor_norms(const DerivedInvariants& inv);

// ---------------------------------------------------------------------------
// verdicts

struct Tolerances
{
    /// Absolute tolerance used for every residual and verdict when set.
    std::optional<double> absolute;
    /// Default tolerance is factor * h^2 * max(1, magnitude of the terms involved).
    double factor = 10.0;
    int margin = kResidualMargin;
    CausalTolerance causal;
};

double scaled_tolerance(const Grid& grid, double magnitude, const Tolerances& tol);

struct Verdict
{
    bool holds = false;
    double tolerance = 0.0;
    double attained = 0.0;
};

enum class QStatus { zero, null_nonzero, non_null, mixed };
enum class LiftStatus { zero_or_lightlike, not_lightlike, mixed };

std::string_view to_string(QStatus s);
std::string_view to_string(LiftStatus s);

struct LiftVerdict
{
    LiftStatus status = LiftStatus::mixed;
    double tolerance = 0.0;
    double max_deviation = 0.0; // max |X^2 - Y^2|
    double min_deviation = 0.0; // min |X^2 - Y^2|
};

struct ResidualEntry
{
    double max = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ResidualReport
{
    ResidualEntry gauss;
    std::array<ResidualEntry, 4> codazzi;
    ResidualEntry ricci;
    ResidualEntry compatibility;
    std::optional<ResidualEntry> paraholomorphy;

    double codazzi_max() const;
    bool all_pass() const;
    /// Names of the residuals exceeding their tolerance.
    std::vector<std::string> failing() const;
};

ResidualReport residual_report(const FundamentalData& data, const Tolerances& tol = {});

struct ClassificationReport
{
    Verdict k_equals_L0;
    Verdict normal_flat;
    std::optional<QStatus> q_status;           // neutral only
    std::optional<LiftVerdict> lift_plus;      // neutral only
    std::optional<LiftVerdict> lift_minus;
    double q_max_abs = 0.0;                    // max(|Re q|, |Im q|) over the grid
    ResidualReport residuals;
};

ClassificationReport classify(const FundamentalData& data, const Tolerances& tol = {});

} // namespace tlsurf

#endif // TLSURF_INVARIANTS_HPP
