#ifndef TLSURF_FRAME_HPP
#define TLSURF_FRAME_HPP

#include "tlsurf/fields.hpp"
#include "tlsurf/invariants.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tlsurf {

using FrameMatrix = Eigen::MatrixXd; // d x 5, columns (T1 T2 N1 N2 F)

/// Frame at every gridpoint. For L0 = 0 the fifth column is the position; otherwise it is the
/// position on the quadric <x,x> = 1/L0.
struct FrameField
{
    Grid grid;
    AmbientSpec ambient;
    std::vector<FrameMatrix> frames; // i-major

    const FrameMatrix& at(int i, int j) const { return frames[static_cast<std::size_t>(i) * grid.n2 + j]; }
    FrameMatrix& at(int i, int j) { return frames[static_cast<std::size_t>(i) * grid.n2 + j]; }
    Eigen::VectorXd position(int i, int j) const { return at(i, j).col(4); }
};

/**
 * Diagonal embedding scaled by e^{lambda0}: T1 and N1 take the first two slots, T2 and N2 the
 * slots whose signs give them the required norms, and for L0 != 0 the position F0 sits in the
 * remaining slot scaled so that <F0,F0> = 1/L0. For L0 = 0 the position is the origin.
 */
FrameMatrix canonical_initial_frame(const AmbientSpec& ambient, double lambda0);

/// Max deviation of the frame's Gram matrix from the one required at a point with conformal factor lambda.
double gram_deviation(const FrameMatrix& m, const AmbientSpec& ambient, double lambda);

/// Initial-frame Gram check at the base point (index (0,0)).
inline constexpr double kInitialGramTolerance = 1e-10;

enum class IntegrationOrder { first_axis_then_second, second_axis_then_first };

/// Coefficients at RK4 half steps: mean of the two neighbours, or the 4-point cubic interpolant.
enum class MidpointRule { linear, cubic };

/**
 * Classical RK4 along the first grid row (generator S on u-grids, (S+T)/sqrt2 on s-grids), then
 * along every column (T, or (S-T)/sqrt2). Midpoint coefficients are linearly interpolated.
 * Without `initial` the canonical frame is used.
 */
FrameField integrate_frame(const FundamentalData& data, const std::optional<FrameMatrix>& initial = std::nullopt,
                           IntegrationOrder order = IntegrationOrder::first_axis_then_second,
                           MidpointRule rule = MidpointRule::linear);

struct FrameResiduals
{
    /// max over gridpoints of ||M_first - M_second||_inf (row-sum norm) between the two integration orders
    double holonomy = 0.0;
    ScalarField gram;                  // pointwise Gram deviation
    ScalarField meanH;                 // max component of F_uu - F_vv + 2 L0 e^{2 lambda} F
    std::optional<ScalarField> sphere; // |<F,F> - 1/L0|, L0 != 0
    ScalarField induced;               // max deviation of the finite-difference induced metric
    double gram_max = 0.0;
    double meanH_max = 0.0;            // interior (finite differences)
    double sphere_max = 0.0;
    double induced_max = 0.0;          // interior
    double meanH_scale = 0.0;          // interior max of |F_uu| + |F_vv| + |2 L0 e^{2 lambda} F|
    double induced_scale = 0.0;        // interior max of e^{2 lambda}
};

/// `rule` must match the one ff was integrated with.
FrameResiduals frame_residuals(const FrameField& ff, const FundamentalData& data, int margin = kResidualMargin,
                               MidpointRule rule = MidpointRule::linear);

/**
 * Writes `path` as CSV "u,v,x1,...,xd" (17 significant digits, i-major) and a sidecar
 * `path` + ".json" holding `sidecar` merged with the ambient, grid and initial frame.
 */
void export_immersion(const FrameField& ff, const std::filesystem::path& path, const std::string& sidecar_json = "{}");

/// Rows of an exported immersion CSV: u, v, x1..xd.
std::vector<std::vector<double>> load_immersion(const std::filesystem::path& path);

} // namespace tlsurf

#endif // TLSURF_FRAME_HPP
