#ifndef TLSURF_FIELDS_HPP
#define TLSURF_FIELDS_HPP

#include "tlsurf/expr.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <iosfwd>
#include <string>

namespace tlsurf {

using Array = Eigen::ArrayXXd;

/// Coordinates of the grid axes: (u,v) or the characteristic pair (s,t).
enum class CoordKind { uv, st };

/// Any of the four coordinates; derivatives in the other pair are taken by the chain rule.
enum class Coord { u, v, s, t };

struct UvPoint
{
    double u = 0.0;
    double v = 0.0;
};

struct CharPoint
{
    double s = 0.0;
    double t = 0.0;
};

/// s = (u+v)/sqrt2, t = (u-v)/sqrt2.
inline CharPoint to_char(UvPoint p)
{
    return {(p.u + p.v) * M_SQRT1_2, (p.u - p.v) * M_SQRT1_2};
}

inline UvPoint to_uv(CharPoint p)
{
    return {(p.s + p.t) * M_SQRT1_2, (p.s - p.t) * M_SQRT1_2};
}

/**
 * Uniform rectangular grid. Index i runs along the first coordinate
 * (u or s), index j along the second (v or t). At least 5 points per axis.
 */
struct Grid
{
    CoordKind kind = CoordKind::uv;
    double min1 = 0.0, max1 = 1.0;
    double min2 = 0.0, max2 = 1.0;
    int n1 = 5, n2 = 5;

    /// Validating constructor; throws GridError.
    static Grid make(CoordKind kind, double min1, double max1, double min2, double max2, int n1, int n2);

    double h1() const { return (max1 - min1) / (n1 - 1); }
    double h2() const { return (max2 - min2) / (n2 - 1); }
    double h() const { return std::max(h1(), h2()); }
    double x1(int i) const { return min1 + i * h1(); }
    double x2(int j) const { return min2 + j * h2(); }

    UvPoint uv_at(int i, int j) const;
    CharPoint st_at(int i, int j) const;

    std::array<std::string, 2> coordinate_names() const
    {
        return kind == CoordKind::uv ? std::array<std::string, 2>{"u", "v"} : std::array<std::string, 2>{"s", "t"};
    }

    /// Same extent with n points per axis.
    Grid refined(int n) const { return make(kind, min1, max1, min2, max2, n, n); }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Grid samples of a real function; every value finite.
class ScalarField
{
public:
    ScalarField(const Grid& grid, Array values);

    static ScalarField constant(const Grid& grid, double value);

    const Grid& grid() const { return grid_; }
    const Array& values() const { return values_; }
    double operator()(int i, int j) const { return values_(i, j); }

private:
    Grid grid_;
    Array values_;
};

/// Second-order differences along a grid axis (1 or 2): central inside, one-sided at the ends.
ScalarField diff(const ScalarField& f, int axis, int order);

/// First derivative with respect to any coordinate.
ScalarField partial(const ScalarField& f, Coord c);

/// Second derivative; mixed axis derivatives are diff(diff(f,1),2).
ScalarField partial2(const ScalarField& f, Coord a, Coord b);

/// Sample an expression whose variables are among {u,v,s,t}; errors carry the gridpoint.
ScalarField sample(const Expr& e, const Grid& grid);

/// Bilinear interpolation at a point in the grid's own coordinates.
double interpolate(const ScalarField& f, double x1, double x2);

/// Resample onto another grid (possibly of the other coordinate kind); every target point
/// must fall inside the source rectangle.
ScalarField resample(const ScalarField& f, const Grid& target);

/// max |a(i,j)| over points at least `margin` indices away from every edge.
double interior_max_abs(const Array& a, int margin);

/// Number of boundary layers excluded from residual maxima. Composed first differences
/// lose an order within two points of an edge.
inline constexpr int kResidualMargin = 2;

/// Rows "u,v,value" (or "s,t,value"), i-major, 17 significant digits.
void write_csv(const ScalarField& f, std::ostream& out);

std::string format_double(double v);

} // namespace tlsurf

#endif // TLSURF_FIELDS_HPP
