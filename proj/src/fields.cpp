#include "tlsurf/fields.hpp"

#include "tlsurf/error.hpp"

#include <cstdio>
#include <ostream>
#include <utility>

namespace tlsurf {

namespace {

// Applies a 1-D stencil along one axis; `at(k)` reads sample k of the current line.
// Stencils are written in consecutive differences so constants differentiate to exactly zero.
template <typename Read>
double first_difference(Read at, int k, int n, double h)
{
    if (k == 0) return (3.0 * (at(1) - at(0)) - (at(2) - at(1))) / (2.0 * h);
    if (k == n - 1) return (3.0 * (at(n - 1) - at(n - 2)) - (at(n - 2) - at(n - 3))) / (2.0 * h);
    return (at(k + 1) - at(k - 1)) / (2.0 * h);
}

template <typename Read>
double second_difference(Read at, int k, int n, double h)
{
    const double h2 = h * h;
    auto edge = [&](int e0, int step) {
        const double d1 = at(e0 + step) - at(e0);
        const double d2 = at(e0 + 2 * step) - at(e0 + step);
        const double d3 = at(e0 + 3 * step) - at(e0 + 2 * step);
        return (2.0 * (d2 - d1) - (d3 - d2)) / h2;
    };
    if (k == 0) return edge(0, 1);
    if (k == n - 1) return edge(n - 1, -1);
    return ((at(k + 1) - at(k)) - (at(k) - at(k - 1))) / h2;
}

Array diff_array(const Array& a, const Grid& g, int axis, int order)
{
    Array out(a.rows(), a.cols());
    if (axis == 1) {
        const double h = g.h1();
        for (int j = 0; j < g.n2; ++j) {
            auto at = [&](int k) { return a(k, j); };
            for (int i = 0; i < g.n1; ++i)
                out(i, j) = order == 1 ? first_difference(at, i, g.n1, h) : second_difference(at, i, g.n1, h);
        }
    } else {
        const double h = g.h2();
        for (int i = 0; i < g.n1; ++i) {
            auto at = [&](int k) { return a(i, k); };
            for (int j = 0; j < g.n2; ++j)
                out(i, j) = order == 1 ? first_difference(at, j, g.n2, h) : second_difference(at, j, g.n2, h);
        }
    }
    return out;
}

// Weights of d/dc in terms of the two grid-axis derivatives.
std::pair<double, double> axis_weights(CoordKind kind, Coord c)
{
    const bool native = (kind == CoordKind::uv) == (c == Coord::u || c == Coord::v);
    if (native) {
        const bool first = c == Coord::u || c == Coord::s;
        return first ? std::pair{1.0, 0.0} : std::pair{0.0, 1.0};
    }
    // d/du = (d/ds + d/dt)/sqrt2, d/dv = (d/ds - d/dt)/sqrt2 and symmetrically for s,t
    const bool first = c == Coord::u || c == Coord::s;
    return first ? std::pair{M_SQRT1_2, M_SQRT1_2} : std::pair{M_SQRT1_2, -M_SQRT1_2};
}

std::string point_label(const Grid& g, int i, int j)
{
    const auto names = g.coordinate_names();
    return "gridpoint (" + std::to_string(i) + "," + std::to_string(j) + ") [" + names[0] + "=" +
           format_double(g.x1(i)) + ", " + names[1] + "=" + format_double(g.x2(j)) + "]";
}

} // namespace

Grid Grid::make(CoordKind kind, double min1, double max1, double min2, double max2, int n1, int n2)
{
    if (n1 < 5 || n2 < 5) throw GridError("grid needs at least 5 points per axis");
    if (!(max1 > min1) || !(max2 > min2)) throw GridError("grid extent must satisfy max > min on both axes");
    if (!std::isfinite(min1) || !std::isfinite(max1) || !std::isfinite(min2) || !std::isfinite(max2))
        throw GridError("grid extent must be finite");
    return Grid{kind, min1, max1, min2, max2, n1, n2};
}

UvPoint Grid::uv_at(int i, int j) const
{
    if (kind == CoordKind::uv) return {x1(i), x2(j)};
    return to_uv({x1(i), x2(j)});
}

CharPoint Grid::st_at(int i, int j) const
{
    if (kind == CoordKind::st) return {x1(i), x2(j)};
    return to_char({x1(i), x2(j)});
}

ScalarField::ScalarField(const Grid& grid, Array values) : grid_(grid), values_(std::move(values))
{
    if (values_.rows() != grid_.n1 || values_.cols() != grid_.n2) throw GridError("field shape does not match grid");
    if (!values_.allFinite()) {
        for (int i = 0; i < grid_.n1; ++i)
            for (int j = 0; j < grid_.n2; ++j)
                if (!std::isfinite(values_(i, j)))
                    throw DomainError("non-finite field value at " + point_label(grid_, i, j));
    }
}

ScalarField ScalarField::constant(const Grid& grid, double value)
{
    return ScalarField(grid, Array::Constant(grid.n1, grid.n2, value));
}

ScalarField diff(const ScalarField& f, int axis, int order)
{
    if (axis != 1 && axis != 2) throw Error("diff: axis must be 1 or 2");
    if (order != 1 && order != 2) throw Error("diff: order must be 1 or 2");
    const int n = axis == 1 ? f.grid().n1 : f.grid().n2;
    if (n < (order == 1 ? 3 : 4)) throw GridError("grid too small for the difference stencil");
    return ScalarField(f.grid(), diff_array(f.values(), f.grid(), axis, order));
}

ScalarField partial(const ScalarField& f, Coord c)
{
    const auto [w1, w2] = axis_weights(f.grid().kind, c);
    if (w2 == 0.0) return diff(f, 1, 1);
    if (w1 == 0.0) return diff(f, 2, 1);
    const Array d1 = diff_array(f.values(), f.grid(), 1, 1);
    const Array d2 = diff_array(f.values(), f.grid(), 2, 1);
    return ScalarField(f.grid(), w1 * d1 + w2 * d2);
}

ScalarField partial2(const ScalarField& f, Coord a, Coord b)
{
    const Grid& g = f.grid();
    const auto [a1, a2] = axis_weights(g.kind, a);
    const auto [b1, b2] = axis_weights(g.kind, b);
    const double c11 = a1 * b1;
    const double c12 = a1 * b2 + a2 * b1;
    const double c22 = a2 * b2;

    Array out = Array::Zero(g.n1, g.n2);
    if (c11 != 0.0) out += c11 * diff_array(f.values(), g, 1, 2);
    if (c22 != 0.0) out += c22 * diff_array(f.values(), g, 2, 2);
    if (c12 != 0.0) out += c12 * diff_array(diff_array(f.values(), g, 1, 1), g, 2, 1);
    return ScalarField(g, std::move(out));
}

ScalarField sample(const Expr& e, const Grid& grid)
{
    // map each expression variable to one of u,v,s,t
    std::vector<int> slot;
    for (const auto& name : e.variables()) {
        if (name == "u") slot.push_back(0);
        else if (name == "v") slot.push_back(1);
        else if (name == "s") slot.push_back(2);
        else if (name == "t") slot.push_back(3);
        else if (!e.depends_on(name)) slot.push_back(0);
        else throw UnknownIdentifierError(name);
    }
    Array out(grid.n1, grid.n2);
    std::vector<double> x(slot.size());
    for (int i = 0; i < grid.n1; ++i) {
        for (int j = 0; j < grid.n2; ++j) {
            const UvPoint p = grid.uv_at(i, j);
            const CharPoint q = grid.st_at(i, j);
            const double coords[4] = {p.u, p.v, q.s, q.t};
            for (std::size_t k = 0; k < slot.size(); ++k) x[k] = coords[slot[k]];
            try {
                out(i, j) = e(x);
            } catch (const DomainError& err) {
                throw DomainError(std::string(err.what()) + " at " + point_label(grid, i, j));
            }
        }
    }
    return ScalarField(grid, std::move(out));
}

double interpolate(const ScalarField& f, double x1, double x2)
{
    const Grid& g = f.grid();
    const double tol = 1e-12 * std::max(g.max1 - g.min1, g.max2 - g.min2);
    if (x1 < g.min1 - tol || x1 > g.max1 + tol || x2 < g.min2 - tol || x2 > g.max2 + tol)
        throw GridError("interpolation point outside the grid");
    const double p = std::clamp((x1 - g.min1) / g.h1(), 0.0, double(g.n1 - 1));
    const double q = std::clamp((x2 - g.min2) / g.h2(), 0.0, double(g.n2 - 1));
    const int i = std::min(static_cast<int>(p), g.n1 - 2);
    const int j = std::min(static_cast<int>(q), g.n2 - 2);
    const double a = p - i;
    const double b = q - j;
    const Array& v = f.values();
    return (1 - a) * (1 - b) * v(i, j) + a * (1 - b) * v(i + 1, j) + (1 - a) * b * v(i, j + 1) +
           a * b * v(i + 1, j + 1);
}

ScalarField resample(const ScalarField& f, const Grid& target)
{
    Array out(target.n1, target.n2);
    for (int i = 0; i < target.n1; ++i) {
        for (int j = 0; j < target.n2; ++j) {
            double x1, x2;
            if (f.grid().kind == CoordKind::uv) {
                const UvPoint p = target.uv_at(i, j);
                x1 = p.u;
                x2 = p.v;
            } else {
                const CharPoint p = target.st_at(i, j);
                x1 = p.s;
                x2 = p.t;
            }
            try {
                out(i, j) = interpolate(f, x1, x2);
            } catch (const GridError&) {
                throw GridError("resample: target " + point_label(target, i, j) + " lies outside the source domain");
            }
        }
    }
    return ScalarField(target, std::move(out));
}

double interior_max_abs(const Array& a, int margin)
{
    const int r = static_cast<int>(a.rows()) - 2 * margin;
    const int c = static_cast<int>(a.cols()) - 2 * margin;
    if (r <= 0 || c <= 0) throw GridError("grid too small for the residual margin");
    return a.block(margin, margin, r, c).abs().maxCoeff();
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const ScalarField& f, std::ostream& out)
{
    const Grid& g = f.grid();
    const auto names = g.coordinate_names();
    out << names[0] << ',' << names[1] << ",value\n";
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            out << format_double(g.x1(i)) << ',' << format_double(g.x2(j)) << ',' << format_double(f(i, j)) << '\n';
}

} // namespace tlsurf
