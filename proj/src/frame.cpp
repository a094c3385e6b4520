#include "tlsurf/frame.hpp"

#include "tlsurf/error.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tlsurf {

namespace {

using Mat5 = Eigen::Matrix<double, 5, 5>;

// Ambient slot of each frame column (T1, T2, N1, N2, F); -1 when F is the position of a flat ambient.
std::array<int, 5> slots(const AmbientSpec& a)
{
    if (a.family == Family::neutral) {
        if (a.L0 == 0.0) return {0, 2, 1, 3, -1};
        if (a.L0 > 0.0) return {0, 3, 1, 4, 2};
        return {0, 2, 1, 3, 4};
    }
    if (a.L0 == 0.0) return {0, 3, 1, 2, -1};
    if (a.L0 > 0.0) return {0, 4, 1, 2, 3};
    return {0, 3, 1, 2, 4};
}

Eigen::MatrixXd expected_gram(const AmbientSpec& a, double lambda)
{
    const double e = std::exp(2.0 * lambda);
    const int n = a.L0 == 0.0 ? 4 : 5;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    g(0, 0) = e;
    g(1, 1) = -e;
    g(2, 2) = e;
    g(3, 3) = a.family == Family::neutral ? -e : e;
    if (n == 5) g(4, 4) = 1.0 / a.L0;
    return g;
}

// Generator at the midpoint between samples k and k+1 of a line of n samples.
template <typename At>
Mat5 midpoint(At at, int k, int n, MidpointRule rule)
{
    if (rule == MidpointRule::linear || n < 4) return 0.5 * (at(k) + at(k + 1));
    if (k == 0) return (5.0 * at(0) + 15.0 * at(1) - 5.0 * at(2) + at(3)) / 16.0;
    if (k == n - 2) return (5.0 * at(n - 1) + 15.0 * at(n - 2) - 5.0 * at(n - 3) + at(n - 4)) / 16.0;
    return (-at(k - 1) + 9.0 * at(k) + 9.0 * at(k + 1) - at(k + 2)) / 16.0;
}

struct Generators
{
    std::vector<Mat5> axis1, axis2; // i-major
};

Generators generators(const FundamentalData& data)
{
    const FrameCoefficients c = frame_coefficients(data);
    const Grid& g = data.grid();
    Generators out;
    out.axis1.reserve(static_cast<std::size_t>(g.n1) * g.n2);
    out.axis2.reserve(static_cast<std::size_t>(g.n1) * g.n2);
    for (int i = 0; i < g.n1; ++i) {
        for (int j = 0; j < g.n2; ++j) {
            const Mat5 S = c.S_at(i, j);
            const Mat5 T = c.T_at(i, j);
            if (g.kind == CoordKind::uv) {
                out.axis1.push_back(S);
                out.axis2.push_back(T);
            } else {
                out.axis1.push_back(M_SQRT1_2 * (S + T));
                out.axis2.push_back(M_SQRT1_2 * (S - T));
            }
        }
    }
    return out;
}

FrameMatrix rk4_step(const FrameMatrix& m, const Mat5& a0, const Mat5& a1, const Mat5& mid, double h)
{
    const FrameMatrix k1 = m * a0;
    const FrameMatrix k2 = (m + 0.5 * h * k1) * mid;
    const FrameMatrix k3 = (m + 0.5 * h * k2) * mid;
    const FrameMatrix k4 = (m + h * k3) * a1;
    return m + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_finite(const FrameMatrix& m, int i, int j)
{
    if (!m.allFinite())
        throw DomainError("frame integration produced non-finite values at gridpoint (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
}

double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& metric)
{
    return (x.array() * metric.array() * y.array()).sum();
}

} // namespace

FrameMatrix canonical_initial_frame(const AmbientSpec& ambient, double lambda0)
{
    const auto slot = slots(ambient);
    FrameMatrix m = FrameMatrix::Zero(ambient.dim, 5);
    const double e = std::exp(lambda0);
    for (int k = 0; k < 4; ++k) m(slot[static_cast<std::size_t>(k)], k) = e;
    if (slot[4] >= 0) m(slot[4], 4) = 1.0 / std::sqrt(std::abs(ambient.L0));
    return m;
}

double gram_deviation(const FrameMatrix& m, const AmbientSpec& ambient, double lambda)
{
    const Eigen::MatrixXd expected = expected_gram(ambient, lambda);
    const int n = static_cast<int>(expected.rows());
    const Eigen::MatrixXd cols = m.leftCols(n);
    const Eigen::MatrixXd gram = cols.transpose() * ambient.metric().asDiagonal() * cols;
    return (gram - expected).cwiseAbs().maxCoeff();
}

FrameField integrate_frame(const FundamentalData& data, const std::optional<FrameMatrix>& initial,
                           IntegrationOrder order, MidpointRule rule)
{
    validate(data);
    const Grid& g = data.grid();
    const AmbientSpec& a = data.ambient;
    const FrameMatrix m0 = initial ? *initial : canonical_initial_frame(a, data.lambda(0, 0));
    if (m0.rows() != a.dim || m0.cols() != 5) throw Error("initial frame must be a dim x 5 matrix");
    const double dev = gram_deviation(m0, a, data.lambda(0, 0));
    if (!(dev <= kInitialGramTolerance))
        throw PreconditionError("initial frame violates the Gram constraints by " + format_double(dev), dev);

    const Generators gen = generators(data);
    auto A1 = [&](int i, int j) -> const Mat5& { return gen.axis1[static_cast<std::size_t>(i) * g.n2 + j]; };
    auto A2 = [&](int i, int j) -> const Mat5& { return gen.axis2[static_cast<std::size_t>(i) * g.n2 + j]; };

    FrameField ff{g, a, std::vector<FrameMatrix>(static_cast<std::size_t>(g.n1) * g.n2)};
    ff.at(0, 0) = m0;
    if (order == IntegrationOrder::first_axis_then_second) {
        for (int i = 0; i + 1 < g.n1; ++i) {
            const Mat5 mid = midpoint([&](int k) { return A1(k, 0); }, i, g.n1, rule);
            ff.at(i + 1, 0) = rk4_step(ff.at(i, 0), A1(i, 0), A1(i + 1, 0), mid, g.h1());
            check_finite(ff.at(i + 1, 0), i + 1, 0);
        }
        for (int i = 0; i < g.n1; ++i) {
            for (int j = 0; j + 1 < g.n2; ++j) {
                const Mat5 mid = midpoint([&](int k) { return A2(i, k); }, j, g.n2, rule);
                ff.at(i, j + 1) = rk4_step(ff.at(i, j), A2(i, j), A2(i, j + 1), mid, g.h2());
                check_finite(ff.at(i, j + 1), i, j + 1);
            }
        }
    } else {
        for (int j = 0; j + 1 < g.n2; ++j) {
            const Mat5 mid = midpoint([&](int k) { return A2(0, k); }, j, g.n2, rule);
            ff.at(0, j + 1) = rk4_step(ff.at(0, j), A2(0, j), A2(0, j + 1), mid, g.h2());
            check_finite(ff.at(0, j + 1), 0, j + 1);
        }
        for (int j = 0; j < g.n2; ++j) {
            for (int i = 0; i + 1 < g.n1; ++i) {
                const Mat5 mid = midpoint([&](int k) { return A1(k, j); }, i, g.n1, rule);
                ff.at(i + 1, j) = rk4_step(ff.at(i, j), A1(i, j), A1(i + 1, j), mid, g.h1());
                check_finite(ff.at(i + 1, j), i + 1, j);
            }
        }
    }
    return ff;
}

FrameResiduals frame_residuals(const FrameField& ff, const FundamentalData& data, int margin, MidpointRule rule)
{
    const Grid& g = ff.grid;
    if (!(g == data.grid())) throw GridError("frame field and fundamental data live on different grids");
    const AmbientSpec& a = ff.ambient;
    const Eigen::VectorXd metric = a.metric();
    const int d = a.dim;

    const FrameField other = integrate_frame(data, ff.at(0, 0), IntegrationOrder::second_axis_then_first, rule);

    Array gram(g.n1, g.n2), sphere(g.n1, g.n2);
    double holonomy = 0.0;
    std::vector<Array> pos(static_cast<std::size_t>(d), Array(g.n1, g.n2));
    for (int i = 0; i < g.n1; ++i) {
        for (int j = 0; j < g.n2; ++j) {
            const FrameMatrix& m = ff.at(i, j);
            holonomy = std::max(holonomy, (m - other.at(i, j)).cwiseAbs().rowwise().sum().maxCoeff());
            gram(i, j) = gram_deviation(m, a, data.lambda(i, j));
            const Eigen::VectorXd F = m.col(4);
            for (int k = 0; k < d; ++k) pos[static_cast<std::size_t>(k)](i, j) = F(k);
            sphere(i, j) = a.L0 == 0.0 ? 0.0 : std::abs(inner(F, F, metric) - 1.0 / a.L0);
        }
    }

    const Array e2l = (2.0 * data.lambda.values()).exp();
    Array meanH = Array::Zero(g.n1, g.n2), meanH_scale = Array::Zero(g.n1, g.n2);
    std::vector<Array> Fu, Fv;
    for (int k = 0; k < d; ++k) {
        const ScalarField Fk(g, pos[static_cast<std::size_t>(k)]);
        const Array uu = partial2(Fk, Coord::u, Coord::u).values();
        const Array vv = partial2(Fk, Coord::v, Coord::v).values();
        const Array curv = 2.0 * a.L0 * e2l * Fk.values();
        const Array r = wave_operator(Fk).values() + curv;
        meanH = meanH.max(r.abs());
        meanH_scale = meanH_scale.max(uu.abs() + vv.abs() + curv.abs());
        Fu.push_back(partial(Fk, Coord::u).values());
        Fv.push_back(partial(Fk, Coord::v).values());
    }
    Array guu = Array::Zero(g.n1, g.n2), guv = Array::Zero(g.n1, g.n2), gvv = Array::Zero(g.n1, g.n2);
    for (int k = 0; k < d; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        guu += metric(k) * Fu[kk] * Fu[kk];
        guv += metric(k) * Fu[kk] * Fv[kk];
        gvv += metric(k) * Fv[kk] * Fv[kk];
    }
    const Array induced = (guu - e2l).abs().max(guv.abs()).max((gvv + e2l).abs());

    FrameResiduals r{holonomy,
                     ScalarField(g, gram),
                     ScalarField(g, meanH),
                     std::nullopt,
                     ScalarField(g, induced),
                     gram.maxCoeff(),
                     interior_max_abs(meanH, margin),
                     0.0,
                     interior_max_abs(induced, margin),
                     interior_max_abs(meanH_scale, margin),
                     interior_max_abs(e2l, margin)};
    if (a.L0 != 0.0) {
        r.sphere = ScalarField(g, sphere);
        r.sphere_max = sphere.maxCoeff();
    }
    return r;
}

void export_immersion(const FrameField& ff, const std::filesystem::path& path, const std::string& sidecar_json)
{
    const Grid& g = ff.grid;
    const int d = ff.ambient.dim;
    {
        std::ofstream out(path);
        if (!out) throw Error("cannot write " + path.string());
        out << "u,v";
        for (int k = 1; k <= d; ++k) out << ",x" << k;
        out << '\n';
        for (int i = 0; i < g.n1; ++i) {
            for (int j = 0; j < g.n2; ++j) {
                const UvPoint p = g.uv_at(i, j);
                out << format_double(p.u) << ',' << format_double(p.v);
                const Eigen::VectorXd F = ff.position(i, j);
                for (int k = 0; k < d; ++k) out << ',' << format_double(F(k));
                out << '\n';
            }
        }
        if (!out) throw Error("error writing " + path.string());
    }

    nlohmann::json side = nlohmann::json::parse(sidecar_json);
    side["family"] = std::string(to_string(ff.ambient.family));
    side["L0"] = ff.ambient.L0;
    side["signature"] = ff.ambient.signature;
    side["dim"] = d;
    side["grid"] = {{"kind", g.kind == CoordKind::uv ? "uv" : "st"},
                    {"min1", g.min1}, {"max1", g.max1}, {"n1", g.n1},
                    {"min2", g.min2}, {"max2", g.max2}, {"n2", g.n2}};
    side["frame_columns"] = {"T1", "T2", "N1", "N2", "F"};
    nlohmann::json rows = nlohmann::json::array();
    const FrameMatrix& m0 = ff.at(0, 0);
    for (int r = 0; r < m0.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < m0.cols(); ++c) row.push_back(m0(r, c));
        rows.push_back(row);
    }
    side["initial_frame"] = rows;

    std::filesystem::path sidecar = path;
    sidecar += ".json";
    std::ofstream out(sidecar);
    if (!out) throw Error("cannot write " + sidecar.string());
    out << side.dump(2) << '\n';
}

std::vector<std::vector<double>> load_immersion(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace tlsurf
