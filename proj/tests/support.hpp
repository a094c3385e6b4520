#ifndef TLSURF_TESTS_SUPPORT_HPP
#define TLSURF_TESTS_SUPPORT_HPP

#include "tlsurf/constructors.hpp"
#include "tlsurf/expr.hpp"
#include "tlsurf/fields.hpp"
#include "tlsurf/invariants.hpp"
#include "tlsurf/pde.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace testing {

using namespace tlsurf;

inline const std::vector<std::string> kUV{"u", "v"};
inline const std::vector<std::string> kST{"s", "t"};
inline const std::vector<std::string> kX{"x"};

inline Expr fx(const std::string& text) { return parse(text, kX); }
inline Expr fuv(const std::string& text) { return parse(text, {"u", "v", "s", "t"}); }

inline Grid uv_grid(double u0, double u1, double v0, double v1, int n)
{
    return Grid::make(CoordKind::uv, u0, u1, v0, v1, n, n);
}

inline Grid st_grid(double s0, double s1, double t0, double t1, int n)
{
    return Grid::make(CoordKind::st, s0, s1, t0, t1, n, n);
}

inline ScalarField field(const std::string& text, const Grid& g) { return sample(fuv(text), g); }

/// Fundamental data whose named fields are sampled from expressions; the rest are zero.
inline FundamentalData make_data(const AmbientSpec& ambient, const Grid& g,
                                 const std::map<std::string, std::string>& fields)
{
    const ScalarField zero = ScalarField::constant(g, 0.0);
    FundamentalData d{ambient, zero, zero, zero, zero, zero, zero, zero};
    for (const auto& [name, text] : fields) d = d.with_field(name, field(text, g));
    return d;
}

inline double max_abs(const Array& a) { return a.abs().maxCoeff(); }
inline double interior(const ScalarField& f) { return interior_max_abs(f.values(), kResidualMargin); }

/// Largest of the Gauss, Codazzi, Ricci, compatibility and (neutral) paraholomorphy maxima.
inline double max_residual(const ResidualReport& r)
{
    double m = std::max({r.gauss.max, r.codazzi_max(), r.ricci.max, r.compatibility.max});
    if (r.paraholomorphy) m = std::max(m, r.paraholomorphy->max);
    return m;
}

inline double order(double coarse, double fine) { return std::log2(coarse / fine); }

} // namespace testing

#endif // TLSURF_TESTS_SUPPORT_HPP
