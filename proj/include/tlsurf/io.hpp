#ifndef TLSURF_IO_HPP
#define TLSURF_IO_HPP

#include "tlsurf/frame.hpp"
#include "tlsurf/invariants.hpp"
#include "tlsurf/paracomplex.hpp"

#include <json.hpp>

namespace tlsurf {

using json = nlohmann::json;

template <typename Scalar>
void to_json(json& j, const Paracomplex<Scalar>& z)
{
    j = json{{"re", z.re}, {"im", z.im}};
}

template <typename Scalar>
void from_json(const json& j, Paracomplex<Scalar>& z)
{
    z.re = j.at("re").get<Scalar>();
    z.im = j.at("im").get<Scalar>();
}

json to_json(const AmbientSpec& a);
json to_json(const Grid& g);
json to_json(const ResidualEntry& e);
json to_json(const ResidualReport& r);
json to_json(const Verdict& v);
json to_json(const LiftVerdict& v);
json to_json(const ClassificationReport& r);
json to_json(const FrameResiduals& r);

} // namespace tlsurf

#endif // TLSURF_IO_HPP
