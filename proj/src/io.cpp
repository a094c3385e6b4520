#include "tlsurf/io.hpp"

namespace tlsurf {

json to_json(const AmbientSpec& a)
{
    return json{{"family", to_string(a.family)}, {"L0", a.L0}, {"dim", a.dim}, {"signature", a.signature}};
}

json to_json(const Grid& g)
{
    const auto names = g.coordinate_names();
    return json{{"kind", g.kind == CoordKind::uv ? "uv" : "st"},
                {names[0], {g.min1, g.max1}},
                {names[1], {g.min2, g.max2}},
                {"n1", g.n1},
                {"n2", g.n2},
                {"h", g.h()}};
}

json to_json(const ResidualEntry& e)
{
    return json{{"max", e.max}, {"tolerance", e.tolerance}, {"pass", e.pass}};
}

json to_json(const ResidualReport& r)
{
    json j{{"gauss", to_json(r.gauss)}, {"ricci", to_json(r.ricci)}, {"compatibility", to_json(r.compatibility)}};
    for (std::size_t k = 0; k < 4; ++k) j["codazzi" + std::to_string(k + 1)] = to_json(r.codazzi[k]);
    if (r.paraholomorphy) j["paraholomorphy"] = to_json(*r.paraholomorphy);
    return j;
}

json to_json(const Verdict& v)
{
    return json{{"holds", v.holds}, {"tolerance", v.tolerance}, {"attained", v.attained}};
}

json to_json(const LiftVerdict& v)
{
    return json{{"status", to_string(v.status)},
                {"tolerance", v.tolerance},
                {"max_deviation", v.max_deviation},
                {"min_deviation", v.min_deviation}};
}

json to_json(const ClassificationReport& r)
{
    json j{{"k_equals_L0", to_json(r.k_equals_L0)},
           {"normal_flat", to_json(r.normal_flat)},
           {"q_max_abs", r.q_max_abs},
           {"q_status", nullptr},
           {"lift_plus", nullptr},
           {"lift_minus", nullptr}};
    if (r.q_status) j["q_status"] = to_string(*r.q_status);
    if (r.lift_plus) j["lift_plus"] = to_json(*r.lift_plus);
    if (r.lift_minus) j["lift_minus"] = to_json(*r.lift_minus);
    return j;
}

json to_json(const FrameResiduals& r)
{
    json j{{"holonomy", r.holonomy},
           {"gram_max", r.gram_max},
           {"meanH_max", r.meanH_max},
           {"induced_metric_max", r.induced_max},
           {"sphere_max", nullptr}};
    if (r.sphere) j["sphere_max"] = r.sphere_max;
    return j;
}

} // namespace tlsurf
