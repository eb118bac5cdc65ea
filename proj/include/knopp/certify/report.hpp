#ifndef KNOPP_CERTIFY_REPORT_HPP
#define KNOPP_CERTIFY_REPORT_HPP

#include <cstdint>
#include <ostream>
#include <string>

#include <json.hpp>

#include "holder.hpp"
#include "l1.hpp"
#include "witness.hpp"

#ifndef KNOPP_VERSION_STRING
#define KNOPP_VERSION_STRING "0.1.0"
#endif

namespace knopp
{

using Json = nlohmann::ordered_json;

inline constexpr const char *kVersion = KNOPP_VERSION_STRING;

inline Json params_json(const SeriesParams &p)
{
    return Json{{"alpha", to_string(p.alpha())}, {"nu", p.nu()}};
}

// endpoints rounded outward to double
inline void put_enclosure(Json &j, const std::string &prefix, const Enclosure &e)
{
    j[prefix + "_lo"] = e.lo_double();
    j[prefix + "_hi"] = e.hi_double();
}

inline Json item_json(const std::string &kind, const SeriesParams &p, Verdict v, const Enclosure &bound,
                      const Enclosure &value)
{
    Json j{{"kind", kind}, {"params", params_json(p)}, {"verdict", to_string(v)}};
    put_enclosure(j, "bound", bound);
    put_enclosure(j, "value", value);
    j["precision_bits"] = static_cast<long>(p.precision());
    return j;
}

inline Json header_json(const std::string &kind, const SeriesParams &p, std::uint64_t seed)
{
    return Json{{"kind", "header"},
                {"report", kind},
                {"params", params_json(p)},
                {"precision_bits", static_cast<long>(p.precision())},
                {"seed", seed},
                {"version", kVersion}};
}

inline Json to_json(const HolderPairResult &r, const SeriesParams &p)
{
    auto j = item_json("holder_pair", p, r.verdict, r.bound, r.delta);
    j["x"] = r.x.to_string();
    j["y"] = r.y.to_string();
    put_enclosure(j, "ratio", r.ratio);
    return j;
}

inline Json summary_json(const HolderCertificate &c)
{
    auto j = item_json("holder_summary", c.params, c.verdict, c.constant_C, c.worst_ratio);
    if (auto exact = holder_constant_exact(c.params)) {
        j["constant_exact"] = to_string(*exact);
    }
    j["pairs_checked"] = c.pairs_checked;
    j["failures"] = c.failures;
    j["inconclusive"] = c.inconclusive;
    j["pass"] = c.pass;
    return j;
}

inline Json to_json(const WitnessReport &r, const SeriesParams &p)
{
    auto j = item_json("witness", p, r.verdict, r.bound, r.quotient);
    j["x"] = r.x.to_string();
    j["m"] = r.m;
    j["beta"] = to_string(r.beta);
    j["t_m"] = r.t_m.to_string();
    j["pass"] = r.pass;
    j["strict"] = r.strict;
    j["precision_bits"] = static_cast<long>(r.precision);
    return j;
}

inline Json summary_json(const WitnessSweep &s)
{
    Json j{{"kind", "witness_summary"},
           {"params", params_json(s.params)},
           {"verdict", to_string(s.verdict)},
           {"beta", to_string(s.beta)},
           {"checked", s.items.size()},
           {"failures", s.failures},
           {"inconclusive", s.inconclusive}};
    Json bounds = Json::array();
    for (const auto &b : s.bounds) {
        Json e{{"m", b.m}, {"bound_lo", b.value.lo_double()}, {"bound_hi", b.value.hi_double()}};
        if (auto ex = b.exact()) {
            e["bound_exact"] = to_string(*ex);
        }
        bounds.push_back(std::move(e));
    }
    j["bounds"] = std::move(bounds);
    j["precision_bits"] = static_cast<long>(s.params.precision());
    return j;
}

inline Json to_json(const L1Report &r)
{
    auto j = item_json("l1", r.params, r.verdict, r.target, r.integral);
    j["m"] = r.m;
    j["M"] = r.M.to_string();
    j["integral_lower"] = r.integral_lower.lo_double();
    if (r.integral.is_point()) {
        j["integral_exact"] = to_string(r.integral.lo_rational());
    }
    j["cells"] = r.cells;
    j["uncertain_cells"] = r.uncertain_cells;
    j["pass"] = r.pass;
    return j;
}

inline Json summary_json(const TrendReport &t)
{
    Json j{{"kind", "trend_summary"},
           {"params", params_json(t.params)},
           {"verdict", to_string(t.verdict)},
           {"x", t.x.to_string()},
           {"beta", to_string(t.beta)},
           {"growth_log2", to_string(t.growth_log2)}};
    if (t.growth_exact) {
        j["growth_exact"] = to_string(*t.growth_exact);
    }
    j["ratio_exact"] = t.ratio_exact;
    j["ratio_consistent"] = t.ratio_consistent;
    j["steps"] = t.steps.size();
    j["precision_bits"] = static_cast<long>(t.params.precision());
    return j;
}

inline void write_jsonl(std::ostream &os, const Json &j)
{
    os << j.dump() << '\n';
}

} // namespace knopp

#endif
