#include "drsim/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

namespace drsim {

using nlohmann::json;

std::strong_ordering utility_cmp(const UtilityPair& a, const UtilityPair& b) {
    if (a.vital < b.vital) return std::strong_ordering::less;
    if (a.vital > b.vital) return std::strong_ordering::greater;
    if (a.comfort < b.comfort) return std::strong_ordering::less;
    if (a.comfort > b.comfort) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

bool plan_feasible(const CapacityPlan& plan, const Scenario& scenario, double tol) {
    if (static_cast<int>(plan.limits.size()) != scenario.home_count()) return false;
    for (const auto& row : plan.limits) {
        if (static_cast<int>(row.size()) != scenario.horizon) return false;
        for (double v : row)
            if (!(v >= 0.0)) return false;
    }
    for (int t = 0; t < scenario.horizon; ++t)
        if (std::abs(plan.column_sum(t) - scenario.capacity[t]) > tol) return false;
    return true;
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ScenarioError(msg); }

double require_number(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key)) fail(ctx + ": missing field '" + key + "'");
    if (!j[key].is_number()) fail(ctx + ": field '" + key + "' must be a number");
    return j[key].get<double>();
}

int require_int(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key)) fail(ctx + ": missing field '" + key + "'");
    if (!j[key].is_number_integer()) fail(ctx + ": field '" + key + "' must be an integer");
    return j[key].get<int>();
}

// Scalar broadcasts to the whole horizon; a list must match it exactly.
std::vector<double> per_slot_series(const json& j, const std::string& key, int horizon) {
    const json& v = j.at(key);
    std::vector<double> out;
    if (v.is_number()) {
        out.assign(horizon, v.get<double>());
    } else if (v.is_array()) {
        if (static_cast<int>(v.size()) != horizon)
            fail("'" + key + "' list length " + std::to_string(v.size()) +
                 " does not match horizon " + std::to_string(horizon));
        for (const auto& e : v) {
            if (!e.is_number()) fail("'" + key + "' entries must be numbers");
            out.push_back(e.get<double>());
        }
    } else {
        fail("'" + key + "' must be a number or a per-slot list");
    }
    return out;
}

void validate_home(const HomeSpec& h, int horizon, const std::string& ctx) {
    if (h.lighting) {
        if (!(h.lighting->p_min > 0.0) || h.lighting->p_min > h.lighting->p_max)
            fail(ctx + ": lighting requires 0 < p_min <= p_max");
    }
    if (h.heating) {
        if (!(h.heating->p_min > 0.0) || h.heating->p_min > h.heating->p_max)
            fail(ctx + ": heating requires 0 < p_min <= p_max");
        if (!(h.heating->f_coeff >= 0.0) || !(h.heating->g_coeff > 0.0) ||
            h.heating->g_coeff > 1.0)
            fail(ctx + ": heating requires f_coeff >= 0 and 0 < g_coeff <= 1");
    }
    if (h.washing) {
        const auto& w = *h.washing;
        if (!(w.power > 0.0)) fail(ctx + ": washing power must be positive");
        if (w.duration < 1) fail(ctx + ": washing duration must be >= 1 slot");
        if (w.earliest_start < 0) fail(ctx + ": washing earliest_start must be >= 1");
        if (w.earliest_start + w.duration - 1 > w.deadline)
            fail(ctx + ": washing window infeasible (earliest_start + duration - 1 > deadline)");
        if (w.deadline > horizon - 1)
            fail(ctx + ": washing window exceeds horizon");
    }
    if (!(h.t_min < h.t_pref)) fail(ctx + ": requires t_min < t_pref");
    if (!(h.t_pref <= h.t_max)) fail(ctx + ": requires t_pref <= t_max");
    if (!(h.heat_vital_floor < h.t_min)) fail(ctx + ": requires heat_vital_floor < t_min");
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("syntax error: ") + e.what());
    }
    if (!doc.is_object()) fail("top level must be an object");

    Scenario s;
    s.horizon = require_int(doc, "horizon", "scenario");
    if (s.horizon < 1) fail("horizon must be >= 1");
    s.slot_minutes = doc.contains("slot_minutes") ? require_number(doc, "slot_minutes", "scenario") : 5.0;
    if (!(s.slot_minutes > 0.0)) fail("slot_minutes must be positive");
    if (!doc.contains("exterior_temp")) fail("scenario: missing field 'exterior_temp'");
    s.exterior_temp = per_slot_series(doc, "exterior_temp", s.horizon);
    if (!doc.contains("capacity")) fail("scenario: missing field 'capacity'");
    s.capacity = per_slot_series(doc, "capacity", s.horizon);
    for (double c : s.capacity)
        if (!(c >= 0.0)) fail("capacity must be >= 0 at every slot");
    s.max_utility_per_slot =
        doc.contains("max_utility_per_slot") ? require_number(doc, "max_utility_per_slot", "scenario") : 1.0;
    if (!(s.max_utility_per_slot > 0.0)) fail("max_utility_per_slot must be positive");
    const double vital_floor =
        doc.contains("heat_vital_floor") ? require_number(doc, "heat_vital_floor", "scenario") : 0.0;

    if (!doc.contains("homes") || !doc["homes"].is_array() || doc["homes"].empty())
        fail("scenario: 'homes' must be a non-empty list");

    std::set<int> used_ids;
    int next_id = 0;
    int block = 0;
    for (const auto& entry : doc["homes"]) {
        ++block;
        const std::string ctx = "homes[" + std::to_string(block) + "]";
        if (!entry.is_object()) fail(ctx + ": must be an object");
        int count = entry.contains("count") ? require_int(entry, "count", ctx) : 1;
        if (count < 1) fail(ctx + ": count must be >= 1");

        HomeSpec proto;
        proto.class_label = block;
        proto.t_min = require_number(entry, "t_min", ctx);
        proto.t_pref = require_number(entry, "t_pref", ctx);
        proto.t_init = require_number(entry, "t_init", ctx);
        proto.t_max = entry.contains("t_max") ? require_number(entry, "t_max", ctx) : proto.t_pref;
        proto.heat_vital_floor = vital_floor;

        if (entry.contains("lighting")) {
            const auto& a = entry["lighting"];
            proto.lighting = LightingSpec{require_number(a, "p_min", ctx + ".lighting"),
                                          require_number(a, "p_max", ctx + ".lighting")};
        }
        if (entry.contains("heating")) {
            const auto& a = entry["heating"];
            proto.heating = HeatingSpec{
                require_number(a, "p_min", ctx + ".heating"), require_number(a, "p_max", ctx + ".heating"),
                require_number(a, "f_coeff", ctx + ".heating"), require_number(a, "g_coeff", ctx + ".heating")};
        }
        if (entry.contains("washing")) {
            const auto& a = entry["washing"];
            WashingSpec w;
            w.power = require_number(a, "power", ctx + ".washing");
            w.duration = require_int(a, "duration", ctx + ".washing");
            // Document slots are 1-based.
            w.earliest_start = require_int(a, "earliest_start", ctx + ".washing") - 1;
            w.deadline = require_int(a, "deadline", ctx + ".washing") - 1;
            proto.washing = w;
        }
        if (!proto.lighting && !proto.heating && !proto.washing)
            fail(ctx + ": home has no appliances");
        validate_home(proto, s.horizon, ctx);

        int first_id = entry.contains("id") ? require_int(entry, "id", ctx) : next_id;
        for (int i = 0; i < count; ++i) {
            HomeSpec h = proto;
            h.id = first_id + i;
            if (!used_ids.insert(h.id).second)
                fail(ctx + ": duplicated home id " + std::to_string(h.id));
            s.homes.push_back(std::move(h));
        }
        next_id = std::max(next_id, first_id + count);
    }
    return s;
}

namespace {

bool same_spec(const std::optional<LightingSpec>& a, const std::optional<LightingSpec>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->p_min == b->p_min && a->p_max == b->p_max);
}
bool same_spec(const std::optional<HeatingSpec>& a, const std::optional<HeatingSpec>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->p_min == b->p_min && a->p_max == b->p_max && a->f_coeff == b->f_coeff &&
                  a->g_coeff == b->g_coeff);
}
bool same_spec(const std::optional<WashingSpec>& a, const std::optional<WashingSpec>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->power == b->power && a->duration == b->duration &&
                  a->earliest_start == b->earliest_start && a->deadline == b->deadline);
}

bool same_block(const HomeSpec& a, const HomeSpec& b) {
    return a.class_label == b.class_label && a.id + 1 == b.id && same_spec(a.lighting, b.lighting) &&
           same_spec(a.heating, b.heating) && same_spec(a.washing, b.washing) && a.t_min == b.t_min &&
           a.t_pref == b.t_pref && a.t_init == b.t_init && a.t_max == b.t_max;
}

}  // namespace

std::string render_scenario(const Scenario& s) {
    json doc;
    doc["horizon"] = s.horizon;
    doc["slot_minutes"] = s.slot_minutes;
    doc["exterior_temp"] = s.exterior_temp;
    doc["capacity"] = s.capacity;
    doc["max_utility_per_slot"] = s.max_utility_per_slot;
    if (!s.homes.empty()) doc["heat_vital_floor"] = s.homes.front().heat_vital_floor;
    json homes = json::array();
    for (size_t i = 0; i < s.homes.size();) {
        const HomeSpec& h = s.homes[i];
        size_t j = i;
        while (j + 1 < s.homes.size() && same_block(s.homes[j], s.homes[j + 1])) ++j;
        json e;
        e["count"] = static_cast<int>(j - i + 1);
        e["id"] = h.id;
        e["t_min"] = h.t_min;
        e["t_pref"] = h.t_pref;
        e["t_init"] = h.t_init;
        e["t_max"] = h.t_max;
        if (h.lighting) e["lighting"] = {{"p_min", h.lighting->p_min}, {"p_max", h.lighting->p_max}};
        if (h.heating)
            e["heating"] = {{"p_min", h.heating->p_min},
                            {"p_max", h.heating->p_max},
                            {"f_coeff", h.heating->f_coeff},
                            {"g_coeff", h.heating->g_coeff}};
        if (h.washing)
            e["washing"] = {{"power", h.washing->power},
                            {"duration", h.washing->duration},
                            {"earliest_start", h.washing->earliest_start + 1},
                            {"deadline", h.washing->deadline + 1}};
        homes.push_back(std::move(e));
        i = j + 1;
    }
    doc["homes"] = std::move(homes);
    return doc.dump(2);
}

}  // namespace drsim
