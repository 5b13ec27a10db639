#pragma once

// JSON file formats (see docs/FORMATS.md):
//   bvu-1       election instance
//   bvu-sol-1   solution
//   bvu-ku-1    reduced KU instance
//   bvu-mku-1   reduced MKU instance
// Output objects keep insertion order; doubles are written in the shortest
// form that parses back to the same value.

#include <bvu/model.hpp>
#include <bvu/reductions.hpp>

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bvu {

using Json = nlohmann::ordered_json;

inline constexpr const char* kInstanceSchema = "bvu-1";
inline constexpr const char* kSolutionSchema = "bvu-sol-1";
inline constexpr const char* kKuSchema = "bvu-ku-1";
inline constexpr const char* kMkuSchema = "bvu-mku-1";

/// Malformed or schema-violating JSON.
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InstanceFile {
    ElectionInstance instance;
    Json metadata;  ///< null when absent

    friend bool operator==(const InstanceFile&, const InstanceFile&) = default;
};

struct SolutionFile {
    std::vector<VoterId> chosen;
    double cost = 0.0;
    double win_prob = 0.0;
    std::string method;  ///< "exact" | "approx"
    std::optional<double> epsilon;
    bool truncated = false;
    double runtime_ms = 0.0;
    std::string branch;

    friend bool operator==(const SolutionFile&, const SolutionFile&) = default;
};

namespace detail {

inline const Json& require_field(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw format_error(where + ": missing field '" + key + "'");
    return *it;
}

inline double require_number(const Json& obj, const char* key, const std::string& where) {
    const auto& v = require_field(obj, key, where);
    if (!v.is_number()) throw format_error(where + ": field '" + std::string(key) + "' must be a number");
    return v.get<double>();
}

inline void require_schema(const Json& j, const char* expected) {
    if (!j.is_object()) throw format_error("top-level value must be an object");
    const auto& v = require_field(j, "schema_version", "document");
    if (!v.is_string() || v.get<std::string>() != expected) {
        throw format_error(std::string("schema_version must be \"") + expected + "\"");
    }
}

inline Json parse_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw format_error(std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace detail

inline Json instance_to_json(const ElectionInstance& inst, const Json& metadata = nullptr) {
    Json j;
    j["schema_version"] = kInstanceSchema;
    j["m"] = inst.num_candidates();
    Json groups = Json::array();
    for (std::size_t g = 0; g < inst.num_candidates(); ++g) {
        Json arr = Json::array();
        for (const auto& v : inst.group(g)) arr.push_back(Json{{"price", v.price}, {"prob", v.success_prob}});
        groups.push_back(std::move(arr));
    }
    j["groups"] = std::move(groups);
    j["budget"] = inst.budget();
    if (!metadata.is_null()) j["metadata"] = metadata;
    return j;
}

/// Parses the structure only; run validate() for the election invariants.
inline InstanceFile instance_from_json(const Json& j) {
    detail::require_schema(j, kInstanceSchema);
    const auto& groups = detail::require_field(j, "groups", "instance");
    if (!groups.is_array()) throw format_error("instance: 'groups' must be an array");
    const auto& m = detail::require_field(j, "m", "instance");
    if (!m.is_number_integer() || m.get<long long>() != static_cast<long long>(groups.size())) {
        throw format_error("instance: 'm' must equal the number of groups");
    }
    std::vector<std::vector<VoterSpec>> specs;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (!groups[g].is_array()) throw format_error("instance: group " + std::to_string(g + 1) + " must be an array");
        auto& out = specs.emplace_back();
        for (std::size_t i = 0; i < groups[g].size(); ++i) {
            const auto& v = groups[g][i];
            const std::string where = "instance: group " + std::to_string(g + 1) + " voter " + std::to_string(i);
            if (!v.is_object()) throw format_error(where + " must be an object");
            out.push_back(VoterSpec{detail::require_number(v, "price", where), detail::require_number(v, "prob", where)});
        }
    }
    InstanceFile f;
    f.instance = ElectionInstance(specs, detail::require_number(j, "budget", "instance"));
    if (auto it = j.find("metadata"); it != j.end()) f.metadata = *it;
    return f;
}

inline InstanceFile parse_instance(const std::string& text) { return instance_from_json(detail::parse_text(text)); }

inline Json solution_to_json(const SolutionFile& s) {
    Json j;
    j["schema_version"] = kSolutionSchema;
    j["chosen"] = s.chosen;
    j["cost"] = s.cost;
    j["win_prob"] = s.win_prob;
    j["method"] = s.method;
    if (s.epsilon) j["epsilon"] = *s.epsilon;
    j["truncated"] = s.truncated;
    j["runtime_ms"] = s.runtime_ms;
    if (!s.branch.empty()) j["branch"] = s.branch;
    return j;
}

inline SolutionFile solution_from_json(const Json& j) {
    detail::require_schema(j, kSolutionSchema);
    SolutionFile s;
    const auto& chosen = detail::require_field(j, "chosen", "solution");
    if (!chosen.is_array()) throw format_error("solution: 'chosen' must be an array");
    for (const auto& id : chosen) {
        if (!id.is_number_unsigned() && !(id.is_number_integer() && id.get<long long>() >= 0)) {
            throw format_error("solution: voter ids must be non-negative integers");
        }
        s.chosen.push_back(id.get<VoterId>());
    }
    s.cost = detail::require_number(j, "cost", "solution");
    s.win_prob = detail::require_number(j, "win_prob", "solution");
    const auto& method = detail::require_field(j, "method", "solution");
    if (!method.is_string()) throw format_error("solution: 'method' must be a string");
    s.method = method.get<std::string>();
    if (s.method != "exact" && s.method != "approx") throw format_error("solution: method must be exact or approx");
    if (auto it = j.find("epsilon"); it != j.end()) s.epsilon = detail::require_number(j, "epsilon", "solution");
    if (auto it = j.find("truncated"); it != j.end()) {
        if (!it->is_boolean()) throw format_error("solution: 'truncated' must be a boolean");
        s.truncated = it->get<bool>();
    }
    if (auto it = j.find("runtime_ms"); it != j.end()) s.runtime_ms = detail::require_number(j, "runtime_ms", "solution");
    if (auto it = j.find("branch"); it != j.end() && it->is_string()) s.branch = it->get<std::string>();
    return s;
}

inline SolutionFile parse_solution(const std::string& text) { return solution_from_json(detail::parse_text(text)); }

inline Json ku_to_json(const KuInstance& ku) {
    Json j;
    j["schema_version"] = kKuSchema;
    j["capacity"] = ku.capacity;
    j["r"] = ku.r;
    Json items = Json::array();
    for (const auto& it : ku.items) items.push_back(Json{{"size", it.size}, {"prob", it.prob}});
    j["items"] = std::move(items);
    return j;
}

inline KuInstance ku_from_json(const Json& j) {
    detail::require_schema(j, kKuSchema);
    KuInstance ku;
    ku.capacity = detail::require_number(j, "capacity", "ku");
    const auto& r = detail::require_field(j, "r", "ku");
    if (!r.is_number_integer()) throw format_error("ku: 'r' must be an integer");
    ku.r = r.get<long long>();
    for (const auto& it : detail::require_field(j, "items", "ku")) {
        ku.items.push_back(KuItem{detail::require_number(it, "size", "ku item"), detail::require_number(it, "prob", "ku item")});
    }
    return ku;
}

/// j0 is written 1-based.
inline Json mku_to_json(const MkuInstance& mku) {
    Json j;
    j["schema_version"] = kMkuSchema;
    j["capacity"] = mku.capacity;
    j["k"] = mku.k;
    j["j0"] = mku.j0 + 1;
    j["quotas"] = mku.quotas;
    Json groups = Json::array();
    for (const auto& g : mku.groups) {
        Json arr = Json::array();
        for (const auto& it : g) arr.push_back(Json{{"id", it.id}, {"size", it.size}, {"prob", it.prob}});
        groups.push_back(std::move(arr));
    }
    j["groups"] = std::move(groups);
    j["feasible"] = !mku.infeasibility.has_value();
    if (mku.infeasibility) j["infeasibility"] = *mku.infeasibility;
    return j;
}

inline MkuInstance mku_from_json(const Json& j) {
    detail::require_schema(j, kMkuSchema);
    MkuInstance mku;
    mku.capacity = detail::require_number(j, "capacity", "mku");
    mku.k = detail::require_field(j, "k", "mku").get<long long>();
    const auto j0 = detail::require_field(j, "j0", "mku").get<long long>();
    if (j0 < 1) throw format_error("mku: j0 is 1-based");
    mku.j0 = static_cast<std::size_t>(j0 - 1);
    mku.quotas = detail::require_field(j, "quotas", "mku").get<std::vector<long long>>();
    for (const auto& g : detail::require_field(j, "groups", "mku")) {
        auto& out = mku.groups.emplace_back();
        for (const auto& it : g) {
            out.push_back(MkuItem{it.at("id").get<VoterId>(), detail::require_number(it, "size", "mku item"),
                                  detail::require_number(it, "prob", "mku item")});
        }
    }
    if (auto it = j.find("infeasibility"); it != j.end()) mku.infeasibility = it->get<std::string>();
    return mku;
}

}  // namespace bvu
