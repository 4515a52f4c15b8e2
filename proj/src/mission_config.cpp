#include <algorithm>
#include <cmath>

#include "json_util.hpp"
#include "rqv/error.hpp"
#include "rqv/mission.hpp"

namespace rqv {

namespace {

using detail::json;

// A per-chain quantity given either as one number for every chain or as an
// array of k numbers.
std::vector<double> per_chain(const json& j, const std::string& path, std::size_t k) {
    if (j.is_array()) {
        if (j.size() != k) throw ParseError(path, "expected " + std::to_string(k) + " entries");
        std::vector<double> out;
        for (std::size_t i = 0; i < k; ++i) out.push_back(detail::as_number(j[i], detail::at(path, i)));
        return out;
    }
    return std::vector<double>(k, detail::as_number(j, path));
}

json per_chain_json(const std::vector<double>& v) {
    if (!v.empty() && std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return v.front();
    return v;
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be positive and finite");
}

void require_non_negative(double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be non-negative and finite");
}

}  // namespace

MissionSpec MissionSpec::defaults(std::size_t k) {
    MissionSpec s;
    s.k = k;
    s.e_i.assign(k, 5.0);
    s.ground_truth.r_clean.assign(k, 0.2);
    s.ground_truth.r_fail.assign(k, 0.1);
    s.ground_truth.r_damage = 1e-9;
    return s;
}

void MissionSpec::validate() const {
    if (k < 1) throw InvalidArgument("k must be at least 1");
    if (k > 20) throw InvalidArgument("k above 20 is not supported");
    require_positive(r_inspect, "r_inspect");
    require_positive(r_travel, "r_travel");
    require_positive(r_prepare, "r_prepare");
    if (!(p_c >= 0.0 && p_c <= 1.0)) throw InvalidArgument("p_c must lie in [0, 1]");
    require_non_negative(e_ins, "e_ins");
    require_non_negative(e_t, "e_t");
    require_non_negative(e_p, "e_p");
    if (e_i.size() != k) throw InvalidArgument("e_i needs one entry per chain");
    for (double e : e_i) require_non_negative(e, "e_i");
    if (E0 && !(*E0 > 0.0)) throw InvalidArgument("E0 must be positive");
    if (!(p_fail_max >= 0.0 && p_fail_max <= 1.0)) throw InvalidArgument("p_fail_max must lie in [0, 1]");
    if (ground_truth.r_clean.size() != k || ground_truth.r_fail.size() != k) {
        throw InvalidArgument("ground_truth rates need one entry per chain");
    }
    for (double r : ground_truth.r_clean) require_positive(r, "ground_truth.r_clean");
    for (double r : ground_truth.r_fail) require_non_negative(r, "ground_truth.r_fail");
    require_non_negative(ground_truth.r_damage, "ground_truth.r_damage");
    require_positive(max_rate, "max_rate");
    require_non_negative(damage_exposure0, "damage_exposure0");
}

MissionSpec load_mission_spec(const std::string& json_text) {
    using namespace detail;
    const json root = parse_json(json_text);
    require_object(root, "", {"k", "r_inspect", "r_travel", "r_prepare", "p_c", "e_ins", "e_t", "e_p", "e_i", "E0",
                              "p_fail_max", "ground_truth", "seed", "max_rate", "damage_exposure0",
                              "reward_semantics", "audit_samples"});
    std::size_t k = 6;
    if (root.contains("k")) {
        const auto v = as_integer(root["k"], "k");
        if (v < 1 || v > 20) throw ParseError("k", "expected an integer in [1, 20]");
        k = static_cast<std::size_t>(v);
    }
    MissionSpec s = MissionSpec::defaults(k);
    auto number = [&](const char* key, double& field) {
        if (root.contains(key)) field = as_number(root[key], key);
    };
    number("r_inspect", s.r_inspect);
    number("r_travel", s.r_travel);
    number("r_prepare", s.r_prepare);
    number("p_c", s.p_c);
    number("e_ins", s.e_ins);
    number("e_t", s.e_t);
    number("e_p", s.e_p);
    number("p_fail_max", s.p_fail_max);
    number("max_rate", s.max_rate);
    number("damage_exposure0", s.damage_exposure0);
    if (root.contains("e_i")) s.e_i = per_chain(root["e_i"], "e_i", k);
    if (root.contains("E0") && !root["E0"].is_null()) s.E0 = as_extended_number(root["E0"], "E0");
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned()) throw ParseError("seed", "expected a non-negative integer");
        s.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("audit_samples")) {
        const auto v = as_integer(root["audit_samples"], "audit_samples");
        if (v < 0) throw ParseError("audit_samples", "expected a non-negative integer");
        s.audit_samples = static_cast<std::size_t>(v);
    }
    if (root.contains("reward_semantics")) {
        const std::string v = as_string(root["reward_semantics"], "reward_semantics");
        if (v == "strict") {
            s.reward_semantics = RewardSemantics::strict;
        } else if (v == "until-absorption") {
            s.reward_semantics = RewardSemantics::until_absorption;
        } else {
            throw ParseError("reward_semantics", "expected \"strict\" or \"until-absorption\"");
        }
    }
    if (root.contains("ground_truth")) {
        const json& gt = root["ground_truth"];
        require_object(gt, "ground_truth", {"r_clean", "r_fail", "r_damage"});
        if (gt.contains("r_clean")) s.ground_truth.r_clean = per_chain(gt["r_clean"], "ground_truth.r_clean", k);
        if (gt.contains("r_fail")) s.ground_truth.r_fail = per_chain(gt["r_fail"], "ground_truth.r_fail", k);
        if (gt.contains("r_damage")) s.ground_truth.r_damage = as_number(gt["r_damage"], "ground_truth.r_damage");
    }
    try {
        s.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError("", e.what());
    }
    return s;
}

std::string save_mission_spec(const MissionSpec& s) {
    json j;
    j["k"] = s.k;
    j["r_inspect"] = s.r_inspect;
    j["r_travel"] = s.r_travel;
    j["r_prepare"] = s.r_prepare;
    j["p_c"] = s.p_c;
    j["e_ins"] = s.e_ins;
    j["e_t"] = s.e_t;
    j["e_p"] = s.e_p;
    j["e_i"] = per_chain_json(s.e_i);
    j["E0"] = s.E0 ? json(*s.E0) : json(nullptr);
    j["p_fail_max"] = s.p_fail_max;
    j["ground_truth"] = {{"r_clean", per_chain_json(s.ground_truth.r_clean)},
                         {"r_fail", per_chain_json(s.ground_truth.r_fail)},
                         {"r_damage", s.ground_truth.r_damage}};
    j["seed"] = s.seed;
    j["max_rate"] = s.max_rate;
    j["damage_exposure0"] = s.damage_exposure0;
    j["reward_semantics"] = to_string(s.reward_semantics);
    j["audit_samples"] = s.audit_samples;
    return j.dump(2) + "\n";
}

}  // namespace rqv
