#include "rqv/model_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json_util.hpp"

namespace rqv {

using detail::json;

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

IntervalCtmc load_model(std::string_view text) {
    using namespace detail;
    const json root = parse_json(text);
    require_object(root, "", {"states", "initial", "transitions", "state_rewards"});

    const json& states = require_field(root, "", "states");
    if (!states.is_array() || states.empty()) throw ParseError("states", "expected a non-empty array");
    const std::size_t n = states.size();
    std::vector<LabelSet> labels(n);
    std::vector<bool> seen(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const std::string path = at("states", k);
        const json& st = states[k];
        require_object(st, path, {"id", "labels"});
        const auto id = as_integer(require_field(st, path, "id"), dot(path, "id"));
        if (id < 0 || static_cast<std::size_t>(id) >= n) throw ParseError(dot(path, "id"), "state id out of range");
        if (seen[id]) throw ParseError(dot(path, "id"), "duplicate state id");
        seen[id] = true;
        if (auto it = st.find("labels"); it != st.end()) {
            if (!it->is_array()) throw ParseError(dot(path, "labels"), "expected an array of strings");
            for (std::size_t q = 0; q < it->size(); ++q) {
                auto label = as_string((*it)[q], at(dot(path, "labels"), q));
                if (label.empty()) throw ParseError(at(dot(path, "labels"), q), "empty label");
                labels[id].insert(std::move(label));
            }
        }
    }

    const auto initial = as_integer(require_field(root, "", "initial"), "initial");
    if (initial < 0 || static_cast<std::size_t>(initial) >= n) throw ParseError("initial", "state id out of range");

    std::map<std::string, RewardStructure> rewards;
    auto reward_for = [&](const std::string& name) -> RewardStructure& {
        auto it = rewards.find(name);
        if (it == rewards.end()) it = rewards.emplace(name, RewardStructure::zeros(name, n)).first;
        return it->second;
    };

    struct PendingRate {
        std::size_t from, to;
        RateInterval interval;
        std::string path;
    };
    std::vector<PendingRate> pending;
    const json& transitions = require_field(root, "", "transitions");
    if (!transitions.is_array()) throw ParseError("transitions", "expected an array");
    std::set<std::pair<std::size_t, std::size_t>> used;
    for (std::size_t k = 0; k < transitions.size(); ++k) {
        const std::string path = at("transitions", k);
        const json& tr = transitions[k];
        require_object(tr, path, {"from", "to", "rate", "rewards"});
        const auto from = as_integer(require_field(tr, path, "from"), dot(path, "from"));
        const auto to = as_integer(require_field(tr, path, "to"), dot(path, "to"));
        if (from < 0 || static_cast<std::size_t>(from) >= n) throw ParseError(dot(path, "from"), "state id out of range");
        if (to < 0 || static_cast<std::size_t>(to) >= n) throw ParseError(dot(path, "to"), "state id out of range");

        const json& rate = require_field(tr, path, "rate");
        const std::string rpath = dot(path, "rate");
        RateInterval interval;
        if (rate.is_object()) {
            require_object(rate, rpath, {"lo", "hi", "param"});
            interval.lo = as_non_negative(require_field(rate, rpath, "lo"), dot(rpath, "lo"));
            interval.hi = as_non_negative(require_field(rate, rpath, "hi"), dot(rpath, "hi"));
            if (interval.lo > interval.hi) throw ParseError(rpath, "lo exceeds hi");
            if (auto p = rate.find("param"); p != rate.end()) interval.param = as_string(*p, dot(rpath, "param"));
        } else {
            interval.lo = interval.hi = as_non_negative(rate, rpath);
        }
        if (from == to) continue;
        if (!used.emplace(from, to).second) throw ParseError(path, "duplicate transition");
        pending.push_back({static_cast<std::size_t>(from), static_cast<std::size_t>(to), interval, rpath});

        if (auto rw = tr.find("rewards"); rw != tr.end()) {
            const std::string wpath = dot(path, "rewards");
            if (!rw->is_object()) throw ParseError(wpath, "expected an object");
            for (const auto& [name, value] : rw->items()) {
                reward_for(name).transition_rewards(from, to) = as_non_negative(value, dot(wpath, name));
            }
        }
    }

    if (auto sr = root.find("state_rewards"); sr != root.end()) {
        if (!sr->is_object()) throw ParseError("state_rewards", "expected an object");
        for (const auto& [name, table] : sr->items()) {
            const std::string path = dot("state_rewards", name);
            if (!table.is_object()) throw ParseError(path, "expected an object keyed by state id");
            auto& rs = reward_for(name);
            for (const auto& [key, value] : table.items()) {
                std::size_t pos = 0;
                long long id = -1;
                try {
                    id = std::stoll(key, &pos);
                } catch (const std::exception&) {
                    pos = 0;
                }
                if (pos != key.size() || id < 0 || static_cast<std::size_t>(id) >= n) {
                    throw ParseError(dot(path, key), "state id out of range");
                }
                rs.state_rewards[id] = as_non_negative(value, dot(path, key));
            }
        }
    }

    std::vector<RewardStructure> reward_list;
    for (auto& [name, rs] : rewards) reward_list.push_back(std::move(rs));
    IntervalCtmc model(n, StateId{static_cast<std::size_t>(initial)}, std::move(labels), std::move(reward_list));
    for (auto& p : pending) {
        try {
            model.set_rate(p.from, p.to, std::move(p.interval));
        } catch (const InvalidArgument& e) {
            throw ParseError(p.path, e.what());
        }
    }
    return model;
}

IntervalCtmc load_model_file(const std::filesystem::path& path) {
    return load_model(read_text_file(path));
}

std::string save_model(const IntervalCtmc& model) {
    const std::size_t n = model.state_count();
    json root = json::object();
    json states = json::array();
    for (std::size_t s = 0; s < n; ++s) {
        json labels = json::array();
        for (const auto& l : model.labels()[s]) labels.push_back(l);
        states.push_back(json{{"id", s}, {"labels", std::move(labels)}});
    }
    root["states"] = std::move(states);
    root["initial"] = model.initial().index;

    json transitions = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto& r = model.rate(i, j);
            if (i == j) continue;
            json rw = json::object();
            for (const auto& rs : model.rewards()) {
                if (rs.transition_rewards(i, j) != 0.0) rw[rs.name] = rs.transition_rewards(i, j);
            }
            if (r.hi == 0.0 && r.param.empty() && rw.empty()) continue;
            json tr{{"from", i}, {"to", j}};
            if (r.degenerate() && r.param.empty()) {
                tr["rate"] = r.lo;
            } else {
                json iv{{"lo", r.lo}, {"hi", r.hi}};
                if (!r.param.empty()) iv["param"] = r.param;
                tr["rate"] = std::move(iv);
            }
            if (!rw.empty()) tr["rewards"] = std::move(rw);
            transitions.push_back(std::move(tr));
        }
    }
    root["transitions"] = std::move(transitions);

    json state_rewards = json::object();
    for (const auto& rs : model.rewards()) {
        json table = json::object();
        for (std::size_t s = 0; s < n; ++s) {
            if (rs.state_rewards[s] != 0.0) table[std::to_string(s)] = rs.state_rewards[s];
        }
        state_rewards[rs.name] = std::move(table);
    }
    root["state_rewards"] = std::move(state_rewards);
    return root.dump(2) + "\n";
}

std::string save_model(const Ctmc& model) { return save_model(to_interval(model)); }

}  // namespace rqv
