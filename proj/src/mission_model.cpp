#include <algorithm>
#include <cmath>
#include <functional>

#include "rqv/error.hpp"
#include "rqv/mission.hpp"

namespace rqv {

namespace {

struct ChainRates {
    RateInterval clean;
    RateInterval fail;
};

IntervalCtmc build_layout(const MissionSpec& spec, const Configuration& config, MissionPhase start,
                          const std::function<ChainRates(std::size_t)>& chain_rates, const RateInterval& damage) {
    const MissionLayout layout{config.first, spec.k};
    const std::size_t n = layout.state_count();
    if (config.bits.size() != spec.k - config.first + 1) {
        throw InvalidArgument("configuration does not cover chains " + std::to_string(config.first) + ".." +
                              std::to_string(spec.k));
    }

    std::vector<LabelSet> labels(n);
    auto energy = RewardStructure::zeros("energy", n);
    auto time = RewardStructure::zeros("time", n);
    std::fill(time.state_rewards.begin(), time.state_rewards.end(), 1.0);

    struct Edge {
        std::size_t from;
        std::size_t to;
        RateInterval rate;
        double reward;
    };
    std::vector<Edge> edges;
    for (std::size_t j = config.first; j <= spec.k; ++j) {
        const bool clean = config.bits[j - config.first];
        const std::size_t ins = layout.state(j, MissionPhase::inspect);
        const std::size_t cln = layout.state(j, MissionPhase::cleaning);
        const std::size_t prep = layout.state(j, MissionPhase::prepare);
        const std::size_t trav = layout.state(j, MissionPhase::travel);
        const std::size_t after = j == spec.k ? layout.finish() : layout.state(j + 1, MissionPhase::inspect);
        labels[ins].insert("inspect");
        labels[cln].insert("clean");
        labels[prep].insert("prepare");
        labels[trav].insert("travel");

        if (clean) {
            const double to_travel = spec.p_c * spec.r_inspect;
            const double to_clean = (1.0 - spec.p_c) * spec.r_inspect;
            edges.push_back({ins, trav, {to_travel, to_travel, {}}, spec.e_ins});
            edges.push_back({ins, cln, {to_clean, to_clean, {}}, spec.e_ins});
        } else {
            edges.push_back({ins, trav, {spec.r_inspect, spec.r_inspect, {}}, spec.e_ins});
        }
        const ChainRates rates = chain_rates(j);
        edges.push_back({cln, trav, rates.clean, spec.e_i[j - 1]});
        edges.push_back({cln, layout.damage(), damage, 0.0});
        edges.push_back({cln, prep, rates.fail, 0.0});
        edges.push_back({prep, clean ? cln : trav, {spec.r_prepare, spec.r_prepare, {}}, spec.e_p});
        edges.push_back({trav, after, {spec.r_travel, spec.r_travel, {}}, spec.e_t});
    }
    labels[layout.damage()].insert("damage");
    labels[layout.finish()].insert("finish");
    for (const auto& e : edges) energy.transition_rewards(e.from, e.to) = e.reward;

    IntervalCtmc model(n, StateId{layout.state(config.first, start)}, std::move(labels), {std::move(energy), std::move(time)});
    for (auto& e : edges) model.set_rate(e.from, e.to, std::move(e.rate));
    return model;
}

}  // namespace

std::size_t Configuration::cleaned() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true)); }

std::string Configuration::to_string() const {
    std::string s;
    for (bool b : bits) s += b ? '1' : '0';
    return s;
}

std::vector<Configuration> enumerate_configurations(std::size_t k, std::size_t i) {
    if (i < 1 || i > k) throw InvalidArgument("chain index out of range");
    const std::size_t free = k - i;
    if (free >= 63) throw InvalidArgument("too many chains to enumerate");
    std::vector<Configuration> out;
    const std::uint64_t count = std::uint64_t{1} << free;
    for (std::uint64_t c = 0; c < count; ++c) {
        Configuration cfg{i, std::vector<bool>(free + 1, true)};
        for (std::size_t b = 0; b < free; ++b) {
            // Most significant bit of c belongs to chain i+1.
            cfg.bits[b + 1] = ((c >> (free - 1 - b)) & 1) == 0;
        }
        out.push_back(std::move(cfg));
    }
    return out;
}

const char* to_string(MissionPhase phase) {
    switch (phase) {
        case MissionPhase::inspect: return "Inspect";
        case MissionPhase::cleaning: return "Cleaning";
        case MissionPhase::prepare: return "Prepare";
        case MissionPhase::travel: return "Travel";
    }
    return "?";
}

std::string MissionLayout::name(std::size_t s) const {
    if (s == damage()) return "Damage";
    if (s == finish()) return "Finish";
    return std::string(to_string(static_cast<MissionPhase>(s % 4))) + "_" + std::to_string(first + s / 4);
}

RateInterval clean_rate_interval(const MissionSpec& spec, const RateBeliefs& beliefs, std::size_t chain) {
    const auto b = bipp_bounds(beliefs.clean_prior.at(chain - 1), beliefs.clean_exposure.at(chain - 1));
    const double hi = std::min(b.upper, spec.max_rate);
    return {std::min(b.lower, hi), hi, "r_clean_" + std::to_string(chain)};
}

RateInterval fail_rate_interval(const RateBeliefs& beliefs, std::size_t chain) {
    const auto b = ipsp_bounds(beliefs.fail_prior.at(chain - 1), beliefs.fail_obs.at(chain - 1));
    return {b.lower, b.upper, "r_fail_" + std::to_string(chain)};
}

RateInterval damage_rate_interval(const MissionSpec& spec, const RateBeliefs& beliefs) {
    const auto b = bipp_bounds(beliefs.damage_prior, spec.damage_exposure0 + beliefs.damage_exposure);
    const double hi = std::min(b.upper, spec.max_rate);
    return {std::min(b.lower, hi), hi, "r_damage"};
}

IntervalCtmc build_mission_ctmc(const MissionSpec& spec, const RateBeliefs& beliefs, const Configuration& config,
                                MissionPhase start) {
    auto rates = [&](std::size_t j) {
        return ChainRates{clean_rate_interval(spec, beliefs, j), fail_rate_interval(beliefs, j)};
    };
    return build_layout(spec, config, start, rates, damage_rate_interval(spec, beliefs));
}

Ctmc build_ground_truth_ctmc(const MissionSpec& spec, const std::vector<bool>& bits) {
    const auto& gt = spec.ground_truth;
    auto rates = [&](std::size_t j) {
        const double c = gt.r_clean.at(j - 1);
        const double f = gt.r_fail.at(j - 1);
        return ChainRates{{c, c, {}}, {f, f, {}}};
    };
    const Configuration config{1, bits};
    return instantiate(build_layout(spec, config, MissionPhase::inspect, rates, {gt.r_damage, gt.r_damage, {}}), {});
}

Property r1_property(const MissionSpec& spec) {
    Property p;
    p.kind = QueryKind::prob_reach;
    p.target = "damage";
    p.threshold = Threshold{Comparison::le, spec.p_fail_max};
    return p;
}

Property r2_property(double energy_left) {
    Property p;
    p.kind = QueryKind::reward_reach;
    p.reward_name = "energy";
    p.target = "finish";
    p.threshold = Threshold{Comparison::le, energy_left};
    return p;
}

}  // namespace rqv
