#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "json_util.hpp"
#include "rqv/error.hpp"
#include "rqv/mission.hpp"

namespace rqv {

namespace {

PartialPrior sample_three_band(Rng& rng, double e1, double t1, double e2, double t2) {
    const double eps1 = e1 + rng.uniform(0.0, e1);
    const double th1 = t1 + rng.uniform(0.0, t1 / 100.0);
    const double eps2 = e2 + rng.uniform(0.0, e2);
    const double th2 = t2 + rng.uniform(0.0, t2 / 100.0);
    return PartialPrior({0.0, eps1, eps2, std::numeric_limits<double>::infinity()}, {th1, th2, 1.0 - th1 - th2});
}

std::string num(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

RateBeliefs sample_case_study_priors(std::size_t k, Rng& rng) {
    std::vector<PartialPrior> clean;
    std::vector<GammaPriorSet> fail;
    for (std::size_t i = 0; i < k; ++i) {
        clean.push_back(sample_three_band(rng, 0.12, 0.10, 0.90, 0.85));
        const double t0 = 10.0 + rng.uniform(0.0, 10.0);
        const double l0 = 0.0163 + rng.uniform(0.0, 0.00163);
        fail.emplace_back(10.0, t0, 0.0163, l0);
    }
    PartialPrior damage = sample_three_band(rng, 1e-8, 0.88, 1e-7, 0.10);
    return RateBeliefs{std::move(clean), std::vector<double>(k, 0.0), std::move(damage), 0.0, std::move(fail),
                       std::vector<RateObservation>(k)};
}

const char* to_string(ChainResult result) {
    switch (result) {
        case ChainResult::cleaned: return "cleaned";
        case ChainResult::skipped: return "skipped";
        case ChainResult::not_needed: return "not_needed";
        case ChainResult::unvisited: return "unvisited";
    }
    return "?";
}

std::optional<StepResult> simulate_step(const Ctmc& model, std::size_t state, Rng& rng) {
    const double exit = exit_rate(model, StateId{state});
    if (exit == 0.0) return std::nullopt;
    StepResult step;
    step.dwell = rng.exponential(exit);
    const double u = rng.uniform() * exit;
    double acc = 0.0;
    std::size_t last = state;
    step.next = state;
    for (std::size_t v = 0; v < model.state_count(); ++v) {
        const double r = model.rate(state, v);
        if (r <= 0.0) continue;
        last = v;
        acc += r;
        if (u < acc) {
            step.next = v;
            break;
        }
    }
    if (step.next == state) step.next = last;
    if (const RewardStructure* energy = model.reward("energy")) {
        step.energy = energy->transition_rewards(state, step.next);
    }
    return step;
}

double calibrate_energy_budget(const MissionSpec& spec, const RateBeliefs& beliefs) {
    const Configuration all{1, std::vector<bool>(spec.k, true)};
    const IntervalCtmc model = build_mission_ctmc(spec, beliefs, all, MissionPhase::inspect);
    IntervalCheckOptions options;
    options.semantics = spec.reward_semantics;
    return 1.5 * check_interval(model, r2_property(0.0), options).hi;
}

MissionOutcome run_mission(const MissionSpec& spec, const MissionOptions& options) {
    spec.validate();
    Rng rng(spec.seed);
    RateBeliefs beliefs = sample_case_study_priors(spec.k, rng);

    MissionOutcome out;
    out.chains.assign(spec.k, ChainResult::unvisited);
    out.E0 = spec.E0 ? *spec.E0 : calibrate_energy_budget(spec, beliefs);

    const MissionLayout layout{1, spec.k};
    std::vector<bool> bits(spec.k, true);
    Ctmc truth = build_ground_truth_ctmc(spec, bits);
    std::size_t state = layout.state(1, MissionPhase::inspect);
    double clock = 0.0;
    std::vector<std::size_t> attempts(spec.k, 0);

    auto log = [&](const std::string& event, double energy) {
        out.events.push_back({clock, layout.name(state), event, energy});
    };
    auto set_bit = [&](std::size_t chain, bool value) {
        if (bits[chain - 1] == value) return;
        bits[chain - 1] = value;
        truth = build_ground_truth_ctmc(spec, bits);
    };
    // Returns true when the controller chose to clean `chain`.
    auto decide = [&](std::size_t chain, MissionPhase start) {
        Decision d = controller_decide(spec, beliefs, chain, start, out.E0 - out.energy_consumed, rng);
        d.attempt = attempts[chain - 1] + 1;
        if (!options.timing) d.wall_ms = 0.0;
        bool clean = d.chosen.has_value();
        if (clean) {
            const Configuration& cfg = d.checks[*d.chosen].config;
            // Only the current chain's bit affects the simulated dynamics;
            // later chains are reset before they are inspected.
            for (std::size_t j = chain; j <= spec.k; ++j) set_bit(j, cfg.bits[j - chain]);
        } else {
            set_bit(chain, false);
            out.chains[chain - 1] = ChainResult::skipped;
        }
        out.decisions.push_back(std::move(d));
        log(clean ? "decide_clean" : "decide_skip", 0.0);
        return clean;
    };

    log("start", 0.0);
    while (true) {
        const std::size_t chain = state < layout.damage() ? state / 4 + 1 : 0;
        const auto phase = static_cast<MissionPhase>(state % 4);
        if (chain != 0 && phase == MissionPhase::inspect) set_bit(chain, true);

        const auto step = simulate_step(truth, state, rng);
        if (!step) break;
        clock += step->dwell;
        out.energy_consumed += step->energy;

        if (phase == MissionPhase::cleaning) {
            beliefs.clean_exposure[chain - 1] += step->dwell;
            beliefs.damage_exposure += step->dwell;
            beliefs.fail_obs[chain - 1] = accumulate(beliefs.fail_obs[chain - 1], 0, step->dwell);
        }
        const std::size_t from = state;
        state = step->next;

        if (state == layout.damage()) {
            log("damage", step->energy);
            out.damaged = true;
            break;
        }
        if (state == layout.finish()) {
            log("finish", step->energy);
            break;
        }
        const auto to_phase = static_cast<MissionPhase>(state % 4);
        const auto from_phase = static_cast<MissionPhase>(from % 4);
        switch (from_phase) {
            case MissionPhase::inspect:
                if (to_phase == MissionPhase::cleaning) {
                    log("dirty", step->energy);
                    if (!decide(chain, MissionPhase::cleaning)) {
                        state = layout.state(chain, MissionPhase::travel);
                        log("skip", 0.0);
                    }
                } else {
                    if (out.chains[chain - 1] == ChainResult::unvisited) out.chains[chain - 1] = ChainResult::not_needed;
                    log("clean_already", step->energy);
                }
                break;
            case MissionPhase::cleaning:
                if (to_phase == MissionPhase::travel) {
                    out.chains[chain - 1] = ChainResult::cleaned;
                    log("cleaned", step->energy);
                } else {
                    beliefs.fail_obs[chain - 1] = accumulate(beliefs.fail_obs[chain - 1], 1, 0.0);
                    ++attempts[chain - 1];
                    log("failure", step->energy);
                    decide(chain, MissionPhase::prepare);
                }
                break;
            case MissionPhase::prepare: log(to_phase == MissionPhase::cleaning ? "retry" : "give_up", step->energy); break;
            case MissionPhase::travel: log("arrive", step->energy); break;
        }
    }
    out.duration = clock;
    return out;
}

std::string decisions_csv(const MissionOutcome& outcome) {
    std::ostringstream os;
    os << "chain,attempt,start,energy_left,configs_evaluated,feasible_count,chosen_config,r1_lo,r1_hi,r2_lo,r2_hi,"
          "wall_ms\n";
    for (const auto& d : outcome.decisions) {
        os << d.chain << ',' << d.attempt << ',' << to_string(d.start) << ',' << num(d.energy_left) << ','
           << d.checks.size() << ',' << d.feasible_count() << ',';
        if (d.chosen) {
            const auto& c = d.checks[*d.chosen];
            os << c.config.to_string() << ',' << num(c.r1.lo) << ',' << num(c.r1.hi) << ',' << num(c.r2.lo) << ','
               << num(c.r2.hi);
        } else {
            os << "skip,,,,";
        }
        os << ',' << num(d.wall_ms) << '\n';
    }
    return os.str();
}

std::string events_csv(const MissionOutcome& outcome) {
    std::ostringstream os;
    os << "time,state,event,energy\n";
    for (const auto& e : outcome.events) os << num(e.time) << ',' << e.state << ',' << e.event << ',' << num(e.energy) << '\n';
    return os.str();
}

std::string outcome_json(const MissionOutcome& outcome) {
    using detail::json;
    json j;
    json chains = json::array();
    for (auto c : outcome.chains) chains.push_back(to_string(c));
    j["chains"] = chains;
    j["terminal"] = outcome.damaged ? "damage" : "finish";
    j["E0"] = outcome.E0;
    j["energy_consumed"] = outcome.energy_consumed;
    j["duration"] = outcome.duration;
    j["decisions"] = outcome.decisions.size();
    json records = json::array();
    for (const auto& d : outcome.decisions) {
        json r;
        r["chain"] = d.chain;
        r["attempt"] = d.attempt;
        r["start"] = to_string(d.start);
        r["energy_left"] = d.energy_left;
        r["configs_evaluated"] = d.checks.size();
        json feasible = json::array();
        for (auto idx : d.feasible) feasible.push_back(d.checks[idx].config.to_string());
        r["feasible"] = feasible;
        r["chosen"] = d.chosen ? json(d.checks[*d.chosen].config.to_string()) : json("skip");
        r["wall_ms"] = d.wall_ms;
        records.push_back(std::move(r));
    }
    j["decision_records"] = records;
    return j.dump(2) + "\n";
}

}  // namespace rqv
