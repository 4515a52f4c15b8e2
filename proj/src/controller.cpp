#include <chrono>
#include <limits>

#include "rqv/error.hpp"
#include "rqv/mission.hpp"

namespace rqv {

Decision controller_decide(const MissionSpec& spec, const RateBeliefs& beliefs, std::size_t chain,
                           MissionPhase start, double energy_left, Rng& rng) {
    const auto started = std::chrono::steady_clock::now();
    Decision d;
    d.chain = chain;
    d.start = start;
    d.energy_left = energy_left;

    const Property r1 = r1_property(spec);
    const Property r2 = r2_property(energy_left);
    IntervalCheckOptions options;
    options.semantics = spec.reward_semantics;
    options.samples = spec.audit_samples;
    options.seed = spec.seed;

    std::size_t best_cleaned = 0;
    for (auto& config : enumerate_configurations(spec.k, chain)) {
        ConfigCheck check;
        const IntervalCtmc model = build_mission_ctmc(spec, beliefs, config, start);
        check.config = std::move(config);
        check.r1 = check_interval(model, r1, options);
        bool ok = evaluate_threshold(check.r1, r1, true) == Verdict::satisfied;
        try {
            check.r2 = check_interval(model, r2, options);
            ok = ok && evaluate_threshold(check.r2, r2, true) == Verdict::satisfied;
        } catch (const NoAbsorption&) {
            const double inf = std::numeric_limits<double>::infinity();
            check.r2.lo = inf;
            check.r2.hi = inf;
            check.r2_no_absorption = true;
            ok = false;
        }
        check.feasible = ok;
        if (ok) {
            d.feasible.push_back(d.checks.size());
            best_cleaned = std::max(best_cleaned, check.config.cleaned());
        }
        d.checks.push_back(std::move(check));
    }

    std::vector<std::size_t> best;
    for (std::size_t idx : d.feasible) {
        if (d.checks[idx].config.cleaned() == best_cleaned) best.push_back(idx);
    }
    if (best.size() == 1) {
        d.chosen = best.front();
    } else if (best.size() > 1) {
        d.chosen = best[rng.index(best.size())];
    }
    d.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return d;
}

}  // namespace rqv
