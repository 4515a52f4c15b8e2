#pragma once

// Floating-chain inspection and cleaning mission: interval CTMC generator,
// per-attempt reconfiguration controller and seeded simulator.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rqv/bipp.hpp"
#include "rqv/checker.hpp"
#include "rqv/ctmc.hpp"
#include "rqv/ipsp.hpp"
#include "rqv/random.hpp"

namespace rqv {

struct GroundTruth {
    std::vector<double> r_clean;  ///< per chain
    std::vector<double> r_fail;   ///< per chain
    double r_damage = 1e-9;
};

struct MissionSpec {
    std::size_t k = 6;
    double r_inspect = 1.0;
    double r_travel = 2.0;
    double r_prepare = 4.0;
    double p_c = 0.5;
    double e_ins = 1.0;
    double e_t = 2.0;
    double e_p = 1.0;
    std::vector<double> e_i;  ///< per-chain cleaning energy
    /// Initial energy budget. When unset it is calibrated to 1.5 times the
    /// worst-case expected energy of cleaning every chain at prior beliefs.
    std::optional<double> E0;
    double p_fail_max = 0.05;
    GroundTruth ground_truth;
    std::uint64_t seed = 0;
    /// Cap on the cleaning-rate upper bound, which is unbounded before any
    /// cleaning time has been observed.
    double max_rate = 50.0;
    /// Event-free exposure credited to the damage rate before the mission.
    double damage_exposure0 = 100.0;
    RewardSemantics reward_semantics = RewardSemantics::until_absorption;
    /// Interior samples per interval check, on top of the corners.
    std::size_t audit_samples = 0;

    /// Mission with the documented defaults for k chains.
    static MissionSpec defaults(std::size_t k = 6);
    /// Throws InvalidArgument when an invariant is broken.
    void validate() const;
};

MissionSpec load_mission_spec(const std::string& json_text);
std::string save_mission_spec(const MissionSpec& spec);

struct RateBeliefs {
    std::vector<PartialPrior> clean_prior;
    std::vector<double> clean_exposure;
    PartialPrior damage_prior;
    double damage_exposure = 0.0;
    std::vector<GammaPriorSet> fail_prior;
    std::vector<RateObservation> fail_obs;
};

/// Draws independent priors for every chain's cleaning and failure rates and
/// one prior for the shared damage rate, from the ranges used in the case study.
RateBeliefs sample_case_study_priors(std::size_t k, Rng& rng);

/// Cleaning choice for chains first..k; bits[0] belongs to chain `first`.
struct Configuration {
    std::size_t first = 1;
    std::vector<bool> bits;

    std::size_t cleaned() const;
    /// Bits as a string of '0'/'1', current chain first.
    std::string to_string() const;
    bool operator==(const Configuration&) const = default;
};

/// All 2^(k-i) configurations with chain i cleaned. Index 0 cleans every
/// chain; the remaining bits follow the binary complement of the index.
std::vector<Configuration> enumerate_configurations(std::size_t k, std::size_t i);

enum class MissionPhase { inspect, cleaning, prepare, travel };
const char* to_string(MissionPhase phase);

/// Layout shared by every mission model: four states per chain from the
/// first modelled chain onwards, then Damage and Finish.
struct MissionLayout {
    std::size_t first = 1;
    std::size_t k = 1;

    std::size_t state_count() const { return 4 * (k - first + 1) + 2; }
    std::size_t state(std::size_t chain, MissionPhase phase) const {
        return 4 * (chain - first) + static_cast<std::size_t>(phase);
    }
    std::size_t damage() const { return 4 * (k - first + 1); }
    std::size_t finish() const { return damage() + 1; }
    std::string name(std::size_t state) const;
};

/// Rate intervals the beliefs currently support for chain j and for damage.
RateInterval clean_rate_interval(const MissionSpec& spec, const RateBeliefs& beliefs, std::size_t chain);
RateInterval fail_rate_interval(const RateBeliefs& beliefs, std::size_t chain);
RateInterval damage_rate_interval(const MissionSpec& spec, const RateBeliefs& beliefs);

/// Interval CTMC of the rest of the mission from chain config.first, starting
/// in the given phase of that chain. Rewards "energy" (per transition) and
/// "time" (state reward 1).
IntervalCtmc build_mission_ctmc(const MissionSpec& spec, const RateBeliefs& beliefs, const Configuration& config,
                                MissionPhase start);

/// Point CTMC of the whole mission with ground-truth rates, starting at Inspect_1.
Ctmc build_ground_truth_ctmc(const MissionSpec& spec, const std::vector<bool>& bits);

Property r1_property(const MissionSpec& spec);
Property r2_property(double energy_left);

struct ConfigCheck {
    Configuration config;
    ValueInterval r1;
    ValueInterval r2;
    bool r2_no_absorption = false;
    bool feasible = false;
};

struct Decision {
    std::size_t chain = 0;
    std::size_t attempt = 1;
    MissionPhase start = MissionPhase::cleaning;
    double energy_left = 0.0;
    std::vector<ConfigCheck> checks;
    std::vector<std::size_t> feasible;  ///< indices into checks
    std::optional<std::size_t> chosen;  ///< index into checks; empty means skip
    double wall_ms = 0.0;

    std::size_t feasible_count() const { return feasible.size(); }
};

/// Checks every configuration at chain i and picks a feasible one that cleans
/// the most chains (uniform tie-break drawn from rng only when tied).
/// Returns a decision with no choice when nothing is feasible.
Decision controller_decide(const MissionSpec& spec, const RateBeliefs& beliefs, std::size_t chain,
                           MissionPhase start, double energy_left, Rng& rng);

struct StepResult {
    std::size_t next = 0;
    double dwell = 0.0;
    double energy = 0.0;
};

/// One jump of the point model. Returns nothing from an absorbing state.
std::optional<StepResult> simulate_step(const Ctmc& model, std::size_t state, Rng& rng);

enum class ChainResult { cleaned, skipped, not_needed, unvisited };
const char* to_string(ChainResult result);

struct MissionEvent {
    double time = 0.0;
    std::string state;
    std::string event;
    double energy = 0.0;
};

struct MissionOutcome {
    std::vector<ChainResult> chains;
    bool damaged = false;
    double E0 = 0.0;
    double energy_consumed = 0.0;
    double duration = 0.0;
    std::vector<MissionEvent> events;
    std::vector<Decision> decisions;
};

struct MissionOptions {
    /// Record wall-clock time per decision (off for byte-identical replays).
    bool timing = true;
};

/// E0 used by run_mission when MissionSpec::E0 is unset.
double calibrate_energy_budget(const MissionSpec& spec, const RateBeliefs& beliefs);

MissionOutcome run_mission(const MissionSpec& spec, const MissionOptions& options = {});

/// Writers for decisions.csv, events.csv and outcome.json.
std::string decisions_csv(const MissionOutcome& outcome);
std::string events_csv(const MissionOutcome& outcome);
std::string outcome_json(const MissionOutcome& outcome);

}  // namespace rqv
