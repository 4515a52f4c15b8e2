#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "rqv/ctmc.hpp"
#include "rqv/property.hpp"

namespace rqv {

/// How R{..}[F target] treats runs that may never reach the target.
/// strict: +inf from any state that reaches the target with probability < 1.
/// until_absorption: reward accumulates until the target or any absorbing state.
enum class RewardSemantics { strict, until_absorption };

const char* to_string(RewardSemantics semantics);

/// Probability of `guard U target` from every state; no guard means true.
/// Throws InvalidArgument when no state carries `target`.
std::vector<double> reach_prob(const Ctmc& model, std::string_view target);
std::vector<double> until_prob(const Ctmc& model, std::optional<std::string_view> guard, std::string_view target);

/// Probability of `guard U<=t target` by uniformization.
std::vector<double> bounded_until_prob(const Ctmc& model, std::optional<std::string_view> guard, std::string_view target,
                                       double t);

/// Expected reward accumulated before reaching `target`. State rewards are
/// rates (earned per unit of sojourn time); transition rewards are earned per
/// jump. Throws NoAbsorption under until_absorption when a run from the
/// initial state can stay forever among non-absorbing, non-target states.
std::vector<double> reach_reward(const Ctmc& model, const RewardStructure& rewards, std::string_view target,
                                 RewardSemantics semantics);

/// Value of the property's query at the initial state. Throws InvalidArgument
/// for an unknown reward structure.
double evaluate(const Ctmc& model, const Property& property, RewardSemantics semantics);

struct ValueInterval {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t corners = 0;
    std::size_t samples = 0;
    std::size_t escapes = 0;
    /// Interval parameters left after discarding those unreachable from the
    /// initial state.
    std::size_t parameters = 0;
};

struct IntervalCheckOptions {
    RewardSemantics semantics = RewardSemantics::until_absorption;
    /// Extra uniformly drawn interior instantiations (0 = corners only).
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

constexpr std::size_t kMaxIntervalParameters = 20;

/// Range of the property's value over all rate instantiations, taken as the
/// min/max over the corners of the parameter box. Sampled points outside the
/// corner range widen it and are counted in `escapes`. Throws
/// TooManyIntervals when more than kMaxIntervalParameters remain.
ValueInterval check_interval(const IntervalCtmc& model, const Property& property,
                             const IntervalCheckOptions& options = {});

enum class Verdict { satisfied, violated, indeterminate };

const char* to_string(Verdict verdict);

/// Throws InvalidArgument when the property has no threshold. In robust mode
/// an indeterminate outcome is reported as violated.
Verdict evaluate_threshold(const ValueInterval& interval, const Property& property, bool robust = false);

}  // namespace rqv
