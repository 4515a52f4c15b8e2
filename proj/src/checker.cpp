#include "rqv/checker.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <string>

#include "rqv/error.hpp"
#include "rqv/linalg.hpp"
#include "rqv/random.hpp"

namespace rqv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPoissonTail = 1e-10;

std::vector<bool> require_label(const Ctmc& model, std::string_view label) {
    auto mask = model.label_mask(label);
    if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
        throw InvalidArgument("no state carries label \"" + std::string(label) + "\"");
    }
    return mask;
}

// States that can reach a `goal` state moving only through `through` states
// (goal states themselves are always included).
std::vector<bool> backward_reach(const Ctmc& model, const std::vector<bool>& goal, const std::vector<bool>& through) {
    const std::size_t n = model.state_count();
    std::vector<bool> seen(goal);
    std::deque<std::size_t> queue;
    for (std::size_t s = 0; s < n; ++s) {
        if (goal[s]) queue.push_back(s);
    }
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t u = 0; u < n; ++u) {
            if (!seen[u] && through[u] && model.rate(u, v) > 0.0) {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    return seen;
}

// Solves x_s = b_s + sum_{s' in unknown} P(s, s') x_s' for the `unknown`
// states, with P the jump chain. Other entries of `known` are fixed values
// already folded into b by the caller. One step of iterative refinement
// keeps the residual at round-off level.
void solve_unknowns(const Ctmc& model, const std::vector<bool>& unknown, const std::vector<double>& b,
                    std::vector<double>& x) {
    const std::size_t n = model.state_count();
    std::vector<std::size_t> idx;
    std::vector<std::size_t> pos(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
        if (unknown[s]) {
            pos[s] = idx.size();
            idx.push_back(s);
        }
    }
    if (idx.empty()) return;
    const std::size_t m = idx.size();
    Matrix a(m, m);
    std::vector<double> rhs(m);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t s = idx[r];
        const double e = exit_rate(model, StateId{s});
        a(r, r) = 1.0;
        for (std::size_t c = 0; c < m; ++c) {
            if (c != r) a(r, c) -= model.rate(s, idx[c]) / e;
        }
        rhs[r] = b[s];
    }
    std::vector<double> sol = solve_dense(a, rhs);
    std::vector<double> res(m);
    for (std::size_t r = 0; r < m; ++r) {
        double ax = 0.0;
        for (std::size_t c = 0; c < m; ++c) ax += a(r, c) * sol[c];
        res[r] = rhs[r] - ax;
    }
    const std::vector<double> corr = solve_dense(a, res);
    for (std::size_t r = 0; r < m; ++r) x[idx[r]] = sol[r] + corr[r];
}

std::vector<bool> guard_mask(const Ctmc& model, std::optional<std::string_view> guard) {
    if (!guard) return std::vector<bool>(model.state_count(), true);
    return model.label_mask(*guard);
}

std::vector<bool> reachable_from(const IntervalCtmc& model) {
    const std::size_t n = model.state_count();
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> queue{model.initial().index};
    seen[model.initial().index] = true;
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t v = 0; v < n; ++v) {
            if (!seen[v] && model.rate(u, v).hi > 0.0) {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    return seen;
}

}  // namespace

const char* to_string(RewardSemantics semantics) {
    return semantics == RewardSemantics::strict ? "strict" : "until-absorption";
}

const char* to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::satisfied: return "satisfied";
        case Verdict::violated: return "violated";
        case Verdict::indeterminate: return "indeterminate";
    }
    return "unknown";
}

std::vector<double> reach_prob(const Ctmc& model, std::string_view target) {
    return until_prob(model, std::nullopt, target);
}

std::vector<double> until_prob(const Ctmc& model, std::optional<std::string_view> guard, std::string_view target) {
    const std::size_t n = model.state_count();
    const auto goal = require_label(model, target);
    const auto through = guard_mask(model, guard);
    const auto positive = backward_reach(model, goal, through);

    std::vector<double> x(n, 0.0);
    std::vector<bool> unknown(n, false);
    std::vector<double> b(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        if (goal[s]) {
            x[s] = 1.0;
        } else if (positive[s]) {
            unknown[s] = true;
        }
    }
    for (std::size_t s = 0; s < n; ++s) {
        if (!unknown[s]) continue;
        const double e = exit_rate(model, StateId{s});
        for (std::size_t v = 0; v < n; ++v) {
            if (goal[v]) b[s] += model.rate(s, v) / e;
        }
    }
    solve_unknowns(model, unknown, b, x);
    for (double& v : x) v = std::clamp(v, 0.0, 1.0);
    return x;
}

std::vector<double> bounded_until_prob(const Ctmc& model, std::optional<std::string_view> guard,
                                       std::string_view target, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("time bound must be finite and non-negative");
    const std::size_t n = model.state_count();
    const auto goal = require_label(model, target);
    const auto through = guard_mask(model, guard);

    // Target states and guard-violating states stop the process.
    std::vector<bool> active(n, false);
    double max_exit = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        active[s] = !goal[s] && through[s];
        if (active[s]) max_exit = std::max(max_exit, exit_rate(model, StateId{s}));
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) x[s] = goal[s] ? 1.0 : 0.0;
    if (t == 0.0 || max_exit == 0.0) return x;

    const double q = 1.02 * max_exit;
    const double qt = q * t;
    Matrix p(n, n);
    for (std::size_t s = 0; s < n; ++s) {
        if (!active[s]) {
            p(s, s) = 1.0;
            continue;
        }
        double out = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            if (v == s) continue;
            p(s, v) = model.rate(s, v) / q;
            out += p(s, v);
        }
        p(s, s) = 1.0 - out;
    }

    std::vector<double> result(n, 0.0);
    std::vector<double> next(n);
    double cumulative = 0.0;
    const auto k_cap = static_cast<std::size_t>(qt + 20.0 * std::sqrt(qt) + 100.0);
    for (std::size_t k = 0; k <= k_cap; ++k) {
        const double log_w = -qt + static_cast<double>(k) * std::log(qt) - std::lgamma(static_cast<double>(k) + 1.0);
        const double w = std::exp(log_w);
        for (std::size_t s = 0; s < n; ++s) result[s] += w * x[s];
        cumulative += w;
        if (cumulative >= 1.0 - kPoissonTail && static_cast<double>(k) >= qt) break;
        for (std::size_t s = 0; s < n; ++s) {
            double acc = 0.0;
            for (std::size_t v = 0; v < n; ++v) acc += p(s, v) * x[v];
            next[s] = acc;
        }
        x.swap(next);
    }
    for (double& v : result) v = std::clamp(v, 0.0, 1.0);
    return result;
}

std::vector<double> reach_reward(const Ctmc& model, const RewardStructure& rewards, std::string_view target,
                                 RewardSemantics semantics) {
    const std::size_t n = model.state_count();
    rewards.validate(n);
    const auto goal = require_label(model, target);
    const std::vector<bool> all(n, true);

    std::vector<bool> stop(goal);
    if (semantics == RewardSemantics::until_absorption) {
        for (std::size_t s = 0; s < n; ++s) {
            if (exit_rate(model, StateId{s}) == 0.0) stop[s] = true;
        }
    }
    // States from which the stop set is not reached almost surely: those that
    // can wander (avoiding the stop set) into a state with no path to it.
    const auto can_stop = backward_reach(model, stop, all);
    std::vector<bool> doomed(n, false);
    for (std::size_t s = 0; s < n; ++s) doomed[s] = !can_stop[s];
    std::vector<bool> not_stop(n);
    for (std::size_t s = 0; s < n; ++s) not_stop[s] = !stop[s];
    const auto infinite = backward_reach(model, doomed, not_stop);

    if (semantics == RewardSemantics::until_absorption && infinite[model.initial().index]) {
        throw NoAbsorption("runs from the initial state can avoid absorption forever");
    }

    std::vector<double> x(n, 0.0);
    std::vector<bool> unknown(n, false);
    std::vector<double> b(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        if (stop[s]) continue;
        if (infinite[s]) {
            x[s] = kInf;
            continue;
        }
        unknown[s] = true;
        const double e = exit_rate(model, StateId{s});
        b[s] = rewards.state_rewards[s] / e;
        for (std::size_t v = 0; v < n; ++v) {
            if (v != s) b[s] += model.rate(s, v) / e * rewards.transition_rewards(s, v);
        }
    }
    solve_unknowns(model, unknown, b, x);
    for (double& v : x) v = std::max(v, 0.0);
    return x;
}

double evaluate(const Ctmc& model, const Property& property, RewardSemantics semantics) {
    const std::size_t s0 = model.initial().index;
    std::optional<std::string_view> guard;
    if (property.guard) guard = *property.guard;
    switch (property.kind) {
        case QueryKind::prob_reach: return until_prob(model, guard, property.target)[s0];
        case QueryKind::prob_bounded_until:
            return bounded_until_prob(model, guard, property.target, property.time_bound.value_or(0.0))[s0];
        case QueryKind::reward_reach: {
            const RewardStructure* r = model.reward(property.reward_name);
            if (r == nullptr) throw InvalidArgument("unknown reward structure \"" + property.reward_name + "\"");
            return reach_reward(model, *r, property.target, semantics)[s0];
        }
    }
    return 0.0;
}

ValueInterval check_interval(const IntervalCtmc& model, const Property& property,
                             const IntervalCheckOptions& options) {
    const auto reachable = reachable_from(model);
    std::vector<IntervalParameter> live;
    std::map<std::string, double> values;
    for (auto& param : model.parameters()) {
        const bool relevant = std::any_of(param.entries.begin(), param.entries.end(),
                                          [&](const Transition& tr) { return reachable[tr.from]; });
        values[param.name] = param.lo;
        if (relevant) live.push_back(std::move(param));
    }
    if (live.size() > kMaxIntervalParameters) {
        throw TooManyIntervals(std::to_string(live.size()) + " interval parameters exceed the limit of " +
                               std::to_string(kMaxIntervalParameters));
    }

    ValueInterval out;
    out.parameters = live.size();
    out.lo = kInf;
    out.hi = -kInf;
    const std::size_t corners = std::size_t{1} << live.size();
    for (std::size_t mask = 0; mask < corners; ++mask) {
        for (std::size_t i = 0; i < live.size(); ++i) {
            values[live[i].name] = (mask >> i) & 1 ? live[i].hi : live[i].lo;
        }
        const double v = evaluate(instantiate_parameters(model, values), property, options.semantics);
        out.lo = std::min(out.lo, v);
        out.hi = std::max(out.hi, v);
    }
    out.corners = corners;

    Rng rng(options.seed);
    for (std::size_t k = 0; k < options.samples; ++k) {
        for (const auto& param : live) values[param.name] = rng.uniform(param.lo, param.hi);
        const double v = evaluate(instantiate_parameters(model, values), property, options.semantics);
        ++out.samples;
        // Differences at round-off level are not reported as escapes.
        const double slack = 1e-9 * std::max({1.0, std::abs(out.lo), std::abs(out.hi)});
        if (v < out.lo - slack || v > out.hi + slack) ++out.escapes;
        out.lo = std::min(out.lo, v);
        out.hi = std::max(out.hi, v);
    }
    return out;
}

Verdict evaluate_threshold(const ValueInterval& interval, const Property& property, bool robust) {
    if (!property.threshold) throw InvalidArgument("property has no threshold");
    const auto [cmp, bound] = *property.threshold;
    const bool lo_ok = compare(interval.lo, cmp, bound);
    const bool hi_ok = compare(interval.hi, cmp, bound);
    if (lo_ok && hi_ok) return Verdict::satisfied;
    if (!lo_ok && !hi_ok) return Verdict::violated;
    return robust ? Verdict::violated : Verdict::indeterminate;
}

}  // namespace rqv
