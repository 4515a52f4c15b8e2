// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cli.hpp"
#include "rqv/bipp.hpp"
#include "rqv/checker.hpp"
#include "rqv/error.hpp"
#include "rqv/ipsp.hpp"
#include "rqv/mission.hpp"
#include "test_models.hpp"

using namespace rqv;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel_diff(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

struct Result {
    bool pass = true;
    std::string detail;
};

// 1. Closed form encloses the numeric optimum, which matches the grid oracle.
Result criterion1() {
    const auto start = Clock::now();
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_grid = 0.0;
    double worst_enclosure = 0.0;
    std::size_t cases = 0;
    for (int k = 0; k < 100; ++k) {
        const double e1 = std::pow(10.0, -5.0 + 4.0 * u(gen));
        const double e2 = e1 * (1.5 + 20.0 * u(gen));
        const double a = 0.05 + u(gen);
        const double b = 0.05 + u(gen);
        const double c = 0.05 + u(gen);
        const double s = a + b + c;
        const PartialPrior prior({0.0, e1, e2, kInf}, {a / s, b / s, c / s});
        for (double t : {10.0, 1e3, 1e5}) {
            const auto closed = bipp_closed_form_m3(prior, t);
            const double lo = bipp_lower_numeric(prior, t);
            const double hi = bipp_upper_numeric(prior, t);
            const auto grid = bipp_grid_oracle(prior, t, 24);
            worst_grid = std::max({worst_grid, rel_diff(lo, grid.lower), rel_diff(hi, grid.upper)});
            // Enclosure violation, relative to the numeric value.
            worst_enclosure = std::max({worst_enclosure, (closed.lower - lo) / hi, (hi - closed.upper) / hi});
            ++cases;
        }
    }
    const double elapsed = seconds_since(start);
    // Both optima are computed in floating point; allow rounding-level overlap.
    const bool pass = worst_grid <= 1e-6 && worst_enclosure <= 1e-12 && elapsed < 30.0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu cases, max rel diff vs grid %.2e, max enclosure violation %.2e, %.1f s", cases,
                  worst_grid, std::max(0.0, worst_enclosure), elapsed);
    return {pass, buf};
}

// 2. Two-band plateau.
Result criterion2() {
    bool pass = true;
    double worst = 0.0;
    std::size_t points = 0;
    for (double th1 : {0.3, 0.5}) {
        for (double e1 : {1.0 / 500, 1.0 / 5000}) {
            const PartialPrior prior({0.0, e1, kInf}, {th1, 1.0 - th1});
            auto ts = rqv::cli::make_grid(1.0 / e1, 1e6, 200, true);
            ts.push_back(1.0 / e1);
            for (double t : ts) {
                const auto b = bipp_bounds(prior, t);
                if (b.lower != 0.0) pass = false;
                worst = std::max(worst, std::abs(b.upper - e1 / th1));
                ++points;
            }
        }
    }
    pass = pass && worst <= 1e-9;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu points, lower identically zero: %s, max |upper - eps1/theta1| %.2e", points,
                  pass ? "yes" : "check", worst);
    return {pass, buf};
}

// 3. Three-band asymptote and monotone upper bound.
Result criterion3() {
    bool pass = true;
    double worst = 0.0;
    const double e1 = 1.0 / 5000;
    const double e2 = 1.0 / 1000;
    const auto ts = rqv::cli::make_grid(1.0, 1e6, 400, true);
    for (double th1 : {0.1, 0.3, 0.6, 0.8}) {
        const double th2 = 0.1;
        const PartialPrior prior({0.0, e1, e2, kInf}, {th1, th2, 1.0 - th1 - th2});
        const double target = e1 * (th1 + th2) / th1;
        worst = std::max(worst, rel_diff(bipp_bounds(prior, 100.0 / e1).upper, target));
        double prev = kInf;
        for (double t : ts) {
            const double up = bipp_bounds(prior, t).upper;
            if (up > prev) pass = false;
            prev = up;
        }
    }
    const bool mono = pass;
    pass = pass && worst <= 0.01;
    char buf[160];
    std::snprintf(buf, sizeof buf, "max rel error at t=100/eps1 %.3e, upper non-increasing: %s", worst, mono ? "yes" : "no");
    return {pass, buf};
}

// Independent grid for the conjugate posterior mean (n + t0 l0) / (t0 + t).
IpspBounds ipsp_grid(double t0lo, double t0hi, double l0lo, double l0hi, double n, double t, int res) {
    IpspBounds b{kInf, -kInf};
    for (int i = 0; i < res; ++i) {
        const double t0 = t0lo + (t0hi - t0lo) * i / (res - 1);
        for (int j = 0; j < res; ++j) {
            const double l0 = l0lo + (l0hi - l0lo) * j / (res - 1);
            const double v = (n + t0 * l0) / (t0 + t);
            b.lower = std::min(b.lower, v);
            b.upper = std::max(b.upper, v);
        }
    }
    return b;
}

// 4. Exact IPSP bounds against a dense grid.
Result criterion4() {
    const auto start = Clock::now();
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    // Lower bound: is the observed rate above or below the lower prior mean;
    // upper bound likewise against the upper prior mean.
    std::size_t lower_above = 0;
    std::size_t lower_below = 0;
    std::size_t upper_above = 0;
    std::size_t upper_below = 0;
    for (int k = 0; k < 1000; ++k) {
        const double t0lo = 1.0 + 100.0 * u(gen);
        const double t0hi = t0lo * (1.0 + 3.0 * u(gen));
        const double l0lo = 0.1 + 5.0 * u(gen);
        const double l0hi = l0lo * (1.0 + u(gen));
        const double t = 200.0 * u(gen);
        // Observed rate anywhere from well below to well above the prior box.
        const double rate = (l0lo + l0hi) / 2.0 * 3.0 * u(gen);
        const auto n = static_cast<std::uint64_t>(std::floor(rate * t));
        const auto exact = ipsp_bounds(GammaPriorSet(t0lo, t0hi, l0lo, l0hi), RateObservation{n, t});
        const auto grid = ipsp_grid(t0lo, t0hi, l0lo, l0hi, static_cast<double>(n), t, 400);
        worst = std::max({worst, std::abs(exact.lower - grid.lower), std::abs(exact.upper - grid.upper)});
        const double nd = static_cast<double>(n);
        (nd >= l0lo * t ? lower_above : lower_below) += 1;
        (nd >= l0hi * t ? upper_above : upper_below) += 1;
    }
    const double elapsed = seconds_since(start);
    const bool covered = lower_above && lower_below && upper_above && upper_below;
    const bool pass = worst <= 1e-9 && covered && elapsed < 10.0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "1000 instances, max abs diff %.2e, branches %zu/%zu/%zu/%zu, %.2f s", worst,
                  lower_above, lower_below, upper_above, upper_below, elapsed);
    return {pass, buf};
}

// 5. Convergence along seeded Poisson streams.
Result criterion5() {
    const GammaPriorSet prior(1000, 1000, 2, 4);
    int good = 0;
    double widest = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto rows = rqv::cli::ipsp_curve(prior, 3.0, 1e4, 50, seed);
        const auto& last = rows.back();
        const double width = last.upper - last.lower;
        widest = std::max(widest, width);
        if (width < 0.3 && last.lower <= 3.0 && 3.0 <= last.upper && last.t == 1e4) ++good;
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "%d of 10 seeds, widest final interval %.4f", good, widest);
    return {good >= 9, buf};
}

// 6. Checker against closed forms and simulation.
Result criterion6() {
    const double race = reach_prob(rqv::testing::race_model(), "a")[0];

    Matrix r(2, 2);
    r(0, 1) = 0.5;
    auto time = RewardStructure::zeros("time", 2);
    time.state_rewards = {1.0, 1.0};
    const Ctmc expo(r, StateId{0}, {{}, {"a"}}, {time});
    const double mean_time = reach_reward(expo, time, "a", RewardSemantics::strict)[0];

    double worst_bounded = 0.0;
    for (double lambda : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        for (double t : {0.1, 0.5, 1.0, 3.0}) {
            Matrix q(2, 2);
            q(0, 1) = lambda;
            const Ctmc m(q, StateId{0}, {{}, {"a"}});
            const double v = bounded_until_prob(m, std::nullopt, "a", t)[0];
            worst_bounded = std::max(worst_bounded, std::abs(v - (1.0 - std::exp(-lambda * t))));
        }
    }

    std::mt19937_64 gen(606);
    int agree = 0;
    double worst_sigma = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Ctmc m = rqv::testing::random_absorbing_model(8, gen);
        const double exact = reach_prob(m, "goal")[0];
        const auto mc = rqv::testing::simulate_reach(m, "goal", 100000, 1000 + k);
        const double dev = std::abs(mc.mean - exact);
        const double sigma = std::max(mc.stderr_, 1e-12);
        worst_sigma = std::max(worst_sigma, dev / sigma);
        if (dev <= 3.0 * sigma) ++agree;
    }
    const bool pass = std::abs(race - 0.4) <= 1e-12 && std::abs(mean_time - 2.0) <= 1e-12 && worst_bounded <= 1e-8 &&
                      agree == 20;
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "race err %.1e, mean-time err %.1e, bounded max err %.1e, simulation %d/20 within 3 sigma (max %.2f)",
                  std::abs(race - 0.4), std::abs(mean_time - 2.0), worst_bounded, agree, worst_sigma);
    return {pass, buf};
}

IntervalCtmc random_interval_model(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 3 + gen() % 4;
    std::vector<LabelSet> labels(n);
    labels[n - 1].insert("goal");
    if (n > 3) labels[n - 2].insert("trap");
    auto cost = RewardStructure::zeros("cost", n);
    std::vector<std::tuple<std::size_t, std::size_t, RateInterval>> edges;
    std::size_t intervals = 0;
    const std::size_t live = n > 3 ? n - 2 : n - 1;
    for (std::size_t s = 0; s < live; ++s) {
        bool any = false;
        for (std::size_t v = 0; v < n; ++v) {
            if (v == s || u(gen) > 0.5) continue;
            const double lo = 0.1 + 4.0 * u(gen);
            const bool wide = intervals < 5 && u(gen) < 0.6;
            const double hi = wide ? lo * (1.0 + 2.0 * u(gen)) : lo;
            if (wide) ++intervals;
            edges.emplace_back(s, v, RateInterval{lo, hi, {}});
            cost.transition_rewards(s, v) = 5.0 * u(gen);
            any = true;
        }
        if (!any) edges.emplace_back(s, n - 1, RateInterval{1.0, 2.0, {}});
        cost.state_rewards[s] = u(gen);
    }
    IntervalCtmc out(n, StateId{0}, labels, {cost});
    for (auto& [a, b, ri] : edges) out.set_rate(a, b, ri);
    return out;
}

// 7. Sampled instantiations never leave the corner interval.
Result criterion7() {
    IntervalCheckOptions opt;
    opt.samples = 200;
    opt.semantics = RewardSemantics::until_absorption;
    std::size_t escapes = 0;
    std::size_t checks = 0;
    std::size_t skipped = 0;
    std::mt19937_64 gen(31);
    const Property reach = parse_property(R"(P=? [ F "goal" ])");
    const Property reward = parse_property(R"(R{"cost"}=? [ F "goal" ])");
    for (int k = 0; k < 50; ++k) {
        const auto m = random_interval_model(gen);
        for (const auto* p : {&reach, &reward}) {
            opt.seed = 100 * k + (p == &reach ? 0 : 1);
            try {
                escapes += check_interval(m, *p, opt).escapes;
                ++checks;
            } catch (const NoAbsorption&) {
                ++skipped;
            }
        }
    }
    const std::size_t random_checks = checks;

    // Mission family: every chain, both decision points, a spread of configurations.
    const auto spec = MissionSpec::defaults(6);
    Rng rng(5);
    auto beliefs = sample_case_study_priors(6, rng);
    beliefs.clean_exposure[0] = 3.0;
    beliefs.fail_obs[0] = RateObservation{2, 3.0};
    beliefs.damage_exposure = 3.0;
    for (std::size_t chain = 1; chain <= 6; ++chain) {
        const auto configs = enumerate_configurations(6, chain);
        for (std::size_t c : {std::size_t{0}, configs.size() / 2, configs.size() - 1}) {
            for (MissionPhase start : {MissionPhase::cleaning, MissionPhase::prepare}) {
                const auto m = build_mission_ctmc(spec, beliefs, configs[c], start);
                opt.seed = 7 * chain + c;
                escapes += check_interval(m, r1_property(spec), opt).escapes;
                escapes += check_interval(m, r2_property(1e9), opt).escapes;
                checks += 2;
            }
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu interval checks (%zu random, %zu without absorption skipped), %zu escapes",
                  checks, random_checks, skipped, escapes);
    return {escapes == 0, buf};
}

// 8 and 9. Ten seeded k=6 missions.
std::pair<Result, Result> criteria8and9() {
    const auto start = Clock::now();
    bool terminate = true;
    bool counts = true;
    bool monotone = true;
    bool ledger = true;
    int trend_ok = 0;
    std::size_t decisions = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto spec = MissionSpec::defaults(6);
        spec.seed = seed;
        const auto out = run_mission(spec);
        const auto& last = out.events.back().event;
        if (last != "finish" && last != "damage") terminate = false;
        for (auto c : out.chains) {
            if (!out.damaged && c == ChainResult::unvisited) terminate = false;
        }

        double consumed = 0.0;
        for (const auto& e : out.events) consumed += e.energy;
        if (consumed != out.energy_consumed) ledger = false;

        std::map<std::size_t, std::pair<double, std::size_t>> per_chain;
        for (std::size_t i = 0; i < out.decisions.size(); ++i) {
            const auto& d = out.decisions[i];
            ++decisions;
            if (d.checks.size() != (std::size_t{1} << (6 - d.chain))) counts = false;
            if (i > 0 && out.decisions[i - 1].chain == d.chain &&
                d.feasible_count() > out.decisions[i - 1].feasible_count()) {
                monotone = false;
            }
            per_chain[d.chain].first += d.wall_ms;
            per_chain[d.chain].second += 1;
        }
        bool trend = true;
        double prev = kInf;
        for (const auto& [chain, acc] : per_chain) {
            const double mean = acc.first / static_cast<double>(acc.second);
            if (mean > prev) trend = false;
            prev = mean;
        }
        if (trend) ++trend_ok;
    }
    const double elapsed = seconds_since(start);
    char buf8[240];
    std::snprintf(buf8, sizeof buf8,
                  "10 runs, %zu decisions; terminated %s, config counts %s, feasible sets monotone %s, ledger %s, %.1f s",
                  decisions, terminate ? "ok" : "FAIL", counts ? "ok" : "FAIL", monotone ? "ok" : "FAIL",
                  ledger ? "ok" : "FAIL", elapsed);
    char buf9[120];
    std::snprintf(buf9, sizeof buf9, "%d of 10 runs with non-increasing mean wall time per decision by chain", trend_ok);
    return {{terminate && counts && monotone && ledger && elapsed < 120.0, buf8}, {trend_ok >= 9, buf9}};
}

}  // namespace

int main() {
    std::vector<std::function<Result()>> early = {criterion1, criterion2, criterion3, criterion4,
                                                  criterion5, criterion6, criterion7};
    std::vector<Result> results;
    for (auto& f : early) results.push_back(f());
    auto [r8, r9] = criteria8and9();
    results.push_back(r8);
    results.push_back(r9);
    bool all = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        std::printf("criterion %zu: %s  %s\n", i + 1, results[i].pass ? "PASS" : "FAIL", results[i].detail.c_str());
        all = all && results[i].pass;
    }
    return all ? 0 : 1;
}
