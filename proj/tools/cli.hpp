#pragma once

// Command-line front end. Kept as a library so tests can drive it in-process.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rqv/bipp.hpp"
#include "rqv/ipsp.hpp"
#include "rqv/mission.hpp"

namespace rqv::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 2;
inline constexpr int kVerificationError = 3;

/// Runs the tool on `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal text that reads back to the same double; "inf"/"-inf"/"nan"
/// for non-finite values.
std::string format_number(double v);

/// `points` values from lo to hi inclusive, evenly spaced or log-spaced.
std::vector<double> make_grid(double lo, double hi, std::size_t points, bool log);

/// CSV with columns t,lambda_l,lambda_u,method.
std::string bipp_curve_csv(const PartialPrior& prior, const std::vector<double>& ts, BippStrategy strategy);

/// Exposures inside [lo, hi] at which the closed-form pieces switch.
std::vector<double> case_switch_times(const PartialPrior& prior, double lo, double hi);

struct IpspRow {
    double t = 0.0;
    std::uint64_t n = 0;
    double lower = 0.0;
    double upper = 0.0;
    double mle = 0.0;
};

/// Bounds along a seeded Poisson stream of the given rate, reported at
/// `points` log-spaced times ending at `horizon`.
std::vector<IpspRow> ipsp_curve(const GammaPriorSet& prior, double rate, double horizon, std::size_t points,
                                std::uint64_t seed);

/// CSV with columns t,n,lower,upper,mle.
std::string ipsp_curve_csv(const std::vector<IpspRow>& rows);

/// Per-chain decision statistics over several runs: decision count,
/// configurations per decision and wall-time quartiles.
std::string mission_aggregate_csv(const std::vector<MissionOutcome>& runs, std::size_t k);

}  // namespace rqv::cli
