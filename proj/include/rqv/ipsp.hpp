#pragma once

// Posterior-rate bounds for regular (observed) events under a set of Gamma
// priors with uncertain strength t0 and mean rate lambda0.

#include <cstddef>
#include <cstdint>
#include <string>

namespace rqv {

/// Events counted and time observed for one rate.
struct RateObservation {
    std::uint64_t n = 0;
    double t = 0.0;
    bool operator==(const RateObservation&) const = default;
};

/// Componentwise sum. Throws InvalidArgument on negative or non-finite delta_t.
RateObservation accumulate(RateObservation obs, std::uint64_t delta_n, double delta_t);

/// Forget all observations (used when the rate is believed to have changed).
inline RateObservation reset(const RateObservation&) { return {}; }

class GammaPriorSet {
public:
    /// Requires 0 < t0_lo <= t0_hi and 0 < lambda0_lo <= lambda0_hi, all finite.
    GammaPriorSet(double t0_lo, double t0_hi, double lambda0_lo, double lambda0_hi);

    double t0_lo() const noexcept { return t0_lo_; }
    double t0_hi() const noexcept { return t0_hi_; }
    double lambda0_lo() const noexcept { return lambda0_lo_; }
    double lambda0_hi() const noexcept { return lambda0_hi_; }

    bool operator==(const GammaPriorSet&) const = default;

private:
    double t0_lo_;
    double t0_hi_;
    double lambda0_lo_;
    double lambda0_hi_;
};

/// Parses {"t0":[lo,hi],"lambda0":[lo,hi]}.
GammaPriorSet load_gamma_prior(const std::string& json_text);

struct IpspBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Conjugate posterior mean (t0 lambda0 + n) / (t0 + t).
double posterior_point(double t0, double lambda0, const RateObservation& obs);

/// Exact extrema of posterior_point over the prior box. With no exposure and
/// no events the prior rate interval is returned.
IpspBounds ipsp_bounds(const GammaPriorSet& prior, const RateObservation& obs);

/// Min and max of posterior_point over a resolution x resolution grid
/// spanning the prior box, endpoints included. Throws InvalidArgument when
/// resolution < 50.
IpspBounds ipsp_grid_oracle(const GammaPriorSet& prior, const RateObservation& obs, std::size_t resolution);

}  // namespace rqv
