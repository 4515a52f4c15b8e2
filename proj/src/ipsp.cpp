#include "rqv/ipsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json_util.hpp"
#include "rqv/error.hpp"

namespace rqv {

RateObservation accumulate(RateObservation obs, std::uint64_t delta_n, double delta_t) {
    if (!(delta_t >= 0.0) || !std::isfinite(delta_t)) throw InvalidArgument("exposure increment must be finite and >= 0");
    obs.n += delta_n;
    obs.t += delta_t;
    return obs;
}

GammaPriorSet::GammaPriorSet(double t0_lo, double t0_hi, double lambda0_lo, double lambda0_hi)
    : t0_lo_(t0_lo), t0_hi_(t0_hi), lambda0_lo_(lambda0_lo), lambda0_hi_(lambda0_hi) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(t0_lo) || !finite(t0_hi) || !(t0_lo > 0.0) || !(t0_lo <= t0_hi)) {
        throw InvalidArgument("prior strength interval must satisfy 0 < lo <= hi < inf");
    }
    if (!finite(lambda0_lo) || !finite(lambda0_hi) || !(lambda0_lo > 0.0) || !(lambda0_lo <= lambda0_hi)) {
        throw InvalidArgument("prior rate interval must satisfy 0 < lo <= hi < inf");
    }
}

GammaPriorSet load_gamma_prior(const std::string& json_text) {
    using namespace detail;
    const json root = parse_json(json_text);
    require_object(root, "", {"t0", "lambda0"});
    auto pair = [&](const char* key) {
        const json& v = require_field(root, "", key);
        if (!v.is_array() || v.size() != 2) throw ParseError(key, "expected [lo, hi]");
        return std::pair{as_number(v[0], at(key, 0)), as_number(v[1], at(key, 1))};
    };
    const auto [t_lo, t_hi] = pair("t0");
    const auto [l_lo, l_hi] = pair("lambda0");
    try {
        return GammaPriorSet(t_lo, t_hi, l_lo, l_hi);
    } catch (const InvalidArgument& e) {
        throw ParseError("", e.what());
    }
}

double posterior_point(double t0, double lambda0, const RateObservation& obs) {
    return (t0 * lambda0 + static_cast<double>(obs.n)) / (t0 + obs.t);
}

IpspBounds ipsp_bounds(const GammaPriorSet& prior, const RateObservation& obs) {
    if (obs.n == 0 && obs.t == 0.0) return {prior.lambda0_lo(), prior.lambda0_hi()};
    // n/t compared without dividing, so t = 0 with n > 0 reads as n/t = inf.
    const double n = static_cast<double>(obs.n);
    const double t0_for_lower = n >= prior.lambda0_lo() * obs.t ? prior.t0_hi() : prior.t0_lo();
    const double t0_for_upper = n <= prior.lambda0_hi() * obs.t ? prior.t0_hi() : prior.t0_lo();
    return {posterior_point(t0_for_lower, prior.lambda0_lo(), obs), posterior_point(t0_for_upper, prior.lambda0_hi(), obs)};
}

IpspBounds ipsp_grid_oracle(const GammaPriorSet& prior, const RateObservation& obs, std::size_t resolution) {
    if (resolution < 50) throw InvalidArgument("grid oracle resolution must be at least 50");
    IpspBounds out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    const double steps = static_cast<double>(resolution - 1);
    for (std::size_t a = 0; a < resolution; ++a) {
        const double t0 = a + 1 == resolution ? prior.t0_hi()
                                              : prior.t0_lo() + (prior.t0_hi() - prior.t0_lo()) * (a / steps);
        for (std::size_t b = 0; b < resolution; ++b) {
            const double l0 = b + 1 == resolution
                                  ? prior.lambda0_hi()
                                  : prior.lambda0_lo() + (prior.lambda0_hi() - prior.lambda0_lo()) * (b / steps);
            const double v = posterior_point(t0, l0, obs);
            out.lower = std::min(out.lower, v);
            out.upper = std::max(out.upper, v);
        }
    }
    return out;
}

}  // namespace rqv
