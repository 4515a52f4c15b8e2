#pragma once

// Posterior-rate bounds for singular events (no occurrence observed during an
// exposure time t) under partial prior knowledge of the form
//   Pr(eps[i-1] < lambda <= eps[i]) = theta[i-1],  i = 1..m.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rqv {

class PartialPrior {
public:
    /// `epsilons` holds eps_0 < eps_1 < ... < eps_m (eps_0 >= 0, only eps_m may
    /// be +inf); `thetas` holds the m band probabilities. Sums within 1e-9 of 1
    /// are renormalized, anything further off is rejected. Requires m >= 2 and
    /// every theta > 0. Throws InvalidArgument.
    PartialPrior(std::vector<double> epsilons, std::vector<double> thetas);

    std::size_t m() const noexcept { return thetas_.size(); }
    const std::vector<double>& epsilons() const noexcept { return epsilons_; }
    const std::vector<double>& thetas() const noexcept { return thetas_; }
    double epsilon(std::size_t i) const { return epsilons_.at(i); }
    /// Mass of band i, 1-based to match the epsilon indexing.
    double theta(std::size_t i) const { return thetas_.at(i - 1); }

    bool operator==(const PartialPrior&) const = default;

private:
    std::vector<double> epsilons_;
    std::vector<double> thetas_;
};

PartialPrior load_partial_prior(const std::string& json_text);

enum class BippMethod { closed_form, numeric, grid };
enum class BippStrategy { automatic, numeric, closed_form };

const char* to_string(BippMethod method);

struct BippBounds {
    double lower = 0.0;
    double upper = 0.0;
    BippMethod method = BippMethod::numeric;
};

/// Likelihood of seeing no event in `t` time units at `rate`: exp(-rate t).
double singular_likelihood(double rate, double t);

/// Posterior mean of a discrete prior (support `points`, weights `masses`)
/// after an event-free exposure `t`.
double discrete_posterior_mean(std::span<const double> points, std::span<const double> masses, double t);

/// Supremum of the posterior mean over all priors consistent with `prior`,
/// by coordinate-wise golden-section ascent over m-point priors.
double bipp_upper_numeric(const PartialPrior& prior, double t);

/// Infimum of the posterior mean, by coordinate descent over the mass split
/// x in [0,1]^m of the (m+1)-point priors on the band edges.
double bipp_lower_numeric(const PartialPrior& prior, double t);

/// Closed-form enclosure for m = 3. Assumes eps_0 = 0 and eps_3 = inf in the
/// formulas; for other outer edges the result is still an enclosure.
/// Throws InvalidArity when m != 3.
BippBounds bipp_closed_form_m3(const PartialPrior& prior, double t);

/// Closed-form enclosure for m = 2 (the m = 3 formulas with the middle band
/// collapsed). Throws InvalidArity when m != 2.
BippBounds bipp_closed_form_m2(const PartialPrior& prior, double t);

/// Which piece of the closed-form formulas is active at t (m = 2 or 3):
/// upper_case in {1,2,3} and lower_branch in {1,2} (edge eps_1 or eps_2).
struct ClosedFormCase {
    int upper_case = 1;
    int lower_branch = 1;
    bool operator==(const ClosedFormCase&) const = default;
};
ClosedFormCase closed_form_case(const PartialPrior& prior, double t);

/// Automatic strategy uses the closed form for m in {2,3}, numeric otherwise.
/// Throws InvalidArity when closed_form is requested with m > 3.
BippBounds bipp_bounds(const PartialPrior& prior, double t, BippStrategy strategy = BippStrategy::automatic);

/// Brute-force extrema on regular grids with `resolution` points per axis,
/// re-gridded around the best point until the cells collapse. Test oracle;
/// cost grows as resolution^m. Throws InvalidArgument when resolution < 10.
BippBounds bipp_grid_oracle(const PartialPrior& prior, double t, std::size_t resolution);

}  // namespace rqv
