#include "rqv/bipp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json_util.hpp"
#include "rqv/error.hpp"

namespace rqv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498948482;
constexpr double kCoordinateTol = 1e-10;
constexpr int kMaxSweeps = 200;
// Half-open bands (eps[i-1], eps[i]] are approached from inside by this
// fraction of the band width.
constexpr double kOpenEdge = 1e-12;

template <typename F>
double golden_max(F&& f, double a, double b) {
    const double tol = kCoordinateTol * (b - a);
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        // Values within rounding of each other count as a tie. Far from the
        // optimum the likelihood underflows and the objective is flat up to
        // a few ulps of noise, which must not steer the bracket.
        if (fc >= fd - 4 * std::numeric_limits<double>::epsilon() * std::abs(fd)) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Posterior mean of the m-point prior with mass thetas[i] at lambdas[i].
// Lambdas are band-ordered, so lambdas[0] is the smallest and is used to
// rescale the likelihoods.
double upper_objective(std::span<const double> lambdas, std::span<const double> thetas, double t) {
    const double shift = lambdas[0];
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double w = thetas[i] * std::exp(-(lambdas[i] - shift) * t);
        num += lambdas[i] * w;
        den += w;
    }
    return num / den;
}

// Posterior mean of the (m+1)-point prior on the band edges where band i
// puts x[i] of its mass on its left edge and the rest on its right edge.
// Mass on an infinite edge has vanishing likelihood and drops out.
double lower_objective(std::span<const double> x, const PartialPrior& prior, double t) {
    const auto& eps = prior.epsilons();
    const std::size_t m = prior.m();
    double shift = kInf;
    for (std::size_t i = 1; i <= m; ++i) {
        if (x[i - 1] > 0.0) shift = std::min(shift, eps[i - 1]);
        if (x[i - 1] < 1.0 && std::isfinite(eps[i])) shift = std::min(shift, eps[i]);
    }
    if (!std::isfinite(shift)) return kInf;
    double num = 0.0;
    double den = 0.0;
    auto add = [&](double point, double mass) {
        if (mass <= 0.0 || !std::isfinite(point)) return;
        const double w = mass * std::exp(-(point - shift) * t);
        num += point * w;
        den += w;
    };
    for (std::size_t i = 1; i <= m; ++i) {
        add(eps[i - 1], x[i - 1] * prior.theta(i));
        add(eps[i], (1.0 - x[i - 1]) * prior.theta(i));
    }
    return num / den;
}

double prior_only_upper(const PartialPrior& prior) {
    double s = 0.0;
    for (std::size_t i = 1; i <= prior.m(); ++i) s += prior.epsilon(i) * prior.theta(i);
    return s;
}

double prior_only_lower(const PartialPrior& prior) {
    double s = 0.0;
    for (std::size_t i = 1; i <= prior.m(); ++i) s += prior.epsilon(i - 1) * prior.theta(i);
    return s;
}

struct ThreeBand {
    double e1, e2, th1, th2, th3;
};

ThreeBand as_three_band(const PartialPrior& prior) {
    if (prior.m() == 3) {
        return {prior.epsilon(1), prior.epsilon(2), prior.theta(1), prior.theta(2), prior.theta(3)};
    }
    return {prior.epsilon(1), prior.epsilon(1), prior.theta(1), 0.0, prior.theta(2)};
}

double closed_lower_edge(double edge, const ThreeBand& b, double t) {
    const double l = std::exp(-edge * t);
    return edge * l * b.th2 / (b.th1 + l * b.th2);
}

BippBounds closed_form(const ThreeBand& b, double t) {
    BippBounds out;
    out.method = BippMethod::closed_form;
    out.lower = std::min(closed_lower_edge(b.e1, b, t), closed_lower_edge(b.e2, b, t));
    // a l(a) / (l(e1) theta_1), with the exponentials combined so large t
    // does not underflow.
    auto term = [&](double a) { return a * std::exp(-(a - b.e1) * t) / b.th1; };
    const double inv_t = 1.0 / t;
    if (t < 1.0 / b.e2) {
        out.upper = b.e1 + term(b.e2) * b.th2 + term(inv_t) * b.th3;
    } else if (t <= 1.0 / b.e1) {
        out.upper = b.e1 + term(inv_t) * b.th2 + term(b.e2) * b.th3;
    } else {
        out.upper = b.e1 + term(b.e1) * b.th2 + term(b.e2) * b.th3;
    }
    return out;
}

void check_exposure(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("exposure time must be finite and non-negative");
}

}  // namespace

PartialPrior::PartialPrior(std::vector<double> epsilons, std::vector<double> thetas)
    : epsilons_(std::move(epsilons)), thetas_(std::move(thetas)) {
    if (thetas_.size() < 2) throw InvalidArgument("partial prior needs m >= 2 bands");
    if (epsilons_.size() != thetas_.size() + 1) throw InvalidArgument("partial prior needs m + 1 band edges");
    if (!(epsilons_[0] >= 0.0)) throw InvalidArgument("eps_0 must be non-negative");
    for (std::size_t i = 1; i < epsilons_.size(); ++i) {
        if (!(epsilons_[i] > epsilons_[i - 1])) throw InvalidArgument("band edges must be strictly increasing");
        if (i + 1 < epsilons_.size() && !std::isfinite(epsilons_[i])) {
            throw InvalidArgument("only the last band edge may be infinite");
        }
    }
    double sum = 0.0;
    for (double th : thetas_) {
        if (!(th > 0.0) || !std::isfinite(th)) throw InvalidArgument("band probabilities must be positive");
        sum += th;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw InvalidArgument("band probabilities sum to " + std::to_string(sum) + ", expected 1");
    }
    for (double& th : thetas_) th /= sum;
}

PartialPrior load_partial_prior(const std::string& json_text) {
    using namespace detail;
    const json root = parse_json(json_text);
    require_object(root, "", {"epsilons", "thetas"});
    const json& eps = require_field(root, "", "epsilons");
    const json& ths = require_field(root, "", "thetas");
    if (!eps.is_array()) throw ParseError("epsilons", "expected an array");
    if (!ths.is_array()) throw ParseError("thetas", "expected an array");
    std::vector<double> e;
    std::vector<double> th;
    for (std::size_t i = 0; i < eps.size(); ++i) e.push_back(as_extended_number(eps[i], at("epsilons", i)));
    for (std::size_t i = 0; i < ths.size(); ++i) th.push_back(as_number(ths[i], at("thetas", i)));
    try {
        return PartialPrior(std::move(e), std::move(th));
    } catch (const InvalidArgument& err) {
        throw ParseError("", err.what());
    }
}

const char* to_string(BippMethod method) {
    switch (method) {
        case BippMethod::closed_form: return "closed_form";
        case BippMethod::numeric: return "numeric";
        case BippMethod::grid: return "grid";
    }
    return "unknown";
}

double singular_likelihood(double rate, double t) { return std::exp(-rate * t); }

double discrete_posterior_mean(std::span<const double> points, std::span<const double> masses, double t) {
    if (points.size() != masses.size() || points.empty()) {
        throw InvalidArgument("discrete prior needs matching, non-empty points and masses");
    }
    double shift = kInf;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (masses[i] > 0.0) shift = std::min(shift, points[i]);
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (masses[i] <= 0.0) continue;
        const double w = masses[i] * std::exp(-(points[i] - shift) * t);
        num += points[i] * w;
        den += w;
    }
    return num / den;
}

double bipp_upper_numeric(const PartialPrior& prior, double t) {
    check_exposure(t);
    if (t == 0.0) return prior_only_upper(prior);

    const std::size_t m = prior.m();
    const auto& eps = prior.epsilons();
    std::vector<double> lo(m);
    std::vector<double> hi(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (std::isfinite(eps[i + 1])) {
            lo[i] = eps[i] + kOpenEdge * (eps[i + 1] - eps[i]);
            hi[i] = eps[i + 1];
        } else {
            // The top coordinate's optimum sits at (objective + 1/t), and the
            // objective exceeds eps_{m-1} by at most theta_m / (theta_{m-1} t).
            const double window = (2.0 + prior.theta(m) / prior.theta(m - 1)) / t;
            lo[i] = eps[i] + kOpenEdge * window;
            hi[i] = eps[i] + window;
        }
    }
    std::vector<double> lambdas(hi);
    const auto& thetas = prior.thetas();
    double best = upper_objective(lambdas, thetas, t);

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double max_move = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double old = lambdas[i];
            auto f = [&](double v) {
                lambdas[i] = v;
                return upper_objective(lambdas, thetas, t);
            };
            double cand = golden_max(f, lo[i], hi[i]);
            double fc = f(cand);
            for (double edge : {lo[i], hi[i]}) {
                const double fe = f(edge);
                if (fe > fc) {
                    fc = fe;
                    cand = edge;
                }
            }
            if (fc < best) {
                cand = old;
                fc = best;
            }
            lambdas[i] = cand;
            best = fc;
            max_move = std::max(max_move, std::abs(cand - old) / (hi[i] - lo[i]));
        }
        if (max_move <= 10 * kCoordinateTol) break;
    }
    return best;
}

double bipp_lower_numeric(const PartialPrior& prior, double t) {
    check_exposure(t);
    if (t == 0.0) return prior_only_lower(prior);

    const std::size_t m = prior.m();
    std::vector<double> x(m, 1.0);
    double best = lower_objective(x, prior, t);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool moved = false;
        for (std::size_t i = 0; i < m; ++i) {
            const double old = x[i];
            auto neg = [&](double v) {
                x[i] = v;
                return -lower_objective(x, prior, t);
            };
            double cand = golden_max(neg, 0.0, 1.0);
            double fc = -neg(cand);
            for (double edge : {0.0, 1.0}) {
                const double fe = -neg(edge);
                if (fe < fc) {
                    fc = fe;
                    cand = edge;
                }
            }
            if (fc >= best) {
                cand = old;
                fc = best;
            }
            x[i] = cand;
            if (cand != old) moved = true;
            best = fc;
        }
        if (!moved) break;
    }
    return best;
}

BippBounds bipp_closed_form_m3(const PartialPrior& prior, double t) {
    if (prior.m() != 3) throw InvalidArity("closed form m=3 requires exactly 3 bands, got " + std::to_string(prior.m()));
    check_exposure(t);
    if (t == 0.0) return {prior_only_lower(prior), prior_only_upper(prior), BippMethod::closed_form};
    return closed_form(as_three_band(prior), t);
}

BippBounds bipp_closed_form_m2(const PartialPrior& prior, double t) {
    if (prior.m() != 2) throw InvalidArity("closed form m=2 requires exactly 2 bands, got " + std::to_string(prior.m()));
    check_exposure(t);
    if (t == 0.0) return {prior_only_lower(prior), prior_only_upper(prior), BippMethod::closed_form};
    return closed_form(as_three_band(prior), t);
}

ClosedFormCase closed_form_case(const PartialPrior& prior, double t) {
    if (prior.m() != 2 && prior.m() != 3) throw InvalidArity("closed form requires m in {2,3}");
    const ThreeBand b = as_three_band(prior);
    ClosedFormCase c;
    if (t < 1.0 / b.e2) {
        c.upper_case = 1;
    } else if (t <= 1.0 / b.e1) {
        c.upper_case = 2;
    } else {
        c.upper_case = 3;
    }
    c.lower_branch = closed_lower_edge(b.e1, b, t) <= closed_lower_edge(b.e2, b, t) ? 1 : 2;
    return c;
}

BippBounds bipp_bounds(const PartialPrior& prior, double t, BippStrategy strategy) {
    const bool closed_available = prior.m() == 2 || prior.m() == 3;
    if (strategy == BippStrategy::closed_form && !closed_available) {
        throw InvalidArity("closed-form bounds exist only for m in {2,3}, got m=" + std::to_string(prior.m()));
    }
    if (strategy != BippStrategy::numeric && closed_available) {
        return prior.m() == 3 ? bipp_closed_form_m3(prior, t) : bipp_closed_form_m2(prior, t);
    }
    return BippBounds{bipp_lower_numeric(prior, t), bipp_upper_numeric(prior, t), BippMethod::numeric};
}

}  // namespace rqv
