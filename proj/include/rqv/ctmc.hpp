#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rqv/linalg.hpp"

namespace rqv {

struct StateId {
    std::size_t index = 0;
    auto operator<=>(const StateId&) const = default;
};

using LabelSet = std::set<std::string, std::less<>>;

/// Per-time-unit state rewards plus per-transition rewards.
struct RewardStructure {
    std::string name;
    std::vector<double> state_rewards;
    Matrix transition_rewards;

    static RewardStructure zeros(std::string name, std::size_t state_count);

    /// Throws InvalidArgument on negative/non-finite entries or a size mismatch.
    void validate(std::size_t state_count) const;

    bool operator==(const RewardStructure&) const = default;
};

/// Labels and reward structures shared, immutable, between a model and
/// every instantiation derived from it.
struct ModelAnnotations {
    std::vector<LabelSet> labels;
    std::vector<RewardStructure> rewards;

    bool operator==(const ModelAnnotations&) const = default;
};

/// Labelled CTMC with a dense rate matrix. The diagonal is ignored and kept at zero.
class Ctmc {
public:
    Ctmc(Matrix rates, StateId initial, std::vector<LabelSet> labels,
         std::vector<RewardStructure> rewards = {});
    Ctmc(Matrix rates, StateId initial, std::shared_ptr<const ModelAnnotations> annotations);

    std::size_t state_count() const noexcept { return rates_.rows(); }
    StateId initial() const noexcept { return initial_; }
    const Matrix& rates() const noexcept { return rates_; }
    double rate(std::size_t from, std::size_t to) const { return rates_(from, to); }

    const LabelSet& labels(StateId s) const { return annotations_->labels.at(s.index); }
    bool has_label(StateId s, std::string_view label) const;
    /// Indicator vector of the states carrying `label`.
    std::vector<bool> label_mask(std::string_view label) const;

    const std::vector<RewardStructure>& rewards() const noexcept { return annotations_->rewards; }
    const RewardStructure* reward(std::string_view name) const;

    const std::shared_ptr<const ModelAnnotations>& annotations() const noexcept { return annotations_; }

private:
    void validate() const;

    Matrix rates_;
    StateId initial_;
    std::shared_ptr<const ModelAnnotations> annotations_;
};

/// Total outgoing rate of `s`. Zero for absorbing states.
double exit_rate(const Ctmc& model, StateId s);

/// Jump-chain distribution out of `s`. Throws AbsorbingState when exit rate is zero.
std::vector<double> embedded_probs(const Ctmc& model, StateId s);

/// Closed rate interval. `param` names a shared parameter: every entry with the
/// same non-empty name takes one common value when the model is instantiated.
struct RateInterval {
    double lo = 0.0;
    double hi = 0.0;
    std::string param;

    bool degenerate() const noexcept { return lo == hi; }
    bool contains(double v) const noexcept { return v >= lo && v <= hi; }
    bool operator==(const RateInterval&) const = default;
};

struct Transition {
    std::size_t from = 0;
    std::size_t to = 0;
    auto operator<=>(const Transition&) const = default;
};

/// One uncertain quantity of an interval model: a non-degenerate interval and
/// every matrix entry that carries it.
struct IntervalParameter {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<Transition> entries;
};

class IntervalCtmc {
public:
    IntervalCtmc(std::size_t state_count, StateId initial, std::vector<LabelSet> labels,
                 std::vector<RewardStructure> rewards = {});

    std::size_t state_count() const noexcept { return n_; }
    StateId initial() const noexcept { return initial_; }
    const RateInterval& rate(std::size_t from, std::size_t to) const { return rates_[from * n_ + to]; }

    /// Sets an entry; diagonal entries are ignored. Throws InvalidArgument when
    /// 0 <= lo <= hi < inf is violated or a shared parameter's bounds disagree.
    void set_rate(std::size_t from, std::size_t to, RateInterval interval);
    void set_rate(std::size_t from, std::size_t to, double value) { set_rate(from, to, RateInterval{value, value, {}}); }

    const std::vector<LabelSet>& labels() const noexcept { return annotations_->labels; }
    const std::vector<RewardStructure>& rewards() const noexcept { return annotations_->rewards; }
    const RewardStructure* reward(std::string_view name) const;
    const std::shared_ptr<const ModelAnnotations>& annotations() const noexcept { return annotations_; }

    /// Non-degenerate intervals grouped by parameter, in row-major order of first
    /// appearance. Unnamed intervals get the name "r<from>_<to>".
    std::vector<IntervalParameter> parameters() const;

    /// Rate matrix with every entry at its lower end.
    Matrix lower_rates() const;

    bool operator==(const IntervalCtmc& other) const;

private:
    std::size_t n_;
    StateId initial_;
    std::vector<RateInterval> rates_;
    std::shared_ptr<const ModelAnnotations> annotations_;
};

/// Fixes every interval entry to a point. Entries sharing a parameter take the
/// value supplied for any one of them; degenerate entries may be omitted.
/// Throws OutOfInterval for values outside [lo, hi] and InvalidArgument for
/// missing or conflicting values.
Ctmc instantiate(const IntervalCtmc& model, const std::map<Transition, double>& point);

/// Same, keyed by parameter name (see IntervalCtmc::parameters()).
Ctmc instantiate_parameters(const IntervalCtmc& model, const std::map<std::string, double>& values);

/// Interval view of a point model (all entries degenerate).
IntervalCtmc to_interval(const Ctmc& model);

}  // namespace rqv
