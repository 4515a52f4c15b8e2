#include "rqv/ctmc.hpp"

#include <cmath>
#include <limits>

#include "rqv/error.hpp"

namespace rqv {

namespace {

void check_rewards(const std::vector<RewardStructure>& rewards, std::size_t n) {
    std::set<std::string, std::less<>> names;
    for (const auto& r : rewards) {
        r.validate(n);
        if (!names.insert(r.name).second) {
            throw InvalidArgument("duplicate reward structure '" + r.name + "'");
        }
    }
}

const RewardStructure* find_reward(const std::vector<RewardStructure>& rewards, std::string_view name) {
    for (const auto& r : rewards) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

}  // namespace

RewardStructure RewardStructure::zeros(std::string name, std::size_t state_count) {
    return RewardStructure{std::move(name), std::vector<double>(state_count, 0.0), Matrix(state_count, state_count)};
}

void RewardStructure::validate(std::size_t state_count) const {
    if (state_rewards.size() != state_count || transition_rewards.rows() != state_count ||
        transition_rewards.cols() != state_count) {
        throw InvalidArgument("reward structure '" + name + "' does not match the state count");
    }
    auto bad = [](double v) { return !std::isfinite(v) || v < 0.0; };
    for (double v : state_rewards) {
        if (bad(v)) throw InvalidArgument("reward structure '" + name + "' has a negative or non-finite state reward");
    }
    for (std::size_t r = 0; r < state_count; ++r) {
        for (double v : transition_rewards.row(r)) {
            if (bad(v)) {
                throw InvalidArgument("reward structure '" + name + "' has a negative or non-finite transition reward");
            }
        }
    }
}

Ctmc::Ctmc(Matrix rates, StateId initial, std::vector<LabelSet> labels, std::vector<RewardStructure> rewards)
    : Ctmc(std::move(rates), initial,
           std::make_shared<const ModelAnnotations>(ModelAnnotations{std::move(labels), std::move(rewards)})) {}

Ctmc::Ctmc(Matrix rates, StateId initial, std::shared_ptr<const ModelAnnotations> annotations)
    : rates_(std::move(rates)), initial_(initial), annotations_(std::move(annotations)) {
    for (std::size_t i = 0; i < rates_.rows() && i < rates_.cols(); ++i) rates_(i, i) = 0.0;
    validate();
}

void Ctmc::validate() const {
    const std::size_t n = rates_.rows();
    if (n == 0 || rates_.cols() != n) throw InvalidArgument("rate matrix must be square and non-empty");
    if (initial_.index >= n) throw InvalidArgument("initial state out of range");
    if (!annotations_ || annotations_->labels.size() != n) {
        throw InvalidArgument("label table does not match the state count");
    }
    for (std::size_t r = 0; r < n; ++r) {
        for (double v : rates_.row(r)) {
            if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("rates must be finite and non-negative");
        }
    }
    check_rewards(annotations_->rewards, n);
}

bool Ctmc::has_label(StateId s, std::string_view label) const {
    const auto& set = labels(s);
    return set.find(label) != set.end();
}

std::vector<bool> Ctmc::label_mask(std::string_view label) const {
    std::vector<bool> mask(state_count(), false);
    for (std::size_t s = 0; s < state_count(); ++s) mask[s] = has_label(StateId{s}, label);
    return mask;
}

const RewardStructure* Ctmc::reward(std::string_view name) const {
    return find_reward(annotations_->rewards, name);
}

double exit_rate(const Ctmc& model, StateId s) {
    double total = 0.0;
    for (double v : model.rates().row(s.index)) total += v;
    return total;
}

std::vector<double> embedded_probs(const Ctmc& model, StateId s) {
    const double exit = exit_rate(model, s);
    if (exit <= 0.0) throw AbsorbingState("state " + std::to_string(s.index) + " is absorbing");
    std::vector<double> p(model.state_count());
    const auto row = model.rates().row(s.index);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = row[j] / exit;
    return p;
}

IntervalCtmc::IntervalCtmc(std::size_t state_count, StateId initial, std::vector<LabelSet> labels,
                           std::vector<RewardStructure> rewards)
    : n_(state_count),
      initial_(initial),
      rates_(state_count * state_count),
      annotations_(std::make_shared<const ModelAnnotations>(ModelAnnotations{std::move(labels), std::move(rewards)})) {
    if (n_ == 0) throw InvalidArgument("model needs at least one state");
    if (initial_.index >= n_) throw InvalidArgument("initial state out of range");
    if (annotations_->labels.size() != n_) throw InvalidArgument("label table does not match the state count");
    check_rewards(annotations_->rewards, n_);
}

void IntervalCtmc::set_rate(std::size_t from, std::size_t to, RateInterval interval) {
    if (from >= n_ || to >= n_) throw InvalidArgument("transition endpoint out of range");
    if (from == to) return;
    if (!(interval.lo >= 0.0) || !(interval.lo <= interval.hi) || !std::isfinite(interval.hi)) {
        throw InvalidArgument("rate interval must satisfy 0 <= lo <= hi < inf");
    }
    if (!interval.param.empty()) {
        for (std::size_t k = 0; k < rates_.size(); ++k) {
            const auto& other = rates_[k];
            if (k != from * n_ + to && other.param == interval.param &&
                (other.lo != interval.lo || other.hi != interval.hi)) {
                throw InvalidArgument("shared parameter '" + interval.param + "' has inconsistent bounds");
            }
        }
    }
    rates_[from * n_ + to] = std::move(interval);
}

const RewardStructure* IntervalCtmc::reward(std::string_view name) const {
    return find_reward(annotations_->rewards, name);
}

std::vector<IntervalParameter> IntervalCtmc::parameters() const {
    std::vector<IntervalParameter> params;
    std::map<std::string, std::size_t, std::less<>> by_name;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            const auto& r = rate(i, j);
            if (r.degenerate()) continue;
            std::string name = r.param.empty() ? "r" + std::to_string(i) + "_" + std::to_string(j) : r.param;
            auto [it, fresh] = by_name.try_emplace(name, params.size());
            if (fresh) params.push_back(IntervalParameter{name, r.lo, r.hi, {}});
            params[it->second].entries.push_back(Transition{i, j});
        }
    }
    return params;
}

Matrix IntervalCtmc::lower_rates() const {
    Matrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) m(i, j) = rate(i, j).lo;
    }
    return m;
}

bool IntervalCtmc::operator==(const IntervalCtmc& other) const {
    return n_ == other.n_ && initial_ == other.initial_ && rates_ == other.rates_ &&
           *annotations_ == *other.annotations_;
}

Ctmc instantiate(const IntervalCtmc& model, const std::map<Transition, double>& point) {
    for (const auto& [tr, v] : point) {
        if (tr.from >= model.state_count() || tr.to >= model.state_count()) {
            throw InvalidArgument("instantiate: transition endpoint out of range");
        }
        const auto& r = model.rate(tr.from, tr.to);
        if (!r.contains(v)) {
            throw OutOfInterval("value " + std::to_string(v) + " for transition " + std::to_string(tr.from) + "->" +
                                std::to_string(tr.to) + " lies outside [" + std::to_string(r.lo) + ", " +
                                std::to_string(r.hi) + "]");
        }
    }
    std::map<std::string, double> values;
    for (const auto& p : model.parameters()) {
        std::optional<double> chosen;
        for (const auto& tr : p.entries) {
            auto it = point.find(tr);
            if (it == point.end()) continue;
            if (chosen && *chosen != it->second) {
                throw InvalidArgument("instantiate: conflicting values for shared parameter '" + p.name + "'");
            }
            chosen = it->second;
        }
        if (!chosen) throw InvalidArgument("instantiate: no value for interval parameter '" + p.name + "'");
        values.emplace(p.name, *chosen);
    }
    Matrix rates = model.lower_rates();
    for (const auto& [tr, v] : point) rates(tr.from, tr.to) = v;
    for (const auto& p : model.parameters()) {
        for (const auto& tr : p.entries) rates(tr.from, tr.to) = values.at(p.name);
    }
    return Ctmc(std::move(rates), model.initial(), model.annotations());
}

Ctmc instantiate_parameters(const IntervalCtmc& model, const std::map<std::string, double>& values) {
    Matrix rates = model.lower_rates();
    const auto params = model.parameters();
    for (const auto& p : params) {
        auto it = values.find(p.name);
        if (it == values.end()) throw InvalidArgument("instantiate: no value for interval parameter '" + p.name + "'");
        if (!(it->second >= p.lo && it->second <= p.hi)) {
            throw OutOfInterval("value " + std::to_string(it->second) + " for parameter '" + p.name +
                                "' lies outside [" + std::to_string(p.lo) + ", " + std::to_string(p.hi) + "]");
        }
        for (const auto& tr : p.entries) rates(tr.from, tr.to) = it->second;
    }
    for (const auto& [name, v] : values) {
        bool known = false;
        for (const auto& p : params) known = known || p.name == name;
        if (!known) throw InvalidArgument("instantiate: unknown parameter '" + name + "'");
    }
    return Ctmc(std::move(rates), model.initial(), model.annotations());
}

IntervalCtmc to_interval(const Ctmc& model) {
    IntervalCtmc out(model.state_count(), model.initial(), model.annotations()->labels, model.rewards());
    for (std::size_t i = 0; i < model.state_count(); ++i) {
        for (std::size_t j = 0; j < model.state_count(); ++j) {
            if (i != j && model.rate(i, j) > 0.0) out.set_rate(i, j, model.rate(i, j));
        }
    }
    return out;
}

}  // namespace rqv
