#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rqv/checker.hpp"
#include "rqv/error.hpp"
#include "rqv/model_io.hpp"
#include "rqv/property.hpp"
#include "rqv/random.hpp"
#include "rqv/svg.hpp"

namespace rqv::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Globals {
    std::uint64_t seed = 1;
    std::string out = "rqv_out";
    std::string format = "csv";
    std::string semantics = "until-absorption";
    bool no_timing = false;
};

RewardSemantics semantics_of(const Globals& g) {
    return g.semantics == "strict" ? RewardSemantics::strict : RewardSemantics::until_absorption;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write " + path.string());
    f << content;
    if (!f) throw InvalidArgument("failed writing " + path.string());
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json number_json(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

// Writes manifest.json before the command runs and again, finalized, after.
class Manifest {
public:
    Manifest(const Globals& g, std::string command, const std::vector<std::string>& args, std::string config)
        : path_(fs::path(g.out) / "manifest.json") {
        doc_["command"] = std::move(command);
        doc_["args"] = args;
        doc_["config"] = std::move(config);
        doc_["seed"] = g.seed;
        doc_["tool_version"] = kToolVersion;
        doc_["output_directory"] = g.out;
        doc_["started"] = utc_now();
        doc_["finished"] = nullptr;
        doc_["exit_code"] = nullptr;
        write_file(path_, doc_.dump(2) + "\n");
    }

    void finish(int code) {
        doc_["finished"] = utc_now();
        doc_["exit_code"] = code;
        write_file(path_, doc_.dump(2) + "\n");
    }

private:
    fs::path path_;
    json doc_;
};

std::string bipp_curve_json(const PartialPrior& prior, const std::vector<double>& ts, BippStrategy strategy) {
    json rows = json::array();
    for (double t : ts) {
        const auto b = bipp_bounds(prior, t, strategy);
        rows.push_back({{"t", t}, {"lambda_l", number_json(b.lower)}, {"lambda_u", number_json(b.upper)},
                        {"method", to_string(b.method)}});
    }
    return rows.dump(2) + "\n";
}

std::string ipsp_curve_json(const std::vector<IpspRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"t", r.t}, {"n", r.n}, {"lower", r.lower}, {"upper", r.upper}, {"mle", number_json(r.mle)}});
    }
    return out.dump(2) + "\n";
}

std::string bipp_chart(const PartialPrior& prior, const std::vector<double>& ts, BippStrategy strategy,
                       const std::string& title) {
    Series lo{"lambda_l", {}, {}};
    Series hi{"lambda_u", {}, {}};
    for (double t : ts) {
        const auto b = bipp_bounds(prior, t, strategy);
        lo.x.push_back(t);
        lo.y.push_back(b.lower);
        hi.x.push_back(t);
        hi.y.push_back(b.upper);
    }
    std::vector<Marker> markers;
    if (!ts.empty()) {
        for (double t : case_switch_times(prior, ts.front(), ts.back())) {
            const auto b = bipp_bounds(prior, t, strategy);
            markers.push_back({t, b.upper});
            markers.push_back({t, b.lower});
        }
    }
    const bool log_x = !ts.empty() && ts.front() > 0.0;
    return line_chart({lo, hi}, markers, {title, "t", "rate", log_x, true});
}

std::string ipsp_chart(const std::vector<IpspRow>& rows, const std::string& title) {
    Series lo{"lower", {}, {}};
    Series hi{"upper", {}, {}};
    Series mle{"n/t", {}, {}};
    for (const auto& r : rows) {
        lo.x.push_back(r.t);
        lo.y.push_back(r.lower);
        hi.x.push_back(r.t);
        hi.y.push_back(r.upper);
        mle.x.push_back(r.t);
        mle.y.push_back(r.mle);
    }
    return line_chart({lo, hi, mle}, {}, {title, "t", "rate", true, false});
}

int cmd_bipp(const Globals& g, const std::string& prior_path, const std::vector<double>& t_list,
             std::optional<double> t_min, std::optional<double> t_max, std::size_t points, bool log,
             const std::string& strategy_name, std::ostream& out) {
    const PartialPrior prior = load_partial_prior(read_text_file(prior_path));
    std::vector<double> ts = t_list;
    if (t_min || t_max) {
        if (!t_min || !t_max) throw InvalidArgument("--t-min and --t-max must be given together");
        if (!(*t_min >= 0.0) || !(*t_max >= *t_min)) throw InvalidArgument("t-grid needs 0 <= t-min <= t-max");
        if (log && *t_min <= 0.0) throw InvalidArgument("a log-spaced t-grid needs t-min > 0");
        const auto grid = make_grid(*t_min, *t_max, points, log);
        ts.insert(ts.end(), grid.begin(), grid.end());
    }
    if (ts.empty()) throw InvalidArgument("empty t-grid");
    for (double t : ts) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("exposure times must be finite and >= 0");
    }
    std::sort(ts.begin(), ts.end());
    BippStrategy strategy = BippStrategy::automatic;
    if (strategy_name == "numeric") strategy = BippStrategy::numeric;
    if (strategy_name == "closed-form") strategy = BippStrategy::closed_form;

    const fs::path dir(g.out);
    if (g.format == "json") {
        write_file(dir / "bipp.json", bipp_curve_json(prior, ts, strategy));
    } else {
        write_file(dir / "bipp.csv", bipp_curve_csv(prior, ts, strategy));
    }
    write_file(dir / "bipp.svg", bipp_chart(prior, ts, strategy, "BIPP bounds"));
    out << "wrote " << ts.size() << " rows to " << (dir / (g.format == "json" ? "bipp.json" : "bipp.csv")).string()
        << "\n";
    return kOk;
}

int cmd_ipsp(const Globals& g, const std::string& prior_path, double rate, double horizon, std::size_t points,
             std::ostream& out) {
    const GammaPriorSet prior = load_gamma_prior(read_text_file(prior_path));
    if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidArgument("--rate must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("--horizon must be positive");
    if (points == 0) throw InvalidArgument("--points must be positive");
    const auto rows = ipsp_curve(prior, rate, horizon, points, g.seed);
    const fs::path dir(g.out);
    if (g.format == "json") {
        write_file(dir / "ipsp.json", ipsp_curve_json(rows));
    } else {
        write_file(dir / "ipsp.csv", ipsp_curve_csv(rows));
    }
    write_file(dir / "ipsp.svg", ipsp_chart(rows, "IPSP bounds, true rate " + format_number(rate)));
    const auto& last = rows.back();
    out << "t=" << format_number(last.t) << " n=" << last.n << " bounds=[" << format_number(last.lower) << ", "
        << format_number(last.upper) << "]\n";
    return kOk;
}

int cmd_check(const Globals& g, const std::string& model_path, const std::string& property_text,
              std::size_t samples, std::ostream& out) {
    const IntervalCtmc model = load_model_file(model_path);
    const Property property = parse_property(property_text);
    IntervalCheckOptions options;
    options.semantics = semantics_of(g);
    options.samples = samples;
    options.seed = g.seed;
    ValueInterval v;
    const bool point = model.parameters().empty();
    if (point) {
        v.lo = v.hi = evaluate(instantiate(model, {}), property, options.semantics);
    } else {
        v = check_interval(model, property, options);
    }
    std::optional<Verdict> verdict;
    if (property.threshold) verdict = evaluate_threshold(v, property);

    json report;
    report["property"] = to_string(property);
    report["lo"] = number_json(v.lo);
    report["hi"] = number_json(v.hi);
    report["point_model"] = point;
    report["corners"] = v.corners;
    report["samples"] = v.samples;
    report["escapes"] = v.escapes;
    report["reward_semantics"] = to_string(options.semantics);
    report["verdict"] = verdict ? json(to_string(*verdict)) : json(nullptr);
    write_file(fs::path(g.out) / "check.json", report.dump(2) + "\n");

    if (g.format == "json") {
        out << report.dump(2) << "\n";
        return kOk;
    }
    if (point) {
        out << format_number(v.lo) << "\n";
    } else {
        out << "[" << format_number(v.lo) << ", " << format_number(v.hi) << "]\n";
    }
    if (verdict) out << "verdict: " << to_string(*verdict) << "\n";
    if (v.escapes > 0) out << "warning: " << v.escapes << " sampled values escaped the corner interval\n";
    return kOk;
}

int cmd_mission(const Globals& g, bool seed_given, const std::string& config_path, std::size_t runs,
                std::ostream& out) {
    MissionSpec spec = config_path.empty() ? MissionSpec::defaults() : load_mission_spec(read_text_file(config_path));
    if (seed_given) spec.seed = g.seed;
    if (g.semantics == "strict") spec.reward_semantics = RewardSemantics::strict;
    if (runs == 0) throw InvalidArgument("--runs must be positive");
    const fs::path dir(g.out);
    write_file(dir / "mission_config.json", save_mission_spec(spec));

    std::vector<MissionOutcome> outcomes;
    for (std::size_t r = 0; r < runs; ++r) {
        MissionSpec run_spec = spec;
        run_spec.seed = spec.seed + r;
        MissionOutcome o = run_mission(run_spec, MissionOptions{!g.no_timing});
        const fs::path run_dir = dir / ("run_" + std::to_string(r));
        write_file(run_dir / "decisions.csv", decisions_csv(o));
        write_file(run_dir / "events.csv", events_csv(o));
        write_file(run_dir / "outcome.json", outcome_json(o));
        out << "run " << r << " seed " << run_spec.seed << ": " << (o.damaged ? "damage" : "finish") << ", energy "
            << format_number(o.energy_consumed) << " of " << format_number(o.E0) << ", chains";
        for (auto c : o.chains) out << ' ' << to_string(c);
        out << "\n";
        outcomes.push_back(std::move(o));
    }
    write_file(dir / "aggregate.csv", mission_aggregate_csv(outcomes, spec.k));
    return kOk;
}

std::string slug(double v) {
    std::string s = format_number(v);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

int cmd_fig4(const Globals& g, std::size_t points, std::ostream& out) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    struct Curve {
        std::string name;
        PartialPrior prior;
    };
    auto m3 = [&](double th1, double th2, double e1, double e2) {
        return PartialPrior({0.0, e1, e2, inf}, {th1, th2, 1.0 - th1 - th2});
    };
    std::vector<std::pair<std::string, std::vector<Curve>>> panels;
    {
        std::vector<Curve> c;
        for (double th1 : {0.1, 0.3, 0.6, 0.8}) c.push_back({"theta1_" + slug(th1), m3(th1, 0.1, 1.0 / 5000, 1.0 / 1000)});
        panels.emplace_back("a", std::move(c));
    }
    {
        std::vector<Curve> c;
        for (double th2 : {0.1, 0.3, 0.6, 0.8}) c.push_back({"theta2_" + slug(th2), m3(0.1, th2, 1.0 / 5000, 1.0 / 1000)});
        panels.emplace_back("b", std::move(c));
    }
    {
        std::vector<Curve> c;
        const std::pair<double, double> eps[] = {{500, 100}, {1000, 500}, {2000, 1000}, {5000, 2000}};
        for (auto [d1, d2] : eps) {
            c.push_back({"eps_1over" + slug(d1) + "_1over" + slug(d2), m3(0.3, 0.3, 1.0 / d1, 1.0 / d2)});
        }
        panels.emplace_back("c", std::move(c));
    }
    {
        std::vector<Curve> c;
        for (double th1 : {0.3, 0.5}) {
            for (double d : {500.0, 5000.0}) {
                c.push_back({"theta1_" + slug(th1) + "_eps_1over" + slug(d),
                             PartialPrior({0.0, 1.0 / d, inf}, {th1, 1.0 - th1})});
            }
        }
        panels.emplace_back("d", std::move(c));
    }

    const auto ts = make_grid(1.0, 1e6, points, true);
    const fs::path dir = fs::path(g.out) / "fig4";
    std::size_t files = 0;
    for (const auto& [panel, curves] : panels) {
        std::vector<Series> series;
        std::vector<Marker> markers;
        for (const auto& c : curves) {
            const std::string stem = "fig4" + panel + "_" + c.name;
            write_file(dir / (stem + ".csv"), bipp_curve_csv(c.prior, ts, BippStrategy::automatic));
            write_file(dir / (stem + ".svg"), bipp_chart(c.prior, ts, BippStrategy::automatic, stem));
            ++files;
            Series lo{c.name + " l", {}, {}};
            Series hi{c.name + " u", {}, {}};
            for (double t : ts) {
                const auto b = bipp_bounds(c.prior, t);
                lo.x.push_back(t);
                lo.y.push_back(b.lower);
                hi.x.push_back(t);
                hi.y.push_back(b.upper);
            }
            series.push_back(std::move(lo));
            series.push_back(std::move(hi));
            for (double t : case_switch_times(c.prior, ts.front(), ts.back())) {
                const auto b = bipp_bounds(c.prior, t);
                markers.push_back({t, b.upper});
                markers.push_back({t, b.lower});
            }
        }
        ChartOptions opt{"BIPP panel " + panel, "t", "rate", true, true, 900, 480};
        write_file(dir / ("fig4" + panel + ".svg"), line_chart(series, markers, opt));
    }
    out << "wrote " << files << " curve files to " << dir.string() << "\n";
    return kOk;
}

int cmd_fig5(const Globals& g, double horizon, std::size_t points, std::ostream& out) {
    if (!(horizon > 0.0)) throw InvalidArgument("--horizon must be positive");
    struct Run {
        std::string name;
        GammaPriorSet prior;
        double rate;
    };
    std::vector<std::pair<std::string, std::vector<Run>>> panels;
    // Panel a: true rate 3; prior strength from weak to strong; prior rate
    // interval containing, above, or below the true rate, narrow and wide.
    {
        const std::pair<const char*, std::pair<double, double>> strengths[] = {
            {"weak", {0.1, 1.0}}, {"medium", {10.0, 100.0}}, {"strong", {1000.0, 5000.0}}};
        const std::tuple<const char*, double, double, double, double> rows[] = {
            {"contains", 2.5, 3.5, 1.0, 5.0}, {"over", 4.0, 5.0, 4.0, 8.0}, {"under", 1.0, 2.0, 0.5, 2.0}};
        for (const auto& [row, nlo, nhi, wlo, whi] : rows) {
            for (const auto& [col, t0] : strengths) {
                std::vector<Run> runs;
                runs.push_back({"narrow", GammaPriorSet(t0.first, t0.second, nlo, nhi), 3.0});
                runs.push_back({"wide", GammaPriorSet(t0.first, t0.second, wlo, whi), 3.0});
                panels.emplace_back(std::string("a_") + row + "_" + col, std::move(runs));
            }
        }
    }
    // Panel b: strong prior t0 = 1000 for a range of true rates.
    for (double rate : {0.03, 0.3, 3.0, 30.0}) {
        std::vector<Run> runs;
        runs.push_back({"narrow", GammaPriorSet(1000, 1000, 0.9 * rate, 1.1 * rate), rate});
        runs.push_back({"wide", GammaPriorSet(1000, 1000, rate * 2.0 / 3.0, rate * 4.0 / 3.0), rate});
        panels.emplace_back("b_rate_" + slug(rate), std::move(runs));
    }

    const fs::path dir = fs::path(g.out) / "fig5";
    std::uint64_t stream = 0;
    for (const auto& [panel, runs] : panels) {
        std::vector<Series> series;
        for (const auto& r : runs) {
            const auto rows = ipsp_curve(r.prior, r.rate, horizon, points, g.seed + stream++);
            write_file(dir / ("fig5" + panel + "_" + r.name + ".csv"), ipsp_curve_csv(rows));
            Series lo{r.name + " lower", {}, {}};
            Series hi{r.name + " upper", {}, {}};
            for (const auto& row : rows) {
                lo.x.push_back(row.t);
                lo.y.push_back(row.lower);
                hi.x.push_back(row.t);
                hi.y.push_back(row.upper);
            }
            series.push_back(std::move(lo));
            series.push_back(std::move(hi));
        }
        ChartOptions opt{"IPSP " + panel, "t", "rate", true, false, 800, 440};
        write_file(dir / ("fig5" + panel + ".svg"), line_chart(series, {}, opt));
    }
    out << "wrote " << panels.size() << " panels to " << dir.string() << "\n";
    return kOk;
}

// Drops any --out option from a recorded argument list.
std::vector<std::string> without_out(const std::vector<std::string>& args) {
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out") {
            ++i;
            continue;
        }
        if (args[i].rfind("--out=", 0) == 0) continue;
        kept.push_back(args[i]);
    }
    return kept;
}


}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<double> make_grid(double lo, double hi, std::size_t points, bool log) {
    std::vector<double> out;
    if (points == 0) return out;
    if (points == 1) return {hi};
    for (std::size_t i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(points - 1);
        out.push_back(log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::string bipp_curve_csv(const PartialPrior& prior, const std::vector<double>& ts, BippStrategy strategy) {
    std::ostringstream os;
    os << "t,lambda_l,lambda_u,method\n";
    for (double t : ts) {
        const auto b = bipp_bounds(prior, t, strategy);
        os << format_number(t) << ',' << format_number(b.lower) << ',' << format_number(b.upper) << ','
           << to_string(b.method) << '\n';
    }
    return os.str();
}

std::vector<double> case_switch_times(const PartialPrior& prior, double lo, double hi) {
    std::vector<double> out;
    if (prior.m() != 2 && prior.m() != 3) return out;
    std::vector<double> candidates{1.0 / prior.epsilon(1)};
    if (prior.m() == 3) candidates.insert(candidates.begin(), 1.0 / prior.epsilon(2));
    for (double t : candidates) {
        if (t >= lo && t <= hi && std::isfinite(t)) out.push_back(t);
    }
    return out;
}

std::vector<IpspRow> ipsp_curve(const GammaPriorSet& prior, double rate, double horizon, std::size_t points,
                                std::uint64_t seed) {
    Rng rng(seed);
    const auto ts = make_grid(horizon / 1000.0, horizon, points, true);
    std::vector<IpspRow> rows;
    double next_event = rng.exponential(rate);
    std::uint64_t n = 0;
    for (double t : ts) {
        while (next_event <= t) {
            ++n;
            next_event += rng.exponential(rate);
        }
        const RateObservation obs{n, t};
        const auto b = ipsp_bounds(prior, obs);
        rows.push_back({t, n, b.lower, b.upper, static_cast<double>(n) / t});
    }
    return rows;
}

std::string ipsp_curve_csv(const std::vector<IpspRow>& rows) {
    std::ostringstream os;
    os << "t,n,lower,upper,mle\n";
    for (const auto& r : rows) {
        os << format_number(r.t) << ',' << r.n << ',' << format_number(r.lower) << ',' << format_number(r.upper) << ','
           << format_number(r.mle) << '\n';
    }
    return os.str();
}

std::string mission_aggregate_csv(const std::vector<MissionOutcome>& runs, std::size_t k) {
    auto quantile = [](std::vector<double> v, double q) {
        std::sort(v.begin(), v.end());
        const double pos = q * static_cast<double>(v.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return i + 1 < v.size() ? v[i] + frac * (v[i + 1] - v[i]) : v[i];
    };
    std::ostringstream os;
    os << "chain,decisions,configs_evaluated,wall_ms_min,wall_ms_q1,wall_ms_median,wall_ms_q3,wall_ms_max\n";
    for (std::size_t chain = 1; chain <= k; ++chain) {
        std::vector<double> ms;
        std::size_t configs = 0;
        for (const auto& run : runs) {
            for (const auto& d : run.decisions) {
                if (d.chain != chain) continue;
                ms.push_back(d.wall_ms);
                configs = d.checks.size();
            }
        }
        os << chain << ',' << ms.size() << ',';
        if (ms.empty()) {
            os << ",,,,,\n";
            continue;
        }
        os << configs;
        for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) os << ',' << format_number(quantile(ms, q));
        os << '\n';
    }
    return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust quantitative verification of CTMCs with Bayesian rate bounds", "rqv"};
    app.set_version_flag("--version", kToolVersion);
    app.fallthrough();
    app.require_subcommand(1);

    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "PRNG seed");
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--format", g.format, "Tabular output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--reward-semantics", g.semantics, "Reward reachability semantics")
        ->check(CLI::IsMember({"strict", "until-absorption"}));
    app.add_flag("--no-timing", g.no_timing, "Record zero wall time so mission outputs replay byte-identically");

    auto* bipp = app.add_subcommand("bipp", "Posterior bounds for a singular-event rate over exposure times");
    std::string prior_path;
    std::vector<double> t_list;
    std::optional<double> t_min;
    std::optional<double> t_max;
    std::size_t points = 200;
    bool log_grid = false;
    std::string strategy = "auto";
    bipp->add_option("--prior", prior_path, "Partial prior JSON")->required();
    bipp->add_option("--t", t_list, "Exposure times")->delimiter(',');
    bipp->add_option("--t-min", t_min, "Grid start");
    bipp->add_option("--t-max", t_max, "Grid end");
    bipp->add_option("--points", points, "Grid size")->capture_default_str();
    bipp->add_flag("--log", log_grid, "Log-spaced grid");
    bipp->add_option("--strategy", strategy)->check(CLI::IsMember({"auto", "numeric", "closed-form"}));

    auto* ipsp = app.add_subcommand("ipsp", "Posterior bounds for a regular-event rate along a simulated stream");
    double rate = 0.0;
    double horizon = 1e4;
    std::size_t ipsp_points = 200;
    ipsp->add_option("--prior", prior_path, "Gamma prior-set JSON")->required();
    ipsp->add_option("--rate", rate, "True event rate")->required();
    ipsp->add_option("--horizon", horizon, "Observation horizon")->capture_default_str();
    ipsp->add_option("--points", ipsp_points, "Reporting times")->capture_default_str();

    auto* check = app.add_subcommand("check", "Check a property on a CTMC or interval CTMC");
    std::string model_path;
    std::string property_text;
    std::size_t samples = 0;
    check->add_option("--model", model_path, "Model JSON")->required();
    check->add_option("--property", property_text, "Property text")->required();
    check->add_option("--samples", samples, "Interior samples audited on top of the corners");

    auto* mission = app.add_subcommand("mission", "Mission simulation");
    mission->require_subcommand(1);
    auto* mission_run = mission->add_subcommand("run", "Run seeded missions");
    std::string config_path;
    std::size_t runs = 1;
    mission_run->add_option("--config", config_path, "Mission config JSON (defaults when omitted)");
    mission_run->add_option("--runs", runs, "Number of runs; run r uses seed + r")->capture_default_str();

    auto* eval = app.add_subcommand("eval", "Regenerate the estimator evaluation curves");
    eval->require_subcommand(1);
    auto* fig4 = eval->add_subcommand("fig4", "BIPP bound curves");
    std::size_t fig_points = 400;
    fig4->add_option("--points", fig_points, "Exposure times per curve")->capture_default_str();
    auto* fig5 = eval->add_subcommand("fig5", "IPSP bound curves");
    double fig5_horizon = 1e4;
    std::size_t fig5_points = 200;
    fig5->add_option("--horizon", fig5_horizon)->capture_default_str();
    fig5->add_option("--points", fig5_points)->capture_default_str();

    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    std::string manifest_path;
    replay->add_option("manifest", manifest_path, "manifest.json")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    std::optional<Manifest> manifest;
    auto fail = [&](const char* kind, const std::exception& e, int code) {
        err << "error (" << kind << "): " << e.what() << "\n";
        if (manifest) manifest->finish(code);
        return code;
    };
    try {
        if (replay->parsed()) {
            const json m = json::parse(read_text_file(manifest_path));
            std::vector<std::string> again = without_out(m.at("args").get<std::vector<std::string>>());
            const bool out_given = app.count("--out") > 0;
            again.insert(again.begin(), {"--out", out_given ? g.out : m.at("output_directory").get<std::string>()});
            return run(again, out, err);
        }

        std::string name = "eval fig5";
        std::string config;
        if (bipp->parsed()) {
            name = "bipp";
            config = prior_path;
        } else if (ipsp->parsed()) {
            name = "ipsp";
            config = prior_path;
        } else if (check->parsed()) {
            name = "check";
            config = model_path;
        } else if (mission_run->parsed()) {
            name = "mission run";
            config = config_path;
        } else if (fig4->parsed()) {
            name = "eval fig4";
        }
        manifest.emplace(g, name, args, config);
        int code = kOk;
        if (bipp->parsed()) {
            code = cmd_bipp(g, prior_path, t_list, t_min, t_max, points, log_grid, strategy, out);
        } else if (ipsp->parsed()) {
            code = cmd_ipsp(g, prior_path, rate, horizon, ipsp_points, out);
        } else if (check->parsed()) {
            code = cmd_check(g, model_path, property_text, samples, out);
        } else if (mission_run->parsed()) {
            code = cmd_mission(g, seed_opt->count() > 0, config_path, runs, out);
        } else if (fig4->parsed()) {
            code = cmd_fig4(g, fig_points, out);
        } else {
            code = cmd_fig5(g, fig5_horizon, fig5_points, out);
        }
        manifest->finish(code);
        return code;
    } catch (const ParseError& e) {
        return fail("parse", e, kUsageError);
    } catch (const InvalidArgument& e) {
        return fail("usage", e, kUsageError);
    } catch (const InvalidArity& e) {
        return fail("usage", e, kUsageError);
    } catch (const Error& e) {
        return fail("verification", e, kVerificationError);
    } catch (const json::exception& e) {
        return fail("manifest", e, kUsageError);
    } catch (const std::filesystem::filesystem_error& e) {
        return fail("io", e, kUsageError);
    }
}

}  // namespace rqv::cli
