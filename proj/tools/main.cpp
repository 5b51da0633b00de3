// transferlab command-line driver. Each subcommand reads a JSON config,
// applies --set overrides and calls one library operation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "transferlab/cost_adaptive.hpp"
#include "transferlab/discrepancy.hpp"
#include "transferlab/families.hpp"
#include "transferlab/ratelab.hpp"
#include "transferlab/rng.hpp"
#include "transferlab/scenario_io.hpp"
#include "transferlab/source_select.hpp"

using namespace transferlab;
namespace fs = std::filesystem;

namespace {

// Bad configs and arguments exit 2, failures during computation exit 3.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Common {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out;
    std::size_t jobs = 0;
    std::vector<std::string> sets;
};

Json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

// --set a.b=v; v is parsed as JSON when it parses, else kept as a string.
void apply_set(Json& cfg, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), raw = kv.substr(eq + 1);
    Json value = Json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    Json* node = &cfg;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("--set: empty key segment in '" + key + "'");
        if (!node->is_object()) throw ConfigError("--set: '" + key + "' descends into a non-object");
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = value;
}

struct Config {
    Json j;
    fs::path base;  // relative scenario paths resolve against the config file
};

Config load_config(const Common& c) {
    Config cfg{Json::object(), fs::current_path()};
    if (!c.config_path.empty()) {
        cfg.j = parse_json_text(read_file(c.config_path), c.config_path);
        if (!cfg.j.is_object()) throw ConfigError("config must be a JSON object");
        cfg.base = fs::absolute(c.config_path).parent_path();
    }
    for (const auto& s : c.sets) apply_set(cfg.j, s);
    return cfg;
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <class T>
T get_or(const Json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError("bad value for '" + key + "': " + e.what());
    }
}

template <class T>
T require(const Json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing key '" + key + "'");
    return get_or<T>(j, key, T{});
}

ConfidenceParams confidence(const Json& j) {
    ConfidenceParams cp;
    cp.c = get_or(j, "c", cp.c);
    cp.delta = get_or(j, "delta", cp.delta);
    cp.validate();
    return cp;
}

// ---- scenarios ----

struct Loaded {
    std::string name;
    TransferPair pair;
    HypothesisClass cls;
    std::vector<std::vector<double>> densities;
    std::optional<std::size_t> d_p;
};

const std::vector<std::pair<std::string, std::string>> kBuiltins = {
    {"example1", "two rings of points, P inside, Q outside, halfplane labels"},
    {"example2", "P = U[0,2], Q = U[0,1], threshold at 1/2"},
    {"example3", "Q = U[-1,1], P thins out to the right of 0 (gamma >= 1)"},
    {"example4", "P concentrates at 0, Q = U[-1,1] (0 < gamma < 1)"},
    {"rcs_violating", "three points, the P-optimal labeling errs on Q mass `gap`"},
    {"theorem3", "member of the two-level hard family"},
    {"theorem4", "member of the two-block hard family"},
};

const std::set<std::string> kFamilyKeys = {"form",   "d_H",  "rho", "beta_P", "beta_Q",       "epsilon",
                                           "eps1",   "eps2", "tau", "packing_seed", "tuned_c1"};

SigmaFamily build_family(const Json& f) {
    const std::string form = get_or<std::string>(f, "form", "two_level");
    const auto d_H = require<std::size_t>(f, "d_H");
    const double rho = get_or(f, "rho", 1.0), bp = get_or(f, "beta_P", 0.5), bq = get_or(f, "beta_Q", 0.5);
    const auto seed = get_or<std::uint64_t>(f, "packing_seed", 0);
    if (form == "two_level") return build_theorem3_family(d_H, rho, bp, bq, require<double>(f, "epsilon"), seed);
    if (form == "two_block")
        return build_theorem4_family(d_H, rho, bp, bq, require<double>(f, "eps1"), require<double>(f, "eps2"),
                                     get_or(f, "tau", 0.0), seed);
    throw ConfigError("family form must be two_level or two_block");
}

Loaded load_builtin(const Json& spec) {
    const std::set<std::string> keys = [] {
        std::set<std::string> k = kFamilyKeys;
        k.insert({"builtin", "gamma", "ring_points", "gap", "member"});
        return k;
    }();
    check_keys(spec, keys, "scenario");
    const std::string name = require<std::string>(spec, "builtin");
    Loaded l{name, {}, HypothesisClass::thresholds(), {}, std::nullopt};
    if (name.rfind("example", 0) == 0 && name.size() == 8 && name[7] >= '1' && name[7] <= '4') {
        const int id = name[7] - '0';
        ExampleParams p;
        p.gamma = get_or(spec, "gamma", id == 4 ? 0.5 : p.gamma);
        p.ring_points = get_or(spec, "ring_points", p.ring_points);
        l.pair = example_scenario(id, p);
        l.cls = example_class(id, p);
    } else if (name == "rcs_violating") {
        l.pair = rcs_violating_pair(get_or(spec, "gap", 0.15));
        l.cls = HypothesisClass::all_labelings(3);
    } else if (name == "theorem3" || name == "theorem4") {
        Json f = spec;
        for (const char* k : {"builtin", "member", "gamma", "ring_points", "gap", "tuned_c1"}) f.erase(k);
        f["form"] = name == "theorem3" ? "two_level" : "two_block";
        const auto fam = build_family(f);
        const auto m = get_or<std::size_t>(spec, "member", 0);
        if (m >= fam.size()) throw ConfigError("member index out of range");
        l.pair = fam.pairs[m];
        l.cls = fam.hypothesis_class();
    } else {
        throw ConfigError("unknown builtin scenario '" + name + "'");
    }
    return l;
}

bool is_builtin(const std::string& s) {
    for (const auto& [n, d] : kBuiltins)
        if (n == s) return true;
    return false;
}

// A scenario spec is a builtin name, a path to a scenario file, an object
// with a "builtin" key, or an inline scenario object.
Loaded load_spec(const Json& spec, const fs::path& base) {
    if (spec.is_string()) {
        const auto s = spec.get<std::string>();
        if (is_builtin(s)) return load_builtin(Json{{"builtin", s}});
        fs::path p = s;
        if (p.is_relative()) p = base / p;
        return load_spec(parse_json_text(read_file(p), p.string()), base);
    }
    if (!spec.is_object()) throw ConfigError("scenario must be a name, a path or an object");
    if (spec.contains("builtin")) return load_builtin(spec);
    Scenario sc;
    try {
        sc = scenario_from_json(spec);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    return {sc.pair.name.empty() ? "inline" : sc.pair.name, sc.pair, scenario_class(sc), sc.densities, sc.d_p};
}

Loaded scenario_of(const Config& cfg) {
    if (!cfg.j.contains("scenario")) throw ConfigError("missing key 'scenario'");
    return load_spec(cfg.j.at("scenario"), cfg.base);
}

std::size_t support_size(const Distribution& d) {
    if (const auto* j = std::get_if<DiscreteJoint>(&d)) return j->size();
    return 0;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---- commands ----

int cmd_scenario(const Common& c, const std::string& action, const std::string& name) {
    if (action == "list") {
        if (!name.empty()) throw ConfigError("scenario list takes no name");
        std::string text;
        for (const auto& [n, d] : kBuiltins) text += n + "\t" + d + "\n";
        write_text(c.out, text);
        return 0;
    }
    Config cfg = load_config(c);
    check_keys(cfg.j, {"scenario"}, "config");
    const Loaded l = name.empty() ? scenario_of(cfg) : load_spec(Json(name), cfg.base);
    if (action == "describe") {
        Json j = {{"name", l.name},
                  {"kind", std::holds_alternative<DiscreteJoint>(l.pair.q) ? "discrete" : "threshold"},
                  {"support_size", support_size(l.pair.q)},
                  {"class", {{"kind", l.cls.is_finite() ? "finite" : "threshold"}, {"vc_dim", l.cls.vc_dim()}}},
                  {"densities", l.densities.size()}};
        if (l.cls.is_finite()) j["class"]["size"] = l.cls.size();
        j["certified"] = l.pair.certified ? certified_to_json(*l.pair.certified) : Json(nullptr);
        write_text(c.out, dump(j));
        return 0;
    }
    if (action == "emit") {
        Scenario sc{l.pair, std::nullopt, l.densities, l.d_p};
        if (l.cls.is_finite()) sc.cls = l.cls;
        write_text(c.out, dump(scenario_to_json(sc)));
        return 0;
    }
    throw ConfigError("scenario action must be list, describe or emit");
}

int cmd_exponent(const Common& c) {
    Config cfg = load_config(c);
    check_keys(cfg.j, {"scenario", "C", "c_noise", "grid_intervals", "refine"}, "config");
    const Loaded l = scenario_of(cfg);
    const double C = get_or(cfg.j, "C", 1.0), c_noise = get_or(cfg.j, "c_noise", C);
    if (!(C > 0.0) || !(c_noise > 0.0)) throw ConfigError("C and c_noise must be positive");
    std::vector<double> grid;
    if (!l.cls.is_finite())
        grid = threshold_grid(l.pair, get_or<std::size_t>(cfg.j, "grid_intervals", kDefaultGridIntervals),
                              get_or<std::size_t>(cfg.j, "refine", 0));
    const PairView v = make_view(l.pair, l.cls, grid);
    Json j = {{"scenario", l.name},
              {"C", C},
              {"rho", report_to_json(rho_min(v, C))},
              {"gamma", report_to_json(gamma_min(v, C))},
              {"rho_prime", report_to_json(rho_prime_min(v, C))},
              {"beta_P", report_to_json(beta_max(v, Side::P, c_noise))},
              {"beta_Q", report_to_json(beta_max(v, Side::Q, c_noise))},
              {"d_A", number_to_json(d_A(v))},
              {"d_Y", number_to_json(d_Y(v))}};
    write_text(c.out, dump(j));
    return 0;
}

int cmd_verify_family(const Common& c) {
    Config cfg = load_config(c);
    check_keys(cfg.j, {"family", "C"}, "config");
    if (!cfg.j.contains("family")) throw ConfigError("missing key 'family'");
    const Json& f = cfg.j.at("family");
    check_keys(f, kFamilyKeys, "family");
    const auto fam = build_family(f);
    const double C = get_or(cfg.j, "C", 1.0);
    const auto cls = fam.hypothesis_class();
    const auto& p = fam.params;
    Json failures = Json::array();
    double rho_lo = std::numeric_limits<double>::infinity(), rho_hi = -rho_lo;
    for (std::size_t i = 0; i < fam.size(); ++i) {
        const PairView v = make_view(fam.pairs[i], cls);
        const auto m = verify_membership(v, p.rho, p.beta_P, p.beta_Q, C);
        if (!m.member)
            failures.push_back({{"member", i},
                                {"inequality", m.violation->inequality},
                                {"lhs", number_to_json(m.violation->lhs)},
                                {"rhs", number_to_json(m.violation->rhs)}});
        const double r = rho_min(v, C).value;
        rho_lo = std::min(rho_lo, r);
        rho_hi = std::max(rho_hi, r);
    }
    Json j = {{"members", fam.size()},
              {"member", failures.empty()},
              {"C", C},
              {"rho", p.rho},
              {"rho_min", {{"lo", number_to_json(rho_lo)}, {"hi", number_to_json(rho_hi)}}},
              {"failures", failures}};
    write_text(c.out, dump(j));
    return 0;
}

RateGrid parse_grid(const Json& g) {
    RateGrid grid;
    try {
        if (g.is_array()) {
            for (const auto& cell : g) grid.push_back({cell.at(0).get<std::size_t>(), cell.at(1).get<std::size_t>()});
        } else if (g.is_object()) {
            check_keys(g, {"n_p", "n_q"}, "grid");
            const auto np = get_or<std::vector<std::size_t>>(g, "n_p", {0});
            const auto nq = get_or<std::vector<std::size_t>>(g, "n_q", {0});
            for (auto a : np)
                for (auto b : nq) grid.push_back({a, b});
        } else {
            throw ConfigError("grid must be a list of [n_p, n_q] or {\"n_p\": [...], \"n_q\": [...]}");
        }
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    if (grid.empty()) throw ConfigError("grid is empty");
    return grid;
}

int cmd_rates(const Common& c) {
    Config cfg = load_config(c);
    check_keys(cfg.j, {"scenario", "family", "estimator", "grid", "trials", "c", "delta", "fit"}, "config");
    const auto cp = confidence(cfg.j);
    const auto id = get_or<std::string>(cfg.j, "estimator", "algorithm1");
    const auto estimator = make_estimator(id, cp);
    const auto grid = parse_grid(cfg.j.value("grid", Json()));
    const auto trials = get_or<std::size_t>(cfg.j, "trials", 100);

    Json fit_cfg = cfg.j.value("fit", Json());
    if (!fit_cfg.is_null()) check_keys(fit_cfg, {"axis", "theory", "tolerance", "statistic", "exclude_smallest"}, "fit");

    RateTable table;
    if (cfg.j.contains("family")) {
        if (cfg.j.contains("scenario")) throw ConfigError("give either 'scenario' or 'family', not both");
        const Json& f = cfg.j.at("family");
        check_keys(f, kFamilyKeys, "family");
        if (f.contains("tuned_c1")) {
            if (get_or<std::string>(f, "form", "two_level") != "two_level")
                throw ConfigError("tuned_c1 needs the two_level form");
            const auto d_H = require<std::size_t>(f, "d_H");
            const double rho = get_or(f, "rho", 1.0), bp = get_or(f, "beta_P", 0.5), bq = get_or(f, "beta_Q", 0.5);
            const auto cls = build_theorem3_family(d_H, rho, bp, bq, 0.5).hypothesis_class();
            table = monte_carlo(tuned_theorem3_pairs(d_H, rho, bp, bq, require<double>(f, "tuned_c1"),
                                                     get_or<std::uint64_t>(f, "packing_seed", 0)),
                                cls, id, estimator, grid, trials, c.seed, c.jobs);
        } else {
            const auto fam = build_family(f);
            const auto pairs = fam.pairs;
            table = monte_carlo([pairs](std::size_t, std::size_t) { return pairs; }, fam.hypothesis_class(), id,
                                estimator, grid, trials, c.seed, c.jobs);
        }
    } else {
        const Loaded l = scenario_of(cfg);
        table = monte_carlo(l.pair, l.cls, id, estimator, grid, trials, c.seed, c.jobs);
    }
    write_text(c.out, rate_table_csv(table));

    if (!fit_cfg.is_null()) {
        const auto axis_s = get_or<std::string>(fit_cfg, "axis", "n_q");
        if (axis_s != "n_p" && axis_s != "n_q") throw ConfigError("fit axis must be n_p or n_q");
        const auto stat_s = get_or<std::string>(fit_cfg, "statistic", "median");
        if (stat_s != "median" && stat_s != "mean") throw ConfigError("fit statistic must be median or mean");
        const auto fit = fit_slope(table, axis_s == "n_p" ? Axis::n_p : Axis::n_q,
                                   stat_s == "mean" ? Statistic::mean : Statistic::median,
                                   get_or<std::size_t>(fit_cfg, "exclude_smallest", 2));
        Json j = {{"fit", slope_to_json(fit)}};
        if (fit_cfg.contains("theory"))
            j["comparison"] = comparison_to_json(
                compare_to_theory(fit, require<double>(fit_cfg, "theory"), get_or(fit_cfg, "tolerance", 0.2)));
        // With the table on stdout the fit goes to stderr so the CSV stays clean.
        (c.out.empty() || c.out == "-" ? std::cerr : std::cout) << dump(j);
    }
    return 0;
}

CostSchedule schedule_at(const Json& j, const std::string& key, CostSchedule fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return schedule_from_json(j.at(key));
    } catch (const Json::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

std::vector<double> unlabeled_x(const Distribution& d, std::size_t n, std::uint64_t seed) {
    return sample_unlabeled(d, n, seed).x;
}

int cmd_adaptive(const Common& c) {
    Config cfg = load_config(c);
    check_keys(cfg.j,
               {"scenario", "epsilon", "delta", "c", "cost_P", "cost_Q", "n_unlabeled", "kappa", "round_cap", "step6",
                "use_source"},
               "config");
    const Loaded l = scenario_of(cfg);
    const auto cp = confidence(cfg.j);
    const double eps = require<double>(cfg.j, "epsilon");
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    AdaptiveOptions opt;
    opt.kappa = get_or(cfg.j, "kappa", opt.kappa);
    opt.round_cap = get_or(cfg.j, "round_cap", opt.round_cap);
    opt.use_source = get_or(cfg.j, "use_source", opt.use_source);
    const auto step6 = get_or<std::string>(cfg.j, "step6", "A");
    if (step6 != "A" && step6 != "A_prime") throw ConfigError("step6 must be A or A_prime");
    opt.step6 = step6 == "A" ? Step6Variant::A : Step6Variant::A_prime;
    const auto sched_P = schedule_at(cfg.j, "cost_P", CostSchedule::linear(1.0));
    const auto sched_Q = schedule_at(cfg.j, "cost_Q", CostSchedule::linear(1.0));
    const auto n_u = get_or<std::size_t>(cfg.j, "n_unlabeled", required_unlabeled(eps, cp.delta, l.cls.vc_dim(), opt.kappa));

    const auto u = unlabeled_x(l.pair.q, n_u, derive_seed(c.seed, {2}));
    const auto r = algorithm2(eps, cp.delta, sched_P, sched_Q, distribution_sampler(l.pair.p, derive_seed(c.seed, {0})),
                              distribution_sampler(l.pair.q, derive_seed(c.seed, {1})), u, l.cls, cp, opt);
    Json j = {{"scenario", l.name},
              {"epsilon", eps},
              {"excess_Q", number_to_json(excess_risk(l.pair.q, r.h, l.cls))},
              {"returned_by", r.transcript.returned_by},
              {"total_cost", number_to_json(r.transcript.total_cost)},
              {"size_P", r.transcript.size_P},
              {"size_Q", r.transcript.size_Q},
              {"n_unlabeled", n_u},
              {"hypothesis", hypothesis_to_json(r.h)}};
    if (c.out.empty() || c.out == "-") {
        j["rounds"] = Json::array();
        for (const auto& round : r.transcript.rounds) j["rounds"].push_back(round_to_json(round));
    } else {
        write_text(c.out, transcript_to_jsonl(r.transcript));
    }
    std::cout << dump(j);
    return 0;
}

int cmd_select(const Common& c) {
    Config cfg = load_config(c);
    check_keys(cfg.j, {"sources", "target", "n_source", "n_q", "n_unlabeled", "c", "delta"}, "config");
    const auto cp = confidence(cfg.j);
    const Json specs = cfg.j.value("sources", Json());
    if (!specs.is_array() || specs.empty()) throw ConfigError("'sources' must be a non-empty list of scenarios");
    std::vector<Loaded> sources;
    for (const auto& s : specs) sources.push_back(load_spec(s, cfg.base));
    const Loaded target = cfg.j.contains("target") ? load_spec(cfg.j.at("target"), cfg.base) : sources.front();

    std::vector<std::size_t> n_source;
    const Json ns = cfg.j.value("n_source", Json(256));
    try {
        if (ns.is_array()) n_source = ns.get<std::vector<std::size_t>>();
        else n_source.assign(sources.size(), ns.get<std::size_t>());
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("n_source: ") + e.what());
    }
    if (n_source.size() != sources.size()) throw ConfigError("n_source needs one size per source");

    std::vector<LabeledSample> s;
    for (std::size_t i = 0; i < sources.size(); ++i)
        s.push_back(sample_labeled(sources[i].pair.p, n_source[i], derive_seed(c.seed, {0, i})));
    const auto s_q = sample_labeled(target.pair.q, get_or<std::size_t>(cfg.j, "n_q", 0), derive_seed(c.seed, {1}));
    const auto u = unlabeled_x(target.pair.q, get_or<std::size_t>(cfg.j, "n_unlabeled", 1024), derive_seed(c.seed, {2}));
    const auto r = algorithm4(s, s_q, u, target.cls, cp);
    Json j = {{"chosen", r.chosen},
              {"source", sources[r.chosen].name},
              {"delta_hats", r.delta_hats},
              {"excess_Q", number_to_json(excess_risk(target.pair.q, r.h, target.cls))},
              {"hypothesis", hypothesis_to_json(r.h)}};
    write_text(c.out, dump(j));
    return 0;
}

int cmd_reweight(const Common& c) {
    Config cfg = load_config(c);
    check_keys(cfg.j, {"scenario", "densities", "d_p", "n_p", "n_q", "n_unlabeled", "c", "delta"}, "config");
    const Loaded l = scenario_of(cfg);
    if (!std::holds_alternative<DiscreteJoint>(l.pair.p)) throw ConfigError("reweight needs a discrete scenario");
    const auto cp = confidence(cfg.j);
    auto members = get_or(cfg.j, "densities", l.densities);
    if (members.empty()) throw ConfigError("no density family: give 'densities' or use a scenario that has them");
    std::optional<std::size_t> d_p = l.d_p;
    if (cfg.j.contains("d_p")) d_p = require<std::size_t>(cfg.j, "d_p");
    const auto family = DensityFamily::make(members, d_p);
    for (const auto& m : family.members)
        if (m.size() != support_size(l.pair.p)) throw ConfigError("density length must equal the support size");

    const auto s_p = sample_labeled(l.pair.p, get_or<std::size_t>(cfg.j, "n_p", 256), derive_seed(c.seed, {0}));
    const auto s_q = sample_labeled(l.pair.q, get_or<std::size_t>(cfg.j, "n_q", 0), derive_seed(c.seed, {1}));
    const auto u = unlabeled_x(l.pair.q, get_or<std::size_t>(cfg.j, "n_unlabeled", 1024), derive_seed(c.seed, {2}));
    const auto r = algorithm3(s_p, s_q, u, family, l.cls, cp);
    Json j = {{"chosen", r.chosen},
              {"d_p", family.d_p},
              {"delta_hats", r.delta_hats},
              {"excess_Q", number_to_json(excess_risk(l.pair.q, r.h, l.cls))},
              {"hypothesis", hypothesis_to_json(r.h)}};
    write_text(c.out, dump(j));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transfer learning experiments under covariate shift", "transferlab"};
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    app.add_option("--config", common.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", common.seed, "Master seed for every random draw")->default_val(0);
    app.add_option("--out", common.out, "Output file (default stdout)");
    app.add_option("--jobs", common.jobs, "Monte Carlo worker threads (0 = available parallelism)")->default_val(0);
    app.add_option("--set", common.sets, "Override a config key, KEY=VALUE with dotted keys")->allow_extra_args(false);

    std::string action, name;
    auto* scenario = app.add_subcommand("scenario", "List, describe or emit a scenario");
    scenario->add_option("action", action, "list | describe | emit")
        ->required()
        ->check(CLI::IsMember({"list", "describe", "emit"}));
    scenario->add_option("name", name, "Builtin name or scenario file (default: config 'scenario')");
    auto* exponent = app.add_subcommand("exponent", "Transfer and noise exponents and discrepancies of a scenario");
    auto* verify = app.add_subcommand("verify-family", "Check every member of a hard family against its class");
    auto* rates = app.add_subcommand("rates", "Monte Carlo excess-risk table over a sample-size grid (CSV)");
    auto* adaptive = app.add_subcommand("adaptive", "Cost-aware doubling sampler");
    auto* select = app.add_subcommand("select", "Pick one of several sources with unlabeled target data");
    auto* reweight = app.add_subcommand("reweight", "Pick a reweighting from a density family");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (common.jobs == 0) common.jobs = std::max(1u, std::thread::hardware_concurrency());
    try {
        if (scenario->parsed()) return cmd_scenario(common, action, name);
        if (exponent->parsed()) return cmd_exponent(common);
        if (verify->parsed()) return cmd_verify_family(common);
        if (rates->parsed()) return cmd_rates(common);
        if (adaptive->parsed()) return cmd_adaptive(common);
        if (select->parsed()) return cmd_select(common);
        if (reweight->parsed()) return cmd_reweight(common);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
