#include "transferlab/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

namespace transferlab {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw std::invalid_argument(where + ": unknown key '" + key + "'");
}

std::vector<double> number_list(const Json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw std::invalid_argument("scenario: '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& v : j.at(key)) out.push_back(number_from_json(v));
    return out;
}

Json number_array(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(number_to_json(x));
    return a;
}

const char* orientation_name(Orientation o) {
    return o == Orientation::positive_above ? "positive_above" : "positive_below";
}

Orientation orientation_from(const Json& j) {
    const auto s = j.get<std::string>();
    if (s == "positive_above") return Orientation::positive_above;
    if (s == "positive_below") return Orientation::positive_below;
    throw std::invalid_argument("scenario: orientation must be positive_above or positive_below");
}

Json marginal_to_json(const ContinuousMarginal& m) {
    Json pieces = Json::array();
    for (const auto& p : m.pieces())
        pieces.push_back({{"lo", p.lo}, {"hi", p.hi}, {"weight", p.weight}, {"exponent", p.exponent},
                          {"concentrate_at_hi", p.concentrate_at_hi}});
    return {{"pieces", pieces}};
}

ContinuousMarginal marginal_from_json(const Json& j) {
    reject_unknown(j, {"pieces"}, "density");
    std::vector<DensityPiece> pieces;
    for (const auto& p : j.at("pieces")) {
        reject_unknown(p, {"lo", "hi", "weight", "exponent", "concentrate_at_hi"}, "density piece");
        DensityPiece d;
        d.lo = number_from_json(p.at("lo"));
        d.hi = number_from_json(p.at("hi"));
        d.weight = p.contains("weight") ? number_from_json(p.at("weight")) : 1.0;
        d.exponent = p.contains("exponent") ? number_from_json(p.at("exponent")) : 1.0;
        d.concentrate_at_hi = p.value("concentrate_at_hi", false);
        pieces.push_back(d);
    }
    return ContinuousMarginal(std::move(pieces));
}

Json class_to_json(const HypothesisClass& c) {
    if (!c.is_finite()) return {{"kind", "threshold"}, {"orientation", orientation_name(c.orientation())}};
    return {{"kind", "finite"}, {"support_size", c.support_size()}, {"members", c.members()}, {"vc_dim", c.vc_dim()}};
}

HypothesisClass class_from_json(const Json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "threshold") {
        reject_unknown(j, {"kind", "orientation"}, "class");
        return HypothesisClass::thresholds(j.contains("orientation") ? orientation_from(j.at("orientation"))
                                                                       : Orientation::positive_above);
    }
    if (kind != "finite") throw std::invalid_argument("class: kind must be finite or threshold");
    reject_unknown(j, {"kind", "support_size", "members", "vc_dim"}, "class");
    return HypothesisClass::finite(j.at("support_size").get<std::size_t>(), j.at("members").get<std::vector<std::uint64_t>>(),
                                   j.at("vc_dim").get<std::size_t>());
}

}  // namespace

Json number_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

double number_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw std::invalid_argument("expected a number, got " + j.dump());
}

Json certified_to_json(const Certified& c) {
    Json j = Json::object();
    auto put = [&](const char* k, const std::optional<double>& v) {
        if (v) j[k] = number_to_json(*v);
    };
    put("rho", c.rho);
    put("C_rho", c.C_rho);
    put("gamma", c.gamma);
    put("C_gamma", c.C_gamma);
    put("beta_P", c.beta_P);
    put("beta_Q", c.beta_Q);
    put("c_P", c.c_P);
    put("c_Q", c.c_Q);
    return j;
}

Certified certified_from_json(const Json& j) {
    reject_unknown(j, {"rho", "C_rho", "gamma", "C_gamma", "beta_P", "beta_Q", "c_P", "c_Q"}, "certified");
    Certified c;
    auto get = [&](const char* k, std::optional<double>& v) {
        if (j.contains(k)) v = number_from_json(j.at(k));
    };
    get("rho", c.rho);
    get("C_rho", c.C_rho);
    get("gamma", c.gamma);
    get("C_gamma", c.C_gamma);
    get("beta_P", c.beta_P);
    get("beta_Q", c.beta_Q);
    get("c_P", c.c_P);
    get("c_Q", c.c_Q);
    return c;
}

Json hypothesis_to_json(const Hypothesis& h) {
    if (const auto* l = std::get_if<Labeling>(&h)) {
        Json labels = Json::array();
        for (std::size_t i = 0; i < l->size; ++i) labels.push_back((*l)(i));
        return labels;
    }
    const auto& t = std::get<Threshold>(h);
    return {{"threshold", number_to_json(t.t)}, {"orientation", orientation_name(t.orientation)}};
}

Json scenario_to_json(const Scenario& s) {
    Json j = Json::object();
    if (const auto* p = std::get_if<DiscreteJoint>(&s.pair.p)) {
        const auto* q = std::get_if<DiscreteJoint>(&s.pair.q);
        if (!q) throw std::invalid_argument("scenario: P and Q must have the same form");
        std::vector<double> coords;
        for (const auto& sp : p->support) coords.push_back(sp.coordinate);
        j["support"] = number_array(coords);
        j["mass_p"] = number_array(p->mass);
        j["eta_p"] = number_array(p->eta);
        j["mass_q"] = number_array(q->mass);
        j["eta_q"] = number_array(q->eta);
    } else {
        const auto& tp = std::get<ThresholdJoint>(s.pair.p);
        const auto* tq = std::get_if<ThresholdJoint>(&s.pair.q);
        if (!tq) throw std::invalid_argument("scenario: P and Q must have the same form");
        if (!(tp.bayes == tq->bayes)) throw std::invalid_argument("scenario: threshold form needs one shared h*");
        j["kind"] = "threshold";
        j["p_density"] = marginal_to_json(tp.marginal);
        j["q_density"] = marginal_to_json(tq->marginal);
        j["h_star"] = number_to_json(tp.bayes.t);
        j["orientation"] = orientation_name(tp.bayes.orientation);
    }
    if (s.pair.certified) j["certified"] = certified_to_json(*s.pair.certified);
    if (!s.pair.name.empty()) j["name"] = s.pair.name;
    if (s.cls) j["class"] = class_to_json(*s.cls);
    if (!s.densities.empty()) {
        j["densities"] = Json::array();
        for (const auto& f : s.densities) j["densities"].push_back(number_array(f));
    }
    if (s.d_p) j["d_p"] = *s.d_p;
    return j;
}

Scenario scenario_from_json(const Json& j) {
    Scenario s;
    const bool threshold = j.contains("kind") && j.at("kind") == "threshold";
    if (threshold) {
        reject_unknown(j, {"kind", "p_density", "q_density", "h_star", "orientation", "certified", "name", "class",
                           "densities", "d_p"},
                       "scenario");
        const Threshold h{number_from_json(j.at("h_star")),
                          j.contains("orientation") ? orientation_from(j.at("orientation")) : Orientation::positive_above};
        s.pair.p = ThresholdJoint{marginal_from_json(j.at("p_density")), h};
        s.pair.q = ThresholdJoint{marginal_from_json(j.at("q_density")), h};
    } else {
        if (j.contains("kind") && j.at("kind") != "discrete")
            throw std::invalid_argument("scenario: kind must be discrete or threshold");
        reject_unknown(j, {"kind", "support", "mass_p", "eta_p", "mass_q", "eta_q", "certified", "name", "class",
                           "densities", "d_p"},
                       "scenario");
        const auto mass_p = number_list(j, "mass_p");
        const auto coords = j.contains("support") ? number_list(j, "support") : std::vector<double>{};
        s.pair.p = DiscreteJoint::make(mass_p, number_list(j, "eta_p"), coords);
        s.pair.q = DiscreteJoint::make(number_list(j, "mass_q"), number_list(j, "eta_q"), coords);
        if (std::get<DiscreteJoint>(s.pair.q).size() != mass_p.size())
            throw std::invalid_argument("scenario: P and Q supports differ in size");
    }
    if (j.contains("certified")) s.pair.certified = certified_from_json(j.at("certified"));
    if (j.contains("name")) s.pair.name = j.at("name").get<std::string>();
    if (j.contains("class")) s.cls = class_from_json(j.at("class"));
    if (j.contains("densities")) {
        for (const auto& f : j.at("densities")) {
            std::vector<double> w;
            for (const auto& v : f) w.push_back(number_from_json(v));
            s.densities.push_back(std::move(w));
        }
    }
    if (j.contains("d_p")) s.d_p = j.at("d_p").get<std::size_t>();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument("scenario file " + path + ": " + e.what());
    }
    return scenario_from_json(j);
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file " + path);
    out << scenario_to_json(s).dump(2) << '\n';
}

HypothesisClass scenario_class(const Scenario& s) {
    if (s.cls) return *s.cls;
    if (const auto* p = std::get_if<DiscreteJoint>(&s.pair.p)) return HypothesisClass::all_labelings(p->size());
    return HypothesisClass::thresholds(std::get<ThresholdJoint>(s.pair.p).bayes.orientation);
}

}  // namespace transferlab
