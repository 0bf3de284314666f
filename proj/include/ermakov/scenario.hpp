// Scenario files: one JSON document drives every pipeline. Validation is
// strict — unknown keys, missing class fields, or extraneous class fields
// are configuration errors, reported before anything runs.
#pragma once

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ermakov/errors.hpp"
#include "ermakov/reduce.hpp"
#include "ermakov/symflow.hpp"
#include "ermakov/symgen.hpp"
#include "ermakov/systems.hpp"

namespace ermakov::scenario {

/// Reference to a generator: a catalog name or inline text, plus the
/// real/imaginary part used by the numeric pipelines.
struct GeneratorRef {
    std::string name;  // catalog name, or a label for inline text
    std::string text;  // empty = catalog lookup
    symflow::Part part = symflow::Part::real;

    symexpr::GeneratorSym resolve() const {
        return text.empty() ? symgen::catalog(name) : symgen::parse_generator(text, name);
    }
    std::string label() const {
        return name + ":" + symflow::to_string(part);
    }
};

struct PullbackRequest {
    GeneratorRef generator;
    symflow::VName v = symflow::VName::V2;
};

struct ReportOptions {
    std::vector<reduce::ReducedForm> forms = {
        reduce::ReducedForm::derived_full, reduce::ReducedForm::paper_2_4,
        reduce::ReducedForm::paper_2_6_or_2_9, reduce::ReducedForm::paper_2_13};
    std::vector<reduce::ConditionId> conditions;      // default chosen per class
    double audit_theta_min = reduce::kPi / 6.0;
    double audit_theta_max = reduce::kPi / 3.0;
    int audit_samples = 61;
    std::vector<GeneratorRef> check_generators;       // symmetry-check set
    std::vector<GeneratorRef> flow_generators;        // flow-verify set
    std::string ansatz;                               // symmetry-solve input
    double epsilon = 0.1;
    double flow_tol = 1e-6;
    std::vector<PullbackRequest> pullbacks;
};

struct Scenario {
    std::string name;
    systems::SystemSpec spec;
    systems::CartState ic;
    double t_end = 10.0;
    double rtol = 1e-10;
    double atol = 1e-12;
    double theta_ref = reduce::kPi / 4.0;
    int theta_samples = 200;
    ReportOptions report;

    Scenario() : spec(systems::SystemSpec::toy(shapefn::ShapeExpr::parse("0"))) {}
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& where,
                                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) { ok = true; break; }
        if (!ok)
            throw ScenarioError("unknown key '" + key + "' in " + where);
    }
}

inline double require_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key))
        throw ScenarioError("missing key '" + std::string(key) + "' in " + where);
    if (!obj[key].is_number())
        throw ScenarioError("key '" + std::string(key) + "' in " + where +
                            " must be a number");
    return obj[key].get<double>();
}

inline std::string require_string(const json& obj, const char* key,
                                  const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_string())
        throw ScenarioError("missing string key '" + std::string(key) + "' in " + where);
    return obj[key].get<std::string>();
}

inline shapefn::ShapeExpr parse_shape(const json& obj, const char* key,
                                      const std::string& where) {
    std::string text = require_string(obj, key, where);
    try {
        return shapefn::ShapeExpr::parse(text);
    } catch (const shapefn::ParseError& e) {
        throw ScenarioError(where + "." + key + ": " + e.what());
    }
}

inline systems::SystemSpec parse_system(const json& sys) {
    std::string cls = require_string(sys, "class", "system");
    if (cls == "toy") {
        reject_unknown_keys(sys, "system (toy)", {"class", "w"});
        return systems::SystemSpec::toy(parse_shape(sys, "w", "system"));
    }
    if (cls == "generalized") {
        reject_unknown_keys(sys, "system (generalized)", {"class", "f", "g", "w"});
        return systems::SystemSpec::generalized(parse_shape(sys, "f", "system"),
                                                parse_shape(sys, "g", "system"),
                                                parse_shape(sys, "w", "system"));
    }
    if (cls == "kepler_ermakov") {
        reject_unknown_keys(sys, "system (kepler_ermakov)",
                            {"class", "f", "g", "h", "C", "w"});
        return systems::SystemSpec::kepler_ermakov(
            parse_shape(sys, "f", "system"), parse_shape(sys, "g", "system"),
            parse_shape(sys, "h", "system"), require_number(sys, "C", "system"),
            parse_shape(sys, "w", "system"));
    }
    throw ScenarioError("system.class must be toy, generalized or kepler_ermakov");
}

inline symflow::Part parse_part(const std::string& s, const std::string& where) {
    if (s == "re") return symflow::Part::real;
    if (s == "im") return symflow::Part::imag;
    throw ScenarioError(where + ": part must be \"re\" or \"im\"");
}

inline GeneratorRef parse_generator_ref(const json& j, const std::string& where) {
    GeneratorRef ref;
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        auto colon = s.rfind(':');
        if (colon != std::string::npos) {
            ref.part = parse_part(s.substr(colon + 1), where);
            s = s.substr(0, colon);
        }
        ref.name = s;
    } else if (j.is_object()) {
        reject_unknown_keys(j, where, {"name", "text", "part"});
        if (j.contains("text")) ref.text = j["text"].get<std::string>();
        if (j.contains("name")) ref.name = j["name"].get<std::string>();
        if (ref.name.empty()) ref.name = ref.text.empty() ? "?" : ref.text;
        if (j.contains("part"))
            ref.part = parse_part(j["part"].get<std::string>(), where);
    } else {
        throw ScenarioError(where + ": generator must be a name or an object");
    }
    // resolve eagerly so bad references fail at load time
    (void)ref.resolve();
    return ref;
}

inline reduce::ReducedForm parse_form(const std::string& s) {
    for (auto f : {reduce::ReducedForm::derived_full, reduce::ReducedForm::paper_2_4,
                   reduce::ReducedForm::paper_2_6_or_2_9, reduce::ReducedForm::paper_2_13})
        if (s == reduce::to_string(f)) return f;
    throw ScenarioError("unknown reduced form '" + s + "'");
}

inline reduce::ConditionId parse_condition(const std::string& s) {
    if (s == "eq_2_5") return reduce::ConditionId::eq_2_5;
    if (s == "toy_L") return reduce::ConditionId::toy_L;
    throw ScenarioError("unknown condition '" + s + "'");
}

inline ReportOptions parse_report(const json& rep) {
    ReportOptions out;
    reject_unknown_keys(rep, "report",
                        {"forms", "conditions", "audit_theta_min", "audit_theta_max",
                         "audit_samples", "check_generators", "flow_generators",
                         "ansatz", "epsilon", "flow_tol", "pullbacks"});
    if (rep.contains("forms")) {
        out.forms.clear();
        for (const auto& f : rep["forms"]) out.forms.push_back(parse_form(f.get<std::string>()));
    }
    if (rep.contains("conditions")) {
        for (const auto& c : rep["conditions"])
            out.conditions.push_back(parse_condition(c.get<std::string>()));
    }
    if (rep.contains("audit_theta_min")) out.audit_theta_min = rep["audit_theta_min"].get<double>();
    if (rep.contains("audit_theta_max")) out.audit_theta_max = rep["audit_theta_max"].get<double>();
    if (rep.contains("audit_samples")) out.audit_samples = rep["audit_samples"].get<int>();
    if (rep.contains("check_generators"))
        for (const auto& g : rep["check_generators"])
            out.check_generators.push_back(parse_generator_ref(g, "report.check_generators"));
    if (rep.contains("flow_generators"))
        for (const auto& g : rep["flow_generators"])
            out.flow_generators.push_back(parse_generator_ref(g, "report.flow_generators"));
    if (rep.contains("ansatz")) out.ansatz = rep["ansatz"].get<std::string>();
    if (rep.contains("epsilon")) out.epsilon = rep["epsilon"].get<double>();
    if (rep.contains("flow_tol")) out.flow_tol = rep["flow_tol"].get<double>();
    if (rep.contains("pullbacks")) {
        for (const auto& p : rep["pullbacks"]) {
            reject_unknown_keys(p, "report.pullbacks[]", {"generator", "part", "v"});
            PullbackRequest req;
            if (!p.contains("generator"))
                throw ScenarioError("report.pullbacks[] needs a generator");
            req.generator = parse_generator_ref(p["generator"], "report.pullbacks[]");
            if (p.contains("part"))
                req.generator.part =
                    parse_part(p["part"].get<std::string>(), "report.pullbacks[]");
            req.v = symflow::v_from_string(require_string(p, "v", "report.pullbacks[]"));
            out.pullbacks.push_back(std::move(req));
        }
    }
    return out;
}

}  // namespace detail

inline Scenario load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot read scenario file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError("scenario JSON parse error: " + std::string(e.what()));
    }
    if (!doc.is_object()) throw ScenarioError("scenario root must be an object");
    detail::reject_unknown_keys(doc, "scenario",
                                {"system", "ic", "t_span", "rtol", "atol", "theta_ref",
                                 "theta_samples", "report"});
    Scenario sc;
    sc.name = path.stem().string();
    if (!doc.contains("system")) throw ScenarioError("scenario needs a system");
    sc.spec = detail::parse_system(doc["system"]);

    if (!doc.contains("ic")) throw ScenarioError("scenario needs an ic");
    const auto& ic = doc["ic"];
    detail::reject_unknown_keys(ic, "ic", {"x", "y", "vx", "vy"});
    sc.ic.x = detail::require_number(ic, "x", "ic");
    sc.ic.y = detail::require_number(ic, "y", "ic");
    sc.ic.vx = detail::require_number(ic, "vx", "ic");
    sc.ic.vy = detail::require_number(ic, "vy", "ic");

    if (!doc.contains("t_span") || !doc["t_span"].is_array() || doc["t_span"].size() != 2)
        throw ScenarioError("scenario needs t_span = [t0, t1]");
    sc.ic.t = doc["t_span"][0].get<double>();
    sc.t_end = doc["t_span"][1].get<double>();
    if (!(sc.t_end > sc.ic.t)) throw ScenarioError("t_span must satisfy t1 > t0");

    if (doc.contains("rtol")) sc.rtol = doc["rtol"].get<double>();
    if (doc.contains("atol")) sc.atol = doc["atol"].get<double>();
    if (sc.rtol <= 0 || sc.atol <= 0) throw ScenarioError("tolerances must be positive");
    if (doc.contains("theta_ref")) sc.theta_ref = doc["theta_ref"].get<double>();
    if (doc.contains("theta_samples")) sc.theta_samples = doc["theta_samples"].get<int>();
    if (sc.theta_samples < 8) throw ScenarioError("theta_samples must be >= 8");
    if (doc.contains("report")) sc.report = detail::parse_report(doc["report"]);

    if (sc.report.conditions.empty()) {
        sc.report.conditions = {sc.spec.cls() == systems::SystemClass::toy
                                    ? reduce::ConditionId::toy_L
                                    : reduce::ConditionId::eq_2_5};
    }
    if (sc.report.check_generators.empty()) {
        for (const auto& n : symgen::printed_names())
            sc.report.check_generators.push_back({n, "", symflow::Part::real});
        for (const char* n : {"Gamma6p_corrected", "Gamma6m_corrected",
                              "Gamma8p_corrected", "Gamma8m_corrected"})
            sc.report.check_generators.push_back({n, "", symflow::Part::real});
    }
    if (sc.report.flow_generators.empty()) {
        sc.report.flow_generators = {
            {"Gamma1", "", symflow::Part::real},
            {"Gamma2", "", symflow::Part::real},
            {"Gamma3", "", symflow::Part::real},
            {"Gamma4p", "", symflow::Part::real},
            {"Gamma4p", "", symflow::Part::imag},
            {"Gamma6p_corrected", "", symflow::Part::real},
            {"Gamma6p_corrected", "", symflow::Part::imag},
            {"Gamma8p_corrected", "", symflow::Part::real},
            {"Gamma8p_corrected", "", symflow::Part::imag},
        };
    }
    return sc;
}

}  // namespace ermakov::scenario
