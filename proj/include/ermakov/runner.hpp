// Command implementations behind the `ermakov` CLI. Each command loads a
// scenario, runs one pipeline and writes CSV/JSON reports into the output
// directory. Outputs are byte-identical across reruns of identical inputs.
//
// Exit codes: 0 success; 1 usage/configuration error; 2 numerical failure
// (singularity, turning point, non-convergence); 3 precondition violation
// (reduction requested with C != 0 or a nonzero frequency).
#pragma once

#include <CLI11.hpp>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "ermakov/errors.hpp"
#include "ermakov/integrate.hpp"
#include "ermakov/reduce.hpp"
#include "ermakov/report_io.hpp"
#include "ermakov/scenario.hpp"
#include "ermakov/symexpr.hpp"
#include "ermakov/symflow.hpp"
#include "ermakov/symgen.hpp"
#include "ermakov/systems.hpp"

namespace ermakov::cli {

namespace fs = std::filesystem;

inline std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
            c = '-';
    return out;
}

namespace detail {

struct ReducedBundle {
    integrate::Trajectory traj;
    integrate::ReducedTrajectory rt;
    reduce::AngularLaw law;
};

inline integrate::Trajectory simulate_trajectory(const scenario::Scenario& sc) {
    auto traj = integrate::integrate_cart(sc.spec, sc.ic, sc.t_end, sc.rtol, sc.atol);
    switch (traj.path.status) {
        case rk::IntegrateStatus::completed:
            return traj;
        case rk::IntegrateStatus::event_stop:
            throw NumericalError("singularity approach: min(|x|,|y|) crossed the guard at t = " +
                                 io::format_double(traj.path.t_end()));
        case rk::IntegrateStatus::step_underflow:
            throw NumericalError("step-size underflow at t = " +
                                 io::format_double(traj.path.t_end()));
        case rk::IntegrateStatus::max_steps:
            throw NumericalError("step budget exhausted");
    }
    throw NumericalError("integration failed");
}

inline void require_reduction_preconditions(const scenario::Scenario& sc) {
    if (!sc.spec.w_is_zero())
        throw PreconditionError(
            "reduction requires the frequency w to be identically zero");
    if (sc.spec.cls() == systems::SystemClass::kepler_ermakov && sc.spec.C() != 0.0)
        throw PreconditionError("reduction requires C = 0");
}

inline ReducedBundle reduced_bundle(const scenario::Scenario& sc) {
    auto traj = simulate_trajectory(sc);
    auto rt = integrate::resample_by_theta(traj, sc.theta_samples);
    auto law = reduce::make_angular_law(sc.spec, rt, sc.theta_ref);
    return {std::move(traj), std::move(rt), std::move(law)};
}

inline io::Json run_simulate(const scenario::Scenario& sc, const fs::path& out) {
    auto traj = simulate_trajectory(sc);
    io::Csv csv({"t", "x", "y", "vx", "vy", "L", "I"});
    double i_first = 0.0, i_min = 0.0, i_max = 0.0;
    for (size_t i = 0; i < traj.size(); ++i) {
        systems::CartState s = traj.state_at_node(i);
        double L = systems::angular_momentum(s);
        double I = systems::ermakov_invariant(sc.spec, s);
        csv.add_row({s.t, s.x, s.y, s.vx, s.vy, L, I});
        if (i == 0) { i_first = i_min = i_max = I; }
        i_min = std::min(i_min, I);
        i_max = std::max(i_max, I);
    }
    io::write_file(out / "trajectory.csv", csv.to_string());

    io::Json inv = io::Json::object();
    inv.set("samples", traj.size());
    inv.set("i_first", i_first);
    inv.set("i_min", i_min);
    inv.set("i_max", i_max);
    inv.set("drift_abs", i_max - i_min);
    inv.set("drift_rel", (i_max - i_min) / std::max(1e-300, std::abs(i_first)));
    io::Json stats = io::Json::object();
    stats.set("steps", traj.path.stats.steps);
    stats.set("accepted", traj.path.stats.accepted);
    stats.set("rejected", traj.path.stats.rejected);
    stats.set("min_step", traj.path.stats.min_step);
    io::Json doc = io::Json::object();
    doc.set("invariant", std::move(inv));
    doc.set("integration", std::move(stats));
    io::write_file(out / "invariant.json", doc.dump());
    return doc;
}

inline io::Json run_reduce(const scenario::Scenario& sc, const fs::path& out) {
    require_reduction_preconditions(sc);
    ReducedBundle b = reduced_bundle(sc);

    io::Csv csv({"theta", "t", "r", "u", "u_theta", "u_thetatheta", "L", "L2"});
    for (size_t i = 0; i < b.rt.size(); ++i)
        csv.add_row({b.rt.theta[i], b.rt.t[i], b.rt.r[i], b.rt.u[i], b.rt.u_th[i],
                     b.rt.u_thth[i], b.rt.L[i], b.rt.L2[i]});
    io::write_file(out / "reduced.csv", csv.to_string());

    auto law_res = reduce::check_angular_law(b.law, b.rt);
    io::Json doc = io::Json::object();
    io::Json law = io::Json::object();
    law.set("theta_ref", b.law.theta_ref);
    law.set("L0_sq", b.law.L0_sq);
    law.set("residual_max", law_res.max_abs);
    law.set("residual_rms", law_res.rms);
    doc.set("angular_law", std::move(law));

    std::vector<std::string> header = {"theta"};
    for (auto form : sc.report.forms)
        header.push_back(std::string("e_") + reduce::to_string(form));
    io::Csv rescsv(header);
    std::vector<reduce::ResidualSeries> series;
    for (auto form : sc.report.forms)
        series.push_back(reduce::reduced_residual(sc.spec, b.law, b.rt, form));
    for (size_t i = 0; i < b.rt.size(); ++i) {
        std::vector<double> row = {b.rt.theta[i]};
        for (const auto& s : series) row.push_back(s.e[i]);
        rescsv.add_row(row);
    }
    io::write_file(out / "reduced_residuals.csv", rescsv.to_string());

    io::Json forms = io::Json::array();
    for (const auto& s : series) {
        io::Json f = io::Json::object();
        f.set("form", reduce::to_string(s.form));
        f.set("max_abs", s.max_abs);
        f.set("rms", s.rms);
        forms.push(std::move(f));
    }
    doc.set("reduced_forms", std::move(forms));
    io::write_file(out / "reduce_report.json", doc.dump());
    return doc;
}

inline io::Json run_audit(const scenario::Scenario& sc, const fs::path& out) {
    io::Json doc = io::Json::object();
    io::Json conditions = io::Json::array();
    std::vector<double> thetas(static_cast<size_t>(sc.report.audit_samples));
    for (int i = 0; i < sc.report.audit_samples; ++i)
        thetas[static_cast<size_t>(i)] =
            sc.report.audit_theta_min +
            (sc.report.audit_theta_max - sc.report.audit_theta_min) * i /
                (sc.report.audit_samples - 1);
    for (auto cond : sc.report.conditions) {
        auto samples = reduce::condition_audit(sc.spec, cond, thetas);
        io::Csv csv({"theta", "defect"});
        double max_abs = 0.0;
        for (const auto& s : samples) {
            csv.add_row({s.theta, s.defect});
            max_abs = std::max(max_abs, std::abs(s.defect));
        }
        io::write_file(out / (std::string("audit_") + reduce::to_string(cond) + ".csv"),
                       csv.to_string());
        io::Json c = io::Json::object();
        c.set("condition", reduce::to_string(cond));
        c.set("samples", samples.size());
        c.set("max_abs_defect", max_abs);
        c.set("dynamically_consistent", max_abs < 1e-10);
        conditions.push(std::move(c));
    }
    doc.set("conditions", std::move(conditions));
    io::write_file(out / "audit_report.json", doc.dump());
    return doc;
}

inline io::Json run_symmetry_check(const scenario::Scenario& sc, const fs::path& out) {
    io::Json doc = io::Json::object();
    io::Json list = io::Json::array();
    for (const auto& ref : sc.report.check_generators) {
        symexpr::GeneratorSym g = ref.resolve();
        auto r = symexpr::symmetry_residual(g);
        io::Json e = io::Json::object();
        e.set("name", ref.name);
        e.set("is_symmetry", r.is_zero());
        e.set("residual_u1_equation", r.R1.to_string());
        e.set("residual_u2_equation", r.R2.to_string());
        list.push(std::move(e));
    }
    doc.set("generators", std::move(list));
    io::write_file(out / "symmetry_check.json", doc.dump());
    return doc;
}

inline io::Json run_symmetry_solve(const scenario::Scenario& sc, const fs::path& out) {
    if (sc.report.ansatz.empty())
        throw ScenarioError("symmetry-solve needs report.ansatz in the scenario");
    auto ansatz = symgen::parse_ansatz(sc.report.ansatz);
    auto sol = symexpr::solve_coefficients(ansatz);
    io::Json doc = io::Json::object();
    doc.set("ansatz", sc.report.ansatz);
    doc.set("consistent", sol.consistent);
    doc.set("equation_count", sol.equation_count);
    io::Json unknowns = io::Json::array();
    for (size_t j = 0; j < ansatz.unknown_names.size(); ++j) {
        io::Json u = io::Json::object();
        u.set("name", ansatz.unknown_names[j]);
        if (sol.consistent) u.set("value", sol.particular[j].to_string());
        unknowns.push(std::move(u));
    }
    doc.set("unknowns", std::move(unknowns));
    doc.set("solution_space_dimension",
            sol.consistent ? sol.nullspace.size() : static_cast<size_t>(0));
    io::Json null_basis = io::Json::array();
    if (sol.consistent) {
        for (const auto& vec : sol.nullspace) {
            io::Json v = io::Json::array();
            for (const auto& c : vec) v.push(io::Json::string(c.to_string()));
            null_basis.push(std::move(v));
        }
    }
    doc.set("nullspace", std::move(null_basis));
    io::write_file(out / "symmetry_solve.json", doc.dump());
    return doc;
}

inline io::Json run_flow_verify(const scenario::Scenario& sc, const fs::path& out) {
    io::Json doc = io::Json::object();
    doc.set("epsilon", sc.report.epsilon);
    doc.set("tolerance", sc.report.flow_tol);
    io::Json list = io::Json::array();
    for (const auto& ref : sc.report.flow_generators) {
        auto g = symflow::realize(ref.resolve(), ref.part);
        g.label = ref.label();
        auto rep = symflow::verify_solution_mapping(g, sc.report.epsilon,
                                                    sc.report.flow_tol);
        io::Json e = io::Json::object();
        e.set("generator", rep.label);
        e.set("max_defect", rep.max_defect);
        e.set("monotone", rep.monotone);
        e.set("pass", rep.pass);
        list.push(std::move(e));
    }
    doc.set("mappings", std::move(list));
    io::write_file(out / "flow_verify.json", doc.dump());
    return doc;
}

inline std::vector<scenario::PullbackRequest> default_pullbacks(
    const scenario::Scenario& sc) {
    std::vector<scenario::PullbackRequest> out;
    using symflow::VName;
    if (sc.spec.cls() != systems::SystemClass::kepler_ermakov)
        out.push_back({{"Gamma1", "", symflow::Part::real}, VName::V1});
    out.push_back({{"Gamma2", "", symflow::Part::real}, VName::V2});
    out.push_back({{"Gamma3", "", symflow::Part::real}, VName::V3});
    out.push_back({{"Gamma4p", "", symflow::Part::real}, VName::V4p});
    return out;
}

inline io::Json run_pullback(const scenario::Scenario& sc, const fs::path& out) {
    ReducedBundle b = reduced_bundle(sc);
    auto requests = sc.report.pullbacks.empty() ? default_pullbacks(sc)
                                                : sc.report.pullbacks;
    io::Json doc = io::Json::object();
    auto tt = symflow::check_time_translation(sc.spec, sc.ic.t, sc.t_end);
    io::Json v10 = io::Json::object();
    v10.set("w_constant", tt.w_constant);
    v10.set("max_deviation", tt.max_deviation);
    v10.set("is_symmetry", tt.w_constant);
    doc.set("v10_time_translation", std::move(v10));

    io::Json list = io::Json::array();
    for (const auto& req : requests) {
        auto g = symflow::realize(req.generator.resolve(), req.generator.part);
        g.label = req.generator.label();
        auto rep = symflow::induced_original_variables(g, b.rt, b.law, sc.spec,
                                                       req.v, req.generator.part);
        io::Csv csv({"theta", "t", "r", "dt_derived", "dr_derived", "dt_paper",
                     "dr_paper", "mismatch_dt", "mismatch_dr"});
        for (size_t i = 0; i < rep.theta.size(); ++i)
            csv.add_row({rep.theta[i], rep.t[i], rep.r[i], rep.dt_derived[i],
                         rep.dr_derived[i], rep.dt_paper[i], rep.dr_paper[i],
                         rep.mismatch_dt[i], rep.mismatch_dr[i]});
        std::string stem = "pullback_" + sanitize(rep.generator_label) + "_" +
                           rep.v_label + ".csv";
        io::write_file(out / stem, csv.to_string());

        io::Json e = io::Json::object();
        e.set("generator", rep.generator_label);
        e.set("v_field", rep.v_label);
        e.set("csv", stem);
        e.set("max_mismatch_dt", rep.max_mismatch_dt);
        e.set("max_mismatch_dr", rep.max_mismatch_dr);
        list.push(std::move(e));
    }
    doc.set("pullbacks", std::move(list));
    io::write_file(out / "pullback_report.json", doc.dump());
    return doc;
}

inline io::Json run_report(const scenario::Scenario& sc, const fs::path& out) {
    io::Json doc = io::Json::object();
    doc.set("scenario", sc.name);
    doc.set("system_class", systems::to_string(sc.spec.cls()));
    doc.set("simulate", run_simulate(sc, out));
    bool reducible = sc.spec.w_is_zero() &&
                     !(sc.spec.cls() == systems::SystemClass::kepler_ermakov &&
                       sc.spec.C() != 0.0);
    if (reducible) {
        doc.set("reduce", run_reduce(sc, out));
        doc.set("pullback", run_pullback(sc, out));
    } else {
        doc.set("reduce_skipped",
                "reduction preconditions not met (needs w = 0 and C = 0)");
    }
    doc.set("audit", run_audit(sc, out));
    doc.set("symmetry_check", run_symmetry_check(sc, out));
    if (!sc.report.ansatz.empty()) doc.set("symmetry_solve", run_symmetry_solve(sc, out));
    doc.set("flow_verify", run_flow_verify(sc, out));
    io::write_file(out / "report.json", doc.dump());
    return doc;
}

}  // namespace detail

/// Run one command against one scenario. Returns the documented exit code;
/// on failure prints a single-line JSON diagnostic to stderr.
inline int run_command(const std::string& command, const fs::path& scenario_path,
                       const fs::path& out_dir) {
    auto diag = [](const char* kind, const std::string& message, int code) {
        std::string line = "{\"error\": \"";
        line += kind;
        line += "\", \"message\": \"";
        for (char c : message) {
            if (c == '"' || c == '\\') line += '\\';
            if (c == '\n') { line += "\\n"; continue; }
            line += c;
        }
        line += "\"}";
        std::cerr << line << std::endl;
        return code;
    };
    try {
        scenario::Scenario sc = scenario::load(scenario_path);
        fs::create_directories(out_dir);
        if (command == "simulate") detail::run_simulate(sc, out_dir);
        else if (command == "reduce") detail::run_reduce(sc, out_dir);
        else if (command == "audit") detail::run_audit(sc, out_dir);
        else if (command == "symmetry-check") detail::run_symmetry_check(sc, out_dir);
        else if (command == "symmetry-solve") detail::run_symmetry_solve(sc, out_dir);
        else if (command == "flow-verify") detail::run_flow_verify(sc, out_dir);
        else if (command == "pullback") detail::run_pullback(sc, out_dir);
        else if (command == "report") detail::run_report(sc, out_dir);
        else throw ScenarioError("unknown command '" + command + "'");
        return 0;
    } catch (const ScenarioError& e) {
        return diag("config", e.what(), 1);
    } catch (const PreconditionError& e) {
        return diag("precondition", e.what(), 3);
    } catch (const NumericalError& e) {
        return diag("numerical", e.what(), 2);
    } catch (const std::invalid_argument& e) {
        return diag("config", e.what(), 1);
    } catch (const std::exception& e) {
        return diag("internal", e.what(), 1);
    }
}

/// CLI entry: ermakov <command> --scenario <file>... --out <dir> [--jobs N]
inline int main_cli(int argc, char** argv) {
    CLI::App app{"Ermakov system reduction and symmetry verification laboratory"};
    std::string command;
    std::vector<std::string> scenario_paths;
    std::string out_dir;
    int jobs = 1;
    app.add_option("command", command,
                   "simulate | reduce | audit | symmetry-check | symmetry-solve | "
                   "flow-verify | pullback | report")
        ->required();
    app.add_option("--scenario", scenario_paths, "scenario JSON file(s)")
        ->required()
        ->expected(-1);
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--jobs", jobs, "run scenarios concurrently")->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (scenario_paths.size() == 1)
        return run_command(command, scenario_paths[0], out_dir);

    // batch mode: one subdirectory per scenario, optional thread pool
    std::vector<int> codes(scenario_paths.size(), 0);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t k = next.fetch_add(1);
            if (k >= scenario_paths.size()) return;
            fs::path sub = fs::path(out_dir) /
                           sanitize(fs::path(scenario_paths[k]).stem().string());
            codes[k] = run_command(command, scenario_paths[k], sub);
        }
    };
    size_t nthreads = std::min<size_t>(static_cast<size_t>(std::max(jobs, 1)),
                                       scenario_paths.size());
    std::vector<std::thread> pool;
    for (size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    int rc = 0;
    for (int c : codes) rc = std::max(rc, c);
    return rc;
}

}  // namespace ermakov::cli
