// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include "opmeans/cli_app.hpp"

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "opmeans/json_io.hpp"
#include "opmeans/property_suite.hpp"
#include "opmeans/recipe.hpp"
#include "opmeans/stochastic_order.hpp"
#include "opmeans/transport.hpp"

namespace opmeans {
namespace {

void emit(const nlohmann::ordered_json& doc, const std::string& out) {
    if (out.empty()) {
        std::cout << doc.dump(2) << '\n';
    } else {
        save_json_file(out, doc);
    }
}

nlohmann::ordered_json trace_to_json(const ConvergenceTrace& trace) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const TraceStep& s : trace.steps) {
        rows.push_back({{"k", s.k}, {"step", s.step}, {"residual", s.residual}});
    }
    return rows;
}

int cmd_mean(const RunManifest& manifest) {
    const DiscreteMeasure mu = load_measure_file(manifest.inputs.at(0));
    const MeanRecipe recipe = parse_recipe(manifest.recipe);
    const SolveResult r = eval_recipe_traced(recipe, mu, manifest.solver);

    nlohmann::ordered_json doc;
    doc["manifest"] = manifest.to_json();
    doc["result"] = matrix_to_json(r.value);
    doc["iterations"] = r.trace.steps.size();
    doc["residual"] = r.trace.steps.empty() ? 0.0 : r.trace.steps.back().residual;
    doc["trace"] = trace_to_json(r.trace);
    emit(doc, manifest.out);
    return 0;
}

int cmd_distance(const RunManifest& manifest) {
    const DiscreteMeasure mu = load_measure_file(manifest.inputs.at(0));
    const DiscreteMeasure nu = load_measure_file(manifest.inputs.at(1));
    const std::string& metric = manifest.recipe;

    double value = 0.0;
    if (metric == "thompson-delta") {
        value = delta_T(mu, nu);
    } else if (metric == "winf") {
        value = wasserstein_inf(mu, nu);
    } else if (metric.rfind("wp:", 0) == 0) {
        double p = 0.0;
        try {
            std::size_t used = 0;
            p = std::stod(metric.substr(3), &used);
            if (used != metric.size() - 3) throw std::invalid_argument(metric);
        } catch (const std::exception&) {
            throw InputError("distance: cannot parse exponent in metric: " + metric);
        }
        value = wasserstein_p(mu, nu, p);
    } else {
        throw InputError("distance: unknown metric: " + metric +
                         " (expected thompson-delta, wp:<p> or winf)");
    }

    nlohmann::ordered_json doc;
    doc["manifest"] = manifest.to_json();
    doc["metric"] = metric;
    doc["distance"] = value;
    emit(doc, manifest.out);
    return 0;
}

nlohmann::ordered_json coupling_to_json(const Coupling& c) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : c.pi) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const Rational& q : row) r.push_back(q.str());
        rows.push_back(std::move(r));
    }
    return rows;
}

int cmd_order(const RunManifest& manifest) {
    const DiscreteMeasure mu = load_measure_file(manifest.inputs.at(0));
    const DiscreteMeasure nu = load_measure_file(manifest.inputs.at(1));
    const OrderVerdict fwd = stochastic_leq(mu, nu);
    const OrderVerdict bwd = stochastic_leq(nu, mu);

    nlohmann::ordered_json doc;
    doc["manifest"] = manifest.to_json();
    doc["leq"] = fwd.leq;
    doc["geq"] = bwd.leq;
    if (fwd.coupling) {
        doc["coupling"] = coupling_to_json(*fwd.coupling);
    } else if (fwd.certificate) {
        const CutCertificate& cert = *fwd.certificate;
        doc["certificate"] = {{"mu_side", cert.mu_side},
                              {"nu_reachable", cert.nu_reachable},
                              {"mu_mass", cert.mu_mass.str()},
                              {"nu_mass", cert.nu_mass.str()}};
    }
    emit(doc, manifest.out);
    return 0;
}

int cmd_verify(const RunManifest& manifest, bool seed_set, bool iter_tol_set,
               bool residual_tol_set, bool max_iter_set) {
    SuiteConfig config = suite_config_from_json(load_json_file(manifest.inputs.at(0)));
    if (seed_set) config.seed = manifest.seed;
    if (iter_tol_set) config.solver.iter_tol = manifest.solver.iter_tol;
    if (residual_tol_set) config.solver.residual_tol = manifest.solver.residual_tol;
    if (max_iter_set) config.solver.max_iter = manifest.solver.max_iter;

    const SuiteReport report = run_suite(config);
    for (const PropertyReport& p : report.properties) {
        std::cout << p.property << ": " << p.trials << " trials, " << p.failures
                  << " failures, worst margin " << format_double(p.worst_margin) << " ["
                  << p.reference << "]\n";
    }

    nlohmann::ordered_json doc;
    RunManifest echoed = manifest;
    echoed.seed = config.seed;
    echoed.solver = config.solver;
    doc["manifest"] = echoed.to_json();
    doc["total_failures"] = report.total_failures;
    doc["report"] = suite_report_to_json(report);
    emit(doc, manifest.out);
    return report.total_failures == 0 ? 0 : 1;
}

void emit_error(const std::string& type, const std::string& message, int exit_code) {
    nlohmann::ordered_json err;
    err["error"] = {{"type", type}, {"message", message}};
    err["exit"] = exit_code;
    std::cerr << err.dump() << '\n';
}

} // namespace

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["inputs"] = inputs;
    if (!recipe.empty()) j["recipe"] = recipe;
    j["solver"] = {{"iter_tol", solver.iter_tol},
                   {"residual_tol", solver.residual_tol},
                   {"max_iter", solver.max_iter}};
    j["seed"] = seed;
    j["out"] = out.empty() ? "-" : out;
    return j;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"operator means of probability measures on positive definite matrices"};
    app.require_subcommand(1);

    RunManifest manifest;
    std::string measure;
    std::string measure_b;
    std::string metric = "thompson-delta";
    std::string suite;

    CLI::Option* seed_opt = nullptr;
    CLI::Option* tol_iter_opt = nullptr;
    CLI::Option* tol_res_opt = nullptr;
    CLI::Option* max_iter_opt = nullptr;

    auto add_solver_flags = [&](CLI::App* cmd) {
        seed_opt = cmd->add_option("--seed", manifest.seed, "Random seed recorded in the output");
        tol_iter_opt =
            cmd->add_option("--tol-iter", manifest.solver.iter_tol, "Iteration step tolerance");
        tol_res_opt = cmd->add_option("--tol-res", manifest.solver.residual_tol,
                                      "Equation residual tolerance");
        max_iter_opt = cmd->add_option("--max-iter", manifest.solver.max_iter,
                                       "Iteration budget per solve");
        cmd->add_option("--out", manifest.out, "Output file (default: stdout)");
    };

    CLI::App* mean = app.add_subcommand("mean", "Evaluate a mean recipe on a measure");
    mean->add_option("--measure", measure, "Measure JSON file")->required();
    mean->add_option("--recipe", manifest.recipe, "Recipe spec, e.g. \"deform(G, geom(0.5))\"")
        ->required();
    add_solver_flags(mean);

    CLI::App* distance = app.add_subcommand("distance", "Distance between two measures");
    distance->add_option("--measure", measure, "First measure JSON file")->required();
    distance->add_option("--measure-b", measure_b, "Second measure JSON file")->required();
    distance->add_option("--metric", metric, "thompson-delta | wp:<p> | winf");
    add_solver_flags(distance);

    CLI::App* order = app.add_subcommand("order", "Decide the stochastic order between measures");
    order->add_option("--measure", measure, "First measure JSON file")->required();
    order->add_option("--measure-b", measure_b, "Second measure JSON file")->required();
    add_solver_flags(order);

    CLI::App* verify = app.add_subcommand("verify", "Run a property-verification suite");
    verify->add_option("--suite", suite, "Suite config JSON file")->required();
    add_solver_flags(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        emit_error("usage", e.what(), 3);
        return 3;
    }

    try {
        if (app.got_subcommand(mean)) {
            manifest.command = "mean";
            manifest.inputs = {measure};
            manifest.solver.validate();
            return cmd_mean(manifest);
        }
        if (app.got_subcommand(distance)) {
            manifest.command = "distance";
            manifest.inputs = {measure, measure_b};
            manifest.recipe = metric;
            manifest.solver.validate();
            return cmd_distance(manifest);
        }
        if (app.got_subcommand(order)) {
            manifest.command = "order";
            manifest.inputs = {measure, measure_b};
            return cmd_order(manifest);
        }
        manifest.command = "verify";
        manifest.inputs = {suite};
        return cmd_verify(manifest, seed_opt->count() > 0, tol_iter_opt->count() > 0,
                          tol_res_opt->count() > 0, max_iter_opt->count() > 0);
    } catch (const ConvergenceError& e) {
        emit_error("convergence", e.what(), 2);
        return 2;
    } catch (const InputError& e) {
        emit_error("input", e.what(), 3);
        return 3;
    } catch (const std::exception& e) {
        emit_error("internal", e.what(), 3);
        return 3;
    }
}

} // namespace opmeans
