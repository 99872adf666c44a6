#include "agentinterp/cli.hpp"

#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "agentinterp/errors.hpp"
#include "agentinterp/interpretation.hpp"
#include "agentinterp/io.hpp"
#include "agentinterp/solver.hpp"
#include "agentinterp/sondik.hpp"

namespace agentinterp::cli {

using nlohmann::json;

namespace {

struct Options {
    std::string command;
    std::string pomdp_path;
    std::string machine_path;
    std::string interp_path;
    std::optional<std::size_t> grid;
    std::optional<double> tol;
    double epsilon = 1e-7;
    std::optional<std::size_t> horizon;
    std::optional<double> gamma;
    std::uint64_t seed = 0;
    std::string report_path;
    std::size_t budget = SolveOptions{}.vector_budget;
    std::optional<std::size_t> witness;
    std::string state;
    std::string input;
    std::string inputs;
    std::size_t steps = 10;
    std::string belief;
    std::size_t depth = CanonicalOptions{}.depth;
    std::size_t cap = CanonicalOptions{}.cap;
};

json versions() {
    return {{"agentinterp", kVersion},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"cli11", CLI11_VERSION}};
}

json config_json(const Options& o) {
    json c{{"command", o.command}, {"epsilon", o.epsilon}, {"seed", o.seed}, {"budget", o.budget}};
    if (!o.pomdp_path.empty()) c["pomdp"] = o.pomdp_path;
    if (!o.machine_path.empty()) c["machine"] = o.machine_path;
    if (!o.interp_path.empty()) c["interp"] = o.interp_path;
    if (o.grid) c["grid"] = *o.grid;
    if (o.tol) c["tol"] = *o.tol;
    if (o.horizon) c["horizon"] = *o.horizon;
    if (o.gamma) c["gamma"] = *o.gamma;
    return c;
}

void write_report(const Options& o, json report) {
    if (o.report_path.empty()) {
        return;
    }
    if (!report.contains("violations")) report["violations"] = json::array();
    if (!report.contains("skipped")) report["skipped"] = json::array();
    if (!report.contains("max_residual")) report["max_residual"] = 0.0;
    report["config"] = config_json(o);
    report["versions"] = versions();
    std::ofstream f(o.report_path);
    if (!f) {
        throw SchemaError("cannot write report to '" + o.report_path + "'");
    }
    f << report.dump(2) << "\n";
}

std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(6) << x;
    return s.str();
}

std::string fmt_belief(std::span<const double> b) {
    std::string s = "(";
    for (std::size_t k = 0; k < b.size(); ++k) {
        s += (k ? ", " : "") + fmt(b[k]);
    }
    return s + ")";
}

std::string fmt_state(const MachineState& m) {
    if (const auto* p = std::get_if<Point>(&m); p != nullptr && p->size() > 1) {
        return fmt_belief(*p);
    }
    return to_string(m);
}

Pomdp load_pomdp(const Options& o) {
    auto p = io::load_pomdp(o.pomdp_path);
    return o.gamma ? p.with_discount(*o.gamma) : p;
}

SolveOptions solve_options(const Options& o) {
    SolveOptions s;
    s.horizon = o.horizon;
    s.epsilon = o.epsilon;
    s.vector_budget = o.budget;
    s.witness_resolution = o.witness;
    return s;
}

json filtering_json(const ConsistencyReport& r) {
    json violations = json::array(), skipped = json::array();
    for (const auto& v : r.violations) {
        violations.push_back({{"m", io::state_json(v.m)},
                              {"input", v.input},
                              {"next", io::state_json(v.next)},
                              {"residual", v.residual}});
    }
    for (const auto& s : r.skipped) {
        skipped.push_back({{"m", io::state_json(s.m)}, {"input", s.input}});
    }
    return {{"verdict", r.passed() ? "pass" : "fail"},
            {"max_residual", r.max_residual},
            {"checked", r.checked.size()},
            {"violations", std::move(violations)},
            {"skipped", std::move(skipped)}};
}

void print_filtering(std::ostream& out, const ConsistencyReport& r, std::size_t states) {
    out << "checked: " << r.checked.size() << " transitions from " << states << " states\n";
    out << "skipped (subjectively impossible): " << r.skipped.size() << "\n";
    out << "max residual: " << fmt(r.max_residual) << " (tol " << fmt(r.tolerance) << ")\n";
    out << "violations: " << r.violations.size() << "\n";
    const std::size_t shown = std::min<std::size_t>(r.violations.size(), 5);
    for (std::size_t k = 0; k < shown; ++k) {
        const auto& v = r.violations[k];
        out << "  m=" << fmt_state(v.m) << " i=" << v.input << " m'=" << fmt_state(v.next)
            << " residual " << fmt(v.residual) << "\n";
    }
    if (shown < r.violations.size()) {
        out << "  ... " << r.violations.size() - shown << " more\n";
    }
}

// Maximal runs of equal labels over sorted one-dimensional points.
std::string describe_regions(const std::vector<double>& xs, const std::vector<Label>& labels) {
    std::ostringstream s;
    std::size_t start = 0;
    for (std::size_t k = 1; k <= xs.size(); ++k) {
        if (k == xs.size() || labels[k] != labels[start]) {
            if (start > 0) s << ", ";
            s << "'" << labels[start] << "' on [" << fmt(xs[start]) << ", " << fmt(xs[k - 1]) << "]";
            start = k;
        }
    }
    return s.str();
}

int cmd_solve(const Options& o, std::ostream& out) {
    const auto p = load_pomdp(o);
    const auto pol = pomdp_value_iteration(p, solve_options(o));
    out << "pomdp: " << p.hidden().size() << " hidden, " << p.actions().size() << " actions, "
        << p.sensors().size() << " observations, discount " << fmt(p.discount()) << "\n";
    out << "backups: " << pol.backups;
    if (!o.horizon) {
        out << (pol.converged ? " (converged" : " (NOT converged") << ", last change " << fmt(pol.last_change) << ")";
    }
    out << "\nwitness grid denominator: " << pol.witness_resolution;
    out << "\nalpha vectors: " << pol.vectors().size() << "\n";
    json vectors = json::array();
    for (const auto& v : pol.vectors()) {
        out << "  [" << p.actions()[v.action] << "] " << fmt_belief(v.values) << "\n";
        vectors.push_back({{"action", p.actions()[v.action]}, {"values", v.values}});
    }
    const std::size_t points = o.grid.value_or(11);
    const auto sample = simplex_grid(p.hidden().size(), points < 2 ? 1 : points - 1);
    json values = json::array();
    double max_abs = 0.0;
    out << "belief -> value, action\n";
    for (const auto& b : sample) {
        const double v = pol.value(b);
        const auto d = optimal_policy_at(pol, FiniteDist(p.hidden(), b));
        max_abs = std::max(max_abs, std::abs(v));
        out << "  " << fmt_belief(b) << " -> " << fmt(v) << ", " << d.action << "\n";
        values.push_back({{"belief", b}, {"value", v}, {"action", d.action}});
    }
    out << "max |value| on sample: " << fmt(max_abs) << "\n";
    write_report(o, {{"verdict", "pass"},
                     {"max_residual", pol.last_change},
                     {"converged", pol.converged || o.horizon.has_value()},
                     {"backups", pol.backups},
                     {"witness_resolution", pol.witness_resolution},
                     {"vectors", std::move(vectors)},
                     {"values", std::move(values)}});
    return kExitPass;
}

int cmd_check_filtering(const Options& o, std::ostream& out) {
    const auto machine = io::load_machine(o.machine_path);
    const auto doc = io::load_interpretation(o.interp_path);
    const auto sample = machine.default_sample(o.grid.value_or(1001));
    const auto report = check_influenced_filtering(machine, doc.bind(machine), sample, o.tol.value_or(1e-7));
    print_filtering(out, report, sample.size());
    out << "consistency: " << (report.passed() ? "PASS" : "FAIL") << "\n";
    write_report(o, filtering_json(report));
    return report.passed() ? kExitPass : kExitViolations;
}

int cmd_check_solution(const Options& o, std::ostream& out) {
    const auto machine = io::load_machine(o.machine_path);
    const auto p = load_pomdp(o);
    const auto doc = io::load_interpretation(o.interp_path);
    const auto pol = pomdp_value_iteration(p, solve_options(o));
    const auto sample = machine.default_sample(o.grid.value_or(1001));
    const auto report = check_pomdp_solution(machine, p, doc.psi, pol, sample, o.tol.value_or(1e-7));
    out << "condition (i), filtering consistency\n";
    print_filtering(out, report.filtering, sample.size());
    out << "consistency: " << (report.filtering_passed() ? "PASS" : "FAIL") << "\n";
    out << "condition (ii), exposed action optimal\n";
    out << "checked: " << report.policy_checked << " states, mismatches: " << report.policy_mismatches.size()
        << ", max value gap " << fmt(report.max_policy_gap) << "\n";
    json mismatches = json::array();
    for (const auto& m : report.policy_mismatches) {
        mismatches.push_back({{"m", io::state_json(m.m)},
                              {"exposed", m.exposed},
                              {"optimal", m.optimal},
                              {"value_gap", m.value_gap}});
    }
    out << "policy: " << (report.policy_passed() ? "PASS" : "FAIL") << "\n";
    out << "verdict: " << (report.passed() ? "PASS" : "FAIL") << "\n";
    auto j = filtering_json(report.filtering);
    j["verdict"] = report.passed() ? "pass" : "fail";
    j["filtering_verdict"] = report.filtering_passed() ? "pass" : "fail";
    j["policy_verdict"] = report.policy_passed() ? "pass" : "fail";
    j["policy_mismatches"] = std::move(mismatches);
    write_report(o, std::move(j));
    return report.passed() ? kExitPass : kExitViolations;
}

int cmd_check_prop1(const Options& o, std::ostream& out) {
    const auto machine = io::load_machine(o.machine_path);
    const auto p = load_pomdp(o);
    const auto doc = io::load_interpretation(o.interp_path);
    const auto pol = pomdp_value_iteration(p, solve_options(o));
    const double tol = o.tol.value_or(1e-7);
    std::vector<MachineState> states;
    if (!o.state.empty()) {
        states.push_back(io::parse_state(machine, o.state));
    } else {
        states = machine.default_sample(o.grid.value_or(1001));
    }
    std::vector<Label> inputs = machine.inputs().labels();
    if (!o.input.empty()) {
        machine.inputs().index_of(o.input);
        inputs = {o.input};
    }
    std::size_t passed = 0, failed = 0, skipped = 0;
    double max_residual = 0.0;
    json violations = json::array(), skipped_json = json::array();
    for (const auto& m : states) {
        for (const auto& i : inputs) {
            const auto r = check_proposition1(machine, p, doc.psi, pol, m, i, tol);
            if (states.size() == 1) {
                out << "m=" << fmt_state(m) << " i=" << i << ": " << to_string(r.verdict) << ", residual "
                    << fmt(r.residual) << ", marginal " << fmt(r.marginal) << ", optimal action " << r.optimal_action
                    << "\n";
            }
            switch (r.verdict) {
                case Verdict::pass:
                    ++passed;
                    break;
                case Verdict::fail:
                    ++failed;
                    violations.push_back({{"m", io::state_json(m)},
                                          {"input", i},
                                          {"residual", r.residual},
                                          {"optimal_action", r.optimal_action}});
                    break;
                case Verdict::skipped:
                    ++skipped;
                    skipped_json.push_back({{"m", io::state_json(m)}, {"input", i}});
                    break;
            }
            max_residual = std::max(max_residual, r.residual);
        }
    }
    out << "pass: " << passed << ", fail: " << failed << ", skipped: " << skipped << "\n";
    out << "max residual: " << fmt(max_residual) << " (tol " << fmt(tol) << ")\n";
    out << "belief update: " << (failed == 0 ? "PASS" : "FAIL") << "\n";
    write_report(o, {{"verdict", failed == 0 ? "pass" : "fail"},
                     {"max_residual", max_residual},
                     {"violations", std::move(violations)},
                     {"skipped", std::move(skipped_json)}});
    return failed == 0 ? kExitPass : kExitViolations;
}

std::vector<Label> split_labels(const std::string& text) {
    std::vector<Label> out;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        out.push_back(part);
    }
    return out;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const auto machine = io::load_machine(o.machine_path);
    const auto m0 = io::parse_state(machine, o.state);
    std::vector<Label> inputs;
    if (!o.inputs.empty()) {
        inputs = split_labels(o.inputs);
    } else {
        // Inputs drawn uniformly from a stream separate from the transitions.
        Rng rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
        for (std::size_t k = 0; k < o.steps; ++k) {
            inputs.push_back(machine.inputs()[rng.below(machine.inputs().size())]);
        }
    }
    const auto t = run(machine, m0, inputs, o.seed);
    json steps = json::array();
    out << "seed " << t.seed << "\n";
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
        const auto& s = t.steps[k];
        out << k << "  m=" << fmt_state(s.state) << "  out=" << s.output;
        if (s.input) {
            out << "  in=" << *s.input;
        }
        out << "\n";
        json js{{"m", io::state_json(s.state)}, {"output", s.output}};
        if (s.input) js["input"] = *s.input;
        steps.push_back(std::move(js));
    }
    write_report(o, {{"verdict", "pass"}, {"seed", t.seed}, {"trajectory", std::move(steps)}});
    return kExitPass;
}

int cmd_canonical(const Options& o, std::ostream& out) {
    const auto p = load_pomdp(o);
    const auto pol = pomdp_value_iteration(p, solve_options(o));
    Belief seed = FiniteDist::uniform(p.hidden());
    if (!o.belief.empty()) {
        std::vector<double> w;
        for (const auto& part : split_labels(o.belief)) {
            try {
                w.push_back(std::stod(part));
            } catch (const std::exception&) {
                throw SchemaError("cannot read belief '" + o.belief + "'");
            }
        }
        seed = FiniteDist(p.hidden(), w);
    }
    const auto cm = canonical_machine(p, pol, {seed}, {o.depth, o.cap});
    out << "reachable beliefs (depth " << o.depth << "): " << cm.reachable.size() << "\n";
    json states = json::array();
    const std::size_t shown = std::min<std::size_t>(cm.reachable.size(), 20);
    for (std::size_t k = 0; k < cm.reachable.size(); ++k) {
        const auto& b = std::get<Point>(cm.reachable[k]);
        const auto a = cm.machine.expose(cm.reachable[k]);
        if (k < shown) {
            out << "  " << fmt_belief(b) << " -> " << a << "\n";
        }
        states.push_back({{"belief", b}, {"action", a}});
    }
    if (shown < cm.reachable.size()) {
        out << "  ... " << cm.reachable.size() - shown << " more\n";
    }
    const auto report = check_pomdp_solution(cm.machine, p, InterpretationMap::identity(p.hidden()), pol,
                                             cm.reachable, o.tol.value_or(1e-9));
    out << "self-check: filtering " << (report.filtering_passed() ? "PASS" : "FAIL") << ", policy "
        << (report.policy_passed() ? "PASS" : "FAIL") << ", max residual " << fmt(report.filtering.max_residual)
        << "\n";
    auto j = filtering_json(report.filtering);
    j["verdict"] = report.passed() ? "pass" : "fail";
    j["states"] = std::move(states);
    write_report(o, std::move(j));
    return report.passed() ? kExitPass : kExitViolations;
}

int cmd_demo_sondik(const Options& o, std::ostream& out) {
    const double tol = o.tol.value_or(1e-9);
    const std::size_t grid = o.grid.value_or(1001);
    const auto machine = sondik::machine();
    const auto itp = sondik::interpretation(machine);
    const auto sample = machine.default_sample(grid);

    // Filtering consistency of the machine under psi(m) = (m, 1 - m).
    const auto filtering = check_influenced_filtering(machine, itp, sample, tol);
    out << "sondik machine, " << sample.size() << " states (grid " << grid << " plus m = " << sondik::kThreshold
        << ")\n";
    print_filtering(out, filtering, sample.size());
    out << "consistency: " << (filtering.passed() ? "PASS" : "FAIL") << "\n";

    // g agrees with the Bayes posterior under the exposed action.
    const auto p = sondik::pomdp(o.gamma.value_or(0.95));
    double update_gap = 0.0;
    for (const auto& m : sample) {
        const double x = std::get<Point>(m)[0];
        for (std::size_t s = 0; s < 2; ++s) {
            const auto post = belief_update(p.model(), sondik::belief_of(x),
                                            p.actions().index_of(machine.expose(m)), s);
            const double g = std::get<Point>(machine.successors(m, p.sensors()[s])[0].state)[0];
            update_gap = std::max(update_gap, std::abs(g - std::get<FiniteDist>(post)[0]));
        }
    }
    const bool update_ok = update_gap <= tol;
    out << "max |g(s, m) - f(psi(m), omega(m), s)(1)|: " << fmt(update_gap) << "\n";
    out << "belief update: " << (update_ok ? "PASS" : "FAIL") << "\n";

    // Negative control.
    const auto bad = builtin_machine("sondik", {{"g_offset", 0.05}});
    const auto control = check_influenced_filtering(bad, sondik::interpretation(bad), bad.default_sample(grid), tol);
    const bool control_ok = !control.passed() && control.max_residual > 1e-3;
    out << "negative control (g + 0.05): max residual " << fmt(control.max_residual) << ", "
        << (control_ok ? "rejected as expected" : "NOT rejected") << "\n";

    // Solved policy for the bundled model, reported next to the machine's expose function.
    auto solve = solve_options(o);
    const auto pol = pomdp_value_iteration(p, solve);
    const auto solution = check_pomdp_solution(machine, p, sondik::psi(), pol, sample, tol);
    std::vector<double> xs;
    std::vector<Label> optimal, exposed;
    for (const auto& m : sample) {
        xs.push_back(std::get<Point>(m)[0]);
        optimal.push_back(optimal_policy_at(pol, sondik::psi()(m)).action);
        exposed.push_back(machine.expose(m));
    }
    out << "solved policy (discount " << fmt(p.discount()) << "): " << describe_regions(xs, optimal) << "\n";
    out << "machine expose:                " << describe_regions(xs, exposed) << "\n";
    out << "policy agreement: " << (solution.policy_passed() ? "PASS" : "MISMATCH") << " ("
        << solution.policy_mismatches.size() << " of " << solution.policy_checked << " states differ)\n";

    const bool ok = filtering.passed() && update_ok && control_ok;
    auto j = filtering_json(filtering);
    j["verdict"] = ok ? "pass" : "fail";
    j["belief_update_max_gap"] = update_gap;
    j["negative_control_max_residual"] = control.max_residual;
    j["policy_mismatches"] = solution.policy_mismatches.size();
    j["policy_checked"] = solution.policy_checked;
    write_report(o, std::move(j));
    return ok ? kExitPass : kExitViolations;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Solve finite POMDPs and check interpretations of stochastic Moore machines", "agentinterp"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    auto add_solver_flags = [&o](CLI::App* c) {
        c->add_option("--epsilon", o.epsilon, "Value iteration accuracy")->check(CLI::PositiveNumber);
        c->add_option("--horizon", o.horizon, "Finite number of backups instead of convergence");
        c->add_option("--gamma", o.gamma, "Override the discount factor")->check(CLI::Range(0.0, 1.0));
        c->add_option("--budget", o.budget, "Maximum alpha vectors per backup");
        c->add_option("--witness", o.witness, "Witness grid denominator used for pruning (default: sized to the model)");
    };
    auto add_report = [&o](CLI::App* c) { c->add_option("--report", o.report_path, "Write a JSON report"); };

    auto* solve = app.add_subcommand("solve", "Solve a POMDP by value iteration");
    solve->add_option("--pomdp", o.pomdp_path, "POMDP document")->required();
    solve->add_option("--grid", o.grid, "Points per simplex edge in the printed value table");
    add_solver_flags(solve);
    add_report(solve);

    auto* filtering = app.add_subcommand("check-filtering", "Check filtering consistency of a machine");
    filtering->add_option("--machine", o.machine_path, "Machine document")->required();
    filtering->add_option("--interp", o.interp_path, "Interpretation document")->required();
    filtering->add_option("--grid", o.grid, "Grid points for continuous state spaces (default 1001)");
    filtering->add_option("--tol", o.tol, "Residual tolerance (default 1e-7)");
    add_report(filtering);

    auto* solution = app.add_subcommand("check-solution", "Check a machine as a solution of a POMDP");
    solution->add_option("--machine", o.machine_path, "Machine document")->required();
    solution->add_option("--pomdp", o.pomdp_path, "POMDP document")->required();
    solution->add_option("--interp", o.interp_path, "Interpretation document supplying psi")->required();
    solution->add_option("--grid", o.grid, "Grid points for continuous state spaces (default 1001)");
    solution->add_option("--tol", o.tol, "Tolerance (default 1e-7)");
    add_solver_flags(solution);
    add_report(solution);

    auto* prop1 = app.add_subcommand("check-prop1", "Check the belief-update property");
    prop1->add_option("--machine", o.machine_path, "Machine document")->required();
    prop1->add_option("--pomdp", o.pomdp_path, "POMDP document")->required();
    prop1->add_option("--interp", o.interp_path, "Interpretation document supplying psi")->required();
    prop1->add_option("--state", o.state, "Single machine state (default: the whole sample)");
    prop1->add_option("--input", o.input, "Single input (default: all)");
    prop1->add_option("--grid", o.grid, "Grid points for continuous state spaces (default 1001)");
    prop1->add_option("--tol", o.tol, "Total variation tolerance (default 1e-7)");
    add_solver_flags(prop1);
    add_report(prop1);

    auto* simulate = app.add_subcommand("simulate", "Run a machine on an input sequence");
    simulate->add_option("--machine", o.machine_path, "Machine document")->required();
    simulate->add_option("--initial", o.state, "Initial state")->required();
    auto* inputs_opt = simulate->add_option("--inputs", o.inputs, "Comma-separated inputs");
    simulate->add_option("--steps", o.steps, "Number of random inputs when --inputs is absent")
        ->excludes(inputs_opt);
    simulate->add_option("--seed", o.seed, "Random seed");
    add_report(simulate);

    auto* canonical = app.add_subcommand("canonical", "Build the belief machine of a solved POMDP");
    canonical->add_option("--pomdp", o.pomdp_path, "POMDP document")->required();
    canonical->add_option("--belief", o.belief, "Comma-separated initial belief (default uniform)");
    canonical->add_option("--depth", o.depth, "Reachability depth");
    canonical->add_option("--cap", o.cap, "Maximum number of reachable beliefs");
    canonical->add_option("--tol", o.tol, "Self-check tolerance (default 1e-9)");
    add_solver_flags(canonical);
    add_report(canonical);

    auto* demo = app.add_subcommand("demo-sondik", "Check the Sondik machine end to end");
    demo->add_option("--grid", o.grid, "Grid points on [0, 1] (default 1001)");
    demo->add_option("--tol", o.tol, "Residual tolerance (default 1e-9)");
    add_solver_flags(demo);
    add_report(demo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (solve->parsed()) {
            o.command = "solve";
            return cmd_solve(o, out);
        }
        if (filtering->parsed()) {
            o.command = "check-filtering";
            return cmd_check_filtering(o, out);
        }
        if (solution->parsed()) {
            o.command = "check-solution";
            return cmd_check_solution(o, out);
        }
        if (prop1->parsed()) {
            o.command = "check-prop1";
            return cmd_check_prop1(o, out);
        }
        if (simulate->parsed()) {
            o.command = "simulate";
            return cmd_simulate(o, out);
        }
        if (canonical->parsed()) {
            o.command = "canonical";
            return cmd_canonical(o, out);
        }
        o.command = "demo-sondik";
        return cmd_demo_sondik(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace agentinterp::cli
