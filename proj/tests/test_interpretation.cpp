#include "doctest.h"

#include <cmath>

#include "agentinterp/errors.hpp"
#include "agentinterp/interpretation.hpp"
#include "agentinterp/sondik.hpp"
#include "support/random_models.hpp"

using namespace agentinterp;
using namespace agentinterp::testing;

namespace {

bool on_simplex(const Point& b) {
    double total = 0.0;
    for (double x : b) {
        if (!(x >= 0.0)) return false;
        total += x;
    }
    return std::abs(total - 1.0) <= 1e-9;
}

// Exact Bayes filter for a single-action model; `blend` mixes each posterior
// with the uniform distribution to make a wrong filter.
StochasticMooreMachine filter_machine(const Pomdp& p, double blend = 0.0) {
    ParametricDynamics dyn;
    dyn.dimension = p.hidden().size();
    dyn.update = [p, blend](std::size_t s, const Point& b) {
        const auto post = belief_update(p.model(), FiniteDist(p.hidden(), b), 0, s);
        const auto* f = std::get_if<FiniteDist>(&post);
        if (f == nullptr) {
            return b;
        }
        Point out(f->weights().begin(), f->weights().end());
        for (auto& x : out) {
            x = (1.0 - blend) * x + blend / static_cast<double>(out.size());
        }
        return out;
    };
    dyn.expose = [](const Point&) { return std::size_t{0}; };
    dyn.contains = on_simplex;
    return StochasticMooreMachine::parametric(p.sensors(), p.actions(), std::move(dyn));
}

// Plain filtering check without any action factor: the model is read as a
// hidden Markov model nu(h' | h), phi(i | h').
bool plain_filter_accepts(const StochasticMooreMachine& machine, const Pomdp& hmm, const std::vector<MachineState>& sample,
                          double tol) {
    const std::size_t nh = hmm.hidden().size();
    const auto& nu = *hmm.model().nu();
    const auto& phi = *hmm.model().phi();
    for (const auto& m : sample) {
        const auto& b = std::get<Point>(m);
        for (std::size_t i = 0; i < hmm.sensors().size(); ++i) {
            std::vector<double> joint(nh, 0.0);
            double marginal = 0.0;
            for (std::size_t h2 = 0; h2 < nh; ++h2) {
                const std::size_t phi_idx[] = {h2, 0};
                for (std::size_t h = 0; h < nh; ++h) {
                    const std::size_t nu_idx[] = {h, 0};
                    joint[h2] += nu.row(nu_idx)[h2] * phi.row(phi_idx)[i] * b[h];
                }
                marginal += joint[h2];
            }
            if (marginal == 0.0) {
                continue;
            }
            for (const auto& next : machine.successors(m, hmm.sensors()[i])) {
                const auto& b2 = std::get<Point>(next.state);
                for (std::size_t h2 = 0; h2 < nh; ++h2) {
                    if (std::abs(joint[h2] - b2[h2] * marginal) > tol) {
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

std::vector<MachineState> as_states(const std::vector<std::vector<double>>& points) {
    return {points.begin(), points.end()};
}

// Same dynamics as `machine`, but every output is replaced by the other one
// of a two-element output set.
StochasticMooreMachine flip_outputs(const StochasticMooreMachine& machine) {
    auto dyn = machine.dynamics();
    dyn.expose = [inner = dyn.expose](const Point& m) { return 1 - inner(m); };
    return StochasticMooreMachine::parametric(machine.inputs(), machine.outputs(), std::move(dyn));
}

}  // namespace

TEST_CASE("predictive joint") {
    const auto mach = sondik::machine();
    const auto itp = sondik::interpretation(mach);
    const auto j = predictive_joint(itp, scalar_state(0.0));
    CHECK(std::abs(j.at("1", "1") - 0.1) <= 1e-15);
    CHECK(std::abs(j.column_mass(0) - 0.4) <= 1e-15);

    // kappa independent of (h, a): the predictive joint is that row for every m.
    const LabelSet h{"1", "2"}, a{"1", "2"}, s{"1", "2"};
    const JointDist u(h, s, {0.1, 0.2, 0.3, 0.4});
    const Interpretation flat{sondik::psi(), ActionFunction::from_expose(mach),
                              WorldModel::joint(h, a, s, std::vector<JointDist>(4, u))};
    for (double m : {0.0, 0.05, 0.3, 1.0}) {
        const auto got = predictive_joint(flat, scalar_state(m));
        for (std::size_t k = 0; k < 2; ++k) {
            for (std::size_t l = 0; l < 2; ++l) {
                CHECK(std::abs(got.at(k, l) - u.at(k, l)) <= 1e-15);
            }
        }
    }
    CHECK_THROWS_AS(predictive_joint(itp, scalar_state(2.0)), LabelError);
}

TEST_CASE("sondik machine is a consistent filtering interpretation") {
    const auto mach = sondik::machine();
    const auto report = check_influenced_filtering(mach, sondik::interpretation(mach), mach.default_sample(1001), 1e-9);
    CHECK(report.passed());
    CHECK(report.max_residual <= 1e-9);
    CHECK(report.checked.size() == 2 * 1002);
    CHECK(report.skipped.empty());
}

TEST_CASE("perturbed sondik machine fails") {
    const auto mach = builtin_machine("sondik", {{"g_offset", 0.05}});
    const auto report = check_influenced_filtering(mach, sondik::interpretation(mach), mach.default_sample(1001), 1e-9);
    CHECK_FALSE(report.passed());
    CHECK(report.max_residual > 1e-3);
    for (const auto& v : report.violations) {
        CHECK(v.residual > 1e-9);
    }
}

TEST_CASE("single-action filters agree with a plain filtering check") {
    Rng rng(55);
    const auto sample = as_states(simplex_grid(3, 12));
    for (int trial = 0; trial < 10; ++trial) {
        const auto hmm = random_pomdp(rng, {3, 1, 3, 0.9, 0.3});
        for (double blend : {0.0, 1e-3}) {
            const auto mach = filter_machine(hmm, blend);
            const Interpretation itp{InterpretationMap::identity(hmm.hidden()), ActionFunction::constant("1"),
                                     hmm.model()};
            const auto report = check_influenced_filtering(mach, itp, sample, 1e-9);
            CHECK(report.passed() == plain_filter_accepts(mach, hmm, sample, 1e-9));
            if (blend == 0.0) {
                CHECK(report.passed());
            }
        }
    }
}

TEST_CASE("skipped pairs are never violations") {
    // The sensor reveals h' and the hidden state never moves, so from a point
    // mass only one sensor value is possible.
    const LabelSet h{"x", "y"}, a{"a"}, s{"sx", "sy"};
    TabularKernel nu({h, a}, h, {dirac("x", h), dirac("y", h)});
    TabularKernel phi({h, a}, s, {dirac("sx", s), dirac("sy", s)});
    const Pomdp p(WorldModel::factored(h, a, s, nu, phi), {0.0, 0.0}, 0.5);
    // A machine that jumps somewhere arbitrary on the impossible input.
    ParametricDynamics dyn;
    dyn.dimension = 2;
    dyn.update = [](std::size_t i, const Point& b) { return i == 0 ? Point{1.0, 0.0} : Point{0.0, 1.0}; };
    dyn.expose = [](const Point&) { return std::size_t{0}; };
    dyn.contains = on_simplex;
    const auto mach = StochasticMooreMachine::parametric(s, a, std::move(dyn));
    const Interpretation itp{InterpretationMap::identity(h), ActionFunction::constant("a"), p.model()};
    const auto report = check_influenced_filtering(mach, itp, {Point{1.0, 0.0}, Point{0.0, 1.0}}, 1e-12);
    CHECK(report.passed());
    REQUIRE(report.skipped.size() == 2);
    for (const auto& sk : report.skipped) {
        for (const auto& v : report.violations) {
            CHECK_FALSE((v.m == sk.m && v.input == sk.input));
        }
    }
}

TEST_CASE("domain mismatches are rejected") {
    const auto mach = sondik::machine();
    Rng rng(1);
    const auto other = random_pomdp(rng, {2, 2, 3, 0.9, 0.0});
    const Interpretation itp{sondik::psi(), ActionFunction::from_expose(mach), other.model()};
    CHECK_THROWS_AS(check_influenced_filtering(mach, itp, {scalar_state(0.0)}, 1e-9), DomainError);
    const auto pol = pomdp_value_iteration(sondik::pomdp(0.9));
    CHECK_THROWS_AS(check_pomdp_solution(mach, sondik::pomdp(0.95), sondik::psi(), pol, {scalar_state(0.0)}, 1e-9),
                    DomainError);
}

TEST_CASE("canonical machines are POMDP-solution interpretations") {
    Rng rng(2718);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_pomdp(rng, {2, 2, 2, 0.9, 0.0});
        SolveOptions opts;
        opts.witness_resolution = 100;
        const auto pol = pomdp_value_iteration(p, opts);
        const auto cm = canonical_machine(p, pol, {FiniteDist::uniform(p.hidden())}, {4, 1000});
        const auto report =
            check_pomdp_solution(cm.machine, p, InterpretationMap::identity(p.hidden()), pol, cm.reachable, 1e-9);
        CHECK(report.filtering_passed());
        CHECK(report.policy_passed());
        CHECK(report.filtering.max_residual <= 1e-9);
        CHECK(report.policy_checked == cm.reachable.size());
    }
}

TEST_CASE("flipping the outputs of a canonical machine breaks condition (ii)") {
    Rng rng(99);
    const auto p = random_pomdp(rng, {2, 2, 2, 0.9, 0.0});
    const auto pol = pomdp_value_iteration(p);
    const auto cm = canonical_machine(p, pol, {FiniteDist::uniform(p.hidden())}, {4, 1000});
    const auto flipped = flip_outputs(cm.machine);
    const auto psi = InterpretationMap::identity(p.hidden());
    const auto report = check_pomdp_solution(flipped, p, psi, pol, cm.reachable, 1e-9);
    std::size_t strict = 0;
    for (const auto& m : cm.reachable) {
        const auto d = optimal_policy_at(pol, psi(m));
        if (std::abs(d.q_values[0] - d.q_values[1]) > 1e-9) {
            ++strict;
        }
    }
    CHECK(strict > 0);
    CHECK(report.policy_mismatches.size() == strict);
    CHECK_FALSE(report.passed());
}

TEST_CASE("sondik machine against the solved policy") {
    const auto mach = sondik::machine();
    const auto p = sondik::pomdp(0.95);
    const auto pol = pomdp_value_iteration(p);
    const auto report = check_pomdp_solution(mach, p, sondik::psi(), pol, mach.default_sample(201), 1e-9);
    CHECK(report.filtering_passed());
    CHECK(report.policy_checked == 202);
}

TEST_CASE("belief-update property") {
    const auto mach = sondik::machine();
    const auto m0 = scalar_state(0.0);

    SUBCASE("sondik, m = 0, i = 1, with action 1 optimal at m = 0") {
        // Same kernel as the sondik model; rewards that make action "1" optimal everywhere.
        const auto table = sondik::pomdp(0.95);
        const Pomdp p(table.model(), {1.0, 0.0, 1.0, 0.0}, 0.95);
        const auto pol = pomdp_value_iteration(p);
        const auto r = check_proposition1(mach, p, sondik::psi(), pol, m0, "1", 1e-12);
        CHECK(r.optimal_action == "1");
        CHECK(r.verdict == Verdict::pass);
        CHECK(r.residual <= 1e-15);
        CHECK(std::abs(r.marginal - 0.4) <= 1e-15);
    }
    SUBCASE("sondik, original rewards: residual measures the action disagreement") {
        const auto p = sondik::pomdp(0.95);
        const auto pol = pomdp_value_iteration(p);
        const auto r = check_proposition1(mach, p, sondik::psi(), pol, m0, "1", 1e-9);
        const auto f = std::get<FiniteDist>(belief_update(p, sondik::belief_of(0.0), r.optimal_action, "1"));
        CHECK(std::abs(r.residual - total_variation(sondik::belief_of(0.25), f)) <= 1e-15);
        CHECK((r.verdict == Verdict::pass) == (r.optimal_action == mach.expose(m0)));
    }
    SUBCASE("subjectively impossible input is skipped") {
        const LabelSet h{"x", "y"}, a{"a"}, s{"sx", "sy"};
        TabularKernel nu({h, a}, h, {dirac("x", h), dirac("y", h)});
        TabularKernel phi({h, a}, s, {dirac("sx", s), dirac("sy", s)});
        const Pomdp p(WorldModel::factored(h, a, s, nu, phi), {1.0, 0.0}, 0.5);
        const auto pol = pomdp_value_iteration(p);
        const auto cm = canonical_machine(p, pol, {dirac("x", h)});
        const auto r = check_proposition1(cm.machine, p, InterpretationMap::identity(h), pol, Point{1.0, 0.0}, "sy",
                                          1e-9);
        CHECK(r.verdict == Verdict::skipped);
        CHECK(r.marginal == 0.0);
    }
    SUBCASE("canonical machines have residual zero") {
        Rng rng(7);
        for (int trial = 0; trial < 5; ++trial) {
            const auto p = random_pomdp(rng, {3, 2, 2, 0.9, 0.2});
            SolveOptions opts;
            opts.witness_resolution = 30;
            const auto pol = pomdp_value_iteration(p, opts);
            const auto cm = canonical_machine(p, pol, {FiniteDist::uniform(p.hidden())}, {3, 1000});
            const auto psi = InterpretationMap::identity(p.hidden());
            for (const auto& m : cm.reachable) {
                for (const auto& s : p.sensors()) {
                    const auto r = check_proposition1(cm.machine, p, psi, pol, m, s, 0.0);
                    CHECK(r.verdict != Verdict::fail);
                    CHECK(r.residual == 0.0);
                }
            }
        }
    }
}

TEST_CASE("filtering residual bounds the belief-update residual") {
    // Canonical machines with their posteriors nudged toward uniform: the
    // filtering check passes at t = its own max residual, and the belief
    // update check then passes at 2 t / (smallest positive input marginal).
    Rng rng(31337);
    for (int trial = 0; trial < 8; ++trial) {
        const auto p = random_pomdp(rng, {2 + rng.below(2), 2, 2, 0.9, 0.0});
        SolveOptions opts;
        opts.witness_resolution = 30;
        const auto pol = pomdp_value_iteration(p, opts);
        const auto cm = canonical_machine(p, pol, {FiniteDist::uniform(p.hidden())}, {3, 1000});
        auto dyn = cm.machine.dynamics();
        dyn.update = [inner = dyn.update](std::size_t s, const Point& b) {
            auto out = inner(s, b);
            for (auto& x : out) {
                x = 0.999 * x + 0.001 / static_cast<double>(out.size());
            }
            return out;
        };
        const auto nudged = StochasticMooreMachine::parametric(cm.machine.inputs(), cm.machine.outputs(), dyn);
        const auto psi = InterpretationMap::identity(p.hidden());
        const Interpretation itp{psi, ActionFunction::from_expose(nudged), p.model()};
        const auto filtering = check_influenced_filtering(nudged, itp, cm.reachable, 1.0);
        const double t = filtering.max_residual;
        CHECK(t > 0.0);
        double min_marginal = 1.0;
        for (const auto& c : filtering.checked) {
            const auto joint = predictive_joint(itp, c.m);
            min_marginal = std::min(min_marginal, joint.column_mass(p.sensors().index_of(c.input)));
        }
        for (const auto& c : filtering.checked) {
            const auto r = check_proposition1(nudged, p, psi, pol, c.m, c.input, 2.0 * t / min_marginal);
            CHECK(r.verdict == Verdict::pass);
        }
    }
}
