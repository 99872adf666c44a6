#include "doctest.h"

#include <cmath>
#include <limits>

#include "agentinterp/errors.hpp"
#include "agentinterp/solver.hpp"
#include "agentinterp/sondik.hpp"
#include "support/random_models.hpp"

using namespace agentinterp;
using namespace agentinterp::testing;

namespace {

const LabelSet kTwo{"1", "2"};

Mdp single_state_mdp(double r, double gamma) {
    const LabelSet x{"x"}, a{"a"};
    return Mdp(x, a, TabularKernel({x, a}, x, {dirac("x", x)}), {r}, gamma);
}

Pomdp zero_reward(const Pomdp& p) {
    return Pomdp(p.model(), std::vector<double>(p.rewards().size(), 0.0), p.discount());
}

Pomdp constant_reward(const Pomdp& p, double c) {
    return Pomdp(p.model(), std::vector<double>(p.rewards().size(), c), p.discount());
}

// Policy trees, enumerated literally: an action and one subtree per sensor value.
struct Tree {
    std::size_t action;
    std::vector<Tree> children;
};

std::vector<Tree> all_trees(const Pomdp& p, std::size_t depth) {
    std::vector<Tree> out;
    const std::size_t na = p.actions().size(), ns = p.sensors().size();
    if (depth == 1) {
        for (std::size_t a = 0; a < na; ++a) {
            out.push_back({a, {}});
        }
        return out;
    }
    const auto sub = all_trees(p, depth - 1);
    std::vector<std::size_t> pick(ns, 0);
    for (std::size_t a = 0; a < na; ++a) {
        std::fill(pick.begin(), pick.end(), 0);
        for (;;) {
            Tree t{a, {}};
            for (std::size_t s = 0; s < ns; ++s) {
                t.children.push_back(sub[pick[s]]);
            }
            out.push_back(std::move(t));
            std::size_t pos = ns;
            while (pos > 0 && ++pick[pos - 1] == sub.size()) {
                pick[pos - 1] = 0;
                --pos;
            }
            if (pos == 0) {
                break;
            }
        }
    }
    return out;
}

// Expected discounted reward of a fixed tree, propagating unnormalized mass
// over hidden states.
double tree_value(const Pomdp& p, const Tree& t, const std::vector<double>& mass) {
    const std::size_t nh = p.hidden().size();
    double total = 0.0;
    for (std::size_t h = 0; h < nh; ++h) {
        total += mass[h] * p.reward(h, t.action);
    }
    for (std::size_t s = 0; s < t.children.size(); ++s) {
        std::vector<double> next(nh, 0.0);
        for (std::size_t h = 0; h < nh; ++h) {
            for (std::size_t h2 = 0; h2 < nh; ++h2) {
                next[h2] += p.model().kappa(h, t.action, h2, s) * mass[h];
            }
        }
        total += p.discount() * tree_value(p, t.children[s], next);
    }
    return total;
}

double best_tree_value(const Pomdp& p, const Belief& b, std::size_t depth) {
    const std::vector<double> mass(b.weights().begin(), b.weights().end());
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& t : all_trees(p, depth)) {
        best = std::max(best, tree_value(p, t, mass));
    }
    return best;
}

}  // namespace

TEST_CASE("mdp value iteration: closed-form cases") {
    const double eps = 1e-7;
    SUBCASE("geometric series") {
        const auto sol = mdp_value_iteration(single_state_mdp(1.0, 0.5), eps);
        CHECK(std::abs(sol.values[0] - 2.0) <= eps);
    }
    SUBCASE("zero reward") {
        for (double gamma : {0.1, 0.5, 0.99}) {
            const auto sol = mdp_value_iteration(single_state_mdp(0.0, gamma), eps);
            CHECK(sol.values[0] == 0.0);
        }
    }
    SUBCASE("two self-looping states") {
        const LabelSet x{"a", "b"}, act{"stay"};
        const Mdp m(x, act, TabularKernel({x, act}, x, {dirac("a", x), dirac("b", x)}), {1.0, 0.0}, 0.9);
        const auto sol = mdp_value_iteration(m, eps);
        CHECK(std::abs(sol.values[0] - 10.0) <= eps);
        CHECK(std::abs(sol.values[1] - 0.0) <= eps);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(single_state_mdp(INFINITY, 0.5), ModelError);
        CHECK_THROWS_AS(single_state_mdp(1.0, 1.0), ModelError);
        CHECK_THROWS_AS(mdp_value_iteration(single_state_mdp(1.0, 0.5), 0.0), DomainError);
    }
}

TEST_CASE("mdp value iteration: residual bound and greedy tie-breaking") {
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = random_pomdp(rng, {4, 3, 1, 0.5 + 0.45 * rng.uniform(), 0.3});
        const auto m = underlying_mdp(p);
        const double eps = 1e-6;
        const auto sol = mdp_value_iteration(m, eps);
        CHECK(sol.bellman_residual <= eps);
        CHECK(bellman_residual(m, sol.values) <= eps);
        for (std::size_t x = 0; x < 4; ++x) {
            const std::size_t chosen = m.actions().index_of(sol.policy[x]);
            for (std::size_t a = 0; a < chosen; ++a) {
                CHECK(m.q_value(x, a, sol.values) < m.q_value(x, chosen, sol.values));
            }
            for (std::size_t a = chosen + 1; a < 3; ++a) {
                CHECK(m.q_value(x, a, sol.values) <= m.q_value(x, chosen, sol.values));
            }
        }
    }
    // All actions tie: the first one wins.
    const LabelSet x{"x"}, a{"l", "r"};
    const Mdp tie(x, a, TabularKernel({x, a}, x, {dirac("x", x), dirac("x", x)}), {1.0, 1.0}, 0.5);
    CHECK(mdp_value_iteration(tie).policy[0] == "l");
}

TEST_CASE("fully observed POMDPs reduce to their MDP") {
    Rng rng(8);
    const double eps = 1e-7;
    for (int trial = 0; trial < 5; ++trial) {
        const auto p = fully_observed_pomdp(rng, 3, 2, 0.9);
        const auto mdp = mdp_value_iteration(underlying_mdp(p), eps);
        SolveOptions opts;
        opts.epsilon = eps;
        opts.witness_resolution = 20;
        const auto pol = pomdp_value_iteration(p, opts);
        CHECK(pol.converged);
        for (std::size_t h = 0; h < 3; ++h) {
            CHECK(std::abs(pol.value(dirac(p.hidden()[h], p.hidden())) - mdp.values[h]) <= 2 * eps);
        }
    }
}

TEST_CASE("zero rewards give a single zero vector") {
    Rng rng(1);
    const auto p = zero_reward(random_pomdp(rng, {3, 2, 2, 0.9, 0.0}));
    SolveOptions opts;
    opts.witness_resolution = 10;
    const auto pol = pomdp_value_iteration(p, opts);
    REQUIRE(pol.vectors().size() == 1);
    CHECK(pol.vectors()[0].values == std::vector<double>(3, 0.0));
    const auto decision = optimal_policy_at(pol, random_dist(rng, p.hidden()));
    CHECK(decision.value == 0.0);
    CHECK(decision.action == "1");
}

TEST_CASE("default witness grid shrinks with the number of hidden states") {
    CHECK(default_witness_resolution(1) == 200);
    CHECK(default_witness_resolution(2) == 200);
    CHECK(default_witness_resolution(3) == 26);
    CHECK(default_witness_resolution(4) == 11);
    Rng rng(3);
    const auto pol = pomdp_value_iteration(random_pomdp(rng, {3, 2, 2, 0.9, 0.0}));
    CHECK(pol.witness_resolution == 26);
}

TEST_CASE("a grid backup stuck in a cycle stops without claiming convergence") {
    // On this model the resolution-40 grid iteration ends up repeating four
    // vector sets whose change stays near 3e-5.
    Rng rng(20260101);
    std::optional<Pomdp> p;
    for (int trial = 0; trial < 2; ++trial) {
        p = random_pomdp(rng, {2 + rng.below(2), 2 + rng.below(2), 2 + rng.below(2), 0.9, 0.15});
    }
    SolveOptions opts;
    opts.witness_resolution = 40;
    const auto pol = pomdp_value_iteration(*p, opts);
    CHECK_FALSE(pol.converged);
    CHECK(pol.backups < 500);
    CHECK(pol.last_change > opts.epsilon * 0.1 / 0.9);

    opts.stall_window = 0;
    opts.max_iterations = 300;
    CHECK(pomdp_value_iteration(*p, opts).backups == 300);
}

TEST_CASE("single-action POMDP always plays its action") {
    Rng rng(3);
    const auto p = random_pomdp(rng, {2, 1, 2, 0.8, 0.0});
    const auto pol = pomdp_value_iteration(p);
    for (int k = 0; k < 20; ++k) {
        CHECK(optimal_policy_at(pol, random_dist(rng, p.hidden())).action == "1");
    }
}

TEST_CASE("brute force: closed-form cases") {
    Rng rng(12);
    const auto p = random_pomdp(rng, {3, 2, 2, 0.8, 0.1});
    const auto b = random_dist(rng, p.hidden());
    double best_reward = -INFINITY;
    for (const auto& a : p.actions()) {
        best_reward = std::max(best_reward, belief_reward(p, b, a));
    }
    CHECK(brute_force_value(p, b, 1) == doctest::Approx(best_reward).epsilon(1e-14));
    const auto c = constant_reward(p, 2.5);
    for (std::size_t t = 1; t <= 4; ++t) {
        const double expected = 2.5 * (1.0 - std::pow(0.8, t)) / (1.0 - 0.8);
        CHECK(std::abs(brute_force_value(c, b, t) - expected) <= 1e-12);
    }
    CHECK_THROWS_AS(brute_force_value(p, b, 0), DomainError);
    CHECK_NOTHROW(brute_force_value(p, b, 4, 85));
    CHECK_THROWS_AS(brute_force_value(p, b, 4, 84), BudgetError);
}

TEST_CASE("brute force equals the maximum over literally enumerated policy trees") {
    Rng rng(77);
    for (int trial = 0; trial < 15; ++trial) {
        const auto p = random_pomdp(rng, {2 + rng.below(2), 2, 2, 0.9, 0.2});
        const auto b = random_dist(rng, p.hidden(), 0.2);
        for (std::size_t t = 1; t <= 3; ++t) {
            CHECK(std::abs(brute_force_value(p, b, t) - best_tree_value(p, b, t)) <= 1e-10);
        }
    }
}

TEST_CASE("value iteration matches the brute-force oracle at finite horizons") {
    SUBCASE("sondik, horizon 2, uniform belief") {
        SolveOptions opts;
        opts.horizon = 2;
        const auto p = sondik::pomdp(0.95);
        const auto pol = pomdp_value_iteration(p, opts);
        const auto b = sondik::belief_of(0.5);
        CHECK(std::abs(pol.value(b) - brute_force_value(p, b, 2)) <= 1e-9);
    }
    SUBCASE("random small POMDPs") {
        Rng rng(4242);
        for (int trial = 0; trial < 6; ++trial) {
            const PomdpShape shape{1 + rng.below(3), 1 + rng.below(3), 1 + rng.below(3), 0.9, 0.15};
            const auto p = random_pomdp(rng, shape);
            for (std::size_t t = 1; t <= 3; ++t) {
                SolveOptions opts;
                opts.horizon = t;
                const auto pol = pomdp_value_iteration(p, opts);
                for (int k = 0; k < 10; ++k) {
                    const auto b = random_dist(rng, p.hidden());
                    CHECK(std::abs(pol.value(b) - brute_force_value(p, b, t)) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("witness pruning keeps the value on the grid") {
    Rng rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        const auto p = random_pomdp(rng, {3, 2, 2, 0.9, 0.1});
        const auto grid = simplex_grid(3, 30);
        std::vector<AlphaVector> stage{AlphaVector{{0.0, 0.0, 0.0}, 0}};
        for (int t = 0; t < 3; ++t) {
            const auto full = enumerate_backup(p, stage, 1000000);
            const auto pruned = prune_to_witnesses(full, grid);
            const auto fast = witness_backup(p, stage, grid, 1000000);
            CHECK(pruned.size() <= full.size());
            for (const auto& b : grid) {
                double v_full = -INFINITY, v_pruned = -INFINITY, v_fast = -INFINITY;
                for (const auto& a : full) v_full = std::max(v_full, a.dot(b));
                for (const auto& a : pruned) v_pruned = std::max(v_pruned, a.dot(b));
                for (const auto& a : fast) v_fast = std::max(v_fast, a.dot(b));
                CHECK(std::abs(v_full - v_pruned) <= 1e-12);
                CHECK(std::abs(v_full - v_fast) <= 1e-12);
            }
            // No survivor is pointwise dominated by another.
            for (std::size_t i = 0; i < pruned.size(); ++i) {
                for (std::size_t j = 0; j < pruned.size(); ++j) {
                    if (i == j) continue;
                    bool dominated = true;
                    for (std::size_t h = 0; h < 3; ++h) {
                        dominated = dominated && pruned[j].values[h] >= pruned[i].values[h];
                    }
                    CHECK_FALSE(dominated);
                }
            }
            stage = pruned;
        }
    }
}

TEST_CASE("exhaustive and witness backups produce the same policy") {
    Rng rng(5);
    const auto p = random_pomdp(rng, {2, 2, 2, 0.9, 0.0});
    SolveOptions fast, slow;
    fast.horizon = slow.horizon = 4;
    fast.witness_resolution = slow.witness_resolution = 50;
    slow.exhaustive_enumeration = true;
    const auto a = pomdp_value_iteration(p, fast);
    const auto b = pomdp_value_iteration(p, slow);
    for (const auto& g : simplex_grid(2, 50)) {
        CHECK(std::abs(a.value(g) - b.value(g)) <= 1e-12);
    }
}

TEST_CASE("enumeration beyond the budget is reported") {
    Rng rng(6);
    const auto p = random_pomdp(rng, {2, 3, 3, 0.9, 0.0});
    std::vector<AlphaVector> stage;
    for (int k = 0; k < 10; ++k) {
        stage.push_back({{rng.uniform(), rng.uniform()}, 0});
    }
    CHECK_THROWS_AS(enumerate_backup(p, stage, 2999), BudgetError);
    CHECK(enumerate_backup(p, stage, 3000).size() == 3000);
    SolveOptions opts;
    opts.vector_budget = 1;
    CHECK_THROWS_AS(pomdp_value_iteration(sondik::pomdp(), opts), BudgetError);
}

TEST_CASE("value function is convex and dominates every fixed-action plan") {
    Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const auto p = random_pomdp(rng, {3, 2, 2, 0.85, 0.1});
        SolveOptions opts;
        opts.witness_resolution = 24;
        opts.epsilon = 1e-6;
        const auto pol = pomdp_value_iteration(p, opts);
        const auto grid = simplex_grid(3, 24);
        for (int k = 0; k < 200; ++k) {
            const auto& b1 = grid[rng.below(grid.size())];
            const auto& b2 = grid[rng.below(grid.size())];
            const double lambda = rng.uniform();
            std::vector<double> mix(3);
            for (std::size_t h = 0; h < 3; ++h) {
                mix[h] = lambda * b1[h] + (1 - lambda) * b2[h];
            }
            CHECK(pol.value(mix) <= lambda * pol.value(b1) + (1 - lambda) * pol.value(b2) + 1e-9);
        }
        for (std::size_t a = 0; a < 2; ++a) {
            const auto fixed = fixed_action_values(p, a);
            for (const auto& b : grid) {
                double plan = 0.0;
                for (std::size_t h = 0; h < 3; ++h) {
                    plan += b[h] * fixed[h];
                }
                CHECK(pol.value(b) >= plan - 1e-6);
            }
        }
    }
}

TEST_CASE("sondik policy has two regions and the lookahead agrees with the solved vectors") {
    const auto p = sondik::pomdp(0.95);
    const auto pol = pomdp_value_iteration(p);
    CHECK(pol.converged);
    std::size_t switches = 0;
    Label previous;
    for (double m : unit_interval_grid(2001)) {
        const auto decision = optimal_policy_at(pol, sondik::belief_of(m));
        if (!previous.empty() && decision.action != previous) {
            ++switches;
        }
        previous = decision.action;
        // One-step lookahead and the stored vector value agree at convergence.
        CHECK(std::abs(decision.value - pol.value(sondik::belief_of(m))) <= 1e-6);
    }
    CHECK(switches == 1);
}

TEST_CASE("optimal_policy_at rejects beliefs over other sets") {
    const auto pol = pomdp_value_iteration(sondik::pomdp(0.9));
    CHECK_THROWS_AS(optimal_policy_at(pol, Belief(LabelSet{"a", "b"}, {0.5, 0.5})), DomainError);
    CHECK_THROWS_AS(pol.value(std::vector<double>{1.0, 0.0, 0.0}), DomainError);
}

TEST_CASE("canonical machine") {
    SUBCASE("single action, fully observed: states are point masses") {
        Rng rng(2);
        const auto p = fully_observed_pomdp(rng, 3, 1, 0.9);
        const auto pol = pomdp_value_iteration(p);
        const auto cm = canonical_machine(p, pol, {dirac("1", p.hidden())});
        CHECK(cm.reachable.size() >= 2);
        for (const auto& s : cm.reachable) {
            const auto& b = std::get<Point>(s);
            CHECK(std::count(b.begin(), b.end(), 1.0) == 1);
            CHECK(std::count(b.begin(), b.end(), 0.0) == 2);
        }
    }
    SUBCASE("expose is the lookahead policy on every reachable state") {
        Rng rng(10);
        const auto p = random_pomdp(rng, {2, 2, 2, 0.9, 0.0});
        const auto pol = pomdp_value_iteration(p);
        const auto cm = canonical_machine(p, pol, {FiniteDist::uniform(p.hidden())}, {5, 1000});
        for (const auto& s : cm.reachable) {
            const FiniteDist b(p.hidden(), std::get<Point>(s));
            CHECK(cm.machine.expose(s) == optimal_policy_at(pol, b).action);
        }
    }
    SUBCASE("sondik from (0, 1)") {
        const auto p = sondik::pomdp(0.95);
        const auto pol = pomdp_value_iteration(p);
        const auto b0 = sondik::belief_of(0.0);
        const auto cm = canonical_machine(p, pol, {b0}, {1, 100});
        REQUIRE(cm.reachable.size() == 3);
        CHECK(std::get<Point>(cm.reachable[0]) == Point{0.0, 1.0});
        const auto a = optimal_policy_at(pol, b0).action;
        const auto expected = std::get<FiniteDist>(belief_update(p, b0, a, "1"));
        const auto& second = std::get<Point>(cm.reachable[1]);
        CHECK(std::abs(second[0] - expected[0]) <= 1e-15);
        // Under action "1" that successor is (0.25, 0.75).
        const auto under_one = std::get<FiniteDist>(belief_update(p, b0, "1", "1"));
        CHECK(std::abs(under_one[0] - 0.25) <= 1e-12);
    }
    SUBCASE("zero-probability sensor values keep the belief") {
        const LabelSet h{"x", "y"}, a{"a"}, s{"sx", "sy"};
        TabularKernel nu({h, a}, h, {dirac("x", h), dirac("y", h)});
        TabularKernel phi({h, a}, s, {dirac("sx", s), dirac("sy", s)});
        const Pomdp p(WorldModel::factored(h, a, s, nu, phi), {1.0, 0.0}, 0.5);
        const auto pol = pomdp_value_iteration(p);
        const auto cm = canonical_machine(p, pol, {dirac("x", h)});
        const auto next = cm.machine.successors(Point{1.0, 0.0}, "sy");
        REQUIRE(next.size() == 1);
        CHECK(std::get<Point>(next[0].state) == Point{1.0, 0.0});
    }
    SUBCASE("cap") {
        Rng rng(13);
        const auto p = random_pomdp(rng, {3, 2, 3, 0.9, 0.0});
        SolveOptions opts;
        opts.witness_resolution = 20;
        const auto pol = pomdp_value_iteration(p, opts);
        CHECK_THROWS_AS(canonical_machine(p, pol, {FiniteDist::uniform(p.hidden())}, {6, 50}), BudgetError);
    }
}
