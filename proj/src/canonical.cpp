#include <cmath>
#include <deque>
#include <map>
#include <memory>

#include "agentinterp/errors.hpp"
#include "agentinterp/solver.hpp"

namespace agentinterp {

namespace {

bool on_simplex(const Point& b) {
    double total = 0.0;
    for (double x : b) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            return false;
        }
        total += x;
    }
    return std::abs(total - 1.0) <= kNormalizationTolerance;
}

// Beliefs closer than ~1e-12 share a key.
std::vector<long long> belief_key(const Point& b) {
    std::vector<long long> key(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        key[i] = std::llround(b[i] * 1e12);
    }
    return key;
}

}  // namespace

CanonicalMachine canonical_machine(const Pomdp& p, const AlphaVectorPolicy& policy, const std::vector<Belief>& seeds,
                                   const CanonicalOptions& options) {
    const auto& solved = policy.pomdp();
    if (!(solved.hidden() == p.hidden()) || !(solved.actions() == p.actions()) || !(solved.sensors() == p.sensors())) {
        throw DomainError("policy was solved for a different POMDP");
    }
    auto shared = std::make_shared<const AlphaVectorPolicy>(policy);
    const LabelSet hidden = p.hidden();

    ParametricDynamics dyn;
    dyn.dimension = hidden.size();
    dyn.contains = on_simplex;
    dyn.expose = [shared, hidden](const Point& b) {
        return optimal_policy_at(*shared, FiniteDist(hidden, b)).action_index;
    };
    dyn.update = [shared, hidden](std::size_t s, const Point& b) -> Point {
        const FiniteDist belief(hidden, b);
        const auto a = optimal_policy_at(*shared, belief).action_index;
        auto posterior = belief_update(shared->pomdp().model(), belief, a, s);
        if (const auto* next = std::get_if<FiniteDist>(&posterior)) {
            return Point(next->weights().begin(), next->weights().end());
        }
        // Impossible observation: the belief stays put.
        return b;
    };
    auto machine = StochasticMooreMachine::parametric(p.sensors(), p.actions(), std::move(dyn));

    CanonicalMachine out{std::move(machine), {}};
    std::map<std::vector<long long>, std::size_t> seen;
    std::deque<std::pair<Point, std::size_t>> frontier;
    auto visit = [&](Point b, std::size_t depth) {
        if (!seen.emplace(belief_key(b), out.reachable.size()).second) {
            return;
        }
        if (out.reachable.size() >= options.cap) {
            throw BudgetError("reachable belief set exceeds the cap of " + std::to_string(options.cap));
        }
        out.reachable.emplace_back(b);
        frontier.emplace_back(std::move(b), depth);
    };
    for (const auto& seed : seeds) {
        p.model().check_belief(seed);
        visit(Point(seed.weights().begin(), seed.weights().end()), 0);
    }
    while (!frontier.empty()) {
        auto [b, depth] = std::move(frontier.front());
        frontier.pop_front();
        if (depth == options.depth) {
            continue;
        }
        for (const auto& s : p.sensors()) {
            for (auto& next : out.machine.successors(b, s)) {
                visit(std::get<Point>(std::move(next.state)), depth + 1);
            }
        }
    }
    return out;
}

}  // namespace agentinterp
