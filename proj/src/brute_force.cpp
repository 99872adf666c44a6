#include <algorithm>
#include <limits>

#include "agentinterp/errors.hpp"
#include "agentinterp/solver.hpp"

namespace agentinterp {

namespace {

double expand(const Pomdp& p, const std::vector<double>& b, std::size_t steps) {
    const std::size_t nh = p.hidden().size(), na = p.actions().size(), ns = p.sensors().size();
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> next(nh);
    for (std::size_t a = 0; a < na; ++a) {
        double total = 0.0;
        for (std::size_t h = 0; h < nh; ++h) {
            total += b[h] * p.reward(h, a);
        }
        if (steps > 1) {
            for (std::size_t s = 0; s < ns; ++s) {
                double mass = 0.0;
                for (std::size_t h2 = 0; h2 < nh; ++h2) {
                    double w = 0.0;
                    for (std::size_t h = 0; h < nh; ++h) {
                        w += p.model().kappa(h, a, h2, s) * b[h];
                    }
                    next[h2] = w;
                    mass += w;
                }
                // Histories with probability zero contribute nothing.
                if (!(mass > 0.0)) {
                    continue;
                }
                for (double& w : next) {
                    w /= mass;
                }
                total += p.discount() * mass * expand(p, next, steps - 1);
            }
        }
        best = std::max(best, total);
    }
    return best;
}

}  // namespace

double brute_force_value(const Pomdp& p, const Belief& b, std::size_t horizon, std::size_t node_budget) {
    p.model().check_belief(b);
    if (horizon == 0) {
        throw DomainError("horizon must be at least 1");
    }
    // Belief nodes expanded: sum_{t < horizon} (|A| |S|)^t.
    const std::size_t branching = p.actions().size() * p.sensors().size();
    std::size_t nodes = 0, layer = 1;
    for (std::size_t t = 0; t < horizon; ++t) {
        nodes += layer;
        if (nodes > node_budget) {
            throw BudgetError("brute-force expansion exceeds " + std::to_string(node_budget) + " nodes");
        }
        if (t + 1 < horizon) {
            if (layer > node_budget / branching) {
                throw BudgetError("brute-force expansion exceeds " + std::to_string(node_budget) + " nodes");
            }
            layer *= branching;
        }
    }
    return expand(p, std::vector<double>(b.weights().begin(), b.weights().end()), horizon);
}

}  // namespace agentinterp
