#include "agentinterp/sondik.hpp"

#include <algorithm>

#include "agentinterp/errors.hpp"

namespace agentinterp::sondik {

namespace {

const LabelSet& two_labels() {
    static const LabelSet set{"1", "2"};
    return set;
}

}  // namespace

double update(std::size_t input, double m, double threshold) {
    const bool low = m < threshold;
    if (input == 0) {
        return low ? 15.0 / (6.0 * m + 20.0) - 0.5 : 9.0 / 5.0 - 72.0 / (5.0 * m + 60.0);
    }
    if (input == 1) {
        return low ? 2.0 + 20.0 / (3.0 * m - 15.0) : -1.0 / 5.0 - 12.0 / (5.0 * m - 40.0);
    }
    throw LabelError("sondik machine has two inputs");
}

StochasticMooreMachine machine(const std::map<std::string, double>& params) {
    double threshold = kThreshold;
    double offset = 0.0;
    for (const auto& [key, value] : params) {
        if (key == "threshold") {
            threshold = value;
        } else if (key == "g_offset") {
            offset = value;
        } else {
            throw RegistryError("unknown parameter '" + key + "' for builtin 'sondik'");
        }
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ModelError("sondik threshold must lie in (0, 1)");
    }
    ParametricDynamics dyn;
    dyn.dimension = 1;
    dyn.update = [threshold, offset](std::size_t i, const Point& m) {
        const double next = update(i, m[0], threshold) + offset;
        return Point{offset == 0.0 ? next : std::clamp(next, 0.0, 1.0)};
    };
    dyn.expose = [threshold](const Point& m) -> std::size_t { return m[0] < threshold ? 0 : 1; };
    dyn.contains = [](const Point& m) { return m[0] >= 0.0 && m[0] <= 1.0; };
    dyn.branch_points = {Point{threshold}};
    dyn.builtin = "sondik";
    dyn.params = params;
    return StochasticMooreMachine::parametric(two_labels(), two_labels(), std::move(dyn));
}

Pomdp pomdp(double discount) {
    const auto& h = two_labels();
    const auto& a = two_labels();
    const auto& s = two_labels();
    // Row order (x, a): (1,1), (1,2), (2,1), (2,2).
    // nu(. | h, a); columns of the table are indexed by h.
    std::vector<FiniteDist> nu_rows{
        FiniteDist(h, {0.2, 0.8}),  // h=1, a=1
        FiniteDist(h, {0.5, 0.5}),  // h=1, a=2
        FiniteDist(h, {0.5, 0.5}),  // h=2, a=1
        FiniteDist(h, {0.4, 0.6}),  // h=2, a=2
    };
    // phi(. | h', a)
    std::vector<FiniteDist> phi_rows{
        FiniteDist(s, {0.2, 0.8}),  // h'=1, a=1
        FiniteDist(s, {0.9, 0.1}),  // h'=1, a=2
        FiniteDist(s, {0.6, 0.4}),  // h'=2, a=1
        FiniteDist(s, {0.4, 0.6}),  // h'=2, a=2
    };
    auto model = WorldModel::factored(h, a, s, TabularKernel({h, a}, h, std::move(nu_rows)),
                                      TabularKernel({h, a}, s, std::move(phi_rows)));
    // r(h, a) row-major in h.
    return Pomdp(std::move(model), {4.0, 0.0, -4.0, -3.0}, discount);
}

FiniteDist belief_of(double m) {
    if (!(m >= 0.0 && m <= 1.0)) {
        throw LabelError("sondik state must lie in [0, 1]");
    }
    return FiniteDist(two_labels(), {m, 1.0 - m});
}

InterpretationMap psi() { return InterpretationMap::bernoulli(two_labels()); }

Interpretation interpretation(const StochasticMooreMachine& machine) {
    return Interpretation{psi(), ActionFunction::from_expose(machine), pomdp().model()};
}

}  // namespace agentinterp::sondik
