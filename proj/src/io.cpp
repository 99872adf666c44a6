#include "agentinterp/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "agentinterp/errors.hpp"
#include "agentinterp/sondik.hpp"

namespace agentinterp::io {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* name) {
    if (!obj.is_object()) {
        throw SchemaError("expected an object around '" + std::string(name) + "'");
    }
    auto it = obj.find(name);
    if (it == obj.end()) {
        throw SchemaError("missing field '" + std::string(name) + "'");
    }
    return *it;
}

Label label(const json& entry, const char* name) {
    const auto& v = field(entry, name);
    if (!v.is_string()) {
        throw SchemaError("field '" + std::string(name) + "' must be a string label");
    }
    return v.get<std::string>();
}

double number(const json& entry, const char* name) {
    const auto& v = field(entry, name);
    if (!v.is_number()) {
        throw SchemaError("field '" + std::string(name) + "' must be a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw SchemaError("field '" + std::string(name) + "' must be finite");
    }
    return x;
}

LabelSet label_set(const json& obj, const char* name) {
    const auto& v = field(obj, name);
    if (!v.is_array() || v.empty()) {
        throw SchemaError("field '" + std::string(name) + "' must be a non-empty array of labels");
    }
    std::vector<Label> out;
    for (const auto& x : v) {
        if (!x.is_string()) {
            throw SchemaError("field '" + std::string(name) + "' must contain only string labels");
        }
        out.push_back(x.get<std::string>());
    }
    return LabelSet(std::move(out));
}

const json& entries(const json& obj, const char* name) {
    const auto& v = field(obj, name);
    if (!v.is_array()) {
        throw SchemaError("field '" + std::string(name) + "' must be an array of entries");
    }
    return v;
}

// Dense rows filled from sparse entries.
class RowTable {
public:
    RowTable(std::string what, std::size_t rows, std::size_t cols)
        : what_(std::move(what)), cols_(cols), cells_(rows * cols, 0.0), seen_(rows * cols, false) {}

    void set(std::size_t row, std::size_t col, double p) {
        const std::size_t k = row * cols_ + col;
        if (seen_[k]) {
            throw SchemaError(what_ + ": duplicate entry");
        }
        if (p < 0.0) {
            throw ProbabilityError(what_ + ": negative probability");
        }
        seen_[k] = true;
        cells_[k] = p;
    }

    /// Applies the row-sum gate, then rescales rows that are not already
    /// within kRenormalizedTolerance of one.
    std::vector<std::vector<double>> normalized() const {
        std::vector<std::vector<double>> out;
        for (std::size_t r = 0; r * cols_ < cells_.size(); ++r) {
            std::vector<double> row(cells_.begin() + r * cols_, cells_.begin() + (r + 1) * cols_);
            double total = 0.0;
            for (double x : row) {
                total += x;
            }
            if (!(std::abs(total - 1.0) <= kRowSumGate)) {
                std::ostringstream msg;
                msg << what_ << ": row " << r << " sums to " << total;
                throw ProbabilityError(msg.str());
            }
            if (std::abs(total - 1.0) > kRenormalizedTolerance) {
                for (auto& x : row) {
                    x /= total;
                }
            }
            out.push_back(std::move(row));
        }
        return out;
    }

private:
    std::string what_;
    std::size_t cols_;
    std::vector<double> cells_;
    std::vector<bool> seen_;
};

std::vector<FiniteDist> as_dists(const LabelSet& over, std::vector<std::vector<double>> rows) {
    std::vector<FiniteDist> out;
    for (auto& r : rows) {
        out.emplace_back(over, std::move(r));
    }
    return out;
}

WorldModel parse_kernel(const json& doc) {
    const auto hidden = label_set(doc, "hidden");
    const auto actions = label_set(doc, "actions");
    const auto sensors = label_set(doc, "observations");
    const std::size_t nh = hidden.size(), na = actions.size(), ns = sensors.size();
    const bool has_nu = doc.contains("nu"), has_phi = doc.contains("phi"), has_joint = doc.contains("joint");
    if (has_nu != has_phi) {
        throw SchemaError("'nu' and 'phi' must be given together");
    }
    if (!has_nu && !has_joint) {
        throw SchemaError("model needs 'nu' and 'phi', or 'joint'");
    }
    std::optional<TabularKernel> nu, phi;
    if (has_nu) {
        RowTable nu_rows("nu", nh * na, nh);
        for (const auto& e : entries(doc, "nu")) {
            nu_rows.set(hidden.index_of(label(e, "h")) * na + actions.index_of(label(e, "a")),
                        hidden.index_of(label(e, "h_next")), number(e, "p"));
        }
        RowTable phi_rows("phi", nh * na, ns);
        for (const auto& e : entries(doc, "phi")) {
            phi_rows.set(hidden.index_of(label(e, "h_next")) * na + actions.index_of(label(e, "a")),
                         sensors.index_of(label(e, "s")), number(e, "p"));
        }
        nu.emplace(std::vector<LabelSet>{hidden, actions}, hidden, as_dists(hidden, nu_rows.normalized()));
        phi.emplace(std::vector<LabelSet>{hidden, actions}, sensors, as_dists(sensors, phi_rows.normalized()));
    }
    if (!has_joint) {
        return WorldModel::factored(hidden, actions, sensors, std::move(*nu), std::move(*phi));
    }
    RowTable joint_rows("joint", nh * na, nh * ns);
    for (const auto& e : entries(doc, "joint")) {
        joint_rows.set(hidden.index_of(label(e, "h")) * na + actions.index_of(label(e, "a")),
                       hidden.index_of(label(e, "h_next")) * ns + sensors.index_of(label(e, "s")), number(e, "p"));
    }
    std::vector<JointDist> rows;
    for (auto& r : joint_rows.normalized()) {
        rows.emplace_back(hidden, sensors, std::move(r));
    }
    if (has_nu) {
        return WorldModel::factored_and_joint(hidden, actions, sensors, std::move(*nu), std::move(*phi),
                                              std::move(rows));
    }
    return WorldModel::joint(hidden, actions, sensors, std::move(rows));
}

std::vector<double> parse_rewards(const json& doc, const LabelSet& xs, const LabelSet& actions, const char* state_key) {
    std::vector<double> reward(xs.size() * actions.size(), 0.0);
    std::vector<bool> seen(reward.size(), false);
    for (const auto& e : entries(doc, "reward")) {
        const std::size_t k = xs.index_of(label(e, state_key)) * actions.size() + actions.index_of(label(e, "a"));
        if (seen[k]) {
            throw SchemaError("reward: duplicate entry");
        }
        seen[k] = true;
        reward[k] = number(e, "r");
    }
    for (std::size_t k = 0; k < seen.size(); ++k) {
        if (!seen[k]) {
            throw SchemaError("reward: missing entry for (" + xs[k / actions.size()] + ", " +
                              actions[k % actions.size()] + ")");
        }
    }
    return reward;
}

Pomdp parse_pomdp(const json& doc) {
    auto model = parse_kernel(doc);
    auto reward = parse_rewards(doc, model.hidden(), model.actions(), "h");
    return Pomdp(std::move(model), std::move(reward), number(doc, "discount"));
}

StochasticMooreMachine parse_machine(const json& doc) {
    if (doc.contains("builtin")) {
        const auto name = label(doc, "builtin");
        std::map<std::string, double> params;
        if (doc.contains("params")) {
            const auto& p = doc.at("params");
            if (!p.is_object()) {
                throw SchemaError("'params' must be an object");
            }
            for (const auto& [key, value] : p.items()) {
                if (!value.is_number()) {
                    throw SchemaError("parameter '" + key + "' must be a number");
                }
                params[key] = value.get<double>();
            }
        }
        return builtin_machine(name, params);
    }
    const auto states = label_set(doc, "states");
    const auto inputs = label_set(doc, "inputs");
    const auto outputs = label_set(doc, "outputs");
    RowTable kernel("kernel", inputs.size() * states.size(), states.size());
    for (const auto& e : entries(doc, "kernel")) {
        kernel.set(inputs.index_of(label(e, "i")) * states.size() + states.index_of(label(e, "m")),
                   states.index_of(label(e, "m_next")), number(e, "p"));
    }
    std::vector<Label> expose(states.size());
    for (const auto& e : entries(doc, "expose")) {
        const std::size_t m = states.index_of(label(e, "m"));
        if (!expose[m].empty()) {
            throw SchemaError("expose: duplicate entry for state '" + states[m] + "'");
        }
        expose[m] = label(e, "o");
        outputs.index_of(expose[m]);
    }
    for (std::size_t m = 0; m < states.size(); ++m) {
        if (expose[m].empty()) {
            throw SchemaError("expose: no output for state '" + states[m] + "'");
        }
    }
    return StochasticMooreMachine::tabular(
        states, inputs, outputs,
        TabularKernel({inputs, states}, states, as_dists(states, kernel.normalized())), std::move(expose));
}

InterpretationDocument parse_interpretation(const json& doc) {
    auto model = parse_kernel(field(doc, "model"));
    const auto& psi_doc = field(doc, "psi");
    std::optional<InterpretationMap> psi;
    if (psi_doc.is_object()) {
        const auto name = label(psi_doc, "builtin");
        if (name == "sondik_psi") {
            psi = InterpretationMap::bernoulli(model.hidden());
        } else if (name == "identity") {
            psi = InterpretationMap::identity(model.hidden());
        } else {
            throw RegistryError("unknown builtin psi '" + name + "'");
        }
    } else if (psi_doc.is_array()) {
        std::map<Label, std::size_t> row_of;
        for (const auto& e : psi_doc) {
            row_of.emplace(label(e, "m"), row_of.size());
        }
        if (row_of.empty()) {
            throw SchemaError("'psi' has no entries");
        }
        RowTable rows("psi", row_of.size(), model.hidden().size());
        for (const auto& e : psi_doc) {
            rows.set(row_of.at(label(e, "m")), model.hidden().index_of(label(e, "h")), number(e, "p"));
        }
        const auto normalized = rows.normalized();
        std::map<Label, FiniteDist> table;
        for (const auto& [m, r] : row_of) {
            table.emplace(m, FiniteDist(model.hidden(), normalized[r]));
        }
        psi = InterpretationMap::tabular(model.hidden(), std::move(table));
    } else {
        throw SchemaError("'psi' must be an array of entries or a builtin object");
    }
    std::optional<std::map<Label, Label>> alpha;
    if (doc.contains("alpha")) {
        alpha.emplace();
        for (const auto& e : entries(doc, "alpha")) {
            auto a = label(e, "a");
            model.actions().index_of(a);
            if (!alpha->emplace(label(e, "m"), std::move(a)).second) {
                throw SchemaError("alpha: duplicate entry");
            }
        }
    }
    return InterpretationDocument{std::move(*psi), std::move(alpha), std::move(model)};
}

Mdp parse_mdp(const json& doc) {
    const auto states = label_set(doc, "states");
    const auto actions = label_set(doc, "actions");
    RowTable rows("transition", states.size() * actions.size(), states.size());
    for (const auto& e : entries(doc, "transition")) {
        rows.set(states.index_of(label(e, "x")) * actions.size() + actions.index_of(label(e, "a")),
                 states.index_of(label(e, "x_next")), number(e, "p"));
    }
    return Mdp(states, actions, TabularKernel({states, actions}, states, as_dists(states, rows.normalized())),
               parse_rewards(doc, states, actions, "x"), number(doc, "discount"));
}

DocumentKind infer_kind(const json& doc) {
    if (doc.contains("kind")) {
        const auto k = label(doc, "kind");
        if (k == "pomdp") return DocumentKind::pomdp;
        if (k == "machine") return DocumentKind::machine;
        if (k == "interpretation") return DocumentKind::interpretation;
        if (k == "mdp") return DocumentKind::mdp;
        throw SchemaError("unknown document kind '" + k + "'");
    }
    if (doc.contains("psi")) return DocumentKind::interpretation;
    if (doc.contains("transition")) return DocumentKind::mdp;
    if (doc.contains("kernel") || doc.contains("builtin")) return DocumentKind::machine;
    if (doc.contains("reward")) return DocumentKind::pomdp;
    throw SchemaError("cannot tell the document kind; add a 'kind' field");
}

json label_array(const LabelSet& s) { return json(s.labels()); }

void put_kernel(json& out, const WorldModel& model) {
    out["hidden"] = label_array(model.hidden());
    out["actions"] = label_array(model.actions());
    out["observations"] = label_array(model.sensors());
    const auto& hs = model.hidden();
    const auto& as = model.actions();
    const auto& ss = model.sensors();
    if (model.nu() && model.phi()) {
        json nu = json::array(), phi = json::array();
        for (std::size_t h = 0; h < hs.size(); ++h) {
            for (std::size_t a = 0; a < as.size(); ++a) {
                const std::size_t idx[] = {h, a};
                const auto& nrow = model.nu()->row(idx);
                for (std::size_t h2 = 0; h2 < hs.size(); ++h2) {
                    if (nrow[h2] != 0.0) {
                        nu.push_back({{"h", hs[h]}, {"a", as[a]}, {"h_next", hs[h2]}, {"p", nrow[h2]}});
                    }
                }
                const auto& prow = model.phi()->row(idx);
                for (std::size_t s = 0; s < ss.size(); ++s) {
                    if (prow[s] != 0.0) {
                        phi.push_back({{"h_next", hs[h]}, {"a", as[a]}, {"s", ss[s]}, {"p", prow[s]}});
                    }
                }
            }
        }
        out["nu"] = std::move(nu);
        out["phi"] = std::move(phi);
        return;
    }
    json joint = json::array();
    for (std::size_t h = 0; h < hs.size(); ++h) {
        for (std::size_t a = 0; a < as.size(); ++a) {
            for (std::size_t h2 = 0; h2 < hs.size(); ++h2) {
                for (std::size_t s = 0; s < ss.size(); ++s) {
                    const double p = model.kappa(h, a, h2, s);
                    if (p != 0.0) {
                        joint.push_back({{"h", hs[h]}, {"a", as[a]}, {"h_next", hs[h2]}, {"s", ss[s]}, {"p", p}});
                    }
                }
            }
        }
    }
    out["joint"] = std::move(joint);
}

template <class T>
T expect(ModelDocument doc, DocumentKind kind) {
    if (doc.kind != kind) {
        throw SchemaError(std::string("expected a ") + to_string(kind) + " document, got " + to_string(doc.kind));
    }
    return std::get<T>(std::move(doc.body));
}

}  // namespace

const char* to_string(DocumentKind kind) {
    switch (kind) {
        case DocumentKind::pomdp:
            return "pomdp";
        case DocumentKind::machine:
            return "machine";
        case DocumentKind::interpretation:
            return "interpretation";
        case DocumentKind::mdp:
            return "mdp";
    }
    return "unknown";
}

Interpretation InterpretationDocument::bind(const StochasticMooreMachine& machine) const {
    return Interpretation{psi, alpha ? ActionFunction::tabular(*alpha) : ActionFunction::from_expose(machine), model};
}

ModelDocument parse(const json& doc) {
    if (!doc.is_object()) {
        throw SchemaError("document must be a JSON object");
    }
    const auto kind = infer_kind(doc);
    switch (kind) {
        case DocumentKind::pomdp:
            return {kind, parse_pomdp(doc)};
        case DocumentKind::machine:
            return {kind, parse_machine(doc)};
        case DocumentKind::interpretation:
            return {kind, parse_interpretation(doc)};
        case DocumentKind::mdp:
            return {kind, parse_mdp(doc)};
    }
    throw SchemaError("unknown document kind");
}

ModelDocument load_string(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("not valid JSON: ") + e.what());
    }
    return parse(doc);
}

ModelDocument load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot read '" + path.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return load_string(text.str());
    } catch (const Error& e) {
        // Keep the type, prefix the file name.
        const std::string msg = path.string() + ": " + e.what();
        if (dynamic_cast<const ProbabilityError*>(&e)) throw ProbabilityError(msg);
        if (dynamic_cast<const LabelError*>(&e)) throw LabelError(msg);
        if (dynamic_cast<const RegistryError*>(&e)) throw RegistryError(msg);
        if (dynamic_cast<const ModelError*>(&e)) throw ModelError(msg);
        if (dynamic_cast<const DomainError*>(&e)) throw DomainError(msg);
        throw SchemaError(msg);
    }
}

Pomdp load_pomdp(const std::filesystem::path& path) { return expect<Pomdp>(load(path), DocumentKind::pomdp); }

StochasticMooreMachine load_machine(const std::filesystem::path& path) {
    return expect<StochasticMooreMachine>(load(path), DocumentKind::machine);
}

InterpretationDocument load_interpretation(const std::filesystem::path& path) {
    return expect<InterpretationDocument>(load(path), DocumentKind::interpretation);
}

Mdp load_mdp(const std::filesystem::path& path) { return expect<Mdp>(load(path), DocumentKind::mdp); }

json to_json(const WorldModel& model) {
    json out = json::object();
    put_kernel(out, model);
    return out;
}

json to_json(const Pomdp& p) {
    json out{{"kind", "pomdp"}};
    put_kernel(out, p.model());
    json reward = json::array();
    for (std::size_t h = 0; h < p.hidden().size(); ++h) {
        for (std::size_t a = 0; a < p.actions().size(); ++a) {
            reward.push_back({{"h", p.hidden()[h]}, {"a", p.actions()[a]}, {"r", p.reward(h, a)}});
        }
    }
    out["reward"] = std::move(reward);
    out["discount"] = p.discount();
    return out;
}

json to_json(const StochasticMooreMachine& machine) {
    json out{{"kind", "machine"}};
    if (!machine.is_tabular()) {
        const auto& dyn = machine.dynamics();
        if (dyn.builtin.empty()) {
            throw SchemaError("this machine was built in code and has no document form");
        }
        out["builtin"] = dyn.builtin;
        out["params"] = dyn.params;
        return out;
    }
    const auto& states = machine.states();
    const auto& inputs = machine.inputs();
    out["states"] = label_array(states);
    out["inputs"] = label_array(inputs);
    out["outputs"] = label_array(machine.outputs());
    json kernel = json::array(), expose = json::array();
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (std::size_t m = 0; m < states.size(); ++m) {
            const std::size_t idx[] = {i, m};
            const auto& row = machine.kernel().row(idx);
            for (std::size_t m2 = 0; m2 < states.size(); ++m2) {
                if (row[m2] != 0.0) {
                    kernel.push_back({{"i", inputs[i]}, {"m", states[m]}, {"m_next", states[m2]}, {"p", row[m2]}});
                }
            }
        }
    }
    for (const auto& m : states) {
        expose.push_back({{"m", m}, {"o", machine.expose(m)}});
    }
    out["kernel"] = std::move(kernel);
    out["expose"] = std::move(expose);
    return out;
}

json to_json(const InterpretationDocument& itp) {
    json out{{"kind", "interpretation"}};
    switch (itp.psi.kind()) {
        case InterpretationMap::Kind::bernoulli:
            out["psi"] = {{"builtin", "sondik_psi"}};
            break;
        case InterpretationMap::Kind::identity:
            out["psi"] = {{"builtin", "identity"}};
            break;
        case InterpretationMap::Kind::tabular: {
            json psi = json::array();
            for (const auto& [m, dist] : itp.psi.table()) {
                for (std::size_t h = 0; h < dist.size(); ++h) {
                    if (dist[h] != 0.0) {
                        psi.push_back({{"m", m}, {"h", dist.labels()[h]}, {"p", dist[h]}});
                    }
                }
            }
            out["psi"] = std::move(psi);
            break;
        }
    }
    if (itp.alpha) {
        json alpha = json::array();
        for (const auto& [m, a] : *itp.alpha) {
            alpha.push_back({{"m", m}, {"a", a}});
        }
        out["alpha"] = std::move(alpha);
    }
    out["model"] = to_json(itp.model);
    return out;
}

json to_json(const Mdp& m) {
    json out{{"kind", "mdp"}};
    const auto& xs = m.states();
    const auto& as = m.actions();
    out["states"] = label_array(xs);
    out["actions"] = label_array(as);
    json transition = json::array(), reward = json::array();
    for (std::size_t x = 0; x < xs.size(); ++x) {
        for (std::size_t a = 0; a < as.size(); ++a) {
            const std::size_t idx[] = {x, a};
            const auto& row = m.transition().row(idx);
            for (std::size_t x2 = 0; x2 < xs.size(); ++x2) {
                if (row[x2] != 0.0) {
                    transition.push_back({{"x", xs[x]}, {"a", as[a]}, {"x_next", xs[x2]}, {"p", row[x2]}});
                }
            }
            reward.push_back({{"x", xs[x]}, {"a", as[a]}, {"r", m.reward(x, a)}});
        }
    }
    out["transition"] = std::move(transition);
    out["reward"] = std::move(reward);
    out["discount"] = m.discount();
    return out;
}

json to_json(const ModelDocument& doc) {
    return std::visit([](const auto& body) { return to_json(body); }, doc.body);
}

std::string emit(const ModelDocument& doc) { return to_json(doc).dump(2) + "\n"; }

MachineState parse_state(const StochasticMooreMachine& machine, const std::string& text) {
    if (machine.is_tabular()) {
        MachineState m{text};
        machine.validate(m);
        return m;
    }
    Point p;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(part, &used);
        } catch (const std::exception&) {
            throw SchemaError("cannot read machine state '" + text + "'");
        }
        if (part.find_first_not_of(" \t", used) != std::string::npos) {
            throw SchemaError("cannot read machine state '" + text + "'");
        }
        p.push_back(x);
    }
    if (p.size() != machine.dynamics().dimension) {
        throw DomainError("machine state '" + text + "' has the wrong dimension");
    }
    MachineState m{std::move(p)};
    machine.validate(m);
    return m;
}

json state_json(const MachineState& m) {
    if (const auto* l = std::get_if<Label>(&m)) {
        return *l;
    }
    const auto& p = std::get<Point>(m);
    if (p.size() == 1) {
        return p[0];
    }
    return p;
}

}  // namespace agentinterp::io
