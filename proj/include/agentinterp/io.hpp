#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"

#include "agentinterp/interpretation.hpp"
#include "agentinterp/machine.hpp"
#include "agentinterp/pomdp.hpp"
#include "agentinterp/solver.hpp"

// JSON documents. Probabilities are sparse triples; missing entries are zero.
// Every row must sum to 1 within kRowSumGate and is then renormalized, which
// leaves rows already summing to 1 within kRenormalizedTolerance untouched.
namespace agentinterp::io {

inline constexpr double kRowSumGate = 1e-6;
inline constexpr double kRenormalizedTolerance = 1e-12;

enum class DocumentKind { pomdp, machine, interpretation, mdp };

const char* to_string(DocumentKind kind);

/// An interpretation file: psi, an optional alpha table and the model kernel.
/// Without alpha the machine's expose function is used.
struct InterpretationDocument {
    InterpretationMap psi;
    std::optional<std::map<Label, Label>> alpha;
    WorldModel model;

    Interpretation bind(const StochasticMooreMachine& machine) const;
};

using DocumentBody = std::variant<Pomdp, StochasticMooreMachine, InterpretationDocument, Mdp>;

struct ModelDocument {
    DocumentKind kind;
    DocumentBody body;
};

/// Throws SchemaError, ProbabilityError or LabelError. The kind comes from
/// the "kind" field or, if absent, from the fields present.
ModelDocument parse(const nlohmann::json& doc);
ModelDocument load_string(std::string_view text);
ModelDocument load(const std::filesystem::path& path);

/// Typed loaders; SchemaError if the file holds another kind.
Pomdp load_pomdp(const std::filesystem::path& path);
StochasticMooreMachine load_machine(const std::filesystem::path& path);
InterpretationDocument load_interpretation(const std::filesystem::path& path);
Mdp load_mdp(const std::filesystem::path& path);

nlohmann::json to_json(const Pomdp& p);
nlohmann::json to_json(const WorldModel& model);
/// Tabular machines, or parametric ones created from the builtin registry.
nlohmann::json to_json(const StochasticMooreMachine& machine);
nlohmann::json to_json(const InterpretationDocument& itp);
nlohmann::json to_json(const Mdp& m);
nlohmann::json to_json(const ModelDocument& doc);

/// Pretty-printed JSON; doubles use the shortest text that reads back to the
/// same value.
std::string emit(const ModelDocument& doc);

/// Machine state from text: a label for tabular machines, otherwise
/// comma-separated coordinates.
MachineState parse_state(const StochasticMooreMachine& machine, const std::string& text);
nlohmann::json state_json(const MachineState& m);

}  // namespace agentinterp::io
