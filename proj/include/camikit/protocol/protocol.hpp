#pragma once

#include "camikit/formats/xml.hpp"
#include "camikit/kernel/kernel.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace camikit::protocol {

/// Action run on entering a state. Parameter values stay textual until the
/// action's schema types them at execution time.
struct Invocation {
  std::string action;
  std::vector<std::string> targets; // context names
  std::vector<std::string> outputs; // context names for produced ids
  std::vector<std::pair<std::string, std::string>> params;

  friend bool operator==(const Invocation&, const Invocation&) = default;
};

struct Transition {
  std::string event;
  std::string to;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// A state without an invocation is a manual gate.
struct State {
  std::string name;
  std::optional<Invocation> invoke;
  std::vector<Transition> transitions;
  bool final = false;

  friend bool operator==(const State&, const State&) = default;
};

struct Machine {
  std::string name;
  std::string initial;
  std::vector<State> states;

  const State* find(std::string_view state) const noexcept;
  /// Destination of `event` from `state`, if any.
  std::optional<std::string> target(std::string_view state, std::string_view event) const;

  friend bool operator==(const Machine&, const Machine&) = default;
};

/// Throws SchemaError on duplicate states or events, a missing initial
/// state, transitions to unknown states, or final states with transitions.
void check_structure(const Machine& m);

Machine parse_protocol(const formats::XmlNode& root);
Machine parse_protocol(std::string_view xml_text);
formats::XmlNode to_xml(const Machine& m);

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string code; // Unreachable, NoReachableFinal, DeadEnd, UnregisteredAction
  std::string subject;

  std::string str() const;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Static checks. Action names are looked up only when `kernel` is given.
std::vector<Diagnostic> validate(const Machine& m, const Kernel* kernel = nullptr);

enum class EntryStatus { ok, failed };

std::string_view to_string(EntryStatus s) noexcept;

struct TraceEntry {
  std::size_t step = 0;
  std::string state; // state entered
  std::string event; // empty for the entry recorded by start()
  std::optional<std::string> action;
  std::vector<ComponentId> produced;
  EntryStatus status = EntryStatus::ok;
  std::string error;
};

struct Handle {
  Machine machine;
  std::string current;
  std::map<std::string, ComponentId> context;
  std::vector<TraceEntry> trace;

  bool at_final() const;
  /// Event labels leaving the current state. After a failed action the
  /// "failure" label is listed first when the state defines it.
  std::vector<std::string> available_events() const;
};

/// Throws ValidationFailed listing error-level diagnostics. Runs the
/// initial state's action, if any.
Handle start(Kernel& kernel, const Machine& m, std::map<std::string, ComponentId> context);

/// Throws AtFinalState or NoSuchTransition. Action failures are recorded in
/// the returned entry, not thrown.
TraceEntry step(Kernel& kernel, Handle& h, const std::string& event);

enum class RunStatus { completed, script_exhausted, step_limit };

std::string_view to_string(RunStatus s) noexcept;

/// Steps through `script` until a final state, the end of the script, or
/// the trace holding `max_steps` entries. Throws InvalidArgument when
/// max_steps is zero.
RunStatus run_to_completion(Kernel& kernel, Handle& h, const std::vector<std::string>& script,
                            std::size_t max_steps);

nlohmann::json to_json(const TraceEntry& e);
nlohmann::json to_json(const Handle& h);
nlohmann::json to_json(const Diagnostic& d);

} // namespace camikit::protocol
