#include "camikit/protocol/protocol.hpp"

#include "camikit/error.hpp"
#include "camikit/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <set>

namespace camikit::protocol {

const State* Machine::find(std::string_view state) const noexcept {
  for (const auto& s : states)
    if (s.name == state)
      return &s;
  return nullptr;
}

std::optional<std::string> Machine::target(std::string_view state, std::string_view event) const {
  if (const auto* s = find(state))
    for (const auto& t : s->transitions)
      if (t.event == event)
        return t.to;
  return std::nullopt;
}

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::SchemaError, path + ": " + why);
}

std::string state_path(std::size_t i) { return "/protocol/state[" + std::to_string(i) + "]"; }

void only_attributes(const formats::XmlNode& node, std::initializer_list<std::string_view> allowed,
                     const std::string& path) {
  for (const auto& [name, value] : node.attributes)
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
      schema_error(path + "@" + name, "unexpected attribute");
}

const std::string& required(const formats::XmlNode& node, std::string_view name,
                            const std::string& path) {
  const auto* v = node.attribute(name);
  if (!v || text::trim(*v).empty())
    schema_error(path, "missing attribute '" + std::string(name) + "'");
  return *v;
}

std::vector<std::string> names_in(std::string_view list) {
  std::vector<std::string> out;
  for (auto n : text::split_ws(list))
    out.emplace_back(n);
  return out;
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names)
    out += (out.empty() ? "" : " ") + n;
  return out;
}

bool only_whitespace(std::string_view s) { return text::trim(s).empty(); }

} // namespace

void check_structure(const Machine& m) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < m.states.size(); ++i) {
    const auto& s = m.states[i];
    if (s.name.empty())
      schema_error(state_path(i), "empty state name");
    if (!names.insert(s.name).second)
      schema_error(state_path(i), "duplicate state '" + s.name + "'");
  }
  if (m.initial.empty() || !names.count(m.initial))
    schema_error("/protocol@initial", "initial state '" + m.initial + "' does not exist");
  for (std::size_t i = 0; i < m.states.size(); ++i) {
    const auto& s = m.states[i];
    if (s.final && !s.transitions.empty())
      schema_error(state_path(i), "final state '" + s.name + "' has transitions");
    std::set<std::string> events;
    for (const auto& t : s.transitions) {
      if (t.event.empty())
        schema_error(state_path(i), "transition with an empty event");
      if (!events.insert(t.event).second)
        schema_error(state_path(i), "duplicate event '" + t.event + "' on '" + s.name + "'");
      if (!names.count(t.to))
        schema_error(state_path(i), "transition to unknown state '" + t.to + "'");
    }
    if (s.invoke && s.invoke->action.empty())
      schema_error(state_path(i) + "/invoke", "empty action");
  }
}

Machine parse_protocol(const formats::XmlNode& root) {
  if (root.tag != "protocol")
    schema_error("/", "expected <protocol>, got <" + root.tag + ">");
  only_attributes(root, {"name", "initial"}, "/protocol");
  if (!only_whitespace(root.text))
    schema_error("/protocol", "unexpected text");
  Machine m;
  if (const auto* name = root.attribute("name"))
    m.name = *name;
  m.initial = required(root, "initial", "/protocol");

  for (std::size_t i = 0; i < root.children.size(); ++i) {
    const auto& node = root.children[i];
    const auto path = state_path(i);
    if (node.tag != "state")
      schema_error(path, "unexpected element <" + node.tag + ">");
    only_attributes(node, {"name", "final"}, path);
    State s;
    s.name = required(node, "name", path);
    if (const auto* f = node.attribute("final")) {
      if (*f == "true" || *f == "1")
        s.final = true;
      else if (*f != "false" && *f != "0")
        schema_error(path + "@final", "expected true or false");
    }
    for (const auto& child : node.children) {
      if (child.tag == "transition") {
        only_attributes(child, {"on", "to"}, path + "/transition");
        s.transitions.push_back(
          {required(child, "on", path + "/transition"), required(child, "to", path + "/transition")});
      } else if (child.tag == "invoke") {
        const auto ipath = path + "/invoke";
        if (s.invoke)
          schema_error(ipath, "more than one <invoke>");
        only_attributes(child, {"action", "target", "output"}, ipath);
        Invocation inv;
        inv.action = required(child, "action", ipath);
        if (const auto* t = child.attribute("target"))
          inv.targets = names_in(*t);
        if (inv.targets.empty())
          schema_error(ipath, "missing attribute 'target'");
        if (const auto* o = child.attribute("output"))
          inv.outputs = names_in(*o);
        for (const auto& param : child.children) {
          if (param.tag != "param")
            schema_error(ipath, "unexpected element <" + param.tag + ">");
          only_attributes(param, {"name", "value"}, ipath + "/param");
          const auto* value = param.attribute("value");
          if (!value)
            schema_error(ipath + "/param", "missing attribute 'value'");
          inv.params.emplace_back(required(param, "name", ipath + "/param"), *value);
        }
        s.invoke = std::move(inv);
      } else {
        schema_error(path, "unexpected element <" + child.tag + ">");
      }
    }
    m.states.push_back(std::move(s));
  }
  check_structure(m);
  return m;
}

Machine parse_protocol(std::string_view xml_text) {
  return parse_protocol(formats::parse_xml(xml_text));
}

formats::XmlNode to_xml(const Machine& m) {
  formats::XmlNode root;
  root.tag = "protocol";
  if (!m.name.empty())
    root.attributes.emplace_back("name", m.name);
  root.attributes.emplace_back("initial", m.initial);
  for (const auto& s : m.states) {
    formats::XmlNode node;
    node.tag = "state";
    node.attributes.emplace_back("name", s.name);
    if (s.final)
      node.attributes.emplace_back("final", "true");
    if (s.invoke) {
      formats::XmlNode inv;
      inv.tag = "invoke";
      inv.attributes = {{"action", s.invoke->action}, {"target", join(s.invoke->targets)}};
      if (!s.invoke->outputs.empty())
        inv.attributes.emplace_back("output", join(s.invoke->outputs));
      for (const auto& [name, value] : s.invoke->params) {
        formats::XmlNode p;
        p.tag = "param";
        p.attributes = {{"name", name}, {"value", value}};
        inv.children.push_back(std::move(p));
      }
      node.children.push_back(std::move(inv));
    }
    for (const auto& t : s.transitions) {
      formats::XmlNode tr;
      tr.tag = "transition";
      tr.attributes = {{"on", t.event}, {"to", t.to}};
      node.children.push_back(std::move(tr));
    }
    root.children.push_back(std::move(node));
  }
  return root;
}

std::string Diagnostic::str() const {
  return (severity == Severity::warning ? "warning: " : "") +
         (subject.empty() ? code : code + "(\"" + subject + "\")");
}

std::vector<Diagnostic> validate(const Machine& m, const Kernel* kernel) {
  std::vector<Diagnostic> out;

  std::set<std::string> reached;
  std::deque<std::string> queue;
  if (m.find(m.initial)) {
    reached.insert(m.initial);
    queue.push_back(m.initial);
  }
  while (!queue.empty()) {
    const auto* s = m.find(queue.front());
    queue.pop_front();
    for (const auto& t : s->transitions)
      if (m.find(t.to) && reached.insert(t.to).second)
        queue.push_back(t.to);
  }

  bool final_reachable = false;
  for (const auto& s : m.states) {
    if (!reached.count(s.name))
      out.push_back({Severity::error, "Unreachable", s.name});
    else if (s.final)
      final_reachable = true;
  }
  if (!final_reachable)
    out.push_back({Severity::error, "NoReachableFinal", ""});
  for (const auto& s : m.states)
    if (!s.final && s.transitions.empty())
      out.push_back({Severity::error, "DeadEnd", s.name});
  if (kernel) {
    std::set<std::string> registered;
    for (const auto& d : kernel->list_actions())
      registered.insert(d.name);
    for (const auto& s : m.states)
      if (s.invoke && !registered.count(s.invoke->action))
        out.push_back({Severity::warning, "UnregisteredAction", s.invoke->action});
  }
  return out;
}

std::string_view to_string(EntryStatus s) noexcept {
  return s == EntryStatus::ok ? "ok" : "failed";
}

std::string_view to_string(RunStatus s) noexcept {
  switch (s) {
  case RunStatus::completed: return "completed";
  case RunStatus::script_exhausted: return "script_exhausted";
  case RunStatus::step_limit: return "step_limit";
  }
  return "?";
}

bool Handle::at_final() const {
  const auto* s = machine.find(current);
  return s && s->final;
}

std::vector<std::string> Handle::available_events() const {
  std::vector<std::string> out;
  const auto* s = machine.find(current);
  if (!s)
    return out;
  const bool failed = !trace.empty() && trace.back().status == EntryStatus::failed;
  if (failed && machine.target(current, "failure"))
    out.push_back("failure");
  for (const auto& t : s->transitions)
    if (!(failed && t.event == "failure"))
      out.push_back(t.event);
  return out;
}

namespace {

// Enters `state`, running its action if it has one.
TraceEntry enter(Kernel& kernel, Handle& h, const std::string& state, const std::string& event) {
  TraceEntry e;
  e.step = h.trace.size();
  e.state = state;
  e.event = event;
  h.current = state;
  const auto* s = h.machine.find(state);
  if (s->invoke) {
    const auto& inv = *s->invoke;
    e.action = inv.action;
    try {
      std::vector<ComponentId> targets;
      for (const auto& name : inv.targets) {
        auto it = h.context.find(name);
        if (it == h.context.end())
          throw Error(ErrorCode::UnresolvedBinding, "context has no '" + name + "'");
        targets.push_back(it->second);
      }
      const auto& schema = kernel.describe_action(inv.action).parameters;
      ParamSet params;
      for (const auto& [name, value] : inv.params) {
        auto spec = std::find_if(schema.begin(), schema.end(),
                                 [&](const ParamSpec& p) { return p.name == name; });
        if (spec == schema.end())
          throw Error(ErrorCode::ParamValidation, name + ": unknown parameter");
        params[name] = parse_param_text(*spec, value);
      }
      e.produced = kernel.apply_action(inv.action, targets, params);
      for (std::size_t i = 0; i < inv.outputs.size() && i < e.produced.size(); ++i)
        h.context[inv.outputs[i]] = e.produced[i];
    } catch (const std::exception& ex) {
      e.status = EntryStatus::failed;
      e.error = ex.what();
    }
  }
  h.trace.push_back(e);
  return e;
}

} // namespace

Handle start(Kernel& kernel, const Machine& m, std::map<std::string, ComponentId> context) {
  check_structure(m);
  std::string errors;
  for (const auto& d : validate(m, &kernel))
    if (d.severity == Severity::error)
      errors += (errors.empty() ? "" : ", ") + d.str();
  if (!errors.empty())
    throw Error(ErrorCode::ValidationFailed, errors);

  Handle h;
  h.machine = m;
  h.current = m.initial;
  h.context = std::move(context);
  if (m.find(m.initial)->invoke)
    enter(kernel, h, m.initial, "");
  return h;
}

TraceEntry step(Kernel& kernel, Handle& h, const std::string& event) {
  if (h.at_final())
    throw Error(ErrorCode::AtFinalState, h.current);
  auto to = h.machine.target(h.current, event);
  if (!to)
    throw Error(ErrorCode::NoSuchTransition, h.current + " on '" + event + "'");
  return enter(kernel, h, *to, event);
}

RunStatus run_to_completion(Kernel& kernel, Handle& h, const std::vector<std::string>& script,
                            std::size_t max_steps) {
  if (max_steps == 0)
    throw Error(ErrorCode::InvalidArgument, "max_steps must be at least 1");
  std::size_t next = 0;
  while (true) {
    if (h.at_final())
      return RunStatus::completed;
    if (next == script.size())
      return RunStatus::script_exhausted;
    if (h.trace.size() >= max_steps)
      return RunStatus::step_limit;
    step(kernel, h, script[next++]);
  }
}

nlohmann::json to_json(const TraceEntry& e) {
  nlohmann::json produced = nlohmann::json::array();
  for (auto id : e.produced)
    produced.push_back(std::to_string(id));
  nlohmann::json j{{"step", e.step},
                   {"state", e.state},
                   {"event", e.event},
                   {"action", e.action ? nlohmann::json(*e.action) : nlohmann::json()},
                   {"produced", produced},
                   {"status", to_string(e.status)}};
  if (!e.error.empty())
    j["error"] = e.error;
  return j;
}

nlohmann::json to_json(const Handle& h) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& e : h.trace)
    trace.push_back(to_json(e));
  nlohmann::json context = nlohmann::json::object();
  for (const auto& [name, id] : h.context)
    context[name] = std::to_string(id);
  return {{"protocol", h.machine.name},
          {"current_state", h.current},
          {"final", h.at_final()},
          {"available_events", h.available_events()},
          {"context", context},
          {"trace", trace}};
}

nlohmann::json to_json(const Diagnostic& d) {
  return {{"severity", d.severity == Severity::error ? "error" : "warning"},
          {"code", d.code},
          {"subject", d.subject}};
}

} // namespace camikit::protocol
