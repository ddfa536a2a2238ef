#include "camikit/kernel/kernel.hpp"

#include "camikit/error.hpp"
#include "camikit/text.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace camikit {

bool ActionDescriptor::accepts(ComponentKind kind) const noexcept {
  return std::find(applies_to.begin(), applies_to.end(), kind) != applies_to.end();
}

bool ActionDescriptor::accepts(std::size_t position, ComponentKind kind) const noexcept {
  if (position < target_kinds.size())
    return target_kinds[position] == kind;
  return accepts(kind);
}

namespace {

[[noreturn]] void malformed(const ExtensionManifest& m, const std::string& why) {
  throw Error(ErrorCode::MalformedManifest, m.id + ": " + why);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

std::vector<std::string> lowered(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (const auto& s : in)
    out.push_back(text::to_lower(s));
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

std::size_t Kernel::register_extension(const ExtensionManifest& manifest,
                                       Capabilities capabilities) {
  if (auto diags = check_manifest(manifest); !diags.empty()) {
    std::string detail;
    for (const auto& d : diags)
      detail += (detail.empty() ? "" : ", ") + d.str();
    malformed(manifest, detail);
  }

  std::unique_lock lock(registry_mutex_);
  for (const auto& e : entries_)
    if (e.manifest.id == manifest.id)
      throw Error(ErrorCode::DuplicateId, manifest.id);

  switch (manifest.kind) {
  case ExtensionKind::component: {
    auto* formats = std::get_if<std::vector<ComponentFormat>>(&capabilities);
    if (!formats)
      malformed(manifest, "component extensions must provide file formats");
    std::vector<std::string> provided;
    for (const auto& f : *formats) {
      if (!f.read)
        malformed(manifest, "format " + f.suffix + " has no reader");
      provided.push_back(f.suffix);
    }
    if (lowered(provided) != lowered(manifest.file_suffixes))
      malformed(manifest, "registered formats do not match file_suffixes");
    for (const auto& f : *formats)
      for (const auto& existing : formats_)
        if (text::to_lower(existing.suffix) == text::to_lower(f.suffix))
          throw Error(ErrorCode::DuplicateId, "suffix " + f.suffix + " is already registered");
    break;
  }
  case ExtensionKind::action: {
    auto* actions = std::get_if<std::vector<Action>>(&capabilities);
    if (!actions)
      malformed(manifest, "action extensions must provide actions");
    std::vector<std::string> provided;
    for (const auto& a : *actions) {
      const auto& d = a.descriptor;
      if (!a.run)
        malformed(manifest, "action " + d.name + " has no implementation");
      if (d.applies_to.empty())
        malformed(manifest, "action " + d.name + " applies to no component kind");
      if (d.outputs.empty())
        malformed(manifest, "action " + d.name + " declares no outputs");
      if (d.min_targets == 0 || d.min_targets > d.max_targets)
        malformed(manifest, "action " + d.name + " has an invalid target range");
      try {
        check_schema(d.parameters);
      } catch (const Error& e) {
        malformed(manifest, "action " + d.name + ": " + e.detail());
      }
      provided.push_back(d.name);
    }
    auto sorted_names = manifest.action_names;
    std::sort(sorted_names.begin(), sorted_names.end());
    std::sort(provided.begin(), provided.end());
    if (provided != sorted_names)
      malformed(manifest, "registered actions do not match action_names");
    for (const auto& name : provided)
      if (actions_.count(name))
        throw Error(ErrorCode::DuplicateId, "action " + name + " is already registered");
    break;
  }
  case ExtensionKind::viewer:
  case ExtensionKind::application:
    if (!std::holds_alternative<std::monostate>(capabilities))
      malformed(manifest, "viewer and application extensions carry no capabilities");
    break;
  }

  if (auto* formats = std::get_if<std::vector<ComponentFormat>>(&capabilities))
    for (const auto& f : *formats)
      formats_.push_back(f);
  if (auto* actions = std::get_if<std::vector<Action>>(&capabilities))
    for (const auto& a : *actions)
      actions_.emplace(a.descriptor.name, a);
  entries_.push_back(Entry{manifest, std::move(capabilities)});
  return entries_.size() - 1;
}

std::vector<ExtensionManifest> Kernel::extensions() const {
  std::shared_lock lock(registry_mutex_);
  std::vector<ExtensionManifest> out;
  for (const auto& e : entries_)
    out.push_back(e.manifest);
  return out;
}

std::vector<ActionDescriptor> Kernel::list_actions(std::optional<ComponentKind> kind) const {
  std::shared_lock lock(registry_mutex_);
  std::vector<ActionDescriptor> out;
  for (const auto& [name, action] : actions_)
    if (!kind || action.descriptor.accepts(*kind))
      out.push_back(action.descriptor);
  return out; // std::map keeps them name-sorted
}

const ActionDescriptor& Kernel::describe_action(const std::string& name) const {
  return find_action(name).descriptor;
}

const Action& Kernel::find_action(const std::string& name) const {
  std::shared_lock lock(registry_mutex_);
  auto it = actions_.find(name);
  if (it == actions_.end())
    throw Error(ErrorCode::UnknownAction, name);
  return it->second;
}

const ComponentFormat* Kernel::format_for(const std::filesystem::path& path) const {
  std::shared_lock lock(registry_mutex_);
  const auto filename = path.filename().string();
  const ComponentFormat* best = nullptr;
  for (const auto& f : formats_)
    if (text::ends_with_ci(filename, f.suffix) &&
        (!best || f.suffix.size() > best->suffix.size()))
      best = &f;
  return best;
}

ComponentId Kernel::insert_node(Node node) {
  std::unique_lock lock(store_mutex_);
  const ComponentId id = next_id_++;
  if (node.parent)
    nodes_.at(*node.parent).children.push_back(id);
  nodes_.emplace(id, std::move(node));
  return id;
}

ComponentId Kernel::open_component(const std::filesystem::path& path) {
  std::lock_guard mutation(mutation_mutex_);
  const auto* format = format_for(path);
  if (!format)
    throw Error(ErrorCode::NoHandlerForSuffix, path.filename().string());
  auto bytes = read_file(path);
  auto payload = format->read(bytes, path);
  if (kind_of(payload) != format->kind)
    throw Error(ErrorCode::ActionFailure, "reader for " + format->suffix +
                                            " produced a " +
                                            std::string(to_string(kind_of(payload))));
  Node node;
  node.name = path.filename().string();
  node.payload = std::make_shared<const Payload>(std::move(payload));
  return insert_node(std::move(node));
}

ComponentId Kernel::add_component(std::string name, Payload payload) {
  std::lock_guard mutation(mutation_mutex_);
  Node node;
  node.name = std::move(name);
  node.payload = std::make_shared<const Payload>(std::move(payload));
  return insert_node(std::move(node));
}

void Kernel::save_component(ComponentId id, const std::filesystem::path& path) const {
  auto data = payload(id);
  const auto* format = format_for(path);
  if (!format || !format->write)
    throw Error(ErrorCode::NoHandlerForSuffix, "no writer for " + path.filename().string());
  if (format->kind != kind_of(*data))
    throw Error(ErrorCode::KindMismatch, format->suffix + " cannot store a " +
                                           std::string(to_string(kind_of(*data))));
  const auto bytes = format->write(*data);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

std::vector<ComponentId> Kernel::apply_action(const std::string& name,
                                              const std::vector<ComponentId>& targets,
                                              const ParamSet& params) {
  std::lock_guard mutation(mutation_mutex_);
  return apply_locked(name, targets, params);
}

std::vector<ComponentId> Kernel::apply_locked(const std::string& name,
                                              const std::vector<ComponentId>& targets,
                                              const ParamSet& params) {
  const Action& action = find_action(name);
  const auto& desc = action.descriptor;
  if (targets.size() < desc.min_targets || targets.size() > desc.max_targets)
    throw Error(ErrorCode::InvalidArgument,
                name + " takes " + std::to_string(desc.min_targets) +
                  (desc.max_targets != desc.min_targets
                     ? ".." + std::to_string(desc.max_targets)
                     : std::string()) +
                  " target(s), got " + std::to_string(targets.size()));

  std::vector<ActionInput> inputs;
  {
    std::shared_lock lock(store_mutex_);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const auto id = targets[t];
      auto it = nodes_.find(id);
      if (it == nodes_.end())
        throw Error(ErrorCode::UnknownId, std::to_string(id));
      const auto kind = kind_of(*it->second.payload);
      if (!desc.accepts(t, kind))
        throw Error(ErrorCode::KindMismatch,
                    name + " does not apply to " + std::string(to_string(kind)) +
                      " component " + std::to_string(id));
      inputs.push_back(ActionInput{it->second.name, it->second.payload});
    }
  }

  auto validated = validate_params(desc.parameters, params);

  std::vector<ActionOutput> outputs;
  try {
    outputs = action.run(inputs, validated);
  } catch (const Error& e) {
    throw Error(ErrorCode::ActionFailure, name + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ActionFailure, name + ": " + e.what());
  }
  for (const auto& out : outputs) {
    const auto kind = kind_of(out.payload);
    if (std::find(desc.outputs.begin(), desc.outputs.end(), kind) == desc.outputs.end())
      throw Error(ErrorCode::ActionFailure,
                  name + " produced an undeclared " + std::string(to_string(kind)));
  }

  std::vector<ComponentId> produced;
  for (auto& out : outputs) {
    Node node;
    node.name = inputs.front().name + "/" + (out.label.empty() ? name : out.label);
    node.payload = std::make_shared<const Payload>(std::move(out.payload));
    node.parent = targets.front();
    node.provenance = Provenance{name, validated, targets};
    produced.push_back(insert_node(std::move(node)));
  }
  return produced;
}

RunReport Kernel::run_pipeline(const Pipeline& pipeline,
                               const std::map<std::string, ComponentId>& bindings) {
  std::lock_guard mutation(mutation_mutex_);

  std::set<std::string> available;
  {
    std::shared_lock lock(store_mutex_);
    for (const auto& [name, id] : bindings) {
      if (!nodes_.count(id))
        throw Error(ErrorCode::UnresolvedBinding,
                    "binding '" + name + "' refers to unknown component " + std::to_string(id));
      available.insert(name);
    }
  }
  for (std::size_t i = 0; i < pipeline.steps.size(); ++i) {
    const auto& step = pipeline.steps[i];
    find_action(step.action);
    if (step.inputs.empty())
      throw Error(ErrorCode::MalformedPipeline, "step " + std::to_string(i) + " has no inputs");
    for (const auto& in : step.inputs)
      if (!available.count(in))
        throw Error(ErrorCode::UnresolvedBinding,
                    "step " + std::to_string(i) + " input '" + in + "' is not bound");
    for (const auto& out : step.outputs)
      available.insert(out);
  }

  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0).count();
  };

  RunReport report;
  report.pipeline = pipeline.name;
  auto names = bindings;
  const auto run_start = clock::now();
  bool halted = false;
  for (const auto& step : pipeline.steps) {
    StepReport sr;
    sr.action = step.action;
    if (halted) {
      sr.status = StepStatus::skipped;
      report.steps.push_back(std::move(sr));
      continue;
    }
    const auto t0 = clock::now();
    try {
      std::vector<ComponentId> targets;
      for (const auto& in : step.inputs)
        targets.push_back(names.at(in));
      const auto params = params_from_json(find_action(step.action).descriptor.parameters,
                                           step.params);
      sr.produced = apply_locked(step.action, targets, params);
      if (sr.produced.size() < step.outputs.size())
        throw Error(ErrorCode::ActionFailure,
                    step.action + " produced " + std::to_string(sr.produced.size()) +
                      " outputs, step names " + std::to_string(step.outputs.size()));
      for (std::size_t o = 0; o < step.outputs.size(); ++o)
        names[step.outputs[o]] = sr.produced[o];
      sr.status = StepStatus::ok;
    } catch (const std::exception& e) {
      sr.status = StepStatus::failed;
      sr.error = e.what();
      halted = true;
    }
    sr.duration_ms = ms_since(t0);
    report.steps.push_back(std::move(sr));
  }
  report.total_duration_ms = ms_since(run_start);
  return report;
}

ComponentInfo Kernel::info_locked(ComponentId id, const Node& node) const {
  ComponentInfo info;
  info.id = id;
  info.name = node.name;
  info.kind = kind_of(*node.payload);
  info.parent = node.parent;
  info.children = node.children;
  info.provenance = node.provenance;
  info.modified = node.modified;
  info.payload = node.payload;
  return info;
}

std::vector<ComponentInfo> Kernel::component_tree() const {
  std::shared_lock lock(store_mutex_);
  std::vector<ComponentInfo> out;
  out.reserve(nodes_.size());
  for (const auto& [id, node] : nodes_)
    out.push_back(info_locked(id, node));
  return out;
}

ComponentInfo Kernel::component(ComponentId id) const {
  std::shared_lock lock(store_mutex_);
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw Error(ErrorCode::UnknownId, std::to_string(id));
  return info_locked(id, it->second);
}

std::shared_ptr<const Payload> Kernel::payload(ComponentId id) const {
  std::shared_lock lock(store_mutex_);
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw Error(ErrorCode::UnknownId, std::to_string(id));
  return it->second.payload;
}

bool Kernel::contains(ComponentId id) const {
  std::shared_lock lock(store_mutex_);
  return nodes_.count(id) != 0;
}

std::vector<ComponentId> Kernel::close_component(ComponentId id) {
  std::lock_guard mutation(mutation_mutex_);
  std::unique_lock lock(store_mutex_);
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw Error(ErrorCode::UnknownId, std::to_string(id));
  if (it->second.parent) {
    auto& siblings = nodes_.at(*it->second.parent).children;
    siblings.erase(std::remove(siblings.begin(), siblings.end(), id), siblings.end());
  }
  std::vector<ComponentId> removed;
  std::vector<ComponentId> stack{id};
  while (!stack.empty()) {
    auto current = stack.back();
    stack.pop_back();
    auto node = nodes_.find(current);
    removed.push_back(current);
    stack.insert(stack.end(), node->second.children.begin(), node->second.children.end());
    nodes_.erase(node);
  }
  std::sort(removed.begin(), removed.end());
  return removed;
}

} // namespace camikit
