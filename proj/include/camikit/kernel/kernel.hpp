#pragma once

#include "camikit/kernel/action.hpp"
#include "camikit/kernel/manifest.hpp"
#include "camikit/kernel/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

namespace camikit {

using ComponentId = std::uint64_t;

/// What an extension brings along with its manifest. Viewer and application
/// extensions carry no dispatchable capability.
using Capabilities =
  std::variant<std::monostate, std::vector<ComponentFormat>, std::vector<Action>>;

struct Provenance {
  std::string action;
  ParamSet params;
  std::vector<ComponentId> inputs;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Read-only view of one node in the component forest.
struct ComponentInfo {
  ComponentId id = 0;
  std::string name;
  ComponentKind kind = ComponentKind::generic;
  std::optional<ComponentId> parent;
  std::vector<ComponentId> children;
  std::optional<Provenance> provenance;
  bool modified = false;
  std::shared_ptr<const Payload> payload;
};

/// The extension registry and the component store.
///
/// Mutations (register, open, apply, close, run) are serialized. Readers
/// take a shared lock only for the time needed to copy node metadata, so
/// snapshots stay available while an action runs.
class Kernel {
public:
  Kernel() = default;
  Kernel(const Kernel&) = delete;
  Kernel& operator=(const Kernel&) = delete;

  /// Returns the registry entry index. Throws DuplicateId or
  /// MalformedManifest.
  std::size_t register_extension(const ExtensionManifest& manifest, Capabilities capabilities);

  std::vector<ExtensionManifest> extensions() const;

  /// Descriptors whose applies_to contains `kind` (all when empty),
  /// sorted by name.
  std::vector<ActionDescriptor> list_actions(std::optional<ComponentKind> kind = {}) const;
  const ActionDescriptor& describe_action(const std::string& name) const;

  /// Format registered for the longest suffix of `path`, compared
  /// case-insensitively; nullptr when none matches.
  const ComponentFormat* format_for(const std::filesystem::path& path) const;

  ComponentId open_component(const std::filesystem::path& path);
  /// Adds a root node that did not come from a file.
  ComponentId add_component(std::string name, Payload payload);
  void save_component(ComponentId id, const std::filesystem::path& path) const;

  std::vector<ComponentId> apply_action(const std::string& name,
                                        const std::vector<ComponentId>& targets,
                                        const ParamSet& params);

  RunReport run_pipeline(const Pipeline& pipeline,
                         const std::map<std::string, ComponentId>& bindings);

  std::vector<ComponentInfo> component_tree() const;
  ComponentInfo component(ComponentId id) const;
  std::shared_ptr<const Payload> payload(ComponentId id) const;
  bool contains(ComponentId id) const;

  /// Removes the node and its subtree; returns the removed ids, ascending.
  std::vector<ComponentId> close_component(ComponentId id);

private:
  struct Node {
    std::string name;
    std::shared_ptr<const Payload> payload;
    std::optional<ComponentId> parent;
    std::vector<ComponentId> children;
    std::optional<Provenance> provenance;
    bool modified = false;
  };

  struct Entry {
    ExtensionManifest manifest;
    Capabilities capabilities;
  };

  const Action& find_action(const std::string& name) const;
  ComponentId insert_node(Node node);
  std::vector<ComponentId> apply_locked(const std::string& name,
                                        const std::vector<ComponentId>& targets,
                                        const ParamSet& params);
  ComponentInfo info_locked(ComponentId id, const Node& node) const;

  mutable std::shared_mutex registry_mutex_;
  std::vector<Entry> entries_;
  std::map<std::string, Action> actions_;
  std::vector<ComponentFormat> formats_;

  std::mutex mutation_mutex_;
  mutable std::shared_mutex store_mutex_;
  std::map<ComponentId, Node> nodes_;
  ComponentId next_id_ = 1;
};

} // namespace camikit
