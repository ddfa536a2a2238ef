#pragma once

#include "camikit/kernel/params.hpp"
#include "camikit/kernel/payload.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace camikit {

struct ActionDescriptor {
  std::string name;
  std::vector<ComponentKind> applies_to;
  ParameterSchema parameters;
  std::vector<ComponentKind> outputs;
  std::string category;
  std::string description;
  std::size_t min_targets = 1;
  std::size_t max_targets = 1;
  /// Per-position kinds for multi-target actions; when empty every target
  /// is checked against applies_to.
  std::vector<ComponentKind> target_kinds;

  bool accepts(ComponentKind kind) const noexcept;
  bool accepts(std::size_t position, ComponentKind kind) const noexcept;
};

/// One input handed to an action. Payloads are shared and immutable.
struct ActionInput {
  std::string name;
  std::shared_ptr<const Payload> payload;
};

/// One produced component. `label` becomes part of the node name.
struct ActionOutput {
  std::string label;
  Payload payload;
};

using ActionFn =
  std::function<std::vector<ActionOutput>(std::span<const ActionInput>, const ParamSet&)>;

struct Action {
  ActionDescriptor descriptor;
  ActionFn run;
};

/// A file format handled by a component extension.
struct ComponentFormat {
  std::string suffix; // includes the dot, matched case-insensitively
  ComponentKind kind = ComponentKind::generic;
  std::function<Payload(std::string_view bytes, const std::filesystem::path& path)> read;
  /// Optional; formats without a writer cannot be used for saving.
  std::function<std::string(const Payload&)> write;
};

} // namespace camikit
