#pragma once

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace camikit {

enum class ExtensionKind { component, action, viewer, application };

std::string_view to_string(ExtensionKind kind) noexcept;
std::optional<ExtensionKind> extension_kind_from_string(std::string_view name) noexcept;

struct ExtensionManifest {
  std::string id; // reverse-dot, e.g. "org.camikit.mesh_io"
  ExtensionKind kind = ExtensionKind::action;
  std::string name;
  std::string version; // semver
  std::vector<std::string> file_suffixes; // component kind only
  std::vector<std::string> action_names;  // action kind only
  std::string description;

  friend bool operator==(const ExtensionManifest&, const ExtensionManifest&) = default;
};

/// A single manifest problem, e.g. {"MissingField", "kind"}.
struct Diagnostic {
  std::string code;
  std::string subject;

  std::string str() const;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

bool is_reverse_dot_id(std::string_view id) noexcept;
bool is_semver(std::string_view version) noexcept;

/// Invariant checks on an in-memory manifest.
std::vector<Diagnostic> check_manifest(const ExtensionManifest& manifest);

/// Parses JSON bytes and checks every invariant. Unknown keys are reported.
/// An empty result means register_extension will accept the manifest
/// (barring id or suffix collisions with already registered extensions).
std::vector<Diagnostic> validate_manifest_json(std::string_view bytes);

/// Throws MalformedManifest listing every diagnostic.
ExtensionManifest parse_manifest(std::string_view bytes);

nlohmann::json to_json(const ExtensionManifest& manifest);

} // namespace camikit
