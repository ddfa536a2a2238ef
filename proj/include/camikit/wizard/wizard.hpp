#pragma once

#include "camikit/kernel/manifest.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace camikit::wizard {

struct SkeletonRequest {
  ExtensionKind kind = ExtensionKind::action;
  std::string name;      // letters, digits, underscore; starts with a letter
  std::filesystem::path target_dir;
  std::string id_prefix = "org.example";
  std::string language = "cpp"; // sub-directory of the template directory
  std::filesystem::path template_dir = default_template_dir();

  static std::filesystem::path default_template_dir();
};

bool is_extension_name(std::string_view name) noexcept;

/// Manifest the wizard writes for `req`; the id is the prefix followed by
/// the lower-cased name.
ExtensionManifest skeleton_manifest(const SkeletonRequest& req);

/// Creates `<target_dir>/<name>/` holding manifest.json, `<name>.cpp` and
/// `test_<name>.cpp`, and returns exactly those paths. Throws BadIdentifier,
/// TargetExists (nothing is touched) or IoFailure.
std::vector<std::filesystem::path> generate_skeleton(const SkeletonRequest& req);

/// JSON parse plus every manifest invariant.
std::vector<Diagnostic> validate_manifest(std::string_view bytes);

} // namespace camikit::wizard
