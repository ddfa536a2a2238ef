#include "camikit/wizard/wizard.hpp"

#include "camikit/error.hpp"
#include "camikit/text.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#ifndef CAMIKIT_TEMPLATE_DIR
#define CAMIKIT_TEMPLATE_DIR "templates"
#endif

namespace camikit::wizard {

std::filesystem::path SkeletonRequest::default_template_dir() {
  if (const char* env = std::getenv("CAMIKIT_TEMPLATE_DIR"))
    return env;
  return CAMIKIT_TEMPLATE_DIR;
}

bool is_extension_name(std::string_view name) noexcept {
  if (name.empty())
    return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  if (!alpha(name[0]))
    return false;
  for (char c : name)
    if (!alpha(c) && !(c >= '0' && c <= '9') && c != '_')
      return false;
  return true;
}

ExtensionManifest skeleton_manifest(const SkeletonRequest& req) {
  ExtensionManifest m;
  m.id = req.id_prefix + "." + text::to_lower(req.name);
  m.kind = req.kind;
  m.name = req.name;
  m.version = "0.1.0";
  if (req.kind == ExtensionKind::component)
    m.file_suffixes = {"." + text::to_lower(req.name)};
  if (req.kind == ExtensionKind::action)
    m.action_names = {req.name};
  m.description = "TODO: describe " + req.name;
  return m;
}

namespace {

std::string read_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::IoFailure, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

std::string substitute(std::string text, const std::vector<std::pair<std::string, std::string>>& vars) {
  for (const auto& [key, value] : vars) {
    const std::string token = "@" + key + "@";
    for (auto pos = text.find(token); pos != std::string::npos;
         pos = text.find(token, pos + value.size()))
      text.replace(pos, token.size(), value);
  }
  return text;
}

// "x" mode fails if the file already exists.
void create_file(const std::filesystem::path& path, const std::string& bytes) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "wbx"), &std::fclose);
  if (!f || std::fwrite(bytes.data(), 1, bytes.size(), f.get()) != bytes.size())
    throw Error(ErrorCode::IoFailure, path.string());
}

} // namespace

std::vector<std::filesystem::path> generate_skeleton(const SkeletonRequest& req) {
  namespace fs = std::filesystem;
  if (!is_extension_name(req.name))
    throw Error(ErrorCode::BadIdentifier, req.name);
  if (!is_reverse_dot_id(req.id_prefix + "." + text::to_lower(req.name)))
    throw Error(ErrorCode::BadIdentifier, "id prefix '" + req.id_prefix + "'");
  std::error_code ec;
  if (!fs::is_directory(req.target_dir, ec))
    throw Error(ErrorCode::IoFailure, req.target_dir.string() + " is not a directory");

  // every template is read before anything is created
  const auto dir = req.template_dir / req.language;
  const auto source_template =
    read_template(dir / ("source_" + std::string(to_string(req.kind)) + ".cpp.in"));
  const auto test_template = read_template(dir / "test.cpp.in");

  const auto manifest = skeleton_manifest(req);
  const std::vector<std::pair<std::string, std::string>> vars = {
    {"NAME", req.name},
    {"ID", manifest.id},
    {"KIND", std::string(to_string(req.kind))},
    {"SUFFIX", manifest.file_suffixes.empty() ? "" : manifest.file_suffixes.front()}};

  const auto root = req.target_dir / req.name;
  if (fs::exists(root, ec) || !fs::create_directory(root, ec)) {
    if (fs::exists(root))
      throw Error(ErrorCode::TargetExists, root.string());
    throw Error(ErrorCode::IoFailure, root.string());
  }

  const std::vector<fs::path> paths = {root / "manifest.json", root / (req.name + ".cpp"),
                                       root / ("test_" + req.name + ".cpp")};
  create_file(paths[0], to_json(manifest).dump(2) + "\n");
  create_file(paths[1], substitute(source_template, vars));
  create_file(paths[2], substitute(test_template, vars));
  return paths;
}

std::vector<Diagnostic> validate_manifest(std::string_view bytes) {
  return validate_manifest_json(bytes);
}

} // namespace camikit::wizard
