#include "camikit/kernel/manifest.hpp"

#include "camikit/error.hpp"
#include "camikit/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace camikit {

std::string_view to_string(ExtensionKind kind) noexcept {
  switch (kind) {
  case ExtensionKind::component: return "component";
  case ExtensionKind::action: return "action";
  case ExtensionKind::viewer: return "viewer";
  case ExtensionKind::application: return "application";
  }
  return "?";
}

std::optional<ExtensionKind> extension_kind_from_string(std::string_view name) noexcept {
  for (auto k : {ExtensionKind::component, ExtensionKind::action, ExtensionKind::viewer,
                 ExtensionKind::application})
    if (to_string(k) == name)
      return k;
  return std::nullopt;
}

std::string Diagnostic::str() const {
  return subject.empty() ? code : code + "(\"" + subject + "\")";
}

namespace {

bool is_lower_alnum(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_identifier(std::string_view s) noexcept {
  if (s.empty())
    return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  if (!alpha(s[0]) && s[0] != '_')
    return false;
  for (char c : s)
    if (!alpha(c) && !(c >= '0' && c <= '9') && c != '_')
      return false;
  return true;
}

bool is_suffix(std::string_view s) noexcept {
  if (s.size() < 2 || s[0] != '.' || s.back() == '.')
    return false;
  for (char c : s.substr(1)) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok)
      return false;
  }
  return true;
}

bool is_numeric_identifier(std::string_view s) noexcept {
  if (s.empty() || (s.size() > 1 && s[0] == '0'))
    return false;
  for (char c : s)
    if (c < '0' || c > '9')
      return false;
  return true;
}

bool is_dot_separated(std::string_view s) noexcept {
  if (s.empty())
    return false;
  for (auto part : text::split(s, '.')) {
    if (part.empty())
      return false;
    for (char c : part)
      if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
            c == '-'))
        return false;
  }
  return true;
}

} // namespace

bool is_reverse_dot_id(std::string_view id) noexcept {
  auto parts = text::split(id, '.');
  if (parts.size() < 2)
    return false;
  for (auto part : parts) {
    if (part.empty() || !((part[0] >= 'a' && part[0] <= 'z') || part[0] == '_'))
      return false;
    for (char c : part)
      if (!is_lower_alnum(c))
        return false;
  }
  return true;
}

bool is_semver(std::string_view version) noexcept {
  auto core = version;
  std::string_view build, pre;
  if (auto plus = core.find('+'); plus != std::string_view::npos) {
    build = core.substr(plus + 1);
    core = core.substr(0, plus);
    if (!is_dot_separated(build))
      return false;
  }
  if (auto dash = core.find('-'); dash != std::string_view::npos) {
    pre = core.substr(dash + 1);
    core = core.substr(0, dash);
    if (!is_dot_separated(pre))
      return false;
  }
  auto parts = text::split(core, '.');
  if (parts.size() != 3)
    return false;
  for (auto p : parts)
    if (!is_numeric_identifier(p))
      return false;
  return true;
}

std::vector<Diagnostic> check_manifest(const ExtensionManifest& m) {
  std::vector<Diagnostic> out;
  if (!is_reverse_dot_id(m.id))
    out.push_back({"BadId", m.id});
  if (text::trim(m.name).empty())
    out.push_back({"EmptyName", ""});
  if (!is_semver(m.version))
    out.push_back({"BadVersion", m.version});

  if (m.kind == ExtensionKind::component) {
    if (m.file_suffixes.empty())
      out.push_back({"EmptySuffixes", ""});
    std::set<std::string> seen;
    for (const auto& s : m.file_suffixes) {
      if (!is_suffix(s))
        out.push_back({"BadSuffix", s});
      else if (!seen.insert(text::to_lower(s)).second)
        out.push_back({"DuplicateEntry", s});
    }
  } else if (!m.file_suffixes.empty()) {
    out.push_back({"FieldNotAllowed", "file_suffixes"});
  }

  if (m.kind == ExtensionKind::action) {
    if (m.action_names.empty())
      out.push_back({"EmptyActionNames", ""});
    std::set<std::string> seen;
    for (const auto& a : m.action_names) {
      if (!is_identifier(a))
        out.push_back({"BadActionName", a});
      else if (!seen.insert(a).second)
        out.push_back({"DuplicateEntry", a});
    }
  } else if (!m.action_names.empty()) {
    out.push_back({"FieldNotAllowed", "action_names"});
  }
  return out;
}

namespace {

// Fills `m` from `j`, recording problems instead of throwing.
void read_manifest(const nlohmann::json& j, ExtensionManifest& m,
                   std::vector<Diagnostic>& diags) {
  static const std::set<std::string> known = {"id",           "kind",          "name",
                                              "version",      "file_suffixes", "action_names",
                                              "description"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key))
      diags.push_back({"UnknownField", key});

  auto read_string = [&](const char* key, std::string& dst, bool required) -> bool {
    auto it = j.find(key);
    if (it == j.end()) {
      if (required)
        diags.push_back({"MissingField", key});
      return false;
    }
    if (!it->is_string()) {
      diags.push_back({"WrongType", key});
      return false;
    }
    dst = it->get<std::string>();
    return true;
  };
  auto read_list = [&](const char* key, std::vector<std::string>& dst) {
    auto it = j.find(key);
    if (it == j.end())
      return;
    if (!it->is_array()) {
      diags.push_back({"WrongType", key});
      return;
    }
    for (const auto& e : *it) {
      if (!e.is_string()) {
        diags.push_back({"WrongType", key});
        return;
      }
      dst.push_back(e.get<std::string>());
    }
  };

  read_string("id", m.id, true);
  std::string kind;
  const bool has_kind = read_string("kind", kind, true);
  read_string("name", m.name, true);
  read_string("version", m.version, true);
  read_string("description", m.description, false);
  read_list("file_suffixes", m.file_suffixes);
  read_list("action_names", m.action_names);

  const std::size_t structural = diags.size();
  if (has_kind) {
    if (auto k = extension_kind_from_string(kind)) {
      m.kind = *k;
    } else {
      diags.push_back({"BadKind", kind});
      return;
    }
  } else {
    return;
  }
  for (auto& d : check_manifest(m)) {
    // A missing or mistyped field already has a diagnostic.
    const bool dup = std::any_of(diags.begin(), diags.begin() + static_cast<long>(structural),
                                 [&](const Diagnostic& e) {
                                   return (e.code == "MissingField" || e.code == "WrongType") &&
                                          ((e.subject == "id" && d.code == "BadId") ||
                                           (e.subject == "name" && d.code == "EmptyName") ||
                                           (e.subject == "version" && d.code == "BadVersion"));
                                 });
    if (!dup)
      diags.push_back(std::move(d));
  }
}

} // namespace

std::vector<Diagnostic> validate_manifest_json(std::string_view bytes) {
  auto j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded())
    return {{"InvalidJson", ""}};
  if (!j.is_object())
    return {{"NotAnObject", ""}};
  ExtensionManifest m;
  std::vector<Diagnostic> diags;
  read_manifest(j, m, diags);
  return diags;
}

ExtensionManifest parse_manifest(std::string_view bytes) {
  auto j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  std::vector<Diagnostic> diags;
  ExtensionManifest m;
  if (j.is_discarded())
    diags.push_back({"InvalidJson", ""});
  else if (!j.is_object())
    diags.push_back({"NotAnObject", ""});
  else
    read_manifest(j, m, diags);
  if (!diags.empty()) {
    std::string detail;
    for (const auto& d : diags)
      detail += (detail.empty() ? "" : ", ") + d.str();
    throw Error(ErrorCode::MalformedManifest, detail);
  }
  return m;
}

nlohmann::json to_json(const ExtensionManifest& m) {
  nlohmann::json j;
  j["id"] = m.id;
  j["kind"] = std::string(to_string(m.kind));
  j["name"] = m.name;
  j["version"] = m.version;
  j["file_suffixes"] = m.file_suffixes;
  j["action_names"] = m.action_names;
  j["description"] = m.description;
  return j;
}

} // namespace camikit
