#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace camikit::formats {

/// Element of the restricted XML subset. `text` is the concatenation of all
/// character data directly inside the element, in document order.
struct XmlNode {
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlNode> children;
  std::string text;
  /// Line of the start tag; informational, ignored by operator==.
  std::size_t line = 0;

  const std::string* attribute(std::string_view name) const noexcept;
  const XmlNode* child(std::string_view tag) const noexcept;

  friend bool operator==(const XmlNode& a, const XmlNode& b) {
    return a.tag == b.tag && a.attributes == b.attributes && a.children == b.children &&
           a.text == b.text;
  }
};

/// Recursive-descent parser over a deliberately small subset: optional
/// `<?xml ...?>` prolog, elements, quoted attributes, character data,
/// comments and the five predefined entities. DTDs, CDATA sections,
/// processing instructions, namespaces and numeric character references
/// are rejected with ForbiddenConstruct.
XmlNode parse_xml(std::string_view text);

/// Compact serialization; parse_xml(write_xml(n)) == n. With `indent`,
/// elements without text are laid out one per line, which adds whitespace
/// text to their parents on re-parse.
std::string write_xml(const XmlNode& root, bool indent = false);

} // namespace camikit::formats
