#include "camikit/formats/xml.hpp"

#include "camikit/error.hpp"

namespace camikit::formats {

const std::string* XmlNode::attribute(std::string_view name) const noexcept {
  for (const auto& [key, value] : attributes)
    if (key == name)
      return &value;
  return nullptr;
}

const XmlNode* XmlNode::child(std::string_view name) const noexcept {
  for (const auto& c : children)
    if (c.tag == name)
      return &c;
  return nullptr;
}

namespace {

constexpr std::size_t kMaxDepth = 256;

bool is_name_start(char c) noexcept {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool is_name_char(char c) noexcept {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_ws(char c) noexcept { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  XmlNode document() {
    if (starts_with("<?xml") && src_.size() > 5 && is_ws(src_[5])) {
      auto end = src_.find("?>", pos_);
      if (end == std::string_view::npos)
        eof();
      advance_to(end + 2);
    }
    skip_misc();
    if (at_end())
      eof();
    if (peek() != '<')
      throw Error(ErrorCode::XmlSyntax, "expected root element", line_);
    XmlNode root = element(0);
    skip_misc();
    if (!at_end())
      throw Error(ErrorCode::XmlSyntax, "content after the root element", line_);
    return root;
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;

  bool at_end() const noexcept { return pos_ >= src_.size(); }
  char peek() const noexcept { return src_[pos_]; }
  bool starts_with(std::string_view s) const noexcept {
    return src_.substr(pos_, s.size()) == s;
  }
  [[noreturn]] void eof() const {
    throw Error(ErrorCode::UnexpectedEof, "document ends early", line_);
  }

  void advance() noexcept {
    if (src_[pos_] == '\n')
      ++line_;
    ++pos_;
  }
  void advance_to(std::size_t target) noexcept {
    while (pos_ < target)
      advance();
  }
  void skip_ws() noexcept {
    while (!at_end() && is_ws(peek()))
      advance();
  }
  void expect(char c) {
    if (at_end())
      eof();
    if (peek() != c)
      throw Error(ErrorCode::XmlSyntax, std::string("expected '") + c + "'", line_);
    advance();
  }

  // Comments, whitespace, and rejection of the forbidden markup kinds.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<!--"))
        comment();
      else if (starts_with("<?"))
        forbidden_markup();
      else if (starts_with("<!"))
        forbidden_markup();
      else
        return;
    }
  }

  [[noreturn]] void forbidden_markup() const {
    if (starts_with("<?"))
      throw Error(ErrorCode::ForbiddenConstruct, "processing instruction", line_);
    if (starts_with("<![CDATA["))
      throw Error(ErrorCode::ForbiddenConstruct, "CDATA", line_);
    if (starts_with("<!DOCTYPE"))
      throw Error(ErrorCode::ForbiddenConstruct, "DTD", line_);
    if (src_.size() - pos_ < 9 && std::string_view("<!DOCTYPE").starts_with(src_.substr(pos_)))
      eof();
    throw Error(ErrorCode::XmlSyntax, "unknown markup declaration", line_);
  }

  void comment() {
    advance_to(pos_ + 4);
    auto end = src_.find("--", pos_);
    if (end == std::string_view::npos)
      eof();
    advance_to(end);
    if (src_.substr(pos_, 3) != "-->") {
      if (pos_ + 2 >= src_.size())
        eof();
      throw Error(ErrorCode::XmlSyntax, "'--' inside comment", line_);
    }
    advance_to(pos_ + 3);
  }

  std::string name() {
    if (at_end())
      eof();
    if (!is_name_start(peek()))
      throw Error(ErrorCode::XmlSyntax, "expected a name", line_);
    std::size_t start = pos_;
    while (!at_end() && is_name_char(peek()))
      advance();
    if (!at_end() && peek() == ':')
      throw Error(ErrorCode::ForbiddenConstruct, "namespace", line_);
    return std::string(src_.substr(start, pos_ - start));
  }

  // At '&'; appends the decoded character.
  void reference(std::string& out) {
    auto semi = src_.find(';', pos_);
    if (semi == std::string_view::npos) {
      if (src_.size() - pos_ < 8)
        eof();
      throw Error(ErrorCode::XmlSyntax, "unterminated entity reference", line_);
    }
    auto ent = src_.substr(pos_ + 1, semi - pos_ - 1);
    char decoded = 0;
    if (ent == "lt")
      decoded = '<';
    else if (ent == "gt")
      decoded = '>';
    else if (ent == "amp")
      decoded = '&';
    else if (ent == "quot")
      decoded = '"';
    else if (ent == "apos")
      decoded = '\'';
    else if (!ent.empty() && ent.front() == '#')
      throw Error(ErrorCode::ForbiddenConstruct, "character reference", line_);
    else
      throw Error(ErrorCode::ForbiddenConstruct,
                  "entity '&" + std::string(ent.substr(0, 32)) + ";'", line_);
    out += decoded;
    advance_to(semi + 1);
  }

  void attributes(XmlNode& node) {
    for (;;) {
      const bool had_ws = !at_end() && is_ws(peek());
      skip_ws();
      if (at_end())
        eof();
      if (peek() == '/' || peek() == '>')
        return;
      if (!had_ws)
        throw Error(ErrorCode::BadAttribute, "attributes must be separated by whitespace",
                    line_);
      if (!is_name_start(peek()))
        throw Error(ErrorCode::BadAttribute, "expected attribute name", line_);
      auto key = name();
      skip_ws();
      if (at_end())
        eof();
      if (peek() != '=')
        throw Error(ErrorCode::BadAttribute, "attribute '" + key + "' lacks '='", line_);
      advance();
      skip_ws();
      if (at_end())
        eof();
      const char quote = peek();
      if (quote != '"' && quote != '\'')
        throw Error(ErrorCode::BadAttribute, "attribute value must be quoted", line_);
      advance();
      std::string value;
      for (;;) {
        if (at_end())
          eof();
        const char c = peek();
        if (c == quote)
          break;
        if (c == '<')
          throw Error(ErrorCode::BadAttribute, "'<' inside attribute value", line_);
        if (c == '&') {
          reference(value);
          continue;
        }
        value += c;
        advance();
      }
      advance();
      if (node.attribute(key))
        throw Error(ErrorCode::BadAttribute, "duplicate attribute '" + key + "'", line_);
      node.attributes.emplace_back(std::move(key), std::move(value));
    }
  }

  XmlNode element(std::size_t depth) {
    if (depth >= kMaxDepth)
      throw Error(ErrorCode::XmlSyntax, "nesting too deep", line_);
    XmlNode node;
    node.line = line_;
    expect('<');
    node.tag = name();
    attributes(node);
    if (peek() == '/') {
      advance();
      expect('>');
      return node;
    }
    expect('>');

    for (;;) {
      if (at_end())
        eof();
      const char c = peek();
      if (c == '<') {
        if (starts_with("</")) {
          advance_to(pos_ + 2);
          const std::size_t close_line = line_;
          auto closing = name();
          skip_ws();
          expect('>');
          if (closing != node.tag)
            throw Error(ErrorCode::MismatchedTag,
                        "expected </" + node.tag + ">, got </" + closing + ">", close_line);
          return node;
        }
        if (starts_with("<!--")) {
          comment();
          continue;
        }
        if (starts_with("<!") || starts_with("<?"))
          forbidden_markup();
        if (pos_ + 1 >= src_.size())
          eof();
        node.children.push_back(element(depth + 1));
      } else if (c == '&') {
        reference(node.text);
      } else {
        node.text += c;
        advance();
      }
    }
  }
};

void escape(std::string_view s, bool attribute, std::string& out) {
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"':
      if (attribute)
        out += "&quot;";
      else
        out += c;
      break;
    default: out += c;
    }
  }
}

void write_node(const XmlNode& node, bool indent, std::size_t depth, std::string& out) {
  if (indent)
    out.append(depth * 2, ' ');
  out += '<';
  out += node.tag;
  for (const auto& [key, value] : node.attributes) {
    out += ' ';
    out += key;
    out += "=\"";
    escape(value, true, out);
    out += '"';
  }
  if (node.children.empty() && node.text.empty()) {
    out += "/>";
    if (indent)
      out += '\n';
    return;
  }
  out += '>';
  escape(node.text, false, out);
  const bool nested = indent && node.text.empty();
  if (nested)
    out += '\n';
  for (const auto& child : node.children) {
    write_node(child, nested, depth + 1, out);
  }
  if (nested)
    out.append(depth * 2, ' ');
  out += "</";
  out += node.tag;
  out += '>';
  if (indent)
    out += '\n';
}

} // namespace

XmlNode parse_xml(std::string_view text) { return Parser(text).document(); }

std::string write_xml(const XmlNode& root, bool indent) {
  std::string out;
  write_node(root, indent, 0, out);
  return out;
}

} // namespace camikit::formats
