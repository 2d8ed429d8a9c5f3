#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace depscope::xml {

// Minimal DOM for build manifests: elements, text, comments, CDATA and a
// prolog are understood; attributes are parsed but only kept as raw text.
// Namespace prefixes on element names are stripped.
struct Element {
  std::string name;
  std::string text;  // concatenated character data directly under this element
  std::vector<Element> children;

  const Element* child(std::string_view child_name) const;
  std::vector<const Element*> children_named(std::string_view child_name) const;
  // Trimmed text of a direct child, or empty optional when absent.
  std::optional<std::string> child_text(std::string_view child_name) const;
  std::string trimmed_text() const;
};

struct ParseResult {
  bool ok = false;
  std::string error;
  Element root;
};

ParseResult parse(std::string_view input);

}  // namespace depscope::xml
