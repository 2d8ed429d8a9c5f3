#include "depscope/xml.hpp"

#include <cctype>

namespace depscope::xml {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string strip_prefix(std::string name) {
  auto pos = name.find(':');
  return pos == std::string::npos ? name : name.substr(pos + 1);
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '&') {
      auto semi = s.find(';', i);
      if (semi != std::string_view::npos && semi - i <= 8) {
        std::string_view ent = s.substr(i + 1, semi - i - 1);
        if (ent == "amp") out += '&';
        else if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "quot") out += '"';
        else if (ent == "apos") out += '\'';
        else if (!ent.empty() && ent[0] == '#') {
          int code = 0;
          if (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
            code = static_cast<int>(std::strtol(std::string(ent.substr(2)).c_str(), nullptr, 16));
          else
            code = static_cast<int>(std::strtol(std::string(ent.substr(1)).c_str(), nullptr, 10));
          if (code > 0 && code < 128) out += static_cast<char>(code);
        } else {
          out += std::string(s.substr(i, semi - i + 1));
        }
        i = semi + 1;
        continue;
      }
    }
    out += s[i++];
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view in) : in_(in) {}

  ParseResult run() {
    ParseResult res;
    skip_misc();
    if (pos_ >= in_.size() || in_[pos_] != '<') {
      res.error = "no root element";
      return res;
    }
    if (!parse_element(res.root)) {
      res.error = error_.empty() ? "malformed xml" : error_;
      return res;
    }
    res.ok = true;
    return res;
  }

 private:
  void skip_ws() {
    while (pos_ < in_.size() && std::isspace(static_cast<unsigned char>(in_[pos_]))) ++pos_;
  }

  bool starts_with(std::string_view p) const { return in_.substr(pos_, p.size()) == p; }

  // Skips prolog, doctype, comments and processing instructions.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<?")) {
        auto e = in_.find("?>", pos_);
        pos_ = e == std::string_view::npos ? in_.size() : e + 2;
      } else if (starts_with("<!--")) {
        auto e = in_.find("-->", pos_);
        pos_ = e == std::string_view::npos ? in_.size() : e + 3;
      } else if (starts_with("<!DOCTYPE") || starts_with("<!doctype")) {
        auto e = in_.find('>', pos_);
        pos_ = e == std::string_view::npos ? in_.size() : e + 1;
      } else {
        return;
      }
    }
  }

  bool parse_element(Element& out) {
    if (pos_ >= in_.size() || in_[pos_] != '<') return fail("expected '<'");
    ++pos_;
    std::string name;
    while (pos_ < in_.size() && !std::isspace(static_cast<unsigned char>(in_[pos_])) &&
           in_[pos_] != '>' && in_[pos_] != '/') {
      name += in_[pos_++];
    }
    if (name.empty()) return fail("empty element name");
    out.name = strip_prefix(name);

    // attributes (kept only to advance the cursor safely past quoted values)
    for (;;) {
      skip_ws();
      if (pos_ >= in_.size()) return fail("unterminated tag");
      if (in_[pos_] == '/') {
        ++pos_;
        if (pos_ >= in_.size() || in_[pos_] != '>') return fail("malformed empty tag");
        ++pos_;
        return true;
      }
      if (in_[pos_] == '>') {
        ++pos_;
        break;
      }
      // attr name
      while (pos_ < in_.size() && in_[pos_] != '=' && in_[pos_] != '>' && in_[pos_] != '/' &&
             !std::isspace(static_cast<unsigned char>(in_[pos_])))
        ++pos_;
      skip_ws();
      if (pos_ < in_.size() && in_[pos_] == '=') {
        ++pos_;
        skip_ws();
        if (pos_ < in_.size() && (in_[pos_] == '"' || in_[pos_] == '\'')) {
          char q = in_[pos_++];
          auto e = in_.find(q, pos_);
          if (e == std::string_view::npos) return fail("unterminated attribute");
          pos_ = e + 1;
        }
      }
    }

    // content
    std::string text;
    for (;;) {
      if (pos_ >= in_.size()) return fail("unterminated element <" + out.name + ">");
      if (in_[pos_] == '<') {
        if (starts_with("<!--")) {
          auto e = in_.find("-->", pos_);
          if (e == std::string_view::npos) return fail("unterminated comment");
          pos_ = e + 3;
        } else if (starts_with("<![CDATA[")) {
          auto e = in_.find("]]>", pos_);
          if (e == std::string_view::npos) return fail("unterminated CDATA");
          text += std::string(in_.substr(pos_ + 9, e - pos_ - 9));
          pos_ = e + 3;
        } else if (starts_with("</")) {
          auto e = in_.find('>', pos_);
          if (e == std::string_view::npos) return fail("unterminated close tag");
          std::string close = strip_prefix(trim(in_.substr(pos_ + 2, e - pos_ - 2)));
          if (close != out.name) return fail("mismatched </" + close + "> for <" + out.name + ">");
          pos_ = e + 1;
          out.text = decode_entities(text);
          return true;
        } else if (starts_with("<?")) {
          auto e = in_.find("?>", pos_);
          if (e == std::string_view::npos) return fail("unterminated pi");
          pos_ = e + 2;
        } else {
          Element child;
          if (!parse_element(child)) return false;
          out.children.push_back(std::move(child));
        }
      } else {
        text += in_[pos_++];
      }
    }
  }

  bool fail(std::string msg) {
    if (error_.empty()) error_ = std::move(msg);
    return false;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::string error_;
};

}  // namespace

const Element* Element::child(std::string_view child_name) const {
  for (const auto& c : children)
    if (c.name == child_name) return &c;
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view child_name) const {
  std::vector<const Element*> out;
  for (const auto& c : children)
    if (c.name == child_name) out.push_back(&c);
  return out;
}

std::optional<std::string> Element::child_text(std::string_view child_name) const {
  const Element* c = child(child_name);
  if (!c) return std::nullopt;
  return c->trimmed_text();
}

std::string Element::trimmed_text() const { return trim(text); }

ParseResult parse(std::string_view input) { return Parser(input).run(); }

}  // namespace depscope::xml
