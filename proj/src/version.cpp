#include "depscope/version.hpp"

#include <algorithm>
#include <cctype>
#include <memory>

namespace depscope::version {
namespace {

// ---------------------------------------------------------------------------
// Maven ComparableVersion item model. Integer values are kept as stripped
// digit strings so arbitrarily long numerics compare correctly.
// ---------------------------------------------------------------------------

struct Item;
using ItemPtr = std::unique_ptr<Item>;

struct Item {
  enum Kind { Int, Str, List } kind = Int;
  std::string num;   // Int: digits with leading zeros stripped ("" means 0)
  std::string qual;  // Str: comparable qualifier form
  std::vector<ItemPtr> list;

  bool is_null() const {
    switch (kind) {
      case Int: return num.empty() || num == "0";
      case Str: return qual == "5";  // comparableQualifier("")
      case List: return list.empty();
    }
    return true;
  }
};

std::string strip_zeros(std::string s) {
  std::size_t i = 0;
  while (i + 1 < s.size() && s[i] == '0') ++i;
  return s.substr(i);
}

int compare_numeric(const std::string& a, const std::string& b) {
  const std::string& x = a.empty() ? "0" : a;
  const std::string& y = b.empty() ? "0" : b;
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  return x.compare(y) < 0 ? -1 : (x == y ? 0 : 1);
}

// Qualifier ranking: alpha < beta < milestone < rc < snapshot < "" < sp,
// unknown qualifiers after all known ones, compared lexically.
std::string comparable_qualifier(const std::string& q) {
  static const char* kKnown[] = {"alpha", "beta", "milestone", "rc", "snapshot", "", "sp"};
  for (int i = 0; i < 7; ++i)
    if (q == kKnown[i]) return std::string(1, static_cast<char>('0' + i));
  return "7-" + q;
}

ItemPtr make_int(std::string digits) {
  auto it = std::make_unique<Item>();
  it->kind = Item::Int;
  it->num = strip_zeros(std::move(digits));
  return it;
}

ItemPtr make_str(const std::string& value, bool followed_by_digit) {
  std::string v = value;
  if (followed_by_digit && v.size() == 1) {
    switch (v[0]) {
      case 'a': v = "alpha"; break;
      case 'b': v = "beta"; break;
      case 'm': v = "milestone"; break;
      default: break;
    }
  }
  if (v == "ga" || v == "final" || v == "release") v = "";
  else if (v == "cr") v = "rc";
  auto it = std::make_unique<Item>();
  it->kind = Item::Str;
  it->qual = comparable_qualifier(v);
  return it;
}

ItemPtr parse_item(bool is_digit, const std::string& buf) {
  if (is_digit) return make_int(buf);
  return make_str(buf, false);
}

void normalize(Item& li) {
  for (auto i = static_cast<long>(li.list.size()) - 1; i >= 0; --i) {
    Item& last = *li.list[static_cast<std::size_t>(i)];
    if (last.is_null()) {
      li.list.erase(li.list.begin() + i);
    } else if (last.kind != Item::List) {
      break;
    }
  }
}

int compare_items(const Item* a, const Item* b);

int compare_to_null(const Item& a) {
  // sign of a.compareTo(null)
  switch (a.kind) {
    case Item::Int: return a.is_null() ? 0 : 1;
    case Item::Str: {
      std::string rel = comparable_qualifier("");
      int c = a.qual.compare(rel);
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Item::List:
      if (a.list.empty()) return 0;
      return compare_to_null(*a.list.front());
  }
  return 0;
}

int compare_items(const Item* a, const Item* b) {
  if (!a) return b ? -compare_to_null(*b) : 0;
  if (!b) return compare_to_null(*a);
  switch (a->kind) {
    case Item::Int:
      switch (b->kind) {
        case Item::Int: return compare_numeric(a->num, b->num);
        case Item::Str: return 1;
        case Item::List: return 1;
      }
      break;
    case Item::Str:
      switch (b->kind) {
        case Item::Int: return -1;
        case Item::Str: {
          int c = a->qual.compare(b->qual);
          return c < 0 ? -1 : (c > 0 ? 1 : 0);
        }
        case Item::List: return -1;
      }
      break;
    case Item::List:
      switch (b->kind) {
        case Item::Int: return -1;
        case Item::Str: return 1;
        case Item::List: {
          std::size_t n = std::max(a->list.size(), b->list.size());
          for (std::size_t i = 0; i < n; ++i) {
            const Item* li = i < a->list.size() ? a->list[i].get() : nullptr;
            const Item* ri = i < b->list.size() ? b->list[i].get() : nullptr;
            int c = compare_items(li, ri);
            if (c != 0) return c;
          }
          return 0;
        }
      }
      break;
  }
  return 0;
}

ItemPtr parse_comparable(const std::string& raw) {
  std::string v;
  v.reserve(raw.size());
  for (char c : raw) v.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

  auto root = std::make_unique<Item>();
  root->kind = Item::List;
  std::vector<Item*> stack{root.get()};
  Item* list = root.get();

  std::size_t start = 0;
  bool is_digit = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    char c = v[i];
    if (c == '.') {
      if (i == start) list->list.push_back(make_int("0"));
      else list->list.push_back(parse_item(is_digit, v.substr(start, i - start)));
      start = i + 1;
    } else if (c == '-') {
      if (i == start) list->list.push_back(make_int("0"));
      else list->list.push_back(parse_item(is_digit, v.substr(start, i - start)));
      start = i + 1;
      auto sub = std::make_unique<Item>();
      sub->kind = Item::List;
      Item* subp = sub.get();
      list->list.push_back(std::move(sub));
      stack.push_back(subp);
      list = subp;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      if (!is_digit && i > start) {
        list->list.push_back(make_str(v.substr(start, i - start), true));
        start = i;
        auto sub = std::make_unique<Item>();
        sub->kind = Item::List;
        Item* subp = sub.get();
        list->list.push_back(std::move(sub));
        stack.push_back(subp);
        list = subp;
      }
      is_digit = true;
    } else {
      if (is_digit && i > start) {
        list->list.push_back(parse_item(true, v.substr(start, i - start)));
        start = i;
        auto sub = std::make_unique<Item>();
        sub->kind = Item::List;
        Item* subp = sub.get();
        list->list.push_back(std::move(sub));
        stack.push_back(subp);
        list = subp;
      }
      is_digit = false;
    }
  }
  if (v.size() > start) list->list.push_back(parse_item(is_digit, v.substr(start)));
  while (!stack.empty()) {
    normalize(*stack.back());
    stack.pop_back();
  }
  return root;
}

bool is_integer_token(const std::string& t) {
  if (t.empty()) return false;
  return std::all_of(t.begin(), t.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::vector<std::string> flat_tokens(const std::string& raw) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  bool prev_digit = false;
  for (char ch : raw) {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (c == '.' || c == '-' || c == '_') {
      flush();
      prev_digit = false;
      continue;
    }
    bool d = std::isdigit(static_cast<unsigned char>(c)) != 0;
    if (!cur.empty() && d != prev_digit) flush();
    cur.push_back(c);
    prev_digit = d;
  }
  flush();
  return out;
}

SemverShape detect_shape(const std::string& raw) {
  // Count leading dot-separated integer segments; a segment may carry an
  // attached qualifier after '-' or '_', which ends the count.
  std::vector<std::string> segs;
  std::string cur;
  for (char c : raw) {
    if (c == '.') {
      segs.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  segs.push_back(cur);

  int ints = 0;
  bool stopped = false;
  for (const auto& seg : segs) {
    if (is_integer_token(seg)) {
      if (stopped) return SemverShape::Other;  // integer after a qualifier stays Other
      ++ints;
      continue;
    }
    std::size_t d = 0;
    while (d < seg.size() && std::isdigit(static_cast<unsigned char>(seg[d]))) ++d;
    if (d > 0 && d < seg.size() && (seg[d] == '-' || seg[d] == '_')) ++ints;
    stopped = true;
    break;
  }
  if (ints == 2) return SemverShape::XY;
  if (ints == 3) return SemverShape::XYZ;
  return SemverShape::Other;
}

bool qualifier_recognized(const std::string& q) {
  static const char* kKnown[] = {"alpha", "beta", "milestone", "rc",  "cr", "snapshot", "ga",
                                 "final", "release", "sp",     "a",  "b",  "m"};
  if (is_integer_token(q)) return true;
  for (const char* k : kKnown)
    if (q == k) return true;
  return false;
}

}  // namespace

ParsedVersion parse_version(const VersionString& raw) {
  ParsedVersion pv;
  pv.raw = raw.raw;
  auto tokens = flat_tokens(raw.raw);
  std::size_t i = 0;
  for (; i < tokens.size(); ++i) {
    if (!is_integer_token(tokens[i])) break;
    pv.numeric_parts.push_back(std::stoll(tokens[i].substr(0, 18)));
  }
  for (; i < tokens.size(); ++i) pv.qualifier_parts.push_back(tokens[i]);
  pv.is_snapshot = !tokens.empty() && tokens.back() == "snapshot";
  pv.semver_shape = detect_shape(raw.raw);
  return pv;
}

Ordering compare_versions(const std::string& a, const std::string& b) {
  auto ia = parse_comparable(a);
  auto ib = parse_comparable(b);
  int c = compare_items(ia.get(), ib.get());
  if (c < 0) return Ordering::Less;
  if (c > 0) return Ordering::Greater;
  return Ordering::Equal;
}

UpdateClass classify_update(const VersionString& from, const VersionString& to) {
  UpdateClass out;
  Ordering cmp = compare_versions(from, to);
  if (cmp == Ordering::Equal) return out;

  ParsedVersion a = parse_version(from);
  ParsedVersion b = parse_version(to);

  auto padded = [](const ParsedVersion& v, std::size_t n) {
    std::vector<long long> p = v.numeric_parts;
    p.resize(std::max(p.size(), n), 0);
    return p;
  };
  std::size_t n = std::max(a.numeric_parts.size(), b.numeric_parts.size());
  bool numeric_tie = padded(a, n) == padded(b, n);

  bool quals_recognized = true;
  for (const auto& q : a.qualifier_parts) quals_recognized &= qualifier_recognized(q);
  for (const auto& q : b.qualifier_parts) quals_recognized &= qualifier_recognized(q);

  if (numeric_tie && a.qualifier_parts != b.qualifier_parts && !quals_recognized) {
    out.direction = UpdateDirection::Unknown;
  } else {
    out.direction =
        cmp == Ordering::Less ? UpdateDirection::Upgrade : UpdateDirection::Downgrade;
  }

  if (a.is_snapshot != b.is_snapshot) {
    out.magnitude = b.is_snapshot ? UpdateMagnitude::ToSnapshot : UpdateMagnitude::FromSnapshot;
  } else if ((a.semver_shape == SemverShape::XY || a.semver_shape == SemverShape::XYZ) &&
             (b.semver_shape == SemverShape::XY || b.semver_shape == SemverShape::XYZ)) {
    auto xa = padded(a, 3);
    auto xb = padded(b, 3);
    if (xa[0] != xb[0]) out.magnitude = UpdateMagnitude::Major;
    else if (xa[1] != xb[1]) out.magnitude = UpdateMagnitude::Minor;
    else if (xa[2] != xb[2]) out.magnitude = UpdateMagnitude::Patch;
  }
  return out;
}

const char* to_string(UpdateDirection d) {
  switch (d) {
    case UpdateDirection::Upgrade: return "upgrade";
    case UpdateDirection::Downgrade: return "downgrade";
    case UpdateDirection::Unknown: return "unknown";
  }
  return "unknown";
}

const char* to_string(UpdateMagnitude m) {
  switch (m) {
    case UpdateMagnitude::Major: return "major";
    case UpdateMagnitude::Minor: return "minor";
    case UpdateMagnitude::Patch: return "patch";
    case UpdateMagnitude::ToSnapshot: return "to_snapshot";
    case UpdateMagnitude::FromSnapshot: return "from_snapshot";
    case UpdateMagnitude::Unknown: return "unknown";
  }
  return "unknown";
}

const char* to_string(SemverShape s) {
  switch (s) {
    case SemverShape::XY: return "xy";
    case SemverShape::XYZ: return "xyz";
    case SemverShape::Other: return "other";
  }
  return "other";
}

}  // namespace depscope::version
