#include "hpm/tree.hpp"

#include <algorithm>
#include <cctype>

namespace hpm {

bool is_operator(NodeKind k) {
  return k == NodeKind::Seq || k == NodeKind::Xor || k == NodeKind::Loop || k == NodeKind::Par;
}

Tree::Tree() : node_(std::make_shared<const Node>(Node{NodeKind::Silent, {}, {}})) {}

Tree Tree::activity(std::string name) {
  check_activity(name);
  return Tree(std::make_shared<const Node>(Node{NodeKind::Activity, std::move(name), {}}));
}

Tree Tree::silent() { return Tree(); }

Tree Tree::op(NodeKind kind, std::vector<Tree> children) {
  if (!is_operator(kind)) throw Error(ErrorCode::InvalidConfig, "not an operator kind");
  if (children.empty()) throw Error(ErrorCode::InvalidConfig, "operator without children");
  if (kind == NodeKind::Loop && children.size() < 2)
    throw Error(ErrorCode::InvalidConfig, "loop needs a body and at least one redo branch");
  return Tree(std::make_shared<const Node>(Node{kind, {}, std::move(children)}));
}

Tree Tree::sub(std::string name, Tree child) {
  check_activity(name);
  return Tree(std::make_shared<const Node>(Node{NodeKind::Sub, std::move(name), {std::move(child)}}));
}

Tree Tree::rec(std::string name) {
  check_activity(name);
  return Tree(std::make_shared<const Node>(Node{NodeKind::Rec, std::move(name), {}}));
}

std::size_t Tree::size() const {
  std::size_t n = 1;
  for (const auto& c : children()) n += c.size();
  return n;
}

std::size_t Tree::leaf_count() const {
  if (children().empty()) return 1;
  std::size_t n = 0;
  for (const auto& c : children()) n += c.leaf_count();
  return n;
}

namespace {

constexpr std::string_view kKeywords[] = {"tau", "seq", "xor", "loop", "par"};

bool needs_quotes(std::string_view name) {
  if (name.empty()) return true;
  for (auto kw : kKeywords)
    if (name == kw) return true;
  for (char c : name) {
    if (c == '(' || c == ')' || c == ',' || c == '"' || c == '\\' || c == ':' ||
        std::isspace(static_cast<unsigned char>(c)))
      return true;
  }
  return false;
}

const char* op_name(NodeKind k) {
  switch (k) {
    case NodeKind::Seq: return "seq";
    case NodeKind::Xor: return "xor";
    case NodeKind::Loop: return "loop";
    case NodeKind::Par: return "par";
    default: return "";
  }
}

void print(const Tree& t, std::string& out) {
  switch (t.kind()) {
    case NodeKind::Activity: out += quote_name(t.label()); return;
    case NodeKind::Silent: out += "tau"; return;
    case NodeKind::Rec:
      out += "rec:";
      out += quote_name(t.label());
      return;
    case NodeKind::Sub:
      out += "sub:";
      out += quote_name(t.label());
      break;
    default: out += op_name(t.kind()); break;
  }
  out += '(';
  for (std::size_t i = 0; i < t.children().size(); ++i) {
    if (i) out += ", ";
    print(t.children()[i], out);
  }
  out += ')';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Tree parse_all() {
    Tree t = parse_tree();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, what + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  // A bare word stops at delimiters; ':' ends it so "sub:" can be detected.
  std::string word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '(' || c == ')' || c == ',' || c == '"' || c == ':' || std::isspace(static_cast<unsigned char>(c)))
        break;
      ++pos_;
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string quoted() {
    expect('"');
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\') {
        ++pos_;
        if (pos_ >= s_.size()) fail("dangling escape");
      }
      out.push_back(s_[pos_++]);
    }
    if (pos_ >= s_.size()) fail("unterminated quote");
    ++pos_;
    return out;
  }

  std::string name() {
    if (peek('"')) return quoted();
    auto w = word();
    if (w.empty()) fail("expected a name");
    return w;
  }

  std::vector<Tree> child_list() {
    expect('(');
    std::vector<Tree> out;
    if (peek(')')) fail("empty child list");
    while (true) {
      out.push_back(parse_tree());
      if (peek(',')) {
        ++pos_;
        continue;
      }
      expect(')');
      return out;
    }
  }

  Tree parse_tree() {
    if (peek('"')) return Tree::activity(quoted());
    auto w = word();
    if (w.empty()) fail("expected a tree");
    if ((w == "sub" || w == "rec") && pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      auto n = name();
      if (w == "rec") return Tree::rec(n);
      auto kids = child_list();
      if (kids.size() != 1) fail("sub takes exactly one child");
      return Tree::sub(n, kids.front());
    }
    if (w == "tau") return Tree::silent();
    if (w == "seq" || w == "xor" || w == "loop" || w == "par") {
      NodeKind k = w == "seq" ? NodeKind::Seq : w == "xor" ? NodeKind::Xor : w == "loop" ? NodeKind::Loop : NodeKind::Par;
      auto kids = child_list();
      if (k == NodeKind::Loop && kids.size() < 2) fail("loop needs at least two children");
      return Tree::op(k, std::move(kids));
    }
    return Tree::activity(w);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string quote_name(std::string_view name) {
  if (!needs_quotes(name)) return std::string(name);
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string Tree::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

Tree Tree::parse(std::string_view text) { return Parser(text).parse_all(); }

Tree Tree::canonical() const {
  if (children().empty()) return *this;
  std::vector<Tree> kids;
  kids.reserve(children().size());
  for (const auto& c : children()) kids.push_back(c.canonical());
  if (kind() == NodeKind::Xor || kind() == NodeKind::Par) {
    std::vector<std::pair<std::string, Tree>> keyed;
    for (auto& k : kids) keyed.emplace_back(k.to_string(), k);
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    kids.clear();
    for (auto& [_, k] : keyed) kids.push_back(k);
  }
  if (kind() == NodeKind::Sub) return Tree::sub(label(), kids.front());
  return Tree::op(kind(), std::move(kids));
}

bool operator==(const Tree& a, const Tree& b) {
  if (a.id() == b.id()) return true;
  if (a.kind() != b.kind() || a.label() != b.label() || a.children().size() != b.children().size()) return false;
  for (std::size_t i = 0; i < a.children().size(); ++i)
    if (!(a.children()[i] == b.children()[i])) return false;
  return true;
}

bool structurally_equal(const Tree& a, const Tree& b) { return a.canonical() == b.canonical(); }

std::set<Activity> tree_alphabet(const Tree& t) {
  std::set<Activity> out;
  walk(t, [&](const Tree& n, const auto&) {
    if (n.kind() == NodeKind::Activity || n.kind() == NodeKind::Sub || n.kind() == NodeKind::Rec)
      out.insert(n.label());
  });
  return out;
}

bool contains_recursion(const Tree& t) {
  if (t.kind() == NodeKind::Rec) return true;
  return std::any_of(t.children().begin(), t.children().end(), contains_recursion);
}

namespace {
void walk_impl(const Tree& t, std::vector<std::size_t>& path,
               const std::function<void(const Tree&, const std::vector<std::size_t>&)>& visit) {
  visit(t, path);
  for (std::size_t i = 0; i < t.children().size(); ++i) {
    path.push_back(i);
    walk_impl(t.children()[i], path, visit);
    path.pop_back();
  }
}
}  // namespace

void walk(const Tree& t, const std::function<void(const Tree&, const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> path;
  walk_impl(t, path, visit);
}

std::string node_id(const std::vector<std::size_t>& path) {
  std::string out = "0";
  for (auto i : path) {
    out += '.';
    out += std::to_string(i);
  }
  return out;
}

}  // namespace hpm
