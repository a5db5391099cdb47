#include <doctest.h>

#include "hpm/error.hpp"
#include "hpm/language.hpp"
#include "support.hpp"

using namespace hpm;

namespace {

Language lang(const char* tree, std::size_t len, std::size_t rec = 2) { return language(Tree::parse(tree), {len, rec}); }

Language traces(std::initializer_list<const char*> shorthand) {
  Language out;
  for (const char* s : shorthand) out.insert(parse_shorthand(s));
  return out;
}

}  // namespace

TEST_CASE("operator languages") {
  CHECK(lang("seq(a, xor(b, c))", 8) == traces({"a b", "a c"}));
  CHECK(lang("par(a, seq(b, c))", 8) == traces({"a b c", "b a c", "b c a"}));
  CHECK(lang("loop(a, b)", 5) == traces({"a", "a b a", "a b a b a"}));
  CHECK(lang("tau", 3) == traces({""}));
  CHECK(lang("loop(tau, a)", 2) == traces({"", "a", "a a"}));
}

TEST_CASE("named subtree languages") {
  CHECK(lang("sub:f(seq(a, sub:g(b)))", 8) == traces({"f.a f.g.b"}));
  CHECK(lang("sub:f(tau)", 8) == traces({"f"}));
  CHECK(lang("sub:f(xor(a, tau))", 8) == traces({"f", "f.a"}));
}

TEST_CASE("recursion unfolds through the nearest named subtree") {
  CHECK(lang("sub:f(xor(seq(a, rec:f), b))", 8, 2) == traces({"f.b", "f.a f.f.b", "f.a f.f.a f.f.f.b"}));
  Language g = lang("sub:f(sub:g(xor(a, rec:f, rec:g)))", 8, 1);
  CHECK(g == traces({"f.g.a", "f.g.g.a", "f.g.f.g.a"}));
  Language deeper = lang("sub:f(sub:g(xor(a, rec:f, rec:g)))", 8, 2);
  CHECK(deeper.count(parse_shorthand("f.g.g.f.g.a")));
  CHECK(deeper.size() > g.size());
  CHECK(lang("sub:f(xor(seq(a, rec:f), b))", 8, 0) == traces({"f.b"}));
}

TEST_CASE("membership") {
  Tree running = testkit::running_tree();
  CHECK(accepts(running, testkit::running_trace()));
  CHECK(accepts(Tree::silent(), ActivityTrace{}));
  CHECK_FALSE(accepts(Tree::silent(), parse_shorthand("a")));
  Tree ff = Tree::parse("sub:f(xor(rec:f, tau))");
  CHECK(accepts(ff, parse_shorthand("f.f.f")));
  CHECK(accepts(ff, parse_shorthand("f")));
  CHECK_FALSE(accepts(ff, parse_shorthand("f f")));
  CHECK_FALSE(accepts(ff, ActivityTrace{}));
  CHECK_FALSE(accepts(running, parse_shorthand("a")));
}

TEST_CASE("membership agrees with the enumerated language of the recursive example") {
  Tree ff = Tree::parse("sub:f(xor(rec:f, tau))");
  Language l = language(ff, {3, 3});
  CHECK(l == traces({"f", "f.f", "f.f.f", "f.f.f.f"}));
  for (const auto& t : l) CHECK(accepts(ff, t));
}

TEST_CASE("unbound recursion is rejected") {
  Tree bad = Tree::parse("sub:f(rec:g)");
  CHECK_THROWS_AS(language(bad, {}), Error);
  CHECK_THROWS_AS(accepts(bad, parse_shorthand("f")), Error);
  CHECK_THROWS_AS(check_recursion_bound(Tree::parse("seq(a, rec:f)")), Error);
  CHECK_NOTHROW(check_recursion_bound(testkit::running_tree()));
}

TEST_CASE("nullable and head sets") {
  CHECK(nullable(Tree::parse("xor(a, tau)")));
  CHECK_FALSE(nullable(Tree::parse("sub:f(tau)")));
  CHECK_FALSE(nullable(Tree::parse("loop(a, tau)")));
  CHECK(nullable(Tree::parse("par(tau, loop(tau, a))")));
  CHECK(start_heads(Tree::parse("seq(xor(a, tau), b)")) == std::set<Activity>{"a", "b"});
  CHECK(end_heads(Tree::parse("seq(a, loop(b, c))")) == std::set<Activity>{"b"});
  CHECK(start_heads(Tree::parse("sub:f(a)")) == std::set<Activity>{"f"});
}

TEST_CASE("acceptor prefixes and event alphabet") {
  Acceptor acc(testkit::running_tree());
  auto t = testkit::running_trace();
  for (std::size_t k = 0; k <= t.size(); ++k)
    CHECK(acc.accepts_prefix(ActivityTrace(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k))));
  CHECK_FALSE(acc.accepts_prefix(parse_shorthand("Main")));
  CHECK(acc.accepts(t));

  Acceptor rec(Tree::parse("sub:f(xor(seq(a, rec:f), b))"));
  CHECK(rec.event_alphabet(0) == std::set<Path>{{"f", "a"}, {"f", "b"}});
  CHECK(rec.event_alphabet(1).count(Path{"f", "f", "b"}));
}

TEST_CASE("membership agrees with the brute-force oracle on the examples") {
  for (const char* text : {"seq(a, xor(b, c))", "par(a, seq(b, c))", "loop(a, b)", "sub:f(xor(seq(a, rec:f), b))",
                           "sub:f(sub:g(xor(a, rec:f, rec:g)))", "loop(tau, par(a, b))"}) {
    Tree t = Tree::parse(text);
    for (const auto& tr : language(t, {6, 2})) CHECK(testkit::oracle_accepts(t, tr));
  }
}
