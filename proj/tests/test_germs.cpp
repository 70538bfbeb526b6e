#include <set>

#include "doctest.h"
#include "selfsim/errors.hpp"
#include "selfsim/germs.hpp"
#include "support.hpp"

using namespace selfsim;
using selfsim::testing::Fixture;
using selfsim::testing::Generator;

namespace {

Point pt(const char* s) { return Point::parse(s, 2); }
Word w(const char* s) { return parse_word(s, 2); }

// Two germs at the same base agree iff, at some depth along the base, both
// refinements have the same range prefix and the same restriction.
bool germs_agree_oracle(const AutomatonGroup& g, const Germ& a, const Germ& b, std::size_t max_depth = 48) {
  if (a.base != b.base) return false;
  std::size_t start = std::max(a.map.source.size(), b.map.source.size());
  for (std::size_t n = start; n <= max_depth; ++n) {
    Word prefix = a.base.take(n);
    Word wa(prefix.begin() + static_cast<long>(a.map.source.size()), prefix.end());
    Word wb(prefix.begin() + static_cast<long>(b.map.source.size()), prefix.end());
    Bisection ra = refine(g, a.map, wa);
    Bisection rb = refine(g, b.map, wb);
    if (ra.range == rb.range && g.equal(ra.state, rb.state)) return true;
  }
  return false;
}

const std::vector<Point>& tails() {
  static const std::vector<Point> t{pt("(0)"), pt("(1)"), pt("(01)"), pt("0(1)"), pt("1(0)"), pt("11(0)"), pt("(110)")};
  return t;
}

Germ random_germ_at(Generator& gen, const AutomatonGroup& g, const std::vector<Aut>& pool, const Point& x) {
  std::size_t n = gen.below(3);
  Word v = x.take(n);
  Word u = gen.below(2) ? v : gen.word(g.degree(), n);
  return make_germ({gen.state(pool), u, v}, x);
}

Germ random_germ(Generator& gen, const AutomatonGroup& g, const std::vector<Aut>& pool) {
  Point x = tails()[gen.below(tails().size())].prepend(gen.word(g.degree(), gen.below(3)));
  return random_germ_at(gen, g, pool, x);
}

std::vector<Aut> word_pool(const AutomatonGroup& g) {
  std::vector<Aut> pool = g.machine_states();
  for (Aut s : g.machine_states()) {
    for (Aut t : g.machine_states()) pool.push_back(g.compose(s, t));
  }
  return pool;
}

}  // namespace

TEST_CASE("apply_to_point examples") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  CHECK(apply_to_point(g, g.state("a"), pt("(0)")) == pt("1(0)"));
  CHECK(apply_to_point(g, g.identity(), pt("01(10)")) == pt("01(10)"));
  Fixture add("adding.gt");
  CHECK(apply_to_point(*add.group, add.group->state("a"), pt("(1)")) == pt("(0)"));
  CHECK(apply_to_point(*add.group, add.group->state("a"), pt("(0)")) == pt("1(0)"));
}

TEST_CASE("apply_to_point agrees with the word action") {
  for (const auto& name : selfsim::testing::fixture_names()) {
    Fixture f(name);
    const auto& g = *f.group;
    auto pool = word_pool(g);
    Generator gen(13);
    for (int i = 0; i < 200; ++i) {
      Point x(gen.word(2, gen.below(5)), gen.word(2, 1 + gen.below(4)));
      Aut s = gen.state(pool);
      Point y = apply_to_point(g, s, x);
      for (std::size_t n = 0; n <= 12; ++n) CHECK(y.take(n) == g.apply(s, x.take(n)));
    }
  }
}

TEST_CASE("point canonical form") {
  CHECK(pt("0(10)") == pt("(01)"));
  CHECK(pt("(11)") == pt("(1)"));
  CHECK(pt("1(0101)").to_string() == "(10)");
  CHECK(pt("00(1)").to_string() == "00(1)");
  CHECK(pt("(1)").to_string() == "(1)");
  CHECK_THROWS_AS(pt("01"), ParseError);
  CHECK_THROWS_AS(pt("0()"), ParseError);
}

TEST_CASE("germ source and range") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  Germ gd = make_germ(make_bisection(g.state("d"), {}, {}), pt("(1)"));
  CHECK(germ_source(gd) == pt("(1)"));
  CHECK(germ_range(g, gd) == pt("(1)"));
  Germ u = unit_germ(g, pt("01(1)"));
  CHECK(germ_range(g, u) == pt("01(1)"));
  Germ ga = make_germ(make_bisection(g.state("a"), w("0"), w("1")), pt("1(0)"));
  CHECK(germ_source(ga) == pt("1(0)"));
  CHECK(germ_range(g, ga) == pt("01(0)"));
  CHECK_THROWS_AS(make_germ(make_bisection(g.state("a"), w("0"), w("1")), pt("(0)")), DomainError);
  CHECK_THROWS_AS(make_bisection(g.state("a"), w("0"), w("")), DomainError);
}

TEST_CASE("germ_is_unit") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  Bisection d = make_bisection(g.state("d"), {}, {});
  CHECK(germ_is_unit(g, make_germ(d, pt("(0)"))));
  CHECK_FALSE(germ_is_unit(g, make_germ(d, pt("(1)"))));
  CHECK(germ_is_unit(g, unit_germ(g, pt("(01)"))));
  CHECK_FALSE(germ_is_unit(g, make_germ(make_bisection(g.identity(), w("0"), w("1")), pt("(1)"))));
}

TEST_CASE("germ_equal examples") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  Bisection b = make_bisection(g.state("b"), {}, {});
  Bisection c = make_bisection(g.state("c"), {}, {});
  CHECK(germ_equal(g, make_germ(b, pt("(0)")), make_germ(c, pt("(0)"))));
  CHECK_FALSE(germ_equal(g, make_germ(b, pt("(1)")), make_germ(c, pt("(1)"))));
  Germ gd = make_germ(make_bisection(g.state("d"), {}, {}), pt("(1)"));
  CHECK(germ_equal(g, gd, gd));
  // A refinement is the same germ.
  CHECK(germ_equal(g, gd, make_germ(refine(g, gd.map, w("11")), pt("(1)"))));
  CHECK_FALSE(germ_equal(g, gd, make_germ(b, pt("0(1)"))));
}

TEST_CASE("germ_equal agrees with the truncation oracle") {
  for (const auto& name : selfsim::testing::fixture_names()) {
    Fixture f(name);
    const auto& g = *f.group;
    auto pool = word_pool(g);
    Generator gen(19);
    int equal_pairs = 0;
    for (int i = 0; i < 600; ++i) {
      Point x = tails()[gen.below(tails().size())].prepend(gen.word(2, gen.below(2)));
      Germ a = random_germ_at(gen, g, pool, x);
      Germ b = random_germ_at(gen, g, pool, x);
      bool expected = germs_agree_oracle(g, a, b);
      equal_pairs += expected;
      CHECK(germ_equal(g, a, b) == expected);
      CHECK(germ_equal(g, a, b) == germ_equal(g, b, a));
      CHECK(germ_is_unit(g, a) == germs_agree_oracle(g, a, unit_germ(g, x)));
    }
    CHECK(equal_pairs > 0);
  }
}

TEST_CASE("groupoid axioms") {
  for (const auto& name : selfsim::testing::fixture_names()) {
    Fixture f(name);
    const auto& g = *f.group;
    auto pool = word_pool(g);
    Generator gen(29);
    for (int i = 0; i < 150; ++i) {
      Germ g1 = random_germ(gen, g, pool);
      Germ g2 = random_germ_at(gen, g, pool, germ_range(g, g1));
      Germ g3 = random_germ_at(gen, g, pool, germ_range(g, g2));
      Germ left = germ_compose(g, g3, germ_compose(g, g2, g1));
      Germ right = germ_compose(g, germ_compose(g, g3, g2), g1);
      CHECK(germ_equal(g, left, right));
      CHECK(germ_source(left) == germ_source(g1));
      CHECK(germ_range(g, left) == germ_range(g, g3));

      Germ inv = germ_invert(g, g1);
      CHECK(germ_source(inv) == germ_range(g, g1));
      CHECK(germ_range(g, inv) == germ_source(g1));
      CHECK(germ_is_unit(g, germ_compose(g, g1, inv)));
      CHECK(germ_is_unit(g, germ_compose(g, inv, g1)));
      CHECK(germ_equal(g, germ_compose(g, unit_germ(g, germ_range(g, g1)), g1), g1));
      CHECK(germ_equal(g, germ_compose(g, g1, unit_germ(g, germ_source(g1))), g1));
      CHECK(germ_equal(g, germ_invert(g, inv), g1));

      // Transitivity on a third germ at the same base.
      Germ h = random_germ_at(gen, g, pool, g1.base);
      Germ k = random_germ_at(gen, g, pool, g1.base);
      if (germ_equal(g, g1, h) && germ_equal(g, h, k)) CHECK(germ_equal(g, g1, k));
    }
  }
}

TEST_CASE("germ_compose examples") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  Germ gd = make_germ(make_bisection(g.state("d"), {}, {}), pt("(1)"));
  CHECK(germ_is_unit(g, germ_compose(g, gd, gd)));
  Germ ga = make_germ(make_bisection(g.state("a"), {}, {}), pt("(1)"));
  CHECK_THROWS_AS(germ_compose(g, ga, ga), DomainError);
}

TEST_CASE("isotropy_germs_at") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  auto at_one = isotropy_germs_at(g, g.machine_states(), pt("(1)"), 3);
  REQUIRE(at_one.size() == 3);
  std::set<std::string> labels;
  for (const auto& germ : at_one) {
    CHECK_FALSE(germ_is_unit(g, germ));
    CHECK(germ_range(g, germ) == pt("(1)"));
    labels.insert(g.label(germ.map.state));
  }
  CHECK(labels == std::set<std::string>{"b", "c", "d"});
  CHECK(isotropy_germs_at(g, g.machine_states(), pt("(0)"), 3).empty());

  Fixture add("adding.gt");
  CHECK(isotropy_germs_at(*add.group, add.group->machine_states(), pt("(1)"), 4).empty());
}

TEST_CASE("off-diagonal maps have no isotropy") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  auto pool = word_pool(g);
  Generator gen(2);
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 1 + gen.below(3);
    Word v = gen.word(2, n), u = gen.word(2, n);
    if (u == v) continue;
    Germ germ = make_germ({gen.state(pool), u, v}, tails()[gen.below(tails().size())].prepend(v));
    CHECK(germ_source(germ) != germ_range(g, germ));
  }
}

TEST_CASE("bisection_product") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  Aut a = g.state("a");
  auto aa = bisection_product(g, make_bisection(a, {}, {}), make_bisection(a, {}, {}));
  REQUIRE(aa.size() == 1);
  CHECK(g.is_identity(aa[0].state));
  CHECK(aa[0].range.empty());

  Bisection q = make_bisection(g.state("d"), w("01"), w("10"));
  auto qe = bisection_product(g, q, unit_bisection(g, w("10")));
  REQUIRE(qe.size() == 1);
  CHECK(qe[0] == q);

  CHECK(bisection_product(g, unit_bisection(g, w("0")), unit_bisection(g, w("1"))).empty());

  // Pointwise check: the product acts as the composite on every germ.
  auto pool = word_pool(g);
  Generator gen(37);
  for (int i = 0; i < 200; ++i) {
    Bisection b1 = gen.bisection(g, pool, 2);
    Bisection b2 = gen.bisection(g, pool, 2);
    auto prod = bisection_product(g, b1, b2);
    CHECK(prod.size() <= 1);
    Point x = tails()[gen.below(tails().size())].prepend(b2.source);
    Germ g2 = make_germ(b2, x);
    bool composable = germ_range(g, g2).starts_with(b1.source);
    CHECK(composable == (!prod.empty() && x.starts_with(prod[0].source)));
    if (composable) {
      Germ expected = germ_compose(g, make_germ(b1, germ_range(g, g2)), g2);
      CHECK(germ_equal(g, make_germ(prod[0], x), expected));
    }
  }
}

TEST_CASE("verify_invariance") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  auto d = verify_invariance(g, make_bisection(g.state("d"), {}, {}));
  CHECK(d.holds);
  CHECK(d.source_measure == 1);
  auto a = verify_invariance(g, make_bisection(g.state("a"), w("01"), w("10")));
  CHECK(a.holds);
  CHECK(a.range_measure == Rational(1, 4));
  Generator gen(1);
  for (int i = 0; i < 50; ++i) CHECK(verify_invariance(g, gen.bisection(g, g.machine_states(), 5)).holds);
}

TEST_CASE("essential_freeness_report") {
  for (const auto& name : selfsim::testing::fixture_names()) {
    Fixture f(name);
    FixMeasures measures(*f.group);
    auto report = essential_freeness_report(*f.group, measures);
    CHECK(report.essentially_free);
    CHECK(report.topologically_free);
    CHECK(report.states.size() == f.group->machine_states().size());
    for (const auto& s : report.states) {
      CHECK(s.certificate.holds);
      CHECK(s.interior_measure == s.total_measure);
      if (name == "adding.gt") CHECK(s.total_measure == (f.group->is_identity(s.state) ? 1 : 0));
    }
  }
  AutomatonGroup trivial(parse_machine("alphabet 2\n"));
  FixMeasures m(trivial);
  auto report = essential_freeness_report(trivial, m);
  CHECK(report.essentially_free);
  REQUIRE(report.states.size() == 1);
  CHECK(report.states[0].certificate.vacuous);
}

TEST_CASE("bisection syntax") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  Bisection b = parse_bisection(g, "d:01>10");
  CHECK(b.state == g.state("d"));
  CHECK(b.range == w("01"));
  CHECK(format_bisection(g, b) == "d:01>10");
  CHECK(format_bisection(g, parse_bisection(g, "e:>")) == "e:>");
  CHECK_THROWS_AS(parse_bisection(g, "d:0>10"), ParseError);
  CHECK_THROWS_AS(parse_bisection(g, "d01>10"), ParseError);
  CHECK(format_germ(g, make_germ(b, pt("10(1)"))) == "[d:01>10, 10(1)]");
}
