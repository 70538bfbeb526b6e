#include <set>
#include <thread>

#include "doctest.h"
#include "selfsim/errors.hpp"
#include "selfsim/group.hpp"
#include "selfsim/mealy.hpp"
#include "support.hpp"

using namespace selfsim;
using selfsim::testing::Fixture;
using selfsim::testing::Generator;
using selfsim::testing::product_machine;
using selfsim::testing::random_machine;

namespace {

Word w(const char* s) { return parse_word(s, 2); }

}  // namespace

TEST_CASE("parse_machine reads the bundled Grigorchuk file") {
  Machine m = selfsim::testing::bundled("grigorchuk.gt");
  CHECK(m.degree() == 2);
  REQUIRE(m.size() == 5);
  for (const char* name : {"a", "b", "c", "d", "e"}) CHECK(m.find(name).has_value());
  CHECK(m.identity() == m.find("e"));
  CHECK(m.state(*m.find("d")).next[1] == *m.find("b"));
}

TEST_CASE("parse_machine errors") {
  CHECK_THROWS_AS(parse_machine("alphabet 2\nstate a perm 0 0 to e e\n"), ParseError);
  CHECK_THROWS_AS(parse_machine("alphabet 2\nstate a perm 1 0 to e z\n"), ParseError);
  CHECK_THROWS_AS(parse_machine("alphabet 2\nstate a perm 1 0 to e\n"), ParseError);
  CHECK_THROWS_AS(parse_machine("state a perm 1 0 to e e\n"), ParseError);
  CHECK_THROWS_AS(parse_machine("alphabet 1\n"), ParseError);
  CHECK_THROWS_AS(parse_machine("alphabet 2\nstate a perm 1 0 to e e\nstate a perm 0 1 to e e\n"), ParseError);
  CHECK_THROWS_AS(parse_machine("alphabet 2\nstate e perm 1 0 to e e\n"), ParseError);
  CHECK_THROWS_AS(parse_machine("alphabet 2\nfrobnicate\n"), ParseError);
}

TEST_CASE("parse_machine synthesizes the identity") {
  Machine m = parse_machine("alphabet 2\nstate a perm 1 0 to e a   # odometer\n");
  REQUIRE(m.size() == 2);
  REQUIRE(m.identity().has_value());
  CHECK(m.state(*m.identity()).name == "e");
}

TEST_CASE("format_machine round-trips") {
  for (const auto& name : selfsim::testing::fixture_names()) {
    Machine m = selfsim::testing::bundled(name);
    Machine again = parse_machine(format_machine(m));
    CHECK(format_machine(again) == format_machine(m));
  }
}

TEST_CASE("apply_word and restrict") {
  Fixture grig("grigorchuk.gt");
  Fixture add("adding.gt");
  const auto& g = *grig.group;
  CHECK(g.apply(g.state("a"), w("01")) == w("11"));
  CHECK(g.apply(g.state("b"), w("")) == w(""));
  CHECK(add.group->apply(add.group->state("a"), w("111")) == w("000"));

  CHECK(g.restrict(g.state("d"), w("1")) == g.state("b"));
  CHECK(g.restrict(g.state("c"), w("")) == g.state("c"));
  CHECK(g.restrict(g.state("d"), w("111")) == g.state("d"));
}

TEST_CASE("compose, invert, equal") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  Aut a = g.state("a"), b = g.state("b"), c = g.state("c"), d = g.state("d"), e = g.identity();
  CHECK(g.is_identity(g.compose(a, a)));
  CHECK(g.equal(g.compose(a, e), a));
  CHECK(g.equal(g.compose(b, c), d));
  CHECK(g.is_identity(g.compose(g.compose(b, c), d)));
  CHECK_FALSE(g.is_identity(a));
  CHECK(g.equal(b, b));
  CHECK_FALSE(g.equal(b, c));
  CHECK(g.invert(e) == e);
  CHECK(g.equal(g.invert(d), d));

  Fixture add("adding.gt");
  const auto& ga = *add.group;
  CHECK(ga.apply(ga.invert(ga.state("a")), w("000")) == w("111"));
}

TEST_CASE("state_closure") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  auto cl = g.closure(g.state("d"));
  std::set<std::string> names;
  for (Aut s : cl) names.insert(g.label(s));
  CHECK(names == std::set<std::string>{"a", "b", "c", "d", "e"});
  CHECK(g.closure(g.identity()).size() == 1);

  Fixture add("adding.gt");
  CHECK(add.group->closure(add.group->state("a")).size() == 2);
}

TEST_CASE("minimize") {
  SUBCASE("duplicate states collapse") {
    Machine m = parse_machine("alphabet 2\nstate a perm 1 0 to e e\nstate a2 perm 1 0 to e e\nstate b perm 0 1 to a a2\n");
    auto mz = minimize(m);
    CHECK(mz.machine.size() == 3);
    CHECK(mz.mapping[*m.find("a")] == mz.mapping[*m.find("a2")]);
    CHECK(mz.machine.identity().has_value());
  }
  SUBCASE("Grigorchuk is already minimal") {
    Machine m = selfsim::testing::bundled("grigorchuk.gt");
    auto mz = minimize(m);
    CHECK(mz.machine.size() == 5);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(mz.mapping[i] == i);
  }
  SUBCASE("product machine of Grigorchuk a with itself") {
    Machine m = selfsim::testing::bundled("grigorchuk.gt");
    Machine prod = product_machine(m, *m.find("a"), *m.find("a"));
    CHECK(minimize(prod).machine.size() == 1);
  }
  SUBCASE("product machine of the odometer with itself is not trivial") {
    Machine m = selfsim::testing::bundled("adding.gt");
    Machine prod = product_machine(m, *m.find("a"), *m.find("a"));
    CHECK(minimize(prod).machine.size() == 3);  // a^2, a, e
  }
  SUBCASE("idempotence on random machines") {
    Generator gen(11);
    for (int i = 0; i < 50; ++i) {
      Machine m = random_machine(gen, 2 + gen.below(2), 1 + gen.below(5));
      auto once = minimize(m);
      auto twice = minimize(once.machine);
      for (std::size_t q = 0; q < once.machine.size(); ++q) CHECK(twice.mapping[q] == q);
    }
  }
}

TEST_CASE("distinguishing_depth") {
  CHECK(distinguishing_depth(selfsim::testing::bundled("adding.gt")) == 1);
  // d fixes every word of length 2: d(1x) = 1 b(x) and b fixes letters.
  CHECK(distinguishing_depth(selfsim::testing::bundled("grigorchuk.gt")) == 3);
  CHECK(distinguishing_depth(selfsim::testing::bundled("lamplighter.gt")) == 2);
  CHECK(distinguishing_depth(parse_machine("alphabet 3\n")) == 1);
  auto depths = moving_depths(selfsim::testing::bundled("grigorchuk.gt"));
  CHECK(depths == std::vector<std::optional<std::size_t>>{1, 2, 2, 3, std::nullopt});
}

TEST_CASE("length preservation over random machines") {
  Generator gen(3);
  for (int i = 0; i < 30; ++i) {
    std::size_t d = 2 + gen.below(3);
    Machine m = random_machine(gen, d, 1 + gen.below(4));
    AutomatonGroup g(m);
    for (std::size_t q = 0; q < m.size(); ++q) {
      Aut s = g.import(m)[q];
      for (std::size_t len = 0; len <= 8; ++len) {
        Word x = gen.word(d, len);
        CHECK(g.apply(s, x).size() == len);
        CHECK(g.apply(s, x) == m.apply(q, x));
      }
    }
  }
}

TEST_CASE("cocycle law, exhaustively to depth 5") {
  for (const auto& name : selfsim::testing::fixture_names()) {
    Fixture f(name);
    const auto& g = *f.group;
    for (Aut s : g.machine_states()) {
      for (std::size_t lu = 0; lu <= 5; ++lu) {
        for_each_word(2, lu, [&](const Word& u) {
          for (std::size_t lv = 0; lu + lv <= 5; ++lv) {
            for_each_word(2, lv, [&](const Word& v) {
              Word uv = concat(u, v);
              CHECK(g.apply(s, uv) == concat(g.apply(s, u), g.apply(g.restrict(s, u), v)));
              CHECK(g.restrict(s, uv) == g.restrict(g.restrict(s, u), v));
            });
          }
        });
      }
    }
  }
}

TEST_CASE("group laws and faithfulness of compose") {
  for (const auto& name : selfsim::testing::fixture_names()) {
    Fixture f(name);
    const auto& g = *f.group;
    const auto& pool = g.machine_states();
    Generator gen(17);
    for (int i = 0; i < 40; ++i) {
      Aut x = g.compose(gen.state(pool), gen.state(pool));
      Aut y = g.compose(gen.state(pool), g.invert(gen.state(pool)));
      Aut z = gen.state(pool);
      CHECK(g.is_identity(g.compose(x, g.invert(x))));
      CHECK(g.is_identity(g.compose(g.invert(x), x)));
      CHECK(g.equal(g.compose(g.compose(x, y), z), g.compose(x, g.compose(y, z))));
      Aut xy = g.compose(x, y);
      for (std::size_t len = 0; len <= 5; ++len) {
        for_each_word(2, len, [&](const Word& word) { CHECK(g.apply(xy, word) == g.apply(x, g.apply(y, word))); });
      }
    }
  }
}

TEST_CASE("is_identity agrees with exhaustive fixing on small random machines") {
  Generator gen(5);
  for (int i = 0; i < 60; ++i) {
    std::size_t d = 2 + gen.below(2);
    Machine m = random_machine(gen, d, 1 + gen.below(4));
    AutomatonGroup g(m);
    auto handles = g.import(m);
    for (std::size_t q = 0; q < m.size(); ++q) {
      bool fixes_all = true;
      for (std::size_t len = 0; len <= m.size() && fixes_all; ++len) {
        for_each_word(d, len, [&](const Word& x) { fixes_all = fixes_all && m.apply(q, x) == x; });
      }
      CHECK(g.is_identity(handles[q]) == fixes_all);
      // The structural criterion: every closure state has identity output.
      bool structural = true;
      for (Aut s : g.closure(handles[q])) structural = structural && is_identity_perm(g.perm(s));
      CHECK(structural == fixes_all);
    }
  }
}

TEST_CASE("word problem regressions") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  for (const char* rel : {"a*a", "b*b", "c*c", "d*d", "b*c*d", "(b*c)^-1*d", "c*d*b", "b*d*c", "(a*d)^4"}) {
    CHECK_MESSAGE(g.is_identity(g.parse_expression(rel)), rel);
  }
  CHECK_FALSE(g.is_identity(g.parse_expression("a*b")));
  CHECK_FALSE(g.is_identity(g.parse_expression("(a*b)^8")));
  CHECK(g.is_identity(g.parse_expression("(a*b)^16")));

  Fixture add("adding.gt");
  const auto& ga = *add.group;
  for (long k = 1; k <= 64; ++k) CHECK_FALSE(ga.is_identity(ga.power(ga.state("a"), k)));
  CHECK_THROWS_AS(g.parse_expression("a*z"), DomainError);
  CHECK_THROWS_AS(g.parse_expression("a*"), ParseError);
  CHECK_THROWS_AS(g.parse_expression("(a"), ParseError);
}

TEST_CASE("alphabet mismatch and state cap") {
  Fixture grig("grigorchuk.gt");
  CHECK_THROWS_AS(grig.group->import(parse_machine("alphabet 3\n")), DomainError);

  AutomatonGroup tiny(selfsim::testing::bundled("adding.gt"), GroupLimits{4});
  Aut a = tiny.state("a");
  CHECK_THROWS_AS(tiny.power(a, 40), CapExceeded);
}

TEST_CASE("canonical identity is independent of presentation") {
  Fixture grig("grigorchuk.gt");
  auto& g = *grig.group;
  Machine m = selfsim::testing::bundled("grigorchuk.gt");
  Machine prod = product_machine(m, *m.find("b"), *m.find("c"));
  Aut bc = g.import(prod)[0];
  CHECK(bc == g.state("d"));
}

TEST_CASE("concurrent composition is deterministic") {
  Fixture grig("grigorchuk.gt");
  const auto& g = *grig.group;
  const auto& pool = g.machine_states();
  std::vector<std::vector<Aut>> results(4);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < results.size(); ++t) {
    threads.emplace_back([&, t] {
      Generator gen(99);
      for (int i = 0; i < 200; ++i) {
        Aut x = g.compose(gen.state(pool), g.compose(gen.state(pool), gen.state(pool)));
        results[t].push_back(g.compose(x, g.invert(gen.state(pool))));
      }
    });
  }
  for (auto& th : threads) th.join();
  for (std::size_t t = 1; t < results.size(); ++t) CHECK(results[t] == results[0]);
}
