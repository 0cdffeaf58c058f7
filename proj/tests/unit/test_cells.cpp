#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "../support/corpus.hpp"
#include "../support/oracles.hpp"
#include "liftgen/cells.hpp"
#include "liftgen/harness.hpp"

using namespace liftgen;

namespace {

struct Compiled {
  LiftedProblem lp;
  AtomLayout layout;
  LocalFormula psi;
};

Compiled compiled(const Problem& p) {
  Compiled c{compile(p), {}, {}};
  c.layout = AtomLayout::of(c.lp.vocabulary);
  c.psi = LocalFormula(c.lp.matrix, c.layout);
  return c;
}

// Structure on {1,2}: element 1 has type a, element 2 has type b, the pair
// (1,2) has table pi with 1 in the x position.
oracle::World pair_world(const AtomLayout& l, const Vocabulary& v, OneType a, TwoTable pi, OneType b) {
  oracle::World w = oracle::make_world(v, 2);
  auto set = [&](const GroundAtom& g, bool value) {
    if (value) w.bits |= std::uint64_t{1} << w.index.at(g);
  };
  for (int i = 0; i < l.num_one_atoms(); ++i) {
    const std::string& p = l.one_atoms[i];
    const bool binary = l.binary_index.count(p) != 0;
    set(binary ? GroundAtom{p, {1, 1}} : GroundAtom{p, {1}}, (a.bits >> i) & 1);
    set(binary ? GroundAtom{p, {2, 2}} : GroundAtom{p, {2}}, (b.bits >> i) & 1);
  }
  for (int r = 0; r < l.num_binary(); ++r) {
    set({l.binary[r], {1, 2}}, (pi.bits >> (2 * r)) & 1);
    set({l.binary[r], {2, 1}}, (pi.bits >> (2 * r + 1)) & 1);
  }
  return w;
}

}  // namespace

TEST_SUITE("cells") {
  TEST_CASE("two-colored graphs have 8 one-types, 2 valid") {
    Compiled c = compiled(make_preset("two-colored-graphs", 4).problem);
    auto types = enumerate_1types(c.layout, c.psi);
    CHECK(types.size() == 8);
    CHECK(std::count_if(types.begin(), types.end(), [](const auto& t) { return t.valid; }) == 2);
    CHECK(valid_1types(c.layout, c.psi).size() == 2);
  }

  TEST_CASE("isolated-free graphs: one valid one-type, two coherent tables") {
    Compiled c = compiled(make_preset("no-isolated-vertices", 3).problem);
    auto types = enumerate_1types(c.layout, c.psi);
    REQUIRE(types.size() == 2);
    auto valid = valid_1types(c.layout, c.psi);
    REQUIRE(valid.size() == 1);
    CHECK(c.layout.describe(valid[0]) == "~E(x,x)");

    CHECK(enumerate_2tables(c.layout).size() == 4);
    auto tables = coherent_tables(c.layout, c.psi, valid[0], valid[0]);
    REQUIRE(tables.size() == 2);
    std::set<std::string> names;
    for (auto t : tables) names.insert(c.layout.describe(t));
    CHECK(names == std::set<std::string>{"E(x,y) & E(y,x)", "~E(x,y) & ~E(y,x)"});
    CHECK_FALSE(coherent(TwoTable{0b01}, valid[0], valid[0], c.psi));
    CHECK(coherent(TwoTable{0b11}, valid[0], valid[0], c.psi));
  }

  TEST_CASE("empty vocabularies") {
    AtomLayout l = AtomLayout::of(Vocabulary{});
    LocalFormula top(Formula::top(), l);
    CHECK(enumerate_1types(l, top).size() == 1);
    CHECK(enumerate_2tables(l).size() == 1);
  }

  TEST_CASE("a trivial matrix makes every table coherent") {
    Vocabulary v;
    v.add("E", 2);
    v.add("P", 1);
    AtomLayout l = AtomLayout::of(v);
    LocalFormula top(Formula::top(), l);
    for (const auto& a : enumerate_1types(l, top))
      for (const auto& b : enumerate_1types(l, top))
        for (auto pi : enumerate_2tables(l)) CHECK(coherent(pi, a.type, b.type, top));
  }

  TEST_CASE("enumeration sizes and order") {
    Vocabulary v;
    v.add("E", 2);
    v.add("F", 2);
    v.add("P", 1);
    AtomLayout l = AtomLayout::of(v);
    LocalFormula top(Formula::top(), l);
    auto types = enumerate_1types(l, top);
    auto tables = enumerate_2tables(l);
    CHECK(types.size() == 8);
    CHECK(tables.size() == 16);
    for (std::size_t i = 1; i < types.size(); ++i) CHECK(types[i - 1].type < types[i].type);
    for (std::size_t i = 1; i < tables.size(); ++i) CHECK(tables[i - 1] < tables[i]);
    CHECK(l.one_atoms == std::vector<std::string>{"E", "F", "P"});
  }

  TEST_CASE("coherence agrees with ground evaluation on two elements") {
    corpus::Options opt;
    for (unsigned seed = 0; seed < 12; ++seed) {
      corpus::Generator gen(seed, opt);
      Formula psi_f = gen.matrix(3, 3);
      Vocabulary v;
      v.add("E", 2);
      v.add("F", 2);
      v.add("P", 1);
      v.add("Q", 1);
      AtomLayout l = AtomLayout::of(v);
      LocalFormula psi(psi_f, l);
      CAPTURE(to_string(psi_f));
      auto types = enumerate_1types(l, psi);
      for (const auto& a : types) {
        oracle::World one = pair_world(l, v, a.type, TwoTable{}, a.type);
        REQUIRE(a.valid == oracle::satisfies(one, psi_f, {1, 1}));
        for (const auto& b : types)
          for (auto pi : enumerate_2tables(l)) {
            oracle::World w = pair_world(l, v, a.type, pi, b.type);
            const bool expected = oracle::satisfies(w, psi_f, {1, 2}) && oracle::satisfies(w, psi_f, {2, 1});
            REQUIRE(coherent(pi, a.type, b.type, psi) == expected);
          }
      }
      std::vector<OneType> flagged;
      for (const auto& t : types)
        if (t.valid) flagged.push_back(t.type);
      CHECK(valid_1types(l, psi) == flagged);
      for (auto a : flagged)
        for (auto b : flagged) {
          std::vector<TwoTable> expected;
          for (auto pi : enumerate_2tables(l))
            if (coherent(pi, a, b, psi)) expected.push_back(pi);
          CHECK(coherent_tables(l, psi, a, b) == expected);
        }
    }
  }

  TEST_CASE("relaxation") {
    std::vector<int> registry{0, 1};
    // R_1(y,x) true and R_2(y,x) false discharge Z_1 only.
    TwoTable pi{0b0010};
    CHECK(relax_block(BlockType{0b11}, pi, registry) == BlockType{0b10});
    for (std::uint32_t t = 0; t < 16; ++t) CHECK(relax_block(BlockType{0}, TwoTable{t}, registry) == BlockType{0});
    for (std::uint32_t b = 0; b < 4; ++b) {
      for (std::uint32_t t = 0; t < 16; ++t) {
        BlockType r = relax_block(BlockType{b}, TwoTable{t}, registry);
        CHECK((r.bits & ~b) == 0u);
        if ((t & 0b1010) == 0) CHECK(r == BlockType{b});
        CHECK(relax_block(r, TwoTable{t}, registry) == r);
      }
    }
  }

  TEST_CASE("configuration spaces") {
    auto count = [](int M, int m) {
      long c = 0;
      for (const auto& cfg : config_space(M, m)) {
        (void)cfg;
        ++c;
      }
      return c;
    };
    CHECK(count(4, 2) == 5);
    CHECK(count(0, 3) == 1);
    CHECK(*config_space(0, 3).begin() == Configuration{0, 0, 0});
    CHECK(count(3, 3) == 10);
    CHECK_THROWS_AS(config_space(2, 0), Error);

    for (int M = 0; M <= 8; ++M)
      for (int m = 1; m <= 4; ++m) {
        std::set<Configuration> seen;
        long total = 0;
        for (const auto& cfg : config_space(M, m)) {
          REQUIRE(cfg.size() == static_cast<std::size_t>(m));
          REQUIRE(std::accumulate(cfg.begin(), cfg.end(), 0) == M);
          REQUIRE(std::all_of(cfg.begin(), cfg.end(), [](int x) { return x >= 0; }));
          seen.insert(cfg);
          ++total;
        }
        CHECK(total == static_cast<long>(seen.size()));
        CHECK(BigInt(total) == oracle::choose(M + m - 1, m - 1));
      }
  }

  TEST_CASE("evidence types") {
    EvidenceType e{0b01, 0b10};
    CHECK(e.consistent());
    CHECK(e.admits(OneType{0b01}));
    CHECK(e.admits(OneType{0b101}));
    CHECK_FALSE(e.admits(OneType{0b11}));
    CHECK_FALSE(EvidenceType{0b1, 0b1}.consistent());
  }
}
