#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "numseg/wfst.hpp"
#include "numseg/rng.hpp"
#include "oracle_helpers.hpp"

using namespace numseg;

namespace {

CipherKey ia_excerpt_key() {
  return parse_key_file("0\te\n2\to\n4\ta\n5\ts\n22\tp\n24\tr\n25\tt\n");
}

// Distinct (input, output, min weight) triples accepted by a machine.
std::map<std::pair<std::vector<Label>, std::vector<Label>>, double>
language_of(const Wfst& m, size_t max_arcs = 16) {
  std::map<std::pair<std::vector<Label>, std::vector<Label>>, double> out;
  for (const auto& p : oracle::all_paths(m, max_arcs)) {
    auto key = std::make_pair(p.ilabels, p.olabels);
    auto it = out.find(key);
    if (it == out.end() || p.weight < it->second) out[key] = p.weight;
  }
  return out;
}

}  // namespace

TEST_CASE("composing the 24 acceptor with the key FST yields r") {
  CipherKey key = ia_excerpt_key();
  SegMachine seg = build_segmentation_fst(CipherText::from_flat("24"), key);
  PlainSymbols syms = PlainSymbols::from_chars("aeoprst");
  Wfst key_fst = build_key_fst(key, syms);
  Wfst composed = compose(seg.fst, key_fst);
  auto lang = language_of(composed);
  // Two readings: 2|4 -> "oa" and 24 -> "r".
  CHECK(lang.size() == 2);
  std::set<std::string> outputs;
  for (const auto& [io, w] : lang) {
    std::string text;
    for (Label l : io.second) text += syms.char_of(l);
    outputs.insert(text);
  }
  CHECK(outputs == std::set<std::string>{"oa", "r"});
}

TEST_CASE("composition with an identity acceptor is weight-preserving") {
  Rng rng(808);
  for (int iter = 0; iter < 50; ++iter) {
    Wfst a = oracle::random_acyclic_fst(rng, 6, 3);
    // Identity over the full output alphabet, single looping state.
    Wfst id;
    id.add_state();
    id.set_final(0, 0.0);
    for (Label l = 1; l <= 3; ++l) id.add_arc(0, {l, l, 0.0, 0});
    Wfst composed = compose(a, id);
    auto la = language_of(a);
    auto lc = language_of(composed);
    CHECK(la.size() == lc.size());
    for (const auto& [io, w] : la) {
      REQUIRE(lc.count(io) == 1);
      CHECK(lc.at(io) == doctest::Approx(w).epsilon(1e-12));
    }
  }
}

TEST_CASE("composition equals the brute-force path join on small machines") {
  Rng rng(1234);
  int checked = 0;
  for (int iter = 0; iter < 200; ++iter) {
    Wfst a = oracle::random_acyclic_fst(rng, 6, 3);
    Wfst b = oracle::random_acyclic_fst(rng, 6, 3);
    Wfst c = compose(a, b);

    // Join: every pair of paths with matching intermediate strings.
    std::map<std::pair<std::vector<Label>, std::vector<Label>>, double> want;
    auto pa = oracle::all_paths(a);
    auto pb = oracle::all_paths(b);
    for (const auto& x : pa)
      for (const auto& y : pb) {
        if (x.olabels != y.ilabels) continue;
        auto key = std::make_pair(x.ilabels, y.olabels);
        double w = x.weight + y.weight;
        auto it = want.find(key);
        if (it == want.end() || w < it->second) want[key] = w;
      }
    auto got = language_of(c, 24);
    REQUIRE(got.size() == want.size());
    for (const auto& [io, w] : want) {
      REQUIRE(got.count(io) == 1);
      CHECK(got.at(io) == doctest::Approx(w).epsilon(1e-12));
    }
    checked += static_cast<int>(want.size());
  }
  CHECK(checked > 200);  // the random machines actually exercised the join
}

TEST_CASE("epsilon filter admits exactly one interleaving") {
  // a: (x:eps)(y:z), b: (eps:w)(z:v). One pair path, one composed path.
  Wfst a;
  a.add_state();
  a.add_state();
  a.add_state();
  a.add_arc(0, {1, kEpsilon, 0.5, 1});
  a.add_arc(1, {2, 3, 0.25, 2});
  a.set_final(2, 0.0);
  Wfst b;
  b.add_state();
  b.add_state();
  b.add_state();
  b.add_arc(0, {kEpsilon, 4, 0.125, 1});
  b.add_arc(1, {3, 5, 1.0, 2});
  b.set_final(2, 0.0);
  Wfst c = compose(a, b);
  CHECK(count_paths(c) == doctest::Approx(1.0));
  Path best = shortest_path(c);
  CHECK(best.weight == doctest::Approx(1.875));
  CHECK(best.ilabels == std::vector<Label>{1, 2});
  CHECK(best.olabels == std::vector<Label>{4, 5});
}

TEST_CASE("composition is associative on best-path weights") {
  Rng rng(5150);
  int compared = 0;
  for (int iter = 0; iter < 150 && compared < 40; ++iter) {
    Wfst a = oracle::random_acyclic_fst(rng, 5, 2);
    Wfst b = oracle::random_acyclic_fst(rng, 5, 2);
    Wfst c = oracle::random_acyclic_fst(rng, 5, 2);
    Wfst left = compose(compose(a, b), c);
    Wfst right = compose(a, compose(b, c));
    bool l_ok = true, r_ok = true;
    double wl = 0, wr = 0;
    try {
      wl = shortest_path(left).weight;
    } catch (const NoPath&) {
      l_ok = false;
    }
    try {
      wr = shortest_path(right).weight;
    } catch (const NoPath&) {
      r_ok = false;
    }
    REQUIRE(l_ok == r_ok);
    if (l_ok) {
      CHECK(wl == doctest::Approx(wr).epsilon(1e-9));
      ++compared;
    }
  }
  CHECK(compared >= 20);
}

TEST_CASE("shortest_path basics") {
  Wfst single;
  single.add_state();
  single.add_state();
  single.add_arc(0, {1, 2, 0.5, 1});
  single.set_final(1, 0.25);
  Path p = shortest_path(single);
  CHECK(p.weight == doctest::Approx(0.75));
  CHECK(p.arcs.size() == 1);

  Wfst two;
  two.add_state();
  two.add_state();
  two.add_arc(0, {1, 1, 1.0, 1});
  two.add_arc(0, {2, 2, 2.0, 1});
  two.set_final(1, 0.0);
  CHECK(shortest_path(two).olabels == std::vector<Label>{1});

  Wfst dead;
  dead.add_state();
  dead.add_state();
  dead.add_arc(0, {1, 1, 1.0, 1});
  CHECK_THROWS_AS(shortest_path(dead), NoPath);
}

TEST_CASE("equal-weight ties go to the lexicographically smaller output") {
  Wfst m;
  for (int i = 0; i < 4; ++i) m.add_state();
  m.add_arc(0, {1, 1, 1.0, 1});
  m.add_arc(1, {1, 2, 1.0, 3});  // output (1,2)
  m.add_arc(0, {1, 1, 1.0, 2});
  m.add_arc(2, {1, 1, 1.0, 3});  // output (1,1)
  m.set_final(3, 0.0);
  Path p = shortest_path(m);
  CHECK(p.weight == doctest::Approx(2.0));
  CHECK(p.olabels == std::vector<Label>{1, 1});
}

TEST_CASE("shortest_path equals exhaustive enumeration on random machines") {
  Rng rng(4242);
  int accepted = 0;
  for (int iter = 0; iter < 300; ++iter) {
    Wfst m = oracle::random_acyclic_fst(rng, 12, 3);
    auto paths = oracle::all_paths(m, 24);
    const oracle::EnumeratedPath* want = oracle::best_enumerated(paths);
    if (want == nullptr) {
      CHECK_THROWS_AS(shortest_path(m), NoPath);
      continue;
    }
    Path got = shortest_path(m);
    CHECK(got.weight == doctest::Approx(want->weight).epsilon(1e-12));
    CHECK(got.olabels == want->olabels);
    ++accepted;
  }
  CHECK(accepted > 100);
}

TEST_CASE("segmentation lattice admits the three readings of 2228") {
  CipherKey key = parse_key_file("2\ta\n22\tn\n8\td\n");
  SegMachine seg = build_segmentation_fst(CipherText::from_flat("2228"), key);
  CHECK(count_paths(seg.fst) == doctest::Approx(3.0));

  PlainSymbols syms = PlainSymbols::from_chars("and");
  Wfst composed = compose(seg.fst, build_key_fst(key, syms));
  std::set<std::string> outputs;
  for (const auto& p : oracle::all_paths(composed)) {
    std::string text;
    for (Label l : p.olabels) text += syms.char_of(l);
    outputs.insert(text);
  }
  CHECK(outputs == std::set<std::string>{"aaad", "and", "nad"});
}

TEST_CASE("the 8-digit excerpt has exactly 8 segmentations") {
  SegMachine seg = build_segmentation_fst(CipherText::from_flat("25422024"),
                                          ia_excerpt_key());
  CHECK(count_paths(seg.fst) == doctest::Approx(8.0));
}

TEST_CASE("the excerpt's readings match the key table") {
  CipherKey key = ia_excerpt_key();
  SegMachine seg = build_segmentation_fst(CipherText::from_flat("25422024"), key);
  PlainSymbols syms = PlainSymbols::from_chars("aeoprst");
  Wfst composed = compose(seg.fst, build_key_fst(key, syms));
  std::set<std::string> outputs;
  for (const auto& p : oracle::all_paths(composed, 24)) {
    std::string text;
    for (Label l : p.olabels) text += syms.char_of(l);
    outputs.insert(text);
  }
  CHECK(outputs == std::set<std::string>{"osaooeoa", "taooeoa", "osapeoa",
                                         "osaooer", "tapeoa", "taooer",
                                         "osaper", "taper"});
}

TEST_CASE("deterministic keys give a single path") {
  CipherKey key = parse_key_file("12\ta\n3\tb\n45\tc\n");
  REQUIRE(key.deterministic());
  SegMachine seg =
      build_segmentation_fst(CipherText::from_flat("12345"), key);
  CHECK(count_paths(seg.fst) == doctest::Approx(1.0));
}

TEST_CASE("unsegmentable positions report the stuck offset") {
  CipherKey key = parse_key_file("22\ta\n8\td\n");
  try {
    build_segmentation_fst(CipherText::from_flat("2228"), key);
    FAIL("expected UnsegmentablePosition");
  } catch (const UnsegmentablePosition& e) {
    CHECK(e.offset() == 2);  // tiling reaches 22|28? no: 22|2... stuck at 2
  }
}

TEST_CASE("null elements map to epsilon and nomenclature to NOM") {
  CipherKey key = parse_key_file("1\ta\n7\t@NULL\n19\t@NOM\n");
  PlainSymbols syms = PlainSymbols::from_chars("a");
  SegMachine seg = build_segmentation_fst(CipherText::from_flat("1719"), key);
  Wfst composed = compose(seg.fst, build_key_fst(key, syms));
  auto paths = oracle::all_paths(composed);
  REQUIRE(paths.size() == 1);
  // Output: 'a', then nothing for the null, then the NOM label.
  CHECK(paths[0].olabels ==
        std::vector<Label>{syms.label_of('a'), syms.nom_label()});
}

TEST_CASE("multi-letter targets expand to label chains") {
  CipherKey key = parse_key_file("24\tqu\n3\te\n");
  PlainSymbols syms = PlainSymbols::from_chars("equ");
  SegMachine seg = build_segmentation_fst(CipherText::from_flat("243"), key);
  Wfst composed = compose(seg.fst, build_key_fst(key, syms));
  auto paths = oracle::all_paths(composed);
  REQUIRE(paths.size() == 1);
  std::string text;
  for (Label l : paths[0].olabels) text += syms.char_of(l);
  CHECK(text == "que");
}

TEST_CASE("att dump lists arcs and finals") {
  Wfst m;
  m.add_state();
  m.add_state();
  m.add_arc(0, {1, 2, 0.5, 1});
  m.set_final(1, 0.0);
  CHECK(dump_att(m) == "0\t1\t1\t2\t0.5\n1\t0\n");
}
