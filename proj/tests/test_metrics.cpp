#include "doctest.h"

#include "numseg/metrics.hpp"
#include "numseg/rng.hpp"
#include "oracle_helpers.hpp"

using namespace numseg;

TEST_CASE("vocab_f1 on identical, disjoint and partial sets") {
  std::set<std::string> gold{"17", "77"};
  CHECK(vocab_f1(gold, gold).f1 == doctest::Approx(1.0));
  CHECK(vocab_f1({"1", "7"}, gold).f1 == doctest::Approx(0.0));
  F1Scores s = vocab_f1({"17", "77", "71", "11"}, gold);
  CHECK(s.precision == doctest::Approx(0.5));
  CHECK(s.recall == doctest::Approx(1.0));
  CHECK(s.f1 == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(vocab_f1(gold, {}), EmptyReference);
}

TEST_CASE("f1 is symmetric exactly when precision equals recall") {
  std::set<std::string> a{"1", "2", "3"};
  std::set<std::string> b{"2", "3", "4"};
  F1Scores ab = vocab_f1(a, b);
  F1Scores ba = vocab_f1(b, a);
  CHECK(ab.precision == ba.recall);
  CHECK(ab.f1 == doctest::Approx(ba.f1));
}

TEST_CASE("seg_er on the 2228 example") {
  Segmentation ref{{"2", "22", "8"}};
  CHECK(seg_er(ref, ref) == doctest::Approx(0.0));
  // One substitution (2 -> 22) plus one deletion.
  Segmentation hyp{{"2", "2", "2", "8"}};
  CHECK(seg_er(hyp, ref) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(seg_er(hyp, Segmentation{}), EmptyReference);
}

TEST_CASE("seg_er can exceed one for all-singleton hypotheses") {
  Segmentation ref{{"25", "42", "20", "24"}};
  Segmentation hyp{{"2", "5", "4", "2", "2", "0", "2", "4"}};
  CHECK(seg_er(hyp, ref) > 1.0);
}

TEST_CASE("ter on simple strings") {
  CHECK(ter(PlainText{"abc"}, PlainText{"abc"}) == doctest::Approx(0.0));
  CHECK(ter(PlainText{"abc"}, PlainText{"abd"}) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(ter(PlainText{"abc"}, PlainText{""}), EmptyReference);
}

TEST_CASE("seg_er equals exhaustive edit search on short sequences") {
  Rng rng(2024);
  for (int iter = 0; iter < 300; ++iter) {
    auto random_seq = [&](size_t max_len) {
      std::vector<std::string> out;
      size_t n = 1 + rng.below(max_len);
      for (size_t i = 0; i < n; ++i)
        out.push_back(std::string(1, '0' + (char)rng.below(4)) +
                      (rng.below(2) ? "" : "7"));
      return out;
    };
    std::vector<std::string> hyp = random_seq(8);
    std::vector<std::string> ref = random_seq(8);
    EditStats stats = seg_edit_stats(Segmentation{hyp}, Segmentation{ref});
    CHECK(stats.edits == oracle::brute_edit_distance(hyp, 0, ref, 0));
  }
}

TEST_CASE("ter matches the full-matrix reference implementation") {
  Rng rng(31);
  for (int iter = 0; iter < 200; ++iter) {
    auto random_text = [&](size_t max_len) {
      std::string out;
      size_t n = rng.below(max_len + 1);
      for (size_t i = 0; i < n; ++i)
        out += static_cast<char>('a' + rng.below(5));
      return out;
    };
    std::string hyp = random_text(30);
    std::string ref = random_text(30);
    if (ref.empty()) continue;
    CHECK(ter_stats(PlainText{hyp}, PlainText{ref}).edits ==
          oracle::matrix_edit_distance(hyp, ref));
  }
}

TEST_CASE("edit counts satisfy identity and triangle inequality") {
  Rng rng(555);
  auto random_seg = [&]() {
    std::vector<std::string> out;
    size_t n = 1 + rng.below(6);
    for (size_t i = 0; i < n; ++i)
      out.push_back(std::string(1, '0' + (char)rng.below(3)));
    return Segmentation{out};
  };
  for (int iter = 0; iter < 100; ++iter) {
    Segmentation a = random_seg(), b = random_seg(), c = random_seg();
    size_t ab = seg_edit_stats(a, b).edits;
    size_t bc = seg_edit_stats(b, c).edits;
    size_t ac = seg_edit_stats(a, c).edits;
    CHECK(ac <= ab + bc);
    CHECK(seg_edit_stats(a, a).edits == 0);
    if (ab == 0) CHECK(a == b);
  }
}

TEST_CASE("eval reports carry the fields of their mode") {
  EvalReport f1 = EvalReport::for_f1({"17", "77", "9"}, {"17", "77"});
  CHECK(f1.f1.has_value());
  CHECK_FALSE(f1.seg_er.has_value());
  CHECK(f1.to_json().find("\"f1_pct\": 80.0000") != std::string::npos);
  CHECK(f1.to_json().find("seg_er") == std::string::npos);

  EvalReport se = EvalReport::for_seg_er(Segmentation{{"2", "2", "2", "8"}},
                                         Segmentation{{"2", "22", "8"}});
  CHECK(se.edits == 2);
  CHECK(se.ref_count == 3);
  CHECK(*se.seg_er == doctest::Approx(2.0 / 3.0));
  CHECK(se.to_tsv().find("edits\t2") != std::string::npos);

  EvalReport te = EvalReport::for_ter(PlainText{"abc"}, PlainText{"abd"});
  CHECK(*te.ter == doctest::Approx(1.0 / 3.0));
  CHECK(te.to_json().find("\"ter_pct\": 33.3333") != std::string::npos);
}

TEST_CASE("nomenclature placeholders collapse to one class character") {
  CHECK(map_nom_to_class("ab<NOM:19>cd") == "ab#cd");
  CHECK(map_nom_to_class("<NOM:1><NOM:2>") == "##");
  CHECK(map_nom_to_class("plain text") == "plain text");
  CHECK(map_nom_to_class("<NOM:unclosed") == "<NOM:unclosed");
}
