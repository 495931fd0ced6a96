#include "doctest.h"

#include <cmath>
#include <fstream>

#include "numseg/charlm.hpp"
#include "numseg/ciphergen.hpp"
#include "numseg/harness.hpp"
#include "numseg/rng.hpp"
#include "oracle_helpers.hpp"

using namespace numseg;

namespace {

// First `n` lines of the bundled LM corpus.
std::vector<std::string> corpus_lines(size_t n, size_t skip = 0) {
  std::ifstream in(oracle::data_path("data/english_lm.txt"));
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (lines.size() < n && std::getline(in, line)) {
    if (skip > 0) {
      --skip;
      continue;
    }
    if (!line.empty()) lines.push_back(line);
  }
  REQUIRE(lines.size() == n);
  return lines;
}

const CharNgramLm& english_lm() {
  static const CharNgramLm lm = lm_train(corpus_lines(1500), 5);
  return lm;
}

}  // namespace

TEST_CASE("a one-symbol corpus concentrates the conditional") {
  CharNgramLm lm = lm_train({"aaaa"}, 2);
  std::string state = lm.next_state(lm.start_state(), 'a');
  CHECK(std::exp(lm.cond_logp(state, 'a')) > 0.7);
  CHECK(lm.conditional_sum("a") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lm.conditional_sum("") == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("unseen histories back off to the lower order") {
  CharNgramLm lm = lm_train({"abab", "abba"}, 3);
  // 'z' never occurs: the state after it collapses to the empty context,
  // so the conditional equals the unigram estimate.
  std::string state = lm.next_state(lm.start_state(), 'z');
  CHECK(state == "");
  CHECK(lm.cond_logp(state, 'a') == lm.cond_logp(std::string(), 'a'));
  CHECK(lm.conditional_sum("zz") == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("normalization holds per history on real text") {
  const CharNgramLm& lm = english_lm();
  std::vector<std::string> histories{"", "t", "th", "the", "ing ",
                                     "q",  "zz", "  ",  "xq"};
  for (const auto& h : histories)
    CHECK(lm.conditional_sum(h) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("held-out text scores finitely") {
  const CharNgramLm& lm = english_lm();
  for (const auto& line : corpus_lines(50, 2000)) {
    double score = lm.score(PlainText{line});
    CHECK(std::isfinite(score));
    CHECK(score < 0.0);
    // Per-character perplexity is bounded by the vocabulary size.
    double ppl = std::exp(-score / static_cast<double>(line.size()));
    CHECK(ppl < 27.0);
  }
}

TEST_CASE("scoring the empty text gives zero") {
  CHECK(lm_score(english_lm(), PlainText{""}) == 0.0);
}

TEST_CASE("scores add across boundary-reset pieces") {
  const CharNgramLm& lm = english_lm();
  double joint = lm.score(PlainText{"and"}) + lm.score(PlainText{"the"});
  double manual = 0.0;
  for (const char* word : {"and", "the"}) {
    std::string state = lm.start_state();
    for (const char* p = word; *p; ++p) {
      manual += lm.cond_logp(state, *p);
      state = lm.next_state(state, *p);
    }
  }
  CHECK(joint == doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("an English LM prefers and over aad") {
  const CharNgramLm& lm = english_lm();
  CHECK(lm.score(PlainText{"and"}) >= lm.score(PlainText{"aad"}));
  CHECK(lm.score(PlainText{"and"}) >= lm.score(PlainText{"nad"}));
  CHECK(lm.score(PlainText{"the"}) > lm.score(PlainText{"qqq"}));
}

TEST_CASE("acceptor weight equals the negated score") {
  const CharNgramLm& lm = english_lm();
  LmAcceptor acceptor = lm_to_acceptor(lm);
  CHECK(acceptor.shortcut_violations == 0);

  Rng rng(321);
  const std::string& vocab = lm.vocab();
  for (int iter = 0; iter < 200; ++iter) {
    size_t len = 1 + rng.below(12);
    std::string text;
    for (size_t i = 0; i < len; ++i) text += vocab[rng.below(vocab.size())];

    Wfst probe;
    probe.add_state();
    for (size_t i = 0; i < text.size(); ++i) {
      int32_t next = probe.add_state();
      Label l = acceptor.symbols.label_of(text[i]);
      probe.add_arc(static_cast<int32_t>(i), {l, l, 0.0, next});
    }
    probe.set_final(static_cast<int32_t>(text.size()), 0.0);

    ComposeOptions opt;
    opt.b_epsilon_is_failure = true;  // backoff only on miss
    Wfst lattice = compose_ex(probe, acceptor.fst, opt).fst;
    Path best = shortest_path(lattice);
    CHECK(best.weight ==
          doctest::Approx(-lm.score(PlainText{text})).epsilon(1e-6));
    // Exactly one path per input string under failure matching.
    CHECK(count_paths(lattice) == doctest::Approx(1.0));
  }
}

TEST_CASE("order-1 models compile to a single-state acceptor") {
  CharNgramLm lm = lm_train({"abc abc"}, 1);
  LmAcceptor acceptor = lm_to_acceptor(lm);
  CHECK(acceptor.fst.num_states() == 1);
}

TEST_CASE("acceptor state count is bounded by seen contexts plus one") {
  CharNgramLm lm = lm_train(corpus_lines(100), 4);
  LmAcceptor acceptor = lm_to_acceptor(lm);
  CHECK(acceptor.fst.num_states() == lm.backoff_logp().size() + 1);
}

TEST_CASE("ARPA round trip preserves scores") {
  CharNgramLm lm = lm_train(corpus_lines(200), 4);
  CharNgramLm back = CharNgramLm::from_arpa(lm.to_arpa());
  CHECK(back.order() == lm.order());
  CHECK(back.vocab() == lm.vocab());
  Rng rng(77);
  for (int iter = 0; iter < 100; ++iter) {
    std::string text;
    size_t len = 1 + rng.below(20);
    for (size_t i = 0; i < len; ++i)
      text += lm.vocab()[rng.below(lm.vocab().size())];
    CHECK(back.score(PlainText{text}) ==
          doctest::Approx(lm.score(PlainText{text})).epsilon(1e-9));
  }
}

TEST_CASE("training validates its inputs") {
  CHECK_THROWS_AS(lm_train({}, 5), EmptyCorpus);
  CHECK_THROWS_AS(lm_train({""}, 5), EmptyCorpus);
  CHECK_THROWS_AS(lm_train({"abc123"}, 5), AlphabetError);
  CHECK_THROWS_AS(lm_train({"abc"}, 0), ValidationError);
}
