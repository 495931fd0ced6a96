#include "doctest.h"

#include <set>

#include "numseg/core.hpp"
#include "numseg/rng.hpp"
#include "oracle_helpers.hpp"

using namespace numseg;

TEST_CASE("parse_key_file reads the IA-style excerpt") {
  CipherKey key = parse_key_file("2\to\n4\ta\n24\tr\n");
  CHECK(key.size() == 3);
  CHECK_FALSE(key.deterministic());  // "2" is a prefix of "24"
  CHECK(key.find("24")->text == "r");
  CHECK(key.find("2")->text == "o");
  CHECK(key.find("99") == nullptr);
}

TEST_CASE("prefix-free keys are flagged deterministic") {
  CipherKey key = parse_key_file("2\ta\n8\td\n");
  CHECK(key.deterministic());
}

TEST_CASE("duplicate elements are rejected") {
  CHECK_THROWS_AS(parse_key_file("2\ta\n2\tb\n"), DuplicateElement);
}

TEST_CASE("key elements outside the alphabet are rejected") {
  CHECK_THROWS_AS(parse_key_file("2x\ta\n"), AlphabetError);
}

TEST_CASE("key files support markers and comments") {
  CipherKey key = parse_key_file("# a comment\n19\t@NOM\n7\t@NULL\n0\te\n");
  CHECK(key.find("19")->kind == UnitKind::kNomenclature);
  CHECK(key.find("7")->kind == UnitKind::kNull);
  CHECK(key.find("0")->kind == UnitKind::kLetters);
}

TEST_CASE("parse_cipher_file splits gold segments on spaces") {
  ParsedCipher parsed = parse_cipher_file("25 4 22 0 24\n");
  CHECK(parsed.text.flat == "25422024");
  REQUIRE(parsed.gold.has_value());
  CHECK(parsed.gold->segments ==
        std::vector<std::string>{"25", "4", "22", "0", "24"});
}

TEST_CASE("empty cipher file parses to empty text without gold") {
  ParsedCipher parsed = parse_cipher_file("");
  CHECK(parsed.text.flat.empty());
  CHECK_FALSE(parsed.gold.has_value());
}

TEST_CASE("alphabet violations are reported with position") {
  try {
    parse_cipher_file("2x4\n");
    FAIL("expected AlphabetError");
  } catch (const AlphabetError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 2);
  }
}

TEST_CASE("alphabet header extends the symbol set") {
  ParsedCipher parsed = parse_cipher_file("#alphabet 0123456789.\n2.4\n");
  CHECK(parsed.text.flat == "2.4");
  CHECK(parsed.alphabet.contains('.'));

  CipherKey key = parse_key_file("#alphabet 0123456789.\n.\te\n0\te\n");
  CHECK(key.find(".")->text == "e");
}

TEST_CASE("serialize_segmentation joins segments with spaces") {
  Segmentation seg{{"2", "22", "8"}};
  CHECK(serialize_segmentation(seg) == "2 22 8\n");
  CHECK(serialize_segmentation(Segmentation{}) == "");
}

TEST_CASE("serialization keeps aligned line boundaries") {
  CipherText text = CipherText::from_lines({"2228", "22"});
  Segmentation seg{{"2", "22", "8", "22"}};
  CHECK(serialize_segmentation(seg, &text) == "2 22 8\n22\n");
  // A segment straddling the line break falls back to a single line.
  Segmentation straddle{{"2", "22", "822"}};
  CHECK(serialize_segmentation(straddle, &text) == "2 22 822\n");
}

TEST_CASE("parse/serialize round-trips random segmentations") {
  Rng rng(20240811);
  for (int iter = 0; iter < 200; ++iter) {
    Segmentation seg;
    size_t n = rng.below(12);
    for (size_t i = 0; i < n; ++i) {
      std::string piece;
      size_t len = 1 + rng.below(3);
      for (size_t k = 0; k < len; ++k)
        piece += static_cast<char>('0' + rng.below(10));
      seg.segments.push_back(piece);
    }
    ParsedCipher back = parse_cipher_file(serialize_segmentation(seg));
    if (seg.segments.empty()) {
      CHECK(back.text.flat.empty());
    } else if (seg.segments.size() == 1) {
      // A single segment has no separator; the parse sees an unsegmented
      // cipher with the same symbols.
      CHECK_FALSE(back.gold.has_value());
      CHECK(back.text.flat == seg.joined());
    } else {
      REQUIRE(back.gold.has_value());
      CHECK(*back.gold == seg);
    }
  }
}

TEST_CASE("segmentation validator checks concatenation") {
  CipherText text = CipherText::from_flat("2228");
  CHECK(is_valid_segmentation(Segmentation{{"2", "22", "8"}}, text));
  CHECK_FALSE(is_valid_segmentation(Segmentation{{"2", "22"}}, text));
  CHECK_FALSE(is_valid_segmentation(Segmentation{{"22", "2", "8", ""}}, text));
  CHECK_THROWS_AS(validate_segmentation(Segmentation{{"9"}}, text),
                  RuntimeFailure);
}

TEST_CASE("deterministic keys admit exactly one segmentation (brute force)") {
  Rng rng(7);
  for (int iter = 0; iter < 50; ++iter) {
    // Random prefix-free code: fixed first digit per element length bucket.
    std::vector<std::string> elements;
    std::set<std::string> vocab;
    for (int k = 0; k < 4; ++k) {
      std::string e;
      e += static_cast<char>('0' + k);  // distinct lead digit
      size_t extra = rng.below(2);
      for (size_t i = 0; i < extra; ++i)
        e += static_cast<char>('4' + rng.below(6));
      if (vocab.insert(e).second) elements.push_back(e);
    }
    // Same-length elements with distinct lead digits are prefix-free.
    std::vector<KeyEntry> entries;
    for (size_t i = 0; i < elements.size(); ++i) {
      bool prefixy = false;
      for (const auto& other : elements)
        if (&other != &elements[i] && other.starts_with(elements[i]))
          prefixy = true;
      if (prefixy) continue;
      entries.push_back(
          {elements[i], PlainUnit::letters(std::string(1, 'a' + (char)i))});
    }
    CipherKey key(entries);
    if (!key.deterministic()) continue;

    std::string text;
    size_t n_segments = 1 + rng.below(6);
    for (size_t i = 0; i < n_segments && text.size() < 20; ++i)
      text += entries[rng.below(entries.size())].element;
    std::set<std::string> element_set;
    for (const auto& e : entries) element_set.insert(e.element);
    CHECK(oracle::all_tilings(text, element_set).size() == 1);
  }
}
