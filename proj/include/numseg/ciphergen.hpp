#ifndef NUMSEG_CIPHERGEN_HPP
#define NUMSEG_CIPHERGEN_HPP

// Synthetic cipher generation: random keys, enciphering, space stripping,
// line reflow and boundary-aligned truncation. Pure functions of
// (spec, seed); identical seeds produce byte-identical outputs.

#include <cstdint>
#include <string>
#include <vector>

#include "numseg/core.hpp"
#include "numseg/rng.hpp"

namespace numseg {

struct KeySpec {
  std::string plaintext_alphabet = "abcdefghijklmnopqrstuvwxyz";
  std::vector<std::string> element_pool;  // empty -> default pool 0..99
  int homophones_per_vowel = 1;
  int homophones_per_consonant = 1;
  int null_elements = 0;          // extra elements mapped to @NULL
  int nomenclature_elements = 0;  // extra elements mapped to @NOM
  uint64_t rng_seed = 1;
};

// Cipher elements "0".."99".
std::vector<std::string> default_element_pool();

struct GeneratedCipher {
  CipherText ciphertext;
  Segmentation gold;
  CipherKey key;
  PlainText plaintext;  // includes word spaces when generated with them
};

// Each plaintext character receives its configured number of distinct
// elements, sampled without replacement from the pool.
CipherKey generate_key(const KeySpec& spec);

// Each character is replaced by a uniformly chosen homophone. Word spaces
// become literal separators in the cipher line when keep_spaces is set and
// are dropped otherwise; they never appear in gold or flat.
GeneratedCipher encipher(const PlainText& plaintext, const CipherKey& key,
                         bool keep_spaces, uint64_t rng_seed);

// Space-free lines of exactly `width` symbols (except possibly the last).
CipherText reflow(const CipherText& text, size_t width = 43);

// Longest prefix of the cipher whose gold segmentation ends on or before
// `max_symbols` flat symbols. The prefix is itself a valid GeneratedCipher.
GeneratedCipher truncate_cipher(const GeneratedCipher& cipher,
                                size_t max_symbols);
std::vector<GeneratedCipher> truncate_series(const GeneratedCipher& cipher,
                                             const std::vector<size_t>& lengths);

// Power-of-two lengths from `from` to `to` inclusive.
std::vector<size_t> power_of_two_lengths(size_t from = 128, size_t to = 16384);

// Lowercase, strip punctuation/digits, collapse whitespace runs to single
// spaces. Non-ASCII bytes are dropped.
PlainText normalize_plaintext(std::string_view raw);

// Word-aligned window with exactly `target_letters` non-space characters
// (less only if the corpus is too short).
PlainText sample_plaintext(const PlainText& corpus, size_t target_letters,
                           Rng& rng);

// Applies the key to a segmentation: letters appended, nulls skipped,
// nomenclature elements rendered as "<NOM:element>" placeholders. Inverse
// oracle for encipher.
PlainText apply_key(const Segmentation& seg, const CipherKey& key);

// Number of (element, longer element) pairs where the former is a proper
// prefix of the latter; the cipher's segmentation-ambiguity knob.
size_t count_prefix_collisions(const CipherKey& key);

}  // namespace numseg

#endif  // NUMSEG_CIPHERGEN_HPP
