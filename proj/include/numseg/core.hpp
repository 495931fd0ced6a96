#ifndef NUMSEG_CORE_HPP
#define NUMSEG_CORE_HPP

// Shared data model for ciphers, keys, segmentations and plaintext, plus
// parsing/serialization of the toolkit's line-oriented file formats.
//
// All types are immutable after construction and safe to share between
// threads.

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "numseg/errors.hpp"

namespace numseg {

// Ordered set of single-character cipher symbols. Digits 0-9 by default;
// extensible to marks such as '.' via the "#alphabet" file header.
class CipherAlphabet {
public:
  explicit CipherAlphabet(std::string_view symbols);
  static const CipherAlphabet& digits();

  const std::string& symbols() const { return symbols_; }
  size_t size() const { return symbols_.size(); }
  bool contains(char c) const;

private:
  std::string symbols_;
};

// Cipher transcription: lines as transcribed (spaces are boundary
// separators, not symbols) and the flat symbol stream with spaces and
// line breaks removed.
struct CipherText {
  std::vector<std::string> lines;
  std::string flat;

  static CipherText from_lines(std::vector<std::string> lines,
                               const CipherAlphabet& alphabet =
                                   CipherAlphabet::digits());
  static CipherText from_flat(std::string flat,
                              const CipherAlphabet& alphabet =
                                  CipherAlphabet::digits());
  bool has_spaces() const;
};

enum class UnitKind { kLetters, kNomenclature, kNull };

// Plaintext side of one key entry: letter(s), a nomenclature token, or a
// null marker.
struct PlainUnit {
  UnitKind kind = UnitKind::kLetters;
  std::string text;  // letters only; empty for nomenclature/null

  static PlainUnit letters(std::string s) { return {UnitKind::kLetters, std::move(s)}; }
  static PlainUnit nomenclature() { return {UnitKind::kNomenclature, {}}; }
  static PlainUnit null() { return {UnitKind::kNull, {}}; }
  bool operator==(const PlainUnit&) const = default;
};

struct KeyEntry {
  std::string element;  // digit string over the cipher alphabet
  PlainUnit target;
};

// Substitution table. Elements are unique; homophony (many elements ->
// one plaintext unit) is allowed. The `deterministic` flag is computed by
// prefix-freeness, a sufficient condition for unique segmentation.
class CipherKey {
public:
  CipherKey() : deterministic_(true) {}
  explicit CipherKey(std::vector<KeyEntry> entries);

  const std::vector<KeyEntry>& entries() const { return entries_; }
  bool deterministic() const { return deterministic_; }
  size_t size() const { return entries_.size(); }

  const PlainUnit* find(std::string_view element) const;
  // Elements in lexicographic order; index in this list is the element's
  // canonical token id used by the FST builders.
  const std::vector<std::string>& sorted_elements() const { return sorted_; }

private:
  std::vector<KeyEntry> entries_;
  std::vector<std::string> sorted_;
  std::unordered_map<std::string, size_t> by_element_;
  bool deterministic_;
};

// Ordered sequence of cipher elements whose concatenation equals the
// source flat stream. Equality compares segments only.
struct Segmentation {
  std::vector<std::string> segments;

  std::string joined() const;
  bool operator==(const Segmentation& o) const { return segments == o.segments; }
};

// Lowercased letters plus space.
struct PlainText {
  std::string chars;
  bool operator==(const PlainText&) const = default;
};

struct ParsedCipher {
  CipherText text;
  std::optional<Segmentation> gold;  // present iff any line contained spaces
  CipherAlphabet alphabet = CipherAlphabet::digits();
};

// --- file formats ---------------------------------------------------------
//
// Key file: one "element<TAB>target" pair per line; target "@NOM" is a
// nomenclature marker and "@NULL" a null marker; '#'-prefixed lines are
// comments ("#alphabet <symbols>" declares a non-default alphabet).
//
// Cipher file: one transcription line per text line; spaces inside a line
// are segment separators (gold segmentation); same '#' header/comment rule.

CipherKey parse_key_file(std::string_view bytes,
                         const CipherAlphabet& alphabet = CipherAlphabet::digits());
ParsedCipher parse_cipher_file(std::string_view bytes,
                               const CipherAlphabet& alphabet = CipherAlphabet::digits());

// One line of space-joined segments per source line when the segmentation
// aligns with the source's line boundaries, else a single line.
std::string serialize_segmentation(const Segmentation& seg,
                                   const CipherText* source = nullptr);
std::string serialize_key(const CipherKey& key);
std::string serialize_cipher(const CipherText& text);

// Shared validator: join(segments) == source.flat.
bool is_valid_segmentation(const Segmentation& seg, const CipherText& source);
void validate_segmentation(const Segmentation& seg, const CipherText& source);

}  // namespace numseg

#endif  // NUMSEG_CORE_HPP
