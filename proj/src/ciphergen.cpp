#include "numseg/ciphergen.hpp"

#include <algorithm>
#include <unordered_map>

namespace numseg {

std::vector<std::string> default_element_pool() {
  std::vector<std::string> pool;
  pool.reserve(100);
  for (int i = 0; i < 100; ++i) pool.push_back(std::to_string(i));
  return pool;
}

namespace {

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

}  // namespace

CipherKey generate_key(const KeySpec& spec) {
  if (spec.homophones_per_vowel < 1 || spec.homophones_per_consonant < 1)
    throw ValidationError("homophone counts must be at least 1");
  if (spec.null_elements < 0 || spec.nomenclature_elements < 0)
    throw ValidationError("element counts must be non-negative");
  if (spec.plaintext_alphabet.empty())
    throw ValidationError("plaintext alphabet must be non-empty");
  std::vector<std::string> pool =
      spec.element_pool.empty() ? default_element_pool() : spec.element_pool;
  size_t needed = spec.null_elements + spec.nomenclature_elements;
  for (char c : spec.plaintext_alphabet)
    needed += is_vowel(c) ? spec.homophones_per_vowel
                          : spec.homophones_per_consonant;
  if (needed > pool.size())
    throw PoolExhausted("key spec needs " + std::to_string(needed) +
                        " elements but pool has " +
                        std::to_string(pool.size()));

  Rng rng(spec.rng_seed);
  rng.shuffle(pool);  // draws = prefix of the shuffled pool
  size_t next = 0;
  std::vector<KeyEntry> entries;
  for (char c : spec.plaintext_alphabet) {
    int n = is_vowel(c) ? spec.homophones_per_vowel
                        : spec.homophones_per_consonant;
    for (int i = 0; i < n; ++i)
      entries.push_back({pool[next++], PlainUnit::letters(std::string(1, c))});
  }
  for (int i = 0; i < spec.null_elements; ++i)
    entries.push_back({pool[next++], PlainUnit::null()});
  for (int i = 0; i < spec.nomenclature_elements; ++i)
    entries.push_back({pool[next++], PlainUnit::nomenclature()});
  return CipherKey(std::move(entries));
}

GeneratedCipher encipher(const PlainText& plaintext, const CipherKey& key,
                         bool keep_spaces, uint64_t rng_seed) {
  // Homophone lists per character, in element order for determinism.
  std::unordered_map<char, std::vector<std::string>> homophones;
  for (const auto& element : key.sorted_elements()) {
    const PlainUnit* u = key.find(element);
    if (u->kind == UnitKind::kLetters && u->text.size() == 1)
      homophones[u->text[0]].push_back(element);
  }

  Rng rng(rng_seed);
  std::string line;
  std::string flat;
  std::vector<std::string> gold;
  bool pending_space = false;
  for (char c : plaintext.chars) {
    if (c == ' ') {
      pending_space = !flat.empty();
      continue;
    }
    auto it = homophones.find(c);
    if (it == homophones.end()) throw MissingMapping(c);
    if (pending_space && keep_spaces) line += ' ';
    pending_space = false;
    const std::string& element = it->second.size() == 1
                                     ? it->second.front()
                                     : it->second[rng.below(it->second.size())];
    line += element;
    flat += element;
    gold.push_back(element);
  }

  GeneratedCipher out{CipherText::from_flat("", CipherAlphabet::digits()),
                      Segmentation{std::move(gold)}, key, plaintext};
  std::vector<std::string> lines;
  if (!line.empty()) lines.push_back(std::move(line));
  out.ciphertext = CipherText::from_lines(std::move(lines));
  if (out.ciphertext.flat != flat)
    throw RuntimeFailure("encipher internal mismatch");
  return out;
}

CipherText reflow(const CipherText& text, size_t width) {
  if (width < 1) throw ValidationError("reflow width must be >= 1");
  std::vector<std::string> lines;
  const std::string& flat = text.flat;
  for (size_t pos = 0; pos < flat.size(); pos += width)
    lines.push_back(flat.substr(pos, width));
  return CipherText::from_lines(std::move(lines));
}

GeneratedCipher truncate_cipher(const GeneratedCipher& cipher,
                                size_t max_symbols) {
  size_t symbols = 0;
  size_t keep = 0;
  for (const auto& seg : cipher.gold.segments) {
    if (symbols + seg.size() > max_symbols) break;
    symbols += seg.size();
    ++keep;
  }
  // Plaintext prefix covering `keep` enciphered characters, preserving the
  // word spaces between them.
  std::string plain;
  size_t letters = 0;
  for (char c : cipher.plaintext.chars) {
    if (letters == keep && c != ' ') break;
    if (c != ' ') ++letters;
    plain += c;
  }
  while (!plain.empty() && plain.back() == ' ') plain.pop_back();

  std::vector<std::string> gold(cipher.gold.segments.begin(),
                                cipher.gold.segments.begin() + keep);
  // Rebuild the cipher line with the same space convention as the source.
  bool spaced = cipher.ciphertext.has_spaces();
  std::string line;
  size_t gi = 0;
  for (char c : plain) {
    if (c == ' ') {
      if (spaced && !line.empty()) line += ' ';
      continue;
    }
    line += gold[gi++];
  }
  GeneratedCipher out{CipherText::from_flat(""), Segmentation{std::move(gold)},
                      cipher.key, PlainText{std::move(plain)}};
  std::vector<std::string> lines;
  if (!line.empty()) lines.push_back(std::move(line));
  out.ciphertext = CipherText::from_lines(std::move(lines));
  return out;
}

std::vector<GeneratedCipher> truncate_series(
    const GeneratedCipher& cipher, const std::vector<size_t>& lengths) {
  std::vector<GeneratedCipher> out;
  out.reserve(lengths.size());
  for (size_t len : lengths) out.push_back(truncate_cipher(cipher, len));
  return out;
}

std::vector<size_t> power_of_two_lengths(size_t from, size_t to) {
  std::vector<size_t> out;
  for (size_t n = from; n <= to; n *= 2) out.push_back(n);
  return out;
}

PlainText normalize_plaintext(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c >= 'a' && c <= 'z') {
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += c;
    } else {
      pending_space = true;
    }
  }
  return PlainText{std::move(out)};
}

PlainText sample_plaintext(const PlainText& corpus, size_t target_letters,
                           Rng& rng) {
  const std::string& text = corpus.chars;
  size_t total_letters = 0;
  for (char c : text)
    if (c != ' ') ++total_letters;
  if (total_letters <= target_letters) return corpus;

  // Random start, moved forward to the next word boundary (wrapping to the
  // front when the draw lands inside the final word).
  size_t start = rng.below(text.size());
  while (start > 0 && start < text.size() && text[start - 1] != ' ') ++start;
  if (start >= text.size()) start = 0;
  std::string out;
  size_t letters = 0;
  size_t pos = start;
  while (letters < target_letters) {
    if (pos == text.size()) pos = 0;  // wrap
    char c = text[pos++];
    if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
    out += c;
    if (c != ' ') ++letters;
  }
  return PlainText{std::move(out)};
}

PlainText apply_key(const Segmentation& seg, const CipherKey& key) {
  std::string out;
  for (const auto& element : seg.segments) {
    const PlainUnit* u = key.find(element);
    if (u == nullptr)
      throw RuntimeFailure("segment \"" + element + "\" is not a key element");
    switch (u->kind) {
      case UnitKind::kLetters: out += u->text; break;
      case UnitKind::kNull: break;
      case UnitKind::kNomenclature:
        out += "<NOM:" + element + ">";
        break;
    }
  }
  return PlainText{std::move(out)};
}

size_t count_prefix_collisions(const CipherKey& key) {
  const auto& elems = key.sorted_elements();
  size_t n = 0;
  for (size_t i = 0; i < elems.size(); ++i)
    for (size_t j = i + 1; j < elems.size(); ++j) {
      if (!elems[j].starts_with(elems[i])) break;  // sorted: prefixes adjacent
      if (elems[j].size() > elems[i].size()) ++n;
    }
  return n;
}

}  // namespace numseg
