#include "numseg/core.hpp"

#include <algorithm>
#include <sstream>

namespace numseg {

CipherAlphabet::CipherAlphabet(std::string_view symbols) : symbols_(symbols) {
  if (symbols_.empty())
    throw ValidationError("cipher alphabet must be non-empty");
  std::string sorted = symbols_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("cipher alphabet symbols must be unique");
  if (symbols_.find(' ') != std::string::npos ||
      symbols_.find('\n') != std::string::npos)
    throw ValidationError("space and newline are reserved separators");
}

const CipherAlphabet& CipherAlphabet::digits() {
  static const CipherAlphabet a("0123456789");
  return a;
}

bool CipherAlphabet::contains(char c) const {
  return symbols_.find(c) != std::string::npos;
}

CipherText CipherText::from_lines(std::vector<std::string> lines,
                                  const CipherAlphabet& alphabet) {
  CipherText t;
  for (size_t li = 0; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    for (size_t ci = 0; ci < line.size(); ++ci) {
      char c = line[ci];
      if (c == ' ') continue;
      if (!alphabet.contains(c))
        throw AlphabetError(std::string("character '") + c +
                                "' not in cipher alphabet",
                            li + 1, ci + 1);
      t.flat.push_back(c);
    }
  }
  t.lines = std::move(lines);
  return t;
}

CipherText CipherText::from_flat(std::string flat,
                                 const CipherAlphabet& alphabet) {
  std::vector<std::string> lines;
  if (!flat.empty()) lines.push_back(flat);
  return from_lines(std::move(lines), alphabet);
}

bool CipherText::has_spaces() const {
  for (const auto& line : lines)
    if (line.find(' ') != std::string::npos) return true;
  return false;
}

CipherKey::CipherKey(std::vector<KeyEntry> entries)
    : entries_(std::move(entries)) {
  for (size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.element.empty())
      throw ValidationError("cipher element must be non-empty");
    if (!by_element_.emplace(e.element, i).second)
      throw DuplicateElement(e.element);
    sorted_.push_back(e.element);
  }
  std::sort(sorted_.begin(), sorted_.end());
  // Prefix-freeness: with elements sorted, a prefix is adjacent.
  deterministic_ = true;
  for (size_t i = 0; i + 1 < sorted_.size(); ++i) {
    if (sorted_[i + 1].starts_with(sorted_[i])) {
      deterministic_ = false;
      break;
    }
  }
}

const PlainUnit* CipherKey::find(std::string_view element) const {
  auto it = by_element_.find(std::string(element));
  if (it == by_element_.end()) return nullptr;
  return &entries_[it->second].target;
}

std::string Segmentation::joined() const {
  std::string out;
  for (const auto& s : segments) out += s;
  return out;
}

namespace {

constexpr std::string_view kNomMarker = "@NOM";
constexpr std::string_view kNullMarker = "@NULL";
constexpr std::string_view kAlphabetHeader = "#alphabet ";

std::vector<std::string_view> split_lines(std::string_view bytes) {
  std::vector<std::string_view> out;
  size_t pos = 0;
  while (pos < bytes.size()) {
    size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) nl = bytes.size();
    std::string_view line = bytes.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    pos = nl + 1;
  }
  return out;
}

std::optional<CipherAlphabet> header_alphabet(std::string_view line) {
  if (!line.starts_with(kAlphabetHeader)) return std::nullopt;
  return CipherAlphabet(line.substr(kAlphabetHeader.size()));
}

void check_element_symbols(std::string_view element,
                           const CipherAlphabet& alphabet, size_t line_no) {
  for (size_t i = 0; i < element.size(); ++i)
    if (!alphabet.contains(element[i]))
      throw AlphabetError(std::string("key element symbol '") + element[i] +
                              "' not in cipher alphabet",
                          line_no, i + 1);
}

}  // namespace

CipherKey parse_key_file(std::string_view bytes,
                         const CipherAlphabet& default_alphabet) {
  CipherAlphabet alphabet = default_alphabet;
  std::vector<KeyEntry> entries;
  auto lines = split_lines(bytes);
  for (size_t li = 0; li < lines.size(); ++li) {
    std::string_view line = lines[li];
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (auto a = header_alphabet(line)) alphabet = *a;
      continue;
    }
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw ValidationError("key line " + std::to_string(li + 1) +
                            ": expected element<TAB>target");
    std::string element(line.substr(0, tab));
    std::string_view target = line.substr(tab + 1);
    check_element_symbols(element, alphabet, li + 1);
    PlainUnit unit;
    if (target == kNomMarker) {
      unit = PlainUnit::nomenclature();
    } else if (target == kNullMarker) {
      unit = PlainUnit::null();
    } else if (target.empty()) {
      throw ValidationError("key line " + std::to_string(li + 1) +
                            ": empty target");
    } else {
      unit = PlainUnit::letters(std::string(target));
    }
    entries.push_back({std::move(element), std::move(unit)});
  }
  return CipherKey(std::move(entries));
}

ParsedCipher parse_cipher_file(std::string_view bytes,
                               const CipherAlphabet& default_alphabet) {
  CipherAlphabet alphabet = default_alphabet;
  std::vector<std::string> lines;
  std::vector<std::string> segments;
  bool any_space = false;
  auto raw_lines = split_lines(bytes);
  for (size_t li = 0; li < raw_lines.size(); ++li) {
    std::string_view line = raw_lines[li];
    if (!line.empty() && line.front() == '#') {
      if (auto a = header_alphabet(line)) alphabet = *a;
      continue;
    }
    if (line.empty()) continue;
    for (size_t ci = 0; ci < line.size(); ++ci) {
      char c = line[ci];
      if (c == ' ') continue;
      if (!alphabet.contains(c))
        throw AlphabetError(std::string("character '") + c +
                                "' not in cipher alphabet",
                            li + 1, ci + 1);
    }
    if (line.find(' ') != std::string_view::npos) any_space = true;
    std::string cur;
    for (char c : line) {
      if (c == ' ') {
        if (!cur.empty()) segments.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) segments.push_back(std::move(cur));
    lines.emplace_back(line);
  }
  ParsedCipher out;
  out.alphabet = alphabet;
  out.text = CipherText::from_lines(std::move(lines), alphabet);
  if (any_space) out.gold = Segmentation{std::move(segments)};
  return out;
}

std::string serialize_segmentation(const Segmentation& seg,
                                   const CipherText* source) {
  if (seg.segments.empty()) return "";
  // Try to keep the source's line boundaries when the segmentation aligns
  // with them.
  if (source != nullptr) {
    std::vector<size_t> line_lens;
    for (const auto& line : source->lines) {
      size_t n = 0;
      for (char c : line)
        if (c != ' ') ++n;
      line_lens.push_back(n);
    }
    std::ostringstream os;
    size_t li = 0, consumed = 0;
    bool aligned = true;
    std::string cur;
    for (const auto& s : seg.segments) {
      if (li >= line_lens.size()) {
        aligned = false;
        break;
      }
      if (!cur.empty()) cur += ' ';
      cur += s;
      consumed += s.size();
      if (consumed == line_lens[li]) {
        os << cur << '\n';
        cur.clear();
        consumed = 0;
        ++li;
      } else if (consumed > line_lens[li]) {
        aligned = false;
        break;
      }
    }
    if (aligned && cur.empty() && li == line_lens.size()) return os.str();
  }
  std::string out;
  for (size_t i = 0; i < seg.segments.size(); ++i) {
    if (i) out += ' ';
    out += seg.segments[i];
  }
  out += '\n';
  return out;
}

std::string serialize_key(const CipherKey& key) {
  std::string out;
  for (const auto& e : key.entries()) {
    out += e.element;
    out += '\t';
    switch (e.target.kind) {
      case UnitKind::kLetters: out += e.target.text; break;
      case UnitKind::kNomenclature: out += kNomMarker; break;
      case UnitKind::kNull: out += kNullMarker; break;
    }
    out += '\n';
  }
  return out;
}

std::string serialize_cipher(const CipherText& text) {
  std::string out;
  for (const auto& line : text.lines) {
    out += line;
    out += '\n';
  }
  return out;
}

bool is_valid_segmentation(const Segmentation& seg, const CipherText& source) {
  for (const auto& s : seg.segments)
    if (s.empty()) return false;
  return seg.joined() == source.flat;
}

void validate_segmentation(const Segmentation& seg, const CipherText& source) {
  if (!is_valid_segmentation(seg, source))
    throw RuntimeFailure("segmentation does not concatenate to source text");
}

}  // namespace numseg
