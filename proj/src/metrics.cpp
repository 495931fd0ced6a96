#include "numseg/metrics.hpp"

#include <algorithm>
#include <unordered_map>
#include <vector>

namespace numseg {

namespace {

// Two-row Levenshtein over id sequences.
size_t edit_distance(const std::vector<int32_t>& a,
                     const std::vector<int32_t>& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<size_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::vector<int32_t> intern(const std::vector<std::string>& items,
                            std::unordered_map<std::string, int32_t>& ids) {
  std::vector<int32_t> out;
  out.reserve(items.size());
  for (const auto& s : items) {
    auto [it, inserted] = ids.emplace(s, static_cast<int32_t>(ids.size()));
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

double EditStats::rate() const {
  return static_cast<double>(edits) / static_cast<double>(ref_len);
}

F1Scores vocab_f1(const std::set<std::string>& learned,
                  const std::set<std::string>& gold) {
  if (gold.empty()) throw EmptyReference("gold vocabulary is empty");
  if (learned.empty()) return {};
  size_t hits = 0;
  for (const auto& piece : learned)
    if (gold.count(piece)) ++hits;
  F1Scores s;
  s.precision = static_cast<double>(hits) / learned.size();
  s.recall = static_cast<double>(hits) / gold.size();
  if (hits > 0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

EditStats seg_edit_stats(const Segmentation& hyp, const Segmentation& ref) {
  if (ref.segments.empty()) throw EmptyReference("reference segmentation is empty");
  std::unordered_map<std::string, int32_t> ids;
  std::vector<int32_t> a = intern(hyp.segments, ids);
  std::vector<int32_t> b = intern(ref.segments, ids);
  return {edit_distance(a, b), ref.segments.size()};
}

double seg_er(const Segmentation& hyp, const Segmentation& ref) {
  return seg_edit_stats(hyp, ref).rate();
}

EditStats ter_stats(const PlainText& hyp, const PlainText& ref) {
  if (ref.chars.empty()) throw EmptyReference("reference plaintext is empty");
  std::vector<int32_t> a(hyp.chars.begin(), hyp.chars.end());
  std::vector<int32_t> b(ref.chars.begin(), ref.chars.end());
  return {edit_distance(a, b), ref.chars.size()};
}

double ter(const PlainText& hyp, const PlainText& ref) {
  return ter_stats(hyp, ref).rate();
}

std::string map_nom_to_class(std::string_view text, char cls) {
  std::string out;
  size_t pos = 0;
  while (pos < text.size()) {
    if (text.compare(pos, 5, "<NOM:") == 0) {
      size_t end = text.find('>', pos);
      if (end != std::string_view::npos) {
        out += cls;
        pos = end + 1;
        continue;
      }
    }
    out += text[pos++];
  }
  return out;
}

EvalReport EvalReport::for_f1(const std::set<std::string>& learned,
                              const std::set<std::string>& gold) {
  F1Scores s = vocab_f1(learned, gold);
  EvalReport r;
  r.precision = s.precision;
  r.recall = s.recall;
  r.f1 = s.f1;
  return r;
}

EvalReport EvalReport::for_seg_er(const Segmentation& hyp,
                                  const Segmentation& ref) {
  EditStats stats = seg_edit_stats(hyp, ref);
  EvalReport r;
  r.seg_er = stats.rate();
  r.edits = stats.edits;
  r.ref_count = stats.ref_len;
  return r;
}

EvalReport EvalReport::for_ter(const PlainText& hyp, const PlainText& ref) {
  EditStats stats = ter_stats(hyp, ref);
  EvalReport r;
  r.ter = stats.rate();
  r.edits = stats.edits;
  r.ref_count = stats.ref_len;
  return r;
}

namespace {

void append_field(std::string& out, const char* key,
                  const std::optional<double>& rate, bool json) {
  if (!rate.has_value()) return;
  char buf[64];
  if (json)
    std::snprintf(buf, sizeof(buf), ",\n  \"%s_pct\": %.4f", key, *rate * 100.0);
  else
    std::snprintf(buf, sizeof(buf), "%s_pct\t%.4f\n", key, *rate * 100.0);
  out += buf;
}

}  // namespace

std::string EvalReport::to_json() const {
  bool edit_metric = seg_er.has_value() || ter.has_value();
  std::string out = "{";
  char buf[96];
  if (edit_metric) {
    std::snprintf(buf, sizeof(buf), "\n  \"edits\": %zu,\n  \"ref_count\": %zu",
                  edits, ref_count);
    out += buf;
  } else {
    out += "\n  \"edits\": null,\n  \"ref_count\": null";
  }
  append_field(out, "precision", precision, true);
  append_field(out, "recall", recall, true);
  append_field(out, "f1", f1, true);
  append_field(out, "seg_er", seg_er, true);
  append_field(out, "ter", ter, true);
  out += "\n}\n";
  return out;
}

std::string EvalReport::to_tsv() const {
  std::string out;
  if (seg_er.has_value() || ter.has_value()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "edits\t%zu\nref_count\t%zu\n", edits,
                  ref_count);
    out += buf;
  }
  append_field(out, "precision", precision, false);
  append_field(out, "recall", recall, false);
  append_field(out, "f1", f1, false);
  append_field(out, "seg_er", seg_er, false);
  append_field(out, "ter", ter, false);
  return out;
}

}  // namespace numseg
