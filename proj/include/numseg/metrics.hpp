#ifndef NUMSEG_METRICS_HPP
#define NUMSEG_METRICS_HPP

// Evaluation metrics: vocabulary F1, Segmentation Error Rate (segment-level
// edit distance / reference segments) and character-level TER. Pure
// functions, thread-safe.

#include <optional>
#include <set>
#include <string>

#include "numseg/core.hpp"

namespace numseg {

struct F1Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Exact-match set precision/recall/F1 of a learned piece inventory against
// the distinct segments of the gold segmentation.
F1Scores vocab_f1(const std::set<std::string>& learned,
                  const std::set<std::string>& gold);

struct EditStats {
  size_t edits = 0;
  size_t ref_len = 0;
  double rate() const;
};

// Levenshtein over segment sequences, segments compared as atomic strings.
EditStats seg_edit_stats(const Segmentation& hyp, const Segmentation& ref);
double seg_er(const Segmentation& hyp, const Segmentation& ref);

// Character-level Levenshtein / reference length.
EditStats ter_stats(const PlainText& hyp, const PlainText& ref);
double ter(const PlainText& hyp, const PlainText& ref);

// Collapses "<NOM:...>" placeholders to a single class character so TER
// scores nomenclature positions as one symbol.
std::string map_nom_to_class(std::string_view text, char cls = '#');

// One evaluation's scores; fields are present per evaluation mode. Rates
// are fractions (0.146 = 14.6%); percentages appear only in the reports.
struct EvalReport {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::optional<double> seg_er;
  std::optional<double> ter;
  size_t edits = 0;      // for seg_er / ter
  size_t ref_count = 0;  // reference segments or characters

  static EvalReport for_f1(const std::set<std::string>& learned,
                           const std::set<std::string>& gold);
  static EvalReport for_seg_er(const Segmentation& hyp, const Segmentation& ref);
  static EvalReport for_ter(const PlainText& hyp, const PlainText& ref);

  std::string to_json() const;  // percentages, fixed key order
  std::string to_tsv() const;
};

}  // namespace numseg

#endif  // NUMSEG_METRICS_HPP
