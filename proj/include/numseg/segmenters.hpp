#ifndef NUMSEG_SEGMENTERS_HPP
#define NUMSEG_SEGMENTERS_HPP

// Key-free cipher segmentation: 1-/2-digit baselines, constrained BPE, and
// the unigram-LM segmenter (EM training, Viterbi decoding).
//
// Boundary convention: word spaces, when present in the cipher, are hard
// segmentation boundaries. Without spaces the whole symbol stream is one
// span by default; `line_boundaries` additionally makes transcription
// lines hard boundaries.

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "numseg/core.hpp"

namespace numseg {

constexpr size_t kNoPieceCap = std::numeric_limits<size_t>::max();

// Log-probability floor: assigned to declared-but-unseen single symbols
// (kept so every alphabet string stays segmentable) and to pieces whose
// expected count underflows during EM.
constexpr double kUnseenPieceLogProb = -100.0;

// Fixed-width chunking of the symbol stream; chunking restarts at word
// spaces when the cipher has them. k=2 leaves a trailing 1-symbol segment
// on odd spans.
Segmentation baseline_segment(const CipherText& cipher, int k);

struct MergeVocabulary {
  std::vector<std::pair<std::string, std::string>> merges;  // replay order
  std::vector<std::string> pieces;  // observed singles + merge results, sorted
  size_t max_piece_len = kNoPieceCap;
  bool line_boundaries = false;
};

MergeVocabulary bpe_train(const CipherText& corpus, size_t vocab_size,
                          size_t max_piece_len = kNoPieceCap,
                          bool line_boundaries = false);
Segmentation bpe_segment(const CipherText& cipher,
                         const MergeVocabulary& vocab);

struct UnigramModel {
  std::map<std::string, double> piece_logp;  // natural log
  size_t max_piece_len = kNoPieceCap;
  bool line_boundaries = false;

  size_t longest_piece() const;
};

struct TrainingTrace {
  // One inner vector per EM round (between prunes); log-likelihood after
  // each E step, computed with the entering parameters.
  std::vector<std::vector<double>> rounds;
  bool non_decreasing_within_rounds(double rel_tol = 1e-9) const;
};

struct UnigramTrainOptions {
  size_t vocab_size = 36;
  size_t max_piece_len = kNoPieceCap;
  size_t seed_multiplier = 4;
  int em_iters = 2;
  double prune_fraction = 0.25;
  bool line_boundaries = false;
  size_t max_seed_piece_len = 16;  // cap on seed substrings when unlimited
};

struct UnigramTrainResult {
  UnigramModel model;
  TrainingTrace trace;
};

UnigramTrainResult unigram_train(const CipherText& corpus,
                                 const UnigramTrainOptions& options);

// Viterbi decoding; ties broken toward fewer segments, then the
// lexicographically smallest first segment.
Segmentation unigram_segment(const CipherText& cipher,
                             const UnigramModel& model);

// Piece count the unigram seeder can support (multi-symbol substrings
// occurring at least twice, plus observed singles); the "maximum
// vocabulary" target used for homophonic runs.
size_t max_unigram_vocab(const CipherText& corpus, size_t max_piece_len,
                         bool line_boundaries = false);

// Learned vocabulary + per-cipher output + training diagnostics.
struct SegmenterReport {
  std::string model_name;
  std::vector<std::string> vocabulary;
  Segmentation segmentation;
  TrainingTrace trace;
};

// --- segmentation lattice over one span ------------------------------------
// Shared by EM, Viterbi, and the forward-backward diagnostics checked in
// tests.
struct SpanLattice {
  struct Arc {
    size_t begin, end;   // [begin, end) over the span
    size_t piece;        // index into the owning piece list
    double logp;
  };
  size_t length = 0;
  std::vector<Arc> arcs;                  // sorted by (begin, end)
  std::vector<std::vector<size_t>> arcs_at;  // arc indices by begin position

  static SpanLattice build(std::string_view span,
                           const std::vector<std::string>& pieces,
                           const std::vector<double>& logp, size_t max_len);
  // Log forward/backward sums; alpha[L] is the span log-likelihood.
  std::vector<double> forward() const;
  std::vector<double> backward() const;
  // Posterior probability per arc; for every position, posteriors of the
  // arcs covering it sum to 1.
  std::vector<double> posteriors(double* log_z = nullptr) const;
};

// --- model files ------------------------------------------------------------
// Versioned JSON with an algorithm tag; see README for the schema.

std::string save_model_json(const MergeVocabulary& vocab);
std::string save_model_json(const UnigramModel& model);

enum class ModelKind { kBpe, kUnigram };
struct LoadedModel {
  ModelKind kind;
  MergeVocabulary bpe;
  UnigramModel unigram;
};
LoadedModel load_model_json(std::string_view bytes);

// Spans after applying the boundary convention, deduplicated with counts,
// in first-occurrence order.
std::vector<std::pair<std::string, size_t>> corpus_spans(
    const CipherText& corpus, bool line_boundaries);

}  // namespace numseg

#endif  // NUMSEG_SEGMENTERS_HPP
