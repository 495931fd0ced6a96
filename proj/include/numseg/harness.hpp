#ifndef NUMSEG_HARNESS_HPP
#define NUMSEG_HARNESS_HPP

// Experiment driver: batch generation, training, segmentation and
// evaluation, emitting the monoalphabetic/homophonic score tables and the
// cipher-length curve as CSV/JSON. Config plus seed fully determine every
// emitted byte.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "numseg/ciphergen.hpp"
#include "numseg/core.hpp"
#include "numseg/metrics.hpp"
#include "numseg/segmenters.hpp"

namespace numseg {

// Flat key=value text file; '#' starts a comment. Every key can be
// overridden from the command line.
class Config {
public:
  static Config from_file(const std::string& path);
  static Config from_string(std::string_view text);

  void set(const std::string& key, const std::string& value);
  void apply_override(const std::string& key_eq_value);

  bool has(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& dflt) const;
  int64_t get_int(const std::string& key, int64_t dflt) const;
  double get_double(const std::string& key, double dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

private:
  std::map<std::string, std::string> kv_;
};

// Paper table row order.
const std::vector<std::string>& all_model_names();  // 1-dig ... unigram2

struct ModelScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double seg_er = 0.0;
};

struct CipherRun {
  size_t id = 0;
  GeneratedCipher cipher;
  CipherText input;  // what the segmenters saw (spaced or reflowed)
  std::map<std::string, Segmentation> hyps;
  std::map<std::string, std::vector<std::string>> learned;
  std::map<std::string, ModelScores> scores;
};

struct ExperimentTable {
  std::vector<std::string> models;
  std::vector<CipherRun> runs;
  std::map<std::string, ModelScores> means;
  size_t em_monotonicity_violations = 0;

  std::string summary_csv() const;     // model, f1%, seg_er%
  std::string per_cipher_csv() const;  // cipher, model, p%, r%, f1%, seg_er%
  std::string to_json() const;
};

// Segmentation of one cipher with one named model; the shared path under
// all experiments.
SegmenterReport run_segmenter(const std::string& model_name,
                              const CipherText& input, const Config& config);

// 100-cipher monoalphabetic batch (config: corpus, n_ciphers, length,
// spaces, seed, models, vocab_size, reflow_width, ...).
ExperimentTable run_mono_experiment(const Config& config);

// Synthetic homophonic batch; vocab size defaults to the unigram seeder's
// maximum.
ExperimentTable run_homophonic_experiment(const Config& config);

// Batch generation only: ciphers, gold segmentations, keys and plaintexts,
// no segmenter runs. Homophonic when the config says so.
ExperimentTable run_generation(const Config& config);

struct LengthCurve {
  std::vector<size_t> lengths;
  std::vector<std::string> models;
  std::map<std::string, std::vector<ModelScores>> scores;  // per length

  std::string csv() const;  // model, length, f1%, seg_er%
  std::string to_json() const;
};

// One long cipher truncated to power-of-two lengths (default 128..16384).
LengthCurve run_length_study(const Config& config);

// Per-cipher artifacts (cipher/gold/key/plain + per-model segmentations)
// plus summary CSV/JSON under `dir`; every table number is recomputable
// from these files with the metrics module alone.
void write_artifacts(const ExperimentTable& table, const std::string& dir);

// File helpers shared with the CLI.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);
PlainText load_corpus(const std::string& path);

}  // namespace numseg

#endif  // NUMSEG_HARNESS_HPP
