#include "numseg/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "numseg/rng.hpp"

namespace numseg {

namespace fs = std::filesystem;
using nlohmann::json;

// --- config ----------------------------------------------------------------

Config Config::from_file(const std::string& path) {
  return from_string(read_file(path));
}

Config Config::from_string(std::string_view text) {
  Config c;
  size_t pos = 0;
  size_t line_no = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' ||
                             line.back() == '\t'))
      line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t'))
      line.remove_prefix(1);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    std::string key(line.substr(0, eq));
    std::string value(line.substr(eq + 1));
    auto trim = [](std::string& s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.erase(s.begin());
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    };
    trim(key);
    trim(value);
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    c.kv_[key] = value;
  }
  return c;
}

void Config::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

void Config::apply_override(const std::string& key_eq_value) {
  size_t eq = key_eq_value.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must be key=value: " + key_eq_value);
  kv_[key_eq_value.substr(0, eq)] = key_eq_value.substr(eq + 1);
}

bool Config::has(const std::string& key) const { return kv_.count(key) != 0; }

std::string Config::get_str(const std::string& key,
                            const std::string& dflt) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

int64_t Config::get_int(const std::string& key, int64_t dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": expected integer, got \"" +
                      it->second + "\"");
  }
}

double Config::get_double(const std::string& key, double dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": expected number, got \"" +
                      it->second + "\"");
  }
}

bool Config::get_bool(const std::string& key, bool dflt) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return dflt;
  const std::string& v = it->second;
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError("config key " + key + ": expected boolean, got \"" + v +
                    "\"");
}

// --- files -------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write file: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

PlainText load_corpus(const std::string& path) {
  PlainText t = normalize_plaintext(read_file(path));
  if (t.chars.empty()) throw EmptyCorpus("corpus has no usable text: " + path);
  return t;
}

// --- segmenter dispatch -------------------------------------------------

const std::vector<std::string>& all_model_names() {
  static const std::vector<std::string> names{"1-dig",   "2-dig",   "bpe",
                                              "bpe2",    "unigram", "unigram2"};
  return names;
}

namespace {

std::vector<std::string> parse_models(const Config& config) {
  std::string spec = config.get_str("models", "");
  if (spec.empty()) return all_model_names();
  std::vector<std::string> out;
  std::istringstream is(spec);
  std::string name;
  while (std::getline(is, name, ',')) {
    if (name.empty()) continue;
    if (std::find(all_model_names().begin(), all_model_names().end(), name) ==
        all_model_names().end())
      throw ConfigError("unknown model: " + name);
    out.push_back(name);
  }
  if (out.empty()) throw ConfigError("empty model list");
  return out;
}

size_t resolve_vocab_size(const Config& config, const CipherText& input,
                          size_t cap, bool lines_hard) {
  std::string v = config.get_str("vocab_size", "36");
  if (v == "max") return max_unigram_vocab(input, cap, lines_hard);
  try {
    return static_cast<size_t>(std::stoull(v));
  } catch (const std::exception&) {
    throw ConfigError("vocab_size must be an integer or \"max\"");
  }
}

std::vector<std::string> distinct_segments(const Segmentation& seg) {
  std::set<std::string> s(seg.segments.begin(), seg.segments.end());
  return {s.begin(), s.end()};
}

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", fraction * 100.0);
  return buf;
}

}  // namespace

SegmenterReport run_segmenter(const std::string& model_name,
                              const CipherText& input, const Config& config) {
  const bool lines_hard = config.get_bool("line_boundaries", false);
  SegmenterReport report;
  report.model_name = model_name;

  if (model_name == "1-dig" || model_name == "2-dig") {
    report.segmentation = baseline_segment(input, model_name[0] - '0');
    report.vocabulary = distinct_segments(report.segmentation);
    return report;
  }

  const size_t cap = (model_name == "bpe2" || model_name == "unigram2")
                         ? 2
                         : kNoPieceCap;
  const size_t vocab_size = resolve_vocab_size(config, input, cap, lines_hard);

  if (model_name == "bpe" || model_name == "bpe2") {
    MergeVocabulary vocab = bpe_train(input, vocab_size, cap, lines_hard);
    report.segmentation = bpe_segment(input, vocab);
    report.vocabulary = vocab.pieces;
    return report;
  }
  if (model_name == "unigram" || model_name == "unigram2") {
    UnigramTrainOptions opt;
    opt.vocab_size = vocab_size;
    opt.max_piece_len = cap;
    opt.seed_multiplier =
        static_cast<size_t>(config.get_int("seed_multiplier", 4));
    opt.em_iters = static_cast<int>(config.get_int("em_iters", 2));
    opt.prune_fraction = config.get_double("prune_fraction", 0.25);
    opt.line_boundaries = lines_hard;
    UnigramTrainResult result = unigram_train(input, opt);
    report.segmentation = unigram_segment(input, result.model);
    report.trace = std::move(result.trace);
    for (const auto& [piece, lp] : result.model.piece_logp)
      if (lp > kUnseenPieceLogProb + 1.0) report.vocabulary.push_back(piece);
    return report;
  }
  throw ConfigError("unknown model: " + model_name);
}

// --- experiments ----------------------------------------------------------

namespace {

struct BatchParams {
  PlainText corpus;
  size_t n_ciphers;
  size_t length;
  bool spaces;
  uint64_t seed;
  size_t reflow_width;
  KeySpec key_spec;  // seedless template; per-cipher seed filled in
};

CipherRun make_run(size_t id, const BatchParams& p) {
  CipherRun run;
  run.id = id;
  Rng window_rng(mix_seed(p.seed, id * 3));
  PlainText plain = sample_plaintext(p.corpus, p.length, window_rng);
  KeySpec key_spec = p.key_spec;
  key_spec.rng_seed = mix_seed(p.seed, id * 3 + 1);
  CipherKey key = generate_key(key_spec);
  GeneratedCipher gc =
      encipher(plain, key, p.spaces, mix_seed(p.seed, id * 3 + 2));
  run.cipher = truncate_cipher(gc, p.length);
  run.input = p.spaces ? run.cipher.ciphertext
                       : reflow(run.cipher.ciphertext, p.reflow_width);
  return run;
}

void evaluate_run(CipherRun& run, const std::vector<std::string>& models,
                  const Config& config, size_t* em_violations) {
  std::set<std::string> gold_vocab(run.cipher.gold.segments.begin(),
                                   run.cipher.gold.segments.end());
  for (const auto& model : models) {
    SegmenterReport report = run_segmenter(model, run.input, config);
    if (!report.trace.non_decreasing_within_rounds()) ++*em_violations;
    validate_segmentation(report.segmentation, run.input);
    std::set<std::string> learned(report.vocabulary.begin(),
                                  report.vocabulary.end());
    F1Scores f1 = vocab_f1(learned, gold_vocab);
    ModelScores s;
    s.precision = f1.precision;
    s.recall = f1.recall;
    s.f1 = f1.f1;
    s.seg_er = seg_er(report.segmentation, run.cipher.gold);
    run.scores[model] = s;
    run.hyps[model] = std::move(report.segmentation);
    run.learned[model] = std::move(report.vocabulary);
  }
}

void compute_means(ExperimentTable& table) {
  for (const auto& model : table.models) {
    ModelScores mean;
    for (const auto& run : table.runs) {
      const ModelScores& s = run.scores.at(model);
      mean.precision += s.precision;
      mean.recall += s.recall;
      mean.f1 += s.f1;
      mean.seg_er += s.seg_er;
    }
    double n = static_cast<double>(table.runs.size());
    mean.precision /= n;
    mean.recall /= n;
    mean.f1 /= n;
    mean.seg_er /= n;
    table.means[model] = mean;
  }
}

ExperimentTable run_batch(const Config& config, const KeySpec& key_spec,
                          bool default_spaces, bool evaluate = true) {
  BatchParams p;
  std::string corpus_path = config.get_str("corpus", "");
  if (corpus_path.empty()) throw ConfigError("config key \"corpus\" is required");
  p.corpus = load_corpus(corpus_path);
  p.n_ciphers = static_cast<size_t>(config.get_int("n_ciphers", 100));
  p.length = static_cast<size_t>(config.get_int("length", 2048));
  if (p.n_ciphers < 1 || p.length < 1)
    throw ConfigError("n_ciphers and length must be positive");
  p.spaces = config.get_bool("spaces", default_spaces);
  p.seed = static_cast<uint64_t>(config.get_int("seed", 1));
  p.reflow_width = static_cast<size_t>(config.get_int("reflow_width", 43));
  p.key_spec = key_spec;

  ExperimentTable table;
  if (evaluate) table.models = parse_models(config);
  for (size_t i = 0; i < p.n_ciphers; ++i) {
    CipherRun run = make_run(i, p);
    evaluate_run(run, table.models, config, &table.em_monotonicity_violations);
    table.runs.push_back(std::move(run));
  }
  compute_means(table);
  return table;
}

KeySpec key_spec_from(const Config& config, int default_vowel,
                      int default_consonant) {
  KeySpec spec;
  spec.homophones_per_vowel =
      static_cast<int>(config.get_int("homophones_vowel", default_vowel));
  spec.homophones_per_consonant = static_cast<int>(
      config.get_int("homophones_consonant", default_consonant));
  spec.null_elements = static_cast<int>(config.get_int("null_elements", 0));
  spec.nomenclature_elements =
      static_cast<int>(config.get_int("nomenclature_elements", 0));
  return spec;
}

}  // namespace

ExperimentTable run_mono_experiment(const Config& config) {
  return run_batch(config, key_spec_from(config, 1, 1),
                   /*default_spaces=*/true);
}

ExperimentTable run_homophonic_experiment(const Config& config) {
  Config c = config;
  if (!c.has("vocab_size")) c.set("vocab_size", "max");
  return run_batch(c, key_spec_from(config, 3, 1), /*default_spaces=*/false);
}

ExperimentTable run_generation(const Config& config) {
  bool homophonic = config.get_int("homophones_vowel", 1) > 1 ||
                    config.get_int("homophones_consonant", 1) > 1;
  return run_batch(config, key_spec_from(config, homophonic ? 3 : 1, 1),
                   /*default_spaces=*/!homophonic, /*evaluate=*/false);
}

LengthCurve run_length_study(const Config& config) {
  std::string corpus_path = config.get_str("corpus", "");
  if (corpus_path.empty()) throw ConfigError("config key \"corpus\" is required");
  PlainText corpus = load_corpus(corpus_path);
  uint64_t seed = static_cast<uint64_t>(config.get_int("seed", 1));
  bool spaces = config.get_bool("spaces", true);
  size_t reflow_width = static_cast<size_t>(config.get_int("reflow_width", 43));
  size_t len_from = static_cast<size_t>(config.get_int("length_from", 128));
  size_t len_to = static_cast<size_t>(config.get_int("length_to", 16384));
  if (len_from < 1 || len_to < len_from)
    throw ConfigError("length_from/length_to must satisfy 1 <= from <= to");

  LengthCurve curve;
  curve.lengths = power_of_two_lengths(len_from, len_to);
  curve.models = parse_models(config);

  Rng window_rng(mix_seed(seed, 0));
  PlainText plain = sample_plaintext(corpus, len_to, window_rng);
  KeySpec key_spec;
  key_spec.rng_seed = mix_seed(seed, 1);
  CipherKey key = generate_key(key_spec);
  GeneratedCipher full = encipher(plain, key, spaces, mix_seed(seed, 2));

  size_t dummy_violations = 0;
  for (size_t len : curve.lengths) {
    CipherRun run;
    run.cipher = truncate_cipher(full, len);
    run.input = spaces ? run.cipher.ciphertext
                       : reflow(run.cipher.ciphertext, reflow_width);
    evaluate_run(run, curve.models, config, &dummy_violations);
    for (const auto& model : curve.models)
      curve.scores[model].push_back(run.scores.at(model));
  }
  return curve;
}

// --- reports ---------------------------------------------------------------

std::string ExperimentTable::summary_csv() const {
  std::string out = "model,f1_pct,seg_er_pct\n";
  for (const auto& model : models) {
    const ModelScores& s = means.at(model);
    out += model + "," + pct(s.f1) + "," + pct(s.seg_er) + "\n";
  }
  return out;
}

std::string ExperimentTable::per_cipher_csv() const {
  std::string out = "cipher,model,precision_pct,recall_pct,f1_pct,seg_er_pct\n";
  for (const auto& run : runs)
    for (const auto& model : models) {
      const ModelScores& s = run.scores.at(model);
      out += std::to_string(run.id) + "," + model + "," + pct(s.precision) +
             "," + pct(s.recall) + "," + pct(s.f1) + "," + pct(s.seg_er) +
             "\n";
    }
  return out;
}

std::string ExperimentTable::to_json() const {
  json j;
  j["models"] = models;
  j["n_ciphers"] = runs.size();
  json means_j = json::object();
  for (const auto& model : models) {
    const ModelScores& s = means.at(model);
    means_j[model] = {{"precision_pct", s.precision * 100.0},
                      {"recall_pct", s.recall * 100.0},
                      {"f1_pct", s.f1 * 100.0},
                      {"seg_er_pct", s.seg_er * 100.0}};
  }
  j["means"] = means_j;
  return j.dump(2) + "\n";
}

std::string LengthCurve::csv() const {
  std::string out = "model,length,f1_pct,seg_er_pct\n";
  for (const auto& model : models) {
    const auto& row = scores.at(model);
    for (size_t i = 0; i < lengths.size(); ++i)
      out += model + "," + std::to_string(lengths[i]) + "," + pct(row[i].f1) +
             "," + pct(row[i].seg_er) + "\n";
  }
  return out;
}

std::string LengthCurve::to_json() const {
  json j;
  j["lengths"] = lengths;
  json per_model = json::object();
  for (const auto& model : models) {
    json rows = json::array();
    const auto& row = scores.at(model);
    for (size_t i = 0; i < lengths.size(); ++i)
      rows.push_back({{"length", lengths[i]},
                      {"f1_pct", row[i].f1 * 100.0},
                      {"seg_er_pct", row[i].seg_er * 100.0}});
    per_model[model] = rows;
  }
  j["models"] = per_model;
  return j.dump(2) + "\n";
}

void write_artifacts(const ExperimentTable& table, const std::string& dir) {
  if (!table.models.empty()) {
    write_file(dir + "/summary.csv", table.summary_csv());
    write_file(dir + "/per_cipher.csv", table.per_cipher_csv());
    write_file(dir + "/summary.json", table.to_json());
  }
  for (const auto& run : table.runs) {
    char name[32];
    std::snprintf(name, sizeof(name), "%03zu", run.id);
    std::string base = dir + "/ciphers/" + name;
    write_file(base + "/cipher.txt", serialize_cipher(run.input));
    write_file(base + "/gold.txt", serialize_segmentation(run.cipher.gold));
    write_file(base + "/key.tsv", serialize_key(run.cipher.key));
    write_file(base + "/plain.txt", run.cipher.plaintext.chars + "\n");
    for (const auto& [model, hyp] : run.hyps)
      write_file(base + "/seg_" + model + ".txt", serialize_segmentation(hyp));
  }
}

}  // namespace numseg
