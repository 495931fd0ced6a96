// numseg -- numerical-cipher segmentation toolkit.
//
// Subcommands: gen, train, segment, decipher, eval, experiment.
// Exit codes: 0 success, 1 validation error, 2 runtime failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "numseg/charlm.hpp"
#include "numseg/ciphergen.hpp"
#include "numseg/decipher.hpp"
#include "numseg/harness.hpp"
#include "numseg/metrics.hpp"
#include "numseg/segmenters.hpp"

namespace {

using namespace numseg;

Config config_from(const std::string& path,
                   const std::vector<std::string>& overrides) {
  Config c = path.empty() ? Config() : Config::from_file(path);
  for (const auto& kv : overrides) c.apply_override(kv);
  return c;
}

int cmd_gen(const std::string& spec_path, uint64_t seed,
            const std::string& out_dir,
            const std::vector<std::string>& overrides) {
  Config config = config_from(spec_path, overrides);
  config.set("seed", std::to_string(seed));
  ExperimentTable table = run_generation(config);
  write_artifacts(table, out_dir);
  std::printf("generated %zu ciphers under %s\n", table.runs.size(),
              out_dir.c_str());
  return 0;
}

int cmd_train(const std::string& algo, const std::string& in_path,
              const std::string& out_path, const std::string& vocab,
              size_t max_piece, int order,
              const std::vector<std::string>& overrides) {
  Config config = config_from("", overrides);
  if (algo == "charlm") {
    std::string raw = read_file(in_path);
    std::vector<std::string> lines;
    std::string line;
    for (char c : raw) {
      if (c == '\n') {
        PlainText t = normalize_plaintext(line);
        if (!t.chars.empty()) lines.push_back(t.chars);
        line.clear();
      } else {
        line += c;
      }
    }
    CharNgramLm lm = lm_train(lines, order);
    write_file(out_path, lm.to_arpa());
    std::printf("trained %d-gram character LM on %zu lines -> %s\n", order,
                lines.size(), out_path.c_str());
    return 0;
  }

  ParsedCipher parsed = parse_cipher_file(read_file(in_path));
  config.set("vocab_size", vocab);
  bool lines_hard = config.get_bool("line_boundaries", false);
  size_t cap = max_piece == 0 ? kNoPieceCap : max_piece;
  size_t vocab_size = 0;
  if (vocab == "max") {
    vocab_size = max_unigram_vocab(parsed.text, cap, lines_hard);
  } else {
    vocab_size = static_cast<size_t>(std::stoull(vocab));
  }

  if (algo == "bpe") {
    MergeVocabulary v = bpe_train(parsed.text, vocab_size, cap, lines_hard);
    write_file(out_path, save_model_json(v));
    std::printf("trained BPE: %zu pieces, %zu merges -> %s\n",
                v.pieces.size(), v.merges.size(), out_path.c_str());
  } else if (algo == "unigram") {
    UnigramTrainOptions opt;
    opt.vocab_size = vocab_size;
    opt.max_piece_len = cap;
    opt.seed_multiplier =
        static_cast<size_t>(config.get_int("seed_multiplier", 4));
    opt.em_iters = static_cast<int>(config.get_int("em_iters", 2));
    opt.prune_fraction = config.get_double("prune_fraction", 0.25);
    opt.line_boundaries = lines_hard;
    UnigramTrainResult r = unigram_train(parsed.text, opt);
    write_file(out_path, save_model_json(r.model));
    std::printf("trained unigram LM: %zu pieces, %zu EM rounds -> %s\n",
                r.model.piece_logp.size(), r.trace.rounds.size(),
                out_path.c_str());
  } else {
    throw ConfigError("unknown --algo: " + algo);
  }
  return 0;
}

int cmd_segment(const std::string& model_path, const std::string& in_path,
                const std::string& out_path) {
  LoadedModel model = load_model_json(read_file(model_path));
  ParsedCipher parsed = parse_cipher_file(read_file(in_path));
  Segmentation seg = model.kind == ModelKind::kBpe
                         ? bpe_segment(parsed.text, model.bpe)
                         : unigram_segment(parsed.text, model.unigram);
  write_file(out_path, serialize_segmentation(seg));
  std::printf("segmented %zu symbols into %zu segments -> %s\n",
              parsed.text.flat.size(), seg.segments.size(), out_path.c_str());
  return 0;
}

int cmd_decipher(const std::string& key_path, const std::string& lm_path,
                 const std::string& in_path, const std::string& out_path,
                 const std::string& seg_out, size_t chunk) {
  CipherKey key = parse_key_file(read_file(key_path));
  CharNgramLm lm = CharNgramLm::from_arpa(read_file(lm_path));
  ParsedCipher parsed = parse_cipher_file(read_file(in_path));
  Decipherment result = chunk == 0
                            ? decipher_with_key(parsed.text, key, lm)
                            : chunked_decode(parsed.text, key, lm, chunk);
  write_file(out_path, result.plaintext.chars + "\n");
  if (!seg_out.empty())
    write_file(seg_out, serialize_segmentation(result.segmentation));
  std::printf("deciphered %zu symbols (path weight %.4f) -> %s\n",
              parsed.text.flat.size(), result.weight, out_path.c_str());
  return 0;
}

int cmd_eval(const std::string& hyp_path, const std::string& ref_path,
             const std::string& metric, bool as_json) {
  EvalReport report;
  if (metric == "ter") {
    PlainText hyp{map_nom_to_class(read_file(hyp_path))};
    PlainText ref{map_nom_to_class(read_file(ref_path))};
    while (!hyp.chars.empty() && hyp.chars.back() == '\n') hyp.chars.pop_back();
    while (!ref.chars.empty() && ref.chars.back() == '\n') ref.chars.pop_back();
    report = EvalReport::for_ter(hyp, ref);
  } else if (metric == "seger" || metric == "f1") {
    ParsedCipher hyp = parse_cipher_file(read_file(hyp_path));
    ParsedCipher ref = parse_cipher_file(read_file(ref_path));
    if (!hyp.gold || !ref.gold)
      throw ValidationError("eval inputs must contain segment separators");
    if (metric == "seger") {
      report = EvalReport::for_seg_er(*hyp.gold, *ref.gold);
    } else {
      std::set<std::string> learned(hyp.gold->segments.begin(),
                                    hyp.gold->segments.end());
      std::set<std::string> gold(ref.gold->segments.begin(),
                                 ref.gold->segments.end());
      report = EvalReport::for_f1(learned, gold);
    }
  } else {
    throw ConfigError("unknown --metric: " + metric);
  }
  std::cout << (as_json ? report.to_json() : report.to_tsv());
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir,
                   const std::vector<std::string>& overrides) {
  Config config = config_from(config_path, overrides);
  std::string kind = config.get_str("experiment", "mono");
  if (kind == "mono") {
    ExperimentTable table = run_mono_experiment(config);
    write_artifacts(table, out_dir);
    std::fputs(table.summary_csv().c_str(), stdout);
  } else if (kind == "homophonic") {
    ExperimentTable table = run_homophonic_experiment(config);
    write_artifacts(table, out_dir);
    std::fputs(table.summary_csv().c_str(), stdout);
  } else if (kind == "length") {
    LengthCurve curve = run_length_study(config);
    write_file(out_dir + "/length_curve.csv", curve.csv());
    write_file(out_dir + "/length_curve.json", curve.to_json());
    std::fputs(curve.csv().c_str(), stdout);
  } else {
    throw ConfigError("unknown experiment kind: " + kind);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical-cipher segmentation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // app-level --set may follow the subcommand

  std::vector<std::string> overrides;
  app.add_option("--set", overrides, "override a config key (key=value)");

  auto* gen = app.add_subcommand("gen", "generate synthetic ciphers");
  std::string gen_spec, gen_out = "out";
  uint64_t gen_seed = 1;
  gen->add_option("--spec", gen_spec, "key=value spec file");
  gen->add_option("--seed", gen_seed, "base RNG seed");
  gen->add_option("--out", gen_out, "output directory")->required();

  auto* train = app.add_subcommand("train", "train a segmenter or char LM");
  std::string tr_algo, tr_in, tr_out, tr_vocab = "36";
  size_t tr_max_piece = 0;
  int tr_order = 5;
  train->add_option("--algo", tr_algo, "bpe | unigram | charlm")->required();
  train->add_option("--in", tr_in, "input file")->required();
  train->add_option("--out", tr_out, "output model file")->required();
  train->add_option("--vocab", tr_vocab, "vocabulary size or \"max\"");
  train->add_option("--max-piece", tr_max_piece, "piece length cap (0 = none)");
  train->add_option("--order", tr_order, "char LM order");

  auto* segment = app.add_subcommand("segment", "segment a cipher");
  std::string sg_model, sg_in, sg_out;
  segment->add_option("--model", sg_model, "model file")->required();
  segment->add_option("--in", sg_in, "cipher file")->required();
  segment->add_option("--out", sg_out, "segmentation output")->required();

  auto* decipher = app.add_subcommand("decipher", "decode with a known key");
  std::string dc_key, dc_lm, dc_in, dc_out, dc_seg;
  size_t dc_chunk = 0;
  decipher->add_option("--key", dc_key, "key TSV")->required();
  decipher->add_option("--lm", dc_lm, "ARPA char LM")->required();
  decipher->add_option("--in", dc_in, "cipher file")->required();
  decipher->add_option("--out", dc_out, "plaintext output")->required();
  decipher->add_option("--seg-out", dc_seg, "segmentation output");
  decipher->add_option("--chunk", dc_chunk, "chunked decoding window (0 = whole)");

  auto* eval = app.add_subcommand("eval", "score hypothesis against reference");
  std::string ev_hyp, ev_ref, ev_metric = "seger";
  bool ev_json = false;
  eval->add_option("--hyp", ev_hyp, "hypothesis file")->required();
  eval->add_option("--ref", ev_ref, "reference file")->required();
  eval->add_option("--metric", ev_metric, "seger | f1 | ter");
  eval->add_flag("--json", ev_json, "machine-readable output");

  auto* experiment = app.add_subcommand("experiment", "run a configured batch");
  std::string ex_config, ex_out = "out";
  experiment->add_option("--config", ex_config, "config file");
  experiment->add_option("--out", ex_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_spec, gen_seed, gen_out, overrides);
    if (train->parsed())
      return cmd_train(tr_algo, tr_in, tr_out, tr_vocab, tr_max_piece,
                       tr_order, overrides);
    if (segment->parsed()) return cmd_segment(sg_model, sg_in, sg_out);
    if (decipher->parsed())
      return cmd_decipher(dc_key, dc_lm, dc_in, dc_out, dc_seg, dc_chunk);
    if (eval->parsed()) return cmd_eval(ev_hyp, ev_ref, ev_metric, ev_json);
    if (experiment->parsed()) return cmd_experiment(ex_config, ex_out, overrides);
  } catch (const numseg::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const numseg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
