#include "numseg/segmenters.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace numseg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kFloorLogProb = kUnseenPieceLogProb;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// Raw spans in stream order: space-delimited tokens when the cipher has
// spaces, otherwise lines or the whole flat stream.
std::vector<std::string> raw_spans(const CipherText& cipher,
                                   bool line_boundaries) {
  std::vector<std::string> spans;
  if (cipher.has_spaces()) {
    for (const auto& line : cipher.lines) {
      std::string cur;
      for (char c : line) {
        if (c == ' ') {
          if (!cur.empty()) spans.push_back(std::move(cur));
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      if (!cur.empty()) spans.push_back(std::move(cur));
    }
  } else if (line_boundaries) {
    for (const auto& line : cipher.lines)
      if (!line.empty()) spans.push_back(line);
  } else if (!cipher.flat.empty()) {
    spans.push_back(cipher.flat);
  }
  return spans;
}

}  // namespace

std::vector<std::pair<std::string, size_t>> corpus_spans(
    const CipherText& corpus, bool line_boundaries) {
  std::vector<std::pair<std::string, size_t>> out;
  std::unordered_map<std::string, size_t> index;
  for (auto& span : raw_spans(corpus, line_boundaries)) {
    auto it = index.find(span);
    if (it == index.end()) {
      index.emplace(span, out.size());
      out.emplace_back(std::move(span), 1);
    } else {
      ++out[it->second].second;
    }
  }
  return out;
}

Segmentation baseline_segment(const CipherText& cipher, int k) {
  if (k != 1 && k != 2)
    throw ValidationError("baseline segmenter supports k=1 or k=2");
  Segmentation seg;
  std::vector<std::string> spans =
      cipher.has_spaces() ? raw_spans(cipher, false)
                          : std::vector<std::string>{cipher.flat};
  for (const auto& span : spans)
    for (size_t pos = 0; pos < span.size(); pos += k)
      seg.segments.push_back(span.substr(pos, k));
  return seg;
}

// --- BPE ---------------------------------------------------------------

MergeVocabulary bpe_train(const CipherText& corpus, size_t vocab_size,
                          size_t max_piece_len, bool line_boundaries) {
  if (corpus.flat.empty()) throw EmptyCorpus("BPE training corpus is empty");

  auto spans = corpus_spans(corpus, line_boundaries);
  std::vector<std::vector<std::string>> tokens(spans.size());
  std::unordered_set<std::string> pieces;
  for (size_t si = 0; si < spans.size(); ++si) {
    for (char c : spans[si].first) {
      tokens[si].emplace_back(1, c);
      pieces.insert(tokens[si].back());
    }
  }

  MergeVocabulary vocab;
  vocab.max_piece_len = max_piece_len;
  vocab.line_boundaries = line_boundaries;

  while (pieces.size() < vocab_size) {
    // Count adjacent pairs whose merge respects the piece-length cap.
    std::unordered_map<std::string, size_t> pair_count;
    for (size_t si = 0; si < spans.size(); ++si) {
      const auto& toks = tokens[si];
      size_t mult = spans[si].second;
      for (size_t i = 0; i + 1 < toks.size(); ++i) {
        if (toks[i].size() + toks[i + 1].size() > max_piece_len) continue;
        pair_count[toks[i] + '\x1f' + toks[i + 1]] += mult;
      }
    }
    // Most frequent pair; ties by lexicographic pair order.
    std::string best;
    size_t best_count = 0;
    for (const auto& [key, count] : pair_count) {
      if (count > best_count || (count == best_count && !best.empty() && key < best)) {
        best = key;
        best_count = count;
      }
    }
    if (best_count < 2) break;

    size_t sep = best.find('\x1f');
    std::string left = best.substr(0, sep), right = best.substr(sep + 1);
    vocab.merges.emplace_back(left, right);
    pieces.insert(left + right);

    for (auto& toks : tokens) {
      std::vector<std::string> merged;
      merged.reserve(toks.size());
      for (size_t i = 0; i < toks.size(); ++i) {
        if (i + 1 < toks.size() && toks[i] == left && toks[i + 1] == right) {
          merged.push_back(left + right);
          ++i;
        } else {
          merged.push_back(std::move(toks[i]));
        }
      }
      toks = std::move(merged);
    }
  }

  vocab.pieces.assign(pieces.begin(), pieces.end());
  std::sort(vocab.pieces.begin(), vocab.pieces.end());
  return vocab;
}

Segmentation bpe_segment(const CipherText& cipher,
                         const MergeVocabulary& vocab) {
  Segmentation seg;
  for (const auto& span : raw_spans(cipher, vocab.line_boundaries)) {
    std::vector<std::string> toks;
    toks.reserve(span.size());
    for (char c : span) toks.emplace_back(1, c);
    for (const auto& [left, right] : vocab.merges) {
      std::vector<std::string> merged;
      merged.reserve(toks.size());
      for (size_t i = 0; i < toks.size(); ++i) {
        if (i + 1 < toks.size() && toks[i] == left && toks[i + 1] == right) {
          merged.push_back(left + right);
          ++i;
        } else {
          merged.push_back(std::move(toks[i]));
        }
      }
      toks = std::move(merged);
    }
    for (auto& t : toks) seg.segments.push_back(std::move(t));
  }
  return seg;
}

// --- span lattice -------------------------------------------------------

SpanLattice SpanLattice::build(std::string_view span,
                               const std::vector<std::string>& pieces,
                               const std::vector<double>& logp,
                               size_t max_len) {
  std::unordered_map<std::string, size_t> index;
  index.reserve(pieces.size() * 2);
  for (size_t i = 0; i < pieces.size(); ++i) index.emplace(pieces[i], i);

  SpanLattice lat;
  lat.length = span.size();
  lat.arcs_at.resize(span.size() + 1);
  std::string buf;
  for (size_t i = 0; i < span.size(); ++i) {
    size_t longest = std::min(max_len, span.size() - i);
    buf.clear();
    for (size_t len = 1; len <= longest; ++len) {
      buf.push_back(span[i + len - 1]);
      auto it = index.find(buf);
      if (it == index.end()) continue;
      lat.arcs_at[i].push_back(lat.arcs.size());
      lat.arcs.push_back({i, i + len, it->second, logp[it->second]});
    }
  }
  return lat;
}

std::vector<double> SpanLattice::forward() const {
  std::vector<double> alpha(length + 1, kNegInf);
  alpha[0] = 0.0;
  for (size_t i = 0; i < length; ++i) {
    if (alpha[i] == kNegInf) continue;
    for (size_t ai : arcs_at[i]) {
      const Arc& a = arcs[ai];
      alpha[a.end] = log_add(alpha[a.end], alpha[i] + a.logp);
    }
  }
  return alpha;
}

std::vector<double> SpanLattice::backward() const {
  std::vector<double> beta(length + 1, kNegInf);
  beta[length] = 0.0;
  for (size_t i = length; i-- > 0;) {
    for (size_t ai : arcs_at[i]) {
      const Arc& a = arcs[ai];
      if (beta[a.end] == kNegInf) continue;
      beta[i] = log_add(beta[i], a.logp + beta[a.end]);
    }
  }
  return beta;
}

std::vector<double> SpanLattice::posteriors(double* log_z) const {
  std::vector<double> alpha = forward();
  std::vector<double> beta = backward();
  double z = alpha[length];
  if (log_z != nullptr) *log_z = z;
  std::vector<double> post(arcs.size(), 0.0);
  if (z == kNegInf) return post;
  for (size_t ai = 0; ai < arcs.size(); ++ai) {
    const Arc& a = arcs[ai];
    if (alpha[a.begin] == kNegInf || beta[a.end] == kNegInf) continue;
    post[ai] = std::exp(alpha[a.begin] + a.logp + beta[a.end] - z);
  }
  return post;
}

// --- unigram LM segmenter -------------------------------------------------

namespace {

struct SeedCandidate {
  std::string piece;
  size_t freq;
  double score;  // freq * length
};

// All substrings of the spans up to the length cap, with frequencies.
std::unordered_map<std::string, size_t> substring_counts(
    const std::vector<std::pair<std::string, size_t>>& spans, size_t max_len) {
  std::unordered_map<std::string, size_t> counts;
  std::string buf;
  for (const auto& [span, mult] : spans) {
    for (size_t i = 0; i < span.size(); ++i) {
      size_t longest = std::min(max_len, span.size() - i);
      buf.clear();
      for (size_t len = 1; len <= longest; ++len) {
        buf.push_back(span[i + len - 1]);
        counts[buf] += mult;
      }
    }
  }
  return counts;
}

std::string observed_symbols(const CipherText& corpus) {
  std::string symbols;
  for (char c : corpus.flat)
    if (symbols.find(c) == std::string::npos) symbols.push_back(c);
  std::sort(symbols.begin(), symbols.end());
  return symbols;
}

// Best segmentation log-prob of `piece`'s surface using strictly shorter
// pieces; used as the keep-or-prune alternative.
double best_alternative_logp(const std::string& surface,
                             const std::vector<std::string>& pieces,
                             const std::vector<double>& logp, size_t max_len) {
  SpanLattice lat = SpanLattice::build(surface, pieces, logp,
                                       std::min(max_len, surface.size() - 1));
  std::vector<double> dp(surface.size() + 1, kNegInf);
  dp[0] = 0.0;
  for (size_t i = 0; i < surface.size(); ++i) {
    if (dp[i] == kNegInf) continue;
    for (size_t ai : lat.arcs_at[i]) {
      const auto& a = lat.arcs[ai];
      dp[a.end] = std::max(dp[a.end], dp[i] + a.logp);
    }
  }
  return dp[surface.size()];
}

}  // namespace

size_t UnigramModel::longest_piece() const {
  size_t n = 0;
  for (const auto& [piece, lp] : piece_logp) n = std::max(n, piece.size());
  return n;
}

bool TrainingTrace::non_decreasing_within_rounds(double rel_tol) const {
  for (const auto& round : rounds)
    for (size_t i = 1; i < round.size(); ++i) {
      double slack = rel_tol * (1.0 + std::fabs(round[i - 1]));
      if (round[i] < round[i - 1] - slack) return false;
    }
  return true;
}

size_t max_unigram_vocab(const CipherText& corpus, size_t max_piece_len,
                         bool line_boundaries) {
  auto spans = corpus_spans(corpus, line_boundaries);
  size_t seed_len = std::min<size_t>(max_piece_len, 16);
  auto counts = substring_counts(spans, seed_len);
  size_t singles = observed_symbols(corpus).size();
  size_t multis = 0;
  for (const auto& [piece, freq] : counts)
    if (piece.size() > 1 && freq >= 2) ++multis;
  return singles + multis;
}

UnigramTrainResult unigram_train(const CipherText& corpus,
                                 const UnigramTrainOptions& options) {
  if (corpus.flat.empty())
    throw EmptyCorpus("unigram training corpus is empty");

  auto spans = corpus_spans(corpus, options.line_boundaries);
  const std::string singles = observed_symbols(corpus);
  const size_t seed_len =
      std::min(options.max_piece_len, options.max_seed_piece_len);

  // Seed vocabulary: all substrings occurring at least twice, ranked by
  // frequency * length, capped at seed_multiplier * vocab_size; plus all
  // single symbols.
  auto counts = substring_counts(spans, seed_len);
  std::vector<SeedCandidate> candidates;
  for (const auto& [piece, freq] : counts) {
    if (piece.size() < 2 || freq < 2) continue;
    candidates.push_back(
        {piece, freq, static_cast<double>(freq) * piece.size()});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const SeedCandidate& a, const SeedCandidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.piece < b.piece;
            });
  size_t cap = options.seed_multiplier * options.vocab_size;
  if (candidates.size() > cap) candidates.resize(cap);

  std::vector<std::string> pieces;
  std::vector<double> logp;
  double total = 0.0;
  for (char c : singles) {
    pieces.emplace_back(1, c);
    size_t freq = counts.at(pieces.back());
    logp.push_back(static_cast<double>(freq));  // temp: raw score
    total += freq;
  }
  for (const auto& cand : candidates) {
    pieces.push_back(cand.piece);
    logp.push_back(cand.score);
    total += cand.score;
  }
  for (double& lp : logp) lp = std::log(lp / total);

  TrainingTrace trace;
  size_t Lmax = seed_len;
  std::vector<double> expected(pieces.size(), 0.0);

  auto em_round = [&]() {
    trace.rounds.emplace_back();
    for (int it = 0; it < options.em_iters; ++it) {
      std::fill(expected.begin(), expected.end(), 0.0);
      double ll = 0.0;
      for (const auto& [span, mult] : spans) {
        SpanLattice lat = SpanLattice::build(span, pieces, logp, Lmax);
        double z;
        std::vector<double> post = lat.posteriors(&z);
        ll += mult * z;
        for (size_t ai = 0; ai < lat.arcs.size(); ++ai)
          expected[lat.arcs[ai].piece] += post[ai] * mult;
      }
      trace.rounds.back().push_back(ll);
      double sum = 0.0;
      for (double e : expected) sum += e;
      for (size_t pi = 0; pi < pieces.size(); ++pi)
        logp[pi] = expected[pi] > 0.0 ? std::log(expected[pi] / sum)
                                      : kFloorLogProb;
    }
  };

  while (true) {
    em_round();
    if (pieces.size() <= options.vocab_size) break;

    // Prune the multi-symbol pieces whose removal least reduces corpus
    // likelihood (local estimate: expected count * (own logp - best
    // alternative segmentation)).
    size_t prunable = pieces.size() - singles.size();
    size_t want = std::min(
        static_cast<size_t>(options.prune_fraction * pieces.size()),
        pieces.size() - options.vocab_size);
    want = std::max<size_t>(want, 1);
    want = std::min(want, prunable);
    if (want == 0) break;

    struct Loss {
      double loss;
      size_t index;
    };
    std::vector<Loss> losses;
    for (size_t pi = 0; pi < pieces.size(); ++pi) {
      if (pieces[pi].size() < 2) continue;
      double alt = best_alternative_logp(pieces[pi], pieces, logp, Lmax);
      losses.push_back({expected[pi] * (logp[pi] - alt), pi});
    }
    std::sort(losses.begin(), losses.end(), [&](const Loss& a, const Loss& b) {
      if (a.loss != b.loss) return a.loss < b.loss;
      return pieces[a.index] < pieces[b.index];
    });
    std::vector<bool> drop(pieces.size(), false);
    for (size_t i = 0; i < want; ++i) drop[losses[i].index] = true;

    std::vector<std::string> kept_pieces;
    std::vector<double> kept_logp;
    double norm = kNegInf;
    for (size_t pi = 0; pi < pieces.size(); ++pi) {
      if (drop[pi]) continue;
      kept_pieces.push_back(std::move(pieces[pi]));
      kept_logp.push_back(logp[pi]);
      norm = log_add(norm, logp[pi]);
    }
    for (double& lp : kept_logp) lp -= norm;
    pieces = std::move(kept_pieces);
    logp = std::move(kept_logp);
    expected.assign(pieces.size(), 0.0);
  }

  UnigramModel model;
  model.max_piece_len = options.max_piece_len;
  model.line_boundaries = options.line_boundaries;
  for (size_t pi = 0; pi < pieces.size(); ++pi)
    model.piece_logp.emplace(std::move(pieces[pi]), logp[pi]);
  // Declared singles missing from the corpus still get a floor entry so
  // that any string over the alphabet stays segmentable.
  for (char c : CipherAlphabet::digits().symbols()) {
    if (singles.find(c) != std::string::npos) continue;
    model.piece_logp.emplace(std::string(1, c), kFloorLogProb);
  }
  return {std::move(model), std::move(trace)};
}

Segmentation unigram_segment(const CipherText& cipher,
                             const UnigramModel& model) {
  std::vector<std::string> pieces;
  std::vector<double> logp;
  pieces.reserve(model.piece_logp.size());
  for (const auto& [piece, lp] : model.piece_logp) {
    pieces.push_back(piece);
    logp.push_back(lp);
  }
  const size_t Lmax = model.longest_piece();

  Segmentation seg;
  size_t flat_pos = 0;
  for (const auto& span : raw_spans(cipher, model.line_boundaries)) {
    SpanLattice lat = SpanLattice::build(span, pieces, logp, Lmax);
    struct Node {
      double score = kNegInf;
      size_t nsegs = 0;
      int32_t first = -1;  // piece index of the path's first segment
      int32_t back_arc = -1;
    };
    std::vector<Node> dp(span.size() + 1);
    dp[0].score = 0.0;
    for (size_t i = 0; i < span.size(); ++i) {
      if (dp[i].score == kNegInf) continue;
      for (size_t ai : lat.arcs_at[i]) {
        const auto& a = lat.arcs[ai];
        Node cand;
        cand.score = dp[i].score + a.logp;
        cand.nsegs = dp[i].nsegs + 1;
        cand.first = i == 0 ? static_cast<int32_t>(a.piece) : dp[i].first;
        cand.back_arc = static_cast<int32_t>(ai);
        Node& cur = dp[a.end];
        bool better = false;
        if (cand.score > cur.score) {
          better = true;
        } else if (cand.score == cur.score) {
          if (cand.nsegs < cur.nsegs) {
            better = true;
          } else if (cand.nsegs == cur.nsegs && cur.first >= 0 &&
                     pieces[cand.first] < pieces[cur.first]) {
            better = true;
          }
        }
        if (better) cur = cand;
      }
    }
    if (dp[span.size()].score == kNegInf) {
      // Find the first uncoverable offset for the error report.
      size_t stuck = 0;
      for (size_t i = 0; i <= span.size(); ++i)
        if (dp[i].score != kNegInf) stuck = i;
      throw UnsegmentablePosition(flat_pos + stuck,
                                  span.substr(stuck, 8));
    }
    std::vector<size_t> rev;
    for (size_t i = span.size(); i > 0;) {
      size_t ai = static_cast<size_t>(dp[i].back_arc);
      rev.push_back(ai);
      i = lat.arcs[ai].begin;
    }
    for (size_t r = rev.size(); r-- > 0;) {
      const auto& a = lat.arcs[rev[r]];
      seg.segments.push_back(span.substr(a.begin, a.end - a.begin));
    }
    flat_pos += span.size();
  }
  return seg;
}

// --- model files ---------------------------------------------------------

namespace {

using nlohmann::json;

json model_header(const char* algorithm, size_t max_piece_len,
                  bool line_boundaries) {
  json j;
  j["format"] = "numseg-model";
  j["version"] = 1;
  j["algorithm"] = algorithm;
  if (max_piece_len == kNoPieceCap)
    j["max_piece_len"] = nullptr;
  else
    j["max_piece_len"] = max_piece_len;
  j["line_boundaries"] = line_boundaries;
  return j;
}

}  // namespace

std::string save_model_json(const MergeVocabulary& vocab) {
  json j = model_header("bpe", vocab.max_piece_len, vocab.line_boundaries);
  j["merges"] = json::array();
  for (const auto& [l, r] : vocab.merges) j["merges"].push_back({l, r});
  j["pieces"] = vocab.pieces;
  return j.dump(2) + "\n";
}

std::string save_model_json(const UnigramModel& model) {
  json j = model_header("unigram", model.max_piece_len, model.line_boundaries);
  j["pieces"] = json::array();
  for (const auto& [piece, lp] : model.piece_logp)
    j["pieces"].push_back({piece, lp});
  return j.dump(2) + "\n";
}

LoadedModel load_model_json(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad model file: ") + e.what());
  }
  if (j.value("format", "") != "numseg-model" || j.value("version", 0) != 1)
    throw ValidationError("bad model file: unknown format/version");
  LoadedModel out;
  size_t cap = j["max_piece_len"].is_null()
                   ? kNoPieceCap
                   : j["max_piece_len"].get<size_t>();
  bool lines = j.value("line_boundaries", false);
  std::string algo = j.value("algorithm", "");
  if (algo == "bpe") {
    out.kind = ModelKind::kBpe;
    out.bpe.max_piece_len = cap;
    out.bpe.line_boundaries = lines;
    for (const auto& m : j["merges"])
      out.bpe.merges.emplace_back(m[0].get<std::string>(),
                                  m[1].get<std::string>());
    for (const auto& p : j["pieces"])
      out.bpe.pieces.push_back(p.get<std::string>());
  } else if (algo == "unigram") {
    out.kind = ModelKind::kUnigram;
    out.unigram.max_piece_len = cap;
    out.unigram.line_boundaries = lines;
    for (const auto& p : j["pieces"])
      out.unigram.piece_logp.emplace(p[0].get<std::string>(),
                                     p[1].get<double>());
  } else {
    throw ValidationError("bad model file: unknown algorithm \"" + algo +
                          "\"");
  }
  return out;
}

}  // namespace numseg
