#include "numseg/charlm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace numseg {

namespace {
constexpr double kLn10 = 2.302585092994045684;
}

std::string CharNgramLm::collapse(std::string h) const {
  while (!context_seen(h)) h.erase(h.begin());
  return h;
}

std::string CharNgramLm::start_state() const {
  return collapse(std::string(order_ - 1, kBoundaryChar));
}

std::string CharNgramLm::next_state(const std::string& state, char c) const {
  std::string h = state + c;
  if (static_cast<int>(h.size()) > order_ - 1)
    h.erase(0, h.size() - (order_ - 1));
  return collapse(std::move(h));
}

double CharNgramLm::cond_logp(const std::string& state, char c) const {
  std::string h = state;
  double acc = 0.0;
  while (true) {
    auto it = logp_.find(h + c);
    if (it != logp_.end()) return acc + it->second;
    if (h.empty()) return acc + unk_logp_;  // character outside the corpus/vocab
    auto bw = logbow_.find(h);
    if (bw != logbow_.end()) acc += bw->second;
    h.erase(h.begin());
  }
}

double CharNgramLm::score(const PlainText& text) const {
  std::string state = start_state();
  double total = 0.0;
  for (char c : text.chars) {
    total += cond_logp(state, c);
    state = next_state(state, c);
  }
  return total;
}

double CharNgramLm::conditional_sum(const std::string& history) const {
  std::string state = collapse(history);
  double sum = 0.0;
  for (char c : vocab_) sum += std::exp(cond_logp(state, c));
  return sum;
}

CharNgramLm lm_train(const std::vector<std::string>& lines, int order,
                     const std::string& vocab_chars) {
  return CharNgramLm::train(lines, order, vocab_chars);
}

double lm_score(const CharNgramLm& lm, const PlainText& text) {
  return lm.score(text);
}

CharNgramLm CharNgramLm::train(const std::vector<std::string>& lines,
                               int order, const std::string& vocab_chars) {
  if (order < 1) throw ValidationError("LM order must be >= 1");
  CharNgramLm lm;
  lm.order_ = order;
  lm.vocab_ = vocab_chars;
  std::sort(lm.vocab_.begin(), lm.vocab_.end());
  lm.vocab_.erase(std::unique(lm.vocab_.begin(), lm.vocab_.end()),
                  lm.vocab_.end());
  if (lm.vocab_.find(kBoundaryChar) != std::string::npos)
    throw ValidationError("boundary marker cannot be a vocabulary character");

  // Gram counts per order.
  std::vector<std::unordered_map<std::string, uint32_t>> counts(order + 1);
  const std::string pad(order - 1, kBoundaryChar);
  size_t tokens = 0;
  for (const auto& line : lines) {
    if (line.empty()) continue;
    std::string padded = pad + line;
    for (size_t t = pad.size(); t < padded.size(); ++t) {
      char c = padded[t];
      if (lm.vocab_.find(c) == std::string::npos)
        throw AlphabetError(std::string("corpus character '") + c +
                            "' not in LM vocabulary");
      ++tokens;
      for (int o = 1; o <= order; ++o)
        ++counts[o][padded.substr(t - (o - 1), o)];
    }
  }
  if (tokens == 0) throw EmptyCorpus("LM training corpus is empty");

  // Unigrams: P(c) = (count + T0/|V|) / (N + T0) over the whole vocabulary.
  double t0 = static_cast<double>(counts[1].size());
  double n = static_cast<double>(tokens);
  double vsize = static_cast<double>(lm.vocab_.size());
  for (char c : lm.vocab_) {
    std::string g(1, c);
    auto it = counts[1].find(g);
    double cnt = it == counts[1].end() ? 0.0 : it->second;
    lm.logp_[g] = std::log((cnt + t0 / vsize) / (n + t0));
  }
  lm.unk_logp_ = std::log((t0 / vsize) / (n + t0));

  // Higher orders: interpolated Witten-Bell, built bottom-up so the
  // lower-order probability is always available.
  for (int o = 2; o <= order; ++o) {
    std::unordered_map<std::string, std::pair<uint64_t, uint32_t>> ctx;
    for (const auto& [gram, cnt] : counts[o]) {
      auto& [total, types] = ctx[gram.substr(0, gram.size() - 1)];
      total += cnt;
      ++types;
    }
    for (const auto& [h, agg] : ctx) {
      double bow = static_cast<double>(agg.second) /
                   (static_cast<double>(agg.first) + agg.second);
      lm.logbow_[h] = std::log(bow);
    }
    for (const auto& [gram, cnt] : counts[o]) {
      std::string h = gram.substr(0, gram.size() - 1);
      char c = gram.back();
      const auto& agg = ctx.at(h);
      // Lower-order probability via the backoff recursion on the shortened
      // history (which is already complete).
      std::string h2 = h.substr(1);
      double lower;
      {
        double acc = 0.0;
        std::string hh = h2;
        while (true) {
          auto it = lm.logp_.find(hh + c);
          if (it != lm.logp_.end()) {
            lower = acc + it->second;
            break;
          }
          auto bw = lm.logbow_.find(hh);
          if (bw != lm.logbow_.end()) acc += bw->second;
          hh.erase(hh.begin());
        }
      }
      double p = (static_cast<double>(cnt) +
                  agg.second * std::exp(lower)) /
                 (static_cast<double>(agg.first) + agg.second);
      lm.logp_[gram] = std::log(p);
    }
  }
  return lm;
}

// --- acceptor ---------------------------------------------------------------

int32_t LmAcceptor::state_for_context(const std::string& history) const {
  std::string h = history;
  const int max_len = lm->order() - 1;
  if (static_cast<int>(h.size()) > max_len)
    h.erase(0, h.size() - max_len);
  while (!h.empty() && state_ids.find(h) == state_ids.end()) h.erase(h.begin());
  return state_ids.at(h);
}

LmAcceptor lm_to_acceptor(const CharNgramLm& lm) {
  LmAcceptor acc;
  acc.lm = &lm;
  acc.symbols = PlainSymbols::from_chars(lm.vocab());

  // States: all seen contexts. Sorted by (length, bytes) so that a
  // context's backoff parent is always processed first.
  std::vector<std::string> contexts{""};
  for (const auto& [h, bw] : lm.backoff_logp()) contexts.push_back(h);
  std::sort(contexts.begin(), contexts.end(),
            [](const std::string& x, const std::string& y) {
              if (x.size() != y.size()) return x.size() < y.size();
              return x < y;
            });
  for (const auto& h : contexts) {
    int32_t id = acc.fst.add_state();
    acc.fst.set_final(id, 0.0);
    acc.state_ids.emplace(h, id);
  }
  acc.fst.start = acc.state_for_context(lm.start_state());

  // Cheapest route to each character from each context, bottom-up over
  // context length; used to verify higher-order arcs undercut the backoff
  // path (Witten-Bell guarantees this; violations are clamped).
  std::unordered_map<std::string, std::vector<double>> best_cost;
  const std::string& vocab = lm.vocab();

  for (const auto& h : contexts) {
    int32_t src = acc.state_ids.at(h);
    std::vector<double> cost(vocab.size(),
                             std::numeric_limits<double>::infinity());
    double bow_w = 0.0;
    const std::vector<double>* lower = nullptr;
    if (!h.empty()) {
      std::string parent = h.substr(1);
      while (!lm.context_seen(parent)) parent.erase(parent.begin());
      bow_w = -lm.backoff_logp().at(h);
      acc.fst.add_arc(src, {kEpsilon, kEpsilon, bow_w,
                            acc.state_ids.at(parent)});
      lower = &best_cost.at(parent);  // contexts sorted: parent precedes h
    }
    for (size_t ci = 0; ci < vocab.size(); ++ci) {
      char c = vocab[ci];
      auto it = lm.gram_logp().find(h + c);
      double route = lower ? bow_w + (*lower)[ci]
                           : std::numeric_limits<double>::infinity();
      if (it != lm.gram_logp().end()) {
        double w = -it->second;
        // Witten-Bell interpolation guarantees the direct arc undercuts
        // every backoff route; count violations as a construction check.
        if (w > route + 1e-12) ++acc.shortcut_violations;
        Label l = acc.symbols.label_of(c);
        acc.fst.add_arc(src, {l, l, w,
                              acc.state_for_context(h + c)});
        cost[ci] = std::min(w, route);
      } else {
        cost[ci] = route;
      }
    }
    best_cost.emplace(h, std::move(cost));
  }

  // Nomenclature tokens: unknown-character mass at the empty context, which
  // any state reaches through its backoff chain; history resets afterwards.
  int32_t empty_state = acc.state_ids.at("");
  acc.fst.add_arc(empty_state, {acc.symbols.nom_label(),
                                acc.symbols.nom_label(), -lm.unk_logp(),
                                empty_state});
  return acc;
}

// --- ARPA io ----------------------------------------------------------------

namespace {

std::string arpa_token(char c) {
  if (c == ' ') return "<sp>";
  if (c == kBoundaryChar) return "<s>";
  return std::string(1, c);
}

char arpa_char(const std::string& token) {
  if (token == "<sp>") return ' ';
  if (token == "<s>") return kBoundaryChar;
  if (token.size() != 1)
    throw ValidationError("bad ARPA token: " + token);
  return token[0];
}

std::string fmt_log10(double ln_value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", ln_value / kLn10);
  return buf;
}

}  // namespace

std::string CharNgramLm::to_arpa() const {
  // Collect grams per order, sorted.
  std::vector<std::vector<std::string>> grams(order_ + 1);
  for (const auto& [g, lp] : logp_) grams[g.size()].push_back(g);
  // Pure-marker grams are never predicted (probability -99) but carry the
  // backoff weights of line-initial contexts.
  for (int k = 1; k < std::max(2, order_); ++k) {
    std::string markers(k, kBoundaryChar);
    if (k == 1 || logbow_.count(markers)) grams[k].push_back(markers);
  }
  for (auto& v : grams) std::sort(v.begin(), v.end());

  std::ostringstream os;
  os << "\\data\\\n";
  for (int o = 1; o <= order_; ++o)
    os << "ngram " << o << "=" << grams[o].size() << "\n";
  for (int o = 1; o <= order_; ++o) {
    os << "\n\\" << o << "-grams:\n";
    for (const auto& g : grams[o]) {
      auto it = logp_.find(g);
      if (it == logp_.end())
        os << "-99";  // boundary marker
      else
        os << fmt_log10(it->second);
      os << '\t';
      for (size_t i = 0; i < g.size(); ++i) {
        if (i) os << ' ';
        os << arpa_token(g[i]);
      }
      auto bw = logbow_.find(g);
      if (bw != logbow_.end()) os << '\t' << fmt_log10(bw->second);
      os << '\n';
    }
  }
  os << "\n\\end\\\n";
  return os.str();
}

CharNgramLm CharNgramLm::from_arpa(std::string_view bytes) {
  CharNgramLm lm;
  std::istringstream is{std::string(bytes)};
  std::string line;
  int cur_order = 0;
  int max_order = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\\data\\" || line == "\\end\\") continue;
    if (line.rfind("ngram ", 0) == 0) {
      max_order = std::max(max_order, std::atoi(line.c_str() + 6));
      continue;
    }
    if (line.front() == '\\') {
      cur_order = std::atoi(line.c_str() + 1);
      continue;
    }
    if (cur_order == 0) continue;
    std::istringstream ls(line);
    std::string logp_field;
    ls >> logp_field;
    std::string gram;
    for (int i = 0; i < cur_order; ++i) {
      std::string token;
      ls >> token;
      gram += arpa_char(token);
    }
    std::string bow_field;
    bool has_bow = static_cast<bool>(ls >> bow_field);
    if (logp_field != "-99")
      lm.logp_[gram] = std::stod(logp_field) * kLn10;
    if (has_bow) lm.logbow_[gram] = std::stod(bow_field) * kLn10;
  }
  if (max_order == 0) throw ValidationError("bad ARPA file: no ngram counts");
  lm.order_ = max_order;
  for (const auto& [g, lp] : lm.logp_)
    if (g.size() == 1 && g[0] != kBoundaryChar) lm.vocab_ += g[0];
  std::sort(lm.vocab_.begin(), lm.vocab_.end());
  // Unknown mass: the smallest unigram probability.
  double mn = 0.0;
  bool first = true;
  for (char c : lm.vocab_) {
    double lp = lm.logp_.at(std::string(1, c));
    if (first || lp < mn) mn = lp;
    first = false;
  }
  lm.unk_logp_ = mn;
  return lm;
}

}  // namespace numseg
