#ifndef NUMSEG_CHARLM_HPP
#define NUMSEG_CHARLM_HPP

// Order-n character language model with Witten-Bell interpolated backoff,
// trainable from newline-delimited plaintext, scorable per character, and
// compilable to a weighted acceptor over the tropical semiring.
//
// Histories are plain strings; the sentence-boundary marker is the
// non-printing character kBoundaryChar, which pads the first order-1
// positions of every line and is never predicted.

#include <string>
#include <unordered_map>
#include <vector>

#include "numseg/core.hpp"
#include "numseg/wfst.hpp"

namespace numseg {

constexpr char kBoundaryChar = '\x01';

class CharNgramLm {
public:
  int order() const { return order_; }
  const std::string& vocab() const { return vocab_; }

  // ARPA-style lookup: seen grams carry interpolated probabilities; missing
  // grams back off (with weight) to the shortened history. `state` must be
  // a seen context, as produced by next_state/start_state.
  double cond_logp(const std::string& state, char c) const;
  std::string next_state(const std::string& state, char c) const;
  std::string start_state() const;

  // Sum of per-character conditional log-probs with boundary padding.
  double score(const PlainText& text) const;

  // Per-history normalization: sum over the vocabulary of P(c|history).
  double conditional_sum(const std::string& history) const;

  bool context_seen(const std::string& h) const {
    return h.empty() || logbow_.count(h) != 0;
  }
  double unk_logp() const { return unk_logp_; }

  const std::unordered_map<std::string, double>& gram_logp() const {
    return logp_;
  }
  const std::unordered_map<std::string, double>& backoff_logp() const {
    return logbow_;
  }

  static CharNgramLm train(const std::vector<std::string>& lines, int order,
                           const std::string& vocab_chars);
  std::string to_arpa() const;
  static CharNgramLm from_arpa(std::string_view bytes);

private:
  // Longest suffix of h that is a seen context.
  std::string collapse(std::string h) const;

  int order_ = 0;
  std::string vocab_;  // sorted predictable characters
  std::unordered_map<std::string, double> logp_;    // gram -> ln P
  std::unordered_map<std::string, double> logbow_;  // context -> ln bow
  double unk_logp_ = 0.0;
};

// Witten-Bell interpolated estimates; each line is padded with order-1
// boundary markers. Vocabulary defaults to a-z plus space.
CharNgramLm lm_train(const std::vector<std::string>& lines, int order = 5,
                     const std::string& vocab_chars = "abcdefghijklmnopqrstuvwxyz ");
double lm_score(const CharNgramLm& lm, const PlainText& text);

// Weighted acceptor: states are seen contexts, direct arcs carry
// -ln P(c|h), epsilon arcs carry -ln bow(h) down to the shortened context.
// Every state is final with weight 0, so any vocabulary string is accepted
// with weight -lm_score. One extra arc at the empty context accepts the
// NOM label at the unknown-character mass and resets the history.
struct LmAcceptor {
  Wfst fst;
  PlainSymbols symbols;
  std::unordered_map<std::string, int32_t> state_ids;
  const CharNgramLm* lm = nullptr;
  size_t shortcut_violations = 0;  // direct arc costlier than backoff route

  int32_t state_for_context(const std::string& history) const;
};
LmAcceptor lm_to_acceptor(const CharNgramLm& lm);

}  // namespace numseg

#endif  // NUMSEG_CHARLM_HPP
