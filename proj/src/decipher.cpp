#include "numseg/decipher.hpp"

#include <algorithm>

#include "numseg/ciphergen.hpp"

namespace numseg {

namespace {

// Tokens along the best path, recovered through the two composition
// provenance layers: M2 arc -> M1 arc -> segmentation-FST arc.
std::vector<Label> path_tokens(const Path& best, const ComposedFst& m2,
                               const ComposedFst& m1, const SegMachine& seg) {
  std::vector<Label> tokens;
  for (const ArcRef& ref : best.arcs) {
    const ArcOrigin& o2 = m2.origins[ref.state][ref.index];
    if (!o2.a.valid()) continue;  // LM-side epsilon move
    const ArcOrigin& o1 = m1.origins[o2.a.state][o2.a.index];
    if (!o1.a.valid()) continue;  // key-side epsilon move
    const Arc& seg_arc = seg.fst.arcs[o1.a.state][o1.a.index];
    if (seg_arc.olabel != kEpsilon) tokens.push_back(seg_arc.olabel);
  }
  return tokens;
}

Segmentation tokens_to_segmentation(const std::vector<Label>& tokens,
                                    const SegMachine& seg) {
  Segmentation out;
  out.segments.reserve(tokens.size());
  for (Label t : tokens) out.segments.push_back(seg.element_of(t));
  return out;
}

// LM context after consuming a decoded segment sequence, mirroring the
// lattice: letters extend the history, nulls leave it unchanged,
// nomenclature resets it (the NOM arc returns to the empty context).
std::string context_after(const std::string& context, const Segmentation& seg,
                          const CipherKey& key, int order) {
  std::string ctx = context;
  for (const auto& element : seg.segments) {
    const PlainUnit* unit = key.find(element);
    switch (unit->kind) {
      case UnitKind::kLetters:
        ctx += unit->text;
        break;
      case UnitKind::kNull:
        break;
      case UnitKind::kNomenclature:
        ctx.clear();
        break;
    }
  }
  if (static_cast<int>(ctx.size()) > order - 1)
    ctx.erase(0, ctx.size() - (order - 1));
  return ctx;
}

Decipherment decode_span(const CipherText& cipher, const CipherKey& key,
                         const LmAcceptor& acceptor, int32_t lm_start) {
  SegMachine seg = build_segmentation_fst(cipher, key);
  PlainSymbols symbols = acceptor.symbols;
  Wfst key_fst = build_key_fst(key, symbols);

  ComposeOptions opt1;
  opt1.record_origins = true;
  ComposedFst m1 = compose_ex(seg.fst, key_fst, opt1);

  ComposeOptions opt2;
  opt2.record_origins = true;
  opt2.b_start = lm_start;
  opt2.b_epsilon_is_failure = true;  // backoff only on miss
  ComposedFst m2 = compose_ex(m1.fst, acceptor.fst, opt2);

  Path best = shortest_path(m2.fst);
  Decipherment out;
  out.segmentation =
      tokens_to_segmentation(path_tokens(best, m2, m1, seg), seg);
  out.plaintext = apply_key(out.segmentation, key);
  out.weight = best.weight;
  validate_segmentation(out.segmentation, cipher);
  return out;
}

}  // namespace

Decipherment decipher_with_key(const CipherText& cipher, const CipherKey& key,
                               const LmAcceptor& acceptor) {
  return decode_span(cipher, key, acceptor, acceptor.fst.start);
}

Decipherment decipher_with_key(const CipherText& cipher, const CipherKey& key,
                               const CharNgramLm& lm) {
  LmAcceptor acceptor = lm_to_acceptor(lm);
  return decipher_with_key(cipher, key, acceptor);
}

Decipherment chunked_decode(const CipherText& cipher, const CipherKey& key,
                            const CharNgramLm& lm, size_t chunk) {
  const int order = lm.order();
  if (chunk < 2 * static_cast<size_t>(order))
    throw ValidationError("chunk size must be at least twice the LM order");

  LmAcceptor acceptor = lm_to_acceptor(lm);
  const std::string& flat = cipher.flat;
  if (chunk >= flat.size())
    return decipher_with_key(cipher, key, acceptor);

  const size_t overlap = std::min(chunk / 2, static_cast<size_t>(128));
  const size_t keep = chunk - overlap;

  Decipherment out;
  // Raw LM context: boundary markers at the start, reset to empty after a
  // nomenclature token, exactly as the lattice moves through the acceptor.
  std::string context(static_cast<size_t>(order) - 1, kBoundaryChar);
  size_t pos = 0;
  while (pos < flat.size()) {
    size_t hi = std::min(pos + chunk, flat.size());
    std::string_view window(flat.data() + pos, hi - pos);
    // Largest element-boundary-reachable prefix of the window.
    std::vector<char> reach = element_reachability(window, key);
    size_t q = 0;
    for (size_t i = 0; i < reach.size(); ++i)
      if (reach[i]) q = i;
    if (q == 0)
      throw UnsegmentablePosition(pos, std::string(window.substr(0, 8)));

    CipherText sub = CipherText::from_flat(std::string(window.substr(0, q)));
    Decipherment part =
        decode_span(sub, key, acceptor, acceptor.state_for_context(context));

    // Commit segments up to the keep point; the final chunk commits all.
    Segmentation committed;
    size_t consumed = 0;
    bool last = pos + q >= flat.size();
    for (const auto& segment : part.segmentation.segments) {
      if (!last && consumed >= keep && !committed.segments.empty()) break;
      committed.segments.push_back(segment);
      consumed += segment.size();
    }
    context = context_after(context, committed, key, order);
    for (auto& s : committed.segments)
      out.segmentation.segments.push_back(std::move(s));
    pos += consumed;
  }

  out.plaintext = apply_key(out.segmentation, key);
  validate_segmentation(out.segmentation, cipher);

  // Exact path weight of the assembled reading: LM cost of its letters,
  // with the backoff descent to the empty context plus the unknown mass for
  // each nomenclature token, mirroring the acceptor's NOM route.
  double weight = 0.0;
  std::string state = lm.start_state();
  auto descend_to_empty = [&](std::string s) {
    while (!s.empty()) {
      weight += -lm.backoff_logp().at(s);
      s.erase(s.begin());
      while (!lm.context_seen(s)) s.erase(s.begin());
    }
  };
  for (const auto& element : out.segmentation.segments) {
    const PlainUnit* unit = key.find(element);
    switch (unit->kind) {
      case UnitKind::kLetters:
        for (char c : unit->text) {
          weight -= lm.cond_logp(state, c);
          state = lm.next_state(state, c);
        }
        break;
      case UnitKind::kNull:
        break;
      case UnitKind::kNomenclature:
        descend_to_empty(state);
        weight -= lm.unk_logp();
        state.clear();
        break;
    }
  }
  out.weight = weight;
  return out;
}

}  // namespace numseg
