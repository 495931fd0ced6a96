#include "numseg/wfst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace numseg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double Wfst::final_weight(int32_t state) const {
  auto it = finals.find(state);
  return it == finals.end() ? kInf : it->second;
}

size_t Wfst::num_arcs() const {
  size_t n = 0;
  for (const auto& v : arcs) n += v.size();
  return n;
}

// --- composition -----------------------------------------------------------

namespace {

// Filter states: 0 = free, 1 = a-side epsilon run, 2 = b-side epsilon run.
struct PairKey {
  int32_t sa, sb;
  int8_t f;
  bool operator==(const PairKey&) const = default;
};
struct PairKeyHash {
  size_t operator()(const PairKey& k) const {
    uint64_t v = (static_cast<uint64_t>(static_cast<uint32_t>(k.sa)) << 34) ^
                 (static_cast<uint64_t>(static_cast<uint32_t>(k.sb)) << 2) ^
                 static_cast<uint64_t>(k.f);
    v ^= v >> 33;
    v *= 0xff51afd7ed558ccdULL;
    v ^= v >> 33;
    return static_cast<size_t>(v);
  }
};

// Lazily built per-state index of b's arcs by input label.
class BArcIndex {
public:
  explicit BArcIndex(const Wfst& b)
      : b_(b), index_(b.num_states()), built_(b.num_states(), false) {}

  const std::vector<int32_t>& matching(int32_t state, Label ilabel) {
    if (!built_[state]) {
      built_[state] = true;
      const auto& arcs = b_.arcs[state];
      for (int32_t i = 0; i < static_cast<int32_t>(arcs.size()); ++i)
        index_[state][arcs[i].ilabel].push_back(i);
    }
    const auto& by_label = index_[state];
    auto it = by_label.find(ilabel);
    return it == by_label.end() ? empty_ : it->second;
  }

private:
  const Wfst& b_;
  std::vector<std::unordered_map<Label, std::vector<int32_t>>> index_;
  std::vector<bool> built_;
  const std::vector<int32_t> empty_;
};

}  // namespace

ComposedFst compose_ex(const Wfst& a, const Wfst& b,
                       const ComposeOptions& options) {
  ComposedFst out;
  if (a.num_states() == 0 || b.num_states() == 0) {
    out.fst.add_state();
    if (options.record_origins) out.origins.resize(1);
    return out;
  }

  std::unordered_map<PairKey, int32_t, PairKeyHash> ids;
  std::vector<PairKey> pending;
  BArcIndex b_index(b);

  auto state_of = [&](PairKey k) {
    auto it = ids.find(k);
    if (it != ids.end()) return it->second;
    int32_t id = out.fst.add_state();
    if (options.record_origins) out.origins.emplace_back();
    ids.emplace(k, id);
    pending.push_back(k);
    double fa = a.final_weight(k.sa);
    double fb = b.final_weight(k.sb);
    if (fa != kInf && fb != kInf) out.fst.set_final(id, fa + fb);
    return id;
  };

  auto emit = [&](int32_t src, Arc arc, ArcRef ra, ArcRef rb) {
    out.fst.add_arc(src, arc);
    if (options.record_origins) out.origins[src].push_back({ra, rb});
  };

  PairKey start{a.start, options.b_start.value_or(b.start), 0};
  out.fst.start = state_of(start);

  // Failure matching: descend b's epsilon (backoff) chain until a state
  // carries a direct arc for the label; the accumulated chain weight rides
  // on the emitted arc.
  auto failure_matches = [&](int32_t sb, Label label,
                             double* chain_weight) -> std::pair<int32_t, const std::vector<int32_t>*> {
    double acc = 0.0;
    int32_t state = sb;
    while (true) {
      const auto& direct = b_index.matching(state, label);
      if (!direct.empty()) {
        *chain_weight = acc;
        return {state, &direct};
      }
      const auto& eps = b_index.matching(state, kEpsilon);
      if (eps.empty()) return {state, nullptr};
      acc += b.arcs[state][eps.front()].weight;  // backoff chains are unary
      state = b.arcs[state][eps.front()].dst;
    }
  };

  for (size_t qi = 0; qi < pending.size(); ++qi) {
    PairKey k = pending[qi];
    int32_t src = ids.at(k);
    const auto& a_arcs = a.arcs[k.sa];
    const auto& b_arcs = b.arcs[k.sb];

    for (int32_t ia = 0; ia < static_cast<int32_t>(a_arcs.size()); ++ia) {
      const Arc& x = a_arcs[ia];
      if (x.olabel != kEpsilon) {
        if (options.b_epsilon_is_failure) {
          double chain = 0.0;
          auto [bs, direct] = failure_matches(k.sb, x.olabel, &chain);
          if (direct == nullptr) continue;
          for (int32_t ib : *direct) {
            const Arc& y = b.arcs[bs][ib];
            emit(src,
                 {x.ilabel, y.olabel, x.weight + chain + y.weight,
                  state_of({x.dst, y.dst, 0})},
                 {k.sa, ia}, {bs, ib});
          }
        } else {
          for (int32_t ib : b_index.matching(k.sb, x.olabel)) {
            const Arc& y = b_arcs[ib];
            emit(src,
                 {x.ilabel, y.olabel, x.weight + y.weight,
                  state_of({x.dst, y.dst, 0})},
                 {k.sa, ia}, {k.sb, ib});
          }
        }
      } else {
        if (k.f != 2)
          emit(src, {x.ilabel, kEpsilon, x.weight, state_of({x.dst, k.sb, 1})},
               {k.sa, ia}, {});
        if (k.f == 0 && !options.b_epsilon_is_failure) {
          for (int32_t ib : b_index.matching(k.sb, kEpsilon)) {
            const Arc& y = b_arcs[ib];
            emit(src,
                 {x.ilabel, y.olabel, x.weight + y.weight,
                  state_of({x.dst, y.dst, 0})},
                 {k.sa, ia}, {k.sb, ib});
          }
        }
      }
    }
    if (k.f != 1 && !options.b_epsilon_is_failure) {
      for (int32_t ib : b_index.matching(k.sb, kEpsilon)) {
        const Arc& y = b_arcs[ib];
        emit(src, {kEpsilon, y.olabel, y.weight, state_of({k.sa, y.dst, 2})},
             {}, {k.sb, ib});
      }
    }
  }
  return out;
}

Wfst compose(const Wfst& a, const Wfst& b) {
  return compose_ex(a, b).fst;
}

// --- shortest path ----------------------------------------------------------

namespace {

// Minimum cost from each state to acceptance (arc weights plus final
// weight), by Dijkstra over the reversed machine.
std::vector<double> cost_to_accept(const Wfst& m) {
  const size_t n = m.num_states();
  std::vector<std::vector<std::pair<int32_t, double>>> radj(n);
  for (size_t u = 0; u < n; ++u)
    for (const Arc& arc : m.arcs[u])
      radj[arc.dst].emplace_back(static_cast<int32_t>(u), arc.weight);

  std::vector<double> dist(n, kInf);
  using Item = std::pair<double, int32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (const auto& [state, weight] : m.finals) {
    dist[state] = weight;
    pq.emplace(weight, state);
  }
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : radj[u]) {
      double nd = w + dist[u];
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.emplace(nd, v);
      }
    }
  }
  return dist;
}

// Resolves equal-weight choices: lexicographically smallest output label
// suffix, then stopping, then arc order. Memoized over the tight subgraph,
// which is tiny in practice.
class TieResolver {
public:
  TieResolver(const Wfst& m, const std::vector<double>& dist)
      : m_(m), dist_(dist), status_(m.num_states(), 0),
        suffix_(m.num_states()), choice_(m.num_states(), kUnset) {}

  // Returns the chosen tight option: -1 for "stop here", else arc index.
  int32_t choose(int32_t u) {
    resolve(u);
    return choice_[u];
  }

private:
  static constexpr int32_t kUnset = -2;

  const std::vector<Label>* resolve(int32_t u) {
    if (status_[u] == 2) return &suffix_[u];
    if (status_[u] == 1) return nullptr;  // cycle guard
    status_[u] = 1;
    bool have = false;
    std::vector<Label> best;
    int32_t best_choice = kUnset;
    if (m_.final_weight(u) == dist_[u]) {
      best_choice = -1;
      have = true;
    }
    const auto& arcs = m_.arcs[u];
    for (int32_t k = 0; k < static_cast<int32_t>(arcs.size()); ++k) {
      const Arc& arc = arcs[k];
      if (arc.weight + dist_[arc.dst] != dist_[u]) continue;
      const std::vector<Label>* sub = resolve(arc.dst);
      if (sub == nullptr) continue;
      std::vector<Label> cand;
      if (arc.olabel != kEpsilon) cand.push_back(arc.olabel);
      cand.insert(cand.end(), sub->begin(), sub->end());
      if (!have || cand < best) {
        best = std::move(cand);
        best_choice = k;
        have = true;
      }
    }
    status_[u] = 2;
    suffix_[u] = std::move(best);
    choice_[u] = best_choice;
    return &suffix_[u];
  }

  const Wfst& m_;
  const std::vector<double>& dist_;
  std::vector<int8_t> status_;
  std::vector<std::vector<Label>> suffix_;
  std::vector<int32_t> choice_;
};

}  // namespace

Path shortest_path(const Wfst& m) {
  if (m.num_states() == 0) throw NoPath("machine has no states");
  std::vector<double> dist = cost_to_accept(m);
  if (dist[m.start] == kInf) throw NoPath("no accepting path");

  Path path;
  path.weight = dist[m.start];
  TieResolver ties(m, dist);
  int32_t u = m.start;
  while (true) {
    // Fast path: a single tight option needs no lexicographic comparison.
    int32_t tight_arc = -1;
    int n_options = 0;
    if (m.final_weight(u) == dist[u]) ++n_options;
    const auto& arcs = m.arcs[u];
    for (int32_t k = 0; k < static_cast<int32_t>(arcs.size()); ++k) {
      if (arcs[k].weight + dist[arcs[k].dst] == dist[u]) {
        ++n_options;
        tight_arc = k;
      }
    }
    int32_t choice;
    if (n_options == 1) {
      choice = tight_arc;  // -1 when the single option was stopping
    } else {
      choice = ties.choose(u);
    }
    if (choice < 0) break;
    const Arc& arc = arcs[choice];
    path.arcs.push_back({u, choice});
    if (arc.ilabel != kEpsilon) path.ilabels.push_back(arc.ilabel);
    if (arc.olabel != kEpsilon) path.olabels.push_back(arc.olabel);
    u = arc.dst;
  }
  return path;
}

double count_paths(const Wfst& m) {
  if (m.num_states() == 0) return 0.0;
  std::vector<int8_t> color(m.num_states(), 0);
  std::vector<double> count(m.num_states(), 0.0);
  // Iterative DFS with explicit post-processing.
  std::vector<std::pair<int32_t, size_t>> stack{{m.start, 0}};
  color[m.start] = 1;
  while (!stack.empty()) {
    auto& [u, next] = stack.back();
    if (next == 0) count[u] = m.is_final(u) ? 1.0 : 0.0;
    if (next < m.arcs[u].size()) {
      int32_t v = m.arcs[u][next++].dst;
      if (color[v] == 1) throw Error("count_paths: machine is cyclic");
      if (color[v] == 0) {
        color[v] = 1;
        stack.emplace_back(v, 0);
      }
    } else {
      for (const Arc& arc : m.arcs[u]) count[u] += count[arc.dst];
      color[u] = 2;
      stack.pop_back();
    }
  }
  return count[m.start];
}

std::string dump_att(const Wfst& m) {
  std::ostringstream os;
  for (size_t u = 0; u < m.num_states(); ++u)
    for (const Arc& arc : m.arcs[u])
      os << u << '\t' << arc.dst << '\t' << arc.ilabel << '\t' << arc.olabel
         << '\t' << arc.weight << '\n';
  std::vector<int32_t> finals;
  for (const auto& [s, w] : m.finals) finals.push_back(s);
  std::sort(finals.begin(), finals.end());
  for (int32_t s : finals) os << s << '\t' << m.finals.at(s) << '\n';
  return os.str();
}

// --- cipher-specific machines -----------------------------------------------

PlainSymbols PlainSymbols::from_chars(std::string chars) {
  std::sort(chars.begin(), chars.end());
  chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
  return PlainSymbols{std::move(chars)};
}

Label PlainSymbols::label_of(char c) const {
  size_t pos = chars.find(c);
  if (pos == std::string::npos)
    throw Error(std::string("character '") + c + "' has no plaintext label");
  return static_cast<Label>(pos) + 1;
}

char PlainSymbols::char_of(Label l) const {
  if (l < 1 || static_cast<size_t>(l) > chars.size())
    throw Error("label " + std::to_string(l) + " is not a plaintext character");
  return chars[static_cast<size_t>(l) - 1];
}

std::vector<char> element_reachability(std::string_view flat,
                                       const CipherKey& key) {
  std::vector<char> reach(flat.size() + 1, 0);
  reach[0] = 1;
  for (size_t i = 0; i < flat.size(); ++i) {
    if (!reach[i]) continue;
    for (const auto& element : key.sorted_elements()) {
      if (flat.compare(i, element.size(), element) == 0)
        reach[i + element.size()] = 1;
    }
  }
  return reach;
}

SegMachine build_segmentation_fst(const CipherText& cipher,
                                  const CipherKey& key) {
  const std::string& flat = cipher.flat;
  std::vector<char> reach = element_reachability(flat, key);
  if (!reach[flat.size()]) {
    size_t stuck = 0;
    for (size_t i = 0; i <= flat.size(); ++i)
      if (reach[i]) stuck = i;
    throw UnsegmentablePosition(stuck, flat.substr(stuck, 8));
  }

  const CipherAlphabet& alphabet = CipherAlphabet::digits();
  auto sym_label = [&](char c) {
    size_t pos = alphabet.symbols().find(c);
    if (pos == std::string::npos) {
      // Extended alphabets: derive the label from the byte value, offset
      // past the digit block. Stable and collision-free for single bytes.
      return static_cast<Label>(11 + static_cast<unsigned char>(c));
    }
    return static_cast<Label>(pos) + 1;
  };

  SegMachine out;
  out.key = &key;
  Wfst& fst = out.fst;
  for (size_t i = 0; i <= flat.size(); ++i) fst.add_state();
  fst.start = 0;
  fst.set_final(static_cast<int32_t>(flat.size()), 0.0);

  const auto& elements = key.sorted_elements();
  for (size_t i = 0; i < flat.size(); ++i) {
    if (!reach[i]) continue;
    for (size_t ei = 0; ei < elements.size(); ++ei) {
      const std::string& e = elements[ei];
      if (flat.compare(i, e.size(), e) != 0) continue;
      Label token = static_cast<Label>(ei) + 1;
      int32_t src = static_cast<int32_t>(i);
      for (size_t k = 0; k + 1 < e.size(); ++k) {
        int32_t mid = fst.add_state();
        fst.add_arc(src, {sym_label(e[k]), kEpsilon, 0.0, mid});
        src = mid;
      }
      fst.add_arc(src, {sym_label(e.back()), token, 0.0,
                        static_cast<int32_t>(i + e.size())});
    }
  }
  return out;
}

Wfst build_key_fst(const CipherKey& key, const PlainSymbols& symbols) {
  Wfst fst;
  int32_t hub = fst.add_state();
  fst.start = hub;
  fst.set_final(hub, 0.0);
  const auto& elements = key.sorted_elements();
  for (size_t ei = 0; ei < elements.size(); ++ei) {
    Label token = static_cast<Label>(ei) + 1;
    const PlainUnit* unit = key.find(elements[ei]);
    // Elements whose target falls outside the plaintext symbol inventory
    // get no arc; readings through them disappear, and if that blocks all
    // readings the decode reports NoPath.
    if (unit->kind == UnitKind::kLetters &&
        unit->text.find_first_not_of(symbols.chars) != std::string::npos)
      continue;
    switch (unit->kind) {
      case UnitKind::kNull:
        fst.add_arc(hub, {token, kEpsilon, 0.0, hub});
        break;
      case UnitKind::kNomenclature:
        fst.add_arc(hub, {token, symbols.nom_label(), 0.0, hub});
        break;
      case UnitKind::kLetters: {
        const std::string& text = unit->text;
        int32_t src = hub;
        for (size_t k = 0; k + 1 < text.size(); ++k) {
          int32_t mid = fst.add_state();
          fst.add_arc(src, {src == hub ? token : kEpsilon,
                            symbols.label_of(text[k]), 0.0, mid});
          src = mid;
        }
        fst.add_arc(src, {src == hub ? token : kEpsilon,
                          symbols.label_of(text.back()), 0.0, hub});
        break;
      }
    }
  }
  return fst;
}

}  // namespace numseg
