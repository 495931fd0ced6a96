#ifndef NUMSEG_WFST_HPP
#define NUMSEG_WFST_HPP

// Minimal weighted finite-state transducer engine over the tropical
// semiring: construction, composition with an epsilon-matching filter, and
// single-source shortest (best) path. Machines are immutable once built;
// composition and search are pure.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "numseg/core.hpp"

namespace numseg {

using Label = int32_t;
constexpr Label kEpsilon = 0;

struct Arc {
  Label ilabel = kEpsilon;
  Label olabel = kEpsilon;
  double weight = 0.0;
  int32_t dst = 0;
};

struct Wfst {
  int32_t start = 0;
  std::vector<std::vector<Arc>> arcs;            // per state
  std::unordered_map<int32_t, double> finals;    // state -> final weight

  int32_t add_state() {
    arcs.emplace_back();
    return static_cast<int32_t>(arcs.size()) - 1;
  }
  void add_arc(int32_t state, Arc arc) { arcs[state].push_back(arc); }
  void set_final(int32_t state, double weight = 0.0) { finals[state] = weight; }
  size_t num_states() const { return arcs.size(); }
  bool is_final(int32_t state) const { return finals.count(state) != 0; }
  double final_weight(int32_t state) const;  // +inf when not final
  size_t num_arcs() const;
};

struct ArcRef {
  int32_t state = -1;
  int32_t index = -1;
  bool valid() const { return state >= 0; }
};

struct Path {
  std::vector<ArcRef> arcs;
  double weight = 0.0;
  std::vector<Label> ilabels;  // epsilons omitted
  std::vector<Label> olabels;
};

// Which source arcs produced a composed arc; either side may be absent
// when only the other machine moved.
struct ArcOrigin {
  ArcRef a;
  ArcRef b;
};

struct ComposeOptions {
  std::optional<int32_t> b_start;  // override b's start state
  bool record_origins = false;
  // Treat b's epsilon-input arcs as failure (backoff) arcs: taken only when
  // the symbol has no direct arc, with the hops folded into the emitted
  // arc. This is the "backoff only on miss" convention for language-model
  // acceptors; it yields exactly one composed path per reading.
  bool b_epsilon_is_failure = false;
};

struct ComposedFst {
  Wfst fst;
  std::vector<std::vector<ArcOrigin>> origins;  // parallel to fst.arcs
};

// Standard composition with the three-state epsilon-sequencing filter, so
// each pair of source paths is represented by exactly one composed path.
ComposedFst compose_ex(const Wfst& a, const Wfst& b,
                       const ComposeOptions& options = {});
Wfst compose(const Wfst& a, const Wfst& b);

// Minimum-weight accepting path. Requires non-negative weights. Ties are
// broken by the lexicographically smallest output label sequence, then
// toward fewer arcs. Throws NoPath when nothing accepts.
Path shortest_path(const Wfst& m);

// Number of accepting paths of an acyclic machine.
double count_paths(const Wfst& m);

// Text dump in the common 5-column arc format (src dst in out weight).
std::string dump_att(const Wfst& m);

// --- cipher-specific machines ----------------------------------------------

// Plaintext-side label table shared by the key FST and the LM acceptor:
// label = position in the sorted character inventory + 1; one extra label
// for nomenclature tokens.
struct PlainSymbols {
  std::string chars;  // sorted, unique
  static PlainSymbols from_chars(std::string chars);
  Label label_of(char c) const;
  char char_of(Label l) const;
  Label nom_label() const { return static_cast<Label>(chars.size()) + 1; }
};

// Left-to-right lattice over cipher positions: one arc chain per matching
// key element, consuming its symbols and emitting the element's token id
// (index into key.sorted_elements() + 1) on the final arc. Weight 0.
// Throws UnsegmentablePosition when no complete tiling exists.
struct SegMachine {
  Wfst fst;
  const CipherKey* key = nullptr;
  const std::string& element_of(Label token) const {
    return key->sorted_elements()[static_cast<size_t>(token) - 1];
  }
};
SegMachine build_segmentation_fst(const CipherText& cipher,
                                  const CipherKey& key);

// Positions of flat reachable by tiling key elements from position 0.
std::vector<char> element_reachability(std::string_view flat,
                                       const CipherKey& key);

// Single-hub transducer from element tokens to plaintext labels; nulls map
// to epsilon, nomenclature elements to the reserved NOM label, multi-letter
// targets to a label chain.
Wfst build_key_fst(const CipherKey& key, const PlainSymbols& symbols);

}  // namespace numseg

#endif  // NUMSEG_WFST_HPP
