#ifndef NUMSEG_DECIPHER_HPP
#define NUMSEG_DECIPHER_HPP

// End-to-end known-key decipherment of non-deterministic ciphers: compose
// segmentation FST, key FST and LM acceptor, take the best path, and read
// the segmentation and plaintext off it.

#include <cstddef>

#include "numseg/charlm.hpp"
#include "numseg/core.hpp"
#include "numseg/wfst.hpp"

namespace numseg {

struct Decipherment {
  PlainText plaintext;        // placeholders "<NOM:element>" for nomenclature
  Segmentation segmentation;  // key-consistent; applying the key gives plaintext
  double weight = 0.0;        // -log LM probability of the chosen reading
};

// The plaintext maximizing LM probability among all key-consistent
// readings. Throws UnsegmentablePosition when the key cannot tile the
// cipher, NoPath when an LM vocabulary gap blocks every reading.
Decipherment decipher_with_key(const CipherText& cipher, const CipherKey& key,
                               const CharNgramLm& lm);
Decipherment decipher_with_key(const CipherText& cipher, const CipherKey& key,
                               const LmAcceptor& acceptor);

// Decodes overlapping chunks with LM-state carryover at stitch points
// aligned to segment boundaries of the previous chunk's best path. Output
// matches the whole-cipher decode wherever both run; stitches never split
// a key element.
Decipherment chunked_decode(const CipherText& cipher, const CipherKey& key,
                            const CharNgramLm& lm, size_t chunk);

}  // namespace numseg

#endif  // NUMSEG_DECIPHER_HPP
