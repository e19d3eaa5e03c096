#pragma once

#include <map>
#include <vector>

#include "trinity/ckks.hpp"
#include "trinity/tfhe.hpp"

namespace trinity::convert {

// Scheme-switching between the RLWE side (CKKS ciphertexts) and the LWE side
// (TFHE-style ciphertexts over the same bottom prime q_0). Extraction peels
// plaintext coefficients into LWE phases; the reverse direction embeds each
// LWE back into the ring, merges the embeddings pairwise, and runs the
// automorphism-sum trace that annihilates every coefficient off the payload
// stride. The composed reverse path multiplies each payload value by N
// (n_slot from the merges, N/n_slot from the trace); callers divide that out
// in the plaintext domain after decryption.
class ConversionContext {
 public:
  // Builds the log2(N) automorphism keys X -> X^(2^j + 1) that the merge and
  // trace families need (between them they use exactly this set, for every
  // power-of-two slot count). n_slot is the declared payload width.
  ConversionContext(const ckks::CkksContext& ckks_ctx, const ckks::SecretKey& sk,
                    tfhe::TfheParams tfhe_params, size_t n_slot, uint64_t seed);

  const ckks::CkksContext& ckks() const { return ckks_; }
  const tfhe::TfheParams& tfhe_params() const { return tfhe_params_; }
  size_t n_slot() const { return n_slot_; }

  // Coefficients 0..n_slot-1 of ct's plaintext become LWE phases under the
  // key formed by the CKKS secret's coefficient vector. ct must sit at the
  // bottom of the chain (level 0); components are moved to coefficient rep
  // internally.
  std::vector<tfhe::LweCiphertext> ckks_to_lwes(const ckks::RlweCiphertext& ct,
                                                size_t n_slot) const;

  // One LWE (dimension N, modulus q_0) into an RLWE pair whose plaintext
  // constant coefficient is the LWE phase. The mask is reversed and negated
  // so that sample extraction at index 0 returns the input exactly.
  ckks::RlweCiphertext ring_embed(const tfhe::LweCiphertext& c) const;

  // Recursive even/odd merge: at width n the halves combine as
  // (even + X^(N/n)*odd) + Auto_(n+1)(even - X^(N/n)*odd). After the trace,
  // input i's phase sits at coefficient i*N/n_slot.
  ckks::RlweCiphertext pack_lwes(const std::vector<ckks::RlweCiphertext>& cts) const;

  // log2(N/n_slot) rounds of ct += Auto_t(ct) with t = (2N >> k) + 1. Kills
  // every coefficient whose index is not a multiple of N/n_slot and scales
  // the survivors by N/n_slot. n_slot = N is the empty product (identity).
  ckks::RlweCiphertext field_trace(const ckks::RlweCiphertext& ct, size_t n_slot) const;

  // ring_embed each input, pack, then trace with n_slot = |cts|.
  ckks::RlweCiphertext lwes_to_ckks(const std::vector<tfhe::LweCiphertext>& cts) const;

  // Counts only the conversion-local transforms (embedding NTTs, extraction
  // inverse NTTs). Merge and trace arithmetic records into the CKKS
  // context's recorder, since those run as ordinary CKKS operations.
  void recorder_reset() const { counts_ = KernelCounts{}; }
  const KernelCounts& recorder() const { return counts_; }

 private:
  const ckks::CkksContext& ckks_;
  tfhe::TfheParams tfhe_params_;
  size_t n_slot_;
  std::map<uint64_t, ckks::EvaluationKey> galois_;
  mutable KernelCounts counts_;

  const ckks::EvaluationKey& key_for(uint64_t elem) const;
  ckks::RlweCiphertext pack_recursive(const std::vector<ckks::RlweCiphertext>& cts, size_t base,
                                      size_t stride, size_t n) const;
};

}  // namespace trinity::convert
