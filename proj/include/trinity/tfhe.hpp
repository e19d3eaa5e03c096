#pragma once

#include <span>
#include <vector>

#include "trinity/kernels.hpp"
#include "trinity/polyring.hpp"

namespace trinity::tfhe {

using trinity::KernelCounts;

// All arithmetic runs over one NTT-friendly prime near the nominal power-of-
// two modulus, so the transform hardware path is identical to the RLWE side.
struct TfheParams {
  size_t n_poly = 0;  // N, GLWE ring degree
  size_t n_lwe = 0;   // base LWE dimension
  int glwe_dim = 0;   // k
  Modulus modulus;    // prime p = 1 mod 2N closest to (and below) nominal q
  int l_b = 0;        // blind-rotation gadget levels
  int log_base_b = 0;
  int l_k = 0;  // LWE keyswitch gadget levels
  int log_base_k = 0;
  int plaintext_bits = 0;
  // noise stddevs: fresh/base LWE, GLWE rows of bsk, ksk rows
  double sigma_lwe = 0, sigma_glwe = 0, sigma_ksk = 0;

  // 1024/500/1/2, 1024/630/1/3, 2048/592/1/3 over the prime closest to 2^32
  static TfheParams set_i();
  static TfheParams set_ii();
  static TfheParams set_iii();
  // N=64 with an exact (scale = 1) gadget: zero-noise pipelines are bit-exact
  static TfheParams toy_set();

  uint64_t space() const { return uint64_t{1} << plaintext_bits; }  // t
  uint64_t params_hash() const;
};

struct LweCiphertext {
  std::vector<uint64_t> a;
  uint64_t b = 0;
  Modulus mod;
  size_t dim() const { return a.size(); }
};

struct LweSecretKey {
  std::vector<uint8_t> bits;  // binary
};

struct GlweSecretKey {
  std::vector<RingPolynomial> s;  // k binary polynomials, evaluation rep
};

struct GlweCiphertext {
  std::vector<RingPolynomial> mask;  // k components
  RingPolynomial body;
};

// (k+1)*l_b rows by (k+1) columns, evaluation rep. Row (c, j), stored at
// index c*l_b + j, is a GLWE encryption with bit * g_j added to component c,
// g_j = scale * B^(l_b-1-j) (most significant digit first, matching
// digit_decompose).
struct GgswCiphertext {
  std::vector<GlweCiphertext> rows;
};

struct BootstrapKeys {
  std::vector<GgswCiphertext> bsk;            // n_lwe entries, bits of the LWE key
  std::vector<std::vector<LweCiphertext>> ksk;  // kN rows of l_k entries
};

class TfheContext {
 public:
  explicit TfheContext(TfheParams params);

  const TfheParams& params() const { return params_; }
  const NttTables& tables() const { return tables_; }

  // Padded message encoding: m in [0, 2t) maps to round(m*q/(2t)); valid
  // messages occupy [0, t) (padding bit clear), decode radius q/2^(pb+2).
  uint64_t encode(uint64_t m) const;
  uint64_t decode(uint64_t phase) const;

  LweSecretKey lwe_keygen(Rng& rng) const;
  GlweSecretKey glwe_keygen(Rng& rng) const;
  // base-key bits of the GLWE secret, for sample_extract outputs
  LweSecretKey extraction_key(const GlweSecretKey& sk) const;

  LweCiphertext lwe_encrypt_phase(uint64_t value, const LweSecretKey& sk, Rng& rng,
                                  bool zero_noise = false, bool zero_mask = false) const;
  LweCiphertext lwe_encrypt(uint64_t m, const LweSecretKey& sk, Rng& rng,
                            bool zero_noise = false, bool zero_mask = false) const;
  uint64_t lwe_phase(const LweCiphertext& c, const LweSecretKey& sk) const;
  uint64_t lwe_decrypt(const LweCiphertext& c, const LweSecretKey& sk) const;
  LweCiphertext lwe_trivial(uint64_t phase_value) const;
  LweCiphertext lwe_add(const LweCiphertext& c1, const LweCiphertext& c2) const;
  LweCiphertext lwe_sub(const LweCiphertext& c1, const LweCiphertext& c2) const;

  GlweCiphertext glwe_encrypt(const RingPolynomial& msg, const GlweSecretKey& sk, Rng& rng,
                              bool zero_noise = false, bool zero_mask = false) const;
  RingPolynomial glwe_decrypt(const GlweCiphertext& c, const GlweSecretKey& sk) const;
  GgswCiphertext ggsw_encrypt(int bit, const GlweSecretKey& sk, Rng& rng,
                              bool zero_noise = false, bool zero_mask = false) const;
  BootstrapKeys make_bootstrap_keys(const LweSecretKey& lwe_sk, const GlweSecretKey& glwe_sk,
                                    Rng& rng, bool zero_noise = false,
                                    bool zero_mask = false) const;

  // round(2N/q * component) for every component, output in [0, 2N)
  LweCiphertext mod_switch(const LweCiphertext& c) const;
  // glwe in Coefficient rep; ggsw rows in Evaluation rep; output Coefficient
  GlweCiphertext external_product(const GlweCiphertext& glwe, const GgswCiphertext& ggsw) const;
  GlweCiphertext blind_rotate(const GlweCiphertext& tv, const LweCiphertext& switched,
                              const std::vector<GgswCiphertext>& bsk) const;
  LweCiphertext sample_extract(const GlweCiphertext& glwe, size_t index) const;
  LweCiphertext tfhe_keyswitch(const LweCiphertext& c,
                               const std::vector<std::vector<LweCiphertext>>& ksk) const;

  // lut over the padded space (size t) or the full space (size 2t, must
  // satisfy the negacyclic complement lut[m+t] = 2t - lut[m] mod 2t). The
  // returned trivial GLWE is pre-rotated by the half-window offset so
  // blind_rotate needs no alignment knowledge.
  GlweCiphertext build_test_vector(std::span<const uint64_t> lut) const;
  LweCiphertext pbs(const LweCiphertext& c, const GlweCiphertext& tv,
                    const BootstrapKeys& keys) const;
  LweCiphertext pbs(const LweCiphertext& c, std::span<const uint64_t> lut,
                    const BootstrapKeys& keys) const;
  // boolean NAND: linear combination into the +-q/8 lane, then a constant
  // test vector whose negacyclic wrap supplies the sign split
  LweCiphertext nand_gate(const LweCiphertext& c1, const LweCiphertext& c2,
                          const BootstrapKeys& keys) const;

  void recorder_reset() const { counts_ = KernelCounts{}; }
  const KernelCounts& recorder() const { return counts_; }

 private:
  TfheParams params_;
  NttTables tables_;
  mutable KernelCounts counts_;

  const RingPolynomial& component(const GlweCiphertext& g, size_t c) const {
    return c < g.mask.size() ? g.mask[c] : g.body;
  }
  RingPolynomial& component(GlweCiphertext& g, size_t c) const {
    return c < g.mask.size() ? g.mask[c] : g.body;
  }
};

}  // namespace trinity::tfhe
