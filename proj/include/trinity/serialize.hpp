#pragma once

#include <string>

#include "trinity/ckks.hpp"
#include "trinity/tfhe.hpp"

// Versioned binary container for ciphertexts and keys.
//
// Every file starts with a 36-byte header; all integers and the scale are
// little-endian regardless of host order:
//
//   offset size  field
//   0      8     magic, the ASCII bytes "TRNFHEC1"
//   8      4     container version, currently 1
//   12     4     type tag (TypeTag below)
//   16     8     hash of the originating parameter set
//   24     4     chain level as a signed 32-bit value (0 for TFHE objects)
//   28     8     scale tag, IEEE-754 binary64 (1.0 for TFHE objects)
//
// The payload follows immediately. Residues are unsigned 64-bit little-endian
// words, one per coefficient. A ring polynomial is stored self-describing as
//   n | modulus value | 2N | primitive root | rep byte | n residue words
// so loading requires no external tables. Composite payloads:
//
//   RlweCiphertext   limb count (u32), the b limbs, then the a limbs
//   CkksSecret       limb count (u32), the limbs over the extended basis
//   LweCiphertext    modulus triple (3 x u64), dimension (u64), mask, body
//   GlweCiphertext   mask count (u32), the mask polynomials, then the body
//   GgswCiphertext   row count (u32), each row a GlweCiphertext payload
//
// Loaders verify magic, version, type tag, and the caller's expected
// parameter hash, and reject truncated files and trailing bytes. Container
// damage raises IoError; a parameter-hash mismatch raises InvalidArgument.

namespace trinity::serialize {

enum class TypeTag : uint32_t {
  RlweCiphertext = 1,
  CkksSecret = 2,
  LweCiphertext = 3,
  GlweCiphertext = 4,
  GgswCiphertext = 5,
};

inline constexpr uint32_t kVersion = 1;

void save_rlwe(const std::string& path, const ckks::RlweCiphertext& ct, uint64_t params_hash);
ckks::RlweCiphertext load_rlwe(const std::string& path, uint64_t params_hash);

void save_ckks_secret(const std::string& path, const ckks::SecretKey& sk, uint64_t params_hash);
ckks::SecretKey load_ckks_secret(const std::string& path, uint64_t params_hash);

void save_lwe(const std::string& path, const tfhe::LweCiphertext& ct, uint64_t params_hash);
tfhe::LweCiphertext load_lwe(const std::string& path, uint64_t params_hash);

void save_glwe(const std::string& path, const tfhe::GlweCiphertext& ct, uint64_t params_hash);
tfhe::GlweCiphertext load_glwe(const std::string& path, uint64_t params_hash);

void save_ggsw(const std::string& path, const tfhe::GgswCiphertext& ct, uint64_t params_hash);
tfhe::GgswCiphertext load_ggsw(const std::string& path, uint64_t params_hash);

}  // namespace trinity::serialize
