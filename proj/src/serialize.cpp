#include "trinity/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace trinity::serialize {

namespace {

constexpr char kMagic[8] = {'T', 'R', 'N', 'F', 'H', 'E', 'C', '1'};

class Writer {
 public:
  void u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; i++) u8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; i++) u8(static_cast<uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
  void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }

  void header(TypeTag tag, uint64_t params_hash, int level, double scale) {
    buf_.append(kMagic, sizeof kMagic);
    u32(kVersion);
    u32(static_cast<uint32_t>(tag));
    u64(params_hash);
    i32(level);
    f64(scale);
  }

  void poly(const RingPolynomial& p) {
    u64(p.coeffs.size());
    u64(p.mod.value);
    u64(p.mod.two_n);
    u64(p.mod.primitive_root);
    u8(static_cast<uint8_t>(p.rep));
    for (uint64_t c : p.coeffs) u64(c);
  }

  void flush(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::IoError, "cannot open " + path + " for writing");
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) raise(Errc::IoError, "short write to " + path);
  }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::IoError, "cannot open " + path);
    buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  uint8_t u8() {
    if (pos_ >= buf_.size()) raise(Errc::IoError, path_ + " is truncated");
    return static_cast<uint8_t>(buf_[pos_++]);
  }
  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; i++) v |= static_cast<uint32_t>(u8()) << (8 * i);
    return v;
  }
  uint64_t u64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; i++) v |= static_cast<uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  int32_t i32() { return static_cast<int32_t>(u32()); }

  // returns (level, scale) after validating the fixed fields
  std::pair<int, double> header(TypeTag tag, uint64_t params_hash) {
    if (buf_.size() < sizeof kMagic || std::memcmp(buf_.data(), kMagic, sizeof kMagic) != 0)
      raise(Errc::IoError, path_ + " is not a ciphertext container");
    pos_ = sizeof kMagic;
    uint32_t version = u32();
    if (version != kVersion)
      raise(Errc::IoError, path_ + " has unsupported container version " + std::to_string(version));
    uint32_t got_tag = u32();
    if (got_tag != static_cast<uint32_t>(tag))
      raise(Errc::IoError, path_ + " holds object type " + std::to_string(got_tag) +
                               ", expected " + std::to_string(static_cast<uint32_t>(tag)));
    uint64_t got_hash = u64();
    if (got_hash != params_hash)
      raise(Errc::InvalidArgument, path_ + " was written under a different parameter set");
    int level = i32();
    double scale = f64();
    return {level, scale};
  }

  RingPolynomial poly() {
    uint64_t n = u64();
    uint64_t value = u64(), two_n = u64(), root = u64();
    uint8_t rep = u8();
    if (rep > 1) raise(Errc::IoError, path_ + " has an invalid rep byte");
    if (n == 0 || n > (uint64_t{1} << 24)) raise(Errc::IoError, path_ + " has a bad ring degree");
    if (value < 2) raise(Errc::IoError, path_ + " has a bad modulus");
    RingPolynomial p(static_cast<size_t>(n), Modulus(value, two_n, root), static_cast<Rep>(rep));
    for (auto& c : p.coeffs) c = u64();
    return p;
  }

  void finish() const {
    if (pos_ != buf_.size()) raise(Errc::IoError, path_ + " has trailing bytes");
  }

 private:
  std::string path_;
  std::string buf_;
  size_t pos_ = 0;
};

}  // namespace

void save_rlwe(const std::string& path, const ckks::RlweCiphertext& ct, uint64_t params_hash) {
  Writer w;
  w.header(TypeTag::RlweCiphertext, params_hash, ct.level, ct.scale);
  w.u32(static_cast<uint32_t>(ct.b.size()));
  for (const auto& limb : ct.b) w.poly(limb);
  for (const auto& limb : ct.a) w.poly(limb);
  w.flush(path);
}

ckks::RlweCiphertext load_rlwe(const std::string& path, uint64_t params_hash) {
  Reader r(path);
  auto [level, scale] = r.header(TypeTag::RlweCiphertext, params_hash);
  ckks::RlweCiphertext ct;
  ct.level = level;
  ct.scale = scale;
  uint32_t limbs = r.u32();
  ct.b.reserve(limbs);
  ct.a.reserve(limbs);
  for (uint32_t i = 0; i < limbs; i++) ct.b.push_back(r.poly());
  for (uint32_t i = 0; i < limbs; i++) ct.a.push_back(r.poly());
  r.finish();
  return ct;
}

void save_ckks_secret(const std::string& path, const ckks::SecretKey& sk, uint64_t params_hash) {
  Writer w;
  w.header(TypeTag::CkksSecret, params_hash, 0, 1.0);
  w.u32(static_cast<uint32_t>(sk.s.size()));
  for (const auto& limb : sk.s) w.poly(limb);
  w.flush(path);
}

ckks::SecretKey load_ckks_secret(const std::string& path, uint64_t params_hash) {
  Reader r(path);
  r.header(TypeTag::CkksSecret, params_hash);
  ckks::SecretKey sk;
  uint32_t limbs = r.u32();
  sk.s.reserve(limbs);
  for (uint32_t i = 0; i < limbs; i++) sk.s.push_back(r.poly());
  r.finish();
  return sk;
}

void save_lwe(const std::string& path, const tfhe::LweCiphertext& ct, uint64_t params_hash) {
  Writer w;
  w.header(TypeTag::LweCiphertext, params_hash, 0, 1.0);
  w.u64(ct.mod.value);
  w.u64(ct.mod.two_n);
  w.u64(ct.mod.primitive_root);
  w.u64(ct.a.size());
  for (uint64_t v : ct.a) w.u64(v);
  w.u64(ct.b);
  w.flush(path);
}

tfhe::LweCiphertext load_lwe(const std::string& path, uint64_t params_hash) {
  Reader r(path);
  r.header(TypeTag::LweCiphertext, params_hash);
  tfhe::LweCiphertext ct;
  uint64_t value = r.u64(), two_n = r.u64(), root = r.u64();
  if (value < 2) raise(Errc::IoError, path + " has a bad modulus");
  ct.mod = Modulus(value, two_n, root);
  uint64_t dim = r.u64();
  if (dim > (uint64_t{1} << 24)) raise(Errc::IoError, path + " has a bad mask dimension");
  ct.a.resize(static_cast<size_t>(dim));
  for (auto& v : ct.a) v = r.u64();
  ct.b = r.u64();
  r.finish();
  return ct;
}

void save_glwe(const std::string& path, const tfhe::GlweCiphertext& ct, uint64_t params_hash) {
  Writer w;
  w.header(TypeTag::GlweCiphertext, params_hash, 0, 1.0);
  w.u32(static_cast<uint32_t>(ct.mask.size()));
  for (const auto& p : ct.mask) w.poly(p);
  w.poly(ct.body);
  w.flush(path);
}

tfhe::GlweCiphertext load_glwe(const std::string& path, uint64_t params_hash) {
  Reader r(path);
  r.header(TypeTag::GlweCiphertext, params_hash);
  tfhe::GlweCiphertext ct;
  uint32_t k = r.u32();
  ct.mask.reserve(k);
  for (uint32_t i = 0; i < k; i++) ct.mask.push_back(r.poly());
  ct.body = r.poly();
  r.finish();
  return ct;
}

void save_ggsw(const std::string& path, const tfhe::GgswCiphertext& ct, uint64_t params_hash) {
  Writer w;
  w.header(TypeTag::GgswCiphertext, params_hash, 0, 1.0);
  w.u32(static_cast<uint32_t>(ct.rows.size()));
  for (const auto& row : ct.rows) {
    w.u32(static_cast<uint32_t>(row.mask.size()));
    for (const auto& p : row.mask) w.poly(p);
    w.poly(row.body);
  }
  w.flush(path);
}

tfhe::GgswCiphertext load_ggsw(const std::string& path, uint64_t params_hash) {
  Reader r(path);
  r.header(TypeTag::GgswCiphertext, params_hash);
  tfhe::GgswCiphertext ct;
  uint32_t rows = r.u32();
  ct.rows.reserve(rows);
  for (uint32_t i = 0; i < rows; i++) {
    tfhe::GlweCiphertext row;
    uint32_t k = r.u32();
    row.mask.reserve(k);
    for (uint32_t j = 0; j < k; j++) row.mask.push_back(r.poly());
    row.body = r.poly();
    ct.rows.push_back(std::move(row));
  }
  r.finish();
  return ct;
}

}  // namespace trinity::serialize
