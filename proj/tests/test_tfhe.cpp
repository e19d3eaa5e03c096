#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "trinity/tfhe.hpp"

using namespace trinity;
using namespace trinity::tfhe;

namespace {

const TfheContext& toy_ctx() {
  static TfheContext ctx(TfheParams::toy_set());
  return ctx;
}

// toy ring with a 1-bit space, for boolean-gate and window-pattern tests
const TfheContext& toy1_ctx() {
  static TfheContext ctx = [] {
    TfheParams p = TfheParams::toy_set();
    p.plaintext_bits = 1;
    return TfheContext(p);
  }();
  return ctx;
}

struct ToyKeys {
  LweSecretKey lwe;
  GlweSecretKey glwe;
  LweSecretKey ext;
};

ToyKeys make_toy_keys(const TfheContext& ctx, uint64_t seed) {
  Rng rng(seed);
  ToyKeys k;
  k.lwe = ctx.lwe_keygen(rng);
  k.glwe = ctx.glwe_keygen(rng);
  k.ext = ctx.extraction_key(k.glwe);
  return k;
}

struct SetIFixture {
  TfheContext ctx;
  LweSecretKey lwe;
  GlweSecretKey glwe;
  BootstrapKeys keys;

  SetIFixture() : ctx(TfheParams::set_i()) {
    Rng rng(2024);
    lwe = ctx.lwe_keygen(rng);
    glwe = ctx.glwe_keygen(rng);
    keys = ctx.make_bootstrap_keys(lwe, glwe, rng);
  }
};

const SetIFixture& set_i_fix() {
  static SetIFixture f;
  return f;
}

// worst-case centered difference between two phase polynomials
int64_t poly_phase_gap(const RingPolynomial& a, const RingPolynomial& b) {
  int64_t worst = 0;
  for (size_t i = 0; i < a.coeffs.size(); i++) {
    int64_t d = from_residue(mod_sub(a.coeffs[i], b.coeffs[i], a.mod), a.mod);
    if (d < 0) d = -d;
    if (d > worst) worst = d;
  }
  return worst;
}

}  // namespace

TEST_CASE("tfhe parameter sets carry the frozen primes and shapes") {
  TfheParams a = TfheParams::set_i();
  CHECK(a.n_poly == 1024);
  CHECK(a.n_lwe == 500);
  CHECK(a.glwe_dim == 1);
  CHECK(a.l_b == 2);
  CHECK(a.log_base_b == 10);
  CHECK(a.l_k == 2);
  CHECK(a.log_base_k == 10);
  CHECK(a.plaintext_bits == 1);
  CHECK(a.modulus.value == 4294957057ULL);

  TfheParams b = TfheParams::set_ii();
  CHECK(b.n_poly == 1024);
  CHECK(b.n_lwe == 630);
  CHECK(b.l_b == 3);
  CHECK(b.modulus.value == 4294957057ULL);

  TfheParams c = TfheParams::set_iii();
  CHECK(c.n_poly == 2048);
  CHECK(c.n_lwe == 592);
  CHECK(c.l_b == 3);
  CHECK(c.modulus.value == 4294955009ULL);

  TfheParams t = TfheParams::toy_set();
  CHECK(t.n_poly == 64);
  CHECK(t.n_lwe == 4);
  CHECK(t.modulus.value == 1048193ULL);

  for (const TfheParams& p : {a, b, c, t}) {
    CHECK(is_prime_u64(p.modulus.value));
    CHECK(p.modulus.value % (2 * p.n_poly) == 1);
    // the nominal modulus is the next power of two above the prime
    uint64_t nominal = uint64_t{1} << p.modulus.bits;
    CHECK(p.modulus.value < nominal);
    CHECK(nominal - p.modulus.value < 8 * 2 * p.n_poly);
    // gadget recomposition must cover the full modulus so decomposition
    // never clamps: scale * B^l >= q for both gadgets
    uint64_t sb = decompose_scale(p.modulus, static_cast<unsigned>(p.l_b),
                                  static_cast<unsigned>(p.log_base_b));
    uint64_t sk = decompose_scale(p.modulus, static_cast<unsigned>(p.l_k),
                                  static_cast<unsigned>(p.log_base_k));
    CHECK(((sb << (p.l_b * p.log_base_b)) >= p.modulus.value));
    CHECK(((sk << (p.l_k * p.log_base_k)) >= p.modulus.value));
  }
  // the toy gadget is exact: scale 1 means digits recompose residues exactly
  CHECK(decompose_scale(t.modulus, 2, 10) == 1);

  CHECK(a.params_hash() != b.params_hash());
  CHECK(b.params_hash() != c.params_hash());
  CHECK(a.params_hash() == TfheParams::set_i().params_hash());
}

TEST_CASE("message encoding round-trips and honours the decode radius") {
  const TfheContext& ctx = toy_ctx();
  uint64_t q = ctx.params().modulus.value;
  uint64_t t = ctx.params().space();
  uint64_t two_t = 2 * t;
  Modulus mod = ctx.params().modulus;

  CHECK(ctx.encode(0) == 0);
  for (uint64_t m = 0; m < two_t; m++) {
    uint64_t ph = ctx.encode(m);
    // nearest residue to m*q/(2t)
    mpz_class target = mpz_class(m) * q;
    mpz_class twice_err = 2 * mpz_class(ph) * two_t - 2 * target;
    CHECK(abs(twice_err) <= two_t);
    CHECK(ctx.decode(ph) == m);
  }

  // everything strictly inside the radius q/2^(pb+2) decodes back
  uint64_t safe = q / (2 * two_t) - 1;
  for (uint64_t m = 0; m < two_t; m++) {
    uint64_t ph = ctx.encode(m);
    CHECK(ctx.decode(mod_add(ph, safe, mod)) == m);
    CHECK(ctx.decode(mod_sub(ph, safe, mod)) == m);
  }
  // one step past the radius tips message 0 into a neighbour
  uint64_t flip = q / (2 * two_t) + 1;
  CHECK(ctx.decode(mod_add(ctx.encode(0), flip, mod)) == 1);
  CHECK(ctx.decode(mod_sub(ctx.encode(0), flip, mod)) == two_t - 1);

  CHECK_THROWS_AS(static_cast<void>(ctx.encode(two_t)), Error);
}

TEST_CASE("lwe encryption decrypts and adds phases exactly") {
  const TfheContext& ctx = toy_ctx();
  Rng rng(501);
  LweSecretKey sk = ctx.lwe_keygen(rng);
  CHECK(sk.bits.size() == 4);
  for (uint8_t b : sk.bits) CHECK(b <= 1);

  // zero noise: the mask cancels exactly and the phase is the raw encoding
  for (uint64_t m = 0; m < 2 * ctx.params().space(); m++) {
    LweCiphertext c = ctx.lwe_encrypt(m, sk, rng, true);
    CHECK(ctx.lwe_phase(c, sk) == ctx.encode(m));
    CHECK(ctx.lwe_decrypt(c, sk) == m);
  }

  // real noise stays inside the decode radius with huge margin
  for (int trial = 0; trial < 100; trial++) {
    uint64_t m = rng.uniform(ctx.params().space());
    LweCiphertext c = ctx.lwe_encrypt(m, sk, rng);
    CHECK(ctx.lwe_decrypt(c, sk) == m);
  }

  // trivial ciphertexts carry their phase under any key
  LweCiphertext tr = ctx.lwe_trivial(12345);
  CHECK(ctx.lwe_phase(tr, sk) == 12345);

  // homomorphic add/sub act on phases
  LweCiphertext c1 = ctx.lwe_encrypt_phase(1000, sk, rng);
  LweCiphertext c2 = ctx.lwe_encrypt_phase(234, sk, rng);
  uint64_t p1 = ctx.lwe_phase(c1, sk), p2 = ctx.lwe_phase(c2, sk);
  CHECK(ctx.lwe_phase(ctx.lwe_add(c1, c2), sk) == mod_add(p1, p2, c1.mod));
  CHECK(ctx.lwe_phase(ctx.lwe_sub(c1, c2), sk) == mod_sub(p1, p2, c1.mod));

  LweCiphertext bad = c1;
  bad.a.pop_back();
  CHECK_THROWS_AS(static_cast<void>(ctx.lwe_add(c1, bad)), Error);
  CHECK_THROWS_AS(static_cast<void>(ctx.lwe_phase(bad, sk)), Error);
}

TEST_CASE("mod switch rounds every component to the 2N grid") {
  const TfheContext& ctx = toy_ctx();
  uint64_t q = ctx.params().modulus.value;
  uint64_t two_n = 2 * ctx.params().n_poly;

  LweCiphertext zero = ctx.lwe_trivial(0);
  LweCiphertext sw = ctx.mod_switch(zero);
  CHECK(sw.b == 0);
  for (uint64_t x : sw.a) CHECK(x == 0);
  CHECK(sw.mod.value == two_n);

  // (q +- 1)/2 both sit exactly on N
  LweCiphertext half = ctx.lwe_trivial((q - 1) / 2);
  CHECK(ctx.mod_switch(half).b == ctx.params().n_poly);
  half.b = (q + 1) / 2;
  CHECK(ctx.mod_switch(half).b == ctx.params().n_poly);

  // independent oracle: 2N*x - out*q, centered mod 2Nq, is at most q/2 away
  Rng rng(77);
  LweCiphertext c = ctx.lwe_trivial(0);
  for (auto& x : c.a) x = rng.uniform(q);
  c.b = rng.uniform(q);
  sw = ctx.mod_switch(c);
  mpz_class ring = mpz_class(two_n) * q;
  auto check_round = [&](uint64_t in, uint64_t out) {
    CHECK(out < two_n);
    mpz_class d = mpz_class(two_n) * in - mpz_class(out) * q;
    d %= ring;
    if (d < 0) d += ring;
    if (d * 2 > ring) d -= ring;
    CHECK(2 * abs(d) <= q);
  };
  for (size_t i = 0; i < c.a.size(); i++) check_round(c.a[i], sw.a[i]);
  check_round(c.b, sw.b);
}

TEST_CASE("glwe encryption hides and recovers polynomial messages") {
  const TfheContext& ctx = toy_ctx();
  ToyKeys k = make_toy_keys(ctx, 88);
  Rng rng(89);
  size_t n = ctx.params().n_poly;

  RingPolynomial msg(n, ctx.params().modulus, Rep::Coefficient);
  for (auto& v : msg.coeffs) v = rng.uniform(ctx.params().modulus.value);

  // zero noise and zero mask: the body is the message itself
  GlweCiphertext c0 = ctx.glwe_encrypt(msg, k.glwe, rng, true, true);
  CHECK(c0.body.coeffs == msg.coeffs);
  for (const auto& m : c0.mask)
    for (uint64_t v : m.coeffs) CHECK(v == 0);

  // zero noise with a live mask still decrypts bit-exactly
  GlweCiphertext c1 = ctx.glwe_encrypt(msg, k.glwe, rng, true);
  bool mask_live = false;
  for (uint64_t v : c1.mask[0].coeffs) mask_live |= v != 0;
  CHECK(mask_live);
  CHECK(ctx.glwe_decrypt(c1, k.glwe).coeffs == msg.coeffs);

  // noisy decryption is off by a small centered error only
  GlweCiphertext c2 = ctx.glwe_encrypt(msg, k.glwe, rng);
  RingPolynomial dec = ctx.glwe_decrypt(c2, k.glwe);
  CHECK(poly_phase_gap(dec, msg) <= 9);  // 8 sigma + 1 at sigma_glwe = 1

  RingPolynomial eval_msg = ntt_forward(msg, ctx.tables());
  CHECK_THROWS_AS(static_cast<void>(ctx.glwe_encrypt(eval_msg, k.glwe, rng)), Error);
}

TEST_CASE("external product selects by the encrypted bit") {
  const TfheContext& ctx = toy_ctx();
  ToyKeys k = make_toy_keys(ctx, 90);
  Rng rng(91);
  size_t n = ctx.params().n_poly;

  RingPolynomial msg(n, ctx.params().modulus, Rep::Coefficient);
  for (auto& v : msg.coeffs) v = rng.uniform(ctx.params().modulus.value);
  GlweCiphertext g = ctx.glwe_encrypt(msg, k.glwe, rng, true);

  // toy gadget is exact and noise is off, so the output phase is bit-exact
  GgswCiphertext one = ctx.ggsw_encrypt(1, k.glwe, rng, true);
  GlweCiphertext kept = ctx.external_product(g, one);
  CHECK(ctx.glwe_decrypt(kept, k.glwe).coeffs == msg.coeffs);

  GgswCiphertext zero = ctx.ggsw_encrypt(0, k.glwe, rng, true);
  GlweCiphertext dropped = ctx.external_product(g, zero);
  RingPolynomial zero_phase = ctx.glwe_decrypt(dropped, k.glwe);
  for (uint64_t v : zero_phase.coeffs) CHECK(v == 0);

  // an all-zero input annihilates regardless of the bit
  GlweCiphertext null;
  null.mask.emplace_back(n, ctx.params().modulus, Rep::Coefficient);
  null.body = RingPolynomial(n, ctx.params().modulus, Rep::Coefficient);
  GlweCiphertext out = ctx.external_product(null, one);
  for (uint64_t v : out.body.coeffs) CHECK(v == 0);
  for (uint64_t v : out.mask[0].coeffs) CHECK(v == 0);

  // with real noise the phase error stays far below the decode radius
  const SetIFixture& f = set_i_fix();
  Rng rng2(92);
  RingPolynomial big(f.ctx.params().n_poly, f.ctx.params().modulus, Rep::Coefficient);
  for (auto& v : big.coeffs) v = rng2.uniform(f.ctx.params().modulus.value);
  GlweCiphertext gb = f.ctx.glwe_encrypt(big, f.glwe, rng2, true);
  GgswCiphertext ob = f.ctx.ggsw_encrypt(1, f.glwe, rng2);
  RingPolynomial got = f.ctx.glwe_decrypt(f.ctx.external_product(gb, ob), f.glwe);
  CHECK(poly_phase_gap(got, big) < (int64_t{1} << 20));

  GgswCiphertext bad = one;
  bad.rows.pop_back();
  CHECK_THROWS_AS(static_cast<void>(ctx.external_product(g, bad)), Error);
}

TEST_CASE("blind rotation realises the negacyclic monomial shift") {
  const TfheContext& ctx = toy_ctx();
  ToyKeys k = make_toy_keys(ctx, 93);
  Rng rng(94);
  size_t n = ctx.params().n_poly;
  uint64_t two_n = 2 * n;

  std::vector<uint64_t> lut = {0, 1, 2, 3};
  GlweCiphertext tv = ctx.build_test_vector(lut);

  std::vector<GgswCiphertext> bsk;
  for (size_t i = 0; i < ctx.params().n_lwe; i++)
    bsk.push_back(ctx.ggsw_encrypt(k.lwe.bits[i], k.glwe, rng, true));

  // zero-noise toy pipeline: the accumulator equals the test vector rotated
  // by the exact phase, bit for bit
  for (int trial = 0; trial < 10; trial++) {
    LweCiphertext sw;
    sw.mod = Modulus(two_n, 0, 0);
    sw.a.resize(ctx.params().n_lwe);
    for (auto& x : sw.a) x = rng.uniform(two_n);
    sw.b = rng.uniform(two_n);

    int64_t phase = static_cast<int64_t>(sw.b);
    for (size_t i = 0; i < sw.a.size(); i++)
      if (k.lwe.bits[i]) phase -= static_cast<int64_t>(sw.a[i]);

    GlweCiphertext acc = ctx.blind_rotate(tv, sw, bsk);
    RingPolynomial expect = monomial_rotate(tv.body, -phase);
    CHECK(ctx.glwe_decrypt(acc, k.glwe).coeffs == expect.coeffs);
  }

  // an all-zero mask leaves only the body rotation, even under real noise
  std::vector<GgswCiphertext> noisy;
  for (size_t i = 0; i < ctx.params().n_lwe; i++)
    noisy.push_back(ctx.ggsw_encrypt(k.lwe.bits[i], k.glwe, rng));
  LweCiphertext plain;
  plain.mod = Modulus(two_n, 0, 0);
  plain.a.assign(ctx.params().n_lwe, 0);
  plain.b = 5;
  GlweCiphertext acc = ctx.blind_rotate(tv, plain, noisy);
  CHECK(acc.body.coeffs == monomial_rotate(tv.body, -5).coeffs);
  for (uint64_t v : acc.mask[0].coeffs) CHECK(v == 0);

  LweCiphertext oob = plain;
  oob.b = two_n;
  CHECK_THROWS_AS(static_cast<void>(ctx.blind_rotate(tv, oob, noisy)), Error);
  LweCiphertext short_mask = plain;
  short_mask.a.pop_back();
  CHECK_THROWS_AS(static_cast<void>(ctx.blind_rotate(tv, short_mask, noisy)), Error);
}

TEST_CASE("sample extraction exposes one coefficient as an lwe phase") {
  const TfheContext& ctx = toy_ctx();
  ToyKeys k = make_toy_keys(ctx, 95);
  Rng rng(96);
  size_t n = ctx.params().n_poly;

  // trivial input: zero mask, body is the plaintext
  GlweCiphertext trivial;
  trivial.mask.emplace_back(n, ctx.params().modulus, Rep::Coefficient);
  trivial.body = RingPolynomial(n, ctx.params().modulus, Rep::Coefficient);
  for (size_t i = 0; i < n; i++) trivial.body.coeffs[i] = i + 1;
  LweCiphertext ex = ctx.sample_extract(trivial, 7);
  CHECK(ex.b == 8);
  for (uint64_t v : ex.a) CHECK(v == 0);
  CHECK(ex.dim() == ctx.params().glwe_dim * n);

  // random input: the extracted phase equals the decrypted coefficient,
  // exactly, at every index
  RingPolynomial msg(n, ctx.params().modulus, Rep::Coefficient);
  for (auto& v : msg.coeffs) v = rng.uniform(ctx.params().modulus.value);
  GlweCiphertext g = ctx.glwe_encrypt(msg, k.glwe, rng);
  RingPolynomial dec = ctx.glwe_decrypt(g, k.glwe);
  for (size_t i = 0; i < n; i++) {
    LweCiphertext e = ctx.sample_extract(g, i);
    CHECK(ctx.lwe_phase(e, k.ext) == dec.coeffs[i]);
  }

  CHECK_THROWS_AS(static_cast<void>(ctx.sample_extract(g, n)), Error);
}

TEST_CASE("lwe keyswitch returns to the base key with the phase intact") {
  const TfheContext& ctx = toy_ctx();
  ToyKeys k = make_toy_keys(ctx, 97);
  Rng rng(98);
  size_t n = ctx.params().n_poly;

  BootstrapKeys exact = ctx.make_bootstrap_keys(k.lwe, k.glwe, rng, true);

  // zero-noise keys plus the exact toy gadget: the phase carries over
  // without any error at all
  RingPolynomial msg(n, ctx.params().modulus, Rep::Coefficient);
  for (auto& v : msg.coeffs) v = rng.uniform(ctx.params().modulus.value);
  GlweCiphertext g = ctx.glwe_encrypt(msg, k.glwe, rng);
  LweCiphertext wide = ctx.sample_extract(g, 3);
  LweCiphertext narrow = ctx.tfhe_keyswitch(wide, exact.ksk);
  CHECK(narrow.dim() == ctx.params().n_lwe);
  CHECK(ctx.lwe_phase(narrow, k.lwe) == ctx.lwe_phase(wide, k.ext));

  // a zero mask passes through untouched: every digit is zero
  LweCiphertext pass;
  pass.mod = ctx.params().modulus;
  pass.a.assign(ctx.params().glwe_dim * n, 0);
  pass.b = 424242;
  LweCiphertext through = ctx.tfhe_keyswitch(pass, exact.ksk);
  CHECK(through.b == 424242);
  for (uint64_t v : through.a) CHECK(v == 0);

  // noisy keys keep the phase within a small bound
  BootstrapKeys noisy = ctx.make_bootstrap_keys(k.lwe, k.glwe, rng);
  LweCiphertext narrow2 = ctx.tfhe_keyswitch(wide, noisy.ksk);
  int64_t gap = from_residue(
      mod_sub(ctx.lwe_phase(narrow2, k.lwe), ctx.lwe_phase(wide, k.ext), ctx.params().modulus),
      ctx.params().modulus);
  CHECK(std::abs(gap) < (int64_t{1} << 16));

  LweCiphertext bad = wide;
  bad.a.pop_back();
  CHECK_THROWS_AS(static_cast<void>(ctx.tfhe_keyswitch(bad, exact.ksk)), Error);
  auto short_ksk = exact.ksk;
  short_ksk.pop_back();
  CHECK_THROWS_AS(static_cast<void>(ctx.tfhe_keyswitch(wide, short_ksk)), Error);
}

TEST_CASE("test vectors tile the lut across aligned windows") {
  const TfheContext& ctx1 = toy1_ctx();  // 1-bit space, N = 64
  size_t n = ctx1.params().n_poly;
  uint64_t q = ctx1.params().modulus.value;

  // constant lut: every window holds the same encoding
  std::vector<uint64_t> const_lut = {1, 1};
  GlweCiphertext ctv = ctx1.build_test_vector(const_lut);
  uint64_t enc1 = ctx1.encode(1);
  for (size_t j = 0; j < n; j++) {
    uint64_t want = j < 3 * n / 4 ? enc1 : mod_neg(enc1, ctx1.params().modulus);
    CHECK(ctv.body.coeffs[j] == want);
  }

  // identity lut on the 1-bit space: zero on the first quarter, the
  // encoding of one across the middle half, zero again on the last quarter
  std::vector<uint64_t> id_lut = {0, 1};
  GlweCiphertext tv = ctx1.build_test_vector(id_lut);
  for (size_t j = 0; j < n; j++) {
    uint64_t want = (j >= n / 4 && j < 3 * n / 4) ? enc1 : 0;
    CHECK(tv.body.coeffs[j] == want);
  }
  for (uint64_t v : tv.mask[0].coeffs) CHECK(v == 0);

  // full-window sweep: for every possible rotation the leading coefficient
  // is the window's lut value, negacyclically continued on the upper half
  uint64_t t = ctx1.params().space();
  uint64_t w = n / (2 * t);
  for (uint64_t phase = 0; phase < 2 * n; phase++) {
    RingPolynomial rot = monomial_rotate(tv.body, -static_cast<int64_t>(phase));
    uint64_t u = (phase + w) % (2 * n);
    uint64_t want = u < n ? ctx1.encode(id_lut[u * t / n])
                          : mod_neg(ctx1.encode(id_lut[(u - n) * t / n]), ctx1.params().modulus);
    CHECK(rot.coeffs[0] == want);
  }

  // full-space luts must respect the negacyclic complement
  const TfheContext& ctx2 = toy_ctx();  // 2-bit space
  std::vector<uint64_t> good = {0, 1, 3, 2, 0, 7, 5, 6};
  GlweCiphertext full = ctx2.build_test_vector(good);
  std::vector<uint64_t> half(good.begin(), good.begin() + 4);
  CHECK(full.body.coeffs == ctx2.build_test_vector(half).body.coeffs);

  std::vector<uint64_t> broken = {0, 1, 3, 2, 0, 7, 5, 5};
  CHECK_THROWS_AS(static_cast<void>(ctx2.build_test_vector(broken)), Error);
  std::vector<uint64_t> odd_size = {0, 1, 2};
  CHECK_THROWS_AS(static_cast<void>(ctx2.build_test_vector(odd_size)), Error);
  std::vector<uint64_t> oversized = {0, 1, 2, 8};
  CHECK_THROWS_AS(static_cast<void>(ctx2.build_test_vector(oversized)), Error);
  (void)q;
}

TEST_CASE("programmable bootstrap evaluates luts exactly on the noiseless toy") {
  const TfheContext& ctx = toy_ctx();
  ToyKeys k = make_toy_keys(ctx, 99);
  Rng rng(100);
  BootstrapKeys keys = ctx.make_bootstrap_keys(k.lwe, k.glwe, rng, true);
  uint64_t t = ctx.params().space();

  std::vector<uint64_t> id_lut = {0, 1, 2, 3};
  std::vector<uint64_t> perm_lut = {3, 1, 0, 2};

  for (uint64_t m = 0; m < t; m++) {
    LweCiphertext c = ctx.lwe_encrypt(m, k.lwe, rng, true);
    LweCiphertext r1 = ctx.pbs(c, id_lut, keys);
    CHECK(ctx.lwe_phase(r1, k.lwe) == ctx.encode(id_lut[m]));
    CHECK(ctx.lwe_decrypt(r1, k.lwe) == id_lut[m]);
    LweCiphertext r2 = ctx.pbs(c, perm_lut, keys);
    CHECK(ctx.lwe_phase(r2, k.lwe) == ctx.encode(perm_lut[m]));
  }

  // inputs with the padding bit set land on the negated lut value
  for (uint64_t m = t; m < 2 * t; m++) {
    LweCiphertext c = ctx.lwe_encrypt(m, k.lwe, rng, true);
    LweCiphertext r = ctx.pbs(c, id_lut, keys);
    uint64_t want = mod_neg(ctx.encode(id_lut[m - t]), ctx.params().modulus);
    CHECK(ctx.lwe_phase(r, k.lwe) == want);
  }
}

TEST_CASE("programmable bootstrap survives real set-i noise") {
  const SetIFixture& f = set_i_fix();
  Rng rng(321);
  std::vector<uint64_t> id_lut = {0, 1};

  for (int trial = 0; trial < 16; trial++) {
    uint64_t m = trial & 1;
    LweCiphertext c = f.ctx.lwe_encrypt(m, f.lwe, rng);
    CHECK(f.ctx.lwe_decrypt(f.ctx.pbs(c, id_lut, f.keys), f.lwe) == m);
  }

  // constant lut: the output ignores the (valid) input message
  std::vector<uint64_t> const_lut = {1, 1};
  for (int trial = 0; trial < 4; trial++) {
    uint64_t m = trial & 1;
    LweCiphertext c = f.ctx.lwe_encrypt(m, f.lwe, rng);
    CHECK(f.ctx.lwe_decrypt(f.ctx.pbs(c, const_lut, f.keys), f.lwe) == 1);
  }
}

TEST_CASE("nand gate computes the full truth table") {
  // noiseless toy first: results are deterministic
  const TfheContext& ctx = toy1_ctx();
  ToyKeys k = make_toy_keys(ctx, 101);
  Rng rng(102);
  BootstrapKeys keys = ctx.make_bootstrap_keys(k.lwe, k.glwe, rng, true);
  for (int x = 0; x <= 1; x++) {
    for (int y = 0; y <= 1; y++) {
      LweCiphertext cx = ctx.lwe_encrypt(x, k.lwe, rng, true);
      LweCiphertext cy = ctx.lwe_encrypt(y, k.lwe, rng, true);
      CHECK(ctx.lwe_decrypt(ctx.nand_gate(cx, cy, keys), k.lwe) == uint64_t(!(x && y)));
    }
  }

  // then with genuine set-i noise
  const SetIFixture& f = set_i_fix();
  Rng rng2(103);
  for (int rep = 0; rep < 2; rep++) {
    for (int x = 0; x <= 1; x++) {
      for (int y = 0; y <= 1; y++) {
        LweCiphertext cx = f.ctx.lwe_encrypt(x, f.lwe, rng2);
        LweCiphertext cy = f.ctx.lwe_encrypt(y, f.lwe, rng2);
        CHECK(f.ctx.lwe_decrypt(f.ctx.nand_gate(cx, cy, f.keys), f.lwe) == uint64_t(!(x && y)));
      }
    }
  }
}

TEST_CASE("keygen and encryption are reproducible from the seed") {
  TfheContext ctx(TfheParams::set_i());
  Rng r1(7), r2(7), r3(8);
  LweSecretKey a = ctx.lwe_keygen(r1), b = ctx.lwe_keygen(r2), c = ctx.lwe_keygen(r3);
  CHECK(a.bits == b.bits);
  CHECK(a.bits != c.bits);

  GlweSecretKey ga = ctx.glwe_keygen(r1), gb = ctx.glwe_keygen(r2);
  CHECK(ga.s[0].coeffs == gb.s[0].coeffs);

  LweCiphertext e1 = ctx.lwe_encrypt(1, a, r1);
  LweCiphertext e2 = ctx.lwe_encrypt(1, b, r2);
  CHECK(e1.a == e2.a);
  CHECK(e1.b == e2.b);
  LweCiphertext e3 = ctx.lwe_encrypt(1, a, r3);
  CHECK(e1.a != e3.a);
}

TEST_CASE("kernel recorder tallies the bootstrap pipeline") {
  const TfheContext& ctx = toy_ctx();
  ToyKeys k = make_toy_keys(ctx, 104);
  Rng rng(105);

  // one external product: (k+1)*l_b forward transforms, k+1 inverse
  // transforms, (k+1)^2*l_b pointwise accumulations
  RingPolynomial msg(ctx.params().n_poly, ctx.params().modulus, Rep::Coefficient);
  GlweCiphertext g = ctx.glwe_encrypt(msg, k.glwe, rng, true);
  GgswCiphertext one = ctx.ggsw_encrypt(1, k.glwe, rng, true);
  ctx.recorder_reset();
  static_cast<void>(ctx.external_product(g, one));
  CHECK(ctx.recorder().ntt == 4);
  CHECK(ctx.recorder().intt == 2);
  CHECK(ctx.recorder().ip == 8);
  CHECK(ctx.recorder().auto_perm == 0);
  CHECK(ctx.recorder().modadd == 0);

  // one full set-i bootstrap at the frozen granularity
  const SetIFixture& f = set_i_fix();
  Rng rng2(106);
  LweCiphertext c = f.ctx.lwe_encrypt(1, f.lwe, rng2);
  std::vector<uint64_t> lut = {0, 1};
  f.ctx.recorder_reset();
  static_cast<void>(f.ctx.pbs(c, lut, f.keys));
  KernelCounts got = f.ctx.recorder();
  CHECK(got.ntt == 2000);
  CHECK(got.intt == 1000);
  CHECK(got.ip == 6048);
  CHECK(got.auto_perm == 1002);
  CHECK(got.modadd == 2000);
  CHECK(got.modmul == 0);
  CHECK(got.bconv == 0);
}
