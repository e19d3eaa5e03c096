#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include <gmpxx.h>

#include "trinity/ckks.hpp"
#include "trinity/oracle.hpp"

using namespace trinity;
using namespace trinity::ckks;
using cplx = std::complex<double>;

namespace {

const CkksContext& desk_ctx() {
  static CkksContext ctx(CkksParams::desk());
  return ctx;
}

const CkksKeys& desk_keys() {
  static CkksKeys keys = desk_ctx().keygen(42, std::vector<int64_t>{1, 3, 8, -1});
  return keys;
}

std::vector<cplx> random_slots(Rng& rng, size_t count, double lo = 0.5, double hi = 1.0) {
  std::vector<cplx> v(count);
  for (auto& x : v) {
    double mag = lo + (hi - lo) * rng.uniform_real();
    double arg = 2.0 * 3.14159265358979 * rng.uniform_real();
    x = std::polar(mag, arg);
  }
  return v;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double worst = 0;
  for (size_t i = 0; i < a.size(); i++) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double max_abs(const std::vector<cplx>& a) {
  double worst = 0;
  for (const auto& x : a) worst = std::max(worst, std::abs(x));
  return worst;
}

// round-to-nearest integer division, exact via bigints (odd divisor: no ties)
mpz_class round_div(const mpz_class& x, const mpz_class& q) {
  mpz_class quot, rem;
  mpz_fdiv_qr(quot.get_mpz_t(), rem.get_mpz_t(), x.get_mpz_t(), q.get_mpz_t());
  if (2 * rem > q) quot += 1;
  return quot;
}

mpz_class centered_at(const RnsPolynomial& poly, size_t idx) {
  RnsBasis basis;
  std::vector<uint64_t> residues;
  for (const auto& limb : poly) {
    basis.moduli.push_back(limb.mod);
    basis.roles.push_back(LimbRole::Ciphertext);
    residues.push_back(limb.coeffs[idx]);
  }
  return crt_reconstruct_centered(residues, basis);
}

}  // namespace

TEST_CASE("desk parameter set: chain structure") {
  auto p = CkksParams::desk();
  CHECK(p.n_poly == 8192);
  CHECK(p.levels == 5);
  CHECK(p.alpha == 3);
  CHECK(p.ciphertext_basis.moduli.size() == 6);
  CHECK(p.special_basis.moduli.size() == 3);
  // all distinct, NTT friendly for the ring, and correctly sized
  std::vector<uint64_t> all;
  for (const auto& m : p.ciphertext_basis.moduli) all.push_back(m.value);
  for (const auto& m : p.special_basis.moduli) all.push_back(m.value);
  std::sort(all.begin(), all.end());
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
  for (uint64_t q : all) {
    CHECK(is_prime_u64(q));
    CHECK((q - 1) % (2 * p.n_poly) == 0);
  }
  // q_0 and specials carry 36 bits; working primes hug the scale
  CHECK(p.ciphertext_basis.moduli[0].value > (1ULL << 35));
  for (const auto& m : p.special_basis.moduli) CHECK(m.value > (1ULL << 35));
  for (int k = 1; k <= 5; k++) {
    double q = static_cast<double>(p.ciphertext_basis.moduli[k].value);
    CHECK(std::abs(q / p.scale - 1.0) < 0.05);
  }
  CHECK(p.params_hash() != CkksParams::bench_default().params_hash());
}

TEST_CASE("encoder: roundtrip and slot evaluation oracle") {
  const auto& ctx = desk_ctx();
  size_t slots = ctx.params().slot_count();
  Rng rng(7001);
  auto v = random_slots(rng, slots);
  auto pt = ctx.encode(v, ctx.params().scale, 5);
  REQUIRE(pt.poly.size() == 6);

  auto back = ctx.decode(pt.poly, pt.scale);
  CHECK(max_abs_diff(back, v) < 1e-6);

  // decode must agree with directly evaluating the integer polynomial at the
  // slot's primitive root power: slot j at zeta^(5^j mod 2n)
  size_t n = ctx.params().n_poly;
  std::vector<double> coeffs(n);
  for (size_t i = 0; i < n; i++) {
    double c = static_cast<double>(from_residue(pt.poly[0].coeffs[i], pt.poly[0].mod));
    coeffs[i] = c / pt.scale;
  }
  uint64_t two_n = 2 * n;
  for (size_t j : {size_t{0}, size_t{1}, size_t{17}, size_t{1000}}) {
    uint64_t e = 1;
    for (size_t t = 0; t < j; t++) e = (e * 5) % two_n;
    cplx zeta_e = std::polar(1.0, 3.141592653589793 * static_cast<double>(e) /
                                      static_cast<double>(n));
    cplx acc = 0;
    for (size_t i = n; i-- > 0;) acc = acc * zeta_e + coeffs[i];
    CHECK(std::abs(acc - back[j]) < 1e-6);
  }
}

TEST_CASE("encoder: slotwise ring homomorphism") {
  const auto& ctx = desk_ctx();
  size_t slots = ctx.params().slot_count();
  Rng rng(7002);
  auto v1 = random_slots(rng, slots);
  auto v2 = random_slots(rng, slots);
  double scale = ctx.params().scale;
  auto p1 = ctx.encode(v1, scale, 2);
  auto p2 = ctx.encode(v2, scale, 2);

  // addition: coefficientwise limb addition adds slots
  RnsPolynomial sum;
  for (size_t k = 0; k < p1.poly.size(); k++) sum.push_back(poly_add(p1.poly[k], p2.poly[k]));
  auto dec_sum = ctx.decode(sum, scale);
  std::vector<cplx> want(slots);
  for (size_t j = 0; j < slots; j++) want[j] = v1[j] + v2[j];
  CHECK(max_abs_diff(dec_sum, want) < 1e-5);

  // multiplication: negacyclic product multiplies slots (scale becomes
  // scale^2, needs the 3-limb level-2 basis to hold the product coefficients)
  RnsPolynomial prod;
  for (size_t k = 0; k < p1.poly.size(); k++) {
    auto tabs = NttTables::negacyclic_tables(p1.poly[k].mod, ctx.params().n_poly);
    auto a = ntt_forward(p1.poly[k], tabs);
    auto b = ntt_forward(p2.poly[k], tabs);
    prod.push_back(ntt_inverse(poly_mul_pointwise(a, b), tabs));
  }
  auto dec_prod = ctx.decode(prod, scale * scale);
  for (size_t j = 0; j < slots; j++) want[j] = v1[j] * v2[j];
  CHECK(max_abs_diff(dec_prod, want) < 1e-4);
}

TEST_CASE("encoder: rejects overflow and bad level") {
  const auto& ctx = desk_ctx();
  std::vector<cplx> too_many(ctx.params().slot_count() + 1, 0.0);
  CHECK_THROWS_WITH_AS(static_cast<void>(ctx.encode(too_many, 1.0, 5)),
                       doctest::Contains("slot"), Error);
  std::vector<cplx> one(1, 0.0);
  CHECK_THROWS_AS(static_cast<void>(ctx.encode(one, 1.0, 9)), Error);
}

TEST_CASE("encrypt/decrypt: noiseless hooks give exact limbs") {
  const auto& ctx = desk_ctx();
  const auto& keys = desk_keys();
  Rng rng(7003);
  auto v = random_slots(rng, ctx.params().slot_count());
  auto pt = ctx.encode(v, ctx.params().scale, 5);
  Rng enc = rng.fork(1);
  auto ct = ctx.encrypt(pt, keys.sk, enc, /*zero_noise=*/true, /*zero_mask=*/true);
  auto dec = ctx.decrypt(ct, keys.sk);
  REQUIRE(dec.size() == pt.poly.size());
  for (size_t k = 0; k < dec.size(); k++)
    CHECK(dec[k].coeffs == pt.poly[k].coeffs);
}

TEST_CASE("encrypt/decrypt: secret-key noise stays gaussian-small") {
  const auto& ctx = desk_ctx();
  const auto& keys = desk_keys();
  Rng rng(7004);
  auto v = random_slots(rng, ctx.params().slot_count());
  auto pt = ctx.encode(v, ctx.params().scale, 5);
  Rng enc = rng.fork(1);
  auto ct = ctx.encrypt(pt, keys.sk, enc);
  auto dec = ctx.decrypt(ct, keys.sk);
  int64_t worst = 0;
  for (size_t k = 0; k < dec.size(); k++) {
    const Modulus& q = dec[k].mod;
    for (size_t i = 0; i < dec[k].coeffs.size(); i++) {
      int64_t diff = from_residue(mod_sub(dec[k].coeffs[i], pt.poly[k].coeffs[i], q), q);
      worst = std::max(worst, std::abs(diff));
    }
  }
  CHECK(worst > 0);           // noise actually present
  CHECK(worst < 8 * 3.2 + 1); // and within a fat gaussian tail bound
}

TEST_CASE("encrypt_pk: decrypts within small slot error") {
  const auto& ctx = desk_ctx();
  const auto& keys = desk_keys();
  Rng rng(7005);
  auto v = random_slots(rng, ctx.params().slot_count());
  auto pt = ctx.encode(v, ctx.params().scale, 5);
  Rng enc = rng.fork(1);
  auto ct = ctx.encrypt_pk(pt, keys.pk, enc);
  auto back = ctx.decrypt_decode(ct, keys.sk);
  CHECK(max_abs_diff(back, v) < 5e-4);
}

TEST_CASE("bconv: matches the centered CRT oracle") {
  const auto& ctx = desk_ctx();
  size_t n = 64;  // narrow polynomials keep the oracle cheap
  std::vector<Modulus> src_mods{ctx.ext_mod(0), ctx.ext_mod(1), ctx.ext_mod(2)};
  std::vector<Modulus> targets{ctx.ext_mod(3), ctx.ext_mod(6)};
  RnsBasis src_basis;
  for (const auto& m : src_mods) {
    src_basis.moduli.push_back(m);
    src_basis.roles.push_back(LimbRole::Ciphertext);
  }

  Rng rng(7006);
  std::vector<RingPolynomial> src;
  for (const auto& m : src_mods) {
    RingPolynomial limb(n, m, Rep::Coefficient);
    for (auto& c : limb.coeffs) c = rng.uniform(m.value);
    src.push_back(std::move(limb));
  }
  // pin a few adversarial values: 0, 1, -5, +-C/4-ish
  mpz_class C = src_basis.product();
  std::vector<mpz_class> pinned{0, 1, C - 5, C / 4, C - C / 4};
  for (size_t i = 0; i < pinned.size(); i++)
    for (size_t k = 0; k < src.size(); k++)
      src[k].coeffs[i] = mpz_class(pinned[i] % src_mods[k].value).get_ui();

  auto out = ctx.bconv(src, targets);
  REQUIRE(out.size() == targets.size());
  for (size_t idx = 0; idx < n; idx++) {
    std::vector<uint64_t> residues;
    for (const auto& limb : src) residues.push_back(limb.coeffs[idx]);
    mpz_class centered = crt_reconstruct_centered(residues, src_basis);
    for (size_t j = 0; j < targets.size(); j++) {
      mpz_class want = centered % mpz_class(targets[j].value);
      if (want < 0) want += targets[j].value;
      CHECK(out[j].coeffs[idx] == want.get_ui());
    }
  }
}

TEST_CASE("bconv: rejects evaluation-rep input") {
  const auto& ctx = desk_ctx();
  RingPolynomial limb(8, ctx.ext_mod(0), Rep::Evaluation);
  std::vector<Modulus> targets{ctx.ext_mod(1)};
  CHECK_THROWS_AS(static_cast<void>(ctx.bconv({limb}, targets)), Error);
}

TEST_CASE("hybrid keyswitch: switches to d * s_src within tight noise") {
  const auto& ctx = desk_ctx();
  const auto& keys = desk_keys();
  size_t n = ctx.params().n_poly;
  int l = 5;

  // source secret = s^2, matching the relinearization key
  RnsPolynomial s_sq;
  for (size_t k = 0; k < ctx.ext_size(); k++)
    s_sq.push_back(poly_mul_pointwise(keys.sk.s[k], keys.sk.s[k]));

  Rng rng(7007);
  RnsPolynomial d;
  for (int k = 0; k <= l; k++) {
    RingPolynomial limb(n, ctx.ext_mod(k), Rep::Coefficient);
    for (auto& c : limb.coeffs) c = rng.uniform(ctx.ext_mod(k).value);
    d.push_back(std::move(limb));
  }
  auto [ks_b, ks_a] = ctx.hybrid_keyswitch(d, keys.relin);
  REQUIRE(ks_b.size() == static_cast<size_t>(l + 1));

  RnsPolynomial lhs, rhs;
  for (int k = 0; k <= l; k++) {
    auto got = poly_add(ks_b[k], poly_mul_pointwise(ks_a[k], keys.sk.s[k]));
    lhs.push_back(ntt_inverse(got, ctx.ext_tables(k)));
    auto want = poly_mul_pointwise(ntt_forward(d[k], ctx.ext_tables(k)), s_sq[k]);
    rhs.push_back(ntt_inverse(want, ctx.ext_tables(k)));
  }
  mpz_class worst = 0;
  for (size_t i = 0; i < n; i++) {
    mpz_class diff = centered_at(lhs, i) - centered_at(rhs, i);
    mpz_class Q = 1;
    for (int k = 0; k <= l; k++) Q *= ctx.ext_mod(k).value;
    diff %= Q;
    if (diff > Q / 2) diff -= Q;
    if (diff < -Q / 2) diff += Q;
    mpz_class mag = abs(diff);
    if (mag > worst) worst = mag;
  }
  CHECK(worst < mpz_class(1) << 20);
}

TEST_CASE("hybrid keyswitch: zero input gives exact zero") {
  const auto& ctx = desk_ctx();
  const auto& keys = desk_keys();
  size_t n = ctx.params().n_poly;
  RnsPolynomial d;
  for (int k = 0; k <= 5; k++) d.emplace_back(n, ctx.ext_mod(k), Rep::Coefficient);
  auto [ks_b, ks_a] = ctx.hybrid_keyswitch(d, keys.relin);
  for (int k = 0; k <= 5; k++) {
    for (uint64_t c : ks_b[k].coeffs) CHECK(c == 0);
    for (uint64_t c : ks_a[k].coeffs) CHECK(c == 0);
  }
}

TEST_CASE("hybrid keyswitch: kernel census at the top level") {
  const auto& ctx = desk_ctx();
  const auto& keys = desk_keys();
  size_t n = ctx.params().n_poly;
  Rng rng(7008);
  RnsPolynomial d;
  for (int k = 0; k <= 5; k++) {
    RingPolynomial limb(n, ctx.ext_mod(k), Rep::Coefficient);
    for (auto& c : limb.coeffs) c = rng.uniform(ctx.ext_mod(k).value);
    d.push_back(std::move(limb));
  }
  ctx.recorder_reset();
  auto res = ctx.hybrid_keyswitch(d, keys.relin);
  static_cast<void>(res);
  const auto& c = ctx.recorder();
  // beta=2 digits over E=9 extended limbs, then ModDown on two components:
  // ntt = 2*9 + 2*6, intt = 2*9, bconv = 2 digits + 2 ModDown, ip = 2*2
  CHECK(c.ntt == 30);
  CHECK(c.intt == 18);
  CHECK(c.bconv == 4);
  CHECK(c.ip == 4);
  CHECK(c.modmul == 12);
  CHECK(c.modadd == 12);
  CHECK(c.auto_perm == 0);
}

TEST_CASE("rescale: matches bigint round-division per coefficient") {
  const auto& ctx = desk_ctx();
  const auto& keys = desk_keys();
  Rng rng(7009);
  auto v = random_slots(rng, ctx.params().slot_count());
  auto pt = ctx.encode(v, ctx.params().scale * ctx.params().scale, 5);
  Rng enc = rng.fork(1);
  auto ct = ctx.encrypt(pt, keys.sk, enc, /*zero_noise=*/true, /*zero_mask=*/true);
  auto dropped = ctx.rescale(ct);
  CHECK(dropped.level == 4);
  CHECK(dropped.scale == doctest::Approx(ct.scale / static_cast<double>(ctx.ext_mod(5).value)));

  auto before = ctx.decrypt(ct, keys.sk);
  auto after = ctx.decrypt(dropped, keys.sk);
  mpz_class ql(static_cast<unsigned long>(ctx.ext_mod(5).value));
  for (size_t i = 0; i < 256; i++) {
    mpz_class want = round_div(centered_at(before, i), ql);
    CHECK(centered_at(after, i) == want);
  }
}

TEST_CASE("rescale: refuses at the last level") {
  const auto& ctx = desk_ctx();
  RlweCiphertext ct;
  ct.level = 0;
  CHECK_THROWS_AS(static_cast<void>(ctx.rescale(ct)), Error);
}

TEST_CASE("homomorphic add/sub/plain ops track slots") {
  const auto& ctx = desk_ctx();
  const auto& keys = desk_keys();
  size_t slots = ctx.params().slot_count();
  Rng rng(7010);
  auto v1 = random_slots(rng, slots);
  auto v2 = random_slots(rng, slots);
  double scale = ctx.params().scale;
  Rng enc = rng.fork(1);
  auto c1 = ctx.encrypt(ctx.encode(v1, scale, 5), keys.sk, enc);
  auto c2 = ctx.encrypt(ctx.encode(v2, scale, 5), keys.sk, enc);

  std::vector<cplx> want(slots);
  auto sum = ctx.decrypt_decode(ctx.hadd(c1, c2), keys.sk);
  for (size_t j = 0; j < slots; j++) want[j] = v1[j] + v2[j];
  CHECK(max_abs_diff(sum, want) < 1e-4);

  auto diff = ctx.decrypt_decode(ctx.hsub(c1, c2), keys.sk);
  for (size_t j = 0; j < slots; j++) want[j] = v1[j] - v2[j];
  CHECK(max_abs_diff(diff, want) < 1e-4);

  auto pt2 = ctx.encode(v2, scale, 5);
  auto psum = ctx.decrypt_decode(ctx.padd(c1, pt2), keys.sk);
  for (size_t j = 0; j < slots; j++) want[j] = v1[j] + v2[j];
  CHECK(max_abs_diff(psum, want) < 1e-4);

  auto pprod = ctx.rescale(ctx.pmult(c1, pt2));
  auto dec = ctx.decrypt_decode(pprod, keys.sk);
  for (size_t j = 0; j < slots; j++) want[j] = v1[j] * v2[j];
  CHECK(max_abs_diff(dec, want) < 1e-4);
}

TEST_CASE("hmult: slotwise product at depth 1 and 2") {
  const auto& ctx = desk_ctx();
  const auto& keys = desk_keys();
  size_t slots = ctx.params().slot_count();
  Rng rng(7011);
  double scale = ctx.params().scale;
  std::vector<std::vector<cplx>> v;
  std::vector<RlweCiphertext> c;
  Rng enc = rng.fork(1);
  for (int i = 0; i < 4; i++) {
    v.push_back(random_slots(rng, slots));
    c.push_back(ctx.encrypt(ctx.encode(v.back(), scale, 5), keys.sk, enc));
  }

  auto m12 = ctx.rescale(ctx.hmult(c[0], c[1], keys.relin));
  auto dec1 = ctx.decrypt_decode(m12, keys.sk);
  std::vector<cplx> want(slots);
  for (size_t j = 0; j < slots; j++) want[j] = v[0][j] * v[1][j];
  CHECK(max_abs_diff(dec1, want) / max_abs(want) < std::ldexp(1.0, -13));

  auto m34 = ctx.rescale(ctx.hmult(c[2], c[3], keys.relin));
  auto m = ctx.rescale(ctx.hmult(m12, m34, keys.relin));
  CHECK(m.level == 3);
  auto dec2 = ctx.decrypt_decode(m, keys.sk);
  for (size_t j = 0; j < slots; j++) want[j] = v[0][j] * v[1][j] * v[2][j] * v[3][j];
  CHECK(max_abs_diff(dec2, want) / max_abs(want) < std::ldexp(1.0, -11));
}

TEST_CASE("hmult: rejects mismatched operands") {
  const auto& ctx = desk_ctx();
  const auto& keys = desk_keys();
  Rng rng(7012);
  auto v = random_slots(rng, ctx.params().slot_count());
  double scale = ctx.params().scale;
  Rng enc = rng.fork(1);
  auto c1 = ctx.encrypt(ctx.encode(v, scale, 5), keys.sk, enc);
  auto c2 = ctx.encrypt(ctx.encode(v, scale, 5), keys.sk, enc);
  auto low = ctx.rescale(ctx.hmult(c1, c2, keys.relin));
  CHECK_THROWS_AS(static_cast<void>(ctx.hmult(c1, low, keys.relin)), Error);
  auto scaled = c2;
  scaled.scale *= 2;
  bool caught = false;
  try {
    static_cast<void>(ctx.hmult(c1, scaled, keys.relin));
  } catch (const Error& e) {
    caught = e.code() == Errc::ScaleMismatch;
  }
  CHECK(caught);
}

TEST_CASE("hrotate: slots rotate left and compose") {
  const auto& ctx = desk_ctx();
  const auto& keys = desk_keys();
  size_t slots = ctx.params().slot_count();
  Rng rng(7013);
  auto v = random_slots(rng, slots);
  double scale = ctx.params().scale;
  Rng enc = rng.fork(1);
  auto ct = ctx.encrypt(ctx.encode(v, scale, 5), keys.sk, enc);

  for (int64_t r : {int64_t{1}, int64_t{3}, int64_t{8}, int64_t{-1}}) {
    auto rot = ctx.hrotate(ct, r, keys);
    auto dec = ctx.decrypt_decode(rot, keys.sk);
    std::vector<cplx> want(slots);
    size_t shift = static_cast<size_t>(((r % static_cast<int64_t>(slots)) +
                                        static_cast<int64_t>(slots)) %
                                       static_cast<int64_t>(slots));
    for (size_t j = 0; j < slots; j++) want[j] = v[(j + shift) % slots];
    CHECK(max_abs_diff(dec, want) < 1e-4);
  }

  // r = 0 is the identity without touching a key
  auto same = ctx.hrotate(ct, 0, keys);
  CHECK(same.a[0].coeffs == ct.a[0].coeffs);

  // composition: rot(1) then rot(3) equals rot(4) in slot space
  auto r13 = ctx.hrotate(ctx.hrotate(ct, 1, keys), 3, keys);
  auto dec13 = ctx.decrypt_decode(r13, keys.sk);
  std::vector<cplx> want(slots);
  for (size_t j = 0; j < slots; j++) want[j] = v[(j + 4) % slots];
  CHECK(max_abs_diff(dec13, want) < 1e-4);

  CHECK_THROWS_AS(static_cast<void>(ctx.hrotate(ct, 5, keys)), Error);
}

TEST_CASE("kernel recorder: per-op counts at fixed granularity") {
  const auto& ctx = desk_ctx();
  const auto& keys = desk_keys();
  Rng rng(7014);
  auto v = random_slots(rng, ctx.params().slot_count());
  double scale = ctx.params().scale;
  Rng enc = rng.fork(1);
  auto c1 = ctx.encrypt(ctx.encode(v, scale, 5), keys.sk, enc);
  auto c2 = ctx.encrypt(ctx.encode(v, scale, 5), keys.sk, enc);
  auto pt = ctx.encode(v, scale, 5);

  ctx.recorder_reset();
  static_cast<void>(ctx.hadd(c1, c2));
  auto c = ctx.recorder();
  CHECK(c.modadd == 12);
  CHECK(c.total() == 12);

  ctx.recorder_reset();
  static_cast<void>(ctx.pmult(c1, pt));
  c = ctx.recorder();
  CHECK(c.ntt == 6);
  CHECK(c.modmul == 12);
  CHECK(c.total() == 18);

  ctx.recorder_reset();
  static_cast<void>(ctx.padd(c1, pt));
  c = ctx.recorder();
  CHECK(c.ntt == 6);
  CHECK(c.modadd == 6);

  ctx.recorder_reset();
  static_cast<void>(ctx.hmult(c1, c2, keys.relin));
  c = ctx.recorder();
  CHECK(c.ntt == 30);
  CHECK(c.intt == 24);
  CHECK(c.bconv == 4);
  CHECK(c.ip == 4);
  CHECK(c.modmul == 36);
  CHECK(c.modadd == 30);

  ctx.recorder_reset();
  static_cast<void>(ctx.hrotate(c1, 1, keys));
  c = ctx.recorder();
  CHECK(c.auto_perm == 12);
  CHECK(c.ntt == 30);
  CHECK(c.intt == 24);
  CHECK(c.bconv == 4);
  CHECK(c.ip == 4);

  ctx.recorder_reset();
  static_cast<void>(ctx.rescale(c1));
  c = ctx.recorder();
  CHECK(c.intt == 2);
  CHECK(c.ntt == 10);
  CHECK(c.modadd == 10);
  CHECK(c.modmul == 10);
}

TEST_CASE("keygen: deterministic in the seed") {
  const auto& ctx = desk_ctx();
  auto k1 = ctx.keygen(99, std::vector<int64_t>{2});
  auto k2 = ctx.keygen(99, std::vector<int64_t>{2});
  CHECK(k1.sk.s[0].coeffs == k2.sk.s[0].coeffs);
  CHECK(k1.pk.a[3].coeffs == k2.pk.a[3].coeffs);
  CHECK(k1.relin.rows[1][0][2].coeffs == k2.relin.rows[1][0][2].coeffs);
  CHECK(k1.rotation.at(2).rows[0][1][7].coeffs == k2.rotation.at(2).rows[0][1][7].coeffs);
  auto k3 = ctx.keygen(100, std::vector<int64_t>{2});
  CHECK(k1.sk.s[0].coeffs != k3.sk.s[0].coeffs);
}
