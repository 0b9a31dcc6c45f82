#include <gtest/gtest.h>

#include <random>

#include "rankin/ingest.hpp"
#include "rankin/report.hpp"

using namespace rankin;

static const std::string kFix = std::string(RANKIN_SOURCE_DIR) + "/fixtures/";

namespace {
struct Forms {
  NewformData h26, hp, hpp;
  Forms() : h26(delta_family_qexp(26, 6000)), hp(load_newform(kFix + "3.13.b.a.json")), hpp(load_newform(kFix + "3.13.b.b.json")) {}
};
const Forms& forms() {
  static Forms f;
  return f;
}
PrimeIdeal ell() { return factor_rational_prime(13, QuadField(-26))[0]; }
RatioVerdict exact(const AlgNum& x) {
  RatioVerdict v;
  v.ratio_exact = x;
  return v;
}
}  // namespace

TEST(Reconstruct, Basics) {
  PrecisionScope ps(60);
  auto r = reconstruct_algebraic(Cx(Real(1) / 3), QuadField::rational(), Int(1000), 50);
  EXPECT_EQ(r.value, AlgNum(Rat(1, 3)));
  QuadField F(-26);
  AlgNum x = (AlgNum(F, 2, 1)) / AlgNum(5);
  auto q = reconstruct_algebraic(x.embed(), F, Int(1000), 50);
  EXPECT_EQ(q.value, x);
  EXPECT_LT(q.residual, pow10(-45));
  EXPECT_THROW(reconstruct_algebraic(Cx(real_pi()), F, Int(1000000), 50), ReconstructionFailed);
  EXPECT_THROW(reconstruct_algebraic(Cx(real_pi()), QuadField::rational(), Int(1000000), 50), ReconstructionFailed);
}

TEST(Reconstruct, RandomRoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> coef(-1000000000000L, 1000000000000L);
  const Int cap = ipow(Int(10), 13);
  for (long d0 : {-26L, -3L, 5L}) {
    QuadField F(d0);
    for (int i = 0; i < 160; ++i) {
      long den = 0;
      while (den == 0) den = std::abs(coef(rng));
      AlgNum x(F, make_rat(Int(std::to_string(coef(rng))), Int(std::to_string(den))), make_rat(Int(std::to_string(coef(rng))), Int(std::to_string(den))));
      PrecisionScope ps(100);
      auto r = reconstruct_algebraic(x.embed(), F, cap, 80);
      ASSERT_EQ(r.value, x) << x;
      EXPECT_LE(r.height_bits, height_bits(x));
    }
  }
}

TEST(Reconstruct, HeightBits) {
  EXPECT_EQ(height_bits(AlgNum(Rat(410993, 3001544))), 22);  // 3001544 < 2^22
  EXPECT_EQ(height_bits(AlgNum(0)), 1);
}

TEST(Compare, Semantics) {
  QuadField F(-26);
  auto P = ell();
  AlgNum s(F, 0, 1);  // sqrt(-26) generates l^... with v = 1
  ASSERT_EQ(valuation(s, P), 1);
  auto c = compare_ratios(exact(AlgNum(F, 3, 0)), exact(AlgNum(F, 3, 0) + s), P);
  EXPECT_EQ(c.verdict, Verdict::Congruent);
  EXPECT_EQ(*c.v_diff, 1);
  EXPECT_TRUE(c.integral);
  c = compare_ratios(exact(AlgNum(F, 3, 0)), exact(AlgNum(F, 4, 0)), P);
  EXPECT_EQ(c.verdict, Verdict::NotCongruent);
  EXPECT_EQ(*c.v_diff, 0);
  // identical ratios, even non-integral ones, are congruent
  AlgNum nonint = AlgNum(1) / AlgNum(13);
  c = compare_ratios(exact(nonint), exact(nonint), P);
  EXPECT_EQ(c.verdict, Verdict::Congruent);
  EXPECT_EQ(*c.v_diff, valuation_infinity);
  EXPECT_FALSE(c.integral);
  RatioVerdict bad;
  bad.indeterminate = true;
  bad.note = "L(19) vanishes";
  c = compare_ratios(bad, exact(AlgNum(1)), P);
  EXPECT_EQ(c.verdict, Verdict::Indeterminate);
  EXPECT_NE(c.note.find("vanishes"), std::string::npos);
}

TEST(Compare, CongruenceIsTransitive) {
  QuadField F(-26);
  auto P = ell();
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> d(-40, 40);
  auto rnd = [&] { return AlgNum(F, Rat(d(rng), 1 + std::abs(d(rng)) % 7), Rat(d(rng), 1 + std::abs(d(rng)) % 5)); };
  for (int i = 0; i < 500; ++i) {
    AlgNum x = rnd(), y = rnd(), z = rnd();
    auto xy = compare_ratios(exact(x), exact(y), P);
    auto yz = compare_ratios(exact(y), exact(z), P);
    auto xz = compare_ratios(exact(x), exact(z), P);
    // ultrametric inequality on the differences
    EXPECT_GE(*xz.v_diff, std::min(*xy.v_diff, *yz.v_diff));
    if (xy.verdict == Verdict::Congruent && yz.verdict == Verdict::Congruent) EXPECT_EQ(xz.verdict, Verdict::Congruent);
    EXPECT_EQ(compare_ratios(exact(y), exact(x), P).verdict, xy.verdict);
  }
}

TEST(Ratio, AgreesWithDirectSum) {
  auto rs = rs_coefficients(forms().h26, forms().hpp, 6000);
  auto v = ratio_at(rs, 24, 50, nullptr);
  ASSERT_TRUE(v.ratio_exact);
  // independent: finite parts from the Dirichlet series, gamma factors in closed form
  auto a = direct_L(rs, 24, 10), b = direct_L(rs, 25, 10);
  PrecisionScope ps(40);
  Cx fin = a.value / b.value;
  EXPECT_LT(abs(fin - v.finite_ratio) / abs(fin), pow10(-8));
  Real g = real_from(gamma_ratio(24, 13)) * 4 * real_pi() * real_pi();
  EXPECT_LT(abs(fin * g - v.ratio_numeric) / abs(v.ratio_numeric), pow10(-8));
  EXPECT_THROW(ratio_at(rs, 25, 30), PreconditionError);
}

TEST(Ratio, FixtureRegression) {
  auto P = ell();
  auto rs = rs_coefficients(forms().h26, forms().hp, 6000);
  auto v = ratio_at(rs, 24, 50, &P);
  ASSERT_TRUE(v.ratio_exact);
  EXPECT_EQ(*v.ratio_exact, AlgNum(Rat(410993, 3001544)));
  EXPECT_EQ(*v.v_l, -2);
  auto z = ratio_at(rs, 19, 50, &P);
  EXPECT_TRUE(z.ratio_exact && z.ratio_exact->is_zero());
  auto w = ratio_at(rs, 18, 50, &P);
  EXPECT_TRUE(w.indeterminate);
}

TEST(Report, IdenticalFormsAreCongruent) {
  const auto& f = forms();
  ReportOptions opt;
  opt.m_list = {20, 22, 24};
  auto R = full_report(f.h26, f.hpp, f.hpp, 13, 50, opt);
  ASSERT_EQ(R.pairs.size(), 3u);
  for (const auto& p : R.pairs) {
    EXPECT_EQ(p.cmp.verdict, Verdict::Congruent) << p.m;
    EXPECT_EQ(*p.cmp.v_diff, valuation_infinity);
  }
  EXPECT_EQ(R.exit_code, 0);
  EXPECT_EQ(R.doc["schema_version"], "1");
  EXPECT_EQ(R.doc["pairs"].size(), 3u);
  EXPECT_NE(R.text.find("(24,25)"), std::string::npos);
}

TEST(Report, Errors) {
  const auto& f = forms();
  auto d16 = delta_family_qexp(16, 100);
  EXPECT_THROW(full_report(f.h26, f.hp, d16, 13, 30), InvalidInput);
  EXPECT_THROW(full_report(f.h26, f.hp, f.hpp, 13, 30, ReportOptions{.prime_index = 3}), InvalidInput);
}
