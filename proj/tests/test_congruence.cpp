#include <gtest/gtest.h>

#include "rankin/congruence.hpp"
#include "rankin/ingest.hpp"

using namespace rankin;

static const std::string kFix = std::string(RANKIN_SOURCE_DIR) + "/fixtures/";

static PrimeIdeal ramified13() {
  auto ps = factor_rational_prime(13, QuadField(-26));
  EXPECT_EQ(ps.size(), 1u);
  EXPECT_EQ(ps[0].kind, PrimeKind::ramified);
  return ps[0];
}

static PrimeIdeal over_q(long l) { return factor_rational_prime(l, QuadField()).at(0); }

TEST(Sturm, Examples) {
  EXPECT_EQ(sturm_bound(13, 3), 5);
  EXPECT_EQ(sturm_bound(26, 1), 3);
  EXPECT_EQ(sturm_bound(12, 1), 1);
  EXPECT_EQ(gamma0_index(3), 4);
  EXPECT_EQ(gamma0_index(12), 24);
  EXPECT_THROW(sturm_bound(0, 1), InvalidInput);
}

TEST(Sturm, Monotone) {
  for (long N = 1; N <= 60; ++N)
    for (long k = 1; k <= 40; ++k) {
      EXPECT_LE(sturm_bound(k, N), sturm_bound(k + 1, N));
      // index is multiplicative up to divisibility, so monotone along multiples
      EXPECT_LE(sturm_bound(k, N), sturm_bound(k, 2 * N));
    }
}

TEST(Congruence, Level3Pair) {
  auto h1 = load_newform(kFix + "3.13.b.a.json");
  auto h2 = load_newform(kFix + "3.13.b.b.json");
  auto P = ramified13();
  auto r = check_congruent(h1, h2, P, 50);
  EXPECT_TRUE(r.congruent);
  EXPECT_EQ(r.bound_used, 50);
  EXPECT_FALSE(r.first_failure.has_value());
  // symmetric and reflexive
  EXPECT_TRUE(check_congruent(h2, h1, P, 50).congruent);
  EXPECT_TRUE(check_congruent(h2, h2, P, 50).congruent);
  // far beyond the Sturm bound as well
  EXPECT_TRUE(check_congruent(h1, h2, P, 3000).congruent);
  // not congruent at primes above 5, 7, 11 (above 2 they are: all differences are even)
  for (long l : {5L, 7L, 11L})
    for (const auto& Q : factor_rational_prime(l, QuadField(-26))) {
      auto rr = check_congruent(h1, h2, Q, 50);
      EXPECT_FALSE(rr.congruent) << Q.str();
      EXPECT_EQ(rr.first_failure.has_value(), !rr.congruent);
    }
}

TEST(Congruence, ConstructedFailure) {
  auto d = delta_family_qexp(12, 30);
  auto e = d;
  e.coeffs[2] += AlgNum(1);
  auto r = check_congruent(d, e, over_q(5), 10);
  EXPECT_FALSE(r.congruent);
  ASSERT_TRUE(r.first_failure.has_value());
  EXPECT_EQ(*r.first_failure, 2);
  EXPECT_TRUE(check_congruent(d, d, over_q(5), 10).congruent);
}

TEST(Congruence, Errors) {
  auto d = delta_family_qexp(12, 30);
  auto f = delta_family_qexp(16, 30);
  EXPECT_THROW(check_congruent(d, f, over_q(5), 0), InvalidInput);
  auto e = d;
  e.coeffs[3] = AlgNum(Rat(1, 5));
  try {
    check_congruent(d, e, over_q(5), 10);
    FAIL();
  } catch (const NotIntegral& err) {
    EXPECT_NE(std::string(err.what()).find("n = 3"), std::string::npos);
  }
  EXPECT_THROW(check_congruent(d, d, over_q(5), 31), InsufficientData);
}

TEST(Eisenstein, Level3Screen) {
  auto h1 = load_newform(kFix + "3.13.b.a.json");
  auto h2 = load_newform(kFix + "3.13.b.b.json");
  auto P = ramified13();
  EXPECT_EQ(eisenstein_screen_depth(13, 3, 13), 9);
  auto a1 = eisenstein_screen(h1, P);
  auto a2 = eisenstein_screen(h2, P);
  ASSERT_TRUE(a1.has_value());
  ASSERT_TRUE(a2.has_value());
  EXPECT_EQ(*a1, *a2);
  for (const auto& Q : factor_rational_prime(5, QuadField(-26))) EXPECT_FALSE(eisenstein_screen(h2, Q).has_value());
  auto E = eisenstein_qexp(13, h1.chi, 5);
  EXPECT_EQ(E.constant_term, AlgNum(Rat(55601, 3)));
  std::vector<long> printed = {1, -4095, 1, 16773121};
  for (long n = 1; n <= 4; ++n) EXPECT_EQ(E.a(n), AlgNum(printed[n - 1])) << n;
}

TEST(Eisenstein, Ramanujan) {
  auto d = delta_family_qexp(12, 80);
  EXPECT_EQ(eisenstein_screen_depth(12, 1, 691), 59);
  auto a = eisenstein_screen(d, over_q(691));
  ASSERT_TRUE(a.has_value());
  EXPECT_NE(a->find("12"), std::string::npos);
  EXPECT_FALSE(eisenstein_screen(d, over_q(5)).has_value());
  EXPECT_FALSE(eisenstein_screen(d, over_q(11)).has_value());
  // wrong parity: no admissible family
  auto h = load_newform(kFix + "3.13.b.a.json");
  NewformData odd = d;
  odd.weight = 13;
  EXPECT_FALSE(eisenstein_screen(odd, over_q(691)).has_value());
  (void)h;
}

TEST(Excluded, Examples) {
  auto e = excluded_primes(13, 26, 3, 1);
  EXPECT_EQ(e.S_weight, primes_upto(26));
  EXPECT_EQ(e.S_level, std::vector<long>{3});
  auto t = excluded_primes(2, 2, 1, 1);
  EXPECT_EQ(t.S_weight, std::vector<long>{2});
  EXPECT_TRUE(t.S_level.empty());
  EXPECT_EQ(excluded_primes(4, 8, 6, 35).S_level, (std::vector<long>{2, 3, 5, 7}));
  EXPECT_THROW(excluded_primes(0, 2, 1, 1), InvalidInput);
}
