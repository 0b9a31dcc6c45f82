#include <gtest/gtest.h>

#include <random>

#include "rankin/coset.hpp"

using namespace rankin;

TEST(Kostant, SixRepresentatives) {
  auto W = kostant_reps();
  ASSERT_EQ(W.size(), 6u);
  EXPECT_EQ(W[0], M4::identity());
  for (const auto& w : W) EXPECT_TRUE(kostant_condition(w)) << w.str();
  // a transposition inside the Levi is not minimal
  EXPECT_FALSE(kostant_condition(permutation({2, 1, 3, 4})));
  EXPECT_FALSE(kostant_condition(permutation({1, 2, 4, 3})));
  // the six are the minimal representatives of W_M \ W_4: 24 / 4
  int minimal = 0;
  std::array<int, 4> perm{1, 2, 3, 4};
  do {
    if (kostant_condition(permutation(perm))) ++minimal;
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(minimal, 6);
  EXPECT_THROW(kostant_condition(M4::diag({2, 1, 1, 1})), InvalidInput);
}

TEST(Membership, Predicates) {
  const long p = 3;
  EXPECT_TRUE(in_mirahoric(M4::identity(), p, 5));
  EXPECT_TRUE(in_mirahoric(xi(p, 2), p, 2));
  EXPECT_FALSE(in_mirahoric(xi(p, 1), p, 2));
  EXPECT_TRUE(in_mirahoric(xi(p, 0), p, 0));
  EXPECT_FALSE(in_GL_Zp(M4::diag({3, 1, 1, 1}), p));
  EXPECT_FALSE(in_GL_Zp(M4::diag({Rat(1, 3), 3, 1, 1}), p));
  EXPECT_TRUE(in_GL_Zp(M4::diag({2, 5, 1, 1}), p));
  EXPECT_TRUE(in_iwahori(M4::elementary(3, 1, 3), p));
  EXPECT_FALSE(in_iwahori(M4::elementary(3, 1, 1), p));
  EXPECT_TRUE(in_parabolic(M4::elementary(1, 4, Rat(1, 9))));
  EXPECT_FALSE(in_parabolic(M4::elementary(4, 2, 1)));
  EXPECT_TRUE(in_opposite_unipotent(lower_unipotent(1, 2, 3, 4), p));
  EXPECT_FALSE(in_opposite_unipotent(lower_unipotent(Rat(1, 3), 2, 3, 4), p));
  EXPECT_TRUE(in_K2(M2{{5, 7}, {9, 10}}, p, 2));
  EXPECT_FALSE(in_K2(M2{{5, 7}, {9, 4}}, p, 2));
}

TEST(Reduce, Examples) {
  const long p = 5;
  for (long j = 1; j <= 3; ++j) {
    auto c = reduce_unipotent(lower_unipotent(0, 0, 0, ppow(p, j)), p, 1, 2);
    EXPECT_EQ(c.j, j);
    EXPECT_EQ(c.left * c.rep * c.right, lower_unipotent(0, 0, 0, ppow(p, j)));
  }
  auto id = reduce_unipotent(M4::identity(), p, 1, 2);
  EXPECT_EQ(id.j, 3);
  auto c = reduce_unipotent(lower_unipotent(1, p, p * p, p), p, 1, 2);
  EXPECT_EQ(c.j, 1);
  EXPECT_TRUE(in_parabolic(c.left));
  EXPECT_TRUE(in_mirahoric(c.right, p, 3));
  EXPECT_EQ(coset_invariant(lower_unipotent(1, p, p * p, p), p, 3), 1);
  // beyond the level everything lands in xi^{(n'+n)}
  EXPECT_EQ(reduce_unipotent(lower_unipotent(2, 3, ppow(p, 6), ppow(p, 5)), p, 1, 2).j, 3);
  // z of smaller valuation is swapped in
  EXPECT_EQ(reduce_unipotent(lower_unipotent(2, 3, p, ppow(p, 4)), p, 1, 2).j, 1);
}

TEST(Reduce, Errors) {
  const long p = 3;
  try {
    reduce_unipotent(lower_unipotent(1, 1, 1, 3), p, 0, 1);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("v_p(z)"), std::string::npos);
  }
  try {
    reduce_unipotent(lower_unipotent(1, 1, 3, 2), p, 0, 1);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("v_p(w)"), std::string::npos);
  }
  EXPECT_THROW(reduce_unipotent(M4::diag({2, 1, 1, 1}), p, 0, 1), PreconditionError);
  EXPECT_THROW(reduce_unipotent(M4::identity(), 4, 0, 1), InvalidInput);
}

// Random Z_p-integral rationals: unit denominators.
static Rat random_padic_integer(std::mt19937_64& rng, long p, long min_v) {
  std::uniform_int_distribution<long> a(-60, 60), b(1, 12), e(0, 3);
  long den = 0;
  while (den % p == 0) den = b(rng);
  long k = e(rng);
  if (k == 0) return 0;
  return make_rat(a(rng), den) * ppow(p, min_v + k - 1);
}

TEST(Reduce, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2024);
  for (long p : {2L, 3L}) {
    for (auto [np, n] : {std::pair{0L, 1L}, {1L, 0L}, {1L, 1L}, {0L, 2L}}) {
      const long L = np + n;
      CosetOracle oracle(p, L);
      // exactly L + 1 double cosets, represented by xi^{(0)}, ..., xi^{(L)}
      EXPECT_EQ(oracle.orbit_count(), L + 1);
      std::set<long> reps;
      for (long j = 0; j <= L; ++j) reps.insert(oracle.orbit_of(xi(p, j)));
      EXPECT_EQ((long)reps.size(), L + 1);
      // w_4, w_5, w_6 give xi^{(0)}, w_1, w_2, w_3 give the identity class
      auto W = kostant_reps();
      for (int i = 0; i < 6; ++i) EXPECT_EQ(oracle.orbit_of(W[i]), oracle.orbit_of(xi(p, i < 3 ? L : 0))) << i;
      for (int t = 0; t < 500; ++t) {
        M4 u = lower_unipotent(random_padic_integer(rng, p, 0), random_padic_integer(rng, p, 0),
                               random_padic_integer(rng, p, 1), random_padic_integer(rng, p, 1));
        ASSERT_TRUE(in_opposite_unipotent(u, p)) << u.str();
        auto c = reduce_unipotent(u, p, np, n);
        ASSERT_EQ(oracle.orbit_of(u), oracle.orbit_of(c.rep)) << u.str();
        EXPECT_EQ(c.left * c.rep * c.right, u);
        EXPECT_TRUE(in_parabolic(c.left));
        EXPECT_TRUE(in_mirahoric(c.right, p, L));
        EXPECT_EQ(coset_invariant(u, p, L), c.j);
      }
    }
  }
}

TEST(Classes, InvariantOnGeneralMatrices) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> d(-9, 9);
  for (long p : {2L, 3L}) {
    CosetOracle oracle(p, 2);
    std::vector<long> rep(3);
    for (long j = 0; j <= 2; ++j) rep[j] = oracle.orbit_of(xi(p, j));
    int tested = 0;
    while (tested < 400) {
      M4 g;
      for (auto& x : g.e) x = d(rng);
      if (!in_GL_Zp(g, p)) continue;
      ++tested;
      EXPECT_EQ(oracle.orbit_of(g), rep[coset_invariant(g, p, 2)]) << g.str();
    }
  }
  EXPECT_THROW(CosetOracle(5, 3), Unsupported);
}

TEST(Levi, ProjectionLevels) {
  auto a = levi_projection_level(1, 1, 2);
  // n' = 1, n = 2; i = n' gives K(n) x K(n'), i = n gives K(n') x K(n)
  EXPECT_EQ(a.first, 2);
  EXPECT_EQ(a.second, 1);
  auto n_case = levi_projection_level(2, 1, 2);
  EXPECT_EQ(n_case.first, 1);
  EXPECT_EQ(n_case.second, 2);
  auto zero = levi_projection_level(0, 1, 2);
  EXPECT_EQ(zero.first, 3);
  EXPECT_EQ(zero.second, 0);
  auto top = levi_projection_level(3, 1, 2);
  EXPECT_EQ(top.first, 0);
  EXPECT_EQ(top.second, 3);
  EXPECT_THROW(levi_projection_level(4, 1, 2), InvalidInput);
  EXPECT_THROW(levi_projection_level(-1, 1, 2), InvalidInput);
}

TEST(Levi, SampledContainment) {
  auto c = levi_projection_check(2, 1, 1, 1, 2000, 17);
  EXPECT_TRUE(c.ok()) << c.forward_ok << "/" << c.forward_samples << " " << c.lift_ok << "/" << c.lift_samples;
  for (long i = 0; i <= 3; ++i) {
    auto d = levi_projection_check(3, 1, 2, i, 200, 100 + i);
    EXPECT_TRUE(d.ok()) << "i = " << i;
  }
}

TEST(Identities, PrintedMatrices) {
  auto checks = w6_identities_check(3, 40);
  EXPECT_GE(checks.size(), 19u);
  for (const auto& c : checks) EXPECT_TRUE(c.ok) << c.name << " " << c.detail;
}

TEST(Global, Representatives) {
  auto r = global_representatives(1, 3);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].levels(), "K_1(3) x K_1(1)");
  EXPECT_EQ(r[0].label, "xi_f^(N)");
  EXPECT_EQ(r[1].levels(), "K_1(1) x K_1(3)");
  EXPECT_EQ(r[1].label, "xi_f^(N')");
  auto one = global_representatives(1, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_TRUE(one[0].i.empty());
  for (auto [N, Np] : {std::pair{4L, 3L}, {6L, 5L}, {12L, 18L}, {7L, 7L}}) {
    long expect = 1;
    for (long p : prime_factors(N * Np)) expect *= vp(Int(N), p) + vp(Int(Np), p) + 1;
    auto g = global_representatives(N, Np);
    EXPECT_EQ((long)g.size(), expect);
    for (const auto& x : g) EXPECT_EQ(x.N_i * x.N_sup, N * Np);
  }
}
