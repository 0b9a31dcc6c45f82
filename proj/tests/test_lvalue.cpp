#include <gtest/gtest.h>

#include "rankin/ingest.hpp"
#include "rankin/lvalue.hpp"

using namespace rankin;
using boost::multiprecision::abs;

static const std::string kFix = std::string(RANKIN_SOURCE_DIR) + "/fixtures/";

namespace {
struct Pairs {
  RankinSeries rat, quad, d16;
  Pairs() {
    auto hp = load_newform(kFix + "3.13.b.a.json");
    auto hpp = load_newform(kFix + "3.13.b.b.json");
    auto h26 = delta_family_qexp(26, 6000);
    rat = rs_coefficients(h26, hp, 6000);
    quad = rs_coefficients(h26, hpp, 6000);
    d16 = rs_coefficients(delta_family_qexp(12, 3000), delta_family_qexp(16, 3000), 3000);
  }
};
const Pairs& pairs() {
  static Pairs p;
  return p;
}
Real rel(const Cx& a, const Cx& b) { return rankin::abs(a - b) / rankin::abs(b); }
}  // namespace

TEST(Kernel, MatchesBesselOracle) {
  auto j = nlohmann::json::parse(read_file(kFix + "kernel_oracle.json"));
  for (const auto& row : j["rows"]) {
    long k = row["k"], s = row["s"];
    PrecisionScope ps(60);
    Real x(row["x"].get<std::string>());
    Real want(row["F"].get<std::string>());
    auto spec = make_kernel_spec(k, k + 20, 32, static_cast<double>(x), s, s);
    Real got = afe_kernel(x, s, spec);
    // absolute accuracy against the total mass gamma(s), which is what the sums need
    Real g(row["gamma"].get<std::string>());
    EXPECT_LT(abs(got - want) / g, Real("1e-30")) << "k=" << k << " s=" << s << " x=" << x;
    if (want > pow10(-20) * g) EXPECT_LT(abs(got / want - 1), Real("1e-10")) << "k=" << k << " s=" << s;
  }
}

TEST(Kernel, SmallAndLargeArgument) {
  PrecisionScope ps(50);
  auto spec = make_kernel_spec(13, 26, 30, 1e-6, 13, 25);
  KernelTable t(spec);
  // x -> 0: the full mass gamma(s)
  auto v = t.eval(Real("1e-6"));
  for (long s = 13; s <= 25; ++s) {
    Real g = archimedean_factor(Cx(Real(s)), 13).re;
    EXPECT_LT(abs(v[s - 13] / g - 1), Real("1e-5")) << s;
    EXPECT_LE(v[s - 13], g * (1 + pow10(-40)));
  }
  // large x: decreasing while above the noise floor 10^{-P} gamma(s), and
  // below x^{s} exp(-4 pi sqrt x) up to a constant or at the floor
  std::vector<Real> prev = t.eval(Real(1));
  for (int e = 1; e <= 9; ++e) {
    Real x = boost::multiprecision::pow(Real(2), e);
    auto cur = t.eval(x);
    for (long si = 0; si < 13; ++si) {
      double floor_ = log10_abs(archimedean_factor(Cx(Real(13 + si)), 13).re) - 30;
      if (log10_abs(cur[si]) > floor_ + 3) {
        EXPECT_GT(cur[si], 0);
        EXPECT_LT(cur[si], prev[si]);
      }
      double bound = (13 + si) * std::log10(double(x)) - 4 * M_PI * std::sqrt(double(x)) / std::log(10.0) + 2;
      EXPECT_LT(log10_abs(cur[si]), std::max(bound, floor_)) << x;
    }
    prev = cur;
  }
  EXPECT_THROW(t.eval(Real(0)), InvalidInput);
  EXPECT_THROW(make_kernel_spec(13, 26, 30, 0.1, 5, 6, 0, 3), InvalidInput);
}

TEST(Afe, FixturePairs) {
  const auto& P = pairs();
  const unsigned prec = 30;
  Real tol = pow10(-10);  // P/3
  for (const RankinSeries* rs : {&P.rat, &P.quad}) {
    auto r = afe_evaluate(*rs, prec);
    EXPECT_LT(r.root.unitarity_defect, tol);
    EXPECT_LT(r.root.probe_gap, tol);
    for (const auto& [s, res] : r.fe_residual) EXPECT_LT(res, tol) << s;
    for (const auto& [s, e] : r.err) EXPECT_LT(e, pow10(-15) * r.scale.at(s)) << s;
  }
  // rational coefficients: eps real, here -1, and the centre vanishes
  auto r = afe_evaluate(P.rat, prec);
  EXPECT_LT(abs(r.root.eps.im), tol);
  EXPECT_LT(abs(r.root.eps.re + 1), tol);
  EXPECT_TRUE(r.self_dual);
  EXPECT_TRUE(r.forced_zero.at(19));
  EXPECT_LT(rankin::abs(r.L.at(19)), pow10(-20) * r.scale.at(19));
  auto q = afe_evaluate(P.quad, prec);
  EXPECT_FALSE(q.self_dual);
  EXPECT_GT(abs(q.root.eps.im), Real("0.1"));
}

TEST(Afe, LevelOnePair) {
  const auto& P = pairs();
  auto r = afe_evaluate(P.d16, 30);
  EXPECT_EQ(r.Q, 1);
  EXPECT_LT(r.root.unitarity_defect, pow10(-10));
  EXPECT_LT(abs(abs(r.root.eps.re) - 1), pow10(-10));
  for (const auto& [s, res] : r.fe_residual) EXPECT_LT(res, pow10(-10)) << s;
}

TEST(Afe, WrongConductorFailsUnitarity) {
  const auto& P = pairs();
  EXPECT_NO_THROW(solve_root_number(P.quad, 20));
  EXPECT_THROW(solve_root_number(P.quad, 20, P.quad.Q * 4), NormalizationError);
}

TEST(Afe, PrecisionMonotone) {
  const auto& P = pairs();
  auto a = afe_evaluate(P.quad, 20);
  auto b = afe_evaluate(P.quad, 40);
  for (long s = 13; s <= 25; ++s) EXPECT_LT(rel(a.L.at(s), b.L.at(s)), pow10(-10)) << s;
}

TEST(Direct, AgreesWithAfe) {
  const auto& P = pairs();
  auto r = afe_evaluate(P.quad, 30);
  for (auto [s, prec] : {std::pair<long, unsigned>{25, 14}, {24, 10}}) {
    auto d = direct_L(P.quad, s, prec, true);
    EXPECT_LE(d.n_used, P.quad.n_max);
    EXPECT_LT(d.log10_tail, -double(prec));
    // completed values; relative agreement to 10^{-P/2}
    EXPECT_LT(rel(d.value, r.L.at(s)), pow10(-long(prec) / 2)) << s;
  }
  EXPECT_THROW(direct_L(P.quad, 19, 10), PreconditionError);
  try {
    direct_L(P.quad, 20, 60);
    FAIL();
  } catch (const InsufficientData& e) {
    EXPECT_NE(std::string(e.what()).find("needs"), std::string::npos);
  }
}

TEST(Direct, DegenerateSeries) {
  RankinSeries rs = pairs().d16;
  for (long n = 2; n <= rs.n_max; ++n) rs.b[n] = AlgNum(0);
  auto d = direct_L(rs, 22, 20, true);
  PrecisionScope ps(35);
  Cx g = archimedean_factor(Cx(Real(22)), 12);
  EXPECT_LT(rel(d.value, g), pow10(-25));
}

TEST(Direct, TailBound) {
  // bound decreases in N and in sigma
  EXPECT_LT(log10_tail_bound(2000, 3), log10_tail_bound(1000, 3));
  EXPECT_LT(log10_tail_bound(1000, 4), log10_tail_bound(1000, 3));
  EXPECT_GT(direct_terms_required(3.5, 40), 1000000000L);
  EXPECT_EQ(direct_terms_required(1.5, 60), -1);  // beyond 64-bit range
  EXPECT_EQ(direct_terms_required(1.0, 10), -1);
}

TEST(LAt, MethodChoice) {
  const auto& P = pairs();
  auto a = L_at(P.quad, 25, 12);
  EXPECT_EQ(a.method, "direct");
  auto b = L_at(P.quad, 19, 20);
  EXPECT_EQ(b.method, "afe");
  EXPECT_THROW(L_at(P.quad, 5, 20), PreconditionError);
}
