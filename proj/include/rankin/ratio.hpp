#ifndef RANKIN_RATIO_HPP
#define RANKIN_RATIO_HPP

// Ratios of successive completed critical values: numerical value, exact
// reconstruction in E, reduction mod l and pairwise verdicts.

#include <optional>
#include <string>

#include "rankin/lll.hpp"
#include "rankin/lvalue.hpp"

namespace rankin {

struct Reconstruction {
  AlgNum value;
  Real residual;
  long height_bits = 0;
};

inline long height_bits(const AlgNum& x) {
  auto [a, b] = x.omega_coords();
  Int den = lcm(a.get_den(), b.get_den());
  Int m = den;
  for (const Rat& r : {a, b}) {
    Rat t = r * Rat(den);
    Int num = abs(t.get_num());
    if (num > m) m = num;
  }
  return static_cast<long>(mpz_sizeinbase(m.get_mpz_t(), 2));
}

// Smallest (p, q, r) with |p + q iota(sqrt d0) - r x| minimal; returns (p + q sqrt d0)/r.
// Needs about 3 log10(height_cap) correct digits in x; P is the number of
// correct digits assumed.
inline Reconstruction reconstruct_algebraic(const Cx& x, const QuadField& F, const Int& height_cap, unsigned P) {
  PrecisionScope ps(P + guard_digits);
  const bool quad = !F.is_rational();
  Real K = pow10(static_cast<long>(P) - 2);
  auto rnd = [&](const Real& v) {
    Real t = boost::multiprecision::round(v * K);
    Int z;
    mpfr_get_z(z.get_mpz_t(), t.backend().data(), MPFR_RNDN);
    return z;
  };
  Cx sq = quad ? AlgNum::sqrt_d0(F).embed() : Cx(Real(1));
  std::vector<IntVec> B;
  // columns: p, [q], r, K Re(.), K Im(.)
  if (quad) {
    B.push_back({1, 0, 0, rnd(Real(1)), 0});
    B.push_back({0, 1, 0, rnd(sq.re), rnd(sq.im)});
    B.push_back({0, 0, 1, rnd(-x.re), rnd(-x.im)});
  } else {
    B.push_back({1, 0, rnd(Real(1)), 0});
    B.push_back({0, 1, rnd(-x.re), rnd(-x.im)});
  }
  lll_reduce(B);
  const size_t nc = quad ? 3 : 2;
  std::optional<Reconstruction> best;
  for (const auto& v : B) {
    const Int& r = v[nc - 1];
    if (r == 0) continue;
    Int p = v[0], q = quad ? v[1] : Int(0);
    if (abs(p) > height_cap || abs(q) > height_cap || abs(r) > height_cap) continue;
    AlgNum cand = quad ? AlgNum(F, Rat(p, 1) / Rat(r), Rat(q, 1) / Rat(r)) : AlgNum(Rat(p, 1) / Rat(r));
    Real res = abs(cand.embed() - x);
    if (!best || res < best->residual) best = Reconstruction{cand, res, height_bits(cand)};
  }
  Real tol = pow10(-static_cast<long>(P) / 2) * std::max(Real(1), abs(x));
  if (!best || best->residual > tol)
    throw ReconstructionFailed("reconstruct_algebraic: no relation over " + F.name() + " with height <= " +
                               height_cap.get_str() + " (x = " + to_sci(x.re, 30) + " + i " + to_sci(x.im, 30) + ")");
  return *best;
}

enum class Verdict { Congruent, NotCongruent, Indeterminate, Informational };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Congruent: return "Congruent";
    case Verdict::NotCongruent: return "NotCongruent";
    case Verdict::Indeterminate: return "Indeterminate";
    case Verdict::Informational: return "Informational";
  }
  return "?";
}

struct RatioVerdict {
  long m = 0;                      // pair (m, m + 1)
  Cx ratio_numeric;                // L(m) / L(m + 1), completed values
  Cx finite_ratio;                 // L_f(m) / L_f(m + 1)
  std::optional<AlgNum> ratio_exact;
  Real reconstruction_residual;
  long height = 0;                 // bits
  std::optional<long> v_l;         // valuation at l (LONG_MAX for 0)
  bool indeterminate = false;
  std::string note;
};

inline Int default_height_cap() { return ipow(Int(10), 40); }

// Reconstruction needs P - log10 of the relative error in the ratio.
inline RatioVerdict ratio_from_values(const AfeResult& r, long m, const QuadField& F, const PrimeIdeal* P,
                                      const Int& height_cap, long k) {
  RatioVerdict v;
  v.m = m;
  PrecisionScope ps(r.work_digits);
  const Cx& a = r.L.at(m);
  const Cx& b = r.L.at(m + 1);
  // zero to working precision: below 10^{-P/2} of the AFE terms it came from
  Real zero_tol = pow10(-static_cast<long>(r.P) / 2);
  Real ea = r.err.at(m), eb = r.err.at(m + 1);
  auto vanishes = [&](long s) { return abs(r.L.at(s)) <= zero_tol * r.scale.at(s); };
  if (vanishes(m + 1)) {
    v.indeterminate = true;
    v.note = "L(" + std::to_string(m + 1) + ") vanishes at working precision";
    return v;
  }
  if (vanishes(m)) {
    v.ratio_numeric = Cx(Real(0));
    if (r.forced_zero.count(m) && r.forced_zero.at(m)) {
      // exact: Lambda(s) = -Lambda(W - s) at s = W/2
      v.ratio_exact = AlgNum(0);
      v.v_l = valuation_infinity;
      v.note = "L(" + std::to_string(m) + ") = 0 forced by root number -1";
      return v;
    }
    v.indeterminate = true;
    v.note = "L(" + std::to_string(m) + ") vanishes at working precision";
    return v;
  }
  v.ratio_numeric = a / b;
  v.finite_ratio = v.ratio_numeric / (real_from(gamma_ratio(m, k)) * 4 * real_pi() * real_pi());
  // correct digits of the ratio
  Real rel = ea / abs(a) + eb / abs(b);
  long digits = std::min<long>(r.P, rel == 0 ? long(r.P) : long(-log10_abs(rel)) - 3);
  try {
    auto rec = reconstruct_algebraic(v.ratio_numeric, F, height_cap, static_cast<unsigned>(std::max(10L, digits)));
    v.ratio_exact = rec.value;
    v.reconstruction_residual = rec.residual;
    v.height = rec.height_bits;
  } catch (const ReconstructionFailed& e) {
    v.indeterminate = true;
    v.note = e.what();
    return v;
  }
  if (P) v.v_l = valuation(*v.ratio_exact, *P);
  return v;
}

inline RatioVerdict ratio_at(const RankinSeries& rs, long m, unsigned P, const PrimeIdeal* l = nullptr,
                             const Int& height_cap = default_height_cap()) {
  auto crit = critical_set(rs.k, rs.kp);
  if (!crit.contains(m) || !crit.contains(m + 1)) throw PreconditionError("ratio_at: m and m + 1 must be critical");
  auto r = afe_evaluate(rs, P);
  return ratio_from_values(r, m, rs.field, l, height_cap, rs.k);
}

struct Comparison {
  Verdict verdict = Verdict::Indeterminate;
  std::optional<long> v_diff;
  bool integral = false;  // both ratios l-integral
  std::string note;
};

// Congruent iff ratio1 - ratio2 lies in l. Non-integral ratios still give a
// definite answer; the flag records that the unit hypothesis fails.
inline Comparison compare_ratios(const RatioVerdict& v1, const RatioVerdict& v2, const PrimeIdeal& P) {
  Comparison c;
  if (v1.indeterminate || v2.indeterminate || !v1.ratio_exact || !v2.ratio_exact) {
    c.note = "ratio unavailable: " + (v1.indeterminate ? v1.note : v2.note);
    return c;
  }
  AlgNum x = *v1.ratio_exact, y = *v2.ratio_exact;
  QuadField F = join(join(x.field, y.field), P.field);
  x = x.in(F);
  y = y.in(F);
  long a = x.is_zero() ? valuation_infinity : valuation(x, P);
  long b = y.is_zero() ? valuation_infinity : valuation(y, P);
  c.integral = a >= 0 && b >= 0;
  if (!c.integral) c.note = "ratio not l-integral (v = " + std::to_string(std::min(a, b)) + ")";
  AlgNum d = x - y;
  long v = d.is_zero() ? valuation_infinity : valuation(d, P);
  c.v_diff = v;
  c.verdict = v >= 1 ? Verdict::Congruent : Verdict::NotCongruent;
  return c;
}

}  // namespace rankin

#endif
