#ifndef RANKIN_RANKIN_HPP
#define RANKIN_RANKIN_HPP

// Rankin-Selberg Dirichlet series, Euler factors, archimedean factor,
// critical set and the twist ranges.

#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rankin/forms.hpp"

namespace rankin {

struct RankinSeries {
  NewformData h, h2;        // h2 has the larger weight
  std::vector<AlgNum> b;    // b[n], 1 <= n <= n_max
  long n_max = 0;
  long M = 1;               // lcm of the levels
  DirichletChar char_prod;
  long k = 2, kp = 2;       // Gamma parameters: k = min weight, kp = max weight
  long Q = 1;               // conductor guess
  QuadField field;

  long W() const { return k + kp - 1; }  // s <-> W - s
};

// (N N')^2 for square-free coprime levels.
inline long conductor_guess(long N, long Np) {
  long NN = N * Np;
  return NN * NN;
}

// sum b_n n^{-s} = L^{(M)}(2s + 2 - k - k', chi chi') * sum a_n(h) a_n(h') n^{-s}
inline RankinSeries rs_coefficients(const NewformData& f, const NewformData& g, long n_max) {
  RankinSeries rs;
  bool swap = f.weight > g.weight;
  rs.h = swap ? g : f;
  rs.h2 = swap ? f : g;
  rs.k = rs.h.weight;
  rs.kp = rs.h2.weight;
  long avail = std::min(f.n_max, g.n_max);
  if (n_max > avail)
    throw InsufficientData("rs_coefficients: need a(n) up to " + std::to_string(n_max) + ", have " + std::to_string(avail), n_max);
  rs.n_max = n_max;
  rs.M = std::lcm(f.level, g.level);
  rs.char_prod = char_product(f.chi, g.chi);
  rs.Q = conductor_guess(f.level, g.level);
  rs.field = join(f.field, g.field);
  std::vector<AlgNum> prod(n_max + 1, AlgNum(0));
  for (long n = 1; n <= n_max; ++n) prod[n] = f.coeffs[n] * g.coeffs[n];
  rs.b.assign(n_max + 1, AlgNum(0));
  const long w = f.weight + g.weight - 2;
  for (long m = 1; m * m <= n_max; ++m) {
    if (std::gcd(m, rs.M) != 1) continue;
    AlgNum cm = rs.char_prod(m) * AlgNum(ipow(Int(m), w));
    if (cm.is_zero()) continue;
    long m2 = m * m;
    for (long d = 1; d * m2 <= n_max; ++d) {
      if (prod[d].is_zero()) continue;
      rs.b[d * m2] += cm * prod[d];
    }
  }
  for (auto& x : rs.b)
    if (!x.is_rational()) x.field = rs.field;
  return rs;
}

// Inverse local factor as a polynomial in t = p^{-s}.
struct LocalFactorGlobal {
  long p = 2;
  std::vector<AlgNum> poly;
  long degree() const { return static_cast<long>(poly.size()) - 1; }
};

// p not dividing either level: prod_{i,j} (1 - alpha_i beta_j t) with
// alpha_1 + alpha_2 = a, alpha_1 alpha_2 = A, beta_1 + beta_2 = b, beta_1 beta_2 = B.
inline std::vector<AlgNum> unramified_factor(const AlgNum& a, const AlgNum& A, const AlgNum& b, const AlgNum& B) {
  AlgNum ab = a * b, AB = A * B;
  return {AlgNum(1), -ab, a * a * B + b * b * A - AlgNum(2) * AB, -(ab * AB), AB * AB};
}

// p exactly dividing the level of one form only: L_p(s, h) = (1 - A p^{-s})^{-1}
// and the other form unramified with trace b and determinant B.
inline std::vector<AlgNum> level_p_factor(const AlgNum& A, const AlgNum& b, const AlgNum& B) {
  return {AlgNum(1), -(A * b), A * A * B};
}

inline LocalFactorGlobal euler_factor(const NewformData& h, const NewformData& h2, long p) {
  if (!is_prime(p)) throw InvalidInput("euler_factor: p must be prime");
  LocalFactorGlobal lf;
  lf.p = p;
  bool d1 = h.level % p == 0, d2 = h2.level % p == 0;
  auto det = [&](const NewformData& f) { return f.chi(p) * AlgNum(ipow(Int(p), f.weight - 1)); };
  if (!d1 && !d2) {
    lf.poly = unramified_factor(h.a(p), det(h), h2.a(p), det(h2));
    return lf;
  }
  long Pp = p * p;
  if ((d1 && d2) || h.level % Pp == 0 || h2.level % Pp == 0)
    throw Unsupported("euler_factor at p = " + std::to_string(p) +
                      ": only levels that are square-free and relatively prime are supported");
  const NewformData& ram = d1 ? h : h2;
  const NewformData& unr = d1 ? h2 : h;
  lf.poly = level_p_factor(ram.a(p), unr.a(p), det(unr));
  return lf;
}

// Expands prod_p 1/poly_p(p^{-s}) as a Dirichlet series up to n_max.
inline std::vector<AlgNum> euler_product_expansion(const NewformData& h, const NewformData& h2, long n_max) {
  std::vector<AlgNum> c(n_max + 1, AlgNum(0));
  c[1] = AlgNum(1);
  for (long p : primes_upto(n_max)) {
    auto lf = euler_factor(h, h2, p);
    // power series 1/poly in t up to t^e, p^e <= n_max
    long e = 0;
    for (long q = p; q <= n_max; q *= p) ++e;
    std::vector<AlgNum> inv(e + 1, AlgNum(0));
    inv[0] = AlgNum(1);
    for (long r = 1; r <= e; ++r) {
      AlgNum s(0);
      for (long j = 1; j <= std::min<long>(r, lf.degree()); ++j) s -= lf.poly[j] * inv[r - j];
      inv[r] = s;
    }
    // multiply into c (only numbers coprime to p are filled so far)
    for (long m = n_max; m >= 1; --m) {
      if (m % p == 0 || c[m].is_zero()) continue;
      long q = p;
      for (long r = 1; r <= e && m * q <= n_max; ++r, q *= p) c[m * q] = c[m] * inv[r];
    }
  }
  return c;
}

// (2 pi)^{-2s} Gamma(s) Gamma(s + 1 - k)
inline Cx archimedean_factor(const Cx& s, long k) {
  auto pole = [](const Cx& z) {
    if (z.im != 0 || z.re > 0) return false;
    return boost::multiprecision::floor(z.re) == z.re;
  };
  Cx s2 = s;
  s2.re += 1 - k;
  if (pole(s) || pole(s2)) throw PoleError("archimedean_factor: pole of the Gamma factor");
  auto gamma_any = [](const Cx& z) {
    // reflection for Re z <= 0 is not needed at the points used; shift up instead
    Cx w = z, prod(Real(1));
    while (w.re <= 0) {
      prod *= w;
      w.re += 1;
    }
    return cx_gamma(w) / prod;
  };
  Real l2pi = boost::multiprecision::log(2 * real_pi());
  Cx e = cx_exp(s * Cx(Real(-2) * l2pi));
  return e * gamma_any(s) * gamma_any(s2);
}

// Rational part of L_inf(m) / L_inf(m + 1) = (2 pi)^2 / (m (m + 1 - k)).
inline Rat gamma_ratio(long m, long k) {
  long d = m * (m + 1 - k);
  if (d == 0) throw PoleError("gamma_ratio: pole at m = " + std::to_string(m));
  return Rat(1, 1) / Rat(d);
}

struct CriticalSet {
  std::vector<long> points;
  bool ratios_possible = false;
  std::string warning;
  bool contains(long m) const {
    return !points.empty() && m >= points.front() && m <= points.back();
  }
};

// {m : k <= m <= k' - 1}
inline CriticalSet critical_set(long k, long kp) {
  CriticalSet c;
  if (kp <= k) {
    c.warning = "no critical points: k' <= k";
    return c;
  }
  for (long m = k; m <= kp - 1; ++m) c.points.push_back(m);
  c.ratios_possible = kp - k >= 2;
  if (!c.ratios_possible) c.warning = "a single critical point; ratios need k' - k >= 2";
  return c;
}

struct TwistPair {
  long twist;
  long lo, hi;  // classical arguments (lo, lo + 1)
};

struct TheoremRanges {
  std::vector<TwistPair> right;  // right of the unitary axis
  std::vector<TwistPair> left;   // needs the unit hypothesis
  std::string left_caveat = "left of the unitary axis: requires the relevant quantities to be l-adic units";
};

inline long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// s = -2 -> k' - m - 3, s = -1 -> k' - m - 2
inline std::pair<long, long> translate_argument(long m, long /*k*/, long kp) { return {kp - m - 3, kp - m - 2}; }

// Twists -1 <= m <= (k'-k)/2 - 2 are right of the axis; the rest of the
// critical range -1 <= m <= k'-k-3 is left of it.
inline TheoremRanges theorem_ranges(long k, long kp) {
  if (kp - k < 2) throw PreconditionError("theorem_ranges: need k' - k >= 2");
  TheoremRanges t;
  long right_max = floor_div(kp - k - 4, 2);
  for (long m = -1; m <= kp - k - 3; ++m) {
    auto [lo, hi] = translate_argument(m, k, kp);
    (m <= right_max ? t.right : t.left).push_back({m, lo, hi});
  }
  return t;
}

// Lower-weight orientation (the congruent forms have the smaller weight k'):
// twists 3 <= m <= k-k'+1 are critical, (k-k')/2 + 1 < m of them right of the axis;
// the ratio is L(k'+m-3)/L(k'+m-2).
inline TheoremRanges theorem_ranges_lower(long k, long kp) {
  if (k - kp < 2) throw PreconditionError("theorem_ranges_lower: need k - k' >= 2");
  TheoremRanges t;
  for (long m = 3; m <= k - kp + 1; ++m) {
    TwistPair tp{m, kp + m - 3, kp + m - 2};
    (2 * m > k - kp + 2 ? t.right : t.left).push_back(tp);
  }
  return t;
}

}  // namespace rankin

#endif
