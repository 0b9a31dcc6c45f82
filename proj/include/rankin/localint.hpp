#ifndef RANKIN_LOCALINT_HPP
#define RANKIN_LOCALINT_HPP

// Local constant of the standard intertwining operator at p | N N' for a
// Steinberg twist against an unramified principal series, assembled from the
// geometric factors of the formal integrals and compared with the ratio of
// local Rankin-Selberg factors.

#include <random>

#include "rankin/coset.hpp"
#include "rankin/forms.hpp"
#include "rankin/rankin.hpp"

namespace rankin {

// c * (sqrt p)^e; values in E only when e is even.
struct HalfPow {
  AlgNum c;
  long e = 0;

  bool even() const { return e % 2 == 0; }
  AlgNum value(long p) const {
    if (!even()) throw IntegrityError("HalfPow: odd power of sqrt(p) exposed");
    return c * AlgNum(rpow(Rat(p), e / 2));
  }
  HalfPow operator*(const HalfPow& o) const { return {c * o.c, e + o.e}; }
  HalfPow operator/(const HalfPow& o) const { return {c / o.c, e - o.e}; }
};

enum class LocalKind { SteinbergTwist, UnramifiedPS };

struct LocalRep {
  LocalKind kind = LocalKind::UnramifiedPS;
  long p = 2;
  long conductor_exponent = 0;  // n_p
  AlgNum chi_p_at_p;            // Steinberg: chi_p(p) = a(p, h)
  AlgNum trace, det;            // principal series: roots of x^2 - trace x + det are the
                                // Satake parameters of the rho-conjugate form, det = chi'^{-1}(p) p^{k'-1}
  long weight = 0;

  static LocalRep steinberg(long p, const AlgNum& a_p) {
    LocalRep r;
    r.kind = LocalKind::SteinbergTwist;
    r.p = p;
    r.conductor_exponent = 1;
    r.chi_p_at_p = a_p;
    return r;
  }
  static LocalRep principal_series(long p, const AlgNum& t, const AlgNum& d, long weight) {
    if (d.is_zero()) throw InvalidInput("principal series: det must be nonzero");
    LocalRep r;
    r.kind = LocalKind::UnramifiedPS;
    r.p = p;
    r.trace = t;
    r.det = d;
    r.weight = weight;
    return r;
  }

  // Symmetric functions of chi'_1(p), chi'_2(p). The automorphic parameters are
  // the classical ones times (sqrt p)^{-1}, twisted by (sqrt p)^{-5} at s = -2.
  HalfPow chi_sum() const { return {trace, -6}; }
  HalfPow chi_prod() const { return {det, -12}; }
};

inline bool character_ramified_at(const DirichletChar& chi, long p) {
  long m = chi.modulus, rest = m;
  while (rest % p == 0) rest /= p;
  if (rest == m) return false;
  for (long r = 1; r < m; ++r)
    if (std::gcd(r, m) == 1 && r % rest == 1 % rest && chi(r) != AlgNum(1)) return true;
  return false;
}

// Local component at p of a newform, for the cases handled here.
inline LocalRep local_rep(const NewformData& h, long p) {
  if (!is_prime(p)) throw InvalidInput("local_rep: p must be prime");
  if (h.level % p != 0) {
    AlgNum chi_inv = AlgNum(1) / h.chi(p);
    return LocalRep::principal_series(p, chi_inv * h.a(p), chi_inv * AlgNum(ipow(Int(p), h.weight - 1)), h.weight);
  }
  if (h.level % (p * p) == 0) throw Unsupported("local_rep: p^2 divides the level of " + h.label);
  if (character_ramified_at(h.chi, p))
    throw Unsupported("local_rep: " + h.label + " has character ramified at " + std::to_string(p) +
                      " (ramified principal series, not a Steinberg twist)");
  return LocalRep::steinberg(p, h.a(p));
}

struct NewVectorData {
  LocalKind kind;
  std::optional<Rat> at_identity, at_w;  // Steinberg new vector at 1 and at w = (0 -1; 1 0)
  Rat modulus_exponent;                  // spherical: |t1 t2^{-1}|^{e} chi'_1(t1) chi'_2(t2)
  std::string torus_action;
};

inline NewVectorData new_vector_data(LocalKind kind, long p) {
  NewVectorData d{kind, std::nullopt, std::nullopt, 0, ""};
  if (kind == LocalKind::SteinbergTwist) {
    d.at_identity = Rat(1);
    d.at_w = Rat(-1, p);
    d.torus_action = "chi_p(t1) chi_p(t2)";
  } else {
    d.modulus_exponent = Rat(1, 2);
    d.torus_action = "|t1/t2|^{1/2} chi'_1(t1) chi'_2(t2)";
  }
  return d;
}

// Closed form of 1 + ((p-1)/p) sum_{M >= 1} (p^{-2} X)^M.
struct GeomFactor {
  AlgNum X, numerator, denominator;
  AlgNum value() const { return numerator / denominator; }
};

inline GeomFactor geometric_factor(const AlgNum& X, long p) {
  Rat p2 = rpow(Rat(p), -2), p3 = rpow(Rat(p), -3);
  GeomFactor g{X, AlgNum(1) - AlgNum(p3) * X, AlgNum(1) - AlgNum(p2) * X};
  if (g.denominator.is_zero()) throw ConvergenceViolation("geometric_factor: 1 - p^{-2} X vanishes");
  return g;
}

// The closed form as printed with the series: (1 - p^{-1} X) / (1 - p^{-2} X).
inline AlgNum geometric_factor_printed(const AlgNum& X, long p) {
  AlgNum den = AlgNum(1) - AlgNum(rpow(Rat(p), -2)) * X;
  if (den.is_zero()) throw ConvergenceViolation("geometric_factor: 1 - p^{-2} X vanishes");
  return (AlgNum(1) - AlgNum(Rat(1, p)) * X) / den;
}

// Truncation of the series at M terms.
inline AlgNum geometric_partial_sum(const AlgNum& X, long p, long M) {
  AlgNum y = AlgNum(rpow(Rat(p), -2)) * X, pw = AlgNum(1), s = AlgNum(0);
  for (long m = 1; m <= M; ++m) {
    pw = pw * y;
    s = s + pw;
  }
  return AlgNum(1) + AlgNum(Rat(p - 1, p)) * s;
}

struct LocalConstant {
  AlgNum value;                   // c'_p
  AlgNum numerator, denominator;  // prod (1 - p^{-3} X_i), prod (1 - p^{-2} X_i)
  HalfPow x_sum, x_prod;          // X_1 + X_2, X_1 X_2 with their sqrt(p) degrees
  AlgNum euler_ratio;             // L_p(k'-2) / L_p(k'-1) from the Euler factor
  bool matches = false;
  bool mirrored = false;
  std::string note;
};

// L_p(k'-2, h x h') / L_p(k'-1, h x h') from the level-p Euler factor, with the
// principal-series data converted to a'_p = p^{k'-1} t / d and
// chi'(p) p^{k'-1} = p^{2k'-2} / d.
inline AlgNum euler_local_ratio(const AlgNum& A, const AlgNum& t, const AlgNum& d, long p, long kp) {
  AlgNum ap = AlgNum(ipow(Int(p), kp - 1)) * t / d;
  AlgNum B = AlgNum(ipow(Int(p), 2 * kp - 2)) / d;
  auto poly = level_p_factor(A, ap, B);
  auto eval = [&](long s) {
    AlgNum T(rpow(Rat(p), -s)), acc(0), pw(1);
    for (const auto& c : poly) {
      acc = acc + c * pw;
      pw = pw * T;
    }
    return acc;
  };
  AlgNum den = eval(kp - 2);
  if (den.is_zero()) throw ConvergenceViolation("euler_local_ratio: L_p(k'-2)^{-1} vanishes");
  return eval(kp - 1) / den;
}

inline LocalConstant local_constant(const LocalRep& st, const LocalRep& ps, long p) {
  if (st.kind != LocalKind::SteinbergTwist || ps.kind != LocalKind::UnramifiedPS)
    throw Unsupported("local_constant: needs a Steinberg twist against an unramified principal series");
  if (st.p != p || ps.p != p) throw InvalidInput("local_constant: local data at a different prime");
  LocalConstant c;
  HalfPow A{st.chi_p_at_p, 0};
  // X_i = chi_p(p) / chi'_i(p): sum and product through the symmetric functions
  c.x_sum = A * ps.chi_sum() / ps.chi_prod();
  c.x_prod = A * A / ps.chi_prod();
  if (!c.x_sum.even() || !c.x_prod.even()) throw IntegrityError("local_constant: odd sqrt(p) degree");
  AlgNum s = c.x_sum.value(p), q = c.x_prod.value(p);
  auto poly = [&](long e) {  // prod (1 - p^{-e} X_i)
    Rat pe = rpow(Rat(p), -e);
    return AlgNum(1) - AlgNum(pe) * s + AlgNum(pe * pe) * q;
  };
  c.numerator = poly(3);
  c.denominator = poly(2);
  if (c.denominator.is_zero()) throw ConvergenceViolation("local_constant: a geometric factor has vanishing denominator");
  c.value = c.numerator / c.denominator;
  c.euler_ratio = euler_local_ratio(st.chi_p_at_p, ps.trace, ps.det, p, ps.weight);
  c.matches = c.value == c.euler_ratio;
  return c;
}

// From the two forms; when the Steinberg side is the second form the roles are
// swapped, which extends the computed orientation by symmetry.
inline LocalConstant local_constant(const NewformData& h, const NewformData& h2, long p) {
  bool d1 = h.level % p == 0, d2 = h2.level % p == 0;
  if (d1 == d2) throw Unsupported("local_constant: exactly one level must be divisible by p");
  const NewformData& s = d1 ? h : h2;
  const NewformData& u = d1 ? h2 : h;
  auto c = local_constant(local_rep(s, p), local_rep(u, p), p);
  c.mirrored = !d1;
  if (c.mirrored) c.note = "Steinberg component on the second form: orientation obtained by swapping the arguments";
  return c;
}

// Support and membership claims behind the evaluation, at level n' + n = 1
// with xi^{(n_p)} = 1: each matrix said to lie in K or P does, each branch
// said to vanish lands in the class of 1_4, which carries no support.
inline std::vector<IdentityCheck> vanishing_checks(long p, uint64_t seed = 7, int samples = 30) {
  const long L = 1;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> unit_d(1, 50);
  auto sample = [&](long v) -> Rat {
    long a = 0;
    while (a % p == 0) a = unit_d(rng);
    return Rat(a % 2 ? a : -a) * ppow(p, v);
  };
  const M4 w0 = kostant_reps()[5];
  const M4 w0i = w0.inverse();
  auto upper = [](const Rat& x1, const Rat& x2, const Rat& x3, const Rat& x4) {
    return M4{{1, 0, x1, x2}, {0, 1, x3, x4}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  };
  auto K = [&](const M4& g) { return in_mirahoric(g, p, L); };
  std::vector<IdentityCheck> out;
  bool a = true, b = true, b2 = true, c = true, d = true, e = true, f = true, cls = true;
  // support: phi' lives on P xi^{(n'_p)} K = P xi^{(0)} K; 1_4 is class L
  cls = coset_invariant(M4::identity(), p, L) == L && coset_invariant(w0i, p, L) == 0 && L != 0;
  for (int t = 0; t < samples; ++t) {
    for (long v = -3; v <= 3; ++v) {
      Rat x1 = sample(v), x2 = sample(v), x3 = sample(v), x4 = sample(v);
      if (v >= 0) {
        a = a && K(M4::elementary(2, 3, x3));
        // x2 >= 0 branch of the w0-twisted integral: integrand at an element of K
        M4 g = w0i * M4::elementary(1, 4, x2) * w0;
        c = c && g == M4::elementary(3, 2, x2) && K(g) && coset_invariant(g, p, L) == L;
        // x2 >= 0 branch of the main integral: w0^{-1} times an element of K
        e = e && K(M4::elementary(1, 4, x2));
      } else {
        M4 lhs = w0i * upper(x1, x2, x3, x4);
        M4 f1 = lower_unipotent(x1, x2, 0, x4) * M4{{0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, x3, 0}};
        M4 kx{{0, -1, 0, 0}, {0, 1 / x3, 1, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}};
        M4 f2 = lower_unipotent(x1, x2, 0, x4) * M4::elementary(1, 4, 1 / x3) * M4::diag({1 / x3, 1, 1, x3}) *
                permutation({1, 4, 3, 2}) * kx;
        b = b && lhs == f1 && f1 == f2;
        b2 = b2 && K(kx);
        // x2 < 0, w0-twisted: u(x2) t(x2) k with k in K and u(x2) t(x2) in P
        M4 g = w0i * M4::elementary(1, 4, x2) * w0;
        M4 kd{{1, 0, 0, 0}, {0, 0, -1, 0}, {0, 1, 1 / x2, 0}, {0, 0, 0, 1}};
        M4 ut = M4::elementary(2, 3, 1 / x2) * M4::diag({1, 1 / x2, x2, 1});
        d = d && g == ut * kd && K(kd) && in_parabolic(ut);
        // x2 < 0, main integral: P element times (2 1 4 3) times k, and (2 1 4 3) is in P
        M4 h = w0i * M4::elementary(1, 4, x2);
        M4 kf{{-1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {1 / x2, 0, 0, 1}};
        M4 pf = M4::elementary(2, 3, 1 / x2) * M4::diag({1, 1 / x2, x2, 1}) * permutation({2, 1, 4, 3});
        f = f && h == pf * kf && K(kf) && in_parabolic(pf);
      }
    }
  }
  out.push_back({"support: 1_4 in class n'+n, w0^{-1} in class 0 (the support)", cls, ""});
  out.push_back({"x3 >= 0: (1 0 0 0; 0 1 x3 0; ...) in K", a, ""});
  out.push_back({"x3 < 0: factorization through u(x3) t(x3)", b, ""});
  out.push_back({"x3 < 0: matrix with entry 1/x3 in K", b2, ""});
  out.push_back({"x2 >= 0, w0-twisted branch lies in K, class of 1_4: contributes 0", c, ""});
  out.push_back({"x2 < 0, w0-twisted branch in P K, class of 1_4: contributes 0", d, ""});
  out.push_back({"x2 >= 0, main branch: w0^{-1} times K, full mass", e, ""});
  out.push_back({"x2 < 0, main branch in P K, class of 1_4: contributes 0", f, ""});
  return out;
}

}  // namespace rankin

#endif
