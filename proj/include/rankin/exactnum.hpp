#ifndef RANKIN_EXACTNUM_HPP
#define RANKIN_EXACTNUM_HPP

// Exact arithmetic: rationals, quadratic fields Q(sqrt d0), prime ideals above
// rational primes and reduction to residue fields.

#include <gmpxx.h>

#include <climits>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rankin/bigfloat.hpp"
#include "rankin/errors.hpp"

namespace rankin {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(const Int& n, const Int& d) {
  if (d == 0) throw InvalidInput("zero denominator");
  Rat r(n, d);
  r.canonicalize();
  return r;
}

// v_p of a nonzero integer / rational; LONG_MAX for zero.
inline long vp(const Int& n, unsigned long p) {
  if (n == 0) return LONG_MAX;
  Int t = abs(n);
  long v = 0;
  while (mpz_divisible_ui_p(t.get_mpz_t(), p)) {
    mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), p);
    ++v;
  }
  return v;
}

inline long vp(const Rat& x, unsigned long p) {
  if (x == 0) return LONG_MAX;
  return vp(Int(x.get_num()), p) - vp(Int(x.get_den()), p);
}

inline Int ipow(const Int& b, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

inline Rat rpow(const Rat& b, long e) {
  if (e >= 0) return Rat(ipow(b.get_num(), e), ipow(b.get_den(), e));
  if (b == 0) throw InvalidInput("0 to a negative power");
  Rat r(ipow(b.get_den(), -e), ipow(b.get_num(), -e));
  r.canonicalize();
  return r;
}

inline bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<long> prime_factors(long n) {
  std::vector<long> ps;
  if (n < 0) n = -n;
  for (long d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      ps.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) ps.push_back(n);
  return ps;
}

inline std::vector<long> primes_upto(long n) {
  std::vector<char> sieve(n + 1 > 2 ? n + 1 : 2, 1);
  std::vector<long> ps;
  for (long i = 2; i <= n; ++i) {
    if (!sieve[i]) continue;
    ps.push_back(i);
    for (long j = i * i; j <= n; j += i) sieve[j] = 0;
  }
  return ps;
}

inline long kronecker(const Int& a, long n) {
  return mpz_kronecker_si(a.get_mpz_t(), n);
}

// d = d0 * f^2 with d0 squarefree.
inline std::pair<long, long> quad_normalize(long d) {
  if (d == 0) throw InvalidInput("quad_normalize: d = 0");
  long sign = d < 0 ? -1 : 1;
  unsigned long m = static_cast<unsigned long>(d < 0 ? -d : d);
  unsigned long f = 1;
  for (unsigned long p = 2; p * p <= m; ++p) {
    while (m % (p * p) == 0) {
      m /= p * p;
      f *= p;
    }
  }
  return {sign * static_cast<long>(m), static_cast<long>(f)};
}

inline bool is_squarefree(long d) {
  return d != 0 && quad_normalize(d).second == 1;
}

// Q(sqrt d0); d0 = 1 stands for Q itself.
struct QuadField {
  long d0 = 1;

  QuadField() = default;
  explicit QuadField(long d) : d0(d) {
    if (d != 1 && (d == 0 || !is_squarefree(d)))
      throw InvalidInput("QuadField: d0 must be squarefree and != 0 (got " + std::to_string(d) + ")");
  }
  static QuadField rational() { return QuadField(); }
  static QuadField from_disc(long disc) {
    if (disc == 0 || disc == 1) return QuadField();
    return QuadField(quad_normalize(disc).first);
  }

  bool is_rational() const { return d0 == 1; }
  long disc() const {
    if (is_rational()) return 1;
    long r = ((d0 % 4) + 4) % 4;
    return r == 1 ? d0 : 4 * d0;
  }
  // ring generator omega of O_F: sqrt d0, or (1 + sqrt d0)/2 when d0 = 1 mod 4.
  bool half_integral() const { return !is_rational() && ((d0 % 4) + 4) % 4 == 1; }
  // minimal polynomial of omega: x^2 - T x + Nm
  Int omega_trace() const { return half_integral() ? 1 : 0; }
  Int omega_norm() const { return half_integral() ? Int((1 - d0) / 4) : Int(-d0); }

  bool operator==(const QuadField& o) const { return d0 == o.d0; }
  bool operator!=(const QuadField& o) const { return d0 != o.d0; }

  std::string name() const {
    return is_rational() ? "Q" : "Q(sqrt(" + std::to_string(d0) + "))";
  }
};

// Smallest field containing both (the compositum must stay at most quadratic).
inline QuadField join(const QuadField& a, const QuadField& b) {
  if (a.is_rational()) return b;
  if (b.is_rational() || a == b) return a;
  throw Unsupported("compositum of " + a.name() + " and " + b.name() + " has degree 4");
}

// a + b sqrt(d0)
struct AlgNum {
  QuadField field;
  Rat a = 0, b = 0;

  AlgNum() = default;
  AlgNum(long v) : a(v) {}
  AlgNum(const Int& v) : a(v) {}
  AlgNum(const Rat& v) : a(v) {}
  AlgNum(QuadField f, Rat a_, Rat b_ = 0) : field(f), a(std::move(a_)), b(std::move(b_)) {
    if (field.is_rational() && b != 0) throw InvalidInput("AlgNum: b != 0 over Q");
  }

  static AlgNum sqrt_d0(QuadField f) { return AlgNum(f, 0, 1); }

  bool is_zero() const { return a == 0 && b == 0; }
  bool is_rational() const { return b == 0; }

  AlgNum in(const QuadField& f) const {
    QuadField g = join(field, f);
    return AlgNum(g, a, b);
  }

  AlgNum conj() const { return AlgNum(field, a, -b); }
  Rat norm() const { return a * a - Rat(field.d0) * b * b; }
  Rat trace() const { return 2 * a; }

  AlgNum& operator+=(const AlgNum& o) {
    field = join(field, o.field);
    a += o.a;
    b += o.b;
    return *this;
  }
  AlgNum& operator-=(const AlgNum& o) {
    field = join(field, o.field);
    a -= o.a;
    b -= o.b;
    return *this;
  }
  AlgNum& operator*=(const AlgNum& o) {
    field = join(field, o.field);
    if (b == 0 && o.b == 0) {
      a *= o.a;
      return *this;
    }
    Rat na = a * o.a + Rat(field.d0) * b * o.b;
    Rat nb = a * o.b + b * o.a;
    a = std::move(na);
    b = std::move(nb);
    return *this;
  }
  AlgNum inverse() const {
    if (is_zero()) throw InvalidInput("AlgNum: division by zero");
    Rat n = norm();
    return AlgNum(field, a / n, -b / n);
  }
  AlgNum& operator/=(const AlgNum& o) {
    if (o.b == 0) {
      if (o.a == 0) throw InvalidInput("AlgNum: division by zero");
      field = join(field, o.field);
      a /= o.a;
      b /= o.a;
      return *this;
    }
    return *this *= o.inverse();
  }
  AlgNum operator-() const { return AlgNum(field, -a, -b); }

  // coordinates in the integral basis (1, omega)
  std::pair<Rat, Rat> omega_coords() const {
    if (field.half_integral()) return {a - b, 2 * b};  // sqrt d0 = 2 omega - 1
    return {a, b};
  }

  // Complex embedding: sqrt(d0) -> +i sqrt|d0| for d0 < 0, positive root otherwise.
  Cx embed() const {
    Real ra = real_from(a);
    if (b == 0) return Cx(ra);
    Real s = boost::multiprecision::sqrt(Real(field.d0 < 0 ? -field.d0 : field.d0));
    Real rb = real_from(b) * s;
    if (field.d0 < 0) return Cx(ra, rb);
    return Cx(ra + rb);
  }

  std::string str() const {
    std::ostringstream os;
    if (b == 0) {
      os << a.get_str();
    } else {
      os << a.get_str() << (b < 0 ? " - " : " + ") << Rat(abs(b)).get_str() << "*sqrt(" << field.d0 << ")";
    }
    return os.str();
  }
};

inline AlgNum operator+(AlgNum x, const AlgNum& y) { return x += y; }
inline AlgNum operator-(AlgNum x, const AlgNum& y) { return x -= y; }
inline AlgNum operator*(AlgNum x, const AlgNum& y) { return x *= y; }
inline AlgNum operator/(AlgNum x, const AlgNum& y) { return x /= y; }
inline bool operator==(const AlgNum& x, const AlgNum& y) {
  if (x.a != y.a || x.b != y.b) return false;
  return x.b == 0 || x.field == y.field;
}
inline bool operator!=(const AlgNum& x, const AlgNum& y) { return !(x == y); }
inline std::ostream& operator<<(std::ostream& os, const AlgNum& x) { return os << x.str(); }

inline AlgNum pow(const AlgNum& x, unsigned long e) {
  AlgNum r(1), base = x;
  r.field = x.field;
  while (e) {
    if (e & 1) r *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return r;
}

enum class PrimeKind { split, inert, ramified };

inline const char* kind_name(PrimeKind k) {
  switch (k) {
    case PrimeKind::split: return "split";
    case PrimeKind::inert: return "inert";
    default: return "ramified";
  }
}

// Element of the residue field F_l[omega]/(g) (degree 2) or F_l (degree 1).
struct Residue {
  long l = 2;
  int degree = 1;
  Int c0 = 0, c1 = 0;   // c0 + c1 * omega
  Int T = 0, Nm = 0;    // g(x) = x^2 - T x + Nm mod l, degree 2 only

  void reduce() {
    Int L(l);
    c0 = ((c0 % L) + L) % L;
    c1 = ((c1 % L) + L) % L;
  }
  bool is_zero() const { return c0 == 0 && c1 == 0; }
  bool operator==(const Residue& o) const { return l == o.l && degree == o.degree && c0 == o.c0 && c1 == o.c1; }
  bool operator!=(const Residue& o) const { return !(*this == o); }
  Residue operator+(const Residue& o) const {
    Residue r = *this;
    r.c0 += o.c0;
    r.c1 += o.c1;
    r.reduce();
    return r;
  }
  Residue operator*(const Residue& o) const {
    Residue r = *this;
    if (degree == 1) {
      r.c0 = c0 * o.c0;
    } else {
      // omega^2 = T omega - Nm
      Int w2 = c1 * o.c1;
      r.c0 = c0 * o.c0 - Nm * w2;
      r.c1 = c0 * o.c1 + c1 * o.c0 + T * w2;
    }
    r.reduce();
    return r;
  }
  std::string str() const {
    if (degree == 1) return c0.get_str();
    return c0.get_str() + " + " + c1.get_str() + "*w";
  }
};

struct PrimeIdeal {
  QuadField field;
  long l = 2;
  PrimeKind kind = PrimeKind::inert;
  AlgNum generator2;   // P = (l, generator2); zero for inert
  int residue_degree = 1;
  Int root = 0;        // root r of g mod l with omega -> r (split, ramified)

  int ramification() const { return kind == PrimeKind::ramified ? 2 : 1; }
  Int residue_size() const { return ipow(Int(l), residue_degree); }

  std::string str() const {
    std::ostringstream os;
    os << "P(" << l << ", " << kind_name(kind);
    if (kind != PrimeKind::inert) os << ", " << generator2.str();
    os << ") in " << field.name();
    return os.str();
  }
};

inline Int mod_pos(const Int& a, const Int& m) {
  Int r = a % m;
  if (r < 0) r += m;
  return r;
}

// Roots of g(x) = x^2 - T x + Nm modulo l (brute force; l is small here).
inline std::vector<Int> quad_roots_mod(const Int& T, const Int& Nm, long l) {
  std::vector<Int> roots;
  for (long x = 0; x < l; ++x) {
    Int v = Int(x) * x - T * x + Nm;
    if (mod_pos(v, Int(l)) == 0) roots.push_back(Int(x));
  }
  return roots;
}

inline std::vector<PrimeIdeal> factor_rational_prime(long l, const QuadField& F) {
  if (!is_prime(l)) throw InvalidInput("factor_rational_prime: " + std::to_string(l) + " is not prime");
  if (F.is_rational()) {
    PrimeIdeal P;
    P.field = F;
    P.l = l;
    P.kind = PrimeKind::split;  // unique prime, degree 1
    P.residue_degree = 1;
    P.generator2 = AlgNum(0);
    return {P};
  }
  long k = kronecker(Int(F.disc()), l);
  Int T = F.omega_trace(), Nm = F.omega_norm();
  // omega as AlgNum
  AlgNum omega = F.half_integral() ? AlgNum(F, Rat(1, 2), Rat(1, 2)) : AlgNum(F, 0, 1);
  std::vector<PrimeIdeal> out;
  if (k == -1) {
    PrimeIdeal P;
    P.field = F;
    P.l = l;
    P.kind = PrimeKind::inert;
    P.residue_degree = 2;
    P.generator2 = AlgNum(0);
    out.push_back(P);
    return out;
  }
  auto roots = quad_roots_mod(T, Nm, l);
  if (k == 0) {
    if (roots.size() != 1) throw IntegrityError("ramified prime without a double root");
  } else if (roots.size() != 2) {
    throw IntegrityError("split prime without two roots");
  }
  for (const auto& r : roots) {
    PrimeIdeal P;
    P.field = F;
    P.l = l;
    P.kind = k == 0 ? PrimeKind::ramified : PrimeKind::split;
    P.residue_degree = 1;
    P.root = r;
    P.generator2 = omega - AlgNum(Rat(r)).in(F);
    out.push_back(P);
  }
  return out;
}

namespace detail {

// Lift a simple root r of g mod l to a root mod l^K (Newton).
inline Int hensel_root(const Int& T, const Int& Nm, long l, const Int& r, long K) {
  Int mod = ipow(Int(l), K);
  Int x = r;
  for (long prec = 1; prec < K; prec *= 2) {
    Int g = x * x - T * x + Nm;
    Int dg = 2 * x - T;
    Int inv;
    if (mpz_invert(inv.get_mpz_t(), dg.get_mpz_t(), mod.get_mpz_t()) == 0)
      throw IntegrityError("hensel: derivative not invertible");
    x = mod_pos(x - g * inv, mod);
  }
  // a final correction guards against the doubling overshoot
  for (int it = 0; it < 2; ++it) {
    Int g = x * x - T * x + Nm;
    Int dg = 2 * x - T;
    Int inv;
    mpz_invert(inv.get_mpz_t(), dg.get_mpz_t(), mod.get_mpz_t());
    x = mod_pos(x - g * inv, mod);
  }
  return x;
}

// x = (A + B omega) / D with integers A, B, D > 0.
struct IntegralForm {
  Int A, B, D;
};

inline IntegralForm integral_form(const AlgNum& x) {
  auto [alpha, beta] = x.omega_coords();
  Int D = lcm(Int(alpha.get_den()), Int(beta.get_den()));
  Rat As = alpha * Rat(D), Bs = beta * Rat(D);
  return {Int(As.get_num()), Int(Bs.get_num()), D};
}

}  // namespace detail

inline constexpr long valuation_infinity = LONG_MAX;

// v_P(x); valuation_infinity for x = 0.
inline long valuation(const AlgNum& x, const PrimeIdeal& P) {
  if (x.is_zero()) return valuation_infinity;
  if (!x.is_rational() && x.field != P.field)
    throw InvalidInput("valuation: element and prime live in different fields");
  if (x.is_rational()) return vp(x.a, P.l) * P.ramification();
  const long l = P.l;
  switch (P.kind) {
    case PrimeKind::ramified:
      return vp(x.norm(), l);
    case PrimeKind::inert:
      return vp(x.norm(), l) / 2;
    case PrimeKind::split: {
      auto f = detail::integral_form(x);
      Rat nrm = Rat(f.A) * f.A + Rat(P.field.omega_trace()) * f.A * f.B + Rat(P.field.omega_norm()) * f.B * f.B;
      long K = vp(nrm, l) + 2;
      Int rho = detail::hensel_root(P.field.omega_trace(), P.field.omega_norm(), l, P.root, K);
      Int img = f.A + f.B * rho;
      Int mod = ipow(Int(l), K);
      img = mod_pos(img, mod);
      long v = img == 0 ? K : vp(img, l);
      return v - vp(f.D, l);
    }
  }
  return 0;
}

inline Residue residue_reduce(const AlgNum& x, const PrimeIdeal& P) {
  Residue res;
  res.l = P.l;
  res.degree = P.residue_degree;
  if (res.degree == 2) {
    res.T = P.field.omega_trace();
    res.Nm = P.field.omega_norm();
  }
  if (x.is_zero()) return res;
  long v = valuation(x, P);
  if (v < 0) throw NotIntegral(v, x.str() + " at " + P.str());
  const Int L(P.l);
  auto inv_mod = [&](const Int& d) {
    Int inv;
    if (mpz_invert(inv.get_mpz_t(), d.get_mpz_t(), L.get_mpz_t()) == 0)
      throw IntegrityError("residue_reduce: unexpected l in denominator");
    return inv;
  };
  auto red = [&](const Rat& q) { return mod_pos(Int(q.get_num()) * inv_mod(Int(q.get_den())), L); };
  if (x.is_rational() && (P.kind != PrimeKind::split || P.field.is_rational())) {
    res.c0 = red(x.a);
    return res;
  }
  auto [alpha, beta] = x.omega_coords();
  switch (P.kind) {
    case PrimeKind::inert:
      res.c0 = red(alpha);
      res.c1 = red(beta);
      return res;
    case PrimeKind::ramified:
      // x = (alpha + beta r) + beta (omega - r), omega - r a uniformizer
      res.c0 = red(alpha + beta * Rat(P.root));
      return res;
    case PrimeKind::split: {
      auto f = detail::integral_form(x);
      long e = vp(f.D, P.l);
      Int rho = detail::hensel_root(P.field.omega_trace(), P.field.omega_norm(), P.l, P.root, e + 2);
      Int mod = ipow(L, e + 2);
      Int img = mod_pos(f.A + f.B * rho, mod);
      Int le = ipow(L, e);
      if (!mpz_divisible_p(img.get_mpz_t(), le.get_mpz_t())) throw IntegrityError("residue_reduce: lift inconsistent");
      img /= le;
      Int Dp = f.D / le;
      res.c0 = mod_pos(img * inv_mod(Dp), L);
      return res;
    }
  }
  return res;
}

}  // namespace rankin

#endif
