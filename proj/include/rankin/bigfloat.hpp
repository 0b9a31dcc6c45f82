#ifndef RANKIN_BIGFLOAT_HPP
#define RANKIN_BIGFLOAT_HPP

// Arbitrary precision real/complex layer on MPFR (through Boost.Multiprecision).
// Precision is counted in decimal digits; every computation runs at the
// caller's digits plus guard_digits.

#include <boost/multiprecision/mpfr.hpp>
#include <gmpxx.h>

#include <cmath>
#include <ios>
#include <mutex>
#include <string>
#include <vector>

namespace rankin {

using Real = boost::multiprecision::mpfr_float;

inline constexpr unsigned guard_digits = 15;

// Sets the default MPFR precision for the current thread and restores it.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits) : saved_(Real::default_precision()) {
    Real::default_precision(digits);
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

inline Real real_from(const mpq_class& q) {
  Real r;
  mpfr_set_q(r.backend().data(), q.get_mpq_t(), MPFR_RNDN);
  return r;
}

inline Real real_from(const mpz_class& z) {
  Real r;
  mpfr_set_z(r.backend().data(), z.get_mpz_t(), MPFR_RNDN);
  return r;
}

inline Real real_pi() {
  Real r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

inline Real pow10(long e) { return boost::multiprecision::pow(Real(10), e); }

// log10 |x| as a double; -inf for zero.
inline double log10_abs(const Real& x) {
  if (x == 0) return -INFINITY;
  long e;
  double m = mpfr_get_d_2exp(&e, x.backend().data(), MPFR_RNDN);
  return std::log10(std::fabs(m)) + static_cast<double>(e) * std::log10(2.0);
}

inline std::string to_sci(const Real& x, int digits) {
  return x.str(digits, std::ios_base::scientific);
}

struct Cx {
  Real re, im;
  Cx() : re(0), im(0) {}
  Cx(Real r) : re(std::move(r)), im(0) {}
  Cx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

  Cx& operator+=(const Cx& o) { re += o.re; im += o.im; return *this; }
  Cx& operator-=(const Cx& o) { re -= o.re; im -= o.im; return *this; }
  Cx& operator*=(const Cx& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Cx& operator*=(const Real& s) { re *= s; im *= s; return *this; }
  Cx& operator/=(const Cx& o) {
    Real d = o.re * o.re + o.im * o.im;
    Real r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = std::move(r);
    return *this;
  }
  Cx& operator/=(const Real& s) { re /= s; im /= s; return *this; }
};

inline Cx operator+(Cx a, const Cx& b) { return a += b; }
inline Cx operator-(Cx a, const Cx& b) { return a -= b; }
inline Cx operator*(Cx a, const Cx& b) { return a *= b; }
inline Cx operator*(Cx a, const Real& s) { return a *= s; }
inline Cx operator/(Cx a, const Cx& b) { return a /= b; }
inline Cx operator/(Cx a, const Real& s) { return a /= s; }
inline Cx operator-(const Cx& a) { return Cx(-a.re, -a.im); }
inline Cx conj(const Cx& a) { return Cx(a.re, -a.im); }
inline Real abs(const Cx& a) { return boost::multiprecision::hypot(a.re, a.im); }

inline Cx cx_exp(const Cx& z) {
  Real m = boost::multiprecision::exp(z.re);
  return Cx(m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im));
}

// principal branch
inline Cx cx_log(const Cx& z) {
  return Cx(boost::multiprecision::log(abs(z)), boost::multiprecision::atan2(z.im, z.re));
}

// Deterministic pairwise summation; the result is independent of how the
// terms were produced as long as their order is fixed.
template <class T>
T pairwise_sum(const std::vector<T>& v, size_t lo, size_t hi) {
  if (hi <= lo) return T(Real(0));
  if (hi - lo == 1) return v[lo];
  if (hi - lo <= 8) {
    T s = v[lo];
    for (size_t i = lo + 1; i < hi; ++i) s += v[i];
    return s;
  }
  size_t mid = lo + (hi - lo) / 2;
  T a = pairwise_sum(v, lo, mid);
  a += pairwise_sum(v, mid, hi);
  return a;
}

template <class T>
T pairwise_sum(const std::vector<T>& v) { return pairwise_sum(v, 0, v.size()); }

// Bernoulli numbers B_0..B_n (B_1 = -1/2), exact; cached.
inline const std::vector<mpq_class>& bernoulli_table(size_t n) {
  static std::mutex mu;
  static std::vector<mpq_class> table;
  std::lock_guard<std::mutex> lock(mu);
  if (table.size() <= n) {
    size_t m = std::max(n + 1, table.size() * 2);
    // Akiyama-Tanigawa gives B_1 = +1/2; sign fixed below.
    std::vector<mpq_class> a(m);
    table.assign(m, 0);
    for (size_t i = 0; i < m; ++i) {
      a[i] = mpq_class(1, i + 1);
      for (size_t j = i; j >= 1; --j) {
        a[j - 1] = mpq_class(j) * (a[j - 1] - a[j]);
        a[j - 1].canonicalize();
      }
      table[i] = a[0];
    }
    if (m > 1) table[1] = mpq_class(-1, 2);
  }
  return table;
}

inline mpq_class bernoulli(size_t n) { return bernoulli_table(n)[n]; }

// Gamma(z) for Re z > 0 by the Stirling series after an upward shift.
inline Cx cx_gamma(const Cx& z) {
  const unsigned digits = Real::default_precision();
  const double R = 0.4 * digits + 10.0;
  Cx w = z;
  Cx prod(Real(1));
  while (boost::multiprecision::hypot(w.re, w.im) < R || w.re < R / 2) {
    prod *= w;
    w.re += 1;
  }
  Cx lw = cx_log(w);
  Cx s = (w - Cx(Real(0.5))) * lw - w;
  s.re += boost::multiprecision::log(2 * real_pi()) / 2;
  Cx winv = Cx(Real(1)) / w;
  Cx winv2 = winv * winv;
  Cx pw = winv;
  Real eps = pow10(-static_cast<long>(digits) - 5);
  for (size_t n = 1;; ++n) {
    mpq_class c = bernoulli(2 * n) / mpq_class(2 * n * (2 * n - 1));
    Cx term = pw * real_from(c);
    s += term;
    if (abs(term) < eps) break;
    if (n > 4 * digits) break;
    pw *= winv2;
  }
  return cx_exp(s) / prod;
}

}  // namespace rankin

#endif
