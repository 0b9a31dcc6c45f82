#ifndef RANKIN_FORMS_HPP
#define RANKIN_FORMS_HPP

// Dirichlet characters, q-expansions of eigenforms and Eisenstein series.

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rankin/exactnum.hpp"

namespace rankin {

enum class Parity { even, odd };

struct DirichletChar {
  long modulus = 1;
  std::vector<AlgNum> table;  // table[r] for 0 <= r < modulus, zero off the units
  Parity parity = Parity::even;

  static DirichletChar trivial(long N = 1) {
    DirichletChar c;
    c.modulus = N;
    c.table.assign(N, AlgNum(0));
    for (long r = 0; r < N; ++r)
      if (std::gcd(r, N) == 1) c.table[r] = AlgNum(1);
    if (N == 1) c.table[0] = AlgNum(1);
    return c;
  }

  AlgNum operator()(long n) const {
    long r = ((n % modulus) + modulus) % modulus;
    return table[r];
  }
  AlgNum operator()(const Int& n) const {
    Int r = mod_pos(n, Int(modulus));
    return table[r.get_si()];
  }

  bool is_trivial() const {
    for (long r = 0; r < modulus; ++r)
      if (std::gcd(r, modulus) == 1 && table[r] != AlgNum(1)) return false;
    return true;
  }

  QuadField value_field() const {
    QuadField f;
    for (const auto& v : table) f = join(f, v.field);
    return f;
  }

  // Complex conjugate, which is the inverse on roots of unity.
  DirichletChar inverse() const {
    DirichletChar c = *this;
    for (auto& v : c.table) v = v.conj();
    return c;
  }

  // Verifies multiplicativity and the recorded parity.
  void validate() const {
    if (modulus < 1 || static_cast<long>(table.size()) != modulus) throw InvalidInput("character table has wrong size");
    for (long a = 0; a < modulus; ++a) {
      bool unit = std::gcd(a, modulus) == 1;
      if (!unit && !table[a].is_zero()) throw IntegrityError("character nonzero off the units at " + std::to_string(a));
      if (unit && table[a].is_zero()) throw IntegrityError("character vanishes at unit " + std::to_string(a));
      for (long b = 0; b < modulus && unit; ++b) {
        if (std::gcd(b, modulus) != 1) continue;
        if ((*this)(a * b) != table[a] * table[b])
          throw IntegrityError("character not multiplicative at (" + std::to_string(a) + "," + std::to_string(b) + ")");
      }
    }
    AlgNum m1 = (*this)(-1);
    Parity p = m1 == AlgNum(1) ? Parity::even : Parity::odd;
    if (m1 != AlgNum(1) && m1 != AlgNum(-1)) throw IntegrityError("chi(-1) is not +-1");
    if (p != parity) throw IntegrityError("parity does not match chi(-1)");
  }
};

// chi * psi on the lcm of the moduli.
inline DirichletChar char_product(const DirichletChar& x, const DirichletChar& y) {
  long M = std::lcm(x.modulus, y.modulus);
  DirichletChar c;
  c.modulus = M;
  c.table.resize(M);
  for (long r = 0; r < M; ++r) c.table[r] = x(r) * y(r);
  if (M == 1) c.table[0] = AlgNum(1);
  c.parity = (x.parity == y.parity) ? Parity::even : Parity::odd;
  return c;
}

inline bool is_fundamental_discriminant(long D) {
  if (D == 1) return true;
  long r = ((D % 4) + 4) % 4;
  if (r == 1) return is_squarefree(D);
  if (r != 0) return false;
  long m = D / 4;
  long rm = ((m % 4) + 4) % 4;
  return (rm == 2 || rm == 3) && is_squarefree(m);
}

inline DirichletChar char_from_kronecker(long D) {
  if (!is_fundamental_discriminant(D)) throw InvalidInput("not a fundamental discriminant: " + std::to_string(D));
  if (D == 1) return DirichletChar::trivial(1);
  long N = D < 0 ? -D : D;
  DirichletChar c;
  c.modulus = N;
  c.table.resize(N);
  for (long a = 0; a < N; ++a) c.table[a] = AlgNum(std::gcd(a, N) == 1 ? kronecker(Int(D), a) : 0);
  c.parity = D < 0 ? Parity::odd : Parity::even;
  return c;
}

struct NewformData {
  long level = 1;
  long weight = 2;
  DirichletChar chi = DirichletChar::trivial(1);
  std::vector<AlgNum> coeffs;  // coeffs[n] = a(n), coeffs[0] unused
  long n_max = 0;
  std::string label;
  bool is_eigenform = true;
  QuadField field;

  const AlgNum& a(long n) const {
    if (n < 1 || n > n_max) throw InsufficientData(label + ": coefficient a(" + std::to_string(n) + ") not available", n);
    return coeffs[n];
  }

  void recompute_field() {
    QuadField f;
    for (long n = 1; n <= n_max; ++n) f = join(f, coeffs[n].field);
    f = join(f, chi.value_field());
    field = f;
    for (long n = 1; n <= n_max; ++n)
      if (!coeffs[n].is_rational()) coeffs[n].field = f;
  }
};

struct EisensteinData : NewformData {
  AlgNum constant_term;
};

inline std::vector<long> divisors(long n) {
  std::vector<long> small, large;
  for (long d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    small.push_back(d);
    if (d * d != n) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

// Bernoulli polynomial B_k(x).
inline Rat bernoulli_poly(unsigned k, const Rat& x) {
  Rat s = 0;
  Int binom = 1;
  for (unsigned j = 0; j <= k; ++j) {
    s += Rat(binom) * bernoulli(j) * rpow(x, static_cast<long>(k - j));
    binom = binom * (k - j) / (j + 1);
  }
  return s;
}

// B_{k,chi} = f^{k-1} sum_{a=1}^{f} chi(a) B_k(a/f), f = modulus.
inline AlgNum generalized_bernoulli(unsigned k, const DirichletChar& chi) {
  long f = chi.modulus;
  AlgNum s(0);
  for (long a = 1; a <= f; ++a) {
    AlgNum c = chi(a);
    if (c.is_zero()) continue;
    s += c * AlgNum(bernoulli_poly(k, Rat(a, f)));
  }
  return s * AlgNum(Rat(ipow(Int(f), k - 1)));
}

inline EisensteinData eisenstein_qexp(long k, const DirichletChar& chi, long n_max) {
  if (k < 1) throw InvalidInput("eisenstein_qexp: weight must be >= 1");
  bool odd_k = k % 2 != 0;
  if ((chi.parity == Parity::odd) != odd_k) throw InvalidInput("eisenstein_qexp: parity of chi does not match the weight");
  EisensteinData e;
  e.level = chi.modulus;
  e.weight = k;
  e.chi = chi;
  e.n_max = n_max;
  e.coeffs.assign(n_max + 1, AlgNum(0));
  e.label = "E" + std::to_string(k) + "_chi" + std::to_string(chi.modulus);
  e.is_eigenform = true;
  for (long n = 1; n <= n_max; ++n) {
    AlgNum s(0);
    for (long d : divisors(n)) {
      AlgNum c = chi(d);
      if (c.is_zero()) continue;
      s += c * AlgNum(ipow(Int(d), k - 1));
    }
    e.coeffs[n] = s;
  }
  // L(1 - k, chi) / 2 = -B_{k,chi} / (2k)
  e.constant_term = generalized_bernoulli(k, chi) * AlgNum(Rat(-1, 2 * k));
  e.recompute_field();
  return e;
}

namespace detail {

// prod_{n>=1} (1 - q^n) up to q^n_max (pentagonal number theorem)
inline std::vector<std::pair<long, int>> euler_product_terms(long n_max) {
  std::vector<std::pair<long, int>> t;
  for (long j = 0;; ++j) {
    bool hit = false;
    long g1 = j * (3 * j - 1) / 2, g2 = j * (3 * j + 1) / 2;
    int sign = (j % 2) ? -1 : 1;
    if (g1 <= n_max) { t.push_back({g1, sign}); hit = true; }
    if (j > 0 && g2 <= n_max) { t.push_back({g2, sign}); hit = true; }
    if (!hit) break;
  }
  return t;
}

// g^m for sparse g with g(0) = 1 through n f_n = sum_j ((m+1) j - n) g_j f_{n-j}
inline std::vector<Int> sparse_power(const std::vector<std::pair<long, int>>& g, long m, long n_max) {
  std::vector<Int> f(n_max + 1, 0);
  f[0] = 1;
  for (long n = 1; n <= n_max; ++n) {
    Int s = 0;
    for (auto [j, c] : g) {
      if (j == 0 || j > n) continue;
      s += Int((m + 1) * j - n) * c * f[n - j];
    }
    f[n] = s / n;
  }
  return f;
}

inline std::vector<Int> delta_qexp(long n_max) {
  auto g = euler_product_terms(n_max);
  auto f = sparse_power(g, 24, n_max);
  std::vector<Int> d(n_max + 1, 0);
  for (long n = 1; n <= n_max; ++n) d[n] = f[n - 1];
  return d;
}

// normalized level-one E_j (E_0 = 1), j even
inline std::vector<Rat> level_one_eisenstein(long j, long n_max) {
  std::vector<Rat> e(n_max + 1, 0);
  e[0] = 1;
  if (j == 0) return e;
  Rat c = Rat(-2 * j) / bernoulli(j);
  for (long n = 1; n <= n_max; ++n) {
    Int s = 0;
    for (long d : divisors(n)) s += ipow(Int(d), j - 1);
    e[n] = c * Rat(s);
  }
  return e;
}

}  // namespace detail

// Fills a(n) for 2 <= n <= n_target from a(p), p prime, via the Hecke relations.
inline void hecke_fill(std::vector<AlgNum>& a, long level, long weight, const DirichletChar& chi, long n_target) {
  std::vector<long> spf(n_target + 1, 0);
  for (long i = 2; i <= n_target; ++i)
    if (!spf[i])
      for (long j = i; j <= n_target; j += i)
        if (!spf[j]) spf[j] = i;
  a[1] = AlgNum(1);
  for (long n = 2; n <= n_target; ++n) {
    long p = spf[n];
    long m = n, e = 0;
    while (m % p == 0) { m /= p; ++e; }
    if (m != 1) {
      a[n] = a[n / m] * a[m];
      continue;
    }
    if (e == 1) continue;  // prime: given
    AlgNum chip = level % p == 0 ? AlgNum(0) : chi(p);
    AlgNum c = chip * AlgNum(ipow(Int(p), weight - 1));
    a[n] = a[p] * a[n / p] - c * a[n / (p * p)];
  }
}

// Extends prime data to all n <= n_target.  Prime coefficients are read from h.
inline NewformData hecke_extend(const NewformData& h, long n_target) {
  for (long p : primes_upto(n_target)) {
    if (p > h.n_max) throw InsufficientData(h.label + ": missing prime data a(" + std::to_string(p) + ")", p);
  }
  NewformData r = h;
  r.coeffs.assign(n_target + 1, AlgNum(0));
  for (long p : primes_upto(n_target)) r.coeffs[p] = h.coeffs[p];
  hecke_fill(r.coeffs, h.level, h.weight, h.chi, n_target);
  r.n_max = n_target;
  r.recompute_field();
  return r;
}

// Same, with the prime data supplied as a map p -> a(p).
inline NewformData hecke_extend(long level, long weight, const DirichletChar& chi,
                                const std::map<long, AlgNum>& prime_data, long n_target,
                                const std::string& label = "") {
  NewformData r;
  r.level = level;
  r.weight = weight;
  r.chi = chi;
  r.label = label;
  r.coeffs.assign(n_target + 1, AlgNum(0));
  for (long p : primes_upto(n_target)) {
    auto it = prime_data.find(p);
    if (it == prime_data.end())
      throw InsufficientData(label + ": missing prime data a(" + std::to_string(p) + ")", p);
    r.coeffs[p] = it->second;
  }
  hecke_fill(r.coeffs, level, weight, chi, n_target);
  r.n_max = n_target;
  r.recompute_field();
  return r;
}

inline bool delta_family_weight(long k) {
  return k == 12 || k == 16 || k == 18 || k == 20 || k == 22 || k == 26;
}

// Unique normalized cuspform of level one and weight k = Delta * E_{k-12}.
// Coefficients at primes come from the product; the rest from hecke_extend.
inline NewformData delta_family_qexp(long k, long n_max) {
  if (!delta_family_weight(k)) throw InvalidInput("delta_family_qexp: unsupported weight " + std::to_string(k));
  auto d = detail::delta_qexp(n_max);
  auto e = detail::level_one_eisenstein(k - 12, n_max);
  NewformData h;
  h.level = 1;
  h.weight = k;
  h.chi = DirichletChar::trivial(1);
  h.label = "1." + std::to_string(k) + ".a.a";
  h.coeffs.assign(n_max + 1, AlgNum(0));
  if (n_max >= 1) {
    for (long p : primes_upto(n_max)) {
      Rat s = 0;
      for (long j = 1; j <= p; ++j) s += Rat(d[j]) * e[p - j];
      h.coeffs[p] = AlgNum(s);
    }
    hecke_fill(h.coeffs, 1, k, h.chi, n_max);
  }
  h.n_max = n_max;
  h.recompute_field();
  return h;
}

// Full product Delta * E_{k-12} without Hecke theory; used as a cross-check.
inline std::vector<Rat> delta_family_product(long k, long n_max) {
  auto d = detail::delta_qexp(n_max);
  auto e = detail::level_one_eisenstein(k - 12, n_max);
  std::vector<Rat> out(n_max + 1, 0);
  for (long n = 1; n <= n_max; ++n)
    for (long j = 1; j <= n; ++j) out[n] += Rat(d[j]) * e[n - j];
  return out;
}

inline NewformData conjugate_form(const NewformData& h) {
  NewformData r = h;
  for (long n = 1; n <= h.n_max; ++n) r.coeffs[n] = h.coeffs[n].conj();
  r.chi = h.chi.inverse();
  r.label = h.label + "^rho";
  return r;
}

// First (m1, m2) coprime with a(m1 m2) != a(m1) a(m2), or nullopt.
inline std::optional<std::pair<long, long>> multiplicativity_failure(const NewformData& h, long up_to = -1) {
  long n_lim = up_to < 0 ? h.n_max : std::min(up_to, h.n_max);
  for (long n = 2; n <= n_lim; ++n) {
    for (long m1 = 2; m1 * m1 <= n; ++m1) {
      if (n % m1) continue;
      long m2 = n / m1;
      if (std::gcd(m1, m2) != 1) continue;
      if (h.coeffs[n] != h.coeffs[m1] * h.coeffs[m2]) return std::make_pair(m1, m2);
    }
  }
  return std::nullopt;
}

// First p with a(p^{r+1}) != a(p) a(p^r) - chi(p) p^{k-1} a(p^{r-1}), p not dividing N.
inline std::optional<long> hecke_recursion_failure(const NewformData& h) {
  for (long p : primes_upto(h.n_max)) {
    if (h.level % p == 0) continue;
    AlgNum c = h.chi(p) * AlgNum(ipow(Int(p), h.weight - 1));
    for (long q = p; q * p <= h.n_max; q *= p) {
      AlgNum prev = q == p ? AlgNum(1) : h.coeffs[q / p];
      if (h.coeffs[q * p] != h.coeffs[p] * h.coeffs[q] - c * prev) return q * p;
    }
  }
  return std::nullopt;
}

// |iota a(p)| <= 2 p^{(k-1)/2} for all primes p <= n_max, at the given precision.
inline std::optional<long> deligne_failure(const NewformData& h, unsigned digits = 30) {
  PrecisionScope ps(digits);
  for (long p : primes_upto(h.n_max)) {
    Real bound = 2 * boost::multiprecision::pow(Real(p), Real(h.weight - 1) / 2);
    Real v = abs(h.coeffs[p].embed());
    if (v > bound * (1 + pow10(-static_cast<long>(digits) + 5))) return p;
  }
  return std::nullopt;
}

}  // namespace rankin

#endif
