#ifndef RANKIN_CONGRUENCE_HPP
#define RANKIN_CONGRUENCE_HPP

// Coefficientwise congruences mod a prime ideal, Sturm bounds, the Eisenstein
// screen and the excluded prime sets.

#include <optional>
#include <string>
#include <vector>

#include "rankin/forms.hpp"

namespace rankin {

// Index of Gamma_0(N) in SL_2(Z).
inline Int gamma0_index(long N) {
  Int mu = N;
  for (long p : prime_factors(N)) mu = mu / p * (p + 1);
  return mu;
}

inline long sturm_bound(long k, long N) {
  if (k < 1 || N < 1) throw InvalidInput("sturm_bound: k, N must be positive");
  Int num = Int(k) * gamma0_index(N);
  Int q = (num + 11) / 12;
  return q.get_si();
}

struct CongruenceReport {
  std::string form1, form2;
  PrimeIdeal prime;
  long bound_used = 0;
  bool congruent = true;
  std::optional<long> first_failure;
  std::optional<std::string> eisenstein_alarm;
};

inline bool same_character(const DirichletChar& a, const DirichletChar& b) {
  long M = std::lcm(a.modulus, b.modulus);
  for (long r = 0; r < M; ++r)
    if (a(r) != b(r)) return false;
  return true;
}

inline CongruenceReport check_congruent(const NewformData& h1, const NewformData& h2, const PrimeIdeal& P,
                                        long n_extra = 0) {
  if (h1.weight != h2.weight || h1.level != h2.level || !same_character(h1.chi, h2.chi))
    throw InvalidInput("check_congruent: forms must share weight, level and character");
  CongruenceReport r;
  r.form1 = h1.label;
  r.form2 = h2.label;
  r.prime = P;
  r.bound_used = std::max(sturm_bound(h1.weight, h1.level), n_extra);
  long avail = std::min(h1.n_max, h2.n_max);
  if (r.bound_used > avail)
    throw InsufficientData("check_congruent: need coefficients up to " + std::to_string(r.bound_used), r.bound_used);
  for (long n = 1; n <= r.bound_used; ++n) {
    for (const NewformData* h : {&h1, &h2}) {
      long v = valuation(h->a(n), P);
      if (v < 0) throw NotIntegral(v, h->label + " at n = " + std::to_string(n));
    }
    AlgNum d = h1.a(n) - h2.a(n);
    if (!d.is_zero() && valuation(d, P) < 1) {
      r.congruent = false;
      r.first_failure = n;
      break;
    }
  }
  return r;
}

// Depth of the Eisenstein comparison: the constant term is left out, so the
// q-series h - E + c_E is only a mod-l form after multiplying by E_{l-1} = 1
// (mod l); the bound is taken at weight k + l - 1 as well.
inline long eisenstein_screen_depth(long k, long N, long l) {
  return std::max(sturm_bound(k, N), sturm_bound(k + l - 1, N));
}

// Returns the Eisenstein label when a(n, h) = a(n, E) mod P for 1 <= n <= depth.
inline std::optional<std::string> eisenstein_screen(const NewformData& h, const PrimeIdeal& P) {
  bool odd_k = h.weight % 2 != 0;
  if ((h.chi.parity == Parity::odd) != odd_k) return std::nullopt;
  long depth = eisenstein_screen_depth(h.weight, h.level, P.l);
  if (depth > h.n_max) throw InsufficientData("eisenstein_screen: need coefficients up to " + std::to_string(depth), depth);
  EisensteinData E = eisenstein_qexp(h.weight, h.chi, depth);
  for (long n = 1; n <= depth; ++n) {
    if (valuation(h.a(n), P) < 0) return std::nullopt;
    AlgNum d = h.a(n) - E.a(n);
    if (!d.is_zero() && valuation(d, P) < 1) return std::nullopt;
  }
  return E.label;
}

struct ExcludedPrimes {
  std::vector<long> S_weight, S_level;
};

inline ExcludedPrimes excluded_primes(long k, long kp, long N, long Np) {
  if (k < 1 || kp < 1 || N < 1 || Np < 1) throw InvalidInput("excluded_primes: arguments must be positive");
  ExcludedPrimes e;
  e.S_weight = primes_upto(std::max(k, kp));
  e.S_level = prime_factors(N * Np);
  return e;
}

}  // namespace rankin

#endif
