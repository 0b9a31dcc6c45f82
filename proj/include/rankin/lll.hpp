#ifndef RANKIN_LLL_HPP
#define RANKIN_LLL_HPP

// LLL reduction of small integer lattices with exact rational Gram-Schmidt.

#include <vector>

#include "rankin/exactnum.hpp"

namespace rankin {

using IntVec = std::vector<Int>;

inline Rat dot(const std::vector<Rat>& a, const std::vector<Rat>& b) {
  Rat s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Rows of B are the basis; reduced in place (delta = 3/4).
inline void lll_reduce(std::vector<IntVec>& B, const Rat& delta = Rat(3, 4)) {
  const size_t n = B.size();
  if (n == 0) return;
  const size_t d = B[0].size();
  auto to_rat = [&](const IntVec& v) {
    std::vector<Rat> r(d);
    for (size_t i = 0; i < d; ++i) r[i] = v[i];
    return r;
  };
  std::vector<std::vector<Rat>> Bs(n);
  std::vector<std::vector<Rat>> mu(n, std::vector<Rat>(n, 0));
  std::vector<Rat> nb(n);
  auto gso = [&]() {
    for (size_t i = 0; i < n; ++i) {
      Bs[i] = to_rat(B[i]);
      for (size_t j = 0; j < i; ++j) {
        mu[i][j] = nb[j] == 0 ? Rat(0) : dot(to_rat(B[i]), Bs[j]) / nb[j];
        for (size_t t = 0; t < d; ++t) Bs[i][t] -= mu[i][j] * Bs[j][t];
      }
      nb[i] = dot(Bs[i], Bs[i]);
    }
  };
  gso();
  size_t k = 1;
  long guard = 0;
  while (k < n) {
    if (++guard > 100000) throw ConvergenceViolation("lll_reduce: no convergence");
    for (size_t jj = k; jj-- > 0;) {
      Rat m = mu[k][jj];
      // nearest integer
      Int q = m.get_num() * 2 + m.get_den();
      Int den2 = m.get_den() * 2;
      mpz_fdiv_q(q.get_mpz_t(), q.get_mpz_t(), den2.get_mpz_t());
      if (q != 0) {
        for (size_t t = 0; t < d; ++t) B[k][t] -= q * B[jj][t];
        for (size_t t = 0; t <= jj; ++t) mu[k][t] -= Rat(q) * (t == jj ? Rat(1) : mu[jj][t]);
      }
    }
    if (nb[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * nb[k - 1]) {
      ++k;
    } else {
      std::swap(B[k], B[k - 1]);
      gso();
      k = std::max<size_t>(k - 1, 1);
    }
  }
}

}  // namespace rankin

#endif
