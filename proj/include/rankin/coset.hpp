#ifndef RANKIN_COSET_HPP
#define RANKIN_COSET_HPP

// Double cosets P(Q_p) \ GL_4(Q_p) / K_p^n for the (2,2) parabolic P and the
// mirahoric K_p^n (last row = (0,0,0,1) mod p^n). Entries are exact
// rationals; every membership test reads off p-adic valuations.

#include <array>
#include <climits>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rankin/exactnum.hpp"

namespace rankin {

template <int N>
struct Mat {
  std::array<Rat, N * N> e{};

  Mat() = default;
  Mat(std::initializer_list<std::initializer_list<Rat>> rows) {
    int i = 0;
    for (const auto& r : rows) {
      int j = 0;
      for (const auto& x : r) e[i * N + j++] = x;
      ++i;
    }
  }
  static Mat identity() {
    Mat m;
    for (int i = 0; i < N; ++i) m(i, i) = 1;
    return m;
  }
  // 1-based elementary matrix 1 + x E_ij
  static Mat elementary(int i, int j, const Rat& x) {
    Mat m = identity();
    m(i - 1, j - 1) += x;
    return m;
  }
  static Mat diag(const std::array<Rat, N>& d) {
    Mat m;
    for (int i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }
  Rat& operator()(int i, int j) { return e[i * N + j]; }
  const Rat& operator()(int i, int j) const { return e[i * N + j]; }
  // 1-based access, matching printed matrices
  const Rat& at(int i, int j) const { return e[(i - 1) * N + (j - 1)]; }

  bool operator==(const Mat& o) const { return e == o.e; }
  bool operator!=(const Mat& o) const { return !(*this == o); }

  Mat operator*(const Mat& o) const {
    Mat r;
    for (int i = 0; i < N; ++i)
      for (int k = 0; k < N; ++k) {
        if ((*this)(i, k) == 0) continue;
        for (int j = 0; j < N; ++j) r(i, j) += (*this)(i, k) * o(k, j);
      }
    return r;
  }

  Rat det() const {
    Mat a = *this;
    Rat d = 1;
    for (int c = 0; c < N; ++c) {
      int piv = -1;
      for (int r = c; r < N; ++r)
        if (a(r, c) != 0) {
          piv = r;
          break;
        }
      if (piv < 0) return 0;
      if (piv != c) {
        for (int j = 0; j < N; ++j) std::swap(a(c, j), a(piv, j));
        d = -d;
      }
      d *= a(c, c);
      for (int r = c + 1; r < N; ++r) {
        if (a(r, c) == 0) continue;
        Rat f = a(r, c) / a(c, c);
        for (int j = c; j < N; ++j) a(r, j) -= f * a(c, j);
      }
    }
    return d;
  }

  Mat inverse() const {
    Mat a = *this, inv = identity();
    for (int c = 0; c < N; ++c) {
      int piv = -1;
      for (int r = c; r < N; ++r)
        if (a(r, c) != 0) {
          piv = r;
          break;
        }
      if (piv < 0) throw InvalidInput("Mat::inverse: singular matrix");
      for (int j = 0; j < N; ++j) {
        std::swap(a(c, j), a(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
      Rat f = a(c, c);
      for (int j = 0; j < N; ++j) {
        a(c, j) /= f;
        inv(c, j) /= f;
      }
      for (int r = 0; r < N; ++r) {
        if (r == c || a(r, c) == 0) continue;
        Rat g = a(r, c);
        for (int j = 0; j < N; ++j) {
          a(r, j) -= g * a(c, j);
          inv(r, j) -= g * inv(c, j);
        }
      }
    }
    return inv;
  }

  std::string str() const {
    std::string s = "[";
    for (int i = 0; i < N; ++i) {
      s += i ? "; " : "";
      for (int j = 0; j < N; ++j) s += (j ? " " : "") + (*this)(i, j).get_str();
    }
    return s + "]";
  }
};

using M4 = Mat<4>;
using M2 = Mat<2>;

// ---- membership predicates -------------------------------------------------

inline bool integral_at(const Rat& x, long p) { return x == 0 || vp(x, p) >= 0; }
inline bool divisible(const Rat& x, long p, long n) { return x == 0 || vp(x, p) >= n; }

template <int N>
inline bool in_GL_Zp(const Mat<N>& g, long p) {
  for (const auto& x : g.e)
    if (!integral_at(x, p)) return false;
  Rat d = g.det();
  return d != 0 && vp(d, p) == 0;
}

inline bool in_iwahori(const M4& g, long p) {
  if (!in_GL_Zp(g, p)) return false;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j)
      if (!divisible(g(i, j), p, 1)) return false;
  return true;
}

// K_p^n: g in GL_4(Z_p), g = (*; 0 0 0 1) mod p^n
inline bool in_mirahoric(const M4& g, long p, long n) {
  if (!in_GL_Zp(g, p)) return false;
  for (int j = 0; j < 3; ++j)
    if (!divisible(g(3, j), p, n)) return false;
  return divisible(g(3, 3) - 1, p, n);
}

// GL_2 level K_p(n): (* *; 0 1) mod p^n
inline bool in_K2(const M2& g, long p, long n) {
  return in_GL_Zp(g, p) && divisible(g(1, 0), p, n) && divisible(g(1, 1) - 1, p, n);
}

// P(Q_p): invertible with vanishing lower-left 2x2 block
inline bool in_parabolic(const M4& g) {
  for (int i = 2; i < 4; ++i)
    for (int j = 0; j < 2; ++j)
      if (g(i, j) != 0) return false;
  return g.det() != 0;
}

// U_P^-(Z_p): (1 0; C 1) with C integral
inline bool in_opposite_unipotent(const M4& g, long p) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      bool lower = i >= 2 && j < 2;
      if (lower) {
        if (!integral_at(g(i, j), p)) return false;
      } else if (g(i, j) != (i == j ? 1 : 0)) {
        return false;
      }
    }
  return true;
}

inline std::pair<M2, M2> levi_blocks(const M4& g) {
  return {M2{{g(0, 0), g(0, 1)}, {g(1, 0), g(1, 1)}}, M2{{g(2, 2), g(2, 3)}, {g(3, 2), g(3, 3)}}};
}

// ---- distinguished elements -------------------------------------------------

inline Rat ppow(long p, long e) { return rpow(Rat(p), e); }

// xi_p^{(j)}: identity with p^j at (4,2)
inline M4 xi(long p, long j) { return M4::elementary(4, 2, ppow(p, j)); }

// (1 0 0 0; 0 1 0 0; x y 1 0; z w 0 1)
inline M4 lower_unipotent(const Rat& x, const Rat& y, const Rat& z, const Rat& w) {
  return M4{{1, 0, 0, 0}, {0, 1, 0, 0}, {x, y, 1, 0}, {z, w, 0, 1}};
}

inline M4 permutation(const std::array<int, 4>& col_of_row) {
  M4 m;
  for (int i = 0; i < 4; ++i) m(i, col_of_row[i] - 1) = 1;
  return m;
}

// w_1 ... w_6 in the printed order
inline std::vector<M4> kostant_reps() {
  return {permutation({1, 2, 3, 4}), permutation({1, 3, 2, 4}), permutation({2, 3, 1, 4}),
          permutation({1, 4, 2, 3}), permutation({2, 4, 1, 3}), permutation({3, 4, 1, 2})};
}

// w^{-1} alpha > 0 for the simple Levi roots e1 - e2 and e3 - e4; for a
// permutation matrix w^{-1} e_i = e_{c(i)} with c(i) the column of the 1 in row i.
inline bool kostant_condition(const M4& w) {
  std::array<int, 4> c{};
  for (int i = 0; i < 4; ++i) {
    int found = -1;
    for (int j = 0; j < 4; ++j) {
      if (w(i, j) == 1) {
        if (found >= 0) throw InvalidInput("kostant_condition: not a permutation matrix");
        found = j;
      } else if (w(i, j) != 0) {
        throw InvalidInput("kostant_condition: not a permutation matrix");
      }
    }
    if (found < 0) throw InvalidInput("kostant_condition: not a permutation matrix");
    c[i] = found;
  }
  return c[0] < c[1] && c[2] < c[3];
}

// ---- reduction of unipotents ------------------------------------------------

struct CosetClass {
  long j = 0;        // u in P xi^{(j)} K
  M4 rep;            // xi^{(j)}
  M4 left, right;    // u = left * rep * right, left in P(Q_p), right in K_p^n
  std::vector<std::string> steps;
};

// Follows the three factorization steps for u = (1 0; (x y; z w) 1) with
// v(z), v(w) > 0 and returns the class with a witness that is re-verified.
inline CosetClass reduce_unipotent(const M4& u, long p, long n_prime, long n) {
  if (!is_prime(p)) throw InvalidInput("reduce_unipotent: p must be prime");
  if (n_prime < 0 || n < 0) throw InvalidInput("reduce_unipotent: levels must be >= 0");
  const long L = n_prime + n;
  if (!in_opposite_unipotent(u, p)) throw PreconditionError("reduce_unipotent: u is not in U_P^-(Z_p)");
  const char* names[] = {"x", "y", "z", "w"};
  for (int k = 2; k < 4; ++k) {
    const Rat& v = u(3, k - 2);
    if (v != 0 && vp(v, p) <= 0)
      throw PreconditionError(std::string("reduce_unipotent: need v_p(") + names[k] + ") > 0, got " + std::to_string(vp(v, p)));
  }

  CosetClass out;
  M4 Lf = M4::identity(), Rf = M4::identity();
  Rat x = u(2, 0), y = u(2, 1), z = u(3, 0), w = u(3, 1);
  auto v = [p](const Rat& a) { return vp(a, p); };

  // arrange v(z) >= v(w) and w != 0 by the swap of e1, e2 (in P and in K)
  if (z != 0 && (w == 0 || v(z) < v(w))) {
    M4 S = permutation({2, 1, 3, 4});
    Lf = Lf * S;
    Rf = S * Rf;
    std::swap(x, y);
    std::swap(z, w);
    out.steps.push_back("swap");
  }
  if (z != 0) {
    long d = v(z) - v(w);
    Rat pd = ppow(p, d);
    M4 D{{w / z * pd, 0, 0, 0}, {-pd, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    M4 B = M4::elementary(2, 1, pd);
    M4 C = M4::diag({z / w / pd, 1, 1, 1});
    Lf = Lf * D;
    Rf = B * C * Rf;
    x = (x * w / z - y) * pd;
    z = 0;
    out.steps.push_back("clear z");
  }
  if (y != 0) {
    long e = v(y);
    Rat pe = ppow(p, e);
    M4 D = M4::diag({1, pe / y, 1, 1});
    M4 E = M4::elementary(3, 2, pe);
    M4 C = M4::diag({1, y / pe, 1, 1});
    Lf = Lf * D;
    Rf = E * C * Rf;
    w = w * pe / y;
    y = 0;
    out.steps.push_back("clear y");
  }
  if (x != 0) {
    Rf = M4::elementary(3, 1, x) * Rf;
    x = 0;
    out.steps.push_back("clear x");
  }
  // remaining: 1 + w E_42
  long j = L;
  if (w != 0) {
    long e = v(w);
    Rat unit = w / ppow(p, e);
    Lf = Lf * M4::diag({1, 1 / unit, 1, 1});
    Rf = M4::diag({1, unit, 1, 1}) * Rf;
    if (e <= L) {
      j = e;
    } else {
      Rf = M4::elementary(4, 2, ppow(p, e) - ppow(p, L)) * Rf;
    }
  } else {
    Rf = xi(p, L).inverse() * Rf;
  }
  out.j = j;
  out.rep = xi(p, j);
  out.left = Lf;
  out.right = Rf;
  if (out.left * out.rep * out.right != u || !in_parabolic(out.left) || !in_mirahoric(out.right, p, L))
    throw IntegrityError("reduce_unipotent: witness failed to verify for " + u.str());
  return out;
}

// Class of g in GL_4(Z_p) by the invariant min(v(r_1), v(r_2), n), r the last
// row of g^{-1}; P(Z_p) acts on r through the (2,2) block structure.
inline long coset_invariant(const M4& g, long p, long level) {
  if (!in_GL_Zp(g, p)) throw PreconditionError("coset_invariant: g must lie in GL_4(Z_p)");
  M4 gi = g.inverse();
  long a = std::min(vp(gi(3, 0), p), vp(gi(3, 1), p));
  return std::min(a, level);
}

// Orbits of P(Z/p^n) on primitive row vectors of (Z/p^n)^4 by exhaustive
// search; g K^n corresponds to the last row of g^{-1} mod p^n.
class CosetOracle {
 public:
  CosetOracle(long p, long n) : p_(p), n_(n) {
    if (!is_prime(p) || n < 1) throw InvalidInput("CosetOracle: need p prime, n >= 1");
    q_ = 1;
    for (long i = 0; i < n; ++i) q_ *= p;
    long size = q_ * q_ * q_ * q_;
    if (size > 2000000) throw Unsupported("CosetOracle: (Z/p^n)^4 too large to enumerate");
    parent_.resize(size);
    std::iota(parent_.begin(), parent_.end(), 0L);
    std::vector<std::array<long, 16>> gens;
    auto ident = [] {
      std::array<long, 16> m{};
      for (int i = 0; i < 4; ++i) m[i * 5] = 1;
      return m;
    };
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        if (i == j || (i >= 2 && j < 2)) continue;
        auto m = ident();
        m[i * 4 + j] = 1;
        gens.push_back(m);
      }
    for (long u = 1; u < q_; ++u) {
      if (u % p == 0) continue;
      for (int i = 0; i < 4; ++i) {
        auto m = ident();
        m[i * 5] = u;
        gens.push_back(m);
      }
    }
    for (long idx = 0; idx < size; ++idx) {
      auto vec = decode(idx);
      if (!primitive(vec)) continue;
      for (const auto& g : gens) {
        std::array<long, 4> r{};
        for (int j = 0; j < 4; ++j) {
          long s = 0;
          for (int i = 0; i < 4; ++i) s += vec[i] * g[i * 4 + j];
          r[j] = s % q_;
        }
        unite(idx, encode(r));
      }
    }
    for (long idx = 0; idx < size; ++idx)
      if (primitive(decode(idx)) && find(idx) == idx) ++orbits_;
  }

  long orbit_count() const { return orbits_; }

  // orbit id of g in GL_4(Z_p)
  long orbit_of(const M4& g) {
    if (!in_GL_Zp(g, p_)) throw PreconditionError("CosetOracle: g must lie in GL_4(Z_p)");
    M4 gi = g.inverse();
    std::array<long, 4> r{};
    for (int j = 0; j < 4; ++j) r[j] = reduce(gi(3, j));
    return find(encode(r));
  }

 private:
  long reduce(const Rat& x) const {
    Int m(q_);
    Int num = x.get_num() % m, den = x.get_den() % m;
    Int inv;
    if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t()) == 0) throw InvalidInput("CosetOracle: entry not p-integral");
    Int r = (num * inv) % m;
    if (r < 0) r += m;
    return r.get_si();
  }
  std::array<long, 4> decode(long idx) const {
    std::array<long, 4> v{};
    for (int i = 3; i >= 0; --i) {
      v[i] = idx % q_;
      idx /= q_;
    }
    return v;
  }
  long encode(const std::array<long, 4>& v) const {
    long idx = 0;
    for (int i = 0; i < 4; ++i) idx = idx * q_ + v[i];
    return idx;
  }
  bool primitive(const std::array<long, 4>& v) const {
    for (long x : v)
      if (x % p_ != 0) return true;
    return false;
  }
  long find(long a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(long a, long b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

  long p_, n_, q_ = 1, orbits_ = 0;
  std::vector<long> parent_;
};

// ---- Levi projections -------------------------------------------------------

struct LeviLevel {
  long first = 0, second = 0;  // K_p(first) x K_p(second)
};

inline LeviLevel levi_projection_level(long i, long n_prime, long n) {
  if (n_prime < 0 || n < 0 || i < 0 || i > n_prime + n)
    throw InvalidInput("levi_projection_level: need 0 <= i <= n' + n");
  return {n_prime + n - i, i};
}

// m = (a B; 0 b) with kappa(m) = (a, b) and xi^{-1} m xi in K_p^L, for
// a in K_p(L - i), b in K_p(i).
inline M4 levi_lift(const M2& a, const M2& b, long p, long i) {
  Rat pi = ppow(p, i);
  return M4{{a(0, 0), a(0, 1), 0, 0},
            {a(1, 0), a(1, 1), b(1, 0) / pi, (b(1, 1) - 1) / pi},
            {0, 0, b(0, 0), b(0, 1)},
            {0, 0, b(1, 0), b(1, 1)}};
}

struct LeviCheck {
  long forward_samples = 0, forward_ok = 0;
  long lift_samples = 0, lift_ok = 0;
  long rejected = 0;
  bool ok() const { return forward_ok == forward_samples && lift_ok == lift_samples && forward_samples > 0; }
};

// Sampled containment in both directions for K^{M_P}(xi^{(i)}).
inline LeviCheck levi_projection_check(long p, long n_prime, long n, long i, long samples, uint64_t seed) {
  const long L = n_prime + n;
  auto lv = levi_projection_level(i, n_prime, n);
  std::mt19937_64 rng(seed);
  const long range = 4 * p * p;
  std::uniform_int_distribution<long> d(-range, range);
  LeviCheck c;
  const M4 X = xi(p, i), Xi = X.inverse();
  Rat pi = ppow(p, i);
  // forward: k in K with xi k xi^{-1} in P. The five entries forced by the
  // (3,1), (3,2), (4,1), (4,2), (4,3) positions are solved for, then membership
  // is checked by multiplication.
  while (c.forward_samples < samples) {
    M4 k;
    for (auto& x : k.e) x = d(rng);
    k(3, 3) = 1 + ppow(p, L) * d(rng);
    k(1, 0) = k(1, 0) * ppow(p, L - i);
    k(1, 2) = k(1, 2) * ppow(p, L - i);
    k(1, 1) = k(3, 3) + k(1, 3) * pi + ppow(p, L - i) * d(rng);
    k(2, 0) = 0;
    k(2, 1) = k(2, 3) * pi;
    k(3, 0) = -k(1, 0) * pi;
    k(3, 2) = -k(1, 2) * pi;
    k(3, 1) = (k(1, 3) * pi + k(3, 3)) * pi - k(1, 1) * pi;
    if (!in_mirahoric(k, p, L)) {
      ++c.rejected;
      continue;
    }
    M4 g = X * k * Xi;
    if (!in_parabolic(g)) throw IntegrityError("levi_projection_check: conjugate left P for " + k.str());
    ++c.forward_samples;
    auto [a, b] = levi_blocks(g);
    if (in_K2(a, p, lv.first) && in_K2(b, p, lv.second)) ++c.forward_ok;
  }
  // backward: random (a, b) in K_p(L - i) x K_p(i) lift into P cap xi K xi^{-1}
  while (c.lift_samples < samples) {
    M2 a{{d(rng), d(rng)}, {ppow(p, L - i) * d(rng), 1 + ppow(p, L - i) * d(rng)}};
    M2 b{{d(rng), d(rng)}, {pi * d(rng), 1 + pi * d(rng)}};
    if (!in_K2(a, p, lv.first) || !in_K2(b, p, lv.second)) {
      ++c.rejected;
      continue;
    }
    ++c.lift_samples;
    M4 m = levi_lift(a, b, p, i);
    auto [a2, b2] = levi_blocks(m);
    if (in_parabolic(m) && a2 == a && b2 == b && in_mirahoric(Xi * m * X, p, L)) ++c.lift_ok;
  }
  return c;
}

// ---- printed identities -----------------------------------------------------

struct IdentityCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

namespace detail {

inline Rat random_nonzero_rat(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-50, 50), den(1, 30);
  long a = 0;
  while (a == 0) a = num(rng);
  return make_rat(a, den(rng));
}

// vol(m2 box m1^{-1}) / vol(box) for diagonal m1, m2, box a product of
// p^{e_ij} Z_p over the positions in `mask`
inline Rat conjugated_box_ratio(const M2& m1, const M2& m2, long p, const std::array<bool, 4>& mask) {
  // diagonal m1, m2: entry (i,j) scales by m2_i / m1_j
  Rat r = 1;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (!mask[i * 2 + j]) continue;
      Rat s = m2(i, i) / m1(j, j);
      r *= rpow(Rat(p), -vp(s, p));  // |s|_p
    }
  return r;
}

}  // namespace detail

// Exact checks of the printed coset identities: the w_4, w_5, w_6 relations,
// conjugation formulas, the reduction steps, the six block identities of the
// local computation, and the Levi conjugation factor on step functions.
inline std::vector<IdentityCheck> w6_identities_check(uint64_t seed = 1, int trials = 40) {
  std::vector<IdentityCheck> out;
  std::mt19937_64 rng(seed);
  auto R = [&] { return detail::random_nonzero_rat(rng); };
  auto W = kostant_reps();
  const M4 &w4 = W[3], &w5 = W[4], &w6 = W[5];
  auto add = [&](const std::string& name, bool ok, const std::string& detail = "") { out.push_back({name, ok, detail}); };
  auto in_K_all = [](const M4& k) {
    for (long p : {2L, 3L, 5L, 13L})
      for (long n = 0; n <= 4; ++n)
        if (!in_mirahoric(k, p, n)) return false;
    return true;
  };

  M4 pa = permutation({2, 3, 1, 4}), pb = permutation({1, 3, 2, 4});
  add("w4 = w6 * (0100;0010;1000;0001), factor in K", w4 == w6 * pa && in_K_all(pa));
  add("w5 = w6 * (1000;0010;0100;0001), factor in K", w5 == w6 * pb && in_K_all(pb));
  M4 A{{1, 0, 0, 0}, {0, -1, 0, 1}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  M4 B = M4::elementary(2, 4, -1), C = permutation({3, 2, 1, 4});
  M4 xi0 = M4::elementary(4, 2, 1);
  add("w6 = A xi^(0) B C with A in P and B, C in K", w6 == A * xi0 * B * C && in_parabolic(A) && in_K_all(B) && in_K_all(C));
  add("Kostant condition for w1..w6", std::all_of(W.begin(), W.end(), kostant_condition));

  bool conj_w6 = true, conj_xi = true, ui = true, step1 = true, step2 = true, step2_literal = true, step3 = true;
  for (int t = 0; t < trials; ++t) {
    M4 k;
    for (auto& x : k.e) x = R();
    M4 g = w6 * k * w6.inverse();
    M4 want{{k.at(3, 3), k.at(3, 4), k.at(3, 1), k.at(3, 2)},
            {k.at(4, 3), k.at(4, 4), k.at(4, 1), k.at(4, 2)},
            {k.at(1, 3), k.at(1, 4), k.at(1, 1), k.at(1, 2)},
            {k.at(2, 3), k.at(2, 4), k.at(2, 1), k.at(2, 2)}};
    conj_w6 = conj_w6 && g == want;

    long i = t % 4;
    for (long p : {2L, 3L}) {
      Rat q = ppow(p, i);
      M4 c = xi(p, i) * k * xi(p, i).inverse();
      M4 printed{{k.at(1, 1), -k.at(1, 4) * q + k.at(1, 2), k.at(1, 3), k.at(1, 4)},
                 {k.at(2, 1), -k.at(2, 4) * q + k.at(2, 2), k.at(2, 3), k.at(2, 4)},
                 {k.at(3, 1), -k.at(3, 4) * q + k.at(3, 2), k.at(3, 3), k.at(3, 4)},
                 {k.at(2, 1) * q + k.at(4, 1), -(k.at(2, 4) * q + k.at(4, 4)) * q + k.at(2, 2) * q + k.at(4, 2),
                  k.at(2, 3) * q + k.at(4, 3), k.at(2, 4) * q + k.at(4, 4)}};
      conj_xi = conj_xi && c == printed;
    }

    Rat x1 = R(), x2 = R(), x3 = R(), x4 = R();
    M4 u = lower_unipotent(x1, x2, x3, x4);
    std::vector<M4> printed_u = {
        M4{{1, 0, 0, 0}, {0, 1, 0, 0}, {x1, x2, 1, 0}, {x3, x4, 0, 1}},
        M4{{1, 0, 0, 0}, {x1, 1, x2, 0}, {0, 0, 1, 0}, {x3, 0, x4, 1}},
        M4{{1, x1, x2, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, x3, x4, 1}},
        M4{{1, 0, 0, 0}, {x1, 1, 0, x2}, {x3, 0, 1, x4}, {0, 0, 0, 1}},
        M4{{1, x1, 0, x2}, {0, 1, 0, 0}, {0, x3, 1, x4}, {0, 0, 0, 1}},
        M4{{1, 0, x1, x2}, {0, 1, x3, x4}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
    for (int r = 0; r < 6; ++r) ui = ui && W[r].inverse() * u * W[r] == printed_u[r];

    // reduction steps with p = 5 and integral x, y; v(z) >= v(w) > 0
    const long p = 5;
    std::uniform_int_distribution<long> small(1, 40), ex(1, 3);
    auto unit = [&] {
      long a = 0;
      while (a % p == 0) a = small(rng);
      return Rat(a);
    };
    Rat x = small(rng), y = unit() * ppow(p, ex(rng) - 1), w = unit() * ppow(p, ex(rng));
    Rat z = unit() * ppow(p, vp(w, p) + ex(rng) - 1);
    long d = vp(z, p) - vp(w, p);
    Rat pd = ppow(p, d);
    M4 F1{{w / z * pd, 0, 0, 0}, {-pd, 1, 0, 0}, {(x * w / z - y) * pd, y, 1, 0}, {0, w, 0, 1}};
    M4 F2 = M4::elementary(2, 1, pd), F3 = M4::diag({z / w / pd, 1, 1, 1});
    step1 = step1 && lower_unipotent(x, y, z, w) == F1 * F2 * F3 && in_mirahoric(F2, p, 3) && in_mirahoric(F3, p, 3);
    Rat xp = (x * w / z - y) * pd;
    long e = vp(y, p);
    Rat pe = ppow(p, e);
    M4 G1{{1, 0, 0, 0}, {0, pe / y, 0, 0}, {xp, 0, 1, 0}, {0, w / y * pe, 0, 1}};
    M4 G2 = M4::elementary(3, 2, pe), G3 = M4::diag({1, y / pe, 1, 1});
    step2 = step2 && M4{{1, 0, 0, 0}, {0, 1, 0, 0}, {xp, y, 1, 0}, {0, w, 0, 1}} == G1 * G2 * G3;
    // as printed, the (4,2) entry reads w y^{-1} v_p(y)
    M4 G1lit = G1;
    G1lit(3, 1) = w / y * e;
    step2_literal = step2_literal && M4{{1, 0, 0, 0}, {0, 1, 0, 0}, {xp, y, 1, 0}, {0, w, 0, 1}} == G1lit * G2 * G3;
    step3 = step3 && lower_unipotent(x, 0, 0, w) == M4::elementary(4, 2, w) * M4::elementary(3, 1, x);
  }
  add("w6 k w6^{-1} as printed", conj_w6);
  add("xi^(i) k xi^(i)^{-1} as printed", conj_xi);
  add("u_i = w_i^{-1} u w_i for i = 1..6 as printed", ui);
  add("reduction step clearing z", step1);
  add("reduction step clearing y, (4,2) entry w y^{-1} p^{v_p(y)}", step2);
  add("reduction step clearing y, (4,2) entry read literally as w y^{-1} v_p(y)", !step2_literal,
      "literal reading fails, as expected for the missing p^");
  add("final step (b 0; 0 c) = xi_c * (b 0; 0 0)", step3);

  // the six block identities in (a, b, c, d)
  bool blk[6] = {true, true, true, true, true, true};
  for (int t = 0; t < trials; ++t) {
    Rat a = R(), b = R(), c = R(), d = R();
    M4 D1 = M4::diag({1 / c, 1, 1, c}), U1 = M4::elementary(1, 4, 1 / c);
    M4 lhs1 = D1.inverse() * U1.inverse() * M4{{1, 0, 0, 0}, {0, 1, 0, 0}, {a, b, 1, 0}, {0, d, 0, 1}} * U1 * D1;
    M4 rhs1{{1, -d, 0, 0}, {0, 1, 0, 0}, {a / c, b, 1, a}, {0, d / c, 0, 1}};
    blk[0] = blk[0] && lhs1 == rhs1;
    blk[1] = blk[1] && rhs1 == M4{{1, -d, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, a}, {0, 0, 0, 1}} *
                                   M4{{1, 0, 0, 0}, {0, 1, 0, 0}, {a / c, b - a * d / c, 1, 0}, {0, d / c, 0, 1}};
    M4 D2 = M4::diag({1, 1 / d, 1, d}), U2 = M4::elementary(2, 4, 1 / d);
    M4 lhs3 = D2.inverse() * U2.inverse() * M4{{1, 0, 0, 0}, {0, 1, 0, 0}, {a, b, 1, 0}, {c, 0, 0, 1}} * U2 * D2;
    M4 rhs3{{1, 0, 0, 0}, {-c, 1, 0, 0}, {a, b / d, 1, b}, {c / d, 0, 0, 1}};
    blk[2] = blk[2] && lhs3 == rhs3;
    blk[3] = blk[3] && rhs3 == M4{{1, 0, 0, 0}, {-c, 1, 0, 0}, {0, 0, 1, b}, {0, 0, 0, 1}} *
                                   M4{{1, 0, 0, 0}, {0, 1, 0, 0}, {a - b * c / d, b / d, 1, 0}, {c / d, 0, 0, 1}};
    M4 D3 = M4::diag({1 / a, 1, a, 1}), U3 = M4::elementary(1, 3, 1 / a);
    M4 lhs5 = D3.inverse() * U3.inverse() * M4{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, b, 1, 0}, {c, d, 0, 1}} * U3 * D3;
    M4 rhs5{{1, -b, 0, 0}, {0, 1, 0, 0}, {0, b / a, 1, 0}, {c / a, d, c, 1}};
    blk[4] = blk[4] && lhs5 == rhs5;
    blk[5] = blk[5] && rhs5 == M4{{1, -b, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, c, 1}} *
                                   M4{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, b / a, 1, 0}, {c / a, -b * c / a + d, 0, 1}};
  }
  for (int r = 0; r < 6; ++r) add("block identity " + std::to_string(r + 1), blk[r]);

  // Levi conjugation on indicator functions of boxes in U_P^-: with the (4,1)
  // entry absent (the three-variable integrals) the factor is delta^{-1/2};
  // on all four entries it is delta^{-1}.
  bool half = true, full = true;
  for (int t = 0; t < trials; ++t) {
    const long p = 3;
    Rat s = ppow(p, t % 7 - 3) * (t % 2 ? 2 : 1);
    M2 m1{{1 / s, 0}, {0, 1}}, m2{{1, 0}, {0, s}};  // t(x_3) with x_3 = s
    Rat delta = rpow(Rat(p), -vp(m1.det(), p) * 2 + vp(m2.det(), p) * 2);  // |det m1|^2 |det m2|^{-2}
    // integrand f(t^{-1} u t): the set {u : t^{-1} u t in box} = t box t^{-1}
    Rat r3 = detail::conjugated_box_ratio(m1, m2, p, {true, true, false, true});
    Rat r4 = detail::conjugated_box_ratio(m1, m2, p, {true, true, true, true});
    // delta^{-1/2}: delta is an even power of p here
    long vd = vp(delta, p);
    half = half && vd % 2 == 0 && r3 == rpow(Rat(p), -vd / 2);
    full = full && r4 == rpow(Rat(p), -vd);
  }
  add("Levi conjugation factor delta^{-1/2} on three-variable step functions", half);
  add("Levi conjugation factor delta^{-1} on the full U_P^-", full);
  return out;
}

// ---- global representatives -------------------------------------------------

struct GlobalRep {
  std::map<long, long> i;  // p -> i_p
  long N_i = 1;            // prod p^{i_p}
  long N_sup = 1;          // N N' / N_i
  std::string label;       // "xi_f^(N)", "xi_f^(N')" or ""
  std::string levels() const { return "K_1(" + std::to_string(N_sup) + ") x K_1(" + std::to_string(N_i) + ")"; }
};

inline std::vector<GlobalRep> global_representatives(long N, long Np) {
  if (N < 1 || Np < 1) throw InvalidInput("global_representatives: N, N' >= 1");
  long NN = N * Np;
  auto ps = prime_factors(NN);
  std::vector<GlobalRep> out;
  std::vector<long> bound;
  for (long p : ps) bound.push_back(vp(Int(N), p) + vp(Int(Np), p));
  std::vector<long> cur(ps.size(), 0);
  std::function<void(size_t)> rec = [&](size_t k) {
    if (k == ps.size()) {
      GlobalRep g;
      bool isN = true, isNp = true;
      for (size_t t = 0; t < ps.size(); ++t) {
        g.i[ps[t]] = cur[t];
        for (long e = 0; e < cur[t]; ++e) g.N_i *= ps[t];
        isN = isN && cur[t] == vp(Int(N), ps[t]);
        isNp = isNp && cur[t] == vp(Int(Np), ps[t]);
      }
      g.N_sup = NN / g.N_i;
      if (isN) g.label = "xi_f^(N)";
      else if (isNp) g.label = "xi_f^(N')";
      if (isN && isNp) g.label = "xi_f^(N) = xi_f^(N')";
      out.push_back(g);
      return;
    }
    for (long v = 0; v <= bound[k]; ++v) {
      cur[k] = v;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace rankin

#endif
