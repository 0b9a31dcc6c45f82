#ifndef RANKIN_LVALUE_HPP
#define RANKIN_LVALUE_HPP

// Numerical values of the completed Rankin-Selberg L-function.
//
// Normalizations:
//   gamma(s)  = (2 pi)^{-2s} Gamma(s) Gamma(s + 1 - k)      (k = smaller weight)
//   L(s)      = gamma(s) L_f(s)                             (completed, used for ratios)
//   Lambda(s) = Q^{s/2} L(s) = eps Lambda~(W - s),  W = k + k' - 1
// so L(s) = eps X(s) L~(W - s) with X(s) = Q^{(W - 2s)/2}.
//
// Away from absolute convergence the smoothed approximate functional equation
//   Lambda(s) = sum b_n Q^{s/2} n^{-s} F_s(n / (A sqrt Q))
//             + eps sum conj(b_n) Q^{(W-s)/2} n^{s-W} F_{W-s}(n A / sqrt Q)
// is used, with F_s(x) = (1/2 pi i) int_{(c)} gamma(s + w) x^{-w} dw / w.
// eps is solved from two values of A; a third gives the error estimate.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "rankin/rankin.hpp"

namespace rankin {

namespace detail {

inline double log10_gamma_factor(double s, long k) {
  return (-2 * s * std::log(2 * M_PI) + std::lgamma(s) + std::lgamma(s + 1 - k)) / std::log(10.0);
}

// d_4(n) for n <= N, by three Dirichlet convolutions with 1.
inline std::vector<long> d4_table(long N) {
  std::vector<long> d(N + 1, 1), e(N + 1, 0);
  d[0] = 0;
  for (int r = 0; r < 3; ++r) {
    std::fill(e.begin(), e.end(), 0);
    for (long a = 1; a <= N; ++a)
      for (long m = a; m <= N; m += a) e[m] += d[a];
    std::swap(d, e);
  }
  return d;
}

inline Cx embed_at_precision(const AlgNum& x) { return x.embed(); }

}  // namespace detail

struct AfeKernelSpec {
  long k = 2, kp = 3;
  double c = 8;           // contour Re w = c
  double h = 0.25;        // trapezoid step
  double T = 0;           // truncation height, set when the node table is built
  unsigned P = 30;        // target digits
  unsigned work_digits = 60;
  double x_min = 0.1;     // smallest argument served
  long s_min = 2, s_max = 2;
  double weight_log10 = 0;  // largest log10 of the factor multiplying F_s / gamma(s)
};

// Parameter choice in double precision. The discretization error of the
// trapezoid rule on a strip of half-width d = c - 1 is about
// M exp(-2 pi d / h), with M the size of the integrand on the strip edges
// Re w = 1 and Re w = 2c - 1.
inline AfeKernelSpec make_kernel_spec(long k, long kp, unsigned P, double x_min, long s_min, long s_max,
                                      double weight_log10 = 0, double c = 0) {
  if (x_min <= 0) throw InvalidInput("make_kernel_spec: x_min must be positive");
  AfeKernelSpec sp;
  sp.k = k;
  sp.kp = kp;
  sp.P = P;
  sp.x_min = x_min;
  sp.s_min = s_min;
  sp.s_max = s_max;
  sp.weight_log10 = weight_log10;
  sp.c = c > 0 ? c : std::clamp(P / 7.0, 6.0, 20.0);
  if (s_min + 1 - k + sp.c <= 0 || sp.c <= 1)
    throw InvalidInput("make_kernel_spec: contour hits a pole of the Gamma factor");
  const double lx = std::max(0.0, -std::log10(x_min));
  double amp = 0, r_left = 0, r_right = 0;
  for (long s = s_min; s <= s_max; ++s) {
    double g = detail::log10_gamma_factor(s, k);
    amp = std::max(amp, detail::log10_gamma_factor(s + sp.c, k) - g);
    r_left = std::max(r_left, detail::log10_gamma_factor(s + 1, k) - g);
    r_right = std::max(r_right, detail::log10_gamma_factor(s + 2 * sp.c - 1, k) - g);
  }
  amp += sp.c * lx + std::max(0.0, weight_log10);
  r_left += lx;
  r_right += (2 * sp.c - 1) * lx;
  double target = P + 12 + std::max(0.0, weight_log10) + 2;
  double rm = std::max({r_left, r_right, 0.0});
  sp.h = 2 * M_PI * (sp.c - 1) / ((target + rm) * std::log(10.0));
  sp.work_digits = P + guard_digits + static_cast<unsigned>(std::ceil(amp)) + 5;
  return sp;
}

// Node table g_{s,j} = gamma(s + c + i j h) / (c + i j h) for s_min <= s <= s_max.
class KernelTable {
 public:
  explicit KernelTable(AfeKernelSpec spec) : spec_(std::move(spec)) { build(); }

  const AfeKernelSpec& spec() const { return spec_; }
  long nodes() const { return J_; }
  long s_count() const { return S_; }
  double log10_gamma(long s) const { return lg_[s - spec_.s_min]; }

  // F_s(x) for s = s_min..s_max. weight_log10 bounds log10 of the factor the
  // caller multiplies F_s / gamma(s) by; it sets the per-x truncation.
  std::vector<Real> eval(const Real& x, double weight_log10 = 0) const {
    if (x <= 0) throw InvalidInput("afe_kernel: x must be positive");
    PrecisionScope ps(spec_.work_digits);
    const Real c = spec_.c, h = spec_.h;
    Real lx = boost::multiprecision::log(x);
    Real xmc = boost::multiprecision::exp(-c * lx);
    double stop = -(double(spec_.P) + 12) - weight_log10 - log10_abs(xmc) - std::log10(spec_.h / M_PI);
    long J = std::upper_bound(env_.begin(), env_.end(), stop, std::greater<double>()) - env_.begin();
    J = std::min(std::max(J, 1L), J_);
    Real th = h * lx;
    Real wr = boost::multiprecision::cos(th), wi = -boost::multiprecision::sin(th);
    Real zr = 1, zi = 0, t1, t2, t3, t4, tmp;
    std::vector<Real> acc(S_);
    for (long si = 0; si < S_; ++si) acc[si] = Real(0);
    for (long j = 1; j < J; ++j) {
      mpfr_mul(t1.backend().data(), zr.backend().data(), wr.backend().data(), MPFR_RNDN);
      mpfr_mul(t2.backend().data(), zi.backend().data(), wi.backend().data(), MPFR_RNDN);
      mpfr_mul(t3.backend().data(), zr.backend().data(), wi.backend().data(), MPFR_RNDN);
      mpfr_mul(t4.backend().data(), zi.backend().data(), wr.backend().data(), MPFR_RNDN);
      mpfr_sub(zr.backend().data(), t1.backend().data(), t2.backend().data(), MPFR_RNDN);
      mpfr_add(zi.backend().data(), t3.backend().data(), t4.backend().data(), MPFR_RNDN);
      const Real* gr = &gre_[j * S_];
      const Real* gi = &gim_[j * S_];
      for (long si = 0; si < S_; ++si) {
        mpfr_fmms(tmp.backend().data(), gr[si].backend().data(), zr.backend().data(), gi[si].backend().data(),
                  zi.backend().data(), MPFR_RNDN);
        mpfr_add(acc[si].backend().data(), acc[si].backend().data(), tmp.backend().data(), MPFR_RNDN);
      }
    }
    Real pref = h / (2 * real_pi()) * xmc;
    std::vector<Real> out(S_);
    for (long si = 0; si < S_; ++si) out[si] = pref * (gre_[si] + 2 * acc[si]);
    return out;
  }

  Real eval_one(const Real& x, long s) const {
    if (s < spec_.s_min || s > spec_.s_max) throw InvalidInput("afe_kernel: s outside the table");
    return eval(x)[s - spec_.s_min];
  }

 private:
  void build() {
    const auto& sp = spec_;
    S_ = sp.s_max - sp.s_min + 1;
    if (S_ < 1) throw InvalidInput("KernelTable: empty s range");
    for (long s = sp.s_min; s <= sp.s_max; ++s) lg_.push_back(detail::log10_gamma_factor(s, sp.k));
    PrecisionScope ps(sp.work_digits);
    const long m_lo = sp.s_min + 1 - sp.k, m_hi = sp.s_max;
    const Real c = sp.c, h = sp.h;
    const Real l2pi = boost::multiprecision::log(2 * real_pi());
    std::vector<Real> base(S_);
    for (long si = 0; si < S_; ++si) base[si] = boost::multiprecision::exp(-2 * (sp.s_min + si + c) * l2pi);
    const double stop = -(double(sp.P) + 12) - sp.weight_log10 + sp.c * std::log10(sp.x_min) - std::log10(sp.h / M_PI);
    double run = INFINITY;
    std::vector<Cx> G(m_hi - m_lo + 1);
    for (long j = 0;; ++j) {
      if (j > 400000) throw ConvergenceViolation("KernelTable: truncation not reached");
      Real t = h * j;
      Cx w(c, t);
      G[0] = cx_gamma(Cx(Real(m_lo) + c, t));
      for (long m = m_lo; m < m_hi; ++m) G[m - m_lo + 1] = G[m - m_lo] * Cx(Real(m) + c, t);
      Cx phase = cx_exp(Cx(Real(0), -2 * t * l2pi));
      double env = -INFINITY;
      for (long si = 0; si < S_; ++si) {
        long s = sp.s_min + si;
        Cx g = G[s - m_lo] * G[s + 1 - sp.k - m_lo] * phase * base[si] / w;
        env = std::max(env, std::max(log10_abs(g.re), log10_abs(g.im)) + 0.31 - lg_[si]);
        gre_.push_back(g.re);
        gim_.push_back(g.im);
      }
      run = std::min(run, env);
      env_.push_back(run);
      if (j >= 1 && run < stop) {
        J_ = j + 1;
        break;
      }
    }
    spec_.T = spec_.h * (J_ - 1);
  }

  AfeKernelSpec spec_;
  long S_ = 0, J_ = 0;
  std::vector<double> lg_;
  std::vector<double> env_;
  std::vector<Real> gre_, gim_;
};

// F_s(x) by a table built for the single point s.
inline Real afe_kernel(const Real& x, long s, const AfeKernelSpec& spec) {
  AfeKernelSpec sp = spec;
  if (s < sp.s_min || s > sp.s_max) {
    sp.s_min = sp.s_max = s;
  }
  KernelTable t(sp);
  return t.eval_one(x, s);
}

// Kernel values on the three grids x = n g, g in {1, 1/A0, A0} / sqrt Q, for
// every s in the critical set; independent of the coefficients.
class AfeEngine {
 public:
  AfeEngine(long k, long kp, long Q, unsigned P, double A0 = 1.2, long n_limit = 200000)
      : k_(k), kp_(kp), Q_(Q), P_(P), A0_(A0) {
    if (kp - k < 1) throw PreconditionError("AfeEngine: need k' > k");
    if (Q < 1 || A0 <= 1) throw InvalidInput("AfeEngine: Q >= 1 and A0 > 1 required");
    const double sq = std::sqrt(double(Q));
    spec_ = make_kernel_spec(k, kp, P, 1.0 / (A0 * sq), k, kp - 1);
    table_ = std::make_unique<KernelTable>(spec_);
    spec_ = table_->spec();
    PrecisionScope ps(spec_.work_digits);
    Real rq = boost::multiprecision::sqrt(Real(Q)), a0 = Real(A0);
    scale_ = {1 / rq, 1 / (a0 * rq), a0 / rq};
    const double wexp = (k + kp - 2) / 2.0 - k;  // n^{w/2 - s} is largest at s = k
    auto d4 = detail::d4_table(n_limit);
    F_.resize(3);
    for (int g = 0; g < 3; ++g) {
      double gs = static_cast<double>(scale_[g]);
      for (long n = 1;; ++n) {
        if (n > n_limit) throw InsufficientData("AfeEngine: kernel cutoff beyond " + std::to_string(n_limit), n_limit);
        double wl = std::log10(double(d4[n])) + wexp * std::log10(double(n));
        Real x = scale_[g] * n;
        auto v = table_->eval(x, std::max(0.0, wl));
        double worst = -INFINITY;
        for (long si = 0; si < table_->s_count(); ++si)
          worst = std::max(worst, log10_abs(v[si]) - table_->log10_gamma(k + si));
        F_[g].push_back(std::move(v));
        double xd = gs * n;
        if (wl + worst + std::log10(1 + std::sqrt(xd) / (2 * M_PI * gs)) < -(double(P) + 12)) break;
      }
    }
  }

  long k() const { return k_; }
  long kp() const { return kp_; }
  long W() const { return k_ + kp_ - 1; }
  long Q() const { return Q_; }
  unsigned P() const { return P_; }
  double A0() const { return A0_; }
  const AfeKernelSpec& spec() const { return spec_; }
  const KernelTable& table() const { return *table_; }
  long n_required() const {
    size_t m = 0;
    for (const auto& f : F_) m = std::max(m, f.size());
    return static_cast<long>(m);
  }
  long grid_terms(int g) const { return static_cast<long>(F_[g].size()); }
  const Real& scale(int g) const { return scale_[g]; }
  // F_s(n scale_g)
  const Real& F(int g, long s, long n) const { return F_[g][n - 1][s - k_]; }

 private:
  long k_, kp_, Q_;
  unsigned P_;
  double A0_;
  AfeKernelSpec spec_;
  std::unique_ptr<KernelTable> table_;
  std::vector<Real> scale_;
  std::vector<std::vector<std::vector<Real>>> F_;
};

inline std::shared_ptr<const AfeEngine> afe_engine(long k, long kp, long Q, unsigned P, double A0 = 1.2) {
  static std::mutex mu;
  static std::map<std::tuple<long, long, long, unsigned, double>, std::shared_ptr<const AfeEngine>> cache;
  auto key = std::make_tuple(k, kp, Q, P, A0);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto e = std::make_shared<const AfeEngine>(k, kp, Q, P, A0);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, e);
  return e;
}

struct RootNumber {
  Cx eps;
  Real residual;           // largest relative functional-equation residual
  Real unitarity_defect;   // | |eps| - 1 |
  Cx eps_probe2;
  long s0 = 0, s0b = 0;
  Real probe_gap;          // |eps - eps_probe2|
};

struct AfeResult {
  std::map<long, Cx> L;            // completed L(s) = gamma(s) L_f(s)
  std::map<long, Real> err;        // absolute error estimate on L(s)
  std::map<long, Real> fe_residual;
  std::map<long, Real> scale;      // size of the two AFE halves, same units as L
  std::map<long, bool> forced_zero;  // centre of a self-dual series with eps = -1
  bool self_dual = false;
  RootNumber root;
  long n_used = 0;
  long Q = 1;
  unsigned P = 0;
  unsigned work_digits = 0;
};

inline Real level_power(long Q, long W, long s) {
  // X(s) = Q^{(W - 2s)/2}
  return boost::multiprecision::pow(boost::multiprecision::sqrt(Real(Q)), W - 2 * s);
}

inline AfeResult afe_evaluate(const RankinSeries& rs, unsigned P, std::optional<long> Q_override = std::nullopt,
                              double A0 = 1.2) {
  long Q = Q_override.value_or(rs.Q);
  auto eng = afe_engine(rs.k, rs.kp, Q, P, A0);
  const long N = eng->n_required();
  if (N > rs.n_max)
    throw InsufficientData("afe: need b_n up to n = " + std::to_string(N) + ", have " + std::to_string(rs.n_max), N);
  PrecisionScope ps(eng->spec().work_digits);
  const long k = rs.k, W = rs.W(), S = rs.kp - rs.k;
  std::vector<Cx> b(N + 1);
  for (long n = 1; n <= N; ++n) b[n] = rs.b[n].embed();
  Real rq = boost::multiprecision::sqrt(Real(Q));
  // U[g][s - k] = Q^{s/2} sum_n b_n n^{-s} F_s(n scale_g)
  std::vector<std::vector<Cx>> U(3, std::vector<Cx>(S));
  for (int g = 0; g < 3; ++g) {
    const long Ng = eng->grid_terms(g);
    std::vector<std::vector<Cx>> terms(S, std::vector<Cx>(Ng));
    for (long n = 1; n <= Ng; ++n) {
      Real inv = Real(1) / n;
      Real pw = boost::multiprecision::pow(inv, k);
      for (long si = 0; si < S; ++si) {
        terms[si][n - 1] = b[n] * (pw * eng->F(g, k + si, n));
        pw *= inv;
      }
    }
    for (long si = 0; si < S; ++si) U[g][si] = pairwise_sum(terms[si]) * boost::multiprecision::pow(rq, k + si);
  }
  auto u = [&](int g, long s) -> const Cx& { return U[g][s - k]; };
  // eps from A = A0 (grids 1 and 2 swap roles) at s0
  auto solve = [&](long s0, Real& quality) {
    Cx num = u(1, s0) - u(2, s0);
    Cx den = conj(u(1, W - s0)) - conj(u(2, W - s0));
    Real scale = abs(u(1, W - s0)) + abs(u(2, W - s0));
    quality = scale == 0 ? Real(0) : abs(den) / scale;
    if (abs(den) == 0) throw NormalizationError("afe: degenerate root-number equation");
    return num / den;
  };
  std::vector<std::pair<Real, long>> q;
  for (long s = k; s < rs.kp; ++s) {
    if (2 * s == W) continue;
    Real qual;
    solve(s, qual);
    q.push_back({qual, s});
  }
  if (q.size() < 2) throw PreconditionError("afe: need two non-central critical points to solve the root number");
  std::stable_sort(q.begin(), q.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  AfeResult r;
  r.Q = Q;
  r.P = P;
  r.work_digits = eng->spec().work_digits;
  r.n_used = N;
  Real dummy;
  r.root.s0 = q[0].second;
  r.root.s0b = q[1].second;
  r.root.eps = solve(r.root.s0, dummy);
  r.root.eps_probe2 = solve(r.root.s0b, dummy);
  r.root.probe_gap = abs(r.root.eps - r.root.eps_probe2);
  r.root.unitarity_defect = boost::multiprecision::abs(abs(r.root.eps) - 1);
  const Cx& eps = r.root.eps;
  Real worst = 0;
  for (long s = k; s < rs.kp; ++s) {
    Cx lam = u(0, s) + eps * conj(u(0, W - s));
    Cx lam_a = u(1, s) + eps * conj(u(2, W - s));
    Cx lam_b = u(2, s) + eps * conj(u(1, W - s));  // = eps Lambda~_{A0}(W - s)
    Real qs = boost::multiprecision::pow(rq, s);
    Real e = std::max(abs(lam - lam_a), abs(lam - lam_b));
    // relative to the larger of |Lambda| and its two halves, so that a
    // forced zero (eps = -1 at the centre) is measured against its parts
    Real sc = abs(u(0, s)) + abs(conj(u(0, W - s)));
    Real al = std::max(abs(lam), sc);
    r.L[s] = lam / qs;
    r.err[s] = e / qs;
    r.scale[s] = sc / qs;
    r.fe_residual[s] = al == 0 ? Real(1) : abs(lam - lam_b) / al;
    worst = std::max(worst, r.fe_residual[s]);
  }
  r.root.residual = worst;
  r.self_dual = std::all_of(rs.b.begin() + 1, rs.b.begin() + N + 1, [](const AlgNum& x) { return x.is_rational(); });
  for (long s = k; s < rs.kp; ++s)
    r.forced_zero[s] = r.self_dual && 2 * s == W && abs(eps + Cx(Real(1))) <= pow10(-static_cast<long>(P) / 3);
  return r;
}

inline RootNumber solve_root_number(const RankinSeries& rs, unsigned P, std::optional<long> Q_override = std::nullopt) {
  auto r = afe_evaluate(rs, P, Q_override);
  Real tol = pow10(-static_cast<long>(P) / 3);
  if (r.root.unitarity_defect > tol)
    throw NormalizationError("root number |eps| = " + to_sci(abs(r.root.eps), 20) +
                             " is not 1: wrong conductor Q or normalization X");
  return r.root;
}

// sum_{n > N} d_4(n) n^{-sigma} <= N^{a - sigma} zeta(a)^4 for 1 < a < sigma.
inline double log10_tail_bound(double N, double sigma) {
  double best = INFINITY;
  for (int i = 1; i < 400; ++i) {
    double a = 1 + (sigma - 1) * i / 400.0;
    double z = 0;
    // zeta(a) <= 1 + 1/(a - 1)
    z = std::log10(1 + 1 / (a - 1));
    best = std::min(best, (a - sigma) * std::log10(N) + 4 * z);
  }
  return best;
}

inline long direct_terms_required(double sigma, unsigned P) {
  if (sigma <= 1) return -1;
  double lo = 1, hi = 1;
  while (log10_tail_bound(hi, sigma) > -double(P)) {
    hi *= 2;
    if (hi > 1e300) return -1;
  }
  while (hi / lo > 1.0001 && hi - lo > 1) {
    double mid = std::sqrt(lo * hi);
    if (log10_tail_bound(mid, sigma) > -double(P)) lo = mid;
    else hi = mid;
  }
  return hi > 9e18 ? -1 : static_cast<long>(std::ceil(hi));
}

struct DirectResult {
  Cx value;              // finite part, or completed L if requested
  double log10_tail = 0; // certified tail bound on the finite part
  long n_used = 0;
  long n_required = 0;   // -1 when beyond 64-bit range
};

// Partial sum of the Dirichlet series with the certified tail bound; no
// accuracy requirement.
inline DirectResult direct_partial(const RankinSeries& rs, long s, long N, unsigned digits) {
  if (2 * s <= rs.k + rs.kp) throw PreconditionError("direct_L: need s > (k + k')/2 for absolute convergence");
  N = std::min(N, rs.n_max);
  PrecisionScope ps(digits + guard_digits);
  std::vector<Cx> t(N);
  for (long n = 1; n <= N; ++n) t[n - 1] = rs.b[n].embed() * boost::multiprecision::pow(Real(n), -s);
  DirectResult r;
  r.value = pairwise_sum(t);
  r.n_used = N;
  double sigma = s - (rs.k + rs.kp - 2) / 2.0;
  r.log10_tail = log10_tail_bound(double(N), sigma);
  return r;
}

inline DirectResult direct_L(const RankinSeries& rs, long s, unsigned P, bool completed = false) {
  if (2 * s <= rs.k + rs.kp) throw PreconditionError("direct_L: need s > (k + k')/2 for absolute convergence");
  double sigma = s - (rs.k + rs.kp - 2) / 2.0;
  long need = direct_terms_required(sigma, P);
  if (need < 0 || need > rs.n_max) {
    std::string req = need < 0 ? std::string("more than 2^63") : std::to_string(need);
    throw InsufficientData("direct_L: tail below 1e-" + std::to_string(P) + " at s = " + std::to_string(s) +
                               " needs " + req + " coefficients, have " + std::to_string(rs.n_max),
                           need < 0 ? LONG_MAX : need);
  }
  DirectResult r = direct_partial(rs, s, need, P);
  r.n_required = need;
  if (completed) {
    PrecisionScope ps(P + guard_digits);
    r.value = r.value * archimedean_factor(Cx(Real(s)), rs.k);
  }
  return r;
}

struct LValue {
  long s = 0;
  Cx value;      // completed L(s)
  Real err;
  std::string method;
};

inline LValue L_at(const RankinSeries& rs, long s, unsigned P) {
  auto crit = critical_set(rs.k, rs.kp);
  bool conv = 2 * s > rs.k + rs.kp;
  if (!crit.contains(s) && !conv) throw PreconditionError("L_at: s outside the critical set and the region of absolute convergence");
  LValue v;
  v.s = s;
  if (conv) {
    double sigma = s - (rs.k + rs.kp - 2) / 2.0;
    long need = direct_terms_required(sigma, P);
    if (need > 0 && need <= rs.n_max) {
      auto d = direct_L(rs, s, P, true);
      PrecisionScope ps(P + guard_digits);
      v.value = d.value;
      v.err = pow10(-static_cast<long>(P)) * abs(archimedean_factor(Cx(Real(s)), rs.k));
      v.method = "direct";
      return v;
    }
  }
  if (!crit.contains(s)) throw InsufficientData("L_at: direct summation infeasible outside the critical set", rs.n_max);
  auto r = afe_evaluate(rs, P);
  v.value = r.L.at(s);
  v.err = r.err.at(s);
  v.method = "afe";
  return v;
}

}  // namespace rankin

#endif
