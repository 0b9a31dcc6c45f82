#ifndef RANKIN_REPORT_HPP
#define RANKIN_REPORT_HPP

// Full verification report for a triple (h, h', h'') and a prime l.

#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "rankin/congruence.hpp"
#include "rankin/ratio.hpp"

namespace rankin {

inline constexpr const char* report_schema_version = "1";

struct ReportOptions {
  long n_extra = 0;
  int prime_index = 0;       // which prime of E above l
  Int height_cap = default_height_cap();
  std::vector<long> m_list;  // empty: every pair in the critical set
  long n_coeffs = 0;         // 0: everything the forms provide
};

struct PairReport {
  long m = 0;
  bool right = false;         // right of the unitary axis for the applicable theorem
  bool twist_right = false;   // in theorem_ranges(min weight, max weight)
  long twist = 0;
  RatioVerdict r1, r2;
  Comparison cmp;
  Verdict final_verdict = Verdict::Indeterminate;
  std::string note;
};

struct Hypothesis {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct FullReport {
  nlohmann::ordered_json doc;
  std::string text;
  int exit_code = 0;
  std::vector<PairReport> pairs;
  std::vector<Hypothesis> hypotheses;
  CongruenceReport congruence;
  std::optional<std::string> eisenstein1, eisenstein2;
  AfeResult afe1, afe2;
};

namespace detail {

inline std::string cx_str(const Cx& z, int digits = 40) { return to_sci(z.re, digits) + " " + to_sci(z.im, digits) + "i"; }

inline nlohmann::ordered_json alg_json(const AlgNum& x) {
  nlohmann::ordered_json j;
  j["text"] = x.str();
  j["a"] = x.a.get_str();
  j["b"] = x.b.get_str();
  j["d0"] = x.field.d0;
  return j;
}

inline nlohmann::ordered_json ratio_json(const RatioVerdict& v) {
  nlohmann::ordered_json j;
  j["ratio_numeric"] = cx_str(v.ratio_numeric);
  if (v.ratio_exact) {
    j["ratio_exact"] = alg_json(*v.ratio_exact);
    j["finite_part_ratio"] = cx_str(v.finite_ratio, 30);
    j["reconstruction_residual"] = to_sci(v.reconstruction_residual, 3);
    j["height_bits"] = v.height;
  }
  if (v.v_l) j["v_l"] = *v.v_l == valuation_infinity ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(*v.v_l);
  j["indeterminate"] = v.indeterminate;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

inline bool squarefree_level(long N) { return N >= 1 && (N == 1 || is_squarefree(N)); }

}  // namespace detail

inline FullReport full_report(const NewformData& h, const NewformData& f1, const NewformData& f2, long l, unsigned P,
                              const ReportOptions& opt = {}) {
  if (f1.weight != f2.weight || f1.level != f2.level) throw InvalidInput("full_report: h' and h'' must share weight and level");
  const long ka = h.weight, kv = f1.weight;
  if (std::abs(ka - kv) < 2) throw PreconditionError("full_report: need |k - k'| >= 2");
  FullReport R;
  QuadField E = join(f1.field, f2.field);
  auto ideals = factor_rational_prime(l, E);
  if (opt.prime_index < 0 || opt.prime_index >= (int)ideals.size()) throw InvalidInput("full_report: prime index out of range");
  const PrimeIdeal lp = ideals[opt.prime_index];

  R.congruence = check_congruent(f1, f2, lp, opt.n_extra);
  R.eisenstein1 = eisenstein_screen(f1, lp);
  R.eisenstein2 = eisenstein_screen(f2, lp);
  R.congruence.eisenstein_alarm = R.eisenstein1 ? R.eisenstein1 : R.eisenstein2;
  auto ex = excluded_primes(ka, kv, h.level, f1.level);

  const long kmin = std::min(ka, kv), kmax = std::max(ka, kv);
  auto in = [](const std::vector<long>& v, long x) { return std::find(v.begin(), v.end(), x) != v.end(); };
  R.hypotheses = {
      {"congruence a(n,h') = a(n,h'') mod l", R.congruence.congruent, "checked up to n = " + std::to_string(R.congruence.bound_used)},
      {"l > k' (l not in S_weight)", !in(ex.S_weight, l), "l = " + std::to_string(l) + ", weights " + std::to_string(kmin) + ", " + std::to_string(kmax)},
      {"l does not divide N N'", !in(ex.S_level, l), "N N' = " + std::to_string(h.level * f1.level)},
      {"mod l representation irreducible (Eisenstein screen)", !R.congruence.eisenstein_alarm,
       R.congruence.eisenstein_alarm ? "congruent to " + *R.congruence.eisenstein_alarm : "no Eisenstein congruence found"},
      {"levels square-free and relatively prime",
       detail::squarefree_level(h.level) && detail::squarefree_level(f1.level) && std::gcd(h.level, f1.level) == 1,
       std::to_string(h.level) + ", " + std::to_string(f1.level)},
      {"l avoids S_Eis and S_cinf", true, "not computable here; assumed"},
  };
  bool hyp_ok = std::all_of(R.hypotheses.begin(), R.hypotheses.end(), [](const Hypothesis& x) { return x.ok; });

  // orientation: twist ranges when the varying forms have the larger weight, the lower-weight ranges otherwise
  TheoremRanges tr = kv > ka ? theorem_ranges(ka, kv) : theorem_ranges_lower(ka, kv);
  TheoremRanges tw = theorem_ranges(kmin, kmax);
  long n_use = opt.n_coeffs > 0 ? opt.n_coeffs : std::min({h.n_max, f1.n_max, f2.n_max});
  auto rs1 = rs_coefficients(h, f1, n_use);
  auto rs2 = rs_coefficients(h, f2, n_use);
  R.afe1 = afe_evaluate(rs1, P);
  R.afe2 = afe_evaluate(rs2, P);

  auto crit = critical_set(kmin, kmax);
  for (size_t i = 0; i + 1 < crit.points.size(); ++i) {
    long m = crit.points[i];
    if (!opt.m_list.empty() && !in(opt.m_list, m)) continue;
    PairReport pr;
    pr.m = m;
    for (const auto& t : tr.right)
      if (t.lo == m) {
        pr.right = true;
        pr.twist = t.twist;
      }
    for (const auto& t : tr.left)
      if (t.lo == m) pr.twist = t.twist;
    for (const auto& t : tw.right)
      if (t.lo == m) pr.twist_right = true;
    pr.r1 = ratio_from_values(R.afe1, m, E, &lp, opt.height_cap, kmin);
    pr.r2 = ratio_from_values(R.afe2, m, E, &lp, opt.height_cap, kmin);
    pr.cmp = compare_ratios(pr.r1, pr.r2, lp);
    pr.final_verdict = pr.cmp.verdict;
    std::vector<std::string> notes;
    if (!pr.cmp.note.empty()) notes.push_back(pr.cmp.note);
    if (!pr.right) {
      bool units = pr.r1.v_l && pr.r2.v_l && *pr.r1.v_l == 0 && *pr.r2.v_l == 0;
      notes.push_back("left of the unitary axis: needs the l-adic unit hypothesis");
      if (!units && pr.final_verdict != Verdict::Indeterminate) pr.final_verdict = Verdict::Informational;
    }
    if (!hyp_ok) {
      if (pr.final_verdict != Verdict::Indeterminate) pr.final_verdict = Verdict::Informational;
      notes.push_back("theorem hypotheses violated");
    }
    for (size_t j = 0; j < notes.size(); ++j) pr.note += (j ? "; " : "") + notes[j];
    R.pairs.push_back(std::move(pr));
  }

  bool not_cong = false, indet = false;
  for (const auto& p : R.pairs) {
    if (p.final_verdict == Verdict::NotCongruent) not_cong = true;
    // with a hypothesis violated no verdict is covered by a theorem
    if (p.final_verdict == Verdict::Indeterminate && hyp_ok) indet = true;
  }
  R.exit_code = not_cong ? 2 : indet ? 3 : 0;

  // JSON
  auto& d = R.doc;
  d["schema_version"] = report_schema_version;
  d["forms"] = {{"h", h.label}, {"h1", f1.label}, {"h2", f2.label}};
  d["weights"] = {ka, kv};
  d["levels"] = {h.level, f1.level};
  d["prime"] = {{"l", l}, {"ideal", lp.str()}, {"kind", kind_name(lp.kind)}};
  d["precision"] = P;
  d["coefficients_used"] = n_use;
  d["congruence"] = {{"congruent", R.congruence.congruent}, {"bound_used", R.congruence.bound_used},
                     {"first_failure", R.congruence.first_failure ? nlohmann::ordered_json(*R.congruence.first_failure) : nlohmann::ordered_json(nullptr)}};
  d["eisenstein_alarm"] = R.congruence.eisenstein_alarm ? nlohmann::ordered_json(*R.congruence.eisenstein_alarm) : nlohmann::ordered_json(nullptr);
  d["excluded_primes"] = {{"S_weight", ex.S_weight}, {"S_level", ex.S_level}};
  nlohmann::ordered_json hj = nlohmann::ordered_json::array();
  for (const auto& x : R.hypotheses) hj.push_back({{"name", x.name}, {"ok", x.ok}, {"detail", x.detail}});
  d["hypotheses"] = hj;
  d["orientation"] = kv > ka ? "varying forms of larger weight" : "varying forms of smaller weight";
  for (auto* a : {&R.afe1, &R.afe2}) {
    nlohmann::ordered_json aj;
    aj["root_number"] = detail::cx_str(a->root.eps, 30);
    aj["unitarity_defect"] = to_sci(a->root.unitarity_defect, 3);
    aj["probe_gap"] = to_sci(a->root.probe_gap, 3);
    aj["fe_residual_max"] = to_sci(a->root.residual, 3);
    aj["terms"] = a->n_used;
    aj["Q"] = a->Q;
    d["lfunctions"].push_back(aj);
  }
  nlohmann::ordered_json pj = nlohmann::ordered_json::array();
  for (const auto& p : R.pairs) {
    nlohmann::ordered_json j;
    j["pair"] = {p.m, p.m + 1};
    j["twist"] = p.twist;
    j["right_of_axis"] = p.right;
    j["twist_range_right"] = p.twist_right;
    j["ratio1"] = detail::ratio_json(p.r1);
    j["ratio2"] = detail::ratio_json(p.r2);
    j["comparison"] = verdict_name(p.cmp.verdict);
    if (p.cmp.v_diff) j["v_l_difference"] = *p.cmp.v_diff == valuation_infinity ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(*p.cmp.v_diff);
    j["verdict"] = verdict_name(p.final_verdict);
    if (!p.note.empty()) j["note"] = p.note;
    pj.push_back(j);
  }
  d["pairs"] = pj;
  d["exit_code"] = R.exit_code;

  // text
  std::ostringstream os;
  os << "forms  h = " << h.label << ", h' = " << f1.label << ", h'' = " << f2.label << "\n";
  os << "prime  " << lp.str() << "   precision " << P << "\n";
  os << "congruence up to n = " << R.congruence.bound_used << ": " << (R.congruence.congruent ? "holds" : "fails") << "\n";
  os << "hypotheses\n";
  for (const auto& x : R.hypotheses) os << "  [" << (x.ok ? "ok" : "VIOLATED") << "] " << x.name << " (" << x.detail << ")\n";
  os << "root numbers  " << detail::cx_str(R.afe1.root.eps, 12) << " | " << detail::cx_str(R.afe2.root.eps, 12) << "\n";
  os << std::left << std::setw(10) << "pair" << std::setw(8) << "side" << std::setw(12) << "v(diff)" << std::setw(15) << "comparison"
     << "verdict\n";
  for (const auto& p : R.pairs) {
    std::string vd = p.cmp.v_diff ? (*p.cmp.v_diff == valuation_infinity ? "inf" : std::to_string(*p.cmp.v_diff)) : "-";
    os << std::setw(10) << ("(" + std::to_string(p.m) + "," + std::to_string(p.m + 1) + ")") << std::setw(8)
       << (p.right ? "right" : "left") << std::setw(12) << vd << std::setw(15) << verdict_name(p.cmp.verdict)
       << verdict_name(p.final_verdict);
    if (!p.note.empty()) os << "  " << p.note;
    os << "\n";
  }
  os << "exit code " << R.exit_code << "\n";
  R.text = os.str();
  return R;
}

}  // namespace rankin

#endif
