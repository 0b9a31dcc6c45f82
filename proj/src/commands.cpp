#include "rankin/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>

#include "CLI11.hpp"

#include "rankin/coset.hpp"
#include "rankin/ingest.hpp"
#include "rankin/localint.hpp"
#include "rankin/report.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace rankin::cli {

ojson RunManifest::inputs_json() const {
  ojson j;
  j["command"] = command;
  j["arguments"] = arguments;
  j["precision"] = precision;
  ojson c = ojson::object();
  for (const auto& [k, v] : checksums) c[k] = v;
  j["checksums"] = c;
  j["code_version"] = version;
  return j;
}

ojson RunManifest::to_json() const {
  ojson j = inputs_json();
  j["wall_time_s"] = wall_time_s;
  return j;
}

namespace {

// JSON counterpart of CLI11's TOML/INI config: top-level keys are global
// flags, nested objects are subcommand sections.
class ConfigJSON : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    ojson j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames()[0];
      if (opt->count() > 0)
        j[name] = opt->results().size() == 1 ? ojson(opt->results()[0]) : ojson(opt->results());
      else if (default_also && !opt->get_default_str().empty())
        j[name] = opt->get_default_str();
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      ojson s = ojson::parse(to_config(sub, default_also, false, ""));
      if (!s.empty()) j[sub->get_name()] = s;
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError("config file is not valid JSON: " + std::string(e.what()));
    }
    std::vector<CLI::ConfigItem> out;
    collect(j, {}, out);
    return out;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }
  static void collect(const nlohmann::json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
    if (!j.is_object()) throw CLI::ConversionError("config: expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        auto p = parents;
        p.push_back(it.key());
        collect(*it, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array())
        for (const auto& v : *it) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(*it));
      out.push_back(std::move(item));
    }
  }
};

std::string sha_of(const NewformData& h) { return sha256_hex(canonical_text(from_newform(h))); }

std::vector<fs::path> fixture_dirs(const GlobalOptions& g) {
  if (!g.fixtures_dir.empty()) return {fs::path(g.fixtures_dir)};
  std::vector<fs::path> d{fs::path("fixtures")};
#ifdef RANKIN_SOURCE_DIR
  d.push_back(fs::path(RANKIN_SOURCE_DIR) / "fixtures");
#endif
  return d;
}

bool file_backed(const std::string& ref, const GlobalOptions& g) {
  if (fs::is_regular_file(ref)) return true;
  for (const auto& d : fixture_dirs(g))
    if (fs::is_regular_file(d / (ref + ".json"))) return true;
  return false;
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << data;
  if (!f) throw Error("write failed: " + path);
}

ojson alg_exact(const AlgNum& x) {
  // (a + b sqrt(d0)) / den with integers
  Int den = lcm(x.a.get_den(), x.b.get_den());
  Rat a = x.a * Rat(den), b = x.b * Rat(den);
  ojson j;
  j["a"] = a.get_num().get_str();
  j["b"] = b.get_num().get_str();
  j["denominator"] = den.get_str();
  j["d0"] = x.field.d0;
  j["text"] = x.str();
  return j;
}

Rat parse_rat(const std::string& s) {
  Rat r;
  if (s.empty() || r.set_str(s, 10) != 0) throw InvalidInput("not a rational number: '" + s + "'");
  if (r.get_den() == 0) throw InvalidInput("zero denominator: '" + s + "'");
  r.canonicalize();
  return r;
}

void emit(const ojson& j, const std::string& summary, const GlobalOptions& g, std::ostream& out) {
  std::string text = j.dump(2) + "\n";
  if (g.json_out.empty()) {
    out << text;
  } else {
    write_file(g.json_out, text);
    out << summary;
  }
}

ojson prime_json(const PrimeIdeal& P) { return {{"l", P.l}, {"ideal", P.str()}, {"kind", kind_name(P.kind)}}; }

}  // namespace

AlgNum parse_algnum(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  static const std::regex quad(R"(^([+-]?[0-9]+(?:/[0-9]+)?(?=[+-]))?([+-]?)(?:([0-9]+(?:/[0-9]+)?)\*)?sqrt\(([+-]?[0-9]+)\)$)");
  std::smatch m;
  if (std::regex_match(s, m, quad)) {
    Rat a = m[1].matched ? parse_rat(m[1].str()) : Rat(0);
    Rat b = m[3].matched ? parse_rat(m[3].str()) : Rat(1);
    if (m[2].str() == "-") b = -b;
    long D = std::stol(m[4].str());
    auto [d0, f] = quad_normalize(D);
    if (d0 == 1) return AlgNum(a + b * Rat(f));
    return AlgNum(QuadField(d0), a, b * Rat(f));
  }
  if (s.find("sqrt") != std::string::npos) throw InvalidInput("cannot parse algebraic number '" + text + "'");
  return AlgNum(parse_rat(s));
}

NewformData resolve_form(const std::string& ref, const GlobalOptions& g, long n_max_hint) {
  if (ref.empty()) throw InvalidInput("empty form reference");
  if (fs::is_regular_file(ref)) return load_newform(ref);
  for (const auto& d : fixture_dirs(g)) {
    fs::path p = d / (ref + ".json");
    if (fs::is_regular_file(p)) return load_newform(p.string());
  }
  static const std::regex level_one(R"(^1\.([0-9]+)\.a\.a$)");
  std::smatch m;
  if (std::regex_match(ref, m, level_one)) {
    long k = std::stol(m[1].str());
    if (delta_family_weight(k)) {
      auto h = delta_family_qexp(k, n_max_hint > 0 ? n_max_hint : 1000);
      h.label = ref;
      return h;
    }
  }
  if (ref.find('/') != std::string::npos || ref.ends_with(".json")) throw NotFound("no such fixture file: " + ref);
  FetchOptions fo;
  fo.base_url = g.base_url;
  fo.cache_dir = g.cache_dir;
  try {
    return to_newform(fetch_newform(ref, n_max_hint > 0 ? n_max_hint : 1000, fo).record);
  } catch (const Error& e) {
    throw NotFound("form '" + ref + "' not found in fixtures, not generated internally, and not fetchable: " + e.what());
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  GlobalOptions g;
  CLI::App app{"Rankin-Selberg critical-value ratio congruence checks", "rankin-cli"};
  app.config_formatter(std::make_shared<ConfigJSON>());
  app.set_config("--config", "", "JSON file mirroring the flags (top level: global flags; objects: subcommands)");
  app.option_defaults()->always_capture_default();
  app.add_option("--precision", g.precision, "Working precision in decimal digits")->check(CLI::Range(10u, 2000u));
  app.add_option("--cache-dir", g.cache_dir, "Cache directory (default $RANKIN_CACHE_DIR or ~/.cache/rankin)");
  app.add_option("--fixtures", g.fixtures_dir, "Fixture directory searched for <label>.json");
  app.add_option("--json-out", g.json_out, "Write the JSON result here instead of stdout");
  app.add_option("--base-url", g.base_url, "Newform API base URL");
  app.require_subcommand(1);
  app.fallthrough();

  // fetch
  std::string f_label;
  long f_nmax = 0;
  auto* fetch = app.add_subcommand("fetch", "Fetch a newform q-expansion through the cache");
  fetch->add_option("--label", f_label, "Newform label")->required();
  fetch->add_option("--n-max", f_nmax, "Number of coefficients")->required()->check(CLI::PositiveNumber);

  // congruent
  std::string c_f1, c_f2;
  long c_l = 0, c_extra = 0;
  int c_idx = 0;
  auto* cong = app.add_subcommand("congruent", "Check a(n, f1) = a(n, f2) mod l up to the Sturm bound");
  cong->add_option("--form1", c_f1)->required();
  cong->add_option("--form2", c_f2)->required();
  cong->add_option("--prime", c_l, "Rational prime l")->required();
  cong->add_option("--n-extra", c_extra, "Check at least this many coefficients");
  cong->add_option("--prime-index", c_idx, "Which prime above l");

  // lvalue
  std::vector<std::string> lv_pair;
  long lv_s = 0, lv_n = 0;
  auto* lval = app.add_subcommand("lvalue", "Completed Rankin-Selberg L-value at an integer");
  lval->add_option("--pair", lv_pair, "F1,F2")->required()->delimiter(',')->expected(2);
  lval->add_option("--s", lv_s, "Integer argument")->required();
  lval->add_option("--n-coeffs", lv_n, "Dirichlet coefficients to use (default: all available)");

  // verify
  std::string v_f1, v_f2, v_aux;
  long v_l = 0, v_extra = 0, v_n = 0, v_nmax = 0;
  int v_idx = 0;
  std::vector<long> v_mlist;
  auto* ver = app.add_subcommand("verify", "Full ratio congruence report for (aux, form1) against (aux, form2)");
  ver->add_option("--form1", v_f1)->required();
  ver->add_option("--form2", v_f2)->required();
  ver->add_option("--aux", v_aux, "The fixed form h")->required();
  ver->add_option("--prime", v_l)->required();
  ver->add_option("--m-list", v_mlist, "Only the pairs (m, m+1) for these m")->delimiter(',');
  ver->add_option("--n-extra", v_extra);
  ver->add_option("--prime-index", v_idx);
  ver->add_option("--n-coeffs", v_n, "Dirichlet coefficients to use (default: all available)");
  ver->add_option("--n-max", v_nmax, "Coefficients for generated or fetched forms (default: match the fixtures)");

  // coset-reduce
  long cr_p = 0;
  std::vector<long> cr_levels;
  std::vector<std::string> cr_entries;
  auto* cos = app.add_subcommand("coset-reduce", "Double coset P xi^(j) K of a unipotent (1 0; (x y; z w) 1)");
  cos->add_option("--p", cr_p)->required();
  cos->add_option("--level-pair", cr_levels, "n',n")->required()->delimiter(',')->expected(2);
  cos->add_option("--entries", cr_entries, "x,y,z,w (rationals)")->required()->delimiter(',')->expected(4);

  // local-constant
  long lc_p = 0;
  std::string lc_a, lc_t, lc_d;
  std::vector<long> lc_w;
  auto* loc = app.add_subcommand("local-constant", "Local constant c'_p for a Steinberg twist against an unramified principal series");
  loc->add_option("--p", lc_p)->required();
  loc->add_option("--steinberg", lc_a, "a_p of the Steinberg form")->required();
  loc->add_option("--ps-trace", lc_t, "Trace of the Satake data (rho-conjugate form)")->required();
  loc->add_option("--ps-det", lc_d, "Determinant chi'^{-1}(p) p^{k'-1}")->required();
  loc->add_option("--weights", lc_w, "k,k'")->required()->delimiter(',')->expected(2);

  std::vector<std::string> args(argv, argv + argc);
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "rankin-cli: " << e.what() << "\n";
    return 1;
  }

  RunManifest man;
  man.precision = g.precision;
  man.arguments = ojson::object();
  auto finish = [&](ojson& j) {
    man.wall_time_s = std::chrono::duration<double>(clock::now() - t0).count();
    j["inputs"] = man.inputs_json();
  };

  try {
    if (*fetch) {
      man.command = "fetch";
      FetchOptions fo;
      fo.base_url = g.base_url;
      fo.cache_dir = g.cache_dir;
      auto r = fetch_newform(f_label, f_nmax, fo);
      ojson j;
      j["schema_version"] = output_schema_version;
      j["label"] = r.record.label;
      j["level"] = r.record.level;
      j["weight"] = r.record.weight;
      j["n_max"] = f_nmax;
      j["from_cache"] = r.from_cache;
      j["source_url"] = r.source_url;
      j["retrieved_at"] = r.retrieved_at;
      j["sha256"] = sha256_hex(canonical_text(r.record));
      j["cache_dir"] = resolve_cache_dir(g.cache_dir);
      emit(j, f_label + (r.from_cache ? " (cache)\n" : " (fetched)\n"), g, out);
      return 0;
    }

    if (*cong) {
      man.command = "congruent";
      auto h1 = resolve_form(c_f1, g, 0), h2 = resolve_form(c_f2, g, 0);
      QuadField E = join(h1.field, h2.field);
      auto ideals = factor_rational_prime(c_l, E);
      if (c_idx < 0 || c_idx >= (int)ideals.size()) throw InvalidInput("prime index out of range");
      const PrimeIdeal& P = ideals[c_idx];
      auto r = check_congruent(h1, h2, P, c_extra);
      std::optional<std::string> e1, e2;
      for (auto [h, e] : {std::pair{&h1, &e1}, std::pair{&h2, &e2}}) {
        try {
          *e = eisenstein_screen(*h, P);
        } catch (const InsufficientData&) {
        }
      }
      ojson j;
      j["schema_version"] = output_schema_version;
      j["form1"] = h1.label;
      j["form2"] = h2.label;
      j["prime"] = prime_json(P);
      j["bound_used"] = r.bound_used;
      j["congruent"] = r.congruent;
      j["first_failure"] = r.first_failure ? ojson(*r.first_failure) : ojson(nullptr);
      j["eisenstein_alarm"] = e1 ? ojson(*e1) : e2 ? ojson(*e2) : ojson(nullptr);
      man.arguments = {{"form1", c_f1}, {"form2", c_f2}, {"prime", c_l}, {"n_extra", c_extra}, {"prime_index", c_idx}};
      man.checksums = {{h1.label, sha_of(h1)}, {h2.label, sha_of(h2)}};
      finish(j);
      emit(j, std::string(r.congruent ? "congruent" : "not congruent") + " mod " + P.str() + "\n", g, out);
      return r.congruent ? 0 : 2;
    }

    if (*lval) {
      man.command = "lvalue";
      bool fb0 = file_backed(lv_pair[0], g), fb1 = file_backed(lv_pair[1], g);
      NewformData a, b;
      if (!fb0 && fb1) {
        b = resolve_form(lv_pair[1], g, 0);
        a = resolve_form(lv_pair[0], g, b.n_max);
      } else {
        a = resolve_form(lv_pair[0], g, 0);
        b = resolve_form(lv_pair[1], g, a.n_max);
      }
      long n = lv_n > 0 ? lv_n : std::min(a.n_max, b.n_max);
      auto rs = rs_coefficients(a, b, n);
      auto v = L_at(rs, lv_s, g.precision);
      PrecisionScope ps(g.precision + guard_digits);
      ojson j;
      j["schema_version"] = output_schema_version;
      j["pair"] = {a.label, b.label};
      j["s"] = lv_s;
      j["completed"] = true;
      j["value_re"] = to_sci(v.value.re, g.precision);
      j["value_im"] = to_sci(v.value.im, g.precision);
      j["err_bound"] = to_sci(v.err, 3);
      j["method"] = v.method;
      man.arguments = {{"pair", lv_pair}, {"s", lv_s}, {"n_coeffs", n}};
      man.checksums = {{a.label, sha_of(a)}, {b.label, sha_of(b)}};
      finish(j);
      emit(j, "L(" + std::to_string(lv_s) + ") = " + to_sci(v.value.re, 30) + " (" + v.method + ")\n", g, out);
      return 0;
    }

    if (*ver) {
      man.command = "verify";
      // file-backed forms first so generated ones can match their length
      std::map<std::string, NewformData> forms;
      long hint = v_nmax;
      for (const auto* ref : {&v_f1, &v_f2, &v_aux})
        if (file_backed(*ref, g)) {
          forms[*ref] = resolve_form(*ref, g, 0);
          if (v_nmax == 0) hint = hint == 0 ? forms[*ref].n_max : std::min(hint, forms[*ref].n_max);
        }
      for (const auto* ref : {&v_f1, &v_f2, &v_aux})
        if (!forms.count(*ref)) forms[*ref] = resolve_form(*ref, g, hint);
      const auto &f1 = forms[v_f1], &f2 = forms[v_f2], &h = forms[v_aux];
      ReportOptions opt;
      opt.n_extra = v_extra;
      opt.prime_index = v_idx;
      opt.m_list = v_mlist;
      opt.n_coeffs = v_n;
      auto R = full_report(h, f1, f2, v_l, g.precision, opt);
      man.arguments = {{"form1", v_f1}, {"form2", v_f2}, {"aux", v_aux}, {"prime", v_l}, {"m_list", v_mlist},
                       {"n_extra", v_extra}, {"prime_index", v_idx}, {"n_coeffs", v_n}, {"n_max", v_nmax}};
      for (const auto* f : {&h, &f1, &f2}) man.checksums[f->label] = sha_of(*f);
      ojson j = R.doc;
      finish(j);
      emit(j, R.text, g, out);
      if (!g.json_out.empty()) {
        fs::path mp = fs::path(g.json_out);
        mp.replace_extension(".manifest.json");
        write_file(mp.string(), man.to_json().dump(2) + "\n");
      }
      return R.exit_code;
    }

    if (*cos) {
      man.command = "coset-reduce";
      std::array<Rat, 4> e;
      for (int i = 0; i < 4; ++i) {
        AlgNum x = parse_algnum(cr_entries[i]);
        if (!x.is_rational()) throw InvalidInput("coset-reduce: entries must be rational");
        e[i] = x.a;
      }
      M4 u = lower_unipotent(e[0], e[1], e[2], e[3]);
      auto c = reduce_unipotent(u, cr_p, cr_levels[0], cr_levels[1]);
      long inv = coset_invariant(u, cr_p, cr_levels[0] + cr_levels[1]);
      if (inv != c.j) throw IntegrityError("coset-reduce: invariant disagrees with the reduction");
      auto mat = [](const M4& m) {
        ojson rows = ojson::array();
        for (int i = 0; i < 4; ++i) {
          std::string r;
          for (int k = 0; k < 4; ++k) r += (k ? " " : "") + m(i, k).get_str();
          rows.push_back(r);
        }
        return rows;
      };
      ojson j;
      j["schema_version"] = output_schema_version;
      j["p"] = cr_p;
      j["level_pair"] = cr_levels;
      j["u"] = mat(u);
      j["j"] = c.j;
      j["representative"] = mat(c.rep);
      j["witness"] = {{"left_in_P", mat(c.left)}, {"right_in_K", mat(c.right)}, {"verified", true}};
      j["steps"] = c.steps;
      j["invariant_j"] = inv;
      man.arguments = {{"p", cr_p}, {"level_pair", cr_levels}, {"entries", cr_entries}};
      finish(j);
      emit(j, "j = " + std::to_string(c.j) + "\n", g, out);
      return 0;
    }

    if (*loc) {
      man.command = "local-constant";
      AlgNum A = parse_algnum(lc_a), t = parse_algnum(lc_t), d = parse_algnum(lc_d);
      QuadField F = join(join(A.field, t.field), d.field);
      auto c = local_constant(LocalRep::steinberg(lc_p, A.in(F)), LocalRep::principal_series(lc_p, t.in(F), d.in(F), lc_w[1]), lc_p);
      if (!c.matches) throw IntegrityError("local-constant: disagrees with the local L-factor ratio");
      ojson j;
      j["schema_version"] = output_schema_version;
      j["p"] = lc_p;
      j["weights"] = lc_w;
      j["c_p"] = alg_exact(c.value);
      j["numerator"] = c.numerator.str();
      j["denominator"] = c.denominator.str();
      j["x_sum"] = c.x_sum.value(lc_p).str();
      j["x_prod"] = c.x_prod.value(lc_p).str();
      j["local_L_ratio"] = alg_exact(c.euler_ratio);
      j["matches"] = c.matches;
      j["orientation"] = "Steinberg twist on the fixed form";
      man.arguments = {{"p", lc_p}, {"steinberg", lc_a}, {"ps_trace", lc_t}, {"ps_det", lc_d}, {"weights", lc_w}};
      finish(j);
      emit(j, "c'_p = " + c.value.str() + "\n", g, out);
      return 0;
    }
  } catch (const std::exception& e) {
    err << "rankin-cli " << man.command << ": " << e.what() << "\n";
    return 1;
  }
  err << "rankin-cli: no command\n";
  return 1;
}

}  // namespace rankin::cli
