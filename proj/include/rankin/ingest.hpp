#ifndef RANKIN_INGEST_HPP
#define RANKIN_INGEST_HPP

// Fixture records for q-expansions (JSON) and their conversion to NewformData.
//
// Schema:
//   {"label": str, "level": int, "weight": int,
//    "char": {"modulus": int, "values": [[residue, [a_num, a_den, b_num, b_den]], ...]},
//    "field_disc": int, "an": [[a_num, a_den, b_num, b_den], ...]}
// an[i] is a(i+1) = a + b sqrt(d0) for the field of discriminant field_disc
// (0 for Q).  Integers outside the double-exact range are written as decimal
// strings; readers accept either form.

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rankin/forms.hpp"

namespace rankin {

using json = nlohmann::json;

struct FormRecord {
  std::string label;
  long level = 1;
  long weight = 2;
  long char_modulus = 1;
  std::vector<std::pair<long, std::pair<Rat, Rat>>> char_values;
  long field_disc = 0;
  std::vector<std::pair<Rat, Rat>> coeffs;  // a(1), a(2), ...

  long n_max() const { return static_cast<long>(coeffs.size()); }
  bool operator==(const FormRecord& o) const {
    return label == o.label && level == o.level && weight == o.weight && char_modulus == o.char_modulus &&
           char_values == o.char_values && field_disc == o.field_disc && coeffs == o.coeffs;
  }
};

namespace detail {

inline Int json_int(const json& j, const std::string& ptr) {
  if (j.is_number_unsigned()) return Int(std::to_string(j.get<unsigned long long>()));
  if (j.is_number_integer()) return Int(static_cast<long>(j.get<long long>()));
  if (j.is_string()) {
    Int v;
    if (v.set_str(j.get<std::string>(), 10) != 0) throw FormatError("schema: " + ptr + " is not a decimal integer");
    return v;
  }
  throw FormatError("schema: " + ptr + " must be an integer");
}

inline json int_json(const Int& v) {
  static const Int lim("9007199254740992");  // 2^53
  if (abs(v) < lim) return json(v.get_si());
  return json(v.get_str());
}

inline std::pair<Rat, Rat> json_quad(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.size() != 4) throw FormatError("schema: " + ptr + " must be [a_num, a_den, b_num, b_den]");
  Int an = json_int(j[0], ptr + "/0"), ad = json_int(j[1], ptr + "/1");
  Int bn = json_int(j[2], ptr + "/2"), bd = json_int(j[3], ptr + "/3");
  if (ad <= 0) throw FormatError("schema: " + ptr + "/1 denominator must be positive");
  if (bd <= 0) throw FormatError("schema: " + ptr + "/3 denominator must be positive");
  return {make_rat(an, ad), make_rat(bn, bd)};
}

inline json quad_json(const std::pair<Rat, Rat>& v) {
  return json::array({int_json(v.first.get_num()), int_json(v.first.get_den()), int_json(v.second.get_num()),
                      int_json(v.second.get_den())});
}

inline const json& field(const json& j, const char* key, const std::string& ptr) {
  if (!j.is_object()) throw FormatError("schema: " + ptr + " must be an object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError("schema: missing " + ptr + "/" + key);
  return *it;
}

inline long json_long(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw FormatError("schema: " + ptr + " must be an integer");
  return j.get<long>();
}

}  // namespace detail

inline FormRecord record_from_json(const json& j) {
  using namespace detail;
  FormRecord r;
  const json& lab = field(j, "label", "");
  if (!lab.is_string()) throw FormatError("schema: /label must be a string");
  r.label = lab.get<std::string>();
  r.level = json_long(field(j, "level", ""), "/level");
  r.weight = json_long(field(j, "weight", ""), "/weight");
  const json& ch = field(j, "char", "");
  r.char_modulus = json_long(field(ch, "modulus", "/char"), "/char/modulus");
  const json& vals = field(ch, "values", "/char");
  if (!vals.is_array()) throw FormatError("schema: /char/values must be an array");
  for (size_t i = 0; i < vals.size(); ++i) {
    std::string ptr = "/char/values/" + std::to_string(i);
    if (!vals[i].is_array() || vals[i].size() != 2) throw FormatError("schema: " + ptr + " must be [residue, value]");
    r.char_values.push_back({json_long(vals[i][0], ptr + "/0"), json_quad(vals[i][1], ptr + "/1")});
  }
  r.field_disc = json_long(field(j, "field_disc", ""), "/field_disc");
  const json& an = field(j, "an", "");
  if (!an.is_array()) throw FormatError("schema: /an must be an array");
  r.coeffs.reserve(an.size());
  for (size_t i = 0; i < an.size(); ++i) r.coeffs.push_back(json_quad(an[i], "/an/" + std::to_string(i)));
  if (r.level < 1 || r.weight < 1 || r.char_modulus < 1) throw FormatError("schema: level, weight and modulus must be positive");
  if (r.field_disc != 0) {
    long d0 = r.field_disc == 1 ? 1 : quad_normalize(r.field_disc).first;
    if (d0 == 1 || QuadField(d0).disc() != r.field_disc)
      throw FormatError("schema: /field_disc is not a quadratic field discriminant");
  }
  return r;
}

inline json record_to_json(const FormRecord& r) {
  using namespace detail;
  json j;
  j["label"] = r.label;
  j["level"] = r.level;
  j["weight"] = r.weight;
  json vals = json::array();
  for (const auto& [res, v] : r.char_values) vals.push_back(json::array({res, quad_json(v)}));
  j["char"] = {{"modulus", r.char_modulus}, {"values", vals}};
  j["field_disc"] = r.field_disc;
  json an = json::array();
  for (const auto& c : r.coeffs) an.push_back(quad_json(c));
  j["an"] = an;
  return j;
}

// Canonical text: sorted keys, compact, trailing newline.
inline std::string canonical_text(const FormRecord& r) { return record_to_json(r).dump() + "\n"; }

inline FormRecord parse_record_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what(), static_cast<long>(e.byte));
  }
  return record_from_json(j);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline FormRecord load_fixture(const std::string& path) { return parse_record_text(read_file(path)); }

inline void save_fixture(const FormRecord& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << canonical_text(r);
}

inline QuadField record_field(const FormRecord& r) { return QuadField::from_disc(r.field_disc); }

// Builds NewformData; checks a(1) = 1 and multiplicativity on 20 coprime pairs.
inline NewformData to_newform(const FormRecord& r) {
  QuadField F = record_field(r);
  NewformData h;
  h.label = r.label;
  h.level = r.level;
  h.weight = r.weight;
  h.n_max = r.n_max();
  h.coeffs.assign(h.n_max + 1, AlgNum(0));
  auto mk = [&](const std::pair<Rat, Rat>& v) {
    if (F.is_rational() && v.second != 0) throw IntegrityError(r.label + ": irrational value over Q");
    return AlgNum(F, v.first, v.second);
  };
  for (long n = 1; n <= h.n_max; ++n) h.coeffs[n] = mk(r.coeffs[n - 1]);
  DirichletChar chi;
  chi.modulus = r.char_modulus;
  chi.table.assign(chi.modulus, AlgNum(0));
  if (chi.modulus == 1) chi.table[0] = AlgNum(1);
  for (const auto& [res, v] : r.char_values) {
    long m = ((res % chi.modulus) + chi.modulus) % chi.modulus;
    chi.table[m] = mk(v);
  }
  AlgNum m1 = chi(-1);
  chi.parity = m1 == AlgNum(1) ? Parity::even : Parity::odd;
  try {
    chi.validate();
  } catch (const Error& e) {
    throw IntegrityError(r.label + ": character: " + e.what());
  }
  if (r.level % chi.modulus != 0) throw IntegrityError(r.label + ": character modulus does not divide the level");
  h.chi = chi;
  h.recompute_field();
  if (h.n_max == 0) return h;
  if (h.coeffs[1] != AlgNum(1)) throw IntegrityError(r.label + ": a(1) = " + h.coeffs[1].str() + ", expected 1");
  std::mt19937 rng(0x5eed);
  std::uniform_int_distribution<long> dist(2, std::max<long>(2, h.n_max / 2));
  int checked = 0;
  for (int attempt = 0; attempt < 2000 && checked < 20; ++attempt) {
    long m1v = dist(rng), m2v = dist(rng);
    if (m1v * m2v > h.n_max || std::gcd(m1v, m2v) != 1) continue;
    ++checked;
    if (h.coeffs[m1v * m2v] != h.coeffs[m1v] * h.coeffs[m2v])
      throw IntegrityError(r.label + ": a(" + std::to_string(m1v * m2v) + ") != a(" + std::to_string(m1v) + ") a(" +
                           std::to_string(m2v) + ")");
  }
  return h;
}

inline FormRecord from_newform(const NewformData& h) {
  FormRecord r;
  r.label = h.label;
  r.level = h.level;
  r.weight = h.weight;
  r.char_modulus = h.chi.modulus;
  for (long a = 0; a < h.chi.modulus; ++a) {
    const AlgNum& v = h.chi.table[a];
    if (v.is_zero()) continue;
    r.char_values.push_back({a, {v.a, v.b}});
  }
  r.field_disc = h.field.is_rational() ? 0 : h.field.disc();
  for (long n = 1; n <= h.n_max; ++n) r.coeffs.push_back({h.coeffs[n].a, h.coeffs[n].b});
  return r;
}

inline NewformData load_newform(const std::string& path) { return to_newform(load_fixture(path)); }

// ---- HTTP client (implemented in src/ingest_http.cpp) ----

struct FetchOptions {
  std::string base_url = "https://www.lmfdb.org";
  std::string cache_dir;          // empty: resolve_cache_dir("")
  int attempts = 3;
  int backoff_ms = 250;           // doubled after each failed attempt
  int timeout_s = 20;
};

struct FetchResult {
  FormRecord record;
  bool from_cache = false;
  std::string source_url;
  std::string retrieved_at;
};

// Explicit directory, else $RANKIN_CACHE_DIR, else $HOME/.cache/rankin.
std::string resolve_cache_dir(const std::string& explicit_dir);

// Fetches (label, n_max) through the on-disk cache.
FetchResult fetch_newform(const std::string& label, long n_max, const FetchOptions& opt = {});

// Translates one LMFDB-style newform payload (mf_newforms row + mf_hecke_nf row).
FormRecord record_from_lmfdb(const json& form_row, const json& hecke_row, long n_max);

std::string sha256_hex(const std::string& data);

}  // namespace rankin

#endif
