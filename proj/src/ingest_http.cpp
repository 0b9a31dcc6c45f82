#include "httplib.h"

#include <openssl/evp.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <thread>

#include <unistd.h>

#include "rankin/ingest.hpp"

namespace fs = std::filesystem;

namespace rankin {

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string resolve_cache_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("RANKIN_CACHE_DIR"); env && *env) return env;
  if (const char* home = std::getenv("HOME"); home && *home) return std::string(home) + "/.cache/rankin";
  return ".rankin-cache";
}

namespace {

std::string cache_key(const std::string& label, long n_max) {
  std::string k;
  for (char c : label) k.push_back((std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_');
  return k + ".n" + std::to_string(n_max);
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void atomic_write(const fs::path& path, const std::string& data) {
  static std::atomic<unsigned long> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write cache file " + tmp.string());
    out << data;
    if (!out) throw Error("short write on " + tmp.string());
  }
  fs::rename(tmp, path);
}

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

UrlParts split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InvalidInput("base url needs a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  UrlParts u;
  u.origin = url.substr(0, path_start);
  u.prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!u.prefix.empty() && u.prefix.back() == '/') u.prefix.pop_back();
  return u;
}

json get_json(const UrlParts& u, const std::string& path, const FetchOptions& opt) {
  httplib::Client cli(u.origin);
  cli.set_connection_timeout(opt.timeout_s, 0);
  cli.set_read_timeout(opt.timeout_s, 0);
  cli.set_follow_location(true);
  int backoff = opt.backoff_ms;
  std::string last;
  for (int attempt = 1; attempt <= opt.attempts; ++attempt) {
    auto res = cli.Get(u.prefix + path);
    if (res && res->status == 404) throw NotFound("not found: " + u.origin + u.prefix + path);
    if (res && res->status == 200) {
      try {
        return json::parse(res->body);
      } catch (const json::parse_error& e) {
        throw FormatError(std::string("unparseable payload from ") + path + ": " + e.what(), static_cast<long>(e.byte));
      }
    }
    last = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
    if (attempt < opt.attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }
  throw NetworkError("giving up on " + u.origin + u.prefix + path + " after " + std::to_string(opt.attempts) +
                     " attempts: " + last);
}

const json& first_row(const json& payload, const std::string& label) {
  if (!payload.is_object() || !payload.contains("data") || !payload["data"].is_array())
    throw FormatError("payload for " + label + " lacks a data array");
  if (payload["data"].empty()) throw NotFound("unknown label " + label);
  return payload["data"][0];
}

}  // namespace

FormRecord record_from_lmfdb(const json& form, const json& hecke, long n_max) {
  FormRecord r;
  try {
    r.label = form.at("label").get<std::string>();
    r.level = form.at("level").get<long>();
    r.weight = form.at("weight").get<long>();
    long cond = form.at("char_conductor").get<long>();
    long parity = form.at("char_parity").get<long>();
    bool is_real = form.at("char_is_real").get<bool>();
    if (!is_real && cond != 1) throw Unsupported(r.label + ": non-real nebentypus is not supported by the client");
    long D = cond == 1 ? 1 : (parity < 0 ? -cond : cond);
    if (!is_fundamental_discriminant(D)) throw FormatError(r.label + ": character data inconsistent");
    r.char_modulus = r.level;
    for (long a = 0; a < r.level; ++a) {
      if (std::gcd(a, r.level) != 1) continue;
      r.char_values.push_back({a, {Rat(D == 1 ? 1 : kronecker(Int(D), a)), Rat(0)}});
    }
    if (r.level == 1) r.char_values = {{0, {Rat(1), Rat(0)}}};
    std::vector<Int> poly;
    for (const auto& c : hecke.at("field_poly")) poly.push_back(detail::json_int(c, "/field_poly"));
    const json& nums = hecke.at("hecke_ring_numerators");
    const json& dens = hecke.at("hecke_ring_denominators");
    const json& an = hecke.at("an");
    if (poly.size() > 3) throw Unsupported(r.label + ": coefficient field has degree > 2");
    // nu = a root of the field polynomial, as an AlgNum
    QuadField F;
    AlgNum nu;
    if (poly.size() == 2) {
      nu = AlgNum(make_rat(-poly[0], poly[1]));
    } else if (poly.size() == 3) {
      Int disc = poly[1] * poly[1] - 4 * poly[0] * poly[2];
      auto [d0, f] = quad_normalize(disc.get_si());
      if (d0 == 1) throw FormatError(r.label + ": field polynomial is reducible");
      F = QuadField(d0);
      nu = AlgNum(F, make_rat(-poly[1], 2 * poly[2]), make_rat(Int(f), 2 * poly[2]));
    } else {
      throw FormatError(r.label + ": bad field_poly");
    }
    r.field_disc = F.is_rational() ? 0 : F.disc();
    std::vector<AlgNum> basis;
    for (size_t i = 0; i < nums.size(); ++i) {
      AlgNum b(0), pw(1);
      for (const auto& c : nums[i]) {
        b += pw * AlgNum(Rat(detail::json_int(c, "/hecke_ring_numerators")));
        pw *= nu;
      }
      b /= AlgNum(Rat(detail::json_int(dens.at(i), "/hecke_ring_denominators")));
      basis.push_back(b);
    }
    if (static_cast<long>(an.size()) < n_max)
      throw InsufficientData(r.label + ": server has only " + std::to_string(an.size()) + " coefficients", an.size());
    for (long n = 0; n < n_max; ++n) {
      AlgNum v(0);
      const json& row = an.at(n);
      if (row.size() != basis.size()) throw FormatError(r.label + ": an row width mismatch");
      for (size_t i = 0; i < row.size(); ++i) v += AlgNum(Rat(detail::json_int(row[i], "/an"))) * basis[i];
      r.coeffs.push_back({v.a, v.b});
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("unexpected payload shape: ") + e.what());
  }
  return r;
}

FetchResult fetch_newform(const std::string& label, long n_max, const FetchOptions& opt) {
  fs::path dir = resolve_cache_dir(opt.cache_dir);
  fs::create_directories(dir);
  std::string key = cache_key(label, n_max);
  fs::path payload_path = dir / (key + ".json"), meta_path = dir / (key + ".meta.json");
  if (fs::exists(payload_path) && fs::exists(meta_path)) {
    try {
      std::string payload = read_file(payload_path.string());
      json meta = json::parse(read_file(meta_path.string()));
      if (meta.at("sha256").get<std::string>() == sha256_hex(payload)) {
        FetchResult fr;
        fr.record = parse_record_text(payload);
        fr.from_cache = true;
        fr.source_url = meta.at("source_url").get<std::string>();
        fr.retrieved_at = meta.at("retrieved_at").get<std::string>();
        return fr;
      }
    } catch (const std::exception&) {
      // stale or damaged entry: fall through and refetch
    }
  }
  UrlParts u = split_url(opt.base_url);
  std::string q = "?label=" + httplib::detail::encode_query_param(label) + "&_format=json";
  json form = get_json(u, "/api/mf_newforms/" + q, opt);
  json hecke = get_json(u, "/api/mf_hecke_nf/" + q, opt);
  FetchResult fr;
  fr.record = record_from_lmfdb(first_row(form, label), first_row(hecke, label), n_max);
  fr.source_url = u.origin + u.prefix + "/api/mf_newforms/" + q;
  fr.retrieved_at = utc_now();
  std::string payload = canonical_text(fr.record);
  json meta = {{"label", label},
               {"n_max", n_max},
               {"source_url", fr.source_url},
               {"retrieved_at", fr.retrieved_at},
               {"sha256", sha256_hex(payload)}};
  atomic_write(payload_path, payload);
  atomic_write(meta_path, meta.dump(2) + "\n");
  return fr;
}

}  // namespace rankin
