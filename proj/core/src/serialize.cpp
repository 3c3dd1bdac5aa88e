#include "mincap/serialize.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace mincap {

std::uint64_t config_hash(const nlohmann::json& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : finite_safe(config).dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex_hash(std::uint64_t h) {
  char buf[17];
  auto [end, ec] = std::to_chars(buf, buf + 16, h, 16);
  std::string s(buf, end);
  return std::string(16 - s.size(), '0') + s;
}

std::string header_line(const nlohmann::json& config) {
  return std::string("# ") + kToolName + ' ' + kToolVersion + " config=" + hex_hash(config_hash(config));
}

nlohmann::json finite_safe(const nlohmann::json& doc) {
  if (doc.is_number_float()) {
    const double x = doc.get<double>();
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return doc;
  }
  if (doc.is_array() || doc.is_object()) {
    nlohmann::json out = doc;
    for (auto& v : out) v = finite_safe(v);
    return out;
  }
  return doc;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

nlohmann::json with_meta(const nlohmann::json& doc, const nlohmann::json& config) {
  return finite_safe({{"tool", kToolName},
                      {"version", kToolVersion},
                      {"config_hash", hex_hash(config_hash(config))},
                      {"config", config},
                      {"result", doc}});
}

void write_profile_csv(std::ostream& out, const RadialProfile& p, const WarpedManifold& m,
                       const nlohmann::json& config) {
  out << header_line(config) << "\nr,u,du,w\n";
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    const double r = p.grid[i];
    out << format_double(r) << ',' << format_double(p.values[i]) << ',' << format_double(p.slopes[i]) << ','
        << format_double(std::isfinite(r) ? m.warp(r) : 0.0) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<CapacityResult>& rows, const nlohmann::json& config) {
  out << header_line(config) << "\nr_a,r_b,t,cap,method,interior,trace_inner,trace_outer\n";
  for (const auto& r : rows) {
    out << format_double(r.inner_r) << ',' << format_double(r.outer_r) << ','
        << (r.t ? format_double(*r.t) : std::string()) << ',' << format_double(r.value) << ',' << to_string(r.method)
        << ',' << format_double(r.interior_area) << ',' << format_double(r.trace_inner) << ','
        << format_double(r.trace_outer) << '\n';
  }
}

}  // namespace mincap
