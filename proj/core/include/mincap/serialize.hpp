#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mincap/capacity.hpp"
#include "mincap/radial_solver.hpp"
#include "mincap/warped_manifold.hpp"

namespace mincap {

inline constexpr const char* kToolName = "mincap";
inline constexpr const char* kToolVersion = "0.1.0";

/// 64-bit FNV-1a of the compact JSON dump of a configuration.
std::uint64_t config_hash(const nlohmann::json& config);
std::string hex_hash(std::uint64_t h);

/// "# mincap 0.1.0 config=<hash>", the first line of every CSV output.
std::string header_line(const nlohmann::json& config);

/// Copy of `doc` with non-finite numbers replaced by the strings "inf", "-inf", "nan".
nlohmann::json finite_safe(const nlohmann::json& doc);

/// Shortest round-tripping decimal form of x (or inf/-inf/nan).
std::string format_double(double x);

/// JSON document wrapped with a {"tool", "version", "config_hash", "config"} block.
nlohmann::json with_meta(const nlohmann::json& doc, const nlohmann::json& config);

/// CSV columns r, u, du, w with the header line.
void write_profile_csv(std::ostream& out, const RadialProfile& p, const WarpedManifold& m,
                       const nlohmann::json& config);

/// CSV columns r_a, r_b, t, cap, method, interior, trace_inner, trace_outer.
void write_sweep_csv(std::ostream& out, const std::vector<CapacityResult>& rows, const nlohmann::json& config);

}  // namespace mincap
