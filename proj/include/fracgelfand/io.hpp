#pragma once

// JSON for grids, tails, radial functions and branches; CSV for branch tables.
//
// grid      {"schema": "fracgelfand.grid/1", "nodes": [...], "grading": g, "quad_order": q}
// tail      {"kind": "zero"} | {"kind": "power", "alpha": a, "coeff": c}
//           | {"kind": "log_power", "coeff": c}
// function  {"schema": "fracgelfand.function/1", "grid": <grid>, "values": [...],
//            "tail": <tail>, "singular_at_origin": b}   (values[0] is null when singular)

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracgelfand/errors.hpp"
#include "fracgelfand/gelfand.hpp"
#include "fracgelfand/grid.hpp"

namespace fracgelfand {

using json = nlohmann::json;

inline constexpr const char* kGridSchema = "fracgelfand.grid/1";
inline constexpr const char* kFunctionSchema = "fracgelfand.function/1";
inline constexpr const char* kBranchSchema = "fracgelfand.branch/1";

/// printf-style %.{digits}g
inline std::string format_number(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

namespace detail {

inline void require_schema(const json& j, const char* schema) {
  if (!j.is_object() || !j.contains("schema") || j.at("schema") != schema) {
    throw ConfigError(std::string("expected a JSON object with schema ") + schema);
  }
}

template <class F>
auto parse_guard(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace detail

inline json to_json(const RadialGrid& g) {
  return {{"schema", kGridSchema}, {"nodes", g.nodes()}, {"grading", g.grading()}, {"quad_order", g.quad_order()}};
}

inline RadialGrid grid_from_json(const json& j) {
  detail::require_schema(j, kGridSchema);
  return detail::parse_guard([&] {
    return RadialGrid(j.at("nodes").get<std::vector<double>>(), j.at("grading").get<double>(),
                      j.at("quad_order").get<int>());
  });
}

inline json to_json(const TailSpec& t) {
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ZeroTail>) {
          return {{"kind", "zero"}};
        } else if constexpr (std::is_same_v<T, PowerTail>) {
          return {{"kind", "power"}, {"alpha", k.alpha}, {"coeff", k.coeff}};
        } else {
          return {{"kind", "log_power"}, {"coeff", k.coeff}};
        }
      },
      t.kind());
}

inline TailSpec tail_from_json(const json& j) {
  return detail::parse_guard([&]() -> TailSpec {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return TailSpec::zero();
    if (kind == "power") return TailSpec::power(j.at("alpha").get<double>(), j.at("coeff").get<double>());
    if (kind == "log_power") return TailSpec::log_power(j.at("coeff").get<double>());
    throw ConfigError("unknown tail kind '" + kind + "'");
  });
}

inline json to_json(const RadialFunction& u) {
  json values = json::array();
  for (Eigen::Index i = 0; i < u.values.size(); ++i) {
    if (i == 0 && u.singular_at_origin) {
      values.push_back(nullptr);
    } else {
      values.push_back(u.values[i]);
    }
  }
  return {{"schema", kFunctionSchema},
          {"grid", to_json(*u.grid)},
          {"values", values},
          {"tail", to_json(u.tail)},
          {"singular_at_origin", u.singular_at_origin}};
}

inline RadialFunction function_from_json(const json& j) {
  detail::require_schema(j, kFunctionSchema);
  return detail::parse_guard([&] {
    auto grid = std::make_shared<const RadialGrid>(grid_from_json(j.at("grid")));
    const bool singular = j.at("singular_at_origin").get<bool>();
    const auto& arr = j.at("values");
    if (!arr.is_array() || arr.size() != grid->nodes().size()) {
      throw ConfigError("function values do not match the grid");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] =
          arr[i].is_null() ? std::numeric_limits<double>::quiet_NaN() : arr[i].get<double>();
    }
    return RadialFunction(grid, std::move(v), tail_from_json(j.at("tail")), singular);
  });
}

inline json to_json(const BranchPoint& p, bool with_profile) {
  json j = {{"peak", p.peak},
            {"lambda", p.lambda},
            {"stability_eig", std::isnan(p.stability_eig) ? json(nullptr) : json(p.stability_eig)},
            {"residual_norm", p.residual_norm},
            {"newton_iters", p.newton_iters}};
  if (with_profile) j["profile"] = to_json(p.profile);
  return j;
}

inline json to_json(const Branch& b, bool with_profiles = false) {
  json pts = json::array();
  for (const auto& p : b.points) pts.push_back(to_json(p, with_profiles));
  json j = {{"schema", kBranchSchema},
            {"lambda_star_estimate", b.lambda_star_estimate},
            {"fold_detected", b.fold_detected},
            {"points", pts}};
  j["fold_index"] = b.fold_index ? json(*b.fold_index) : json(nullptr);
  j["lambda_star_fit"] = b.lambda_star_fit ? json(*b.lambda_star_fit) : json(nullptr);
  return j;
}

/// Branch table: one "# config: <json>" line, a header, then one row per point
/// with 12 significant digits.
inline void write_branch_csv(std::ostream& os, const Branch& b, const json& config) {
  os << "# config: " << config.dump() << '\n';
  os << "peak,lambda,stability_eig,residual_norm,newton_iters\n";
  for (const auto& p : b.points) {
    os << format_number(p.peak, 12) << ',' << format_number(p.lambda, 12) << ','
       << format_number(p.stability_eig, 12) << ',' << format_number(p.residual_norm, 12) << ',' << p.newton_iters
       << '\n';
  }
}

}  // namespace fracgelfand
