#pragma once

// JSON rendering of results. Floating-point values are written with 17
// significant digits so that reruns are byte-identical and every value
// round-trips.

#include <cmath>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "gpentropy/blocktoeplitz.hpp"
#include "gpentropy/selfcheck.hpp"
#include "gpentropy/szego.hpp"

namespace gpentropy {

using OrderedJson = nlohmann::ordered_json;

/// Key for a Renyi order: "2.0", "0.5", "5.0".
inline std::string alpha_key(double alpha) {
  if (alpha == std::floor(alpha) && std::abs(alpha) < 1e15) return fmt::format("{:.1f}", alpha);
  return fmt::format("{}", alpha);
}

inline std::string format_number(double value) {
  if (!std::isfinite(value)) return "null";
  return fmt::format("{:.17g}", value);
}

namespace detail {

inline void dump_json(const OrderedJson& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* newline = indent > 0 ? "\n" : "";
  const char* colon = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case nlohmann::json::value_t::number_float:
      out += format_number(j.get<double>());
      return;
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += newline;
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) {
          out += ",";
          out += newline;
        }
        first = false;
        out += pad;
        out += OrderedJson(key).dump();
        out += colon;
        dump_json(value, out, indent, depth + 1);
      }
      out += newline;
      out += close_pad;
      out += "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of objects go one element per line, anything else inline
      const bool multiline = indent > 0 && j.front().is_object();
      out += "[";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += multiline ? "," : (indent > 0 ? ", " : ",");
        first = false;
        if (multiline) {
          out += newline;
          out += pad;
        }
        dump_json(value, out, indent, depth + 1);
      }
      if (multiline) {
        out += newline;
        out += close_pad;
      }
      out += "]";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Serializes with 17-significant-digit floats; `indent` 0 gives one line.
inline std::string dump_json(const OrderedJson& j, int indent = 2) {
  std::string out;
  detail::dump_json(j, out, indent, 0);
  return out;
}

inline OrderedJson to_json(const EntropyReport& report) {
  OrderedJson out;
  out["m"] = report.m;
  out["shannon_rate"] = report.shannon_rate;
  OrderedJson renyi = OrderedJson::object();
  for (const auto& [alpha, value] : report.renyi_rates) renyi[alpha_key(alpha)] = value;
  out["renyi"] = std::move(renyi);
  out["spectral_integral"] = report.spectral_integral;
  out["method"] = report.method.label();
  out["grid_size"] = report.grid_size;
  out["diagnostics"] = {
      {"min_eigenvalue", report.diagnostics.min_eigenvalue},
      {"hermiticity_residual", report.diagnostics.hermiticity_residual},
      {"grid_converged", report.diagnostics.converged},
  };
  return out;
}

inline OrderedJson to_json(const FiniteEntropy& entropy) {
  OrderedJson out;
  out["n"] = entropy.n;
  out["m"] = entropy.m;
  out["logdet"] = entropy.logdet;
  out["shannon"] = entropy.shannon_per_block;
  OrderedJson renyi = OrderedJson::object();
  for (const auto& [alpha, value] : entropy.renyi_per_block) renyi[alpha_key(alpha)] = value;
  out["renyi"] = std::move(renyi);
  return out;
}

inline OrderedJson to_json(const ConvergenceTable& table) {
  OrderedJson out;
  out["spec"] = table.descriptor;
  out["function"] = table.function;
  out["grid_size"] = table.grid_size;
  OrderedJson rows = OrderedJson::array();
  for (const auto& row : table.rows) {
    OrderedJson r;
    r["n"] = row.n;
    r["finite_rate"] = row.finite_rate;
    r["limit_rate"] = row.limit_rate;
    r["gap"] = row.gap;
    rows.push_back(std::move(r));
  }
  out["rows"] = std::move(rows);
  return out;
}

inline OrderedJson to_json(const SelfCheckCase& c) {
  OrderedJson out;
  out["suite"] = c.suite;
  out["index"] = c.index;
  out["description"] = c.description;
  out["passed"] = c.passed;
  out["value"] = c.value;
  out["reference"] = c.reference;
  out["tolerance"] = c.tolerance;
  if (!c.error.empty()) out["error"] = c.error;
  return out;
}

inline OrderedJson to_json(const SelfCheckReport& report) {
  OrderedJson out;
  out["seed"] = report.seed;
  out["passed"] = report.passed();
  OrderedJson cases = OrderedJson::array();
  for (const auto& c : report.cases) cases.push_back(to_json(c));
  out["cases"] = std::move(cases);
  return out;
}

}  // namespace gpentropy
