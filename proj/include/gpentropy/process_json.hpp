#pragma once

// JSON form of a ProcessSpec (the CLI input contract):
//
//   {"kind": "white" | "vma" | "var1" | "explicit" | "estimated",
//    "m": int,
//    "sigma": [[...]],            white, vma, var1
//    "A": [[...]],                var1
//    "coeffs": [[[...]], ...],    vma, B_1..B_q
//    "lags": {"0": [[...]], ...}} explicit, estimated (j >= 0 only)
//
// Matrices are row-major arrays of rows.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "gpentropy/error.hpp"
#include "gpentropy/process.hpp"

namespace gpentropy {

namespace detail {

inline MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw InvalidSpec(fmt::format("\"{}\" must be a non-empty array of rows", what));
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  MatrixXd out;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array()) throw InvalidSpec(fmt::format("\"{}\" row {} is not an array", what, r));
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      out.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidSpec(fmt::format("\"{}\" is ragged at row {}", what, r));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) {
        throw InvalidSpec(fmt::format("\"{}\"[{}][{}] is not a number", what, r, c));
      }
      out(r, c) = v.get<double>();
    }
  }
  return out;
}

inline nlohmann::ordered_json matrix_to_json(const MatrixXd& m) {
  auto out = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

inline const nlohmann::json& require(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw InvalidSpec(fmt::format("missing field \"{}\"", key));
  return doc.at(key);
}

inline std::vector<MatrixXd> lags_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.empty()) {
    throw InvalidSpec("\"lags\" must be a non-empty object keyed by lag");
  }
  std::vector<std::pair<std::int64_t, MatrixXd>> entries;
  std::int64_t max_lag = -1;
  for (const auto& [key, value] : j.items()) {
    std::size_t used = 0;
    long long lag = 0;
    try {
      lag = std::stoll(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || key.empty()) {
      throw InvalidSpec(fmt::format("lag key \"{}\" is not an integer", key));
    }
    if (lag < 0) {
      throw InvalidSpec(fmt::format("lag key {} is negative; K(-j) is implied by K(j)^T", lag));
    }
    entries.emplace_back(lag, matrix_from_json(value, "lags." + key));
    max_lag = std::max<std::int64_t>(max_lag, lag);
  }
  const Eigen::Index m = entries.front().second.rows();
  std::vector<MatrixXd> lags(static_cast<std::size_t>(max_lag + 1), MatrixXd::Zero(m, m));
  for (auto& [lag, block] : entries) lags[static_cast<std::size_t>(lag)] = std::move(block);
  if (j.find("0") == j.end()) throw InvalidSpec("\"lags\" must contain lag \"0\"");
  return lags;
}

}  // namespace detail

inline ProcessSpec process_spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InvalidSpec("process spec must be a JSON object");
  const auto& kind_field = detail::require(doc, "kind");
  if (!kind_field.is_string()) throw InvalidSpec("\"kind\" must be a string");
  const std::string kind = kind_field.get<std::string>();

  const auto& m_field = detail::require(doc, "m");
  if (!m_field.is_number_integer() || m_field.get<std::int64_t>() < 1) {
    throw InvalidSpec("\"m\" must be a positive integer");
  }
  const auto m = static_cast<Eigen::Index>(m_field.get<std::int64_t>());

  auto checked = [m](MatrixXd block, const char* what) {
    if (block.rows() != m || block.cols() != m) {
      throw InvalidSpec(fmt::format("\"{}\" is {}x{} but m = {}", what, block.rows(),
                                    block.cols(), m));
    }
    return block;
  };

  if (kind == "white") {
    return ProcessSpec::white(
        checked(detail::matrix_from_json(detail::require(doc, "sigma"), "sigma"), "sigma"));
  }
  if (kind == "var1") {
    return ProcessSpec::var1(
        checked(detail::matrix_from_json(detail::require(doc, "A"), "A"), "A"),
        checked(detail::matrix_from_json(detail::require(doc, "sigma"), "sigma"), "sigma"));
  }
  if (kind == "vma") {
    const auto& coeffs_field = detail::require(doc, "coeffs");
    if (!coeffs_field.is_array()) throw InvalidSpec("\"coeffs\" must be an array of matrices");
    std::vector<MatrixXd> coeffs;
    for (std::size_t k = 0; k < coeffs_field.size(); ++k) {
      const std::string name = fmt::format("coeffs[{}]", k);
      coeffs.push_back(checked(detail::matrix_from_json(coeffs_field[k], name), name.c_str()));
    }
    return ProcessSpec::vma(
        std::move(coeffs),
        checked(detail::matrix_from_json(detail::require(doc, "sigma"), "sigma"), "sigma"));
  }
  if (kind == "explicit" || kind == "estimated") {
    std::vector<MatrixXd> lags = detail::lags_from_json(detail::require(doc, "lags"));
    for (std::size_t j = 0; j < lags.size(); ++j) {
      checked(lags[j], fmt::format("lags.{}", j).c_str());
    }
    if (kind == "explicit") return ProcessSpec::explicit_lags(std::move(lags));
    WindowKind window = WindowKind::bartlett;
    if (doc.contains("window")) {
      const auto w = doc.at("window").get<std::string>();
      if (w == "truncation") window = WindowKind::truncation;
      else if (w != "bartlett") throw InvalidSpec(fmt::format("unknown window \"{}\"", w));
    }
    const std::int64_t samples = doc.value("samples", std::int64_t{0});
    return ProcessSpec::estimated(std::move(lags), window, samples);
  }
  throw InvalidSpec(fmt::format("unknown process kind \"{}\"", kind));
}

inline ProcessSpec process_spec_from_string(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("malformed process spec JSON: {}", e.what()));
  }
  try {
    return process_spec_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(fmt::format("bad process spec field: {}", e.what()));
  }
}

inline ProcessSpec process_spec_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open process spec \"{}\"", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return process_spec_from_string(buffer.str());
}

inline nlohmann::ordered_json to_json(const ProcessSpec& spec) {
  nlohmann::ordered_json out;
  out["kind"] = to_string(spec.kind());
  out["m"] = spec.m();
  std::visit(
      [&out](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, WhiteNoise>) {
          out["sigma"] = detail::matrix_to_json(model.sigma);
        } else if constexpr (std::is_same_v<T, MovingAverage>) {
          auto coeffs = nlohmann::ordered_json::array();
          for (const auto& b : model.coeffs) coeffs.push_back(detail::matrix_to_json(b));
          out["coeffs"] = std::move(coeffs);
          out["sigma"] = detail::matrix_to_json(model.sigma);
        } else if constexpr (std::is_same_v<T, VectorAR1>) {
          out["A"] = detail::matrix_to_json(model.a);
          out["sigma"] = detail::matrix_to_json(model.sigma);
        } else {
          nlohmann::ordered_json lags;
          for (std::size_t j = 0; j < model.lags.size(); ++j) {
            lags[std::to_string(j)] = detail::matrix_to_json(model.lags[j]);
          }
          out["lags"] = std::move(lags);
          if constexpr (std::is_same_v<T, EstimatedTable>) {
            out["window"] = to_string(model.window);
            out["samples"] = model.sample_count;
          }
        }
      },
      spec.model());
  return out;
}

}  // namespace gpentropy
