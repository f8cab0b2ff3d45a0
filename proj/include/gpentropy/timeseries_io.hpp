#pragma once

// Time-series file formats.
//
// CSV: one row per time step, m numeric columns, optional header row.
// Binary: 16-byte little-endian header {char[4] "GRTS", u32 m, u64 N}
// followed by N*m float64 values in column-major order.

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "gpentropy/error.hpp"
#include "gpentropy/estimate.hpp"

namespace gpentropy {

static_assert(std::endian::native == std::endian::little,
              "binary time-series I/O assumes a little-endian host");

inline constexpr std::array<char, 4> kBinaryMagic = {'G', 'R', 'T', 'S'};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline bool parse_number(const std::string& field, double& value) {
  if (field.empty()) return false;
  char* end = nullptr;
  value = std::strtod(field.c_str(), &end);
  return end == field.c_str() + field.size();
}

}  // namespace detail

inline TimeSeries read_csv(std::istream& in, const std::string& source = "csv") {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  bool seen_first = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!detail::parse_number(fields[c], values[c])) {
        numeric = false;
        break;
      }
    }
    if (!seen_first) {
      seen_first = true;
      columns = fields.size();
      if (!numeric) continue;  // header
    }
    if (!numeric) {
      throw ParseError(fmt::format("{}:{}: non-numeric field", source, line_no));
    }
    if (fields.size() != columns) {
      throw ParseError(fmt::format("{}:{}: expected {} columns, got {}", source, line_no,
                                   columns, fields.size()));
    }
    for (double v : values) {
      if (!std::isfinite(v)) {
        throw ParseError(fmt::format("{}:{}: non-finite value", source, line_no));
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.size() < 2) {
    throw ParseError(fmt::format("{}: need at least 2 data rows, got {}", source, rows.size()));
  }
  MatrixXd samples(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < columns; ++c) {
      samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return TimeSeries(std::move(samples), source);
}

inline void write_csv(std::ostream& out, const TimeSeries& ts, bool header = true) {
  const MatrixXd& x = ts.samples();
  if (header) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) out << (c ? "," : "") << "x" << c;
    out << '\n';
  }
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      out << (c ? "," : "") << fmt::format("{:.17g}", x(r, c));
    }
    out << '\n';
  }
}

inline TimeSeries read_binary(std::istream& in, const std::string& source = "binary") {
  std::array<char, 4> magic{};
  std::uint32_t m = 0;
  std::uint64_t n = 0;
  in.read(magic.data(), 4);
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || magic != kBinaryMagic) {
    throw ParseError(fmt::format("{}: missing GRTS header", source));
  }
  if (m == 0 || n < 2 || n > (std::uint64_t{1} << 40) / m) {
    throw ParseError(fmt::format("{}: bad dimensions m={}, N={}", source, m, n));
  }
  MatrixXd samples(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  // Eigen's default storage is column-major, matching the file layout.
  in.read(reinterpret_cast<char*>(samples.data()),
          static_cast<std::streamsize>(n * m * sizeof(double)));
  if (!in) throw ParseError(fmt::format("{}: truncated payload", source));
  if (!samples.allFinite()) throw ParseError(fmt::format("{}: non-finite value", source));
  return TimeSeries(std::move(samples), source);
}

inline void write_binary(std::ostream& out, const TimeSeries& ts) {
  const auto m = static_cast<std::uint32_t>(ts.m());
  const auto n = static_cast<std::uint64_t>(ts.length());
  out.write(kBinaryMagic.data(), 4);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(ts.samples().data()),
            static_cast<std::streamsize>(n * m * sizeof(double)));
}

/// Reads CSV or binary, chosen by the leading magic bytes.
inline TimeSeries load_timeseries(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open time series \"{}\"", path));
  std::array<char, 4> head{};
  in.read(head.data(), 4);
  const bool binary = in.gcount() == 4 && head == kBinaryMagic;
  in.clear();
  in.seekg(0);
  return binary ? read_binary(in, path) : read_csv(in, path);
}

}  // namespace gpentropy
