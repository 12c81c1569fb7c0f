#ifndef TENQR_IO_HPP
#define TENQR_IO_HPP

#include "tenqr/tensor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace tenqr {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}
};

// Shortest-round-trip is not required; 17 significant digits is lossless for
// IEEE doubles. std::to_chars is locale independent.
inline std::string format_double(double v, int digits = 17) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline bool parse_number(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  auto res = std::from_chars(token.data(), token.data() + token.size(), out);
  return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto start = line.find_first_not_of(" \t\r", pos);
    if (start == std::string_view::npos) break;
    auto end = line.find_first_of(" \t\r", start);
    if (end == std::string_view::npos) end = line.size();
    out.push_back(line.substr(start, end - start));
    pos = end;
  }
  return out;
}

}  // namespace detail

// .t3 text format:
//   T3 <n1> <n2> <n3>
//   n3 frontal slices, each n1 rows of n2 whitespace-separated numbers,
//   a blank line between slices.
inline void write_t3(std::ostream& os, const Tensor3& x) {
  os << "T3 " << x.n1() << ' ' << x.n2() << ' ' << x.n3() << '\n';
  for (std::size_t k = 0; k < x.n3(); ++k) {
    if (k > 0) os << '\n';
    for (std::size_t i = 0; i < x.n1(); ++i) {
      for (std::size_t j = 0; j < x.n2(); ++j) {
        if (j > 0) os << ' ';
        os << format_double(x(i, j, k));
      }
      os << '\n';
    }
  }
}

inline Tensor3 read_t3(std::istream& is, const std::string& name = "<stream>") {
  std::string line;
  std::size_t lineno = 0;
  auto next_nonblank = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      if (!detail::trim(line).empty()) return true;
    }
    return false;
  };
  if (!next_nonblank()) throw ParseError(name, lineno, "empty file, expected 'T3 n1 n2 n3' header");
  const auto header = detail::split_ws(line);
  Dims d;
  auto parse_dim = [&](std::string_view tok, std::size_t& out) {
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size() && out > 0;
  };
  if (header.size() != 4 || header[0] != "T3" || !parse_dim(header[1], d.n1) ||
      !parse_dim(header[2], d.n2) || !parse_dim(header[3], d.n3)) {
    throw ParseError(name, lineno, "malformed header '" + line + "', expected 'T3 n1 n2 n3'");
  }
  Tensor3 x(d);
  const std::size_t rows = d.n1 * d.n3;
  for (std::size_t row = 0; row < rows; ++row) {
    if (!next_nonblank()) {
      throw ParseError(name, lineno,
                       "expected " + std::to_string(rows) + " data rows (" +
                           std::to_string(d.n3) + " slices of " + std::to_string(d.n1) +
                           "), found only " + std::to_string(row));
    }
    const auto tokens = detail::split_ws(line);
    if (tokens.size() != d.n2) {
      throw ParseError(name, lineno, "expected " + std::to_string(d.n2) + " values, found " +
                                         std::to_string(tokens.size()));
    }
    const std::size_t k = row / d.n1;
    const std::size_t i = row % d.n1;
    for (std::size_t j = 0; j < d.n2; ++j) {
      double v = 0.0;
      if (!detail::parse_number(tokens[j], v) || !std::isfinite(v)) {
        throw ParseError(name, lineno, "non-numeric entry '" + std::string(tokens[j]) + "'");
      }
      x(i, j, k) = v;
    }
  }
  if (next_nonblank()) throw ParseError(name, lineno, "unexpected data after last slice");
  return x;
}

inline void save_t3(const Tensor3& x, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_t3(os, x);
  if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

inline Tensor3 load_t3(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_t3(is, path.string());
}

inline void save_mask(const ObservationMask& m, const std::filesystem::path& path) {
  save_t3(m.indicator(), path);
}

inline ObservationMask load_mask(const std::filesystem::path& path) {
  try {
    return ObservationMask::from_indicator(load_t3(path));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

// A latency tensor plus the entries that were actually measured.
struct LatencyData {
  Tensor3 values;
  ObservationMask known;
};

// Directory of per-slot CSV matrices, slot order = lexicographic file name
// order. A blank cell is an unmeasured RTT: stored as 0 and left out of `known`.
inline LatencyData load_csv_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  if (files.empty()) throw std::runtime_error("no .csv files in '" + dir.string() + "'");
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });

  std::vector<std::vector<std::vector<std::optional<double>>>> slots;
  std::size_t n1 = 0, n2 = 0;
  for (const auto& file : files) {
    std::ifstream is(file);
    if (!is) throw std::runtime_error("cannot open '" + file.string() + "'");
    std::vector<std::vector<std::optional<double>>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (detail::trim(line).empty()) continue;
      std::vector<std::optional<double>> row;
      std::string_view rest(line);
      while (true) {
        const auto comma = rest.find(',');
        const auto cell = detail::trim(rest.substr(0, comma));
        if (cell.empty()) {
          row.emplace_back();
        } else {
          double v = 0.0;
          if (!detail::parse_number(cell, v) || !std::isfinite(v)) {
            throw ParseError(file.string(), lineno, "non-numeric cell '" + std::string(cell) + "'");
          }
          row.emplace_back(v);
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      if (n2 == 0) n2 = row.size();
      if (row.size() != n2) {
        throw ParseError(file.string(), lineno, "expected " + std::to_string(n2) +
                                                    " columns, found " + std::to_string(row.size()));
      }
      rows.push_back(std::move(row));
    }
    if (n1 == 0) n1 = rows.size();
    if (rows.size() != n1 || n1 == 0) {
      throw ParseError(file.string(), lineno, "expected " + std::to_string(n1) +
                                                  " rows, found " + std::to_string(rows.size()));
    }
    slots.push_back(std::move(rows));
  }

  const Dims d{n1, n2, slots.size()};
  LatencyData out{Tensor3(d), ObservationMask(d)};
  for (std::size_t k = 0; k < d.n3; ++k)
    for (std::size_t j = 0; j < n2; ++j)
      for (std::size_t i = 0; i < n1; ++i)
        if (const auto& cell = slots[k][i][j]) {
          out.values(i, j, k) = *cell;
          out.known.add({i, j, k});
        }
  return out;
}

// Reads either a .t3 file or a directory of per-slot CSV matrices.
inline LatencyData load_latency_dataset(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return load_csv_directory(path);
  Tensor3 x = load_t3(path);
  ObservationMask known = ObservationMask::full(x.dims());
  return {std::move(x), std::move(known)};
}

inline Tensor3 load_latency_tensor(const std::filesystem::path& path) {
  return load_latency_dataset(path).values;
}

inline void save_latency_tensor(const Tensor3& x, const std::filesystem::path& path) {
  save_t3(x, path);
}

inline void save_csv_slice(const Tensor3& x, std::size_t k, const std::filesystem::path& path,
                           const ObservationMask* known = nullptr) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  for (std::size_t i = 0; i < x.n1(); ++i) {
    for (std::size_t j = 0; j < x.n2(); ++j) {
      if (j > 0) os << ',';
      if (known == nullptr || known->contains(i, j, k)) os << format_double(x(i, j, k));
    }
    os << '\n';
  }
}

}  // namespace tenqr

#endif  // TENQR_IO_HPP
