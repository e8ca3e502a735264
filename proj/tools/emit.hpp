#ifndef NEGQED_TOOLS_EMIT_HPP
#define NEGQED_TOOLS_EMIT_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "negqed/errors.hpp"

namespace negqed::cli {

inline constexpr const char* kVersion = "0.1.0";

struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_meta(std::string key, std::string value) {
    meta.emplace_back(std::move(key), std::move(value));
  }
};

/// 12 significant digits, locale independent; non-finite values as nan/inf.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

/// The double nearest to format_number(v), so JSON prints the same digits.
inline double round_significant(double v) {
  const std::string s = format_number(v);
  double out = v;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

inline void write_csv(const Table& t, std::ostream& os) {
  for (const auto& [k, v] : t.meta) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

inline void write_json(const Table& t, std::ostream& os) {
  nlohmann::ordered_json j;
  j["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.meta) j["meta"][k] = v;
  j["columns"] = t.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    auto r = nlohmann::ordered_json::array();
    for (double v : row) {
      if (std::isfinite(v))
        r.push_back(round_significant(v));
      else
        r.push_back(nullptr);
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  os << j.dump(1) << '\n';
}

enum class Format { Csv, Json };

/// Writes to `path`, or stdout when path is empty or "-".
inline void emit(const Table& t, Format format, const std::string& path) {
  if (t.rows.empty()) throw InputError("nothing to write: empty table");
  auto write = [&](std::ostream& os) {
    if (format == Format::Csv)
      write_csv(t, os);
    else
      write_json(t, os);
  };
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
  write(f);
  f.close();
  if (!f) throw std::runtime_error("failed writing output file '" + path + "'");
}

}  // namespace negqed::cli

#endif  // NEGQED_TOOLS_EMIT_HPP
