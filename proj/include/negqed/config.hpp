#ifndef NEGQED_CONFIG_HPP
#define NEGQED_CONFIG_HPP

// Key-value configuration text:
//
//   # comment
//   [electric] model=lorentz omega_P=0.46 omega_T=1.0 gamma=0.01
//   [magnetic]
//   model=fixed value=-1,0.01
//
// Tokens after a section header belong to that section until the next header.

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "material.hpp"

namespace negqed {

using ConfigSection = std::map<std::string, std::string>;
using ConfigFile = std::map<std::string, ConfigSection>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline double parse_double(std::string_view text, std::string_view what) {
  text = detail::trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw InputError(std::string(what) + ": cannot parse number '" + std::string(text) + "'");
  return v;
}

/// "re,im" or "re".
inline cplx parse_complex(std::string_view text, std::string_view what) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) return {parse_double(text, what), 0.0};
  return {parse_double(text.substr(0, comma), what), parse_double(text.substr(comma + 1), what)};
}

/// "start:stop:step" (inclusive of stop up to rounding), "a,b,c", or a single
/// number.
inline std::vector<double> parse_grid(std::string_view text, std::string_view what) {
  text = detail::trim(text);
  if (text.empty()) throw InputError(std::string(what) + ": empty grid");
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos)
      throw InputError(std::string(what) + ": grid must be start:stop:step");
    const double start = parse_double(text.substr(0, c1), what);
    const double stop = parse_double(text.substr(c1 + 1, c2 - c1 - 1), what);
    const double step = parse_double(text.substr(c2 + 1), what);
    if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop))
      throw InputError(std::string(what) + ": grid step must be positive and bounds finite");
    if (stop < start) throw InputError(std::string(what) + ": empty grid (stop < start)");
    const double count = std::floor((stop - start) / step * (1.0 + 1e-12) + 1e-9);
    if (count > 1e7) throw InputError(std::string(what) + ": grid too large");
    for (long i = 0; i <= static_cast<long>(count); ++i)
      out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string_view::npos ? text.size() - pos : comma - pos);
    out.push_back(parse_double(item, what));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline ConfigFile parse_config(std::string_view text) {
  ConfigFile out;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = line;
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
    rest = detail::trim(rest);
    if (!rest.empty() && rest.front() == '[') {
      const auto close = rest.find(']');
      if (close == std::string_view::npos)
        throw InputError("config line " + std::to_string(line_no) + ": unterminated section header");
      section = std::string(detail::trim(rest.substr(1, close - 1)));
      if (section.empty())
        throw InputError("config line " + std::to_string(line_no) + ": empty section name");
      out[section];
      rest = rest.substr(close + 1);
    }
    std::istringstream tokens{std::string(rest)};
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0)
        throw InputError("config line " + std::to_string(line_no) + ": expected key=value, got '" +
                         tok + "'");
      if (section.empty())
        throw InputError("config line " + std::to_string(line_no) + ": key outside a [section]");
      out[section][tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  return out;
}

inline ConfigFile load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

namespace detail {

inline const std::string& require_key(const ConfigSection& sec, const std::string& section,
                                      const std::string& key) {
  const auto it = sec.find(key);
  if (it == sec.end()) throw InputError("[" + section + "] missing key '" + key + "'");
  return it->second;
}

inline Response parse_response(const ConfigSection& sec, const std::string& section) {
  const auto model_it = sec.find("model");
  const std::string model = model_it == sec.end() ? "fixed" : model_it->second;
  if (model == "lorentz") {
    for (const auto& [k, v] : sec)
      if (k != "model" && k != "omega_P" && k != "omega_T" && k != "gamma")
        throw InputError("[" + section + "] unknown key '" + k + "' for model=lorentz");
    LorentzParams p;
    p.omega_p = parse_double(require_key(sec, section, "omega_P"), section + ".omega_P");
    p.omega_t = parse_double(require_key(sec, section, "omega_T"), section + ".omega_T");
    const auto g = sec.find("gamma");
    p.gamma = g == sec.end() ? 0.0 : parse_double(g->second, section + ".gamma");
    return p;
  }
  if (model == "fixed") {
    for (const auto& [k, v] : sec)
      if (k != "model" && k != "value")
        throw InputError("[" + section + "] unknown key '" + k + "' for model=fixed");
    return parse_complex(require_key(sec, section, "value"), section + ".value");
  }
  throw InputError("[" + section + "] model must be 'lorentz' or 'fixed', got '" + model + "'");
}

}  // namespace detail

/// Material from [electric]/[magnetic]; a missing section keeps `fallback`'s
/// response for that field.
inline MaterialSpec material_from_config(const ConfigFile& cfg,
                                         const MaterialSpec& fallback = MaterialSpec::vacuum()) {
  MaterialSpec m = fallback;
  if (const auto it = cfg.find("electric"); it != cfg.end())
    m.electric = detail::parse_response(it->second, "electric");
  if (const auto it = cfg.find("magnetic"); it != cfg.end())
    m.magnetic = detail::parse_response(it->second, "magnetic");
  m.validate();
  return m;
}

}  // namespace negqed

#endif  // NEGQED_CONFIG_HPP
