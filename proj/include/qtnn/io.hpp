#pragma once

// Artifact plumbing: CSV formatting, atomic file writes, grid strings and run
// manifests.

#include "qtnn/errors.hpp"
#include "qtnn/linalg.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace qtnn::io {

inline constexpr const char* LIBRARY_VERSION = "1.0.0";

/// %.12g, the fixed width every artifact CSV uses for reals.
inline std::string fmt_real(real x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string fmt_fixed(real x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);  // no "-0.000000"
  return s;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header) { row_strings({header.begin(), header.end()}); }

  CsvWriter& row_strings(const std::vector<std::string_view>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
    return *this;
  }

  /// Cells are pre-formatted strings.
  CsvWriter& row(const std::vector<std::string>& cells) {
    std::vector<std::string_view> v(cells.begin(), cells.end());
    return row_strings(v);
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

/// Writes `text` to a sibling temp file and renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << text;
    if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// A number, optionally written as a fraction "p/q".
inline real parse_number(const std::string& tok) {
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  const std::string t = trim(tok);
  try {
    std::size_t used = 0;
    const auto slash = t.find('/');
    if (slash != std::string::npos) {
      const real num = std::stod(t.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument(t);
      const std::string den_s = t.substr(slash + 1);
      const real den = std::stod(den_s, &used);
      if (used != den_s.size() || den == 0.0) throw std::invalid_argument(t);
      return num / den;
    }
    const real v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse number '" + tok + "'");
  }
}

/// "start:step:stop" (inclusive, rounded to the nearest step count) or a comma
/// list such as "0.44,4/9".
inline std::vector<real> parse_grid(const std::string& text) {
  std::vector<real> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("grid range must be start:step:stop");
    const real start = parse_number(parts[0]), step = parse_number(parts[1]), stop = parse_number(parts[2]);
    if (!(step > 0.0) || stop < start) throw ConfigError("grid range needs step > 0 and stop >= start");
    const long n = std::lround((stop - start) / step);
    for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<real>(i) * step);
  } else {
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ','))
      if (p.find_first_not_of(" \t") != std::string::npos) out.push_back(parse_number(p));
  }
  if (out.empty()) throw ConfigError("empty grid '" + text + "'");
  for (real x : out)
    if (x < 0.0 || x > 1.0) throw ConfigError("grid value " + fmt_real(x) + " outside [0, 1]");
  return out;
}

/// 64-bit FNV-1a, used as a stable config digest.
inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace qtnn::io
