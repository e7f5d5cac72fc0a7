#pragma once

// Helpers for the stirlab command line: flat key=value config files,
// stable CSV emission, output digests and run manifests. Kept header-only
// so the config round-trip can be unit tested directly.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stircli {

struct ConfigEntry {
  std::string key;
  std::string value;
};

// Flat "key=value" lines; blank lines and '#' comments are ignored.
inline std::vector<ConfigEntry> parse_config_text(const std::string& text) {
  std::vector<ConfigEntry> out;
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line is not key=value: " + t);
    out.push_back({trim(t.substr(0, eq)), trim(t.substr(eq + 1))});
  }
  return out;
}

inline std::vector<ConfigEntry> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

inline std::string emit_config(const std::vector<ConfigEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += e.key;
    out += '=';
    out += e.value;
    out += '\n';
  }
  return out;
}

// Shortest representation that round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double parsed = 0.0;
  std::sscanf(buf, "%lg", &parsed);
  if (parsed == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[64];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      std::sscanf(shorter, "%lg", &parsed);
      if (parsed == v) return shorter;
    }
  }
  return buf;
}

inline std::string join_doubles(const std::vector<double>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ',';
    out += format_double(vs[i]);
  }
  return out;
}

inline std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size())
      throw std::runtime_error("bad number in list: " + item);
    out.push_back(v);
  }
  return out;
}

// FNV-1a 64-bit digest, hex-encoded; used for the manifest's per-output
// file digests.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read back output file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// CSV with a header row and RFC quoting; a single leading '#' comment line
// carries the tool version and seed so every output names its provenance.
class CsvWriter {
 public:
  CsvWriter(std::string comment, std::vector<std::string> columns)
      : columns_(std::move(columns)) {
    body_ += "# ";
    body_ += comment;
    body_ += '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (i) body_ += ',';
      body_ += quote(columns_[i]);
    }
    body_ += '\n';
  }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_.size())
      throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) body_ += ',';
      body_ += quote(fields[i]);
    }
    body_ += '\n';
  }

  const std::string& str() const { return body_; }

 private:
  static std::string quote(const std::string& f) {
    if (f.find_first_of(",\"\n") == std::string::npos) return f;
    std::string out = "\"";
    for (char c : f) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
    return out;
  }

  std::vector<std::string> columns_;
  std::string body_;
};

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << bytes;
  if (!out) throw std::runtime_error("short write on output file: " + path);
}

}  // namespace stircli
