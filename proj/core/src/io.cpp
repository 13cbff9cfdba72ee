#include "kgb/io.hpp"

#include "kgb/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace kgb {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size())
    throw ValidationError("BadColumns", "header/column count mismatch");
  size_t rows = columns.empty() ? 0 : columns[0].size();
  for (const auto& c : columns)
    if (c.size() != rows)
      throw ValidationError("BadColumns", "ragged columns");

  std::ofstream out(path, std::ios::binary); // binary keeps '\n' endings
  if (!out)
    throw ValidationError("CannotWrite", "cannot open " + path);
  for (size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << '\n';
  for (size_t r = 0; r < rows; ++r) {
    for (size_t i = 0; i < columns.size(); ++i)
      out << (i ? "," : "") << format_g17(columns[i][r]);
    out << '\n';
  }
}

void write_field_csv(const std::string& path, const RealField& f) {
  write_csv(path, {"x", "value"}, {f.grid->x, f.v});
}

std::map<std::string, double> parse_flat_config(const std::string& text) {
  std::map<std::string, double> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos)
      continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("BadConfig", "line " + std::to_string(lineno) +
                                             ": expected key = value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ValidationError("BadConfig", "line " + std::to_string(lineno) +
                                             ": empty key or value");
    try {
      size_t used = 0;
      double d = std::stod(val, &used);
      if (used != val.size())
        throw std::invalid_argument(val);
      kv[key] = d;
    } catch (const std::exception&) {
      throw ValidationError("BadConfig", "line " + std::to_string(lineno) +
                                             ": cannot parse number '" + val +
                                             "'");
    }
  }
  return kv;
}

} // namespace kgb
