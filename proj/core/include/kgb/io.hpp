#pragma once

// Deterministic file output: 17-significant-digit decimals, '.' separator,
// '\n' endings, plus the flat key=value config reader.

#include "kgb/spectral.hpp"

#include <map>
#include <string>
#include <vector>

namespace kgb {

// 17-significant-digit decimal; round-trips any double exactly
std::string format_g17(double x);

// rows of named columns; all columns must share a length
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

// RealField serialization: columns x,value
void write_field_csv(const std::string& path, const RealField& f);

// "key = value" lines; '#' starts a comment; keys are free-form, values
// parsed as decimal numbers. Errors: BadConfig.
std::map<std::string, double> parse_flat_config(const std::string& text);

} // namespace kgb
