#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gta {

enum class Errc {
  malformed_file,
  invalid_row,
  no_usable_column,
  alignment_error,
  no_mapped_genes,
  no_common_samples,
  empty_after_filtering,
  no_usable_cohort,
  too_few_samples,
  singular_model,
  numerical_error,
  no_common_regressors,
  invalid_input,
  degenerate_labels,
  invalid_config,
  io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }
  const char* code_name() const { return errc_name(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

// Non-fatal parser diagnostics accumulate here when the caller asks for them.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string msg) {
  if (sink) sink->push_back(std::move(msg));
}

constexpr double missing_value() {
  return std::numeric_limits<double>::quiet_NaN();
}

inline bool is_missing(double x) { return std::isnan(x); }

namespace text {

std::string trim(std::string_view s);
std::string to_upper(std::string_view s);
std::string to_lower(std::string_view s);
bool icontains(std::string_view haystack, std::string_view needle);
bool iequals(std::string_view a, std::string_view b);
std::vector<std::string> split(std::string_view s, char sep);

// Unwraps one layer of surrounding double quotes; interior quotes survive.
std::string strip_quotes(std::string_view s);

// Invalid UTF-8 byte sequences are replaced with U+FFFD.
std::string sanitize_utf8(std::string_view s);

// Strict decimal grammar: sign, digits, optional fraction and exponent.
// Rejects nan/inf spellings and trailing junk.
std::optional<double> parse_number(std::string_view s);

// Empty cells and NA/null spellings are missing; any other non-numeric
// content is a hard parse failure reported via the return.
enum class CellParse { value, missing, bad };
CellParse parse_cell(std::string_view s, double* out);

// 17 significant digits; round-trips IEEE doubles exactly.
std::string format_g17(double x);

}  // namespace text
}  // namespace gta
