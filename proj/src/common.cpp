#include "gta/common.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>

namespace gta {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_file: return "MalformedFile";
    case Errc::invalid_row: return "InvalidRow";
    case Errc::no_usable_column: return "NoUsableColumn";
    case Errc::alignment_error: return "AlignmentError";
    case Errc::no_mapped_genes: return "NoMappedGenes";
    case Errc::no_common_samples: return "NoCommonSamples";
    case Errc::empty_after_filtering: return "EmptyAfterFiltering";
    case Errc::no_usable_cohort: return "NoUsableCohort";
    case Errc::too_few_samples: return "TooFewSamples";
    case Errc::singular_model: return "SingularModel";
    case Errc::numerical_error: return "NumericalError";
    case Errc::no_common_regressors: return "NoCommonRegressors";
    case Errc::invalid_input: return "InvalidInput";
    case Errc::degenerate_labels: return "DegenerateLabels";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::io_error: return "IOError";
  }
  return "UnknownError";
}

namespace text {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool icontains(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return true;
  if (needle.size() > haystack.size()) return false;
  auto lower = [](unsigned char c) { return std::tolower(c); };
  for (size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    size_t j = 0;
    while (j < needle.size() &&
           lower(haystack[i + j]) == lower(needle[j]))
      ++j;
    if (j == needle.size()) return true;
  }
  return false;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string strip_quotes(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return std::string(s.substr(1, s.size() - 2));
  return std::string(s);
}

std::string sanitize_utf8(std::string_view s) {
  static const char kReplacement[] = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    size_t len;
    if (c < 0x80) len = 1;
    else if ((c & 0xE0) == 0xC0 && c >= 0xC2) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0 && c <= 0xF4) len = 4;
    else {
      out += kReplacement;
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out += kReplacement;
      ++i;
      continue;
    }
    bool ok = true;
    for (size_t j = 1; j < len; ++j)
      if ((static_cast<unsigned char>(s[i + j]) & 0xC0) != 0x80) ok = false;
    if (ok) {
      out.append(s.substr(i, len));
      i += len;
    } else {
      out += kReplacement;
      ++i;
    }
  }
  return out;
}

std::optional<double> parse_number(std::string_view raw) {
  std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  size_t i = 0;
  if (s[i] == '+' || s[i] == '-') ++i;
  size_t digits = 0, frac = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    ++i;
    ++digits;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      ++frac;
    }
  }
  if (digits + frac == 0) return std::nullopt;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    size_t exp_digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      ++i;
      ++exp_digits;
    }
    if (exp_digits == 0) return std::nullopt;
  }
  if (i != s.size()) return std::nullopt;
  return std::strtod(s.c_str(), nullptr);
}

CellParse parse_cell(std::string_view raw, double* out) {
  std::string s = strip_quotes(trim(raw));
  std::string t = trim(s);
  if (t.empty() || iequals(t, "NA") || iequals(t, "null")) {
    *out = missing_value();
    return CellParse::missing;
  }
  if (auto v = parse_number(t)) {
    *out = *v;
    return CellParse::value;
  }
  return CellParse::bad;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

}  // namespace text
}  // namespace gta
