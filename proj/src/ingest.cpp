#include "gta/ingest.hpp"

#include <algorithm>
#include <set>

namespace gta::ingest {

namespace {

using text::sanitize_utf8;
using text::split;
using text::strip_quotes;
using text::trim;

constexpr const char* kTableBegin = "!series_matrix_table_begin";
constexpr const char* kTableEnd = "!series_matrix_table_end";
constexpr const char* kPlatformBegin = "!platform_table_begin";
constexpr const char* kPlatformEnd = "!platform_table_end";

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(sanitize_utf8(line));
  }
  return lines;
}

std::vector<std::string> tab_fields(const std::string& line) {
  std::vector<std::string> fields = split(line, '\t');
  for (auto& f : fields) f = strip_quotes(f);
  return fields;
}

// Rows between begin (exclusive) and end markers, header first.
ExpressionMatrix parse_expression_table(const std::vector<std::string>& lines,
                                        size_t begin, size_t end) {
  if (begin + 1 >= end) fail(Errc::malformed_file, "expression table is empty");
  std::vector<std::string> header = tab_fields(lines[begin + 1]);
  if (header.empty() || header[0].empty())
    fail(Errc::malformed_file, "expression table header is empty");
  ExpressionMatrix out;
  out.sample_ids.assign(header.begin() + 1, header.end());
  size_t n_rows = end - begin - 2;
  out.values.resize(static_cast<Eigen::Index>(n_rows),
                    static_cast<Eigen::Index>(out.sample_ids.size()));
  out.row_ids.reserve(n_rows);
  for (size_t r = 0; r < n_rows; ++r) {
    std::vector<std::string> fields = tab_fields(lines[begin + 2 + r]);
    if (fields.size() != header.size())
      fail(Errc::malformed_file,
           "expression row '" + (fields.empty() ? std::string() : fields[0]) +
               "' has " + std::to_string(fields.size()) + " fields, expected " +
               std::to_string(header.size()));
    out.row_ids.push_back(fields[0]);
    for (size_t c = 1; c < fields.size(); ++c) {
      double v;
      if (text::parse_cell(fields[c], &v) == text::CellParse::bad)
        fail(Errc::malformed_file,
             "non-numeric expression cell '" + fields[c] + "' in row '" +
                 fields[0] + "'");
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) = v;
    }
  }
  std::set<std::string> seen(out.row_ids.begin(), out.row_ids.end());
  if (seen.size() != out.row_ids.size())
    fail(Errc::malformed_file, "duplicate row identifiers in expression table");
  std::set<std::string> samples(out.sample_ids.begin(), out.sample_ids.end());
  if (samples.size() != out.sample_ids.size())
    fail(Errc::malformed_file, "duplicate sample identifiers in expression table");
  return out;
}

void append_text(std::string& field, const std::string& value) {
  if (field.empty()) {
    field = value;
  } else if (!value.empty()) {
    field += " " + value;
  }
}

}  // namespace

SeriesMatrix parse_series_matrix(std::istream& in, Warnings* warnings) {
  std::vector<std::string> lines = read_lines(in);

  size_t table_begin = lines.size(), table_end = lines.size();
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string lead = text::to_lower(trim(lines[i]));
    if (lead == kTableBegin && table_begin == lines.size()) table_begin = i;
    if (lead == kTableEnd && table_end == lines.size()) table_end = i;
  }
  if (table_begin == lines.size())
    fail(Errc::malformed_file, "missing " + std::string(kTableBegin) + " marker");
  if (table_end == lines.size() || table_end < table_begin)
    fail(Errc::malformed_file, "missing " + std::string(kTableEnd) + " marker");

  SeriesMatrix out;
  std::vector<std::string> accession_order;
  std::vector<std::vector<std::string>> char_rows;

  for (size_t i = 0; i < table_begin; ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] != '!') continue;
    size_t tab = line.find('\t');
    std::string key = line.substr(0, tab == std::string::npos ? line.size() : tab);
    std::vector<std::string> values;
    if (tab != std::string::npos) values = tab_fields(line.substr(tab + 1));
    std::string joined = values.empty() ? "" : values[0];
    for (size_t v = 1; v < values.size(); ++v) joined += "\t" + values[v];

    if (key == "!Series_title") {
      append_text(out.metadata.title, joined);
    } else if (key == "!Series_summary") {
      append_text(out.metadata.summary, joined);
    } else if (key == "!Series_overall_design") {
      append_text(out.metadata.overall_design, joined);
    } else if (key == "!Series_geo_accession") {
      out.metadata.accession = joined;
    } else if (key == "!Sample_geo_accession") {
      accession_order = values;
    } else if (key == "!Sample_characteristics_ch1") {
      char_rows.push_back(values);
    }
  }

  out.expression = parse_expression_table(lines, table_begin, table_end);

  if (!accession_order.empty()) {
    if (accession_order.size() != out.expression.sample_ids.size() ||
        accession_order != out.expression.sample_ids)
      fail(Errc::malformed_file,
           "sample accession line does not match expression table header");
    out.characteristics.sample_ids = accession_order;
  } else {
    out.characteristics.sample_ids = out.expression.sample_ids;
  }

  for (size_t r = 0; r < char_rows.size(); ++r) {
    if (char_rows[r].size() != out.characteristics.sample_ids.size())
      fail(Errc::malformed_file,
           "characteristics row " + std::to_string(r) + " has " +
               std::to_string(char_rows[r].size()) + " entries, expected " +
               std::to_string(out.characteristics.sample_ids.size()));
  }
  out.characteristics.rows = std::move(char_rows);

  if (out.metadata.accession.empty())
    warn(warnings, "series file declares no accession");
  return out;
}

std::map<size_t, std::vector<std::string>> characteristics_summary(
    const SampleCharacteristics& chars) {
  std::map<size_t, std::vector<std::string>> out;
  for (size_t r = 0; r < chars.rows.size(); ++r) {
    std::vector<std::string> uniq;
    for (const std::string& v : chars.rows[r]) {
      if (v.empty()) continue;
      if (std::find(uniq.begin(), uniq.end(), v) == uniq.end())
        uniq.push_back(v);
    }
    out[r] = std::move(uniq);
  }
  return out;
}

AnnotationTable parse_soft_annotation(std::istream& in, Warnings* warnings) {
  std::vector<std::string> lines = read_lines(in);

  std::vector<std::pair<size_t, size_t>> tables;
  size_t open = lines.size();
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string lead = text::to_lower(trim(lines[i]));
    if (lead == kPlatformBegin) {
      open = i;
    } else if (lead == kPlatformEnd && open != lines.size()) {
      tables.emplace_back(open, i);
      open = lines.size();
    }
  }
  if (tables.empty())
    fail(Errc::malformed_file, "no platform table section in SOFT file");
  if (tables.size() > 1)
    warn(warnings, "SOFT file contains " + std::to_string(tables.size()) +
                       " platform tables; using the first");

  auto [begin, end] = tables[0];
  if (begin + 1 >= end)
    fail(Errc::malformed_file, "platform table is empty");

  AnnotationTable out;
  out.column_names = tab_fields(lines[begin + 1]);
  if (out.column_names.empty() || out.column_names[0].empty())
    fail(Errc::malformed_file, "platform table header is empty");
  for (size_t i = begin + 2; i < end; ++i) {
    std::vector<std::string> fields = tab_fields(lines[i]);
    if (fields.size() > out.column_names.size())
      fail(Errc::malformed_file,
           "platform table row has " + std::to_string(fields.size()) +
               " fields, header has " + std::to_string(out.column_names.size()));
    fields.resize(out.column_names.size());  // short rows right-padded
    out.rows.push_back(std::move(fields));
  }
  return out;
}

XenaTables parse_xena_tables(std::istream& clinical, std::istream& expression,
                             Warnings* warnings) {
  XenaTables out;

  {
    std::vector<std::string> lines = read_lines(clinical);
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty())
      fail(Errc::malformed_file, "clinical table has no header");
    out.clinical.column_names = tab_fields(lines[0]);
    if (out.clinical.column_names.empty() || out.clinical.column_names[0].empty())
      fail(Errc::malformed_file, "clinical table header is empty");
    for (size_t i = 1; i < lines.size(); ++i) {
      std::vector<std::string> fields = tab_fields(lines[i]);
      if (fields.size() > out.clinical.column_names.size())
        fail(Errc::malformed_file,
             "clinical row has " + std::to_string(fields.size()) +
                 " fields, header has " +
                 std::to_string(out.clinical.column_names.size()));
      fields.resize(out.clinical.column_names.size());
      out.clinical.rows.push_back(std::move(fields));
    }
  }

  {
    std::vector<std::string> lines = read_lines(expression);
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty())
      fail(Errc::malformed_file, "expression table has no header");
    std::vector<std::string> header = tab_fields(lines[0]);
    if (header.empty() || (header.size() == 1 && header[0].empty()))
      fail(Errc::malformed_file, "expression table header is empty");

    // Headers may or may not carry the corner cell above the row-id column.
    size_t first_row_fields = 0;
    if (lines.size() > 1) first_row_fields = tab_fields(lines[1]).size();
    bool has_corner = !(lines.size() > 1 && first_row_fields == header.size() + 1);
    if (has_corner) {
      out.expression.sample_ids.assign(header.begin() + 1, header.end());
    } else {
      out.expression.sample_ids = header;
      warn(warnings, "expression header omits the corner cell");
    }

    size_t n_rows = lines.size() - 1;
    out.expression.values.resize(
        static_cast<Eigen::Index>(n_rows),
        static_cast<Eigen::Index>(out.expression.sample_ids.size()));
    for (size_t r = 0; r < n_rows; ++r) {
      std::vector<std::string> fields = tab_fields(lines[1 + r]);
      if (fields.size() != out.expression.sample_ids.size() + 1)
        fail(Errc::malformed_file,
             "expression row '" + (fields.empty() ? std::string() : fields[0]) +
                 "' has " + std::to_string(fields.size()) +
                 " fields, expected " +
                 std::to_string(out.expression.sample_ids.size() + 1));
      out.expression.row_ids.push_back(fields[0]);
      for (size_t c = 1; c < fields.size(); ++c) {
        double v;
        if (text::parse_cell(fields[c], &v) == text::CellParse::bad)
          fail(Errc::malformed_file,
               "non-numeric expression cell '" + fields[c] + "' in row '" +
                   fields[0] + "'");
        out.expression.values(static_cast<Eigen::Index>(r),
                              static_cast<Eigen::Index>(c - 1)) = v;
      }
    }
  }
  return out;
}

}  // namespace gta::ingest
