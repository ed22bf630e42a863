#include "gta/clinical.hpp"

#include <algorithm>
#include <set>

namespace gta::clinical {

namespace {

std::string strip_prefix(const std::string& raw) {
  size_t colon = raw.find(':');
  if (colon == std::string::npos) return text::trim(raw);
  return text::trim(raw.substr(colon + 1));
}

std::optional<double> numeric_value(const NumericParse& np, const std::string& s) {
  std::string t = text::trim(s);
  for (const std::string& suffix : np.suffixes) {
    if (suffix.empty() || t.size() < suffix.size()) continue;
    std::string_view tail(t.data() + t.size() - suffix.size(), suffix.size());
    if (text::iequals(tail, suffix)) {
      t = text::trim(t.substr(0, t.size() - suffix.size()));
      break;
    }
  }
  return text::parse_number(t);
}

bool cell_missing(const std::string& raw) {
  std::string t = text::trim(raw);
  return t.empty() || text::iequals(t, "NA") || text::iequals(t, "null") ||
         text::iequals(t, "nan");
}

bool cell_parseable(const std::string& raw, VarKind kind) {
  if (cell_missing(raw)) return false;
  if (kind == VarKind::continuous) return text::parse_number(text::trim(raw)).has_value();
  // Binary TCGA demographics in practice means gender-style fields.
  std::string t = text::to_lower(text::trim(raw));
  return t == "f" || t == "m" || text::icontains(t, "female") ||
         text::icontains(t, "male");
}

}  // namespace

void validate_rule(const ConversionRule& rule) {
  if (rule.clauses.empty() && !rule.numeric)
    fail(Errc::invalid_config, "rule has neither clauses nor numeric parse");
  if (rule.target_kind == VarKind::binary) {
    for (const MatchClause& c : rule.clauses)
      if (c.value != 0.0 && c.value != 1.0)
        fail(Errc::invalid_config,
             "binary rule clause value must be 0 or 1, got " +
                 text::format_g17(c.value));
    if (rule.numeric)
      fail(Errc::invalid_config, "binary rule cannot use numeric parse");
  }
}

double apply_rule(const ConversionRule& rule, const std::string& raw) {
  if (raw.empty()) return missing_value();
  std::string value = rule.prefix_strip ? strip_prefix(raw) : raw;
  for (const MatchClause& clause : rule.clauses) {
    bool hit = clause.case_insensitive
                   ? text::icontains(value, clause.pattern)
                   : value.find(clause.pattern) != std::string::npos;
    if (hit) return clause.value;
  }
  if (rule.numeric) {
    if (auto v = numeric_value(*rule.numeric, value)) return *v;
  }
  return missing_value();
}

ClinicalColumn extract_feature(const SampleCharacteristics& chars, size_t row,
                               const ConversionRule& rule,
                               const std::string& name) {
  if (row >= chars.rows.size())
    fail(Errc::invalid_row, "characteristics row " + std::to_string(row) +
                                " out of range (have " +
                                std::to_string(chars.rows.size()) + ")");
  ClinicalColumn col;
  col.name = name;
  col.kind = rule.target_kind;
  col.sample_ids = chars.sample_ids;
  col.values.resize(static_cast<Eigen::Index>(chars.sample_ids.size()));
  for (size_t j = 0; j < chars.sample_ids.size(); ++j)
    col.values(static_cast<Eigen::Index>(j)) = apply_rule(rule, chars.rows[row][j]);
  return col;
}

std::string choose_tcga_column(const AnnotationTable& table,
                               const std::vector<std::string>& candidates,
                               VarKind kind) {
  if (candidates.empty())
    fail(Errc::invalid_input, "no candidate columns given");
  std::string best;
  double best_fraction = 2.0;
  for (const std::string& name : candidates) {
    int idx = table.column_index(name);
    if (idx < 0)
      fail(Errc::invalid_input, "candidate column '" + name + "' not in table");
    size_t bad = 0;
    for (const auto& row : table.rows)
      if (!cell_parseable(row[static_cast<size_t>(idx)], kind)) ++bad;
    double fraction =
        table.rows.empty() ? 1.0 : static_cast<double>(bad) / table.rows.size();
    if (fraction < best_fraction) {
      best_fraction = fraction;
      best = name;
    }
  }
  if (best_fraction >= 1.0)
    fail(Errc::no_usable_column,
         "no candidate column has usable " +
             std::string(var_kind_name(kind)) + " values");
  return best;
}

ClinicalColumn extract_tcga_feature(const AnnotationTable& table,
                                    const std::string& id_column,
                                    const std::string& value_column,
                                    const ConversionRule& rule,
                                    const std::string& name) {
  int id_idx = table.column_index(id_column);
  int val_idx = table.column_index(value_column);
  if (id_idx < 0)
    fail(Errc::invalid_input, "id column '" + id_column + "' not in table");
  if (val_idx < 0)
    fail(Errc::invalid_input, "value column '" + value_column + "' not in table");
  ClinicalColumn col;
  col.name = name;
  col.kind = rule.target_kind;
  col.values.resize(static_cast<Eigen::Index>(table.rows.size()));
  for (size_t r = 0; r < table.rows.size(); ++r) {
    col.sample_ids.push_back(table.rows[r][static_cast<size_t>(id_idx)]);
    col.values(static_cast<Eigen::Index>(r)) =
        apply_rule(rule, table.rows[r][static_cast<size_t>(val_idx)]);
  }
  return col;
}

ClinicalTable assemble_clinical(const std::vector<std::string>& sample_ids,
                                const std::vector<ClinicalColumn>& columns) {
  ClinicalTable out;
  out.sample_ids = sample_ids;
  out.values.resize(static_cast<Eigen::Index>(sample_ids.size()),
                    static_cast<Eigen::Index>(columns.size()));
  std::set<std::string> names;
  for (size_t c = 0; c < columns.size(); ++c) {
    const ClinicalColumn& col = columns[c];
    if (col.sample_ids != sample_ids)
      fail(Errc::alignment_error,
           "column '" + col.name + "' sample ids do not match");
    if (!names.insert(col.name).second)
      fail(Errc::invalid_input, "duplicate clinical column '" + col.name + "'");
    out.names.push_back(col.name);
    out.kinds.push_back(col.kind);
    out.values.col(static_cast<Eigen::Index>(c)) = col.values;
  }
  return out;
}

}  // namespace gta::clinical
