#include "gta/genes.hpp"

#include <algorithm>
#include <map>

namespace gta::genes {

namespace {

// Mean of contributing rows per output symbol, skipping missing cells.
// Contributors are accumulated in a fixed order so results do not depend
// on any parallel schedule.
ExpressionMatrix aggregate(const std::map<std::string, std::vector<Eigen::Index>>& groups,
                           const Matrix& values,
                           const std::vector<std::string>& sample_ids) {
  ExpressionMatrix out;
  out.sample_ids = sample_ids;
  const Eigen::Index n_samples = values.cols();
  out.values.resize(static_cast<Eigen::Index>(groups.size()), n_samples);
  Eigen::Index r = 0;
  for (const auto& [symbol, rows] : groups) {
    out.row_ids.push_back(symbol);
    for (Eigen::Index c = 0; c < n_samples; ++c) {
      double sum = 0.0;
      long count = 0;
      for (Eigen::Index src : rows) {
        double v = values(src, c);
        if (!is_missing(v)) {
          sum += v;
          ++count;
        }
      }
      out.values(r, c) = count > 0 ? sum / count : missing_value();
    }
    ++r;
  }
  return out;
}

}  // namespace

SynonymDict load_synonym_dict(std::istream& in, Warnings* warnings) {
  SynonymDict dict;
  std::string line;
  size_t line_no = 0;
  auto insert = [&](const std::string& alias, const std::string& official,
                    bool is_official) {
    auto it = dict.alias_to_official.find(alias);
    if (it == dict.alias_to_official.end()) {
      dict.alias_to_official.emplace(alias, official);
      return;
    }
    if (it->second == official) return;
    if (is_official) {
      // Self-maps always hold, even against an earlier alias entry.
      warn(warnings, "alias '" + alias + "' re-bound from '" + it->second +
                         "' to official symbol '" + official + "'");
      it->second = official;
    } else {
      warn(warnings, "alias '" + alias + "' kept as '" + it->second +
                         "', ignoring '" + official + "'");
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    std::vector<std::string> fields = text::split(line, '\t');
    if (fields.size() > 2)
      fail(Errc::malformed_file,
           "synonym line " + std::to_string(line_no) + " has " +
               std::to_string(fields.size()) + " fields");
    std::string official = text::trim(fields[0]);
    if (official.empty())
      fail(Errc::malformed_file,
           "synonym line " + std::to_string(line_no) + " has empty symbol");
    insert(text::to_upper(official), official, true);
    if (fields.size() == 2) {
      for (const std::string& raw : text::split(fields[1], '|')) {
        std::string alias = text::trim(raw);
        if (alias.empty() || alias == "-") continue;
        insert(text::to_upper(alias), official, false);
      }
    }
  }
  return dict;
}

ProbeGeneMap probe_map_from_annotation(const AnnotationTable& table,
                                       const std::string& id_column,
                                       const std::string& symbol_column) {
  int id_idx = table.column_index(id_column);
  int sym_idx = table.column_index(symbol_column);
  if (id_idx < 0)
    fail(Errc::invalid_input, "annotation column '" + id_column + "' not found");
  if (sym_idx < 0)
    fail(Errc::invalid_input,
         "annotation column '" + symbol_column + "' not found");
  ProbeGeneMap map;
  for (const auto& row : table.rows)
    map.pairs.emplace_back(row[static_cast<size_t>(id_idx)],
                           row[static_cast<size_t>(sym_idx)]);
  return map;
}

std::vector<std::string> split_symbols(std::string_view raw) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    std::string t = text::trim(current);
    if (!t.empty()) out.push_back(std::move(t));
    current.clear();
  };
  for (size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c == ';' || c == '|' || c == ',') {
      flush();
    } else if (c == '/' && i + 1 < raw.size() && raw[i + 1] == '/') {
      flush();
      ++i;
    } else {
      current += c;
    }
  }
  flush();
  return out;
}

ExpressionMatrix map_probes(const ExpressionMatrix& expr,
                            const ProbeGeneMap& map) {
  std::unordered_map<std::string, Eigen::Index> probe_row;
  for (size_t r = 0; r < expr.row_ids.size(); ++r)
    probe_row.emplace(expr.row_ids[r], static_cast<Eigen::Index>(r));

  std::map<std::string, std::vector<Eigen::Index>> groups;
  for (const auto& [probe, raw] : map.pairs) {
    auto it = probe_row.find(probe);
    if (it == probe_row.end()) continue;
    for (const std::string& symbol : split_symbols(raw))
      groups[symbol].push_back(it->second);
  }
  if (groups.empty())
    fail(Errc::no_mapped_genes, "no probe mapped to any gene symbol");
  return aggregate(groups, expr.values, expr.sample_ids);
}

ExpressionMatrix normalize_symbols(const ExpressionMatrix& expr,
                                   const SynonymDict& dict) {
  std::map<std::string, std::vector<Eigen::Index>> groups;
  for (size_t r = 0; r < expr.row_ids.size(); ++r) {
    if (auto official = dict.lookup(expr.row_ids[r]))
      groups[*official].push_back(static_cast<Eigen::Index>(r));
  }
  if (groups.empty())
    fail(Errc::no_mapped_genes, "no row symbol found in the synonym dictionary");
  return aggregate(groups, expr.values, expr.sample_ids);
}

}  // namespace gta::genes
