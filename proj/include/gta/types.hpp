#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gta/common.hpp"

namespace gta {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SeriesMetadata {
  std::string title;
  std::string summary;
  std::string overall_design;
  std::string accession;
};

// Raw per-sample "key: value" strings, one row per repeated
// characteristics line. Missing entries are empty strings.
struct SampleCharacteristics {
  std::vector<std::string> sample_ids;
  std::vector<std::vector<std::string>> rows;
};

// Rows are probes or gene symbols, columns are samples.
// Missing cells are NaN.
struct ExpressionMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> sample_ids;
  Matrix values;  // row_ids.size() x sample_ids.size()
};

struct AnnotationTable {
  std::vector<std::string> column_names;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const {
    for (size_t i = 0; i < column_names.size(); ++i)
      if (column_names[i] == name) return static_cast<int>(i);
    return -1;
  }
};

enum class VarKind { binary, continuous };

inline const char* var_kind_name(VarKind k) {
  return k == VarKind::binary ? "binary" : "continuous";
}

struct ClinicalColumn {
  std::string name;
  VarKind kind = VarKind::continuous;
  std::vector<std::string> sample_ids;
  Vector values;  // NaN = missing
};

struct ClinicalTable {
  std::vector<std::string> sample_ids;
  std::vector<std::string> names;
  std::vector<VarKind> kinds;
  Matrix values;  // samples x columns, NaN = missing

  int column_index(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<int>(i);
    return -1;
  }
};

// The unit of statistical analysis: clinical variables and gene expression
// joined on sample IDs. Gene values are samples x genes.
struct LinkedDataset {
  std::vector<std::string> sample_ids;
  std::string trait_name;
  ClinicalTable clinical;  // trait column plus optional Age/Gender
  std::vector<std::string> gene_symbols;
  Matrix genes;

  int trait_column() const { return clinical.column_index(trait_name); }
  Vector trait_values() const { return clinical.values.col(trait_column()); }
  VarKind trait_kind() const {
    return clinical.kinds[static_cast<size_t>(trait_column())];
  }
  Eigen::Index n_samples() const {
    return static_cast<Eigen::Index>(sample_ids.size());
  }
};

enum class Source { geo, tcga };

inline const char* source_name(Source s) {
  return s == Source::geo ? "GEO" : "TCGA";
}

struct CohortRecord {
  std::string id;
  Source source = Source::geo;
  bool gene_available = false;
  bool trait_available = false;
  bool quality_ok = false;
  long sample_count = 0;
};

struct GTAProblem {
  std::string trait;
  std::optional<std::string> condition;  // another trait, "Age" or "Gender"

  std::string key() const {
    return condition ? trait + "__" + *condition : trait;
  }
};

}  // namespace gta
