#pragma once

#include <filesystem>
#include <iosfwd>

#include "gta/clinical.hpp"
#include "gta/metrics.hpp"
#include "gta/stats.hpp"
#include "gta/types.hpp"

namespace gta::io {

// Linked-data CSV: samples as rows sorted by ID; columns are the trait,
// Age and Gender when present, then genes in sorted order. Values are
// written with 17 significant digits so the round trip is exact.
void write_linked_csv(const LinkedDataset& ds, const std::filesystem::path& path);
LinkedDataset read_linked_csv(const std::filesystem::path& path,
                              const std::string& trait_name);

void write_cohort_record(const CohortRecord& rec, const std::filesystem::path& path);
CohortRecord read_cohort_record(const std::filesystem::path& path);

struct Selection {
  GTAProblem problem;
  std::vector<std::string> cohorts;  // one id, or trait + condition pair
};

void write_selection(const Selection& sel, const std::filesystem::path& path);
Selection read_selection(const std::filesystem::path& path);

void write_regression_result(const GTAProblem& problem,
                             const stats::RegressionResult& res,
                             const std::vector<std::string>& universe,
                             const std::filesystem::path& path);

struct StoredResult {
  GTAProblem problem;
  stats::ModelKind model = stats::ModelKind::lasso;
  std::vector<std::string> universe;
  // significant genes with the stored score fields
  std::vector<std::string> symbols;
  std::vector<double> coefficients;
  std::vector<double> adjusted_p;  // empty unless the model reports p-values
};

StoredResult read_regression_result(const std::filesystem::path& path);

// Scores for ranking a stored result's genes: |coefficient| for a penalized
// fit, 1 - adjusted p for the mixed model, 0 for unlisted universe genes.
metrics::GeneScoreList result_scores(const StoredResult& result);

// One rule plus its binding to the raw data: a characteristics row for
// series data, a column (or candidate columns) for tabular clinical data.
struct BoundRule {
  std::string variable;
  clinical::ConversionRule rule;
  int row = -1;
  std::string column;
  std::vector<std::string> candidates;
};

struct CohortRules {
  Source source = Source::geo;
  std::string id_column = "sampleID";
  std::vector<BoundRule> rules;

  const BoundRule* find(const std::string& variable) const {
    for (const auto& r : rules)
      if (r.variable == variable) return &r;
    return nullptr;
  }
};

CohortRules read_rules(const std::filesystem::path& path);

void write_eval_report_json(const std::map<std::string, metrics::EvalReport>& per_problem,
                            const metrics::EvalReport& macro,
                            const std::filesystem::path& path);
std::string eval_report_table(const std::map<std::string, metrics::EvalReport>& per_problem,
                              const metrics::EvalReport& macro);

// Single-line machine-readable error object.
std::string error_json(const std::string& code, const std::string& message);

}  // namespace gta::io
