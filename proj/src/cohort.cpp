#include "gta/cohort.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace gta::cohort {

LinkedDataset link(const ClinicalTable& clinical, const ExpressionMatrix& genes,
                   const std::string& trait_name) {
  if (clinical.sample_ids.empty() || genes.sample_ids.empty())
    fail(Errc::invalid_input, "cannot link empty tables");
  if (clinical.column_index(trait_name) < 0)
    fail(Errc::invalid_input, "trait column '" + trait_name + "' not present");

  std::unordered_map<std::string, Eigen::Index> gene_col;
  for (size_t j = 0; j < genes.sample_ids.size(); ++j)
    gene_col.emplace(genes.sample_ids[j], static_cast<Eigen::Index>(j));

  std::vector<std::pair<std::string, std::pair<Eigen::Index, Eigen::Index>>> common;
  for (size_t i = 0; i < clinical.sample_ids.size(); ++i) {
    auto it = gene_col.find(clinical.sample_ids[i]);
    if (it != gene_col.end())
      common.push_back({clinical.sample_ids[i],
                        {static_cast<Eigen::Index>(i), it->second}});
  }
  if (common.empty())
    fail(Errc::no_common_samples, "clinical and gene tables share no samples");
  std::sort(common.begin(), common.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  LinkedDataset out;
  out.trait_name = trait_name;
  out.gene_symbols = genes.row_ids;
  const Eigen::Index n = static_cast<Eigen::Index>(common.size());
  out.genes.resize(n, genes.values.rows());
  out.clinical.values.resize(n, clinical.values.cols());
  out.clinical.names = clinical.names;
  out.clinical.kinds = clinical.kinds;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.sample_ids.push_back(common[static_cast<size_t>(i)].first);
    auto [clin_row, gene_c] = common[static_cast<size_t>(i)].second;
    out.clinical.values.row(i) = clinical.values.row(clin_row);
    out.genes.row(i) = genes.values.col(gene_c).transpose();
  }
  out.clinical.sample_ids = out.sample_ids;
  return out;
}

namespace {

// Column mean over non-missing entries; mode for binary columns
// (ties keep the smaller value). NaN when all entries are missing.
double impute_value(const Vector& col, VarKind kind) {
  if (kind == VarKind::binary) {
    long zeros = 0, ones = 0;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (is_missing(col(i))) continue;
      (col(i) == 0.0 ? zeros : ones)++;
    }
    if (zeros + ones == 0) return missing_value();
    return ones > zeros ? 1.0 : 0.0;
  }
  double sum = 0.0;
  long count = 0;
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    if (!is_missing(col(i))) {
      sum += col(i);
      ++count;
    }
  }
  return count > 0 ? sum / count : missing_value();
}

}  // namespace

LinkedDataset handle_missing(const LinkedDataset& ds,
                             double gene_missing_threshold) {
  const int trait_col = ds.trait_column();
  if (trait_col < 0)
    fail(Errc::invalid_input, "dataset has no trait column");

  const Eigen::Index n = ds.genes.rows();
  const Eigen::Index p = ds.genes.cols();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (is_missing(ds.clinical.values(i, trait_col))) continue;
    Eigen::Index miss = 0;
    for (Eigen::Index j = 0; j < p; ++j)
      if (is_missing(ds.genes(i, j))) ++miss;
    double fraction = p > 0 ? static_cast<double>(miss) / p : 0.0;
    if (fraction > gene_missing_threshold) continue;
    keep.push_back(i);
  }
  if (keep.empty())
    fail(Errc::empty_after_filtering, "no samples remain after missing-value filtering");

  LinkedDataset out;
  out.trait_name = ds.trait_name;
  const Eigen::Index m = static_cast<Eigen::Index>(keep.size());
  for (Eigen::Index i : keep) out.sample_ids.push_back(ds.sample_ids[static_cast<size_t>(i)]);
  out.clinical.sample_ids = out.sample_ids;

  Matrix genes(m, p);
  for (Eigen::Index i = 0; i < m; ++i) genes.row(i) = ds.genes.row(keep[static_cast<size_t>(i)]);
  Matrix clin(m, ds.clinical.values.cols());
  for (Eigen::Index i = 0; i < m; ++i)
    clin.row(i) = ds.clinical.values.row(keep[static_cast<size_t>(i)]);

  // Cell imputation; columns with no observed value at all are dropped.
  std::vector<Eigen::Index> gene_keep;
  for (Eigen::Index j = 0; j < p; ++j) {
    double fill = impute_value(genes.col(j), VarKind::continuous);
    if (is_missing(fill)) continue;
    for (Eigen::Index i = 0; i < m; ++i)
      if (is_missing(genes(i, j))) genes(i, j) = fill;
    gene_keep.push_back(j);
  }
  out.genes.resize(m, static_cast<Eigen::Index>(gene_keep.size()));
  for (size_t j = 0; j < gene_keep.size(); ++j) {
    out.genes.col(static_cast<Eigen::Index>(j)) = genes.col(gene_keep[j]);
    out.gene_symbols.push_back(ds.gene_symbols[static_cast<size_t>(gene_keep[j])]);
  }

  std::vector<Eigen::Index> clin_keep;
  for (Eigen::Index c = 0; c < clin.cols(); ++c) {
    VarKind kind = ds.clinical.kinds[static_cast<size_t>(c)];
    double fill = impute_value(clin.col(c), kind);
    if (is_missing(fill)) {
      if (c == trait_col)
        fail(Errc::empty_after_filtering, "trait column entirely missing");
      continue;
    }
    for (Eigen::Index i = 0; i < m; ++i)
      if (is_missing(clin(i, c))) clin(i, c) = fill;
    clin_keep.push_back(c);
  }
  out.clinical.values.resize(m, static_cast<Eigen::Index>(clin_keep.size()));
  for (size_t c = 0; c < clin_keep.size(); ++c) {
    out.clinical.values.col(static_cast<Eigen::Index>(c)) = clin.col(clin_keep[c]);
    out.clinical.names.push_back(ds.clinical.names[static_cast<size_t>(clin_keep[c])]);
    out.clinical.kinds.push_back(ds.clinical.kinds[static_cast<size_t>(clin_keep[c])]);
  }
  return out;
}

bool judge_usability(const CohortRecord& rec) {
  return rec.gene_available && rec.trait_available && rec.quality_ok;
}

CohortRecord select_cohort(const std::vector<CohortRecord>& usable) {
  if (usable.empty())
    fail(Errc::no_usable_cohort, "no usable cohort to select from");
  const CohortRecord* best = &usable[0];
  for (const CohortRecord& rec : usable) {
    if (rec.sample_count > best->sample_count ||
        (rec.sample_count == best->sample_count && rec.id < best->id))
      best = &rec;
  }
  return *best;
}

std::pair<CohortRecord, CohortRecord> select_pair(
    const std::vector<CohortRecord>& trait_cohorts,
    const std::vector<CohortRecord>& condition_cohorts) {
  if (trait_cohorts.empty() || condition_cohorts.empty())
    fail(Errc::no_usable_cohort, "no usable cohort pair to select from");
  const CohortRecord* best_t = nullptr;
  const CohortRecord* best_c = nullptr;
  long long best_product = -1;
  for (const CohortRecord& t : trait_cohorts) {
    for (const CohortRecord& c : condition_cohorts) {
      long long product = static_cast<long long>(t.sample_count) * c.sample_count;
      bool better = product > best_product;
      if (product == best_product &&
          std::make_pair(t.id, c.id) < std::make_pair(best_t->id, best_c->id))
        better = true;
      if (better) {
        best_product = product;
        best_t = &t;
        best_c = &c;
      }
    }
  }
  return {*best_t, *best_c};
}

}  // namespace gta::cohort
