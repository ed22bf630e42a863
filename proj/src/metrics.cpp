#include "gta/metrics.hpp"

#include <algorithm>
#include <unordered_map>

namespace gta::metrics {

namespace {

size_t intersection_size(const std::set<std::string>& a,
                         const std::set<std::string>& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  size_t count = 0;
  for (const auto& x : small) count += large.count(x);
  return count;
}

bool vectors_equal(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return false;
  return true;
}

bool vector_constant(const Vector& v) {
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) != v(0)) return false;
  return true;
}

double pearson(const Vector& a, const Vector& b) {
  double ma = a.mean(), mb = b.mean();
  Vector da = a.array() - ma, db = b.array() - mb;
  double denom = std::sqrt(da.squaredNorm() * db.squaredNorm());
  return da.dot(db) / denom;
}

// All columns of a linked dataset keyed by name, aligned to sample order.
std::map<std::string, Vector> dataset_columns(const LinkedDataset& ds) {
  std::map<std::string, Vector> cols;
  for (size_t c = 0; c < ds.clinical.names.size(); ++c)
    cols[ds.clinical.names[c]] = ds.clinical.values.col(static_cast<Eigen::Index>(c));
  for (size_t g = 0; g < ds.gene_symbols.size(); ++g)
    cols[ds.gene_symbols[g]] = ds.genes.col(static_cast<Eigen::Index>(g));
  return cols;
}

}  // namespace

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  size_t inter = intersection_size(a, b);
  size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Prf set_prf(const std::set<std::string>& pred, const std::set<std::string>& ref) {
  if (pred.empty() && ref.empty()) return {1.0, 1.0, 1.0};
  double tp = static_cast<double>(intersection_size(pred, ref));
  Prf out;
  out.precision = pred.empty() ? 0.0 : tp / pred.size();
  out.recall = ref.empty() ? 0.0 : tp / ref.size();
  out.f1 = out.precision + out.recall > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

double csc(const LinkedDataset& pred, const LinkedDataset& ref) {
  std::map<std::string, Vector> pred_cols = dataset_columns(pred);
  std::map<std::string, Vector> ref_cols = dataset_columns(ref);

  std::set<std::string> pred_attrs, ref_attrs;
  for (const auto& [name, _] : pred_cols) pred_attrs.insert(name);
  for (const auto& [name, _] : ref_cols) ref_attrs.insert(name);
  double aj = jaccard(pred_attrs, ref_attrs);

  std::set<std::string> pred_samples(pred.sample_ids.begin(), pred.sample_ids.end());
  std::set<std::string> ref_samples(ref.sample_ids.begin(), ref.sample_ids.end());
  double sj = jaccard(pred_samples, ref_samples);

  std::vector<std::string> shared_samples;
  for (const auto& s : pred_samples)
    if (ref_samples.count(s)) shared_samples.push_back(s);

  std::unordered_map<std::string, Eigen::Index> pred_row, ref_row;
  for (size_t i = 0; i < pred.sample_ids.size(); ++i)
    pred_row[pred.sample_ids[i]] = static_cast<Eigen::Index>(i);
  for (size_t i = 0; i < ref.sample_ids.size(); ++i)
    ref_row[ref.sample_ids[i]] = static_cast<Eigen::Index>(i);

  double corr_sum = 0.0;
  long corr_count = 0;
  for (const auto& [name, pv] : pred_cols) {
    auto it = ref_cols.find(name);
    if (it == ref_cols.end() || shared_samples.empty()) continue;
    Vector a(static_cast<Eigen::Index>(shared_samples.size()));
    Vector b(static_cast<Eigen::Index>(shared_samples.size()));
    for (size_t i = 0; i < shared_samples.size(); ++i) {
      a(static_cast<Eigen::Index>(i)) = pv(pred_row[shared_samples[i]]);
      b(static_cast<Eigen::Index>(i)) = it->second(ref_row[shared_samples[i]]);
    }
    double r;
    if (vectors_equal(a, b))
      r = 1.0;
    else if (vector_constant(a) || vector_constant(b))
      r = 0.0;
    else
      r = pearson(a, b);
    corr_sum += r;
    ++corr_count;
  }
  if (corr_count == 0) return 0.0;
  return aj * sj * (corr_sum / corr_count);
}

double auroc(const GeneScoreList& scores, const std::set<std::string>& ref) {
  for (const auto& [symbol, _] : scores.scores)
    if (!scores.universe.count(symbol))
      fail(Errc::invalid_input, "scored symbol '" + symbol + "' not in universe");
  for (const auto& symbol : ref)
    if (!scores.universe.count(symbol))
      fail(Errc::invalid_input, "reference symbol '" + symbol + "' not in universe");

  size_t n_pos = ref.size();
  size_t n_neg = scores.universe.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    fail(Errc::degenerate_labels, "AUROC needs a positive and a negative gene");

  std::vector<std::pair<double, bool>> items;
  items.reserve(scores.universe.size());
  for (const auto& symbol : scores.universe)
    items.emplace_back(scores.score(symbol), ref.count(symbol) > 0);
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Rank sum of positives with average ranks over score ties.
  double rank_sum = 0.0;
  size_t i = 0;
  while (i < items.size()) {
    size_t j = i;
    while (j < items.size() && items[j].first == items[i].first) ++j;
    double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (size_t k = i; k < j; ++k)
      if (items[k].second) rank_sum += avg_rank;
    i = j;
  }
  double u = rank_sum - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double gsea_es(const GeneScoreList& scores, const std::set<std::string>& gene_set,
               double weight) {
  size_t n_hits = intersection_size(gene_set, scores.universe);
  if (n_hits == 0)
    fail(Errc::invalid_input, "gene set does not intersect the universe");
  if (n_hits == scores.universe.size())
    fail(Errc::invalid_input, "gene set covers the whole universe");

  // Descending score, ties broken by symbol for a deterministic ranking.
  std::vector<std::pair<std::string, double>> ranked;
  ranked.reserve(scores.universe.size());
  for (const auto& symbol : scores.universe)
    ranked.emplace_back(symbol, scores.score(symbol));
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  double hit_norm = 0.0;
  for (const auto& [symbol, score] : ranked)
    if (gene_set.count(symbol))
      hit_norm += weight == 0.0 ? 1.0 : std::pow(std::abs(score), weight);
  const double miss_step =
      1.0 / static_cast<double>(scores.universe.size() - n_hits);

  double running = 0.0, extreme = 0.0;
  for (const auto& [symbol, score] : ranked) {
    if (gene_set.count(symbol)) {
      double w = weight == 0.0 ? 1.0 : std::pow(std::abs(score), weight);
      // All-zero hit scores degrade to the unweighted statistic.
      running += hit_norm > 0.0 ? w / hit_norm
                                : 1.0 / static_cast<double>(n_hits);
    } else {
      running -= miss_step;
    }
    if (std::abs(running) > std::abs(extreme)) extreme = running;
  }
  return extreme;
}

double df_f1(const std::map<std::string, bool>& preds,
             const std::map<std::string, bool>& refs) {
  if (preds.size() != refs.size())
    fail(Errc::invalid_input, "prediction and reference cohorts differ");
  long tp = 0, fp = 0, fn = 0;
  for (const auto& [id, truth] : refs) {
    auto it = preds.find(id);
    if (it == preds.end())
      fail(Errc::invalid_input, "no prediction for cohort '" + id + "'");
    if (it->second && truth) ++tp;
    if (it->second && !truth) ++fp;
    if (!it->second && truth) ++fn;
  }
  if (tp + fp + fn == 0) return 1.0;  // full agreement on all-negative
  return 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
}

double ds_accuracy(
    const std::map<std::string, std::vector<std::string>>& preds,
    const std::map<std::string, std::vector<std::string>>& refs) {
  if (preds.size() != refs.size())
    fail(Errc::invalid_input, "prediction and reference problems differ");
  if (refs.empty()) return 1.0;
  long hits = 0;
  for (const auto& [key, truth] : refs) {
    auto it = preds.find(key);
    if (it == preds.end())
      fail(Errc::invalid_input, "no selection for problem '" + key + "'");
    std::vector<std::string> a = it->second, b = truth;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a == b) ++hits;
  }
  return static_cast<double>(hits) / refs.size();
}

}  // namespace gta::metrics
