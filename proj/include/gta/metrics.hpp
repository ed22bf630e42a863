#pragma once

#include <map>
#include <set>

#include "gta/types.hpp"

namespace gta::metrics {

// Ranked gene scores over a universe; universe genes without an explicit
// score count as 0.
struct GeneScoreList {
  std::set<std::string> universe;
  std::map<std::string, double> scores;

  double score(const std::string& symbol) const {
    auto it = scores.find(symbol);
    return it == scores.end() ? 0.0 : it->second;
  }
};

// |A n B| / |A u B|; two empty sets agree perfectly.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Prf set_prf(const std::set<std::string>& pred, const std::set<std::string>& ref);

// Attribute Jaccard x Sample Jaccard x mean Pearson correlation of shared
// columns over shared samples. Constant shared vectors contribute 1 when
// bit-equal, else 0.
double csc(const LinkedDataset& pred, const LinkedDataset& ref);

// Rank-based AUROC with tie correction.
double auroc(const GeneScoreList& scores, const std::set<std::string>& ref);

// Enrichment score: signed extreme of the weighted hit/miss running sum
// over the universe ranked by descending score.
double gsea_es(const GeneScoreList& scores, const std::set<std::string>& gene_set,
               double weight = 1.0);

// F1 of usability predictions, "usable" as the positive class.
double df_f1(const std::map<std::string, bool>& preds,
             const std::map<std::string, bool>& refs);

// Fraction of problems whose selection matches exactly; pair selections
// compare order-insensitively.
double ds_accuracy(
    const std::map<std::string, std::vector<std::string>>& preds,
    const std::map<std::string, std::vector<std::string>>& refs);

struct EvalReport {
  std::optional<double> df_f1;
  std::optional<double> ds_accuracy;
  std::optional<double> attribute_jaccard;
  std::optional<double> sample_jaccard;
  std::optional<double> csc;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::optional<double> auroc;
  std::optional<double> gsea_es;
};

}  // namespace gta::metrics
