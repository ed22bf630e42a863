#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gta/metrics.hpp"
#include "gta/rng.hpp"
#include "gta/synth.hpp"
#include "oracles.hpp"

using namespace gta;
using namespace gta::metrics;

TEST_CASE("jaccard") {
  CHECK(jaccard({"a", "b"}, {"b", "c"}) == doctest::Approx(1.0 / 3.0));
  CHECK(jaccard({"a"}, {"a"}) == 1.0);
  CHECK(jaccard({"a"}, {"b"}) == 0.0);
  CHECK(jaccard({}, {}) == 1.0);
  CHECK(jaccard({}, {"a"}) == 0.0);
}

TEST_CASE("set precision/recall/F1") {
  Prf prf = set_prf({"a", "b"}, {"b", "c"});
  CHECK(prf.precision == 0.5);
  CHECK(prf.recall == 0.5);
  CHECK(prf.f1 == 0.5);

  Prf perfect = set_prf({"a"}, {"a"});
  CHECK(perfect.f1 == 1.0);

  Prf both_empty = set_prf({}, {});
  CHECK(both_empty.precision == 1.0);
  CHECK(both_empty.recall == 1.0);
  CHECK(both_empty.f1 == 1.0);

  Prf empty_pred = set_prf({}, {"a"});
  CHECK(empty_pred.precision == 0.0);
  CHECK(empty_pred.recall == 0.0);
  CHECK(empty_pred.f1 == 0.0);
}

namespace {

LinkedDataset tiny_dataset(std::uint64_t seed) {
  Rng rng(seed);
  int n = 6, p = 3;
  Matrix X(n, p);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    y(i) = i % 2;
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
  }
  return synth::make_linked("T", VarKind::binary, y, X, "S", "G");
}

}  // namespace

TEST_CASE("csc of a dataset with itself is exactly one") {
  LinkedDataset ds = tiny_dataset(1);
  CHECK(csc(ds, ds) == 1.0);
}

TEST_CASE("csc worked example: one extra reference column") {
  // reference has 4 columns, prediction the 3 shared ones, all values equal:
  // AJ = 3/4, SJ = 1, mean correlation = 1 -> 0.75
  LinkedDataset ref = tiny_dataset(2);  // T + G0001..G0003
  LinkedDataset pred = ref;
  pred.gene_symbols.pop_back();
  pred.genes.conservativeResize(pred.genes.rows(), 2);
  CHECK(csc(pred, ref) == doctest::Approx(0.75));
}

TEST_CASE("csc is zero without shared samples") {
  LinkedDataset pred = tiny_dataset(4);
  LinkedDataset ref = pred;
  for (auto& s : ref.sample_ids) s = "Z" + s;
  ref.clinical.sample_ids = ref.sample_ids;
  CHECK(csc(pred, ref) == 0.0);
}

TEST_CASE("csc handles constant columns by bit-equality") {
  LinkedDataset pred = tiny_dataset(5);
  pred.genes.col(0).setConstant(2.5);
  LinkedDataset same = pred;
  CHECK(csc(pred, same) == 1.0);
  LinkedDataset diff = pred;
  diff.genes.col(0).setConstant(3.5);
  CHECK(csc(pred, diff) < 1.0);
}

TEST_CASE("csc is symmetric") {
  LinkedDataset a = tiny_dataset(6);
  LinkedDataset b = tiny_dataset(7);
  b.gene_symbols[0] = "OTHER";
  CHECK(csc(a, b) == doctest::Approx(csc(b, a)).epsilon(1e-12));
}

namespace {

GeneScoreList scored(const std::vector<std::pair<std::string, double>>& entries,
                     const std::vector<std::string>& extra_universe = {}) {
  GeneScoreList list;
  for (const auto& [symbol, score] : entries) {
    list.scores[symbol] = score;
    list.universe.insert(symbol);
  }
  for (const auto& symbol : extra_universe) list.universe.insert(symbol);
  return list;
}

}  // namespace

TEST_CASE("auroc basics") {
  GeneScoreList list = scored({{"a", 3.0}, {"b", 2.0}, {"c", 0.5}, {"d", 0.1}});
  CHECK(auroc(list, {"a", "b"}) == 1.0);
  CHECK(auroc(list, {"c", "d"}) == 0.0);

  GeneScoreList ties = scored({{"a", 1.0}, {"b", 1.0}, {"c", 1.0}, {"d", 1.0}});
  CHECK(auroc(ties, {"a", "c"}) == 0.5);

  CHECK_THROWS_AS(auroc(list, {}), Error);
  CHECK_THROWS_AS(auroc(list, {"a", "b", "c", "d"}), Error);
}

TEST_CASE("unscored universe genes count as zero") {
  GeneScoreList list = scored({{"a", 1.0}}, {"b", "c"});
  // positives: a (score 1) and b (score 0, tied with c)
  double value = auroc(list, {"a", "b"});
  // pairs: (a,c): win, (b,c): tie -> (1 + 0.5) / 2
  CHECK(value == doctest::Approx(0.75));
}

TEST_CASE("auroc equals the pairwise oracle on random instances") {
  Rng rng(91);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + static_cast<int>(rng.bounded(499));
    GeneScoreList list;
    std::vector<double> scores;
    std::vector<bool> labels;
    int positives = 0;
    for (int g = 0; g < n; ++g) {
      std::string name = "G" + std::to_string(g);
      double score = rng.bounded(4) == 0 ? 0.0 : rng.normal();  // force ties
      list.universe.insert(name);
      list.scores[name] = score;
      scores.push_back(score);
      labels.push_back(rng.bounded(3) == 0);
      positives += labels.back();
    }
    if (positives == 0 || positives == n) continue;
    std::set<std::string> ref;
    for (int g = 0; g < n; ++g)
      if (labels[static_cast<size_t>(g)]) ref.insert("G" + std::to_string(g));
    double ours = auroc(list, ref);
    double truth = oracles::auroc_pairwise(scores, labels);
    CHECK(std::abs(ours - truth) < 1e-12);
  }
}

TEST_CASE("negating scores flips auroc") {
  Rng rng(92);
  GeneScoreList list;
  std::set<std::string> ref;
  for (int g = 0; g < 50; ++g) {
    std::string name = "G" + std::to_string(g);
    list.universe.insert(name);
    list.scores[name] = rng.normal();
    if (rng.bounded(2)) ref.insert(name);
  }
  if (ref.empty() || ref.size() == 50) return;
  GeneScoreList negated = list;
  for (auto& [_, v] : negated.scores) v = -v;
  CHECK(auroc(list, ref) + auroc(negated, ref) == doctest::Approx(1.0));
}

TEST_CASE("enrichment score basics") {
  // one hit at the top of four, weight 0: first step climbs to 1
  GeneScoreList list =
      scored({{"a", 5.0}, {"b", 1.0}, {"c", 0.5}, {"d", 0.2}});
  CHECK(gsea_es(list, {"a"}, 0.0) == doctest::Approx(1.0));

  // hits at the top give a positive score, hits at the bottom a negative one
  CHECK(gsea_es(list, {"a", "b"}, 1.0) > 0.0);
  CHECK(gsea_es(list, {"c", "d"}, 1.0) < 0.0);

  CHECK_THROWS_AS(gsea_es(list, {"zzz"}, 1.0), Error);
  CHECK_THROWS_AS(gsea_es(list, {"a", "b", "c", "d"}, 1.0), Error);
}

TEST_CASE("enrichment score equals the running-sum oracle; walk closes at zero") {
  Rng rng(93);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 5 + static_cast<int>(rng.bounded(60));
    std::vector<std::pair<std::string, double>> entries;
    GeneScoreList list;
    std::set<std::string> hits;
    for (int g = 0; g < n; ++g) {
      std::string name = "G" + std::to_string(g);
      double score = rng.bounded(5) == 0 ? 0.0 : rng.normal();
      entries.emplace_back(name, score);
      list.universe.insert(name);
      list.scores[name] = score;
      if (rng.bounded(4) == 0) hits.insert(name);
    }
    if (hits.empty() || hits.size() == static_cast<size_t>(n)) continue;
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    double weight = trial % 2 ? 1.0 : 0.0;
    double ours = gsea_es(list, hits, weight);
    double truth = oracles::gsea_runsum(entries, hits, weight);
    CHECK(ours == doctest::Approx(truth).epsilon(1e-12));

    // closure: the full walk returns to zero
    double norm = 0.0;
    long n_hits = 0;
    for (const auto& [name, score] : entries)
      if (hits.count(name)) {
        norm += weight == 0.0 ? 1.0 : std::abs(score);
        ++n_hits;
      }
    double running = 0.0;
    for (const auto& [name, score] : entries) {
      if (hits.count(name))
        running += norm > 0 ? (weight == 0.0 ? 1.0 : std::abs(score)) / norm
                            : 1.0 / n_hits;
      else
        running -= 1.0 / static_cast<double>(n - n_hits);
    }
    CHECK(std::abs(running) < 1e-9);
  }
}

TEST_CASE("dataset filtering F1") {
  std::map<std::string, bool> refs{{"a", true}, {"b", false}, {"c", true},
                                   {"d", false}};
  CHECK(df_f1(refs, refs) == 1.0);

  std::map<std::string, bool> flipped;
  for (const auto& [k, v] : refs) flipped[k] = !v;
  CHECK(df_f1(flipped, refs) == 0.0);

  // half right: predictions agree on a (TP) and b (TN), miss c, add d
  std::map<std::string, bool> half{{"a", true}, {"b", false}, {"c", false},
                                   {"d", true}};
  // confusion: TP=1, FP=1, FN=1 -> F1 = 2/4
  CHECK(df_f1(half, refs) == doctest::Approx(0.5));

  std::map<std::string, bool> wrong_keys{{"a", true}};
  CHECK_THROWS_AS(df_f1(wrong_keys, refs), Error);
}

TEST_CASE("dataset selection accuracy") {
  std::map<std::string, std::vector<std::string>> refs{
      {"p1", {"A"}}, {"p2", {"B", "C"}}, {"p3", {"D"}}};
  CHECK(ds_accuracy(refs, refs) == 1.0);

  std::map<std::string, std::vector<std::string>> swapped = refs;
  swapped["p2"] = {"C", "B"};  // pair order is irrelevant
  CHECK(ds_accuracy(swapped, refs) == 1.0);

  std::map<std::string, std::vector<std::string>> misses{
      {"p1", {"X"}}, {"p2", {"Y"}}, {"p3", {"Z"}}};
  CHECK(ds_accuracy(misses, refs) == 0.0);

  std::map<std::string, std::vector<std::string>> partial = refs;
  partial["p1"] = {"X"};
  CHECK(ds_accuracy(partial, refs) == doctest::Approx(2.0 / 3.0));

  std::map<std::string, std::vector<std::string>> bad{{"p9", {"A"}}};
  CHECK_THROWS_AS(ds_accuracy(bad, refs), Error);
}
