#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gta/rng.hpp"
#include "gta/stats.hpp"
#include "gta/synth.hpp"
#include "oracles.hpp"

using namespace gta;
using namespace gta::stats;

namespace {

double selection_f1(const std::vector<int>& selected,
                    const std::vector<std::string>& names,
                    const std::set<std::string>& truth) {
  std::set<std::string> pred;
  for (int idx : selected) pred.insert(names[static_cast<size_t>(idx)]);
  int tp = 0;
  for (const auto& s : pred)
    if (truth.count(s)) ++tp;
  double precision = pred.empty() ? 0.0 : static_cast<double>(tp) / pred.size();
  double recall = truth.empty() ? 0.0 : static_cast<double>(tp) / truth.size();
  return precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0;
}

}  // namespace

TEST_CASE("tuner basics") {
  synth::SynthConfig cfg;
  cfg.n = 40;
  cfg.p = 10;
  cfg.k = 2;
  cfg.seed = 5;
  auto data = synth::gen_linear(cfg);
  DesignMatrices dm;
  dm.X = data.X;
  dm.y = data.y;
  dm.y_kind = VarKind::continuous;

  SUBCASE("grid of one returns it") {
    TuneOutcome one = tune_hyperparameters(ModelKind::lasso, dm, {{0.5}, 5, 1});
    CHECK(one.best == 0.5);
  }
  SUBCASE("identical scores keep the smallest penalty") {
    // every penalty is far beyond lambda_max, so all fits are all-zero and
    // every score ties
    TuneOutcome tied =
        tune_hyperparameters(ModelKind::lasso, dm, {{1e7, 1e5, 1e6}, 5, 1});
    CHECK(tied.best == 1e5);
  }
  SUBCASE("too few samples") {
    DesignMatrices tiny;
    tiny.X = dm.X.topRows(3);
    tiny.y = dm.y.head(3);
    CHECK_THROWS_AS(
        tune_hyperparameters(ModelKind::lasso, tiny, {{0.1}, 5, 1}), Error);
  }
}

TEST_CASE("tuned penalty lands within one grid step of the oracle") {
  // oracle: penalty with the best raw prediction score on a large held-out
  // draw from the same process
  synth::SynthConfig cfg;
  cfg.n = 150;
  cfg.p = 80;
  cfg.k = 6;
  cfg.beta_scale = 1.0;
  cfg.sigma_eps = 0.2;
  cfg.seed = 31;
  auto train = synth::gen_linear(cfg);
  synth::SynthConfig big = cfg;
  big.n = 2000;
  big.seed = 32;
  auto test = synth::gen_linear(big);
  // same planted coefficients for the held-out draw
  Vector y_test = test.X * train.beta;
  {
    Rng rng(33);
    for (int i = 0; i < big.n; ++i) y_test(i) += cfg.sigma_eps * rng.normal();
  }

  std::vector<double> grid = default_lambda_grid();
  DesignMatrices dm;
  dm.X = train.X;
  dm.y = train.y;
  dm.y_kind = VarKind::continuous;
  TuneOutcome tuned = tune_hyperparameters(ModelKind::lasso, dm, {grid, 5, 3});

  double best_oracle = grid[0], best_score = -1e300;
  for (double alpha : grid) {
    ZScale xs;
    Matrix Xz = zscore(dm.X, &xs);
    double ym, ysd;
    Vector yz = zscore_vector(dm.y, &ym, &ysd);
    LassoOptions opts;
    opts.lambda = alpha * dm.X.rows();
    LassoFit fit = lasso_fit(Xz, yz, nullptr, opts);
    Vector pred = apply_zscore(test.X, xs) * fit.beta;
    pred = pred.array() * (ysd > 0 ? ysd : 1.0) + ym;
    double score = -(y_test - pred).squaredNorm();
    if (score > best_score) {
      best_score = score;
      best_oracle = alpha;
    }
  }
  double ratio = tuned.best / best_oracle;
  CHECK(ratio <= 10.0 + 1e-9);
  CHECK(ratio >= 0.1 - 1e-12);
}

TEST_CASE("lmm tuning searches the variance-ratio grid by likelihood") {
  Rng rng(41);
  int n = 60, p = 90;
  Matrix X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
  X = zscore(X);
  Vector a(p);
  for (int j = 0; j < p; ++j) a(j) = rng.normal() / std::sqrt(static_cast<double>(p));
  Vector y = X * a;
  for (int i = 0; i < n; ++i) y(i) += rng.normal();
  DesignMatrices dm;
  dm.X = X;
  dm.y = y;
  TuneOutcome out =
      tune_hyperparameters(ModelKind::lmm, dm, {default_delta_grid(), 5, 1});
  CHECK(out.scores.size() == out.grid.size());
  DeltaEstimate direct = estimate_delta(X, y);
  CHECK(out.best == direct.delta);
}

TEST_CASE("two-step regression with a noiseless condition") {
  synth::SynthConfig cfg;
  cfg.n = 120;
  cfg.p = 40;
  cfg.k = 4;
  cfg.n_common = 5;
  cfg.beta_scale = 1.0;
  cfg.sigma_eps = 0.0;  // noiseless condition model
  cfg.alpha = 1.0;
  cfg.seed = 51;
  auto pair = synth::gen_condition_pair(cfg);

  AnalysisOptions opts;
  opts.seed = 4;
  // penalties small enough that the condition fit is essentially exact
  opts.lambda_grid = {1e-12, 1e-11, 1e-10, 1e-9};
  std::set<std::string> known(pair.common_regressors.begin(),
                              pair.common_regressors.end());
  DesignMatrices dm = two_step_regress(pair.trait_ds, pair.cond_ds, known, opts);
  REQUIRE(dm.C.has_value());
  CHECK((dm.C->col(0) - pair.true_condition).cwiseAbs().maxCoeff() < 1e-6);
  // common regressors left the feature set
  for (const auto& name : dm.feature_names) CHECK(!known.count(name));
}

TEST_CASE("two-step failure modes") {
  synth::SynthConfig cfg;
  cfg.n = 40;
  cfg.p = 12;
  cfg.k = 2;
  cfg.n_common = 3;
  cfg.seed = 52;
  auto pair = synth::gen_condition_pair(cfg);
  AnalysisOptions opts;

  SUBCASE("no shared known gene") {
    try {
      two_step_regress(pair.trait_ds, pair.cond_ds, {"NOPE"}, opts);
      FAIL("expected NoCommonRegressors");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::no_common_regressors);
    }
  }
  SUBCASE("constant condition") {
    LinkedDataset flat = pair.cond_ds;
    int c = flat.trait_column();
    flat.clinical.values.col(c).setConstant(1.0);
    std::set<std::string> known(pair.common_regressors.begin(),
                                pair.common_regressors.end());
    CHECK_THROWS_AS(two_step_regress(pair.trait_ds, flat, known, opts), Error);
  }
}

TEST_CASE("conditional fit recovers the trait support next to a real condition") {
  synth::SynthConfig cfg;
  cfg.n = 150;
  cfg.p = 400;
  cfg.k = 5;
  cfg.n_common = 6;
  cfg.beta_scale = 1.0;
  cfg.sigma_eps = 0.1;
  cfg.alpha = 1.0;
  cfg.seed = 53;
  auto pair = synth::gen_condition_pair(cfg);

  AnalysisInput input;
  input.trait_ds = pair.trait_ds;
  input.cond_ds = pair.cond_ds;
  input.known_condition_genes.insert(pair.common_regressors.begin(),
                                     pair.common_regressors.end());
  AnalysisOptions opts;
  opts.seed = 11;
  GTAProblem problem{"Trait", "Condition"};
  RegressionResult res = run_gta_analysis(problem, input, opts);
  std::set<std::string> truth(pair.trait_support.begin(), pair.trait_support.end());
  CHECK(selection_f1(res.selected, res.feature_names, truth) >= 0.9);
}

TEST_CASE("unconditional analysis takes the penalized path and finds the support") {
  synth::SynthConfig cfg;
  cfg.n = 150;
  cfg.p = 400;
  cfg.k = 6;
  cfg.beta_scale = 1.0;
  cfg.sigma_eps = 0.1;
  cfg.seed = 61;
  auto data = synth::gen_linear(cfg);
  LinkedDataset ds = synth::make_linked("T", VarKind::continuous, data.y,
                                        data.X, "S", "G");
  AnalysisInput input;
  input.trait_ds = ds;
  AnalysisOptions opts;
  opts.seed = 9;
  RegressionResult res = run_gta_analysis({"T", std::nullopt}, input, opts);
  CHECK(res.model == ModelKind::lasso);
  std::set<std::string> truth;
  for (int j : data.support) truth.insert(ds.gene_symbols[static_cast<size_t>(j)]);
  CHECK(selection_f1(res.selected, res.feature_names, truth) >= 0.9);
  CHECK(res.cv.grid.size() == opts.lambda_grid.size());
}

TEST_CASE("batched data takes the mixed-model path") {
  synth::SynthConfig cfg;
  cfg.n = 100;
  cfg.p = 120;
  cfg.k = 5;
  cfg.n_batches = 2;
  cfg.batch_shift = 3.0;
  cfg.sigma_u = 1.0;
  cfg.sigma_eps = 0.1;
  cfg.seed = 62;
  auto data = synth::gen_batched(cfg);
  LinkedDataset ds = synth::make_linked("T", VarKind::continuous, data.y,
                                        data.X, "S", "G");
  AnalysisInput input;
  input.trait_ds = ds;
  AnalysisOptions opts;
  RegressionResult res = run_gta_analysis({"T", std::nullopt}, input, opts);
  CHECK(res.model == ModelKind::lmm);
  CHECK(!is_missing(res.delta));
  CHECK(res.adjusted_p.size() == res.coefficients.size());

  SUBCASE("rotation route is selectable") {
    AnalysisOptions rot = opts;
    rot.use_rotation = true;
    RegressionResult r2 = run_gta_analysis({"T", std::nullopt}, input, rot);
    CHECK(r2.model == ModelKind::lasso);
    CHECK(!is_missing(r2.delta));
  }
}

TEST_CASE("constant trait and bad conditions are rejected") {
  synth::SynthConfig cfg;
  cfg.n = 30;
  cfg.p = 10;
  cfg.k = 1;
  cfg.seed = 63;
  auto data = synth::gen_linear(cfg);
  LinkedDataset ds = synth::make_linked("T", VarKind::continuous,
                                        Vector::Ones(cfg.n), data.X, "S", "G");
  AnalysisInput input;
  input.trait_ds = ds;
  CHECK_THROWS_AS(run_gta_analysis({"T", std::nullopt}, input, {}), Error);
  CHECK_THROWS_AS(run_gta_analysis({"T", "T"}, input, {}), Error);
  CHECK_THROWS_AS(run_gta_analysis({"T", "Age"}, input, {}), Error);   // no Age column
  CHECK_THROWS_AS(run_gta_analysis({"T", "Other"}, input, {}), Error); // no cond_ds
}

TEST_CASE("age condition enters the design") {
  synth::SynthConfig cfg;
  cfg.n = 200;
  cfg.p = 300;
  cfg.k = 6;
  cfg.beta_scale = 1.0;
  cfg.sigma_eps = 0.1;
  cfg.seed = 64;
  auto data = synth::gen_linear(cfg);
  Rng rng(65);
  Vector age(cfg.n);
  for (int i = 0; i < cfg.n; ++i) age(i) = 30.0 + 40.0 * rng.uniform();
  // the trait leans on age as well as on the planted genes
  Vector y = data.y + 0.2 * age;
  LinkedDataset ds =
      synth::make_linked("T", VarKind::continuous, y, data.X, "S", "G", age);
  AnalysisInput input;
  input.trait_ds = ds;
  AnalysisOptions opts;
  opts.seed = 3;
  RegressionResult res = run_gta_analysis({"T", "Age"}, input, opts);
  CHECK(res.model == ModelKind::lasso);
  std::set<std::string> truth;
  for (int j : data.support) truth.insert(ds.gene_symbols[static_cast<size_t>(j)]);
  CHECK(selection_f1(res.selected, res.feature_names, truth) >= 0.9);
}

TEST_CASE("trait prediction: separable classes score perfectly") {
  Rng rng(71);
  int n = 60, p = 20;
  Matrix X(n, p);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    y(i) = i < n / 2 ? 0.0 : 1.0;
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    X(i, 0) += y(i) == 1.0 ? 6.0 : -6.0;  // wide margin on one feature
  }
  LinkedDataset ds = synth::make_linked("T", VarKind::binary, y, X, "S", "G");
  AnalysisOptions opts;
  opts.seed = 17;
  TraitCvReport report = predict_trait_cv(ds, opts);
  CHECK(report.accuracy == 1.0);
  CHECK(report.f1 == 1.0);
}

TEST_CASE("trait prediction on shuffled labels hovers near chance") {
  double total = 0.0;
  const int seeds = 5;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(900 + static_cast<std::uint64_t>(s));
    int n = 80, p = 30;
    Matrix X(n, p);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
      y(i) = i % 2;
      for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    }
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    rng.shuffle(perm);
    Vector shuffled(n);
    for (int i = 0; i < n; ++i) shuffled(i) = y(perm[static_cast<size_t>(i)]);
    LinkedDataset ds =
        synth::make_linked("T", VarKind::binary, shuffled, X, "S", "G");
    AnalysisOptions opts;
    opts.seed = static_cast<std::uint64_t>(s);
    total += predict_trait_cv(ds, opts).accuracy;
  }
  double mean = total / seeds;
  CHECK(mean > 0.3);
  CHECK(mean < 0.7);
}

TEST_CASE("trait prediction rejects non-binary and constant traits") {
  synth::SynthConfig cfg;
  cfg.n = 30;
  cfg.p = 8;
  cfg.k = 1;
  cfg.seed = 72;
  auto data = synth::gen_linear(cfg);
  LinkedDataset cont = synth::make_linked("T", VarKind::continuous, data.y,
                                          data.X, "S", "G");
  CHECK_THROWS_AS(predict_trait_cv(cont, {}), Error);
  LinkedDataset ones = synth::make_linked("T", VarKind::binary,
                                          Vector::Ones(cfg.n), data.X, "S", "G");
  try {
    predict_trait_cv(ones, {});
    FAIL("expected InvalidInput");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_input);
  }
}

TEST_CASE("validation-fold corruption never touches the training fit") {
  Rng rng(81);
  int n = 50, p = 15;
  Matrix X(n, p);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    y(i) = i % 2;
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    X(i, 2) += y(i) * 2.0;
  }
  LinkedDataset clean = synth::make_linked("T", VarKind::binary, y, X, "S", "G");

  AnalysisOptions opts;
  opts.seed = 23;
  TraitCvReport base = predict_trait_cv(clean, opts);

  // corrupt one feature on the validation rows of fold 0 only
  std::vector<int> assign = cv_fold_assignment(n, opts.folds, opts.seed);
  Matrix corrupted = X;
  for (int i = 0; i < n; ++i)
    if (assign[static_cast<size_t>(i)] == 0) corrupted(i, 5) = 1e9;
  LinkedDataset dirty =
      synth::make_linked("T", VarKind::binary, y, corrupted, "S", "G");
  TraitCvReport poisoned = predict_trait_cv(dirty, opts);

  REQUIRE(base.folds.size() == poisoned.folds.size());
  // fold 0 trains on untouched rows: its fit must be bit-identical
  CHECK(base.folds[0].lambda == poisoned.folds[0].lambda);
  CHECK((base.folds[0].beta - poisoned.folds[0].beta).cwiseAbs().maxCoeff() == 0.0);
  CHECK(base.folds[0].y_mean == poisoned.folds[0].y_mean);
  CHECK(base.folds[0].y_sd == poisoned.folds[0].y_sd);
}

TEST_CASE("two-step with a null condition coefficient behaves like the direct fit") {
  // alpha = 0: the condition plays no role, so conditioning should not cost
  // much selection quality
  double diff_total = 0.0;
  const int seeds = 3;
  for (int s = 0; s < seeds; ++s) {
    synth::SynthConfig cfg;
    cfg.n = 120;
    cfg.p = 300;
    cfg.k = 4;
    cfg.n_common = 5;
    cfg.beta_scale = 1.0;
    cfg.sigma_eps = 0.1;
    cfg.alpha = 0.0;
    cfg.seed = 7000 + static_cast<std::uint64_t>(s);
    auto pair = synth::gen_condition_pair(cfg);
    std::set<std::string> truth(pair.trait_support.begin(),
                                pair.trait_support.end());

    AnalysisInput with_cond;
    with_cond.trait_ds = pair.trait_ds;
    with_cond.cond_ds = pair.cond_ds;
    with_cond.known_condition_genes.insert(pair.common_regressors.begin(),
                                           pair.common_regressors.end());
    AnalysisOptions opts;
    opts.seed = static_cast<std::uint64_t>(s);
    RegressionResult conditional =
        run_gta_analysis({"Trait", "Condition"}, with_cond, opts);

    AnalysisInput direct;
    direct.trait_ds = pair.trait_ds;
    RegressionResult plain =
        run_gta_analysis({"Trait", std::nullopt}, direct, opts);

    double f1_cond = selection_f1(conditional.selected, conditional.feature_names, truth);
    double f1_plain = selection_f1(plain.selected, plain.feature_names, truth);
    diff_total += std::abs(f1_cond - f1_plain);
  }
  CHECK(diff_total / seeds < 0.1);
}
