#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gta/clinical.hpp"
#include "gta/genes.hpp"
#include "gta/ingest.hpp"
#include "gta/io.hpp"
#include "gta/rng.hpp"
#include "gta/synth.hpp"

using namespace gta;
using namespace gta::synth;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("gta_synth_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
  SynthConfig cfg;
  cfg.n = 20;
  cfg.p = 15;
  cfg.k = 3;
  cfg.seed = 77;
  auto a = gen_linear(cfg);
  auto b = gen_linear(cfg);
  CHECK(a.X == b.X);
  CHECK(a.y == b.y);
  CHECK(a.support == b.support);
  cfg.seed = 78;
  auto c = gen_linear(cfg);
  CHECK(a.X != c.X);
}

TEST_CASE("noiseless single-effect generation is proportional to one column") {
  SynthConfig cfg;
  cfg.n = 25;
  cfg.p = 10;
  cfg.k = 1;
  cfg.beta_scale = 2.5;
  cfg.sigma_eps = 0.0;
  cfg.seed = 3;
  auto data = gen_linear(cfg);
  REQUIRE(data.support.size() == 1);
  int j = data.support[0];
  CHECK((data.y - 2.5 * data.X.col(j)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noise magnitude matches the configured sd") {
  SynthConfig cfg;
  cfg.n = 10000;
  cfg.p = 5;
  cfg.k = 2;
  cfg.sigma_eps = 0.7;
  cfg.seed = 9;
  auto data = gen_linear(cfg);
  Vector resid = data.y - data.X * data.beta;
  double sd = std::sqrt(resid.squaredNorm() / cfg.n);
  CHECK(sd == doctest::Approx(0.7).epsilon(0.05));
}

TEST_CASE("config validation") {
  SynthConfig bad;
  bad.n = 0;
  CHECK_THROWS_AS(validate_config(bad), Error);
  SynthConfig bad_k;
  bad_k.k = 99;
  bad_k.p = 10;
  CHECK_THROWS_AS(validate_config(bad_k), Error);
  SynthConfig bad_common;
  bad_common.n_common = 0;
  CHECK_THROWS_AS(gen_condition_pair(bad_common), Error);
  SynthConfig too_many;
  too_many.p = 10;
  too_many.k = 8;
  too_many.n_common = 5;
  CHECK_THROWS_AS(gen_condition_pair(too_many), Error);
}

TEST_CASE("batched generation shifts means and keeps labels contiguous") {
  SynthConfig cfg;
  cfg.n = 60;
  cfg.p = 30;
  cfg.k = 2;
  cfg.n_batches = 2;
  cfg.batch_shift = 3.0;
  cfg.sigma_u = 0.5;
  cfg.seed = 14;
  auto data = gen_batched(cfg);
  for (int i = 1; i < cfg.n; ++i)
    CHECK(data.batch_labels[static_cast<size_t>(i)] >=
          data.batch_labels[static_cast<size_t>(i - 1)]);
  double mean0 = 0, mean1 = 0;
  int n0 = 0, n1 = 0;
  for (int i = 0; i < cfg.n; ++i) {
    if (data.batch_labels[static_cast<size_t>(i)] == 0) {
      mean0 += data.X.row(i).mean();
      ++n0;
    } else {
      mean1 += data.X.row(i).mean();
      ++n1;
    }
  }
  CHECK(n0 == 30);
  CHECK(mean1 / n1 - mean0 / n0 == doctest::Approx(3.0).epsilon(0.2));
}

TEST_CASE("unshifted single-batch generation matches the plain model's moments") {
  SynthConfig cfg;
  cfg.n = 4000;
  cfg.p = 4;
  cfg.k = 1;
  cfg.n_batches = 2;
  cfg.batch_shift = 0.0;
  cfg.sigma_u = 0.0;
  cfg.sigma_eps = 0.5;
  cfg.seed = 15;
  auto batched = gen_batched(cfg);
  Vector resid = batched.y - batched.X * batched.beta;
  CHECK(std::abs(resid.mean()) < 0.05);
  CHECK(std::sqrt(resid.squaredNorm() / cfg.n) == doctest::Approx(0.5).epsilon(0.05));
  for (Eigen::Index j = 0; j < batched.X.cols(); ++j) {
    CHECK(std::abs(batched.X.col(j).mean()) < 0.08);
    double var = (batched.X.col(j).array() - batched.X.col(j).mean()).square().sum() / cfg.n;
    CHECK(var == doctest::Approx(1.0).epsilon(0.1));
  }
}

TEST_CASE("condition pair wiring") {
  SynthConfig cfg;
  cfg.n = 50;
  cfg.p = 20;
  cfg.k = 3;
  cfg.n_common = 4;
  cfg.sigma_eps = 0.0;
  cfg.seed = 16;
  auto pair = gen_condition_pair(cfg);
  CHECK(pair.common_regressors.size() == 4);
  CHECK(pair.trait_support.size() == 3);
  // support avoids the shared regressors
  for (const auto& s : pair.trait_support)
    CHECK(std::find(pair.common_regressors.begin(), pair.common_regressors.end(),
                    s) == pair.common_regressors.end());
  // both datasets expose the shared genes
  for (const auto& s : pair.common_regressors) {
    CHECK(std::find(pair.trait_ds.gene_symbols.begin(),
                    pair.trait_ds.gene_symbols.end(),
                    s) != pair.trait_ds.gene_symbols.end());
    CHECK(std::find(pair.cond_ds.gene_symbols.begin(),
                    pair.cond_ds.gene_symbols.end(),
                    s) != pair.cond_ds.gene_symbols.end());
  }
  // noiseless: condition dataset target is exactly the common-gene effect
  Matrix Xc(cfg.n, 4);
  for (int j = 0; j < 4; ++j) {
    auto it = std::find(pair.cond_ds.gene_symbols.begin(),
                        pair.cond_ds.gene_symbols.end(),
                        pair.common_regressors[static_cast<size_t>(j)]);
    Xc.col(j) = pair.cond_ds.genes.col(
        it - pair.cond_ds.gene_symbols.begin());
  }
  Vector expect = Xc.rowwise().sum() * cfg.beta_scale;
  CHECK((pair.cond_ds.trait_values() - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gls oracle") {
  Matrix X(4, 2);
  X << 1, 0, 0, 1, 1, 1, 0, 0;
  Vector y(4);
  y << 2, 3, 5, 1;
  Matrix V = Matrix::Identity(4, 4);
  Vector beta = gls_oracle(X, y, V);
  // identity covariance reduces to per-feature least squares
  CHECK(beta(0) == doctest::Approx(X.col(0).dot(y) / X.col(0).squaredNorm()));
  CHECK(beta(1) == doctest::Approx(X.col(1).dot(y) / X.col(1).squaredNorm()));

  Matrix singular = Matrix::Zero(4, 4);
  CHECK_THROWS_AS(gls_oracle(X, y, singular), Error);
  Matrix asym = V;
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(gls_oracle(X, y, asym), Error);
}

namespace {

LinkedDataset demo_dataset(std::uint64_t seed, bool with_demographics) {
  Rng rng(seed);
  int n = 12, p = 5;
  Matrix X(n, p);
  Vector y(n), age(n), gender(n);
  for (int i = 0; i < n; ++i) {
    y(i) = i % 2;
    age(i) = std::floor(25 + 50 * rng.uniform());
    gender(i) = static_cast<double>(rng.bounded(2));
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal() * 10;
  }
  if (with_demographics)
    return make_linked("Marker", VarKind::binary, y, X, "GSM", "G", age, gender);
  return make_linked("Marker", VarKind::binary, y, X, "GSM", "G");
}

}  // namespace

TEST_CASE("series-matrix fixture round trip, including clinical re-extraction") {
  LinkedDataset ds = demo_dataset(21, true);
  fs::path dir = temp_dir("series");
  auto files = write_fixture(ds, FixtureStyle::series_matrix, dir);
  CHECK(files.size() == 2);  // matrix + rules

  std::ifstream in(dir / "series_matrix.txt");
  auto parsed = ingest::parse_series_matrix(in);
  REQUIRE(parsed.expression.row_ids == ds.gene_symbols);
  REQUIRE(parsed.expression.sample_ids == ds.sample_ids);
  for (Eigen::Index g = 0; g < ds.genes.cols(); ++g)
    for (Eigen::Index i = 0; i < ds.genes.rows(); ++i)
      CHECK(parsed.expression.values(g, i) == ds.genes(i, g));  // full precision

  io::CohortRules rules = io::read_rules(dir / "rules.json");
  const io::BoundRule* trait = rules.find("Marker");
  const io::BoundRule* age = rules.find("Age");
  const io::BoundRule* gender = rules.find("Gender");
  REQUIRE(trait);
  REQUIRE(age);
  REQUIRE(gender);
  ClinicalColumn trait_col = clinical::extract_feature(
      parsed.characteristics, static_cast<size_t>(trait->row), trait->rule, "Marker");
  ClinicalColumn age_col = clinical::extract_feature(
      parsed.characteristics, static_cast<size_t>(age->row), age->rule, "Age");
  ClinicalColumn gender_col = clinical::extract_feature(
      parsed.characteristics, static_cast<size_t>(gender->row), gender->rule, "Gender");
  for (Eigen::Index i = 0; i < ds.n_samples(); ++i) {
    CHECK(trait_col.values(i) == ds.trait_values()(i));
    CHECK(age_col.values(i) == ds.clinical.values(i, ds.clinical.column_index("Age")));
    CHECK(gender_col.values(i) ==
          ds.clinical.values(i, ds.clinical.column_index("Gender")));
  }
}

TEST_CASE("soft fixture maps probes back to the same genes") {
  LinkedDataset ds = demo_dataset(22, false);
  fs::path dir = temp_dir("soft");
  write_fixture(ds, FixtureStyle::soft, dir);

  std::ifstream matrix_in(dir / "series_matrix.txt");
  auto parsed = ingest::parse_series_matrix(matrix_in);
  std::ifstream soft_in(dir / "family.soft");
  AnnotationTable annotation = ingest::parse_soft_annotation(soft_in);
  auto map = genes::probe_map_from_annotation(annotation, "ID", "GENE_SYMBOL");
  ExpressionMatrix mapped = genes::map_probes(parsed.expression, map);
  REQUIRE(mapped.row_ids == ds.gene_symbols);
  for (Eigen::Index g = 0; g < ds.genes.cols(); ++g)
    for (Eigen::Index i = 0; i < ds.genes.rows(); ++i)
      CHECK(mapped.values(g, i) == ds.genes(i, g));
}

TEST_CASE("xena fixture round trip") {
  LinkedDataset ds = demo_dataset(23, true);
  fs::path dir = temp_dir("xena");
  write_fixture(ds, FixtureStyle::xena, dir);

  std::ifstream clin_in(dir / "clinical.tsv"), expr_in(dir / "expression.tsv");
  auto tables = ingest::parse_xena_tables(clin_in, expr_in);
  REQUIRE(tables.expression.row_ids == ds.gene_symbols);
  for (Eigen::Index g = 0; g < ds.genes.cols(); ++g)
    for (Eigen::Index i = 0; i < ds.genes.rows(); ++i)
      CHECK(tables.expression.values(g, i) == ds.genes(i, g));

  io::CohortRules rules = io::read_rules(dir / "rules.json");
  const io::BoundRule* trait = rules.find("Marker");
  REQUIRE(trait);
  REQUIRE(!trait->column.empty());
  ClinicalColumn col = clinical::extract_tcga_feature(
      tables.clinical, rules.id_column, trait->column, trait->rule, "Marker");
  for (Eigen::Index i = 0; i < ds.n_samples(); ++i)
    CHECK(col.values(i) == ds.trait_values()(i));
}

TEST_CASE("empty-ish dataset still writes a valid file") {
  Rng rng(24);
  Matrix X(2, 1);
  X << 0.5, -0.5;
  Vector y(2);
  y << 0, 1;
  LinkedDataset ds = make_linked("T", VarKind::binary, y, X, "S", "G");
  fs::path dir = temp_dir("tiny");
  write_fixture(ds, FixtureStyle::series_matrix, dir);
  std::ifstream in(dir / "series_matrix.txt");
  auto parsed = ingest::parse_series_matrix(in);
  CHECK(parsed.expression.row_ids.size() == 1);
}

TEST_CASE("17-digit text round trip is exact for random doubles") {
  Rng rng(25);
  for (int trial = 0; trial < 2000; ++trial) {
    double v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.bounded(17)) - 8.0);
    std::string s = text::format_g17(v);
    auto parsed = text::parse_number(s);
    REQUIRE(parsed.has_value());
    CHECK(*parsed == v);
  }
}
