#include "gta/synth.hpp"

#include <Eigen/Cholesky>

#include <fstream>

#include "gta/rng.hpp"

#include <json.hpp>

namespace gta::synth {

namespace fs = std::filesystem;

void validate_config(const SynthConfig& cfg) {
  if (cfg.n < 1 || cfg.p < 1)
    fail(Errc::invalid_config, "dimensions must be positive");
  if (cfg.k < 0 || cfg.k > cfg.p)
    fail(Errc::invalid_config, "support size must lie in [0, p]");
  if (cfg.sigma_eps < 0 || cfg.sigma_u < 0)
    fail(Errc::invalid_config, "standard deviations must be non-negative");
  if (cfg.n_batches < 1)
    fail(Errc::invalid_config, "need at least one batch");
  if (cfg.n_common == 0 || cfg.n_common > cfg.p)
    fail(Errc::invalid_config, "common regressor count must lie in [1, p]");
}

namespace {

Matrix gaussian_matrix(Rng& rng, int n, int p) {
  Matrix X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
  return X;
}

Vector planted_beta(Rng& rng, int p, int k, double scale,
                    std::vector<int>* support) {
  *support = rng.choose(p, k);
  Vector beta = Vector::Zero(p);
  for (int j : *support) beta(j) = scale;
  return beta;
}

std::string padded(const std::string& prefix, int i, int width = 4) {
  std::string num = std::to_string(i);
  while (static_cast<int>(num.size()) < width) num.insert(num.begin(), '0');
  return prefix + num;
}

}  // namespace

LinearData gen_linear(const SynthConfig& cfg) {
  validate_config(cfg);
  Rng rng(cfg.seed);
  LinearData out;
  out.X = gaussian_matrix(rng, cfg.n, cfg.p);
  out.beta = planted_beta(rng, cfg.p, cfg.k, cfg.beta_scale, &out.support);
  out.y = out.X * out.beta;
  for (int i = 0; i < cfg.n; ++i) out.y(i) += cfg.sigma_eps * rng.normal();
  return out;
}

BatchedData gen_batched(const SynthConfig& cfg) {
  validate_config(cfg);
  Rng rng(cfg.seed);
  BatchedData out;
  out.X = gaussian_matrix(rng, cfg.n, cfg.p);
  out.beta = planted_beta(rng, cfg.p, cfg.k, cfg.beta_scale, &out.support);

  out.batch_labels.resize(static_cast<size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    int b = static_cast<int>(static_cast<long long>(i) * cfg.n_batches / cfg.n);
    out.batch_labels[static_cast<size_t>(i)] = b;
    out.X.row(i).array() += cfg.batch_shift * b;
  }

  Vector u(cfg.n_batches);
  for (int b = 0; b < cfg.n_batches; ++b) u(b) = cfg.sigma_u * rng.normal();

  out.y = out.X * out.beta;
  for (int i = 0; i < cfg.n; ++i)
    out.y(i) += u(out.batch_labels[static_cast<size_t>(i)]) +
                cfg.sigma_eps * rng.normal();
  return out;
}

LinkedDataset make_linked(const std::string& trait_name, VarKind trait_kind,
                          const Vector& trait, const Matrix& genes,
                          const std::string& sample_prefix,
                          const std::string& gene_prefix,
                          const std::optional<Vector>& age,
                          const std::optional<Vector>& gender) {
  LinkedDataset ds;
  ds.trait_name = trait_name;
  const int n = static_cast<int>(genes.rows());
  for (int i = 0; i < n; ++i) ds.sample_ids.push_back(padded(sample_prefix, i + 1));
  for (int j = 0; j < genes.cols(); ++j)
    ds.gene_symbols.push_back(padded(gene_prefix, j + 1));
  ds.genes = genes;

  std::vector<std::string> names{trait_name};
  std::vector<VarKind> kinds{trait_kind};
  std::vector<const Vector*> cols{&trait};
  if (age) {
    names.push_back("Age");
    kinds.push_back(VarKind::continuous);
    cols.push_back(&*age);
  }
  if (gender) {
    names.push_back("Gender");
    kinds.push_back(VarKind::binary);
    cols.push_back(&*gender);
  }
  ds.clinical.sample_ids = ds.sample_ids;
  ds.clinical.names = names;
  ds.clinical.kinds = kinds;
  ds.clinical.values.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c)
    ds.clinical.values.col(static_cast<Eigen::Index>(c)) = *cols[c];
  return ds;
}

ConditionPair gen_condition_pair(const SynthConfig& cfg) {
  validate_config(cfg);
  const int n_common = cfg.n_common < 0 ? cfg.k : cfg.n_common;
  if (n_common < 1 || n_common > cfg.p)
    fail(Errc::invalid_config, "common regressor count must lie in [1, p]");
  if (cfg.k > cfg.p - n_common)
    fail(Errc::invalid_config,
         "not enough trait-only genes for the requested support");

  Rng rng(cfg.seed);
  ConditionPair out;

  // Shared genes come first in both generated matrices; names make the
  // normalized (sorted) order coincide with the build order.
  std::vector<std::string> trait_genes, cond_genes;
  for (int j = 0; j < n_common; ++j) {
    out.common_regressors.push_back(padded("CMN", j + 1));
    trait_genes.push_back(out.common_regressors.back());
    cond_genes.push_back(out.common_regressors.back());
  }
  for (int j = 0; j < cfg.p - n_common; ++j) {
    trait_genes.push_back(padded("TGENE", j + 1));
    cond_genes.push_back(padded("XGENE", j + 1));
  }

  Matrix X1 = gaussian_matrix(rng, cfg.n, cfg.p);  // trait dataset
  Matrix X2 = gaussian_matrix(rng, cfg.n, cfg.p);  // condition dataset

  Vector beta_c = Vector::Zero(cfg.p);
  for (int j = 0; j < n_common; ++j) beta_c(j) = cfg.beta_scale;

  Vector y2 = X2 * beta_c;
  for (int i = 0; i < cfg.n; ++i) y2(i) += cfg.sigma_eps * rng.normal();

  out.true_condition = X1 * beta_c;

  std::vector<int> own_support = rng.choose(cfg.p - n_common, cfg.k);
  Vector beta_t = Vector::Zero(cfg.p);
  for (int j : own_support) {
    beta_t(n_common + j) = cfg.beta_scale;
    out.trait_support.push_back(trait_genes[static_cast<size_t>(n_common + j)]);
  }

  Vector y1 = X1 * beta_t + cfg.alpha * out.true_condition;
  for (int i = 0; i < cfg.n; ++i) y1(i) += cfg.sigma_eps * rng.normal();

  out.trait_ds = make_linked("Trait", VarKind::continuous, y1, X1, "T", "G");
  out.trait_ds.gene_symbols = trait_genes;
  out.cond_ds = make_linked("Condition", VarKind::continuous, y2, X2, "C", "G");
  out.cond_ds.gene_symbols = cond_genes;
  return out;
}

Vector gls_oracle(const Eigen::Ref<const Matrix>& X,
                  const Eigen::Ref<const Vector>& y,
                  const Eigen::Ref<const Matrix>& V) {
  if (V.rows() != V.cols() || V.rows() != X.rows())
    fail(Errc::invalid_input, "V must be square and match X rows");
  if (!V.isApprox(V.transpose(), 1e-10))
    fail(Errc::invalid_input, "V must be symmetric");
  Eigen::LLT<Matrix> llt(V);
  if (llt.info() != Eigen::Success)
    fail(Errc::singular_model, "V is not positive definite");
  Matrix Vinv_X = llt.solve(X);
  Vector Vinv_y = llt.solve(y);
  Vector beta(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    double denom = X.col(j).dot(Vinv_X.col(j));
    if (denom <= 0.0)
      fail(Errc::singular_model, "degenerate feature in GLS solve");
    beta(j) = X.col(j).dot(Vinv_y) / denom;
  }
  return beta;
}

namespace {

using nlohmann::json;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  out << content;
}

std::string render_characteristic(const LinkedDataset& ds, size_t col,
                                  Eigen::Index row) {
  const std::string& name = ds.clinical.names[col];
  double v = ds.clinical.values(row, static_cast<Eigen::Index>(col));
  if (name == "Age") return "age: " + text::format_g17(v) + "y";
  if (name == "Gender") return std::string("gender: ") + (v == 1.0 ? "Male" : "Female");
  std::string key = text::to_lower(name);
  if (ds.clinical.kinds[col] == VarKind::binary)
    return key + ": " + (v == 1.0 ? "case" : "control");
  return key + ": " + text::format_g17(v);
}

json clause(const std::string& pattern, double value) {
  return json{{"pattern", pattern}, {"value", value}};
}

// The rule file that re-extracts the clinical columns rendered above.
json fixture_rules(const LinkedDataset& ds, FixtureStyle style) {
  json rules = json::array();
  for (size_t c = 0; c < ds.clinical.names.size(); ++c) {
    const std::string& name = ds.clinical.names[c];
    json rule{{"variable", name},
              {"kind", var_kind_name(ds.clinical.kinds[c])},
              {"prefix_strip", true}};
    if (style == FixtureStyle::xena) {
      if (name == "Age") {
        rule["candidates"] = json::array({"age_at_diagnosis"});
        rule["numeric"] = {{"suffixes", json::array()}};
      } else if (name == "Gender") {
        rule["candidates"] = json::array({"gender"});
        rule["clauses"] = json::array({clause("female", 0), clause("male", 1)});
      } else {
        rule["column"] = "sample_type";
        if (ds.clinical.kinds[c] == VarKind::binary)
          rule["clauses"] = json::array(
              {clause("Primary Tumor", 1), clause("Solid Tissue Normal", 0)});
        else
          rule["numeric"] = {{"suffixes", json::array()}};
      }
    } else {
      rule["row"] = c;
      if (name == "Age") {
        rule["numeric"] = {{"suffixes", json::array({"y"})}};
      } else if (name == "Gender") {
        rule["clauses"] = json::array({clause("female", 0), clause("male", 1)});
      } else if (ds.clinical.kinds[c] == VarKind::binary) {
        rule["clauses"] = json::array({clause("case", 1), clause("control", 0)});
      } else {
        rule["numeric"] = {{"suffixes", json::array()}};
      }
    }
    rules.push_back(rule);
  }
  return json{{"source", style == FixtureStyle::xena ? "TCGA" : "GEO"},
              {"id_column", "sampleID"},
              {"rules", rules}};
}

std::string series_matrix_text(const LinkedDataset& ds,
                               const std::vector<std::string>& row_ids,
                               const std::string& accession) {
  std::string out;
  out += "!Series_title\t\"Synthetic cohort for " + ds.trait_name + "\"\n";
  out += "!Series_summary\t\"Generated fixture with planted structure.\"\n";
  out += "!Series_overall_design\t\"Expression profiling of " +
         std::to_string(ds.sample_ids.size()) + " samples.\"\n";
  out += "!Series_geo_accession\t\"" + accession + "\"\n";
  out += "!Sample_geo_accession";
  for (const auto& s : ds.sample_ids) out += "\t\"" + s + "\"";
  out += "\n";
  for (size_t c = 0; c < ds.clinical.names.size(); ++c) {
    out += "!Sample_characteristics_ch1";
    for (Eigen::Index i = 0; i < ds.n_samples(); ++i)
      out += "\t\"" + render_characteristic(ds, c, i) + "\"";
    out += "\n";
  }
  out += "!series_matrix_table_begin\n";
  out += "\"ID_REF\"";
  for (const auto& s : ds.sample_ids) out += "\t\"" + s + "\"";
  out += "\n";
  for (size_t r = 0; r < row_ids.size(); ++r) {
    out += "\"" + row_ids[r] + "\"";
    for (Eigen::Index i = 0; i < ds.n_samples(); ++i) {
      double v = ds.genes(i, static_cast<Eigen::Index>(r));
      out += "\t" + (is_missing(v) ? std::string("NA") : text::format_g17(v));
    }
    out += "\n";
  }
  out += "!series_matrix_table_end\n";
  return out;
}

std::string soft_text(const std::vector<std::string>& probes,
                      const std::vector<std::string>& symbols,
                      const std::string& accession) {
  std::string out;
  out += "^PLATFORM = " + accession + "-PL\n";
  out += "!Platform_title = Synthetic platform\n";
  out += "!platform_table_begin\n";
  out += "ID\tGENE_SYMBOL\n";
  for (size_t r = 0; r < probes.size(); ++r)
    out += probes[r] + "\t" + symbols[r] + "\n";
  out += "!platform_table_end\n";
  return out;
}

}  // namespace

std::vector<fs::path> write_fixture(const LinkedDataset& ds, FixtureStyle style,
                                    const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  const std::string accession = dir.filename().string().empty()
                                    ? "SYNTH"
                                    : dir.filename().string();

  if (style == FixtureStyle::series_matrix || style == FixtureStyle::soft) {
    std::vector<std::string> row_ids = ds.gene_symbols;
    if (style == FixtureStyle::soft) {
      row_ids.clear();
      for (size_t r = 0; r < ds.gene_symbols.size(); ++r)
        row_ids.push_back(padded("P", static_cast<int>(r) + 1, 6));
      fs::path soft = dir / "family.soft";
      write_file(soft, soft_text(row_ids, ds.gene_symbols, accession));
      written.push_back(soft);
    }
    fs::path matrix = dir / "series_matrix.txt";
    write_file(matrix, series_matrix_text(ds, row_ids, accession));
    written.push_back(matrix);
  } else {
    std::string clin = "sampleID\tsample_type\tage_at_diagnosis\tgender\n";
    int age_col = ds.clinical.column_index("Age");
    int gender_col = ds.clinical.column_index("Gender");
    int trait_col = ds.trait_column();
    for (Eigen::Index i = 0; i < ds.n_samples(); ++i) {
      double t = ds.clinical.values(i, trait_col);
      clin += ds.sample_ids[static_cast<size_t>(i)];
      clin += "\t";
      clin += ds.trait_kind() == VarKind::binary
                  ? (t == 1.0 ? "Primary Tumor" : "Solid Tissue Normal")
                  : text::format_g17(t);
      clin += "\t";
      clin += age_col >= 0 ? text::format_g17(ds.clinical.values(i, age_col)) : "";
      clin += "\t";
      clin += gender_col >= 0
                  ? (ds.clinical.values(i, gender_col) == 1.0 ? "MALE" : "FEMALE")
                  : "";
      clin += "\n";
    }
    fs::path clinical = dir / "clinical.tsv";
    write_file(clinical, clin);
    written.push_back(clinical);

    std::string expr = "sample";
    for (const auto& s : ds.sample_ids) expr += "\t" + s;
    expr += "\n";
    for (size_t g = 0; g < ds.gene_symbols.size(); ++g) {
      expr += ds.gene_symbols[g];
      for (Eigen::Index i = 0; i < ds.n_samples(); ++i) {
        double v = ds.genes(i, static_cast<Eigen::Index>(g));
        expr += "\t" + (is_missing(v) ? std::string("NA") : text::format_g17(v));
      }
      expr += "\n";
    }
    fs::path expression = dir / "expression.tsv";
    write_file(expression, expr);
    written.push_back(expression);
  }

  fs::path rules = dir / "rules.json";
  write_file(rules, fixture_rules(ds, style).dump(2) + "\n");
  written.push_back(rules);
  return written;
}

}  // namespace gta::synth
