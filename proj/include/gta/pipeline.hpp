#pragma once

#include <filesystem>

#include "gta/io.hpp"
#include "gta/synth.hpp"

namespace gta::pipeline {

struct RunConfig {
  std::filesystem::path data_root;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  std::vector<double> lambda_grid = stats::default_lambda_grid();
  int folds = 5;
  int gap_t = 10;
  double missing_threshold = 0.20;
  bool rotate_y = true;
  bool use_rotation = false;
  int jobs = 1;
  std::filesystem::path synonyms;         // optional dictionary file
  std::filesystem::path condition_genes;  // optional known-gene list

  stats::AnalysisOptions analysis_options() const {
    stats::AnalysisOptions opts;
    opts.seed = seed;
    opts.folds = folds;
    opts.lambda_grid = lambda_grid;
    opts.gap_t = gap_t;
    opts.use_rotation = use_rotation;
    opts.rotate_y = rotate_y;
    return opts;
  }
};

// Merges a JSON config file into defaults; command-line flags override the
// file afterwards.
RunConfig load_config(const std::filesystem::path& path);

struct CohortInput {
  std::string trait;
  std::string id;
  Source source = Source::geo;
  std::filesystem::path dir;
};

// data_root/{GEO,TCGA}/<trait>/<cohort>/, sorted.
std::vector<CohortInput> discover_cohorts(const std::filesystem::path& data_root);

struct PreprocessSummary {
  int processed = 0;
  int failed = 0;
  std::vector<std::string> failures;  // "trait/cohort: message"
};

// Preprocesses every cohort (or the named trait/cohort subset) into linked
// CSVs and cohort records. Failures are isolated per cohort.
PreprocessSummary cmd_preprocess(const RunConfig& config,
                                 const std::vector<std::string>& only = {});

io::Selection cmd_select(const RunConfig& config, const GTAProblem& problem);

stats::RegressionResult cmd_analyze(const RunConfig& config,
                                    const GTAProblem& problem);

struct EvalOutput {
  std::map<std::string, metrics::EvalReport> rows;
  metrics::EvalReport macro;
  std::filesystem::path json_path;
  std::filesystem::path table_path;
};

EvalOutput cmd_evaluate(const RunConfig& config,
                        const std::filesystem::path& predictions,
                        const std::filesystem::path& reference);

struct SynthCorpusOptions {
  int n = 200;
  int p = 300;
  int k = 10;
  double beta_scale = 1.0;
  double sigma_eps = 0.1;
  int n_small = 80;          // second cohort, exercises selection
  int n_batched = 100;
  int p_batched = 200;
  double batch_shift = 3.0;
  double sigma_u = 1.0;
  std::string trait_a = "SynthTraitA";
  std::string trait_b = "SynthTraitB";
};

// Writes a self-contained corpus: input fixtures under <out>/data and the
// ground-truth reference bundle under <out>/reference.
void cmd_synth(const RunConfig& config, const SynthCorpusOptions& opts);

}  // namespace gta::pipeline
