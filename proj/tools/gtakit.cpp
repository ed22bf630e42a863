// Command-line front end for the gene-trait association toolkit:
// synth | preprocess | select | analyze | evaluate.

#include <CLI11.hpp>

#include <iostream>

#include "gta/pipeline.hpp"

namespace {

using gta::pipeline::RunConfig;

constexpr std::uint64_t kSeedUnset = ~0ULL;

struct CommonFlags {
  std::string config_file;
  std::string data_root, out, synonyms, condition_genes;
  std::string lambda_grid;
  std::uint64_t seed = kSeedUnset;
  int folds = 0, gap_t = 0, jobs = 0;
  double missing_threshold = -1.0;
  bool rotate_y = false, no_rotate_y = false, use_rotation = false;
};

void add_common(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config_file, "JSON config mirroring all flags");
  cmd->add_option("--data-root", flags->data_root, "input data directory");
  cmd->add_option("--out", flags->out, "output directory");
  cmd->add_option("--seed", flags->seed, "random seed");
  cmd->add_option("--lambda-grid", flags->lambda_grid,
                  "comma-separated penalty grid");
  cmd->add_option("--folds", flags->folds, "cross-validation folds");
  cmd->add_option("--gap-t", flags->gap_t, "eigen-gap scan depth");
  cmd->add_option("--missing-threshold", flags->missing_threshold,
                  "max fraction of missing gene values per sample");
  cmd->add_flag("--rotate-y", flags->rotate_y, "whiten y together with X");
  cmd->add_flag("--no-rotate-y", flags->no_rotate_y, "leave y unwhitened");
  cmd->add_flag("--use-rotation", flags->use_rotation,
                "rotated penalized fit instead of the mixed model");
  cmd->add_option("--jobs", flags->jobs, "parallel cohort workers");
  cmd->add_option("--synonyms", flags->synonyms, "gene synonym dictionary file");
  cmd->add_option("--condition-genes", flags->condition_genes,
                  "known condition gene list for two-dataset analyses");
}

RunConfig resolve(const CommonFlags& flags) {
  RunConfig cfg;
  if (!flags.config_file.empty()) cfg = gta::pipeline::load_config(flags.config_file);
  if (!flags.data_root.empty()) cfg.data_root = flags.data_root;
  if (!flags.out.empty()) cfg.out = flags.out;
  if (flags.seed != kSeedUnset) cfg.seed = flags.seed;
  if (!flags.lambda_grid.empty()) {
    cfg.lambda_grid.clear();
    for (const std::string& tok : gta::text::split(flags.lambda_grid, ',')) {
      auto v = gta::text::parse_number(tok);
      if (!v) gta::fail(gta::Errc::invalid_config, "bad lambda grid value: " + tok);
      cfg.lambda_grid.push_back(*v);
    }
  }
  if (flags.folds > 0) cfg.folds = flags.folds;
  if (flags.gap_t > 0) cfg.gap_t = flags.gap_t;
  if (flags.missing_threshold >= 0.0) cfg.missing_threshold = flags.missing_threshold;
  if (flags.rotate_y) cfg.rotate_y = true;
  if (flags.no_rotate_y) cfg.rotate_y = false;
  if (flags.use_rotation) cfg.use_rotation = true;
  if (flags.jobs > 0) cfg.jobs = flags.jobs;
  if (!flags.synonyms.empty()) cfg.synonyms = flags.synonyms;
  if (!flags.condition_genes.empty()) cfg.condition_genes = flags.condition_genes;
  return cfg;
}

int fail_with(const gta::Error& e) {
  std::cerr << gta::io::error_json(e.code_name(), e.what()) << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gene-trait association analysis toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<std::string> cohorts;
  std::string trait, condition;
  std::string pred_dir, ref_dir;
  gta::pipeline::SynthCorpusOptions synth_opts;

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  add_common(synth, &flags);
  synth->add_option("--n", synth_opts.n, "samples in the main cohort");
  synth->add_option("--p", synth_opts.p, "gene features in the main cohort");
  synth->add_option("--k", synth_opts.k, "planted support size");
  synth->add_option("--beta-scale", synth_opts.beta_scale, "planted effect size");
  synth->add_option("--sigma-eps", synth_opts.sigma_eps, "noise sd");
  synth->add_option("--batch-shift", synth_opts.batch_shift,
                    "mean offset between batches");

  CLI::App* preprocess =
      app.add_subcommand("preprocess", "parse, encode and link cohorts");
  add_common(preprocess, &flags);
  preprocess->add_option("cohorts", cohorts, "optional trait/cohort filters");

  CLI::App* select = app.add_subcommand("select", "filter and select cohorts");
  add_common(select, &flags);
  select->add_option("--trait", trait, "trait name")->required();
  select->add_option("--condition", condition, "condition (trait, Age or Gender)");

  CLI::App* analyze = app.add_subcommand("analyze", "run the association analysis");
  add_common(analyze, &flags);
  analyze->add_option("--trait", trait, "trait name")->required();
  analyze->add_option("--condition", condition, "condition (trait, Age or Gender)");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "score predictions against a reference");
  add_common(evaluate, &flags);
  evaluate->add_option("predictions", pred_dir, "predictions directory")->required();
  evaluate->add_option("reference", ref_dir, "reference directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = resolve(flags);
    if (synth->parsed()) {
      gta::pipeline::cmd_synth(cfg, synth_opts);
      std::cout << "corpus written to " << cfg.out.string() << "\n";
      return 0;
    }
    if (preprocess->parsed()) {
      auto summary = gta::pipeline::cmd_preprocess(cfg, cohorts);
      std::cout << "processed " << summary.processed << " cohorts, "
                << summary.failed << " failed\n";
      for (const auto& f : summary.failures) std::cerr << "  " << f << "\n";
      return summary.failed == 0 ? 0 : 1;
    }
    gta::GTAProblem problem{trait, condition.empty()
                                       ? std::nullopt
                                       : std::optional<std::string>(condition)};
    if (select->parsed()) {
      auto sel = gta::pipeline::cmd_select(cfg, problem);
      std::cout << "selected";
      for (const auto& id : sel.cohorts) std::cout << " " << id;
      std::cout << "\n";
      return 0;
    }
    if (analyze->parsed()) {
      auto res = gta::pipeline::cmd_analyze(cfg, problem);
      std::cout << gta::stats::model_kind_name(res.model) << " selected "
                << res.selected.size() << " genes\n";
      return 0;
    }
    if (evaluate->parsed()) {
      auto eval = gta::pipeline::cmd_evaluate(cfg, pred_dir, ref_dir);
      std::cout << gta::io::eval_report_table(eval.rows, eval.macro);
      return 0;
    }
  } catch (const gta::Error& e) {
    return fail_with(e);
  } catch (const std::exception& e) {
    std::cerr << gta::io::error_json("InternalError", e.what()) << "\n";
    return 1;
  }
  return 0;
}
