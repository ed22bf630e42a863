#include "gta/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "gta/cohort.hpp"
#include "gta/genes.hpp"
#include "gta/ingest.hpp"
#include "gta/rng.hpp"

namespace gta::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot read config " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    fail(Errc::malformed_file, "invalid JSON config " + path.string());
  RunConfig cfg;
  if (j.contains("data_root")) cfg.data_root = j.at("data_root").get<std::string>();
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("lambda_grid"))
    cfg.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  if (j.contains("folds")) cfg.folds = j.at("folds").get<int>();
  if (j.contains("gap_t")) cfg.gap_t = j.at("gap_t").get<int>();
  if (j.contains("missing_threshold"))
    cfg.missing_threshold = j.at("missing_threshold").get<double>();
  if (j.contains("rotate_y")) cfg.rotate_y = j.at("rotate_y").get<bool>();
  if (j.contains("use_rotation")) cfg.use_rotation = j.at("use_rotation").get<bool>();
  if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
  if (j.contains("synonyms")) cfg.synonyms = j.at("synonyms").get<std::string>();
  if (j.contains("condition_genes"))
    cfg.condition_genes = j.at("condition_genes").get<std::string>();
  return cfg;
}

std::vector<CohortInput> discover_cohorts(const fs::path& data_root) {
  std::vector<CohortInput> out;
  for (const char* source_dir : {"GEO", "TCGA"}) {
    fs::path root = data_root / source_dir;
    if (!fs::is_directory(root)) continue;
    for (const auto& trait_entry : fs::directory_iterator(root)) {
      if (!trait_entry.is_directory()) continue;
      for (const auto& cohort_entry : fs::directory_iterator(trait_entry)) {
        if (!cohort_entry.is_directory()) continue;
        CohortInput in;
        in.trait = trait_entry.path().filename().string();
        in.id = cohort_entry.path().filename().string();
        in.source = std::string(source_dir) == "TCGA" ? Source::tcga : Source::geo;
        in.dir = cohort_entry.path();
        out.push_back(std::move(in));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const CohortInput& a, const CohortInput& b) {
    return std::tie(a.trait, a.id) < std::tie(b.trait, b.id);
  });
  return out;
}

namespace {

std::optional<fs::path> find_file(const fs::path& dir, std::string_view needle) {
  std::vector<fs::path> hits;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name.find(needle) != std::string::npos) hits.push_back(entry.path());
  }
  if (hits.empty()) return std::nullopt;
  std::sort(hits.begin(), hits.end());
  return hits[0];
}

std::string pick_symbol_column(const AnnotationTable& table) {
  for (const auto& name : table.column_names)
    if (name == "GENE_SYMBOL") return name;
  for (const auto& name : table.column_names)
    if (text::icontains(name, "symbol")) return name;
  for (const auto& name : table.column_names)
    if (text::icontains(name, "gene")) return name;
  if (table.column_names.size() >= 2) return table.column_names[1];
  fail(Errc::invalid_input, "annotation table has no symbol column");
}

genes::SynonymDict load_dictionary(const RunConfig& config) {
  fs::path path = config.synonyms;
  if (path.empty()) {
    fs::path fallback = config.data_root / "synonyms.tsv";
    if (fs::exists(fallback)) path = fallback;
  }
  genes::SynonymDict dict;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot read synonyms " + path.string());
    dict = genes::load_synonym_dict(in);
  }
  return dict;
}

ExpressionMatrix sorted_rows(const ExpressionMatrix& expr) {
  std::vector<size_t> order(expr.row_ids.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return expr.row_ids[a] < expr.row_ids[b];
  });
  ExpressionMatrix out;
  out.sample_ids = expr.sample_ids;
  out.values.resize(expr.values.rows(), expr.values.cols());
  for (size_t i = 0; i < order.size(); ++i) {
    out.row_ids.push_back(expr.row_ids[order[i]]);
    out.values.row(static_cast<Eigen::Index>(i)) =
        expr.values.row(static_cast<Eigen::Index>(order[i]));
  }
  return out;
}

struct CohortOutcome {
  CohortRecord record;
  std::optional<LinkedDataset> linked;
};

// One cohort end to end: parse, encode clinical variables, map gene ids,
// link, handle missing values.
CohortOutcome preprocess_cohort(const RunConfig& config, const CohortInput& in,
                                const genes::SynonymDict& dict) {
  CohortOutcome outcome;
  outcome.record.id = in.id;
  outcome.record.source = in.source;

  fs::path rules_path = in.dir / "rules.json";
  if (!fs::exists(rules_path))
    fail(Errc::io_error, "missing rules.json in " + in.dir.string());
  io::CohortRules rules = io::read_rules(rules_path);

  ExpressionMatrix expr;
  std::vector<ClinicalColumn> clinical_cols;
  const io::BoundRule* trait_rule = rules.find(in.trait);

  if (in.source == Source::geo) {
    auto matrix_path = find_file(in.dir, "series_matrix");
    if (!matrix_path)
      fail(Errc::io_error, "no series matrix file in " + in.dir.string());
    std::ifstream matrix_in(*matrix_path);
    if (!matrix_in) fail(Errc::io_error, "cannot read " + matrix_path->string());
    ingest::SeriesMatrix series = ingest::parse_series_matrix(matrix_in);
    expr = series.expression;
    outcome.record.gene_available = expr.values.rows() > 0;

    if (trait_rule && trait_rule->row >= 0 &&
        trait_rule->row < static_cast<int>(series.characteristics.rows.size()))
      outcome.record.trait_available = true;

    if (auto soft_path = find_file(in.dir, ".soft")) {
      std::ifstream soft_in(*soft_path);
      if (!soft_in) fail(Errc::io_error, "cannot read " + soft_path->string());
      AnnotationTable annotation = ingest::parse_soft_annotation(soft_in);
      genes::ProbeGeneMap map = genes::probe_map_from_annotation(
          annotation, annotation.column_names[0], pick_symbol_column(annotation));
      expr = genes::map_probes(expr, map);
    }

    if (!outcome.record.trait_available)
      return outcome;  // discard early; no trait to analyze

    for (const io::BoundRule& rule : rules.rules) {
      if (rule.row < 0)
        fail(Errc::invalid_config,
             "rule '" + rule.variable + "' has no characteristics row");
      clinical_cols.push_back(clinical::extract_feature(
          series.characteristics, static_cast<size_t>(rule.row), rule.rule,
          rule.variable));
    }
  } else {
    fs::path clin_path = in.dir / "clinical.tsv";
    fs::path expr_path = in.dir / "expression.tsv";
    std::ifstream clin_in(clin_path), expr_in(expr_path);
    if (!clin_in) fail(Errc::io_error, "cannot read " + clin_path.string());
    if (!expr_in) fail(Errc::io_error, "cannot read " + expr_path.string());
    ingest::XenaTables tables = ingest::parse_xena_tables(clin_in, expr_in);
    expr = tables.expression;
    outcome.record.gene_available = expr.values.rows() > 0;
    if (trait_rule) outcome.record.trait_available = true;
    if (!outcome.record.trait_available) return outcome;

    for (const io::BoundRule& rule : rules.rules) {
      std::string column = rule.column;
      if (column.empty() && !rule.candidates.empty())
        column = clinical::choose_tcga_column(tables.clinical, rule.candidates,
                                              rule.rule.target_kind);
      if (column.empty())
        fail(Errc::invalid_config,
             "rule '" + rule.variable + "' has no column binding");
      clinical_cols.push_back(clinical::extract_tcga_feature(
          tables.clinical, rules.id_column, column, rule.rule, rule.variable));
    }
  }

  if (!outcome.record.gene_available) return outcome;

  expr = dict.empty() ? sorted_rows(expr) : genes::normalize_symbols(expr, dict);

  ClinicalTable clinical_table =
      clinical::assemble_clinical(clinical_cols[0].sample_ids, clinical_cols);
  LinkedDataset linked = cohort::link(clinical_table, expr, in.trait);
  linked = cohort::handle_missing(linked, config.missing_threshold);

  Vector trait = linked.trait_values();
  bool constant = true;
  for (Eigen::Index i = 1; i < trait.size(); ++i)
    if (trait(i) != trait(0)) constant = false;
  if (constant)
    fail(Errc::invalid_input, "all samples share the same trait value");

  outcome.record.quality_ok = true;
  outcome.record.sample_count = static_cast<long>(linked.sample_ids.size());
  outcome.linked = std::move(linked);
  return outcome;
}

}  // namespace

PreprocessSummary cmd_preprocess(const RunConfig& config,
                                 const std::vector<std::string>& only) {
  std::vector<CohortInput> cohorts = discover_cohorts(config.data_root);
  if (!only.empty()) {
    std::vector<CohortInput> filtered;
    for (const auto& c : cohorts) {
      std::string key = c.trait + "/" + c.id;
      if (std::find(only.begin(), only.end(), key) != only.end() ||
          std::find(only.begin(), only.end(), c.id) != only.end())
        filtered.push_back(c);
    }
    cohorts = std::move(filtered);
  }

  genes::SynonymDict dict = load_dictionary(config);

  PreprocessSummary summary;
  std::mutex mutex;
  std::atomic<size_t> next{0};

  auto work = [&] {
    for (size_t i = next.fetch_add(1); i < cohorts.size(); i = next.fetch_add(1)) {
      const CohortInput& in = cohorts[i];
      fs::path record_path = config.out / "records" / in.trait / (in.id + ".json");
      try {
        CohortOutcome outcome = preprocess_cohort(config, in, dict);
        io::write_cohort_record(outcome.record, record_path);
        if (outcome.linked) {
          io::write_linked_csv(*outcome.linked, config.out / "preprocessed" /
                                                    in.trait / (in.id + ".csv"));
        }
        std::lock_guard lock(mutex);
        if (outcome.record.quality_ok) {
          ++summary.processed;
        } else {
          ++summary.failed;
          summary.failures.push_back(in.trait + "/" + in.id +
                                     ": not usable after preprocessing");
        }
      } catch (const Error& e) {
        CohortRecord record;
        record.id = in.id;
        record.source = in.source;
        io::write_cohort_record(record, record_path);
        std::ofstream err(
            [&] {
              fs::path p = config.out / "errors" / in.trait / (in.id + ".json");
              fs::create_directories(p.parent_path());
              return p;
            }());
        err << io::error_json(e.code_name(), e.what()) << "\n";
        std::lock_guard lock(mutex);
        ++summary.failed;
        summary.failures.push_back(in.trait + "/" + in.id + ": " + e.what());
      }
    }
  };

  int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::sort(summary.failures.begin(), summary.failures.end());
  return summary;
}

namespace {

std::vector<CohortRecord> usable_records(const RunConfig& config,
                                         const std::string& trait) {
  fs::path dir = config.out / "records" / trait;
  std::vector<CohortRecord> usable;
  if (!fs::is_directory(dir)) return usable;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    CohortRecord rec = io::read_cohort_record(file);
    if (cohort::judge_usability(rec)) usable.push_back(std::move(rec));
  }
  return usable;
}

}  // namespace

io::Selection cmd_select(const RunConfig& config, const GTAProblem& problem) {
  io::Selection sel;
  sel.problem = problem;

  std::vector<CohortRecord> trait_usable = usable_records(config, problem.trait);
  bool two_datasets = problem.condition && *problem.condition != "Age" &&
                      *problem.condition != "Gender";
  if (two_datasets) {
    std::vector<CohortRecord> cond_usable =
        usable_records(config, *problem.condition);
    auto [t, c] = cohort::select_pair(trait_usable, cond_usable);
    sel.cohorts = {t.id, c.id};
  } else {
    sel.cohorts = {cohort::select_cohort(trait_usable).id};
  }
  io::write_selection(sel, config.out / "selection" / (problem.key() + ".json"));
  return sel;
}

namespace {

std::set<std::string> load_symbol_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot read gene list " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = text::trim(line);
    if (!t.empty() && t[0] != '#') out.insert(t);
  }
  return out;
}

}  // namespace

stats::RegressionResult cmd_analyze(const RunConfig& config,
                                    const GTAProblem& problem) {
  fs::path sel_path = config.out / "selection" / (problem.key() + ".json");
  if (!fs::exists(sel_path))
    fail(Errc::io_error, "missing selection file " + sel_path.string());
  io::Selection sel = io::read_selection(sel_path);

  stats::AnalysisInput input;
  input.trait_ds = io::read_linked_csv(
      config.out / "preprocessed" / problem.trait / (sel.cohorts.at(0) + ".csv"),
      problem.trait);

  bool two_datasets = problem.condition && *problem.condition != "Age" &&
                      *problem.condition != "Gender";
  if (two_datasets) {
    if (sel.cohorts.size() < 2)
      fail(Errc::invalid_input, "selection has no condition cohort");
    input.cond_ds = io::read_linked_csv(
        config.out / "preprocessed" / *problem.condition /
            (sel.cohorts.at(1) + ".csv"),
        *problem.condition);
    if (config.condition_genes.empty())
      fail(Errc::invalid_input,
           "two-dataset analysis needs a known condition gene list "
           "(--condition-genes)");
    input.known_condition_genes = load_symbol_list(config.condition_genes);
  }

  stats::RegressionResult res =
      stats::run_gta_analysis(problem, input, config.analysis_options());

  io::write_regression_result(
      problem, res, res.feature_names,
      config.out / "analysis" / problem.key() / "result.json");
  return res;
}

namespace {

// Relative file stems under dir, e.g. records/<trait>/<id>.json -> trait/id.
std::map<std::string, fs::path> keyed_files(const fs::path& dir,
                                            const std::string& extension) {
  std::map<std::string, fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != extension)
      continue;
    fs::path rel = fs::relative(entry.path(), dir);
    std::string key = (rel.parent_path() / rel.stem()).generic_string();
    out[key] = entry.path();
  }
  return out;
}

void require_same_keys(const std::map<std::string, fs::path>& pred,
                       const std::map<std::string, fs::path>& ref,
                       const std::string& what) {
  std::vector<std::string> missing, extra;
  for (const auto& [key, _] : ref)
    if (!pred.count(key)) missing.push_back(key);
  for (const auto& [key, _] : pred)
    if (!ref.count(key)) extra.push_back(key);
  if (missing.empty() && extra.empty()) return;
  std::string msg = what + " keys differ;";
  for (const auto& k : missing) msg += " missing:" + k;
  for (const auto& k : extra) msg += " extra:" + k;
  fail(Errc::invalid_input, msg);
}

std::optional<double> mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

EvalOutput cmd_evaluate(const RunConfig& config, const fs::path& predictions,
                        const fs::path& reference) {
  EvalOutput out;

  // Dataset filtering: usability judgments per cohort record.
  auto pred_records = keyed_files(predictions / "records", ".json");
  auto ref_records = keyed_files(reference / "records", ".json");
  if (!ref_records.empty()) {
    require_same_keys(pred_records, ref_records, "record");
    std::map<std::string, bool> pred_df, ref_df;
    for (const auto& [key, path] : pred_records)
      pred_df[key] = cohort::judge_usability(io::read_cohort_record(path));
    for (const auto& [key, path] : ref_records)
      ref_df[key] = cohort::judge_usability(io::read_cohort_record(path));
    out.macro.df_f1 = metrics::df_f1(pred_df, ref_df);
  }

  // Dataset selection accuracy.
  auto pred_sel = keyed_files(predictions / "selection", ".json");
  auto ref_sel = keyed_files(reference / "selection", ".json");
  if (!ref_sel.empty()) {
    require_same_keys(pred_sel, ref_sel, "selection");
    std::map<std::string, std::vector<std::string>> pred_map, ref_map;
    for (const auto& [key, path] : pred_sel)
      pred_map[key] = io::read_selection(path).cohorts;
    for (const auto& [key, path] : ref_sel)
      ref_map[key] = io::read_selection(path).cohorts;
    out.macro.ds_accuracy = metrics::ds_accuracy(pred_map, ref_map);
  }

  // Preprocessing similarity per cohort.
  auto pred_csv = keyed_files(predictions / "preprocessed", ".csv");
  auto ref_csv = keyed_files(reference / "preprocessed", ".csv");
  std::vector<double> aj_all, sj_all, csc_all;
  if (!ref_csv.empty()) {
    require_same_keys(pred_csv, ref_csv, "preprocessed");
    for (const auto& [key, ref_path] : ref_csv) {
      std::string trait = fs::path(key).parent_path().string();
      LinkedDataset ref_ds = io::read_linked_csv(ref_path, trait);
      LinkedDataset pred_ds = io::read_linked_csv(pred_csv.at(key), trait);
      metrics::EvalReport row;
      std::set<std::string> ref_attrs(ref_ds.gene_symbols.begin(),
                                      ref_ds.gene_symbols.end());
      for (const auto& n : ref_ds.clinical.names) ref_attrs.insert(n);
      std::set<std::string> pred_attrs(pred_ds.gene_symbols.begin(),
                                       pred_ds.gene_symbols.end());
      for (const auto& n : pred_ds.clinical.names) pred_attrs.insert(n);
      row.attribute_jaccard = metrics::jaccard(pred_attrs, ref_attrs);
      row.sample_jaccard = metrics::jaccard(
          {pred_ds.sample_ids.begin(), pred_ds.sample_ids.end()},
          {ref_ds.sample_ids.begin(), ref_ds.sample_ids.end()});
      row.csc = metrics::csc(pred_ds, ref_ds);
      aj_all.push_back(*row.attribute_jaccard);
      sj_all.push_back(*row.sample_jaccard);
      csc_all.push_back(*row.csc);
      out.rows["preprocess/" + key] = row;
    }
  }

  // Gene identification per problem.
  auto pred_results = keyed_files(predictions / "analysis", ".json");
  auto ref_results = keyed_files(reference / "analysis", ".json");
  std::vector<double> prec_all, rec_all, f1_all, auroc_all, es_all;
  if (!ref_results.empty()) {
    require_same_keys(pred_results, ref_results, "analysis");
    for (const auto& [key, ref_path] : ref_results) {
      io::StoredResult ref_res = io::read_regression_result(ref_path);
      io::StoredResult pred_res = io::read_regression_result(pred_results.at(key));
      metrics::EvalReport row;

      std::set<std::string> ref_set(ref_res.symbols.begin(), ref_res.symbols.end());
      std::set<std::string> pred_set(pred_res.symbols.begin(),
                                     pred_res.symbols.end());
      metrics::Prf prf = metrics::set_prf(pred_set, ref_set);
      row.precision = prf.precision;
      row.recall = prf.recall;
      row.f1 = prf.f1;

      metrics::GeneScoreList scores = io::result_scores(pred_res);
      scores.universe.insert(ref_res.universe.begin(), ref_res.universe.end());
      scores.universe.insert(ref_set.begin(), ref_set.end());
      try {
        row.auroc = metrics::auroc(scores, ref_set);
      } catch (const Error&) {
      }
      try {
        row.gsea_es = metrics::gsea_es(scores, ref_set);
      } catch (const Error&) {
      }

      prec_all.push_back(*row.precision);
      rec_all.push_back(*row.recall);
      f1_all.push_back(*row.f1);
      if (row.auroc) auroc_all.push_back(*row.auroc);
      if (row.gsea_es) es_all.push_back(*row.gsea_es);
      std::string problem_key = fs::path(key).parent_path().string();
      out.rows[problem_key.empty() ? key : problem_key] = row;
    }
  }

  out.macro.attribute_jaccard = mean_of(aj_all);
  out.macro.sample_jaccard = mean_of(sj_all);
  out.macro.csc = mean_of(csc_all);
  out.macro.precision = mean_of(prec_all);
  out.macro.recall = mean_of(rec_all);
  out.macro.f1 = mean_of(f1_all);
  out.macro.auroc = mean_of(auroc_all);
  out.macro.gsea_es = mean_of(es_all);

  out.json_path = config.out / "eval" / "report.json";
  out.table_path = config.out / "eval" / "report.txt";
  io::write_eval_report_json(out.rows, out.macro, out.json_path);
  fs::create_directories(out.table_path.parent_path());
  std::ofstream table(out.table_path);
  table << io::eval_report_table(out.rows, out.macro);
  return out;
}

namespace {

void write_reference_result(const fs::path& path, const std::string& trait,
                            const std::vector<std::string>& support,
                            const std::vector<std::string>& universe) {
  stats::RegressionResult res;
  res.model = stats::ModelKind::lasso;
  res.feature_names = support;
  res.coefficients = Vector::Ones(static_cast<Eigen::Index>(support.size()));
  for (size_t i = 0; i < support.size(); ++i)
    res.selected.push_back(static_cast<int>(i));
  GTAProblem problem{trait, std::nullopt};
  io::write_regression_result(problem, res, universe, path);
}

}  // namespace

void cmd_synth(const RunConfig& config, const SynthCorpusOptions& opts) {
  fs::path data = config.out / "data";
  fs::path ref = config.out / "reference";

  // Cohort A1/A2: plain linear structure, two sizes so selection is
  // non-trivial. A single draw is split so both cohorts share the planted
  // support.
  synth::SynthConfig cfg;
  cfg.n = opts.n + opts.n_small;
  cfg.p = opts.p;
  cfg.k = opts.k;
  cfg.beta_scale = opts.beta_scale;
  cfg.sigma_eps = opts.sigma_eps;
  cfg.seed = mix_seed(config.seed, 1);
  synth::LinearData lin = synth::gen_linear(cfg);

  Rng demo_rng(mix_seed(config.seed, 2));
  auto make_demo = [&](int n) {
    std::pair<Vector, Vector> out{Vector(n), Vector(n)};
    for (int i = 0; i < n; ++i) {
      out.first(i) = std::floor(20.0 + 60.0 * demo_rng.uniform());
      out.second(i) = demo_rng.uniform() < 0.5 ? 0.0 : 1.0;
    }
    return out;
  };

  auto [age_a, gender_a] = make_demo(opts.n);
  LinkedDataset a1 = synth::make_linked(
      opts.trait_a, VarKind::continuous, lin.y.head(opts.n),
      lin.X.topRows(opts.n), "GSM1", "G", age_a, gender_a);
  auto [age_b, gender_b] = make_demo(opts.n_small);
  LinkedDataset a2 = synth::make_linked(
      opts.trait_a, VarKind::continuous, lin.y.tail(opts.n_small),
      lin.X.bottomRows(opts.n_small), "GSM2", "G", age_b, gender_b);

  synth::write_fixture(a1, synth::FixtureStyle::series_matrix,
                       data / "GEO" / opts.trait_a / "SYNA1");
  synth::write_fixture(a2, synth::FixtureStyle::series_matrix,
                       data / "GEO" / opts.trait_a / "SYNA2");

  // Cohort B: batch structure; probe-level files exercise the annotation
  // mapping path.
  synth::SynthConfig bcfg;
  bcfg.n = opts.n_batched;
  bcfg.p = opts.p_batched;
  bcfg.k = opts.k;
  bcfg.beta_scale = opts.beta_scale;
  bcfg.sigma_eps = opts.sigma_eps;
  bcfg.sigma_u = opts.sigma_u;
  bcfg.n_batches = 2;
  bcfg.batch_shift = opts.batch_shift;
  bcfg.seed = mix_seed(config.seed, 3);
  synth::BatchedData bat = synth::gen_batched(bcfg);
  LinkedDataset b1 = synth::make_linked(opts.trait_b, VarKind::continuous, bat.y,
                                        bat.X, "GSM3", "B");
  synth::write_fixture(b1, synth::FixtureStyle::soft,
                       data / "GEO" / opts.trait_b / "SYNB1");

  // Identity dictionary over every symbol in play, plus a few aliases.
  {
    fs::create_directories(data);
    std::ofstream dict(data / "synonyms.tsv");
    for (const auto& s : a1.gene_symbols) dict << s << "\t" << s << "ALT\n";
    for (const auto& s : b1.gene_symbols) dict << s << "\n";
  }

  // Ground truth mirrors the pipeline's own output layout.
  auto record_for = [](const LinkedDataset& ds, const std::string& id) {
    CohortRecord rec;
    rec.id = id;
    rec.source = Source::geo;
    rec.gene_available = true;
    rec.trait_available = true;
    rec.quality_ok = true;
    rec.sample_count = static_cast<long>(ds.sample_ids.size());
    return rec;
  };
  io::write_cohort_record(record_for(a1, "SYNA1"),
                          ref / "records" / opts.trait_a / "SYNA1.json");
  io::write_cohort_record(record_for(a2, "SYNA2"),
                          ref / "records" / opts.trait_a / "SYNA2.json");
  io::write_cohort_record(record_for(b1, "SYNB1"),
                          ref / "records" / opts.trait_b / "SYNB1.json");

  io::write_selection({{opts.trait_a, std::nullopt}, {"SYNA1"}},
                      ref / "selection" / (opts.trait_a + ".json"));
  io::write_selection({{opts.trait_b, std::nullopt}, {"SYNB1"}},
                      ref / "selection" / (opts.trait_b + ".json"));

  io::write_linked_csv(a1, ref / "preprocessed" / opts.trait_a / "SYNA1.csv");
  io::write_linked_csv(a2, ref / "preprocessed" / opts.trait_a / "SYNA2.csv");
  io::write_linked_csv(b1, ref / "preprocessed" / opts.trait_b / "SYNB1.csv");

  std::vector<std::string> support_a, support_b;
  for (int j : lin.support) support_a.push_back(a1.gene_symbols[static_cast<size_t>(j)]);
  for (int j : bat.support) support_b.push_back(b1.gene_symbols[static_cast<size_t>(j)]);
  write_reference_result(ref / "analysis" / opts.trait_a / "result.json",
                         opts.trait_a, support_a, a1.gene_symbols);
  write_reference_result(ref / "analysis" / opts.trait_b / "result.json",
                         opts.trait_b, support_b, b1.gene_symbols);

  json manifest{{"traits", {opts.trait_a, opts.trait_b}},
                {"seed", config.seed},
                {"planted", {{opts.trait_a, support_a}, {opts.trait_b, support_b}}}};
  std::ofstream mf(config.out / "synth_manifest.json");
  mf << manifest.dump(2) << "\n";
}

}  // namespace gta::pipeline
