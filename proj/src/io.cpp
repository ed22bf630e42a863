#include "gta/io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace gta::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_file(const fs::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded())
    fail(Errc::malformed_file, "invalid JSON in " + path.string());
  return j;
}

}  // namespace

void write_linked_csv(const LinkedDataset& ds, const fs::path& path) {
  std::ofstream out = open_out(path);

  std::vector<size_t> sample_order(ds.sample_ids.size());
  std::iota(sample_order.begin(), sample_order.end(), 0);
  std::sort(sample_order.begin(), sample_order.end(), [&](size_t a, size_t b) {
    return ds.sample_ids[a] < ds.sample_ids[b];
  });

  // Clinical columns in fixed order: trait, Age, Gender.
  std::vector<int> clin_cols{ds.trait_column()};
  for (const char* name : {"Age", "Gender"}) {
    int c = ds.clinical.column_index(name);
    if (c >= 0) clin_cols.push_back(c);
  }
  std::vector<size_t> gene_order(ds.gene_symbols.size());
  std::iota(gene_order.begin(), gene_order.end(), 0);
  std::sort(gene_order.begin(), gene_order.end(), [&](size_t a, size_t b) {
    return ds.gene_symbols[a] < ds.gene_symbols[b];
  });

  out << "sample_id";
  for (int c : clin_cols) out << "," << ds.clinical.names[static_cast<size_t>(c)];
  for (size_t g : gene_order) out << "," << ds.gene_symbols[g];
  out << "\n";
  for (size_t i : sample_order) {
    out << ds.sample_ids[i];
    Eigen::Index row = static_cast<Eigen::Index>(i);
    for (int c : clin_cols)
      out << "," << text::format_g17(ds.clinical.values(row, c));
    for (size_t g : gene_order)
      out << ","
          << text::format_g17(ds.genes(row, static_cast<Eigen::Index>(g)));
    out << "\n";
  }
}

LinkedDataset read_linked_csv(const fs::path& path, const std::string& trait_name) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line))
    fail(Errc::malformed_file, "empty linked CSV " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = text::split(line, ',');
  if (header.size() < 2 || header[0] != "sample_id")
    fail(Errc::malformed_file, "linked CSV header must start with sample_id");

  size_t trait_idx = 0;
  bool found = false;
  std::vector<size_t> clin_idx;
  std::vector<std::string> clin_names;
  std::vector<size_t> gene_idx;
  std::vector<std::string> gene_names;
  for (size_t c = 1; c < header.size(); ++c) {
    if (header[c] == trait_name) {
      trait_idx = c;
      found = true;
      clin_idx.push_back(c);
      clin_names.push_back(header[c]);
    } else if (header[c] == "Age" || header[c] == "Gender") {
      clin_idx.push_back(c);
      clin_names.push_back(header[c]);
    } else {
      gene_idx.push_back(c);
      gene_names.push_back(header[c]);
    }
  }
  if (!found)
    fail(Errc::malformed_file,
         "trait column '" + trait_name + "' not in " + path.string());

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    std::vector<std::string> fields = text::split(line, ',');
    if (fields.size() != header.size())
      fail(Errc::malformed_file, "linked CSV row width mismatch");
    rows.push_back(std::move(fields));
  }

  LinkedDataset ds;
  ds.trait_name = trait_name;
  ds.gene_symbols = gene_names;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  ds.genes.resize(n, static_cast<Eigen::Index>(gene_idx.size()));
  ds.clinical.names = clin_names;
  ds.clinical.values.resize(n, static_cast<Eigen::Index>(clin_idx.size()));
  auto cell = [&](const std::string& field) {
    double v;
    if (text::parse_cell(field, &v) == text::CellParse::bad)
      fail(Errc::malformed_file, "non-numeric cell '" + field + "'");
    return v;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& fields = rows[static_cast<size_t>(i)];
    ds.sample_ids.push_back(fields[0]);
    for (size_t c = 0; c < clin_idx.size(); ++c)
      ds.clinical.values(i, static_cast<Eigen::Index>(c)) = cell(fields[clin_idx[c]]);
    for (size_t g = 0; g < gene_idx.size(); ++g)
      ds.genes(i, static_cast<Eigen::Index>(g)) = cell(fields[gene_idx[g]]);
  }
  ds.clinical.sample_ids = ds.sample_ids;
  for (size_t c = 0; c < clin_names.size(); ++c) {
    bool binary = true;
    for (Eigen::Index i = 0; i < n && binary; ++i) {
      double v = ds.clinical.values(i, static_cast<Eigen::Index>(c));
      if (!is_missing(v) && v != 0.0 && v != 1.0) binary = false;
    }
    if (clin_names[c] == "Age") binary = false;
    ds.clinical.kinds.push_back(binary ? VarKind::binary : VarKind::continuous);
  }
  (void)trait_idx;
  return ds;
}

void write_cohort_record(const CohortRecord& rec, const fs::path& path) {
  json j{{"id", rec.id},
         {"source", source_name(rec.source)},
         {"gene_available", rec.gene_available},
         {"trait_available", rec.trait_available},
         {"quality_ok", rec.quality_ok},
         {"sample_count", rec.sample_count}};
  open_out(path) << j.dump(2) << "\n";
}

CohortRecord read_cohort_record(const fs::path& path) {
  json j = parse_json_file(path);
  CohortRecord rec;
  rec.id = j.at("id").get<std::string>();
  rec.source = j.at("source").get<std::string>() == "TCGA" ? Source::tcga : Source::geo;
  rec.gene_available = j.at("gene_available").get<bool>();
  rec.trait_available = j.at("trait_available").get<bool>();
  rec.quality_ok = j.at("quality_ok").get<bool>();
  rec.sample_count = j.at("sample_count").get<long>();
  return rec;
}

void write_selection(const Selection& sel, const fs::path& path) {
  json j{{"trait", sel.problem.trait},
         {"condition", sel.problem.condition ? json(*sel.problem.condition) : json()},
         {"selected", sel.cohorts}};
  open_out(path) << j.dump(2) << "\n";
}

Selection read_selection(const fs::path& path) {
  json j = parse_json_file(path);
  Selection sel;
  sel.problem.trait = j.at("trait").get<std::string>();
  if (!j.at("condition").is_null())
    sel.problem.condition = j.at("condition").get<std::string>();
  sel.cohorts = j.at("selected").get<std::vector<std::string>>();
  return sel;
}

void write_regression_result(const GTAProblem& problem,
                             const stats::RegressionResult& res,
                             const std::vector<std::string>& universe,
                             const fs::path& path) {
  json genes = json::array();
  for (int idx : res.selected) {
    json g{{"symbol", res.feature_names[static_cast<size_t>(idx)]},
           {"coefficient", res.coefficients(idx)}};
    if (res.p_values.size() > 0) {
      g["p_value"] = res.p_values(idx);
      g["adjusted_p"] = res.adjusted_p(idx);
    }
    genes.push_back(g);
  }
  json j{{"problem",
          {{"trait", problem.trait},
           {"condition", problem.condition ? json(*problem.condition) : json()}}},
         {"model", stats::model_kind_name(res.model)},
         {"significant_genes", genes},
         {"universe", universe},
         {"cv",
          {{"folds", res.cv.folds}, {"grid", res.cv.grid}, {"scores", res.cv.scores}}},
         {"seed", res.seed}};
  if (!is_missing(res.best_lambda)) j["best_lambda"] = res.best_lambda;
  if (!is_missing(res.delta)) j["delta"] = res.delta;
  open_out(path) << j.dump(2) << "\n";
}

StoredResult read_regression_result(const fs::path& path) {
  json j = parse_json_file(path);
  StoredResult out;
  out.problem.trait = j.at("problem").at("trait").get<std::string>();
  if (!j.at("problem").at("condition").is_null())
    out.problem.condition = j.at("problem").at("condition").get<std::string>();
  out.model = j.at("model").get<std::string>() == "LMM" ? stats::ModelKind::lmm
                                                        : stats::ModelKind::lasso;
  if (j.contains("universe"))
    out.universe = j.at("universe").get<std::vector<std::string>>();
  for (const auto& g : j.at("significant_genes")) {
    out.symbols.push_back(g.at("symbol").get<std::string>());
    out.coefficients.push_back(g.value("coefficient", 0.0));
    if (g.contains("adjusted_p"))
      out.adjusted_p.push_back(g.at("adjusted_p").get<double>());
  }
  return out;
}

metrics::GeneScoreList result_scores(const StoredResult& result) {
  metrics::GeneScoreList list;
  list.universe.insert(result.universe.begin(), result.universe.end());
  for (size_t i = 0; i < result.symbols.size(); ++i) {
    double score;
    if (result.model == stats::ModelKind::lmm && i < result.adjusted_p.size())
      score = 1.0 - result.adjusted_p[i];
    else
      score = std::abs(result.coefficients[i]);
    list.scores[result.symbols[i]] = score;
    list.universe.insert(result.symbols[i]);
  }
  return list;
}

CohortRules read_rules(const fs::path& path) {
  json j = parse_json_file(path);
  CohortRules out;
  out.source = j.value("source", "GEO") == "TCGA" ? Source::tcga : Source::geo;
  out.id_column = j.value("id_column", "sampleID");
  if (!j.contains("rules") || !j.at("rules").is_array())
    fail(Errc::invalid_config, "rules file needs a 'rules' array: " + path.string());
  for (const auto& r : j.at("rules")) {
    BoundRule bound;
    bound.variable = r.at("variable").get<std::string>();
    std::string kind = r.at("kind").get<std::string>();
    if (kind != "binary" && kind != "continuous")
      fail(Errc::invalid_config, "rule kind must be binary or continuous");
    bound.rule.target_kind = kind == "binary" ? VarKind::binary : VarKind::continuous;
    bound.rule.prefix_strip = r.value("prefix_strip", true);
    if (r.contains("clauses")) {
      for (const auto& c : r.at("clauses")) {
        clinical::MatchClause clause;
        clause.pattern = c.at("pattern").get<std::string>();
        clause.case_insensitive = c.value("case_insensitive", true);
        clause.value = c.at("value").get<double>();
        bound.rule.clauses.push_back(std::move(clause));
      }
    }
    if (r.contains("numeric")) {
      clinical::NumericParse np;
      if (r.at("numeric").contains("suffixes"))
        np.suffixes = r.at("numeric").at("suffixes").get<std::vector<std::string>>();
      bound.rule.numeric = std::move(np);
    }
    bound.row = r.value("row", -1);
    bound.column = r.value("column", "");
    if (r.contains("candidates"))
      bound.candidates = r.at("candidates").get<std::vector<std::string>>();
    clinical::validate_rule(bound.rule);
    out.rules.push_back(std::move(bound));
  }
  return out;
}

namespace {

json report_json(const metrics::EvalReport& r) {
  json j = json::object();
  auto put = [&](const char* name, const std::optional<double>& v) {
    if (v) j[name] = *v;
  };
  put("df_f1", r.df_f1);
  put("ds_accuracy", r.ds_accuracy);
  put("attribute_jaccard", r.attribute_jaccard);
  put("sample_jaccard", r.sample_jaccard);
  put("csc", r.csc);
  put("precision", r.precision);
  put("recall", r.recall);
  put("f1", r.f1);
  put("auroc", r.auroc);
  put("gsea_es", r.gsea_es);
  return j;
}

}  // namespace

void write_eval_report_json(const std::map<std::string, metrics::EvalReport>& per_problem,
                            const metrics::EvalReport& macro, const fs::path& path) {
  json problems = json::object();
  for (const auto& [key, report] : per_problem) problems[key] = report_json(report);
  json j{{"per_problem", problems}, {"macro", report_json(macro)}};
  open_out(path) << j.dump(2) << "\n";
}

std::string eval_report_table(const std::map<std::string, metrics::EvalReport>& per_problem,
                              const metrics::EvalReport& macro) {
  static const char* kColumns[] = {"DF",   "DS",  "AJ", "SJ",    "CSC",
                                   "Prec", "Rec", "F1", "AUROC", "ES"};
  auto fields = [](const metrics::EvalReport& r) {
    return std::vector<std::optional<double>>{
        r.df_f1, r.ds_accuracy, r.attribute_jaccard, r.sample_jaccard, r.csc,
        r.precision, r.recall, r.f1, r.auroc, r.gsea_es};
  };
  size_t name_width = std::string("problem").size();
  for (const auto& [key, _] : per_problem) name_width = std::max(name_width, key.size());
  name_width = std::max(name_width, std::string("macro").size());

  std::ostringstream out;
  out << std::left;
  auto row = [&](const std::string& name, const metrics::EvalReport& r) {
    out.width(static_cast<std::streamsize>(name_width + 2));
    out << name;
    for (const auto& v : fields(r)) {
      char buf[16];
      if (v)
        std::snprintf(buf, sizeof(buf), "%8.4f", *v);
      else
        std::snprintf(buf, sizeof(buf), "%8s", "-");
      out << buf;
    }
    out << "\n";
  };
  out.width(static_cast<std::streamsize>(name_width + 2));
  out << "problem";
  for (const char* c : kColumns) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%8s", c);
    out << buf;
  }
  out << "\n";
  for (const auto& [key, report] : per_problem) row(key, report);
  row("macro", macro);
  return out.str();
}

std::string error_json(const std::string& code, const std::string& message) {
  json j{{"error", {{"code", code}, {"message", message}}}};
  return j.dump();
}

}  // namespace gta::io
