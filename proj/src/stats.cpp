#include "gta/stats.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>

#include "gta/rng.hpp"

namespace gta::stats {

namespace {

constexpr double kTiny = 1e-300;

bool is_constant(const Eigen::Ref<const Vector>& v) {
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) != v(0)) return false;
  return true;
}

double soft_threshold(double x, double lambda) {
  if (x > lambda) return x - lambda;
  if (x < -lambda) return x + lambda;
  return 0.0;
}

}  // namespace

Matrix zscore(const Eigen::Ref<const Matrix>& M, ZScale* scale) {
  const Eigen::Index n = M.rows(), p = M.cols();
  Vector mean = n > 0 ? Vector(M.colwise().mean()) : Vector::Zero(p);
  Vector sd(p);
  Matrix out(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double var = n > 0 ? (M.col(j).array() - mean(j)).square().sum() / n : 0.0;
    sd(j) = std::sqrt(var);
    if (sd(j) > 0.0)
      out.col(j) = (M.col(j).array() - mean(j)) / sd(j);
    else
      out.col(j).setZero();
  }
  if (scale) {
    scale->mean = std::move(mean);
    scale->sd = std::move(sd);
  }
  return out;
}

Matrix apply_zscore(const Eigen::Ref<const Matrix>& M, const ZScale& scale) {
  Matrix out(M.rows(), M.cols());
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    if (scale.sd(j) > 0.0)
      out.col(j) = (M.col(j).array() - scale.mean(j)) / scale.sd(j);
    else
      out.col(j).setZero();
  }
  return out;
}

Vector zscore_vector(const Eigen::Ref<const Vector>& v, double* mean, double* sd) {
  double m = v.size() > 0 ? v.mean() : 0.0;
  double var = v.size() > 0 ? (v.array() - m).square().sum() / v.size() : 0.0;
  double s = std::sqrt(var);
  if (mean) *mean = m;
  if (sd) *sd = s;
  if (s > 0.0) return (v.array() - m) / s;
  return Vector::Zero(v.size());
}

bool detect_batch_effect(const Eigen::Ref<const Matrix>& X, int t) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (n < 2) fail(Errc::too_few_samples, "batch detection needs at least 2 samples");
  if (t < 1) fail(Errc::invalid_input, "gap scan depth must be at least 1");
  if (p < 1) fail(Errc::invalid_input, "batch detection needs at least 1 feature");

  Matrix K = (X * X.transpose()) / static_cast<double>(p);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(K, Eigen::EigenvaluesOnly);
  Vector e = eig.eigenvalues().reverse();  // descending
  for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = std::max(e(i), 0.0);

  // Gaps are read on the share of total variance each component explains,
  // so the 1/n threshold does not depend on the data scale.
  double total = e.sum();
  if (total <= 0.0) return false;
  const Eigen::Index limit = std::min<Eigen::Index>(t, n - 1);
  for (Eigen::Index i = 0; i < limit; ++i) {
    if ((e(i) - e(i + 1)) / total > 1.0 / static_cast<double>(n)) return true;
  }
  return false;
}

std::vector<double> default_delta_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(std::pow(10.0, -5.0 + 0.5 * k));
  return grid;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int k = -6; k <= 0; ++k) grid.push_back(std::pow(10.0, k));
  return grid;
}

DeltaEstimate estimate_delta(const Eigen::Ref<const Matrix>& X,
                             const Eigen::Ref<const Vector>& y,
                             const std::vector<double>& grid,
                             Warnings* warnings) {
  if (grid.empty()) fail(Errc::invalid_input, "empty delta grid");
  if (X.rows() != y.size())
    fail(Errc::invalid_input, "X and y row counts differ");
  if (X.rows() < 1 || X.cols() < 1)
    fail(Errc::invalid_input, "empty design matrix");
  const Eigen::Index n = X.rows();

  // Feature-averaged kernel: its eigenvalues stay O(1) however many genes
  // there are, which is the scale the search grid assumes. The per-feature
  // solves are invariant to this scaling once the ratio is converted back
  // (see raw_delta).
  Eigen::SelfAdjointEigenSolver<Matrix> eig((X * X.transpose()) /
                                            static_cast<double>(X.cols()));
  Vector e = eig.eigenvalues().cwiseMax(0.0);
  Vector w = eig.eigenvectors().transpose() * y;
  Vector a = eig.eigenvectors().transpose() * Vector::Ones(n);

  DeltaEstimate out;
  out.grid = grid;
  out.log_likelihood.resize(grid.size());
  size_t best = 0;
  for (size_t g = 0; g < grid.size(); ++g) {
    Vector d = e.array() + grid[g];
    double denom = (a.array().square() / d.array()).sum();
    double mu = denom > 0.0 ? (a.array() * w.array() / d.array()).sum() / denom : 0.0;
    double s2 = ((w.array() - mu * a.array()).square() / d.array()).sum() / n;
    s2 = std::max(s2, kTiny);
    out.log_likelihood[g] =
        -0.5 * (n * std::log(s2) + d.array().log().sum() + n);
    if (out.log_likelihood[g] > out.log_likelihood[best]) best = g;
  }
  out.delta = grid[best];
  out.at_boundary = best == 0 || best + 1 == grid.size();
  if (out.at_boundary)
    warn(warnings, "variance ratio estimate sits on the grid boundary (" +
                       text::format_g17(out.delta) + ")");
  return out;
}

LmmSpec make_lmm_spec(const Eigen::Ref<const Matrix>& X, double delta) {
  if (X.rows() < 1) fail(Errc::invalid_input, "empty design matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(X * X.transpose());
  LmmSpec spec;
  spec.delta = delta;
  spec.eigvals = eig.eigenvalues().cwiseMax(0.0);
  spec.eigvecs = eig.eigenvectors();
  return spec;
}

namespace {

Vector whitening_scales(const LmmSpec& spec) {
  Vector d = spec.eigvals.array() + spec.delta;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d(i) <= 0.0)
      fail(Errc::singular_model,
           "delta + eigenvalue is not positive; the model covariance is singular");
  return d.array().rsqrt();
}

}  // namespace

Matrix whitener(const LmmSpec& spec) {
  Vector s = whitening_scales(spec);
  return spec.eigvecs * s.asDiagonal() * spec.eigvecs.transpose();
}

Matrix rotate(const Eigen::Ref<const Matrix>& X, const LmmSpec& spec) {
  Vector s = whitening_scales(spec);
  Matrix r = spec.eigvecs.transpose() * X;
  r.array().colwise() *= s.array();
  return spec.eigvecs * r;
}

Vector rotate_vector(const Eigen::Ref<const Vector>& y, const LmmSpec& spec) {
  Vector s = whitening_scales(spec);
  Vector r = spec.eigvecs.transpose() * y;
  r.array() *= s.array();
  return spec.eigvecs * r;
}

RegressionResult lmm_fit(const DesignMatrices& dm, const LmmSpec& spec,
                         double alpha) {
  const Eigen::Index n = dm.X.rows(), p = dm.X.cols();
  if (n < 2 || p < 1) fail(Errc::invalid_input, "design matrix too small");
  if (dm.y.size() != n) fail(Errc::invalid_input, "X and y row counts differ");
  if (is_constant(dm.y)) fail(Errc::invalid_input, "trait is constant");

  Vector s = whitening_scales(spec);
  // Whitened coordinates: rows scaled by 1/sqrt(delta + e) in the eigenbasis.
  Matrix Xw = spec.eigvecs.transpose() * dm.X;
  Xw.array().colwise() *= s.array();
  Vector yw = spec.eigvecs.transpose() * dm.y;
  yw.array() *= s.array();

  if (dm.C && dm.C->cols() > 0) {
    Matrix Cw = spec.eigvecs.transpose() * *dm.C;
    Cw.array().colwise() *= s.array();
    Eigen::ColPivHouseholderQR<Matrix> qr(Cw);
    yw -= Cw * qr.solve(yw);
    Xw -= Cw * qr.solve(Xw);
  }

  RegressionResult res;
  res.model = ModelKind::lmm;
  res.feature_names = dm.feature_names;
  res.delta = spec.delta;
  res.coefficients.resize(p);
  res.std_errors.resize(p);
  res.p_values.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double a = Xw.col(j).squaredNorm();
    double b = Xw.col(j).dot(yw);
    if (a <= kTiny) {
      res.coefficients(j) = 0.0;
      res.std_errors(j) = std::numeric_limits<double>::infinity();
      res.p_values(j) = 1.0;
      continue;
    }
    double beta = b / a;
    double sigma2 = (yw - Xw.col(j) * beta).squaredNorm() / n;
    double se = std::sqrt(sigma2 / a);
    res.coefficients(j) = beta;
    res.std_errors(j) = se;
    if (se > 0.0) {
      double z = std::abs(beta) / se;
      res.p_values(j) = std::erfc(z / std::sqrt(2.0));
    } else {
      res.p_values(j) = beta == 0.0 ? 1.0 : 0.0;
    }
  }

  BhResult bh = bh_correct(res.p_values, alpha);
  res.adjusted_p = bh.adjusted;
  for (Eigen::Index j = 0; j < p; ++j)
    if (res.adjusted_p(j) < alpha) res.selected.push_back(static_cast<int>(j));
  return res;
}

LassoFit lasso_fit(const Eigen::Ref<const Matrix>& X,
                   const Eigen::Ref<const Vector>& y, const Matrix* C,
                   const LassoOptions& opts) {
  const Eigen::Index n = X.rows(), p = X.cols();
  const Eigen::Index q = C ? C->cols() : 0;
  if (y.size() != n) fail(Errc::invalid_input, "X and y row counts differ");
  if (C && C->rows() != n) fail(Errc::invalid_input, "C row count differs");
  if (!(opts.lambda >= 0.0)) fail(Errc::invalid_input, "negative penalty");

  Vector xsq(p), csq(q);
  for (Eigen::Index j = 0; j < p; ++j) xsq(j) = X.col(j).squaredNorm();
  for (Eigen::Index k = 0; k < q; ++k) csq(k) = C->col(k).squaredNorm();

  LassoFit fit;
  fit.beta = Vector::Zero(p);
  fit.cond_coef = Vector::Zero(q);
  Vector r = y;

  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    fit.sweeps = sweep;
    double dmax = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (xsq(j) <= 0.0) continue;
      double rho = X.col(j).dot(r) + xsq(j) * fit.beta(j);
      double next = soft_threshold(rho, opts.lambda) / xsq(j);
      double d = next - fit.beta(j);
      if (d != 0.0) {
        r -= d * X.col(j);
        fit.beta(j) = next;
        dmax = std::max(dmax, std::abs(d));
      }
    }
    for (Eigen::Index k = 0; k < q; ++k) {
      if (csq(k) <= 0.0) continue;
      double rho = C->col(k).dot(r) + csq(k) * fit.cond_coef(k);
      double next = rho / csq(k);
      double d = next - fit.cond_coef(k);
      if (d != 0.0) {
        r -= d * C->col(k);
        fit.cond_coef(k) = next;
        dmax = std::max(dmax, std::abs(d));
      }
    }
    if (dmax < opts.tol) {
      // Declare convergence only once the stationarity conditions hold.
      double violation = 0.0;
      Vector grad = X.transpose() * r;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (xsq(j) <= 0.0) continue;
        if (fit.beta(j) == 0.0)
          violation = std::max(violation, std::abs(grad(j)) - opts.lambda);
        else
          violation = std::max(
              violation,
              std::abs(grad(j) - opts.lambda * (fit.beta(j) > 0 ? 1.0 : -1.0)));
      }
      if (q > 0) {
        Vector gc = C->transpose() * r;
        for (Eigen::Index k = 0; k < q; ++k)
          if (csq(k) > 0.0) violation = std::max(violation, std::abs(gc(k)));
      }
      if (violation <= opts.kkt_tol) {
        fit.converged = true;
        break;
      }
    }
  }

  double objective = 0.5 * r.squaredNorm() + opts.lambda * fit.beta.lpNorm<1>();
  if (!std::isfinite(objective) || !fit.beta.allFinite() ||
      !fit.cond_coef.allFinite())
    fail(Errc::numerical_error, "lasso objective diverged");
  return fit;
}

BhResult bh_correct(const Eigen::Ref<const Vector>& p, double alpha) {
  const Eigen::Index m = p.size();
  for (Eigen::Index i = 0; i < m; ++i)
    if (!(p(i) >= 0.0 && p(i) <= 1.0))
      fail(Errc::invalid_input,
           "p-value out of [0,1]: " + text::format_g17(p(i)));

  std::vector<Eigen::Index> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return p(a) < p(b); });

  BhResult out;
  out.adjusted.resize(m);
  out.rejected.assign(m, false);

  double running = 1.0;
  for (Eigen::Index k = m - 1; k >= 0; --k) {
    double scaled = p(order[k]) * m / static_cast<double>(k + 1);
    running = std::min(running, scaled);
    out.adjusted(order[k]) = running;
  }

  Eigen::Index cutoff = -1;
  for (Eigen::Index k = 0; k < m; ++k)
    if (p(order[k]) <= (k + 1) * alpha / static_cast<double>(m)) cutoff = k;
  for (Eigen::Index k = 0; k <= cutoff; ++k) out.rejected[order[k]] = true;
  return out;
}

std::vector<int> cv_fold_assignment(int n, int folds, std::uint64_t seed) {
  if (folds < 2) fail(Errc::invalid_input, "need at least 2 folds");
  if (n < folds)
    fail(Errc::too_few_samples, "need at least " + std::to_string(folds) +
                                    " samples for " + std::to_string(folds) +
                                    "-fold cross-validation");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(perm);
  std::vector<int> assign(n);
  for (int i = 0; i < n; ++i) assign[perm[static_cast<size_t>(i)]] = i % folds;
  return assign;
}

namespace {

struct StandardizedFit {
  Vector beta;
  Vector cond_coef;
  ZScale xs;
  ZScale cs;
  double y_mean = 0.0;
  double y_sd = 1.0;
};

Matrix take_rows(const Matrix& M, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), M.cols());
  for (size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = M.row(rows[i]);
  return out;
}

Vector take_rows(const Vector& v, const std::vector<int>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = v(rows[i]);
  return out;
}

// Standardizes features, condition columns and target on the given data,
// then solves the penalized problem with the per-sample penalty scaled by
// the row count.
StandardizedFit fit_standardized(const Matrix& X, const Vector& y,
                                 const Matrix* C, double alpha) {
  StandardizedFit fit;
  Matrix Xz = zscore(X, &fit.xs);
  Vector yz = zscore_vector(y, &fit.y_mean, &fit.y_sd);
  std::optional<Matrix> Cz;
  if (C && C->cols() > 0) Cz = zscore(*C, &fit.cs);

  LassoOptions opts;
  opts.lambda = alpha * static_cast<double>(X.rows());
  LassoFit lf = lasso_fit(Xz, yz, Cz ? &*Cz : nullptr, opts);
  fit.beta = std::move(lf.beta);
  fit.cond_coef = std::move(lf.cond_coef);
  return fit;
}

// Predictions in original target units.
Vector predict_standardized(const StandardizedFit& fit, const Matrix& X,
                            const Matrix* C) {
  Vector z = apply_zscore(X, fit.xs) * fit.beta;
  if (C && C->cols() > 0) z += apply_zscore(*C, fit.cs) * fit.cond_coef;
  double sd = fit.y_sd > 0.0 ? fit.y_sd : 1.0;
  return (z.array() * sd + fit.y_mean).matrix();
}

// Binary targets score by accuracy at the 0.5 threshold. Continuous targets
// score by validation R^2 adjusted for the degrees of freedom the fit spent
// (nonzero coefficients plus condition columns plus the centering term);
// the raw statistic cannot tell a sparse fit from one that drags in a
// hundred near-zero coefficients.
double fold_score(const Vector& truth, const Vector& pred, VarKind kind,
                  long df, long n_train) {
  if (kind == VarKind::binary) {
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < truth.size(); ++i)
      if ((pred(i) >= 0.5 ? 1.0 : 0.0) == truth(i)) ++hits;
    return static_cast<double>(hits) / truth.size();
  }
  double mean = truth.mean();
  double sst = (truth.array() - mean).square().sum();
  double ssr = (truth - pred).squaredNorm();
  double r2;
  if (sst <= 0.0)
    r2 = ssr < 1e-24 ? 1.0 : 0.0;
  else
    r2 = 1.0 - ssr / sst;
  if (n_train - df - 1 < 1) return -std::numeric_limits<double>::infinity();
  return 1.0 - (1.0 - r2) * static_cast<double>(n_train - 1) /
                   static_cast<double>(n_train - df - 1);
}

}  // namespace

TuneOutcome tune_hyperparameters(ModelKind kind, const DesignMatrices& dm,
                                 const TuneConfig& cfg) {
  if (cfg.grid.empty()) fail(Errc::invalid_input, "empty hyperparameter grid");
  TuneOutcome out;
  out.grid = cfg.grid;

  if (kind == ModelKind::lmm) {
    DeltaEstimate est = estimate_delta(dm.X, dm.y, cfg.grid);
    out.best = est.delta;
    out.scores = est.log_likelihood;
    return out;
  }

  const int n = static_cast<int>(dm.X.rows());
  std::vector<int> assign = cv_fold_assignment(n, cfg.folds, cfg.seed);
  out.scores.assign(cfg.grid.size(), 0.0);

  std::vector<std::vector<int>> train_rows(cfg.folds), val_rows(cfg.folds);
  for (int i = 0; i < n; ++i) {
    for (int f = 0; f < cfg.folds; ++f)
      (assign[static_cast<size_t>(i)] == f ? val_rows : train_rows)[f].push_back(i);
  }

  for (size_t g = 0; g < cfg.grid.size(); ++g) {
    double total = 0.0;
    for (int f = 0; f < cfg.folds; ++f) {
      Matrix Xtr = take_rows(dm.X, train_rows[f]);
      Vector ytr = take_rows(dm.y, train_rows[f]);
      Matrix Xva = take_rows(dm.X, val_rows[f]);
      Vector yva = take_rows(dm.y, val_rows[f]);
      std::optional<Matrix> Ctr, Cva;
      if (dm.C && dm.C->cols() > 0) {
        Ctr = take_rows(*dm.C, train_rows[f]);
        Cva = take_rows(*dm.C, val_rows[f]);
      }
      StandardizedFit fit =
          fit_standardized(Xtr, ytr, Ctr ? &*Ctr : nullptr, cfg.grid[g]);
      Vector pred = predict_standardized(fit, Xva, Cva ? &*Cva : nullptr);
      long df = 1 + (Ctr ? Ctr->cols() : 0);
      for (Eigen::Index j = 0; j < fit.beta.size(); ++j)
        if (fit.beta(j) != 0.0) ++df;
      total += fold_score(yva, pred, dm.y_kind, df,
                          static_cast<long>(train_rows[f].size()));
    }
    out.scores[g] = total / cfg.folds;
  }

  size_t best = 0;
  for (size_t g = 1; g < cfg.grid.size(); ++g) {
    if (out.scores[g] > out.scores[best] ||
        (out.scores[g] == out.scores[best] && cfg.grid[g] < cfg.grid[best]))
      best = g;
  }
  out.best = cfg.grid[best];
  return out;
}

namespace {

// Column indices in the iteration order of `wanted` (sorted), so the two
// datasets' common-regressor submatrices line up symbol by symbol.
std::vector<int> symbol_columns(const std::vector<std::string>& symbols,
                                const std::set<std::string>& wanted) {
  std::vector<int> idx;
  idx.reserve(wanted.size());
  for (const std::string& s : wanted) {
    for (size_t j = 0; j < symbols.size(); ++j) {
      if (symbols[j] == s) {
        idx.push_back(static_cast<int>(j));
        break;
      }
    }
  }
  return idx;
}

Matrix take_cols(const Matrix& M, const std::vector<int>& cols) {
  Matrix out(M.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = M.col(cols[j]);
  return out;
}

}  // namespace

DesignMatrices two_step_regress(const LinkedDataset& trait_ds,
                                const LinkedDataset& cond_ds,
                                const std::set<std::string>& known_condition_genes,
                                const AnalysisOptions& opts) {
  std::set<std::string> cond_genes(cond_ds.gene_symbols.begin(),
                                   cond_ds.gene_symbols.end());
  std::set<std::string> common;
  for (const std::string& g : trait_ds.gene_symbols)
    if (cond_genes.count(g) && known_condition_genes.count(g)) common.insert(g);
  if (common.empty())
    fail(Errc::no_common_regressors,
         "no known condition gene is shared by both datasets");

  Vector cond_y = cond_ds.trait_values();
  if (is_constant(cond_y))
    fail(Errc::invalid_input, "condition is constant in the condition dataset");

  std::vector<int> cond_cols = symbol_columns(cond_ds.gene_symbols, common);
  Matrix Xc = take_cols(cond_ds.genes, cond_cols);

  DesignMatrices cond_dm;
  cond_dm.X = Xc;
  cond_dm.y = cond_y;
  cond_dm.y_kind = cond_ds.trait_kind();
  TuneConfig tune_cfg{opts.lambda_grid, opts.folds, mix_seed(opts.seed, 101)};
  TuneOutcome tuned = tune_hyperparameters(ModelKind::lasso, cond_dm, tune_cfg);
  StandardizedFit fit = fit_standardized(Xc, cond_y, nullptr, tuned.best);

  std::vector<int> trait_common = symbol_columns(trait_ds.gene_symbols, common);
  Matrix Xc_trait = take_cols(trait_ds.genes, trait_common);
  Vector predicted = predict_standardized(fit, Xc_trait, nullptr);
  if (cond_ds.trait_kind() == VarKind::binary)
    predicted = (predicted.array() >= 0.5).cast<double>();

  DesignMatrices dm;
  dm.y = trait_ds.trait_values();
  dm.y_kind = trait_ds.trait_kind();
  std::vector<int> rest;
  for (size_t j = 0; j < trait_ds.gene_symbols.size(); ++j)
    if (!common.count(trait_ds.gene_symbols[j])) rest.push_back(static_cast<int>(j));
  if (rest.empty())
    fail(Errc::invalid_input,
         "no gene features remain after removing the common regressors");
  dm.X = take_cols(trait_ds.genes, rest);
  for (int j : rest) dm.feature_names.push_back(trait_ds.gene_symbols[static_cast<size_t>(j)]);
  dm.C = Matrix(predicted.size(), 1);
  dm.C->col(0) = predicted;
  dm.condition_names = {cond_ds.trait_name};
  return dm;
}

RegressionResult run_gta_analysis(const GTAProblem& problem,
                                  const AnalysisInput& input,
                                  const AnalysisOptions& opts) {
  if (problem.condition && *problem.condition == problem.trait)
    fail(Errc::invalid_input, "condition equals trait");
  const LinkedDataset& ds = input.trait_ds;
  if (ds.trait_column() < 0)
    fail(Errc::invalid_input, "trait '" + problem.trait + "' not in dataset");

  DesignMatrices dm;
  if (!problem.condition) {
    dm.X = ds.genes;
    dm.y = ds.trait_values();
    dm.y_kind = ds.trait_kind();
    dm.feature_names = ds.gene_symbols;
  } else if (*problem.condition == "Age" || *problem.condition == "Gender") {
    int col = ds.clinical.column_index(*problem.condition);
    if (col < 0)
      fail(Errc::invalid_input,
           "condition column '" + *problem.condition + "' not in dataset");
    dm.X = ds.genes;
    dm.y = ds.trait_values();
    dm.y_kind = ds.trait_kind();
    dm.feature_names = ds.gene_symbols;
    dm.C = Matrix(ds.genes.rows(), 1);
    dm.C->col(0) = ds.clinical.values.col(col);
    dm.condition_names = {*problem.condition};
  } else {
    if (!input.cond_ds)
      fail(Errc::invalid_input,
           "conditional analysis on another trait needs a condition dataset");
    dm = two_step_regress(ds, *input.cond_ds, input.known_condition_genes, opts);
  }

  if (dm.X.rows() < 2 || dm.X.cols() < 1)
    fail(Errc::invalid_input, "design matrix too small");
  if (is_constant(dm.y)) fail(Errc::invalid_input, "trait is constant");

  ZScale x_scale;
  Matrix Xz = zscore(dm.X, &x_scale);
  std::optional<Matrix> Cz;
  ZScale c_scale;
  if (dm.C && dm.C->cols() > 0) Cz = zscore(*dm.C, &c_scale);

  bool batched = detect_batch_effect(Xz, opts.gap_t);

  RegressionResult res;
  if (batched && !opts.use_rotation) {
    DeltaEstimate delta = estimate_delta(Xz, dm.y, opts.delta_grid);
    LmmSpec spec = make_lmm_spec(Xz, delta.raw_delta(Xz.cols()));
    DesignMatrices dmz = dm;
    dmz.X = Xz;
    if (Cz) dmz.C = *Cz;
    res = lmm_fit(dmz, spec, opts.alpha);
    res.delta = delta.delta;
    res.cv.grid = delta.grid;
    res.cv.scores = delta.log_likelihood;
    res.norm.x_mean = x_scale.mean;
    res.norm.x_sd = x_scale.sd;
  } else {
    // Vanilla penalized path, on whitened data when batch structure was
    // detected and the rotation route is selected.
    DesignMatrices dmf = dm;
    double delta = missing_value();
    if (batched) {
      DeltaEstimate est = estimate_delta(Xz, dm.y, opts.delta_grid);
      delta = est.delta;
      LmmSpec spec = make_lmm_spec(Xz, est.raw_delta(Xz.cols()));
      dmf.X = rotate(Xz, spec);
      if (Cz) dmf.C = rotate(Matrix(*Cz), spec);
      if (opts.rotate_y) dmf.y = rotate_vector(dm.y, spec);
    }
    TuneConfig tune_cfg{opts.lambda_grid, opts.folds, opts.seed};
    TuneOutcome tuned = tune_hyperparameters(ModelKind::lasso, dmf, tune_cfg);
    StandardizedFit fit = fit_standardized(
        dmf.X, dmf.y, dmf.C && dmf.C->cols() > 0 ? &*dmf.C : nullptr, tuned.best);
    res.model = ModelKind::lasso;
    res.feature_names = dm.feature_names;
    res.coefficients = fit.beta;
    res.best_lambda = tuned.best;
    res.delta = delta;
    for (Eigen::Index j = 0; j < fit.beta.size(); ++j)
      if (fit.beta(j) != 0.0) res.selected.push_back(static_cast<int>(j));
    res.norm.x_mean = fit.xs.mean;
    res.norm.x_sd = fit.xs.sd;
    res.norm.y_mean = fit.y_mean;
    res.norm.y_sd = fit.y_sd;
    res.norm.y_standardized = true;
    res.cv.folds = opts.folds;
    res.cv.grid = tuned.grid;
    res.cv.scores = tuned.scores;
  }
  res.seed = opts.seed;
  return res;
}

TraitCvReport predict_trait_cv(const LinkedDataset& ds,
                               const AnalysisOptions& opts) {
  if (ds.trait_kind() != VarKind::binary)
    fail(Errc::invalid_input, "trait prediction needs a binary trait");
  Vector y = ds.trait_values();
  if (is_constant(y)) fail(Errc::invalid_input, "trait is constant");
  const int n = static_cast<int>(ds.genes.rows());
  std::vector<int> assign = cv_fold_assignment(n, opts.folds, opts.seed);

  TraitCvReport report;
  double acc_total = 0.0, f1_total = 0.0;
  for (int f = 0; f < opts.folds; ++f) {
    std::vector<int> train, val;
    for (int i = 0; i < n; ++i)
      (assign[static_cast<size_t>(i)] == f ? val : train).push_back(i);

    Matrix Xtr = take_rows(ds.genes, train);
    Vector ytr = take_rows(y, train);
    Matrix Xva = take_rows(ds.genes, val);
    Vector yva = take_rows(y, val);

    DesignMatrices dm_train;
    dm_train.X = Xtr;
    dm_train.y = ytr;
    dm_train.y_kind = VarKind::binary;
    TuneConfig inner{opts.lambda_grid, opts.folds,
                     mix_seed(opts.seed, static_cast<std::uint64_t>(f) + 1)};
    TuneOutcome tuned = tune_hyperparameters(ModelKind::lasso, dm_train, inner);
    StandardizedFit fit = fit_standardized(Xtr, ytr, nullptr, tuned.best);
    Vector pred = predict_standardized(fit, Xva, nullptr);

    long tp = 0, fp = 0, fn = 0, hits = 0;
    for (Eigen::Index i = 0; i < yva.size(); ++i) {
      double cls = pred(i) >= 0.5 ? 1.0 : 0.0;
      if (cls == yva(i)) ++hits;
      if (cls == 1.0 && yva(i) == 1.0) ++tp;
      if (cls == 1.0 && yva(i) == 0.0) ++fp;
      if (cls == 0.0 && yva(i) == 1.0) ++fn;
    }
    double acc = static_cast<double>(hits) / yva.size();
    double f1 = (2 * tp + fp + fn) > 0
                    ? 2.0 * tp / static_cast<double>(2 * tp + fp + fn)
                    : 1.0;
    acc_total += acc;
    f1_total += f1;
    report.folds.push_back(
        {tuned.best, fit.beta, fit.y_mean, fit.y_sd, acc});
  }
  report.accuracy = acc_total / opts.folds;
  report.f1 = f1_total / opts.folds;
  return report;
}

}  // namespace gta::stats
