#pragma once

#include <set>

#include "gta/types.hpp"

namespace gta::stats {

// Gene features X (samples x genes), trait y, optional condition matrix C.
struct DesignMatrices {
  Matrix X;
  Vector y;
  VarKind y_kind = VarKind::continuous;
  std::optional<Matrix> C;
  std::vector<std::string> feature_names;
  std::vector<std::string> condition_names;
};

struct ZScale {
  Vector mean;
  Vector sd;  // population (1/n) convention; 0 marks a constant column
};

// Column-standardizes M; constant columns map to all-zeros.
Matrix zscore(const Eigen::Ref<const Matrix>& M, ZScale* scale = nullptr);

// Applies a previously fitted scale (training-fold statistics) to new rows.
Matrix apply_zscore(const Eigen::Ref<const Matrix>& M, const ZScale& scale);

Vector zscore_vector(const Eigen::Ref<const Vector>& v, double* mean = nullptr,
                     double* sd = nullptr);

// Scans the top spectral gaps of the sample-side covariance of z-scored X.
// Eigenvalues are normalized by their sum, so a gap above 1/n means one
// component explains disproportionate variance and the samples likely come
// from more than one population.
bool detect_batch_effect(const Eigen::Ref<const Matrix>& X, int t = 10);

std::vector<double> default_delta_grid();  // 21 points, 1e-5 .. 1e5
std::vector<double> default_lambda_grid(); // powers of 10, 1e-6 .. 1e0

struct DeltaEstimate {
  double delta = 1.0;  // ratio relative to the feature-averaged kernel
  bool at_boundary = false;
  std::vector<double> grid;
  std::vector<double> log_likelihood;

  // Same ratio expressed against the raw X X^T, as the per-feature solves
  // and the whitener use it.
  double raw_delta(Eigen::Index p) const {
    return delta * static_cast<double>(p);
  }
};

// Variance-ratio estimate maximizing the null-model likelihood
// y ~ N(mu*1, sigma^2 (K + delta I)) with K = X X^T / p over a log-spaced
// grid, using one eigendecomposition.
DeltaEstimate estimate_delta(const Eigen::Ref<const Matrix>& X,
                             const Eigen::Ref<const Vector>& y,
                             const std::vector<double>& grid = default_delta_grid(),
                             Warnings* warnings = nullptr);

// Spectral data for the mixed-model solves: X X^T = U diag(e) U^T with
// eigenvalues clipped at zero.
struct LmmSpec {
  double delta = 1.0;
  Vector eigvals;
  Matrix eigvecs;
};

LmmSpec make_lmm_spec(const Eigen::Ref<const Matrix>& X, double delta);

// (delta I + X X^T)^(-1/2)
Matrix whitener(const LmmSpec& spec);

// X rotated into the whitened basis; apply the same whitener to y for a
// GLS-consistent multivariate fit.
Matrix rotate(const Eigen::Ref<const Matrix>& X, const LmmSpec& spec);
Vector rotate_vector(const Eigen::Ref<const Vector>& y, const LmmSpec& spec);

enum class ModelKind { lasso, lmm };

inline const char* model_kind_name(ModelKind m) {
  return m == ModelKind::lasso ? "Lasso" : "LMM";
}

struct RegressionResult {
  ModelKind model = ModelKind::lasso;
  std::vector<std::string> feature_names;
  Vector coefficients;
  Vector std_errors;   // lmm only
  Vector p_values;     // lmm only
  Vector adjusted_p;   // lmm only
  double best_lambda = missing_value();  // lasso: tuned per-sample penalty
  double delta = missing_value();        // lmm
  std::vector<int> selected;             // indices into feature_names

  struct Normalization {
    Vector x_mean, x_sd;
    double y_mean = 0.0, y_sd = 1.0;
    bool y_standardized = false;
  } norm;

  struct CvInfo {
    int folds = 0;
    std::vector<double> grid;
    std::vector<double> scores;
  } cv;

  std::uint64_t seed = 0;
};

// Per-feature closed-form GLS solve in the eigenbasis of X X^T, Wald
// p-values, and step-up multiple-testing correction. Condition columns are
// regressed out of the whitened x and y first.
RegressionResult lmm_fit(const DesignMatrices& dm, const LmmSpec& spec,
                         double alpha = 0.05);

struct LassoOptions {
  double lambda = 1.0;      // penalty in objective units
  double tol = 1e-6;        // max coefficient change per sweep
  int max_sweeps = 10000;
  double kkt_tol = 1e-7;    // stationarity slack required at convergence
};

struct LassoFit {
  Vector beta;       // penalized gene coefficients
  Vector cond_coef;  // unpenalized condition coefficients
  int sweeps = 0;
  bool converged = false;
};

// Cyclic coordinate descent with soft thresholding on
//   1/2 ||y - X b - C g||^2 + lambda ||b||_1
// where condition columns C are unpenalized.
LassoFit lasso_fit(const Eigen::Ref<const Matrix>& X,
                   const Eigen::Ref<const Vector>& y, const Matrix* C,
                   const LassoOptions& opts);

struct BhResult {
  Vector adjusted;            // cumulative-min adjusted p-values
  std::vector<bool> rejected; // step-up rejections at level alpha
};

BhResult bh_correct(const Eigen::Ref<const Vector>& p, double alpha = 0.05);

// Deterministic fold labels in [0, folds); a seeded shuffle of 0..n-1
// dealt round-robin.
std::vector<int> cv_fold_assignment(int n, int folds, std::uint64_t seed);

struct TuneConfig {
  std::vector<double> grid;  // lasso: per-sample penalties; lmm: delta values
  int folds = 5;
  std::uint64_t seed = 0;
};

struct TuneOutcome {
  double best = missing_value();
  std::vector<double> grid;
  std::vector<double> scores;  // lasso: mean CV score; lmm: log-likelihood
};

// Lasso: seeded 5-fold cross-validation over the penalty grid; fold scores
// are dof-adjusted validation R^2 for a continuous trait and accuracy at
// the 0.5 threshold for a binary one. Standardization is fit on each
// training fold only. Ties keep the smaller penalty.
// LMM: the variance ratio is searched on the grid by profile likelihood;
// per-feature association fits define no joint predictor to cross-validate.
TuneOutcome tune_hyperparameters(ModelKind kind, const DesignMatrices& dm,
                                 const TuneConfig& cfg);

struct AnalysisOptions {
  std::uint64_t seed = 0;
  int folds = 5;
  std::vector<double> lambda_grid = default_lambda_grid();
  std::vector<double> delta_grid = default_delta_grid();
  int gap_t = 10;
  double alpha = 0.05;
  bool use_rotation = false;  // batch path: rotated Lasso instead of LMM
  bool rotate_y = true;       // whiten y together with X
};

// Builds the conditional design: the condition model is fit on the common
// regressors in the condition dataset, its predictions for the trait
// dataset become C, and the common regressor columns leave X.
DesignMatrices two_step_regress(const LinkedDataset& trait_ds,
                                const LinkedDataset& cond_ds,
                                const std::set<std::string>& known_condition_genes,
                                const AnalysisOptions& opts);

struct AnalysisInput {
  LinkedDataset trait_ds;
  std::optional<LinkedDataset> cond_ds;
  std::set<std::string> known_condition_genes;
};

// Full analysis: condition handling, standardization, batch-effect check,
// model choice, tuning, final fit, interpretation.
RegressionResult run_gta_analysis(const GTAProblem& problem,
                                  const AnalysisInput& input,
                                  const AnalysisOptions& opts);

struct TraitCvReport {
  double accuracy = 0.0;
  double f1 = 0.0;
  struct Fold {
    double lambda;
    Vector beta;
    double y_mean, y_sd;
    double accuracy;
  };
  std::vector<Fold> folds;
};

// Nested cross-validated trait prediction for a binary trait: the penalty
// is tuned inside each training fold, never on validation data.
TraitCvReport predict_trait_cv(const LinkedDataset& ds,
                               const AnalysisOptions& opts);

}  // namespace gta::stats
