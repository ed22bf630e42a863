#pragma once

#include <filesystem>

#include "gta/types.hpp"

namespace gta::synth {

struct SynthConfig {
  int n = 100;              // samples
  int p = 200;              // gene features
  int k = 5;                // planted support size
  double beta_scale = 1.0;  // planted effect magnitude
  double sigma_eps = 0.1;   // noise sd
  double sigma_u = 0.0;     // per-batch random effect sd
  int n_batches = 1;
  double batch_shift = 0.0; // mean offset between consecutive batches
  std::uint64_t seed = 0;
  int n_common = -1;        // condition pairs: shared regressors (-1: use k)
  double alpha = 1.0;       // condition pairs: condition effect on the trait
};

void validate_config(const SynthConfig& cfg);

struct LinearData {
  Matrix X;
  Vector y;
  std::vector<int> support;  // sorted indices of nonzero coefficients
  Vector beta;
};

// X iid standard normal, k planted coefficients of magnitude beta_scale,
// additive Gaussian noise. Draw order is fixed: X row by row, then the
// support, then the noise.
LinearData gen_linear(const SynthConfig& cfg);

struct BatchedData {
  Matrix X;
  Vector y;
  std::vector<int> batch_labels;  // contiguous equal blocks
  std::vector<int> support;
  Vector beta;
};

// Adds batch structure on top of the linear model: batch b shifts every
// feature by b * batch_shift and contributes a shared N(0, sigma_u^2)
// offset to y.
BatchedData gen_batched(const SynthConfig& cfg);

struct ConditionPair {
  LinkedDataset trait_ds;
  LinkedDataset cond_ds;
  std::vector<std::string> common_regressors;
  std::vector<std::string> trait_support;
  Vector true_condition;  // condition values in the trait dataset
};

// Two datasets sharing a designated gene subset; the condition is a linear
// function of the shared genes, and the trait depends on its own support
// plus alpha times the condition.
ConditionPair gen_condition_pair(const SynthConfig& cfg);

// Per-feature x^T V^-1 y / x^T V^-1 x via a dense factorization.
Vector gls_oracle(const Eigen::Ref<const Matrix>& X,
                  const Eigen::Ref<const Vector>& y,
                  const Eigen::Ref<const Matrix>& V);

enum class FixtureStyle { series_matrix, soft, xena };

// Emits ingest-conformant files for a dense linked dataset, together with
// the conversion-rule file that re-extracts its clinical columns.
// series_matrix: gene symbols as row ids. soft: probe-level matrix plus a
// platform annotation table. xena: clinical + expression TSV pair.
std::vector<std::filesystem::path> write_fixture(
    const LinkedDataset& ds, FixtureStyle style,
    const std::filesystem::path& dir);

// Builds a dense LinkedDataset around generated gene data.
LinkedDataset make_linked(const std::string& trait_name, VarKind trait_kind,
                          const Vector& trait, const Matrix& genes,
                          const std::string& sample_prefix,
                          const std::string& gene_prefix,
                          const std::optional<Vector>& age = std::nullopt,
                          const std::optional<Vector>& gender = std::nullopt);

}  // namespace gta::synth
