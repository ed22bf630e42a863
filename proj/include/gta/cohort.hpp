#pragma once

#include "gta/types.hpp"

namespace gta::cohort {

// Inner join of clinical and gene data on sample IDs; the result is ordered
// by sample ID. The gene matrix comes out samples x genes.
LinkedDataset link(const ClinicalTable& clinical, const ExpressionMatrix& genes,
                   const std::string& trait_name);

// Drops samples with a missing trait or more than `gene_missing_threshold`
// of gene features missing, imputes the rest (gene/continuous columns by
// column mean, binary columns by mode), and removes columns that stay
// entirely missing. The result contains no missing values.
LinkedDataset handle_missing(const LinkedDataset& ds,
                             double gene_missing_threshold = 0.20);

bool judge_usability(const CohortRecord& rec);

// Largest sample count; ties keep the lexicographically smallest id.
CohortRecord select_cohort(const std::vector<CohortRecord>& usable);

// Pair with the largest sample-count product; ties keep the
// lexicographically smallest (trait id, condition id).
std::pair<CohortRecord, CohortRecord> select_pair(
    const std::vector<CohortRecord>& trait_cohorts,
    const std::vector<CohortRecord>& condition_cohorts);

}  // namespace gta::cohort
