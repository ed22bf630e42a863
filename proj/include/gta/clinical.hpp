#pragma once

#include "gta/types.hpp"

namespace gta::clinical {

struct MatchClause {
  std::string pattern;
  bool case_insensitive = true;
  double value = 0.0;
};

struct NumericParse {
  std::vector<std::string> suffixes;  // stripped from the end before parsing
};

// Declarative encoding of one clinical variable from raw characteristic
// strings. Clause order is significant: the first match wins, then the
// numeric parse, then missing.
struct ConversionRule {
  VarKind target_kind = VarKind::binary;
  bool prefix_strip = true;  // drop text up to and including the first colon
  std::vector<MatchClause> clauses;
  std::optional<NumericParse> numeric;
};

void validate_rule(const ConversionRule& rule);

// Missing (empty) input and unmatched/unparseable values map to NaN.
double apply_rule(const ConversionRule& rule, const std::string& raw);

ClinicalColumn extract_feature(const SampleCharacteristics& chars, size_t row,
                               const ConversionRule& rule,
                               const std::string& name);

// Candidate with the lowest fraction of cells that are missing or
// unparseable for the variable kind; ties keep candidate order.
std::string choose_tcga_column(const AnnotationTable& table,
                               const std::vector<std::string>& candidates,
                               VarKind kind);

ClinicalColumn extract_tcga_feature(const AnnotationTable& table,
                                    const std::string& id_column,
                                    const std::string& value_column,
                                    const ConversionRule& rule,
                                    const std::string& name);

ClinicalTable assemble_clinical(const std::vector<std::string>& sample_ids,
                                const std::vector<ClinicalColumn>& columns);

}  // namespace gta::clinical
