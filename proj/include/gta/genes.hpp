#pragma once

#include <istream>
#include <unordered_map>

#include "gta/types.hpp"

namespace gta::genes {

// Uppercased alias -> official symbol. Official symbols self-map and win
// over alias entries; alias collisions keep the earlier file row.
struct SynonymDict {
  std::unordered_map<std::string, std::string> alias_to_official;

  bool empty() const { return alias_to_official.empty(); }

  std::optional<std::string> lookup(const std::string& symbol) const {
    auto it = alias_to_official.find(text::to_upper(symbol));
    if (it == alias_to_official.end()) return std::nullopt;
    return it->second;
  }
};

// Tab-separated: official symbol, pipe-separated synonyms.
SynonymDict load_synonym_dict(std::istream& in, Warnings* warnings = nullptr);

struct ProbeGeneMap {
  std::vector<std::pair<std::string, std::string>> pairs;  // probe, raw field
};

ProbeGeneMap probe_map_from_annotation(const AnnotationTable& table,
                                       const std::string& id_column,
                                       const std::string& symbol_column);

// Splits a raw annotation field on ";", "|", "//" and ",".
std::vector<std::string> split_symbols(std::string_view raw);

// Distributes each probe's values to every symbol in its raw field, then
// averages all contributions per symbol (per-cell, missing skipped).
// Output rows are sorted by symbol.
ExpressionMatrix map_probes(const ExpressionMatrix& expr,
                            const ProbeGeneMap& map);

// Replaces row symbols with official symbols; unmapped rows are removed and
// duplicates averaged per cell. Output rows are sorted by symbol.
ExpressionMatrix normalize_symbols(const ExpressionMatrix& expr,
                                   const SynonymDict& dict);

}  // namespace gta::genes
