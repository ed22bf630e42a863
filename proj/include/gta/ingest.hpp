#pragma once

#include <istream>
#include <map>

#include "gta/types.hpp"

namespace gta::ingest {

struct SeriesMatrix {
  SeriesMetadata metadata;
  SampleCharacteristics characteristics;
  ExpressionMatrix expression;
};

// GEO series-matrix text file: `!Key\tv1\tv2...` metadata lines, repeated
// `!Sample_characteristics_ch1` lines as characteristics rows, and the
// expression table between the table begin/end markers.
SeriesMatrix parse_series_matrix(std::istream& in, Warnings* warnings = nullptr);

// Unique non-missing raw strings per characteristics row, first-occurrence
// order preserved.
std::map<size_t, std::vector<std::string>> characteristics_summary(
    const SampleCharacteristics& chars);

// Platform annotation table from a SOFT family file. When several platform
// tables are present the first is parsed and a warning recorded.
AnnotationTable parse_soft_annotation(std::istream& in,
                                      Warnings* warnings = nullptr);

struct XenaTables {
  AnnotationTable clinical;    // samples as rows, attributes as columns
  ExpressionMatrix expression; // genes as rows, samples as columns
};

XenaTables parse_xena_tables(std::istream& clinical, std::istream& expression,
                             Warnings* warnings = nullptr);

}  // namespace gta::ingest
