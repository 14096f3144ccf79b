#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "aim/attribution.hpp"
#include "aim/comparability.hpp"
#include "aim/dataset.hpp"
#include "aim/metrics.hpp"
#include "aim/mitigation.hpp"
#include "aim/similarity.hpp"

namespace aim::io {

// Fixed 6-fractional-digit decimal used by every report format.
std::string decimal(double v);

// One JSON object per line:
// {"index":0,"s":1,"y":0,"credibility":0.738796,"bias":0.250000,"defined":true,
//  "explanations":[{"contributor":3,"contribution":0.250000,"credibility":1.000000,"similarity":0.083333}]}
// `credibility`/`bias` are null when undefined; `defined` refers to the bias.
std::string format_bias_report(const BiasReport& report);
BiasReport parse_bias_report(const std::string& text);

// Header line then one index per line.
std::string format_removal_plan(const RemovalPlan& plan);
// Delimited rows: features, label, group, then seed,target,lambda provenance.
std::string format_augmentation_plan(const AugmentationPlan& plan, const Dataset& source);

// One JSON object tagged with `stage`.
std::string format_evaluation(std::string_view stage, const EvaluationResult& r);

// "i j" per undirected edge, i < j, 0-based.
std::string format_edge_list(const ComparabilityGraph& g);
// Whitespace-separated dense rows, for debugging.
std::string format_similarity(const SimilarityMatrix& q);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace aim::io
