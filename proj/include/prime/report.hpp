#pragma once

#include <map>
#include <string>
#include <vector>

#include "prime/harness.hpp"
#include "prime/stats.hpp"

namespace prime {

// Δ colour legend: red = stereotypical (Δ < 0), green = anti-stereotypical,
// yellow = no bias (|Δ| rounds to 0.00).
inline constexpr double kZeroBiasBand = 0.005;
std::string_view delta_color(double delta);

struct DeltaCell {
  Scope scope = Scope::all;
  std::size_t n_g = 0;  // G records in the group
  double mean_g = 0, mean_s = 0, mean_as = 0;
  BiasDifference diff;  // over S/AS pairs
};

struct DeltaRow {
  GridSize size;
  std::string endpoint;
  PromptMode mode = PromptMode::base;
  std::vector<DeltaCell> cells;  // one per requested scope
};

struct DeltaReport {
  std::vector<DeltaRow> rows;            // sorted by size, endpoint, mode
  std::vector<std::string> unpaired;     // "endpoint|mode|triplet": S or AS missing
};

/// Records are grouped by (size, endpoint, mode) and paired by triplet id.
/// Request failures carry no score and are ignored; parse failures count at
/// their replacement cost. Output is independent of record order.
DeltaReport aggregate_deltas(const std::vector<RunRecord>& records,
                             const std::vector<Scope>& scopes = {Scope::all, Scope::bias_probing, Scope::general});
std::string deltas_csv(const DeltaReport& r);
std::string deltas_markdown(const DeltaReport& r);

struct CategoryDelta {
  std::string category, endpoint;
  PromptMode mode = PromptMode::base;
  BiasDifference diff;  // ED_BP, pooled over sizes
  bool below_min = false;
};

// Sorted by Δ ascending, then category.
std::vector<CategoryDelta> per_category_deltas(const std::vector<RunRecord>& records, std::size_t min_pairs = 24);
std::string categories_csv(const std::vector<CategoryDelta>& rows);

struct ScatterPoint {
  std::string endpoint, puzzle_id;
  PromptMode mode = PromptMode::base;
  Variant variant = Variant::stereo;
  GridSize size;
  double correctness = 0, bias = 0;
};

struct ScatterMean {
  std::string endpoint;
  PromptMode mode = PromptMode::base;
  std::string variant;  // "S", "AS" or the pooled "S+AS"
  std::size_t n = 0;
  double correctness = 0, bias = 0;
};

struct ScatterReport {
  std::vector<ScatterPoint> points;
  std::vector<ScatterMean> means;
  bool empty() const { return points.empty(); }
};

// S/AS records with p >= min_p, a parsed response and ED_BP > 0.
ScatterReport error_scatter(const std::vector<RunRecord>& records, int min_p = 4);
std::string scatter_csv(const ScatterReport& r);
std::string scatter_means_csv(const ScatterReport& r);

struct CompareRow {
  GridSize size;
  std::size_t triplets = 0;
  std::size_t a_more_biased = 0, b_more_biased = 0, equal_bias = 0;
  std::size_t a_more_error = 0, b_more_error = 0, equal_error = 0;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  std::vector<std::string> only_a, only_b;  // triplet ids covered by one run
};

/// Per triplet, bias is |ED_BP(S) - ED_BP(AS)| and error is ED_all summed
/// over the variants present. Each run must hold one endpoint and mode.
CompareReport compare_runs(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b);
std::string compare_csv(const CompareReport& r);

struct AccuracyRow {
  GridSize size;
  std::string endpoint;
  PromptMode mode = PromptMode::base;
  Variant variant = Variant::generic;
  std::size_t n = 0, accurate = 0, exact = 0;
};

std::vector<AccuracyRow> accuracy_table(const std::vector<RunRecord>& records);
std::string accuracy_csv(const std::vector<AccuracyRow>& rows);

// Pipe table with padded columns; the first column is left-aligned, the rest right-aligned.
std::string markdown_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

}  // namespace prime
