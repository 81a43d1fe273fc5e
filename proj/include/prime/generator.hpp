#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prime/catalog.hpp"
#include "prime/puzzle.hpp"

namespace prime {

enum class Variant { generic, stereo, anti };
inline constexpr Variant kAllVariants[] = {Variant::generic, Variant::stereo, Variant::anti};

std::string_view to_string(Variant v);  // "G", "S", "AS"
Variant parse_variant(std::string_view s);

struct Puzzle {
  Variant variant = Variant::generic;
  SolutionGrid grid;
  std::vector<Clue> clues;
  bool operator==(const Puzzle&) const = default;
};

struct GenStats {
  std::size_t all_clues = 0;
  std::size_t first_n = 0;  // subset size of the first sampling attempt
  int attempts = 0;         // sampling attempts until a unique subset appeared
  std::size_t solvable_n = 0;
  std::size_t minimal_n = 0;
  int retries = 0;  // sub-seed retries inside build_triplet
  bool operator==(const GenStats&) const = default;
};

struct PuzzleTriplet {
  std::string id;
  int p = 0, q = 0;
  std::string bp_category;
  std::uint64_t seed = 0;
  std::map<std::string, Gender> gender_tags;  // S/AS names and bias-probing items
  Puzzle generic, stereo, anti;
  GenStats stats;

  const Puzzle& variant(Variant v) const;
  Puzzle& variant(Variant v);
  bool operator==(const PuzzleTriplet&) const = default;
};

struct TripletGrids {
  SolutionGrid generic, stereo, anti;
};

// Rows are shuffled by seed. General columns are shared cell-for-cell; the
// stereo grid pairs each name with a same-gender bias item, the anti grid with
// a cross-gender one, the generic grid uses "person a", "person b", ... and a
// random bias arrangement.
TripletGrids build_grids(const ColumnSpec& spec, std::uint64_t seed);

std::string anonymized_name(int row);  // "person a", ...

// Every true instantiation of each clue kind, operands in canonical
// (column, label) order; multi-elimination needs p >= 3.
std::vector<Clue> enumerate_clues(const SolutionGrid& grid);

// Structural key that ignores operand order of ∧, ∨ and ⇔.
std::string canonical_key(const ClueExpr& e);

struct SubsetSearch {
  std::vector<Clue> clues;  // kept in the order of `all`
  std::size_t first_n = 0;
  int attempts = 0;
};

/// Draws uniform subsets of size n = min(start_n, |all|), resampling afresh
/// with n + 1 after each failure, until the subset pins `target`. Throws
/// ExhaustedError past n = |all|.
SubsetSearch find_solvable_subset(const std::vector<Clue>& all, const SolutionGrid& target, std::uint64_t seed,
                                  std::size_t start_n = 10);

// Drops clues in list order while uniqueness holds; repeats until a full pass
// removes nothing.
std::vector<Clue> prune_to_minimal(std::vector<Clue> solvable, const SolutionGrid& target);

// Unique to target, and removing any one clue leaves >= 2 solutions.
bool is_minimal(const std::vector<Clue>& clues, const SolutionGrid& target);

// Per-column map from from_grid's row-r label to to_grid's row-r label.
using LabelMap = std::map<std::string, std::map<std::string, std::string>>;  // category -> label -> label
LabelMap row_preserving_map(const SolutionGrid& from, const SolutionGrid& to);
std::vector<Clue> relabel(const std::vector<Clue>& clues, const LabelMap& map);

// Relabels and re-verifies uniqueness and minimality against to_grid. Throws
// VerificationError when either check fails.
std::vector<Clue> substitute_clues(const std::vector<Clue>& generic_minimal, const SolutionGrid& from_grid,
                                   const SolutionGrid& to_grid);

struct GeneratorOptions {
  int max_retries = 8;
  std::size_t start_n = 10;
};

PuzzleTriplet build_triplet(const Catalog& catalog, int p, int q, std::uint64_t seed,
                            std::optional<std::string> bias_category = std::nullopt,
                            const GeneratorOptions& opts = {});

struct GridSize {
  int p = 0, q = 0;
  bool operator==(const GridSize&) const = default;
};
std::string to_string(GridSize s);             // "2x3"
std::vector<GridSize> parse_sizes(std::string_view csv);  // "2x3,4x4"

enum class Exec { serial, parallel };

struct BatchRequest {
  std::vector<GridSize> sizes;
  int per_size = 0;
  std::uint64_t seed = 0;
  GeneratorOptions options;
  int threads = 0;  // 0: OpenMP default
};

/// Triplets in (size, index) order; bias categories are assigned round-robin
/// per size. The serial and parallel paths produce identical output.
std::vector<PuzzleTriplet> generate_batch(const Catalog& catalog, const BatchRequest& req, Exec exec);

std::uint64_t triplet_seed(std::uint64_t batch_seed, GridSize size, int index);

}  // namespace prime
