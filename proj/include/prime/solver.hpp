#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "prime/puzzle.hpp"

namespace prime {

struct SolveStats {
  std::uint64_t nodes = 0;        // partial assignments extended
  std::uint64_t clue_checks = 0;  // clue evaluations at completion points
  bool operator==(const SolveStats&) const = default;
};

struct CountResult {
  int count = 0;  // exact when < limit, otherwise == limit
  std::optional<SolutionGrid> first;
  std::optional<SolutionGrid> second;
  SolveStats stats;
};

/// Backtracking count of assignments satisfying every clue, stopping at
/// `limit`. Variables are (column, item) pairs taken column by column in
/// domain order, items in pool order; each clue is checked as soon as its
/// last variable is bound. Throws prime::Error when a clue names an atom
/// outside the domain.
CountResult count_solutions(const ColumnSpec& domain, const std::vector<Clue>& clues, int limit);

struct SolveOutcome {
  enum class Status { unique, not_unique, unsat };
  Status status = Status::unsat;
  std::optional<SolutionGrid> grid;                               // unique
  std::optional<std::pair<SolutionGrid, SolutionGrid>> witness;  // not_unique
  SolveStats stats;
};

SolveOutcome solve_unique(const ColumnSpec& domain, const std::vector<Clue>& clues);

// True iff the clues pin exactly `target`.
bool uniquely_solves(const std::vector<Clue>& clues, const SolutionGrid& target);

}  // namespace prime
