#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "prime/generator.hpp"

namespace prime {

using ojson = nlohmann::ordered_json;

ojson grid_to_json(const SolutionGrid& g);  // array of rows, each an array of labels
ojson triplet_to_json(const PuzzleTriplet& t);
std::string puzzle_set_to_text(const std::vector<PuzzleTriplet>& ts);  // JSON array, 1 space indent

/// Parses a puzzle set and checks each puzzle: Latin grid, parseable logic,
/// clue shape matching its kind, every clue true on its grid, identical clue
/// counts within a triplet. Does not re-run the solver.
std::vector<PuzzleTriplet> parse_puzzle_set(const std::string& text);
std::vector<PuzzleTriplet> load_puzzle_set(const std::string& path);
void save_puzzle_set(const std::vector<PuzzleTriplet>& ts, const std::string& path);

std::string puzzle_id(const PuzzleTriplet& t, Variant v);  // "<triplet id>-<variant>"

std::string read_file(const std::string& path);
// Writes via a sibling temp file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace prime
