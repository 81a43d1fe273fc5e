#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace prime {

// Text baked into the binary at build time, keyed by repo-relative path
// ("data/seed_catalog.json", "resources/prompts/solve_puzzle.txt", ...).
// Throws prime::Error for unknown keys.
std::string_view resource(std::string_view key);
std::vector<std::string> resource_keys();

// Splits a resource into lines, dropping '#' comment lines and blank lines.
std::vector<std::string> resource_lines(std::string_view key);

}  // namespace prime
