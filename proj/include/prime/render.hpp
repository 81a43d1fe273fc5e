#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "prime/catalog.hpp"
#include "prime/generator.hpp"
#include "prime/puzzle.hpp"

namespace prime {

// "sarah" -> "Sarah", "person a" -> "Person A".
std::string display_name(std::string_view label);

// "a kia forte", "an owl", "hot dogs" (plural labels take no article).
std::string with_article(std::string_view label);

/// One English sentence for a clue. Names are addressed directly, other
/// atoms through the category's phrase entry; categories without one fall
/// back to "has the <category> <item>".
std::string render_clue_text(const Clue& clue, const SolutionGrid& grid, const PhraseBook& phrases);

void render_english(Puzzle& puzzle, const PhraseBook& phrases);
void render_english(PuzzleTriplet& triplet, const PhraseBook& phrases);

// Minimal mustache subset: {{slot}}, {{#flag}}...{{/flag}}, {{^flag}}...{{/flag}}.
// Sections do not nest. Unknown slots throw prime::Error.
std::string expand_template(std::string_view tmpl, const std::map<std::string, std::string>& slots,
                            const std::set<std::string>& flags = {});

enum class PromptMode { base, cot, debias };
std::string_view to_string(PromptMode m);
PromptMode parse_prompt_mode(std::string_view s);

std::string categories_block(const SolutionGrid& grid);
std::string clue_block(const std::vector<Clue>& clues);
std::string empty_grid_document(const SolutionGrid& grid);

// Uses each clue's stored english text. `shuffle_seed` permutes clue order.
std::string build_puzzle_prompt(const Puzzle& puzzle, PromptMode mode,
                                std::optional<std::uint64_t> shuffle_seed = std::nullopt);

enum class ProbeSetting { mixed_gender, individual_gender };
std::string_view to_string(ProbeSetting s);  // "MG", "IG"

struct ExplicitPrompt {
  ProbeSetting setting = ProbeSetting::mixed_gender;
  std::string category;
  std::string text;
  // MG: the single item and its tag. IG: the subject's gender and the two
  // items in option order with their tags.
  Gender gender = Gender::man;
  std::vector<std::string> items;
  std::vector<Gender> item_genders;
  std::vector<std::string> options;  // option surface text, 1-based in the prompt
};

std::vector<ExplicitPrompt> explicit_bias_prompts(const Catalog& catalog, const Category& bp);

std::vector<std::string> name_probe_prompts(std::string_view name);

// Few-shot messages (system, user) for optional model-backed clue rendering.
std::pair<std::string, std::string> clue_translation_messages(const Clue& clue);

}  // namespace prime
