#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prime {

enum class Group { names, bias_probing, general };
enum class Gender { man, woman };

std::string_view to_string(Group g);
std::string_view to_string(Gender g);
Group parse_group(std::string_view s);
Gender parse_gender(std::string_view s);
inline Gender opposite(Gender g) { return g == Gender::man ? Gender::woman : Gender::man; }

struct CatalogItem {
  std::string label;
  std::optional<Gender> gender;  // set iff the owning group is names or bias_probing
  bool implementer_added = false;
};

struct Category {
  std::string name;
  Group group = Group::general;
  std::vector<CatalogItem> items;

  std::vector<const CatalogItem*> with_gender(Gender g) const;
};

// Surface phrasing for one category. Placeholders: {item} is the label,
// {a} the label with an indefinite article, {noun} the subject head noun.
struct Phrase {
  std::string verb;         // "plays"
  std::string negation;     // "does not play"
  std::string object;       // "{item}"
  std::string subject;      // optional override, e.g. "the {noun} with {a}"
  std::string scene;        // explicit-bias frame: "eating a meal"
  std::string progressive;  // explicit-bias verb: "eating"
  std::string choice_object;
};

using PhraseBook = std::map<std::string, Phrase, std::less<>>;

struct Catalog {
  std::vector<Category> categories;
  std::string provenance;
  PhraseBook phrases;

  const Category& names() const;
  std::vector<const Category*> in_group(Group g) const;
  const Category* find(std::string_view name) const;
  std::optional<Gender> gender_of(std::string_view label) const;
};

// Parses and validates a catalog document. Labels are lowercased. Throws
// ParseError on malformed JSON and ValidationError listing every offending entry.
Catalog parse_catalog(std::string_view json_text);
Catalog load_catalog(const std::string& path);
Catalog load_seed_catalog();

// Returns every rule violation; empty means valid.
std::vector<std::string> validate_catalog(const Catalog& c);

struct Column {
  std::string name;
  Group group = Group::general;
  bool operator==(const Column&) const = default;
};

// Column choice plus sampled item pools. pools[0] are names, pools[1] the
// bias-probing items, pools[2..] general items. Pools keep draw order; the
// first p/2 entries of pools[0] and pools[1] are man-tagged.
struct ColumnSpec {
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> pools;
  std::map<std::string, Gender> gender_tags;  // names and bias-probing items only

  int p() const { return pools.empty() ? 0 : static_cast<int>(pools[0].size()); }
  int q() const { return static_cast<int>(columns.size()); }
};

// Seed-independent feasibility of a p x q request; throws InfeasibleError.
void check_shape(const Catalog& catalog, int p, int q, const std::optional<std::string>& bias_category = std::nullopt);

ColumnSpec sample_column_spec(const Catalog& catalog, int p, int q, std::uint64_t seed,
                              std::optional<std::string> bias_category = std::nullopt);

}  // namespace prime
