#include "prime/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "prime/error.hpp"
#include "prime/resources.hpp"
#include "prime/rng.hpp"

namespace prime {

using nlohmann::json;

std::string_view to_string(Group g) {
  switch (g) {
    case Group::names: return "names";
    case Group::bias_probing: return "bias_probing";
    case Group::general: return "general";
  }
  return "?";
}

std::string_view to_string(Gender g) { return g == Gender::man ? "man" : "woman"; }

Group parse_group(std::string_view s) {
  if (s == "names") return Group::names;
  if (s == "bias_probing") return Group::bias_probing;
  if (s == "general") return Group::general;
  throw ParseError("unknown category group '" + std::string(s) + "'");
}

Gender parse_gender(std::string_view s) {
  if (s == "man") return Gender::man;
  if (s == "woman") return Gender::woman;
  throw ParseError("unknown gender tag '" + std::string(s) + "'");
}

std::vector<const CatalogItem*> Category::with_gender(Gender g) const {
  std::vector<const CatalogItem*> out;
  for (const auto& it : items)
    if (it.gender == g) out.push_back(&it);
  return out;
}

const Category& Catalog::names() const {
  for (const auto& c : categories)
    if (c.group == Group::names) return c;
  throw ValidationError("catalog has no names category");
}

std::vector<const Category*> Catalog::in_group(Group g) const {
  std::vector<const Category*> out;
  for (const auto& c : categories)
    if (c.group == g) out.push_back(&c);
  return out;
}

const Category* Catalog::find(std::string_view name) const {
  for (const auto& c : categories)
    if (c.name == name) return &c;
  return nullptr;
}

std::optional<Gender> Catalog::gender_of(std::string_view label) const {
  for (const auto& c : categories)
    for (const auto& it : c.items)
      if (it.label == label) return it.gender;
  return std::nullopt;
}

namespace {

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

// Characters reserved by the logic notation.
bool has_reserved(std::string_view s) {
  return s.find_first_of("()=") != std::string_view::npos || s.find("\xc2\xac") != std::string_view::npos ||
         s.find("\xe2\x88\xa7") != std::string_view::npos || s.find("\xe2\x88\xa8") != std::string_view::npos ||
         s.find("\xe2\x87\x94") != std::string_view::npos;
}

bool padded(std::string_view s) {
  return !s.empty() && (std::isspace(static_cast<unsigned char>(s.front())) ||
                        std::isspace(static_cast<unsigned char>(s.back())));
}

std::string str_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

std::vector<std::string> validate_catalog(const Catalog& c) {
  std::vector<std::string> issues;
  int n_names = 0, n_bp = 0, n_general = 0;
  std::set<std::string> seen_categories;
  std::map<std::string, std::string> owner;  // label -> first category holding it

  for (const auto& cat : c.categories) {
    const std::string where = "category \"" + cat.name + "\"";
    if (cat.name.empty()) issues.push_back("category with empty name");
    if (has_reserved(cat.name) || padded(cat.name)) issues.push_back(where + ": name uses reserved characters");
    if (!seen_categories.insert(cat.name).second) issues.push_back(where + ": duplicate category name");
    switch (cat.group) {
      case Group::names: ++n_names; break;
      case Group::bias_probing: ++n_bp; break;
      case Group::general: ++n_general; break;
    }
    const bool gendered = cat.group != Group::general;
    std::set<std::string> local;
    int men = 0, women = 0;
    for (const auto& it : cat.items) {
      if (it.label.empty()) {
        issues.push_back(where + ": empty item label");
        continue;
      }
      if (has_reserved(it.label) || padded(it.label))
        issues.push_back(where + ": label \"" + it.label + "\" uses reserved characters");
      if (!local.insert(it.label).second) issues.push_back(where + ": duplicate label \"" + it.label + "\"");
      if (gendered && !it.gender) issues.push_back(where + ": label \"" + it.label + "\" lacks a gender tag");
      if (!gendered && it.gender) issues.push_back(where + ": label \"" + it.label + "\" must not carry a gender tag");
      if (it.gender == Gender::man) ++men;
      if (it.gender == Gender::woman) ++women;
      auto [pos, fresh] = owner.emplace(it.label, cat.name);
      if (!fresh && pos->second != cat.name)
        issues.push_back("label \"" + it.label + "\" appears in both \"" + pos->second + "\" and \"" + cat.name + "\"");
    }
    if (gendered && men == 0) issues.push_back(where + ": empty man subset");
    if (gendered && women == 0) issues.push_back(where + ": empty woman subset");
  }
  if (n_names != 1) issues.push_back("expected exactly one names category, found " + std::to_string(n_names));
  if (n_bp < 1) issues.push_back("expected at least one bias_probing category");
  if (n_general < 1) issues.push_back("expected at least one general category");
  return issues;
}

Catalog parse_catalog(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("catalog: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("categories") || !doc["categories"].is_array())
    throw ParseError("catalog: top-level object with a 'categories' array expected");

  Catalog cat;
  cat.provenance = str_field(doc, "provenance");
  for (const auto& jc : doc["categories"]) {
    if (!jc.is_object()) throw ParseError("catalog: category entries must be objects");
    Category c;
    c.name = str_field(jc, "name");
    c.group = parse_group(str_field(jc, "group"));
    if (!jc.contains("items") || !jc["items"].is_array())
      throw ParseError("catalog: category \"" + c.name + "\" has no items array");
    for (const auto& ji : jc["items"]) {
      CatalogItem it;
      if (ji.is_string()) {
        it.label = lower(ji.get<std::string>());
      } else if (ji.is_object()) {
        it.label = lower(str_field(ji, "label"));
        auto g = str_field(ji, "gender");
        if (!g.empty()) it.gender = parse_gender(g);
        it.implementer_added = ji.value("implementer_added", false);
      } else {
        throw ParseError("catalog: item in \"" + c.name + "\" must be a string or object");
      }
      c.items.push_back(std::move(it));
    }
    cat.categories.push_back(std::move(c));
  }
  if (auto it = doc.find("phrases"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("catalog: 'phrases' must be an object");
    for (const auto& [name, jp] : it->items()) {
      Phrase ph;
      ph.verb = str_field(jp, "verb");
      ph.negation = str_field(jp, "negation");
      ph.object = str_field(jp, "object");
      ph.subject = str_field(jp, "subject");
      ph.scene = str_field(jp, "scene");
      ph.progressive = str_field(jp, "progressive");
      ph.choice_object = str_field(jp, "choice_object");
      cat.phrases.emplace(name, std::move(ph));
    }
  }
  auto issues = validate_catalog(cat);
  if (!issues.empty()) throw ValidationError("catalog failed validation:", std::move(issues));
  return cat;
}

Catalog load_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open catalog file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_catalog(ss.str());
}

Catalog load_seed_catalog() { return parse_catalog(resource("data/seed_catalog.json")); }

void check_shape(const Catalog& catalog, int p, int q, const std::optional<std::string>& bias_category) {
  if (p < 2 || p % 2 != 0) throw InfeasibleError("p must be even and at least 2, got " + std::to_string(p));
  if (q < 3) throw InfeasibleError("q must be at least 3, got " + std::to_string(q));
  const auto generals = catalog.in_group(Group::general).size();
  if (generals < static_cast<std::size_t>(q - 2))
    throw InfeasibleError("catalog has " + std::to_string(generals) + " general categories, need " +
                          std::to_string(q - 2));
  if (bias_category) {
    const Category* bp = catalog.find(*bias_category);
    if (!bp || bp->group != Group::bias_probing)
      throw InfeasibleError("'" + *bias_category + "' is not a bias_probing category");
  }
}

ColumnSpec sample_column_spec(const Catalog& catalog, int p, int q, std::uint64_t seed,
                              std::optional<std::string> bias_category) {
  check_shape(catalog, p, q, bias_category);
  const std::size_t half = static_cast<std::size_t>(p / 2);
  auto generals = catalog.in_group(Group::general);
  auto bps = catalog.in_group(Group::bias_probing);

  Rng rng(seed);
  const Category* bp = nullptr;
  if (bias_category) {
    bp = catalog.find(*bias_category);
  } else {
    bp = bps[rng.uniform(bps.size())];
  }

  ColumnSpec spec;
  auto take_gendered = [&](const Category& c) {
    std::vector<std::string> pool;
    for (Gender g : {Gender::man, Gender::woman}) {
      auto subset = c.with_gender(g);
      if (subset.size() < half)
        throw InfeasibleError("category \"" + c.name + "\" has " + std::to_string(subset.size()) + " " +
                              std::string(to_string(g)) + " items, need " + std::to_string(half));
      for (auto i : rng.sample_indices(subset.size(), half)) {
        pool.push_back(subset[i]->label);
        spec.gender_tags[subset[i]->label] = g;
      }
    }
    return pool;
  };

  const Category& names = catalog.names();
  spec.columns.push_back({names.name, Group::names});
  spec.pools.push_back(take_gendered(names));
  spec.columns.push_back({bp->name, Group::bias_probing});
  spec.pools.push_back(take_gendered(*bp));
  for (auto gi : rng.sample_indices(generals.size(), static_cast<std::size_t>(q - 2))) {
    const Category& g = *generals[gi];
    if (g.items.size() < static_cast<std::size_t>(p))
      throw InfeasibleError("category \"" + g.name + "\" has " + std::to_string(g.items.size()) +
                            " items, need " + std::to_string(p));
    std::vector<std::string> pool;
    for (auto i : rng.sample_indices(g.items.size(), static_cast<std::size_t>(p))) pool.push_back(g.items[i].label);
    spec.columns.push_back({g.name, Group::general});
    spec.pools.push_back(std::move(pool));
  }
  return spec;
}

}  // namespace prime
