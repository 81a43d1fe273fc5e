#include "prime/puzzle_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "prime/error.hpp"

namespace prime {

ojson grid_to_json(const SolutionGrid& g) {
  ojson rows = ojson::array();
  for (const auto& r : g.rows) rows.push_back(r);
  return rows;
}

ojson triplet_to_json(const PuzzleTriplet& t) {
  ojson j;
  j["id"] = t.id;
  j["size"] = {{"p", t.p}, {"q", t.q}};
  j["bp_category"] = t.bp_category;
  j["seed"] = t.seed;
  ojson cols = ojson::array();
  for (const auto& c : t.generic.grid.columns) cols.push_back({{"name", c.name}, {"group", to_string(c.group)}});
  j["columns"] = cols;
  ojson names = ojson::object(), items = ojson::object();
  for (const auto& [label, g] : t.gender_tags) {
    bool is_name = t.stereo.grid.row_of(0, label) >= 0;
    (is_name ? names : items)[label] = to_string(g);
  }
  j["gender_tags"] = {{"names", names}, {"bp_items", items}};
  j["stats"] = {{"all_clues", t.stats.all_clues},   {"first_n", t.stats.first_n},
                {"attempts", t.stats.attempts},     {"solvable_n", t.stats.solvable_n},
                {"minimal_n", t.stats.minimal_n},   {"retries", t.stats.retries}};
  ojson variants = ojson::object();
  for (Variant v : kAllVariants) {
    const Puzzle& pz = t.variant(v);
    ojson clues = ojson::array();
    for (const auto& c : pz.clues)
      clues.push_back({{"kind", to_string(c.kind)}, {"logic", c.logic_text()}, {"english", c.english}});
    variants[std::string(to_string(v))] = {{"id", puzzle_id(t, v)}, {"grid", grid_to_json(pz.grid)}, {"clues", clues}};
  }
  j["variants"] = variants;
  return j;
}

std::string puzzle_set_to_text(const std::vector<PuzzleTriplet>& ts) {
  ojson arr = ojson::array();
  for (const auto& t : ts) arr.push_back(triplet_to_json(t));
  return arr.dump(1) + "\n";
}

std::string puzzle_id(const PuzzleTriplet& t, Variant v) { return t.id + "-" + std::string(to_string(v)); }

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& why) {
  throw ParseError("puzzle set: " + where + ": " + why);
}

PuzzleTriplet triplet_from_json(const ojson& j) {
  PuzzleTriplet t;
  try {
    t.id = j.at("id").get<std::string>();
    t.p = j.at("size").at("p").get<int>();
    t.q = j.at("size").at("q").get<int>();
    t.bp_category = j.at("bp_category").get<std::string>();
    t.seed = j.at("seed").get<std::uint64_t>();
    std::vector<Column> columns;
    for (const auto& c : j.at("columns"))
      columns.push_back({c.at("name").get<std::string>(), parse_group(c.at("group").get<std::string>())});
    for (const char* part : {"names", "bp_items"})
      for (const auto& [label, g] : j.at("gender_tags").at(part).items())
        t.gender_tags[label] = parse_gender(g.get<std::string>());
    if (auto s = j.find("stats"); s != j.end()) {
      t.stats.all_clues = s->value("all_clues", std::size_t{0});
      t.stats.first_n = s->value("first_n", std::size_t{0});
      t.stats.attempts = s->value("attempts", 0);
      t.stats.solvable_n = s->value("solvable_n", std::size_t{0});
      t.stats.minimal_n = s->value("minimal_n", std::size_t{0});
      t.stats.retries = s->value("retries", 0);
    }
    for (Variant v : kAllVariants) {
      const auto& jv = j.at("variants").at(std::string(to_string(v)));
      Puzzle& pz = t.variant(v);
      pz.variant = v;
      pz.grid.columns = columns;
      for (const auto& row : jv.at("grid")) pz.grid.rows.push_back(row.get<std::vector<std::string>>());
      for (const auto& jc : jv.at("clues")) {
        Clue c;
        c.kind = parse_clue_kind(jc.at("kind").get<std::string>());
        c.expr = parse_logic_text(jc.at("logic").get<std::string>());
        c.english = jc.value("english", std::string{});
        pz.clues.push_back(std::move(c));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    bad(t.id.empty() ? "triplet" : t.id, e.what());
  }

  for (Variant v : kAllVariants) {
    const Puzzle& pz = t.variant(v);
    const std::string where = puzzle_id(t, v);
    if (pz.grid.p() != t.p || pz.grid.q() != t.q) bad(where, "grid shape differs from size");
    auto issues = validate_grid(pz.grid);
    if (!issues.empty()) bad(where, issues.front());
    if (pz.clues.size() != t.generic.clues.size()) bad(where, "clue count differs within the triplet");
    for (const auto& c : pz.clues) {
      auto kind = classify_expr(c.expr, pz.grid.columns);
      if (kind != c.kind) bad(where, "clue does not match kind " + std::string(to_string(c.kind)) + ": " + c.logic_text());
      bool holds = false;
      try {
        holds = holds_on(c, pz.grid);
      } catch (const Error& e) {
        bad(where, e.what());
      }
      if (!holds) bad(where, "clue is false on the stored grid: " + c.logic_text());
    }
  }
  return t;
}

}  // namespace

std::vector<PuzzleTriplet> parse_puzzle_set(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("puzzle set: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("puzzle set: top-level array expected");
  std::vector<PuzzleTriplet> out;
  for (const auto& j : doc) out.push_back(triplet_from_json(j));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw Error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::vector<PuzzleTriplet> load_puzzle_set(const std::string& path) { return parse_puzzle_set(read_file(path)); }

void save_puzzle_set(const std::vector<PuzzleTriplet>& ts, const std::string& path) {
  write_file_atomic(path, puzzle_set_to_text(ts));
}

}  // namespace prime
