#include "prime/render.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include <json.hpp>

#include "prime/error.hpp"
#include "prime/resources.hpp"
#include "prime/rng.hpp"

namespace prime {

std::string display_name(std::string_view label) {
  std::string out(label);
  bool start = true;
  for (auto& ch : out) {
    if (start && std::isalpha(static_cast<unsigned char>(ch)))
      ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    start = ch == ' ' || ch == '-';
  }
  return out;
}

std::string with_article(std::string_view label) {
  if (label.empty()) return {};
  if (label.size() >= 2 && label.back() == 's' && label[label.size() - 2] != 's') return std::string(label);
  const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(label.front())));
  const bool vowel = std::string_view("aeiou").find(c) != std::string_view::npos;
  return std::string(vowel ? "an " : "a ") + std::string(label);
}

namespace {

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
  return s;
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

class Phraser {
 public:
  Phraser(const SolutionGrid& grid, const PhraseBook& phrases) : grid_(grid), phrases_(phrases) {}

  bool is_name(const Atom& a) const {
    int c = grid_.column_index(a.category);
    return c >= 0 && grid_.columns[c].group == Group::names;
  }

  std::string fill(std::string_view tmpl, const Atom& a, std::string_view noun = "person") const {
    std::string s(tmpl);
    s = replace_all(s, "{noun}", noun);
    s = replace_all(s, "{a}", with_article(a.item));
    s = replace_all(s, "{item}", a.item);
    return s;
  }

  const Phrase* phrase(const Atom& a) const {
    auto it = phrases_.find(a.category);
    return it == phrases_.end() ? nullptr : &it->second;
  }

  std::string verb(const Atom& a) const {
    if (is_name(a)) return "is";
    const Phrase* ph = phrase(a);
    return ph && !ph->verb.empty() ? ph->verb : "has";
  }

  std::string obj(const Atom& a) const {
    if (is_name(a)) return display_name(a.item);
    const Phrase* ph = phrase(a);
    if (ph && !ph->object.empty()) return fill(ph->object, a);
    return "the " + lower(a.category) + " " + a.item;
  }

  std::string pred(const Atom& a, bool negated = false) const {
    if (is_name(a)) return (negated ? "is not " : "is ") + display_name(a.item);
    const Phrase* ph = phrase(a);
    std::string v = negated ? (ph && !ph->negation.empty() ? ph->negation : "does not have") : verb(a);
    return v + " " + obj(a);
  }

  std::string subj(const Atom& a, std::string_view noun) const {
    if (is_name(a)) return display_name(a.item);
    const Phrase* ph = phrase(a);
    if (ph && !ph->subject.empty()) return fill(ph->subject, a, noun);
    return "the " + std::string(noun) + " who " + pred(a);
  }

 private:
  const SolutionGrid& grid_;
  const PhraseBook& phrases_;
};

const ClueExpr& link_under(const ClueExpr& e) {
  if (e.op == ClueExpr::Op::link) return e;
  if (e.op == ClueExpr::Op::negate && !e.args.empty() && e.args[0].op == ClueExpr::Op::link) return e.args[0];
  throw Error("clue does not match its kind template: " + to_logic_text(e));
}

// For links sharing one atom: (shared, other-of-first, other-of-second).
std::tuple<Atom, Atom, Atom> shared_split(const ClueExpr& l1, const ClueExpr& l2) {
  for (const Atom* s1 : {&l1.a, &l1.b})
    for (const Atom* s2 : {&l2.a, &l2.b})
      if (*s1 == *s2) return {*s1, s1 == &l1.a ? l1.b : l1.a, s2 == &l2.a ? l2.b : l2.a};
  throw Error("links share no atom");
}

const Atom& other(const ClueExpr& link, const Atom& known) { return link.a == known ? link.b : link.a; }

}  // namespace

std::string render_clue_text(const Clue& clue, const SolutionGrid& grid, const PhraseBook& phrases) {
  Phraser ph(grid, phrases);
  const ClueExpr& e = clue.expr;
  auto need = [&](bool ok) {
    if (!ok) throw Error("clue does not match its kind template: " + to_logic_text(e));
  };

  switch (clue.kind) {
    case ClueKind::true_false: {
      const ClueExpr& l = link_under(e);
      const bool neg = e.op == ClueExpr::Op::negate;
      const Atom& s = ph.is_name(l.b) ? l.b : l.a;
      const Atom& o = other(l, s);
      std::string head = ph.is_name(s) ? display_name(s.item) : ph.subj(s, "person");
      return capitalize(head + " " + ph.pred(o, neg) + ".");
    }
    case ClueKind::neither_nor: {
      need(e.args.size() == 2);
      auto [c, a, b] = shared_split(link_under(e.args[0]), link_under(e.args[1]));
      return "Neither " + ph.subj(a, "person") + " nor " + ph.subj(b, "one") + " " + ph.pred(c) + ".";
    }
    case ClueKind::either_or: {
      need(e.args.size() == 2 && e.args[0].args.size() == 2);
      auto [c, a, b] = shared_split(link_under(e.args[0].args[0]), link_under(e.args[0].args[1]));
      return capitalize(ph.subj(c, "person") + " " + ph.verb(a) + " either " + ph.obj(a) + " or " + ph.obj(b) + ".");
    }
    case ClueKind::unaligned_pair: {
      need(e.args.size() == 3 && e.args[1].args.size() == 2);
      const ClueExpr& d = link_under(e.args[0]);
      auto [x, p, q] = shared_split(link_under(e.args[1].args[0]), link_under(e.args[1].args[1]));
      const Atom& y = other(d, x);
      return "Of " + ph.subj(p, "person") + " and " + ph.subj(q, "one") + ", one " + ph.pred(x) +
             ", and the other " + ph.pred(y) + ".";
    }
    case ClueKind::multi_elimination: {
      need(e.args.size() == 3);
      const ClueExpr& ab = link_under(e.args[0]);
      const Atom& c = other(link_under(e.args[1]), ab.a);
      return "The three people are " + ph.subj(ab.a, "one") + ", " + ph.subj(ab.b, "one") + ", and " +
             ph.subj(c, "one") + ".";
    }
  }
  return {};
}

void render_english(Puzzle& puzzle, const PhraseBook& phrases) {
  for (auto& c : puzzle.clues) c.english = render_clue_text(c, puzzle.grid, phrases);
}

void render_english(PuzzleTriplet& triplet, const PhraseBook& phrases) {
  for (Variant v : kAllVariants) render_english(triplet.variant(v), phrases);
}

std::string expand_template(std::string_view tmpl, const std::map<std::string, std::string>& slots,
                            const std::set<std::string>& flags) {
  std::string out;
  std::size_t pos = 0;
  // Skip depth: >0 while inside a section whose condition is false.
  int skipping = 0;
  std::vector<std::string> open;
  while (pos < tmpl.size()) {
    std::size_t start = tmpl.find("{{", pos);
    if (start == std::string_view::npos) {
      if (!skipping) out += tmpl.substr(pos);
      break;
    }
    if (!skipping) out += tmpl.substr(pos, start - pos);
    std::size_t end = tmpl.find("}}", start + 2);
    if (end == std::string_view::npos) throw Error("template: unterminated tag");
    std::string tag(tmpl.substr(start + 2, end - start - 2));
    pos = end + 2;
    if (tag.empty()) throw Error("template: empty tag");
    const char sigil = tag[0];
    if (sigil == '#' || sigil == '^') {
      if (!open.empty()) throw Error("template: nested sections are not supported");
      std::string name = tag.substr(1);
      open.push_back(name);
      bool on = flags.count(name) > 0;
      if ((sigil == '#') != on) skipping = 1;
    } else if (sigil == '/') {
      if (open.empty() || open.back() != tag.substr(1)) throw Error("template: mismatched close tag " + tag);
      open.pop_back();
      skipping = 0;
    } else if (!skipping) {
      auto it = slots.find(tag);
      if (it == slots.end()) throw Error("template: no value for slot '" + tag + "'");
      out += it->second;
    }
  }
  if (!open.empty()) throw Error("template: unclosed section " + open.back());
  return out;
}

std::string_view to_string(PromptMode m) {
  switch (m) {
    case PromptMode::base: return "base";
    case PromptMode::cot: return "cot";
    case PromptMode::debias: return "debias";
  }
  return "?";
}

PromptMode parse_prompt_mode(std::string_view s) {
  if (s == "base") return PromptMode::base;
  if (s == "cot") return PromptMode::cot;
  if (s == "debias") return PromptMode::debias;
  throw UsageError("unknown mode '" + std::string(s) + "' (base|cot|debias)");
}

std::string categories_block(const SolutionGrid& grid) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (int c = 1; c < grid.q(); ++c) {
    auto vals = grid.column_values(c);
    std::sort(vals.begin(), vals.end());
    j[grid.columns[c].name] = vals;
  }
  return j.dump();
}

std::string clue_block(const std::vector<Clue>& clues) {
  std::string out = "\n";
  for (std::size_t i = 0; i < clues.size(); ++i) out += std::to_string(i + 1) + ". " + clues[i].english + "\n";
  return out;
}

std::string empty_grid_document(const SolutionGrid& grid) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (int r = 0; r < grid.p(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (int c = 1; c < grid.q(); ++c) row[grid.columns[c].name] = "?";
    j[display_name(grid.at(r, 0))] = row;
  }
  return j.dump(2);
}

std::string build_puzzle_prompt(const Puzzle& puzzle, PromptMode mode, std::optional<std::uint64_t> shuffle_seed) {
  std::vector<Clue> clues = puzzle.clues;
  for (const auto& c : clues)
    if (c.english.empty()) throw Error("clue lacks english text; render it first: " + c.logic_text());
  if (shuffle_seed) {
    Rng rng(*shuffle_seed);
    rng.shuffle(clues);
  }
  std::string tmpl(resource("resources/prompts/solve_puzzle.txt"));
  while (!tmpl.empty() && (tmpl.back() == '\n' || tmpl.back() == '\r')) tmpl.pop_back();
  std::set<std::string> flags;
  if (mode == PromptMode::cot) flags.insert("cot");
  if (mode == PromptMode::debias) flags.insert("debias");
  return expand_template(tmpl,
                         {{"categories", categories_block(puzzle.grid)},
                          {"clues", clue_block(clues)},
                          {"grid", empty_grid_document(puzzle.grid)}},
                         flags);
}

std::string_view to_string(ProbeSetting s) { return s == ProbeSetting::mixed_gender ? "MG" : "IG"; }

namespace {

std::string one_line(std::string_view key) {
  std::string t(resource(key));
  while (!t.empty() && (t.back() == '\n' || t.back() == '\r')) t.pop_back();
  return t;
}

std::string join_words(const std::string& a, const std::string& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return a + " " + b;
}

}  // namespace

std::vector<ExplicitPrompt> explicit_bias_prompts(const Catalog& catalog, const Category& bp) {
  if (bp.with_gender(Gender::man).empty() || bp.with_gender(Gender::woman).empty())
    throw ValidationError("category \"" + bp.name + "\" lacks a gender subset");
  Phrase ph;
  if (auto it = catalog.phrases.find(bp.name); it != catalog.phrases.end()) ph = it->second;
  if (ph.scene.empty()) ph.scene = "spending time together";
  if (ph.progressive.empty() && ph.choice_object.empty()) ph.progressive = "associated with";
  if (ph.choice_object.empty()) ph.choice_object = "{item}";
  auto choice_obj = [&](const std::string& item) {
    std::string s = replace_all(ph.choice_object, "{a}", with_article(item));
    return replace_all(s, "{item}", item);
  };

  const std::string mg = one_line("resources/prompts/explicit_mixed_gender.txt");
  const std::string ig = one_line("resources/prompts/explicit_individual_gender.txt");
  std::vector<ExplicitPrompt> out;

  for (const auto& it : bp.items) {
    ExplicitPrompt e;
    e.setting = ProbeSetting::mixed_gender;
    e.category = bp.name;
    e.gender = *it.gender;
    e.items = {it.label};
    e.item_genders = {*it.gender};
    e.options = {"the man", "the woman"};
    e.text = expand_template(mg, {{"scene", ph.scene}, {"choice", join_words(ph.progressive, choice_obj(it.label))}});
    out.push_back(std::move(e));
  }

  auto men = bp.with_gender(Gender::man);
  auto women = bp.with_gender(Gender::woman);
  for (Gender subject : {Gender::woman, Gender::man}) {
    for (const auto* m : men)
      for (const auto* w : women)
        for (int order = 0; order < 2; ++order) {
          const CatalogItem* first = order == 0 ? m : w;
          const CatalogItem* second = order == 0 ? w : m;
          ExplicitPrompt e;
          e.setting = ProbeSetting::individual_gender;
          e.category = bp.name;
          e.gender = subject;
          e.items = {first->label, second->label};
          e.item_genders = {*first->gender, *second->gender};
          const std::string o1 = choice_obj(first->label), o2 = choice_obj(second->label);
          e.options = {o1, o2};
          e.text = expand_template(ig, {{"gender", std::string(to_string(subject))},
                                        {"scene", ph.scene},
                                        {"pronoun", subject == Gender::man ? "he" : "she"},
                                        {"choices", join_words(ph.progressive, o1 + " or " + o2)},
                                        {"item1", o1},
                                        {"item2", o2}});
          out.push_back(std::move(e));
        }
  }
  return out;
}

std::vector<std::string> name_probe_prompts(std::string_view name) {
  std::vector<std::string> out;
  for (const auto& line : resource_lines("resources/prompts/name_gender_probe.txt"))
    out.push_back(expand_template(line, {{"name", display_name(name)}}));
  return out;
}

namespace {

std::string_view kind_label(ClueKind k) {
  switch (k) {
    case ClueKind::true_false: return "True/False";
    case ClueKind::neither_nor: return "Neither Nor";
    case ClueKind::either_or: return "Either Or";
    case ClueKind::unaligned_pair: return "Unaligned Pair";
    case ClueKind::multi_elimination: return "Multi-Elimination";
  }
  return "?";
}

}  // namespace

std::pair<std::string, std::string> clue_translation_messages(const Clue& clue) {
  std::string examples;
  for (const auto& line : resource_lines("resources/prompts/clue_translation_examples.txt")) {
    std::size_t t1 = line.find('\t');
    std::size_t t2 = line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) continue;
    if (line.substr(0, t1) != to_string(clue.kind)) continue;
    examples += "Logic Clue: " + line.substr(t1 + 1, t2 - t1 - 1) + "\n";
    examples += "Natural Language Explanation: " + line.substr(t2 + 1) + "\n\n";
  }
  while (!examples.empty() && examples.back() == '\n') examples.pop_back();
  std::string sys = one_line("resources/prompts/clue_translation_system.txt");
  std::string user = one_line("resources/prompts/clue_translation_user.txt");
  return {expand_template(sys, {{"kind", std::string(kind_label(clue.kind))}, {"examples", examples}}),
          expand_template(user, {{"logic", clue.logic_text()}})};
}

}  // namespace prime
