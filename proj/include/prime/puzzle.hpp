#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prime/catalog.hpp"

namespace prime {

/// Ground-truth grid: rows are persons, columns are categories, column 0 is
/// the names column. Latin constraint: every column holds p distinct labels.
struct SolutionGrid {
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> rows;  // rows[r][c]

  int p() const { return static_cast<int>(rows.size()); }
  int q() const { return static_cast<int>(columns.size()); }
  const std::string& at(int r, int c) const { return rows[r][c]; }
  int column_index(std::string_view category) const;  // -1 if absent
  int row_of(int column, std::string_view item) const;  // -1 if absent
  std::vector<std::string> column_values(int column) const;
  bool operator==(const SolutionGrid&) const = default;
};

std::vector<std::string> validate_grid(const SolutionGrid& g);

struct Atom {
  std::string category;
  std::string item;
  auto operator<=>(const Atom&) const = default;
};

/// Clue expression tree. A link is true iff both atoms belong to the same person.
struct ClueExpr {
  enum class Op { link, negate, all, any };

  Op op = Op::link;
  Atom a, b;                   // link operands
  std::vector<ClueExpr> args;  // negate: exactly 1; all/any: at least 2

  static ClueExpr link(Atom a, Atom b);
  static ClueExpr negate(ClueExpr e);
  static ClueExpr all(std::vector<ClueExpr> es);
  static ClueExpr any(std::vector<ClueExpr> es);

  bool operator==(const ClueExpr&) const = default;
};

enum class ClueKind { true_false, neither_nor, either_or, unaligned_pair, multi_elimination };
inline constexpr ClueKind kAllKinds[] = {ClueKind::true_false, ClueKind::neither_nor, ClueKind::either_or,
                                         ClueKind::unaligned_pair, ClueKind::multi_elimination};

std::string_view to_string(ClueKind k);
ClueKind parse_clue_kind(std::string_view s);

struct Clue {
  ClueKind kind = ClueKind::true_false;
  ClueExpr expr;
  std::string english;

  std::vector<Atom> atoms() const;  // distinct, in first-occurrence order
  std::string logic_text() const;
  bool operator==(const Clue&) const = default;
};

// Layman notation: atom "(Cat = item)", link "(x ⇔ y)", "¬x", "(x ∧ y ∧ z)", "(x ∨ y)".
std::string to_logic_text(const ClueExpr& e);
ClueExpr parse_logic_text(std::string_view text);

// Which kind template the expression instantiates, if any. Column membership
// of atoms is looked up in `grid`.
std::optional<ClueKind> classify_expr(const ClueExpr& e, const std::vector<Column>& columns);

// Per-puzzle domain for the solver: the grid's columns, names in row order
// (row r is the r-th name), every other pool sorted so pool order carries no
// information about the solution.
ColumnSpec puzzle_domain(const SolutionGrid& g);

// assignment.row_of[c][i] = row holding pools[c][i]. Column 0 is the identity.
struct Assignment {
  std::vector<std::vector<int>> row_of;
  bool operator==(const Assignment&) const = default;
};

Assignment assignment_of(const ColumnSpec& domain, const SolutionGrid& g);
SolutionGrid grid_of(const ColumnSpec& domain, const Assignment& a);

// Throws prime::Error for an atom outside the domain.
int person_of(const ColumnSpec& domain, const Assignment& a, const Atom& atom);
bool eval_expr(const ClueExpr& e, const ColumnSpec& domain, const Assignment& a);
bool eval_clue(const Clue& c, const ColumnSpec& domain, const Assignment& a);

// Shorthand: evaluate against a grid directly.
bool holds_on(const Clue& c, const SolutionGrid& g);

}  // namespace prime
