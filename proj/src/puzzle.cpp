#include "prime/puzzle.hpp"

#include <algorithm>
#include <set>

#include "prime/error.hpp"

namespace prime {

namespace {
constexpr std::string_view kNot = "\xc2\xac";      // ¬
constexpr std::string_view kAnd = "\xe2\x88\xa7";  // ∧
constexpr std::string_view kOr = "\xe2\x88\xa8";   // ∨
constexpr std::string_view kIff = "\xe2\x87\x94";  // ⇔
}  // namespace

int SolutionGrid::column_index(std::string_view category) const {
  for (int c = 0; c < q(); ++c)
    if (columns[c].name == category) return c;
  return -1;
}

int SolutionGrid::row_of(int column, std::string_view item) const {
  for (int r = 0; r < p(); ++r)
    if (rows[r][column] == item) return r;
  return -1;
}

std::vector<std::string> SolutionGrid::column_values(int column) const {
  std::vector<std::string> out;
  for (const auto& row : rows) out.push_back(row[column]);
  return out;
}

std::vector<std::string> validate_grid(const SolutionGrid& g) {
  std::vector<std::string> issues;
  if (g.q() < 2) issues.push_back("grid needs at least two columns");
  if (!g.columns.empty() && g.columns[0].group != Group::names) issues.push_back("column 1 must be the names column");
  for (int r = 0; r < g.p(); ++r)
    if (static_cast<int>(g.rows[r].size()) != g.q())
      issues.push_back("row " + std::to_string(r) + " has " + std::to_string(g.rows[r].size()) + " cells");
  if (!issues.empty()) return issues;
  for (int c = 0; c < g.q(); ++c) {
    std::set<std::string> seen;
    for (int r = 0; r < g.p(); ++r)
      if (!seen.insert(g.rows[r][c]).second)
        issues.push_back("column \"" + g.columns[c].name + "\" repeats \"" + g.rows[r][c] + "\"");
  }
  return issues;
}

ClueExpr ClueExpr::link(Atom a, Atom b) {
  ClueExpr e;
  e.op = Op::link;
  e.a = std::move(a);
  e.b = std::move(b);
  return e;
}

ClueExpr ClueExpr::negate(ClueExpr inner) {
  ClueExpr e;
  e.op = Op::negate;
  e.args.push_back(std::move(inner));
  return e;
}

ClueExpr ClueExpr::all(std::vector<ClueExpr> es) {
  ClueExpr e;
  e.op = Op::all;
  e.args = std::move(es);
  return e;
}

ClueExpr ClueExpr::any(std::vector<ClueExpr> es) {
  ClueExpr e;
  e.op = Op::any;
  e.args = std::move(es);
  return e;
}

std::string_view to_string(ClueKind k) {
  switch (k) {
    case ClueKind::true_false: return "true_false";
    case ClueKind::neither_nor: return "neither_nor";
    case ClueKind::either_or: return "either_or";
    case ClueKind::unaligned_pair: return "unaligned_pair";
    case ClueKind::multi_elimination: return "multi_elimination";
  }
  return "?";
}

ClueKind parse_clue_kind(std::string_view s) {
  for (ClueKind k : kAllKinds)
    if (to_string(k) == s) return k;
  throw ParseError("unknown clue kind '" + std::string(s) + "'");
}

namespace {

void collect_atoms(const ClueExpr& e, std::vector<Atom>& out) {
  if (e.op == ClueExpr::Op::link) {
    for (const Atom* at : {&e.a, &e.b})
      if (std::find(out.begin(), out.end(), *at) == out.end()) out.push_back(*at);
    return;
  }
  for (const auto& k : e.args) collect_atoms(k, out);
}

void print(const ClueExpr& e, std::string& out) {
  switch (e.op) {
    case ClueExpr::Op::link:
      out += "((" + e.a.category + " = " + e.a.item + ") ";
      out += kIff;
      out += " (" + e.b.category + " = " + e.b.item + "))";
      return;
    case ClueExpr::Op::negate:
      out += kNot;
      print(e.args.at(0), out);
      return;
    case ClueExpr::Op::all:
    case ClueExpr::Op::any: {
      std::string_view glyph = e.op == ClueExpr::Op::all ? kAnd : kOr;
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) {
          out += ' ';
          out += glyph;
          out += ' ';
        }
        print(e.args[i], out);
      }
      out += ')';
      return;
    }
  }
}

class LogicParser {
 public:
  explicit LogicParser(std::string_view s) : s_(s) {}

  ClueExpr parse() {
    Node n = expr();
    skip_spaces();
    if (pos_ != s_.size()) fail("trailing input");
    if (n.is_atom) fail("a bare atom is not a clue");
    return std::move(n.expr);
  }

 private:
  struct Node {
    bool is_atom = false;
    Atom atom;
    ClueExpr expr;
  };

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("logic notation: " + why + " at offset " + std::to_string(pos_) + " in \"" + std::string(s_) +
                     "\"");
  }

  void skip_spaces() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }

  bool eat(std::string_view tok) {
    skip_spaces();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  Node expr() {
    if (eat(kNot)) {
      Node inner = expr();
      if (inner.is_atom) fail("negated bare atom");
      Node n;
      n.expr = ClueExpr::negate(std::move(inner.expr));
      return n;
    }
    if (!eat("(")) fail("expected '(' or negation");
    skip_spaces();
    if (pos_ < s_.size() && s_[pos_] != '(' && s_.substr(pos_, kNot.size()) != kNot) return atom_body();

    std::vector<Node> parts;
    parts.push_back(expr());
    std::string_view op;
    while (true) {
      skip_spaces();
      if (eat(")")) break;
      std::string_view next;
      for (std::string_view g : {kIff, kAnd, kOr})
        if (eat(g)) next = g;
      if (next.empty()) fail("expected connective or ')'");
      if (!op.empty() && op != next) fail("mixed connectives need parentheses");
      op = next;
      parts.push_back(expr());
    }
    if (parts.size() == 1) fail("redundant parentheses");
    Node n;
    if (op == kIff) {
      if (parts.size() != 2 || !parts[0].is_atom || !parts[1].is_atom) fail("a link joins exactly two atoms");
      n.expr = ClueExpr::link(std::move(parts[0].atom), std::move(parts[1].atom));
      return n;
    }
    std::vector<ClueExpr> kids;
    for (auto& p : parts) {
      if (p.is_atom) fail("bare atom under a connective");
      kids.push_back(std::move(p.expr));
    }
    n.expr = op == kAnd ? ClueExpr::all(std::move(kids)) : ClueExpr::any(std::move(kids));
    return n;
  }

  Node atom_body() {
    std::size_t close = s_.find(')', pos_);
    if (close == std::string_view::npos) fail("unterminated atom");
    std::string_view body = s_.substr(pos_, close - pos_);
    std::size_t eq = body.find(" = ");
    if (eq == std::string_view::npos) fail("atom must read '(Category = item)'");
    Node n;
    n.is_atom = true;
    n.atom.category = std::string(body.substr(0, eq));
    n.atom.item = std::string(body.substr(eq + 3));
    if (n.atom.category.empty() || n.atom.item.empty()) fail("empty atom side");
    pos_ = close + 1;
    return n;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

// Shape helpers for classify_expr.
const ClueExpr* as_link(const ClueExpr& e) { return e.op == ClueExpr::Op::link ? &e : nullptr; }

const ClueExpr* as_neg_link(const ClueExpr& e) {
  return e.op == ClueExpr::Op::negate && e.args.size() == 1 ? as_link(e.args[0]) : nullptr;
}

bool same_pair(const ClueExpr& l, const Atom& x, const Atom& y) {
  return (l.a == x && l.b == y) || (l.a == y && l.b == x);
}

// Atom shared by two links and the two leftovers, if exactly one is shared.
bool split_shared(const ClueExpr& l1, const ClueExpr& l2, Atom& shared, Atom& o1, Atom& o2) {
  for (const Atom* s1 : {&l1.a, &l1.b})
    for (const Atom* s2 : {&l2.a, &l2.b})
      if (*s1 == *s2) {
        shared = *s1;
        o1 = s1 == &l1.a ? l1.b : l1.a;
        o2 = s2 == &l2.a ? l2.b : l2.a;
        return !(o1 == o2);
      }
  return false;
}

}  // namespace

std::vector<Atom> Clue::atoms() const {
  std::vector<Atom> out;
  collect_atoms(expr, out);
  return out;
}

std::string to_logic_text(const ClueExpr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::string Clue::logic_text() const { return to_logic_text(expr); }

ClueExpr parse_logic_text(std::string_view text) { return LogicParser(text).parse(); }

std::optional<ClueKind> classify_expr(const ClueExpr& e, const std::vector<Column>& columns) {
  auto col = [&](const Atom& a) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (columns[c].name == a.category) return static_cast<int>(c);
    return -1;
  };
  auto link_ok = [&](const ClueExpr& l) { return col(l.a) >= 0 && col(l.b) >= 0 && col(l.a) != col(l.b); };

  if (const ClueExpr* l = as_link(e); l || (l = as_neg_link(e)))
    return link_ok(*l) ? std::optional(ClueKind::true_false) : std::nullopt;
  if (e.op != ClueExpr::Op::all) return std::nullopt;

  if (e.args.size() == 2) {
    // neither/nor: (¬(a⇔c) ∧ ¬(b⇔c))
    const ClueExpr* n1 = as_neg_link(e.args[0]);
    const ClueExpr* n2 = as_neg_link(e.args[1]);
    Atom c, a, b;
    if (n1 && n2 && link_ok(*n1) && link_ok(*n2) && split_shared(*n1, *n2, c, a, b) && col(a) == col(b))
      return ClueKind::neither_nor;
    // either/or: (((a⇔c) ∨ (b⇔c)) ∧ ¬((a⇔c) ∧ (b⇔c)))
    const ClueExpr& dis = e.args[0];
    const ClueExpr& neg = e.args[1];
    if (dis.op == ClueExpr::Op::any && dis.args.size() == 2 && neg.op == ClueExpr::Op::negate &&
        neg.args.size() == 1 && neg.args[0].op == ClueExpr::Op::all && neg.args[0].args == dis.args) {
      const ClueExpr* l1 = as_link(dis.args[0]);
      const ClueExpr* l2 = as_link(dis.args[1]);
      if (l1 && l2 && link_ok(*l1) && link_ok(*l2) && split_shared(*l1, *l2, c, a, b) && col(a) == col(b))
        return ClueKind::either_or;
    }
    return std::nullopt;
  }
  if (e.args.size() != 3) return std::nullopt;

  // multi-elimination: (¬(a⇔b) ∧ ¬(a⇔c) ∧ ¬(b⇔c)) over three columns
  const ClueExpr* m1 = as_neg_link(e.args[0]);
  const ClueExpr* m2 = as_neg_link(e.args[1]);
  const ClueExpr* m3 = as_neg_link(e.args[2]);
  if (m1 && m2 && m3) {
    const Atom &a = m1->a, &b = m1->b;
    Atom c = (m2->a == a) ? m2->b : m2->a;
    std::set<int> cols{col(a), col(b), col(c)};
    if (same_pair(*m2, a, c) && same_pair(*m3, b, c) && !cols.count(-1) && cols.size() == 3)
      return ClueKind::multi_elimination;
    return std::nullopt;
  }
  // unaligned pair: (¬(x⇔y) ∧ ((x⇔p) ∨ (x⇔q)) ∧ ((y⇔p) ∨ (y⇔q)))
  const ClueExpr* d = m1;
  const ClueExpr& o1 = e.args[1];
  const ClueExpr& o2 = e.args[2];
  if (!d || o1.op != ClueExpr::Op::any || o2.op != ClueExpr::Op::any || o1.args.size() != 2 || o2.args.size() != 2)
    return std::nullopt;
  const ClueExpr* xp = as_link(o1.args[0]);
  const ClueExpr* xq = as_link(o1.args[1]);
  const ClueExpr* yp = as_link(o2.args[0]);
  const ClueExpr* yq = as_link(o2.args[1]);
  if (!xp || !xq || !yp || !yq) return std::nullopt;
  const Atom &x = d->a, &y = d->b;
  Atom s, p, q;
  if (!split_shared(*xp, *xq, s, p, q) || !(s == x)) return std::nullopt;
  if (!same_pair(*yp, y, p) || !same_pair(*yq, y, q)) return std::nullopt;
  const int cx = col(x), cy = col(y), cz = col(p);
  if (cx < 0 || cy < 0 || cz < 0 || cx == cy || cz == cx || cz == cy || col(q) != cz) return std::nullopt;
  return ClueKind::unaligned_pair;
}

ColumnSpec puzzle_domain(const SolutionGrid& g) {
  ColumnSpec d;
  d.columns = g.columns;
  for (int c = 0; c < g.q(); ++c) {
    auto vals = g.column_values(c);
    if (c > 0) std::sort(vals.begin(), vals.end());
    d.pools.push_back(std::move(vals));
  }
  return d;
}

namespace {

int pool_index(const ColumnSpec& d, int c, std::string_view item) {
  const auto& pool = d.pools[c];
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (pool[i] == item) return static_cast<int>(i);
  return -1;
}

int column_of(const ColumnSpec& d, std::string_view category) {
  for (int c = 0; c < d.q(); ++c)
    if (d.columns[c].name == category) return c;
  return -1;
}

}  // namespace

Assignment assignment_of(const ColumnSpec& domain, const SolutionGrid& g) {
  Assignment a;
  a.row_of.resize(domain.q());
  for (int c = 0; c < domain.q(); ++c) {
    int gc = g.column_index(domain.columns[c].name);
    if (gc < 0) throw Error("grid lacks column \"" + domain.columns[c].name + "\"");
    for (const auto& item : domain.pools[c]) {
      int r = g.row_of(gc, item);
      if (r < 0) throw Error("grid lacks item \"" + item + "\"");
      a.row_of[c].push_back(r);
    }
  }
  return a;
}

SolutionGrid grid_of(const ColumnSpec& domain, const Assignment& a) {
  SolutionGrid g;
  g.columns = domain.columns;
  g.rows.assign(domain.p(), std::vector<std::string>(domain.q()));
  for (int c = 0; c < domain.q(); ++c)
    for (std::size_t i = 0; i < domain.pools[c].size(); ++i) g.rows[a.row_of[c][i]][c] = domain.pools[c][i];
  return g;
}

int person_of(const ColumnSpec& domain, const Assignment& a, const Atom& atom) {
  int c = column_of(domain, atom.category);
  if (c < 0) throw Error("unknown category \"" + atom.category + "\"");
  int i = pool_index(domain, c, atom.item);
  if (i < 0) throw Error("unknown item \"" + atom.item + "\" in \"" + atom.category + "\"");
  return a.row_of[c][i];
}

bool eval_expr(const ClueExpr& e, const ColumnSpec& domain, const Assignment& a) {
  switch (e.op) {
    case ClueExpr::Op::link: return person_of(domain, a, e.a) == person_of(domain, a, e.b);
    case ClueExpr::Op::negate: return !eval_expr(e.args.at(0), domain, a);
    case ClueExpr::Op::all:
      for (const auto& k : e.args)
        if (!eval_expr(k, domain, a)) return false;
      return true;
    case ClueExpr::Op::any:
      for (const auto& k : e.args)
        if (eval_expr(k, domain, a)) return true;
      return false;
  }
  return false;
}

bool eval_clue(const Clue& c, const ColumnSpec& domain, const Assignment& a) { return eval_expr(c.expr, domain, a); }

bool holds_on(const Clue& c, const SolutionGrid& g) {
  ColumnSpec d = puzzle_domain(g);
  return eval_clue(c, d, assignment_of(d, g));
}

}  // namespace prime
