#include "prime/solver.hpp"

#include <algorithm>

#include "prime/error.hpp"

namespace prime {

namespace {

// Flattened expression. Atom refs >= 0 are variables; refs < 0 encode a
// fixed names-column row as -(row + 1).
struct Node {
  ClueExpr::Op op;
  int a = 0, b = 0;
  int first = 0, count = 0;  // children are nodes [first, first + count)
};

struct Compiled {
  std::vector<Node> nodes;
  int root = 0;
};

class Search {
 public:
  Search(const ColumnSpec& d, const std::vector<Clue>& clues, int limit)
      : d_(d), p_(d.p()), q_(d.q()), limit_(limit) {
    if (limit < 1) throw Error("count_solutions: limit must be >= 1");
    n_vars_ = p_ * (q_ - 1);
    checks_at_.resize(n_vars_);
    rows_.assign(n_vars_, -1);
    used_.assign(q_, 0);
    for (const auto& clue : clues) {
      Compiled comp;
      int last = -1;
      comp.root = compile(clue.expr, comp, last);
      if (last < 0) {
        // Only fixed atoms: decided now.
        if (!eval(comp, comp.root)) always_false_ = true;
        continue;
      }
      compiled_.push_back(std::move(comp));
      checks_at_[last].push_back(static_cast<int>(compiled_.size()) - 1);
    }
  }

  CountResult run() {
    if (!always_false_) descend(0);
    return std::move(result_);
  }

 private:
  int ref_of(const Atom& atom, int& last) {
    int c = -1;
    for (int k = 0; k < q_; ++k)
      if (d_.columns[k].name == atom.category) c = k;
    if (c < 0) throw Error("clue uses unknown category \"" + atom.category + "\"");
    const auto& pool = d_.pools[c];
    auto it = std::find(pool.begin(), pool.end(), atom.item);
    if (it == pool.end()) throw Error("clue uses unknown item \"" + atom.item + "\"");
    int i = static_cast<int>(it - pool.begin());
    if (c == 0) return -(i + 1);
    int v = (c - 1) * p_ + i;
    last = std::max(last, v);
    return v;
  }

  int compile(const ClueExpr& e, Compiled& comp, int& last) {
    int idx = static_cast<int>(comp.nodes.size());
    comp.nodes.push_back({e.op});
    if (e.op == ClueExpr::Op::link) {
      comp.nodes[idx].a = ref_of(e.a, last);
      comp.nodes[idx].b = ref_of(e.b, last);
      return idx;
    }
    // Children first into a scratch list, then laid out contiguously.
    std::vector<int> kids;
    for (const auto& k : e.args) kids.push_back(compile(k, comp, last));
    int first = static_cast<int>(comp.nodes.size());
    for (int k : kids) comp.nodes.push_back(comp.nodes[k]);
    comp.nodes[idx].first = first;
    comp.nodes[idx].count = static_cast<int>(kids.size());
    return idx;
  }

  int row(int ref) const { return ref < 0 ? -ref - 1 : rows_[ref]; }

  bool eval(const Compiled& comp, int i) const {
    const Node& n = comp.nodes[i];
    switch (n.op) {
      case ClueExpr::Op::link: return row(n.a) == row(n.b);
      case ClueExpr::Op::negate: return !eval(comp, n.first);
      case ClueExpr::Op::all:
        for (int k = 0; k < n.count; ++k)
          if (!eval(comp, n.first + k)) return false;
        return true;
      case ClueExpr::Op::any:
        for (int k = 0; k < n.count; ++k)
          if (eval(comp, n.first + k)) return true;
        return false;
    }
    return false;
  }

  SolutionGrid snapshot() const {
    Assignment a;
    a.row_of.resize(q_);
    for (int r = 0; r < p_; ++r) a.row_of[0].push_back(r);
    for (int v = 0; v < n_vars_; ++v) a.row_of[1 + v / p_].push_back(rows_[v]);
    return grid_of(d_, a);
  }

  // Returns false once the limit is reached.
  bool descend(int v) {
    if (v == n_vars_) {
      ++result_.count;
      if (result_.count == 1) result_.first = snapshot();
      if (result_.count == 2) result_.second = snapshot();
      return result_.count < limit_;
    }
    const int c = 1 + v / p_;
    for (int r = 0; r < p_; ++r) {
      if (used_[c] & (1u << r)) continue;
      ++result_.stats.nodes;
      rows_[v] = r;
      used_[c] |= 1u << r;
      bool ok = true;
      for (int ci : checks_at_[v]) {
        ++result_.stats.clue_checks;
        if (!eval(compiled_[ci], compiled_[ci].root)) {
          ok = false;
          break;
        }
      }
      bool go_on = !ok || descend(v + 1);
      used_[c] &= ~(1u << r);
      rows_[v] = -1;
      if (!go_on) return false;
    }
    return true;
  }

  const ColumnSpec& d_;
  int p_, q_, limit_;
  int n_vars_ = 0;
  bool always_false_ = false;
  std::vector<Compiled> compiled_;
  std::vector<std::vector<int>> checks_at_;
  std::vector<int> rows_;
  std::vector<unsigned> used_;
  CountResult result_;
};

}  // namespace

CountResult count_solutions(const ColumnSpec& domain, const std::vector<Clue>& clues, int limit) {
  if (domain.p() > 31) throw Error("count_solutions: at most 31 rows supported");
  return Search(domain, clues, limit).run();
}

SolveOutcome solve_unique(const ColumnSpec& domain, const std::vector<Clue>& clues) {
  CountResult cr = count_solutions(domain, clues, 2);
  SolveOutcome out;
  out.stats = cr.stats;
  if (cr.count == 0) {
    out.status = SolveOutcome::Status::unsat;
  } else if (cr.count == 1) {
    out.status = SolveOutcome::Status::unique;
    out.grid = std::move(cr.first);
  } else {
    out.status = SolveOutcome::Status::not_unique;
    out.witness.emplace(std::move(*cr.first), std::move(*cr.second));
  }
  return out;
}

bool uniquely_solves(const std::vector<Clue>& clues, const SolutionGrid& target) {
  SolveOutcome o = solve_unique(puzzle_domain(target), clues);
  return o.status == SolveOutcome::Status::unique && *o.grid == target;
}

}  // namespace prime
