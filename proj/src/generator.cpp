#include "prime/generator.hpp"

#include <algorithm>
#include <exception>
#include <set>

#include <omp.h>

#include "prime/error.hpp"
#include "prime/rng.hpp"
#include "prime/solver.hpp"

namespace prime {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::generic: return "G";
    case Variant::stereo: return "S";
    case Variant::anti: return "AS";
  }
  return "?";
}

Variant parse_variant(std::string_view s) {
  if (s == "G") return Variant::generic;
  if (s == "S") return Variant::stereo;
  if (s == "AS") return Variant::anti;
  throw ParseError("unknown variant '" + std::string(s) + "'");
}

const Puzzle& PuzzleTriplet::variant(Variant v) const {
  return v == Variant::generic ? generic : v == Variant::stereo ? stereo : anti;
}

Puzzle& PuzzleTriplet::variant(Variant v) {
  return v == Variant::generic ? generic : v == Variant::stereo ? stereo : anti;
}

std::string anonymized_name(int row) { return std::string("person ") + static_cast<char>('a' + row); }

TripletGrids build_grids(const ColumnSpec& spec, std::uint64_t seed) {
  const int p = spec.p(), q = spec.q();
  if (p > 26) throw InfeasibleError("at most 26 rows can be anonymized");
  Rng rng(seed);

  std::vector<std::string> names = spec.pools[0];
  rng.shuffle(names);

  auto by_gender = [&](Gender g) {
    std::vector<std::string> out;
    for (const auto& item : spec.pools[1])
      if (spec.gender_tags.at(item) == g) out.push_back(item);
    rng.shuffle(out);
    return out;
  };
  // Arrangement of bias items for rows of each name gender; `flip` pairs cross-gender.
  auto arrange = [&](bool flip) {
    std::vector<std::string> man_items = by_gender(flip ? Gender::woman : Gender::man);
    std::vector<std::string> woman_items = by_gender(flip ? Gender::man : Gender::woman);
    std::vector<std::string> col;
    std::size_t mi = 0, wi = 0;
    for (const auto& n : names) col.push_back(spec.gender_tags.at(n) == Gender::man ? man_items[mi++] : woman_items[wi++]);
    return col;
  };
  std::vector<std::string> stereo_bp = arrange(false);
  std::vector<std::string> anti_bp = arrange(true);
  std::vector<std::string> generic_bp = spec.pools[1];
  rng.shuffle(generic_bp);

  std::vector<std::vector<std::string>> general;
  for (int c = 2; c < q; ++c) {
    auto col = spec.pools[c];
    rng.shuffle(col);
    general.push_back(std::move(col));
  }

  auto make = [&](auto name_at, const std::vector<std::string>& bp) {
    SolutionGrid g;
    g.columns = spec.columns;
    for (int r = 0; r < p; ++r) {
      std::vector<std::string> row{name_at(r), bp[r]};
      for (const auto& col : general) row.push_back(col[r]);
      g.rows.push_back(std::move(row));
    }
    return g;
  };
  TripletGrids out;
  out.stereo = make([&](int r) { return names[r]; }, stereo_bp);
  out.anti = make([&](int r) { return names[r]; }, anti_bp);
  out.generic = make([](int r) { return anonymized_name(r); }, generic_bp);
  return out;
}

namespace {

struct Cell {
  int col;
  std::string label;
  int row;
  Atom atom;
};

bool cell_less(const Cell& x, const Cell& y) { return std::tie(x.col, x.label) < std::tie(y.col, y.label); }

ClueExpr link_of(const Cell& x, const Cell& y) {
  return cell_less(x, y) ? ClueExpr::link(x.atom, y.atom) : ClueExpr::link(y.atom, x.atom);
}

ClueExpr not_link(const Cell& x, const Cell& y) { return ClueExpr::negate(link_of(x, y)); }

}  // namespace

std::string canonical_key(const ClueExpr& e) {
  auto atom_key = [](const Atom& a) { return "(" + a.category + " = " + a.item + ")"; };
  switch (e.op) {
    case ClueExpr::Op::link: {
      std::string x = atom_key(e.a), y = atom_key(e.b);
      if (y < x) std::swap(x, y);
      return "L[" + x + "," + y + "]";
    }
    case ClueExpr::Op::negate: return "N[" + canonical_key(e.args.at(0)) + "]";
    case ClueExpr::Op::all:
    case ClueExpr::Op::any: {
      std::vector<std::string> ks;
      for (const auto& k : e.args) ks.push_back(canonical_key(k));
      std::sort(ks.begin(), ks.end());
      std::string out = e.op == ClueExpr::Op::all ? "A[" : "O[";
      for (const auto& k : ks) out += k + ",";
      return out + "]";
    }
  }
  return {};
}

std::vector<Clue> enumerate_clues(const SolutionGrid& grid) {
  const int p = grid.p(), q = grid.q();
  // cols[c] holds column c's cells sorted by label.
  std::vector<std::vector<Cell>> cols(q);
  for (int c = 0; c < q; ++c) {
    for (int r = 0; r < p; ++r) cols[c].push_back({c, grid.at(r, c), r, Atom{grid.columns[c].name, grid.at(r, c)}});
    std::sort(cols[c].begin(), cols[c].end(), cell_less);
  }

  std::vector<Clue> out;
  std::set<std::string> seen;
  auto emit = [&](ClueKind k, ClueExpr e) {
    if (seen.insert(canonical_key(e)).second) out.push_back(Clue{k, std::move(e), {}});
  };

  for (int c1 = 0; c1 < q; ++c1)
    for (int c2 = c1 + 1; c2 < q; ++c2)
      for (const auto& x : cols[c1])
        for (const auto& y : cols[c2])
          emit(ClueKind::true_false, x.row == y.row ? link_of(x, y) : not_link(x, y));

  for (int A = 0; A < q; ++A)
    for (std::size_t i = 0; i < cols[A].size(); ++i)
      for (std::size_t j = i + 1; j < cols[A].size(); ++j) {
        const Cell &a = cols[A][i], &b = cols[A][j];
        for (int C = 0; C < q; ++C) {
          if (C == A) continue;
          for (const auto& c : cols[C]) {
            if (c.row != a.row && c.row != b.row) {
              emit(ClueKind::neither_nor, ClueExpr::all({not_link(a, c), not_link(b, c)}));
            } else {
              std::vector<ClueExpr> pair{link_of(a, c), link_of(b, c)};
              emit(ClueKind::either_or,
                   ClueExpr::all({ClueExpr::any(pair), ClueExpr::negate(ClueExpr::all(pair))}));
            }
          }
        }
      }

  for (int X = 0; X < q; ++X)
    for (int Y = X + 1; Y < q; ++Y)
      for (const auto& x : cols[X])
        for (const auto& y : cols[Y]) {
          if (x.row == y.row) continue;
          for (int Z = 0; Z < q; ++Z) {
            if (Z == X || Z == Y) continue;
            const Cell* pa = nullptr;
            const Cell* pb = nullptr;
            for (const auto& z : cols[Z]) {
              if (z.row == x.row || z.row == y.row) (pa ? pb : pa) = &z;
            }
            emit(ClueKind::unaligned_pair,
                 ClueExpr::all({not_link(x, y), ClueExpr::any({link_of(x, *pa), link_of(x, *pb)}),
                                ClueExpr::any({link_of(y, *pa), link_of(y, *pb)})}));
          }
        }

  if (p >= 3)
    for (int A = 0; A < q; ++A)
      for (int B = A + 1; B < q; ++B)
        for (int C = B + 1; C < q; ++C)
          for (const auto& a : cols[A])
            for (const auto& b : cols[B]) {
              if (b.row == a.row) continue;
              for (const auto& c : cols[C]) {
                if (c.row == a.row || c.row == b.row) continue;
                emit(ClueKind::multi_elimination, ClueExpr::all({not_link(a, b), not_link(a, c), not_link(b, c)}));
              }
            }
  return out;
}

SubsetSearch find_solvable_subset(const std::vector<Clue>& all, const SolutionGrid& target, std::uint64_t seed,
                                  std::size_t start_n) {
  if (all.empty()) throw ExhaustedError("no clues to sample from");
  Rng rng(seed);
  SubsetSearch out;
  std::size_t n = std::min(start_n, all.size());
  out.first_n = n;
  for (; n <= all.size(); ++n) {
    ++out.attempts;
    auto idx = rng.sample_indices(all.size(), n);
    std::sort(idx.begin(), idx.end());
    std::vector<Clue> subset;
    for (auto i : idx) subset.push_back(all[i]);
    if (uniquely_solves(subset, target)) {
      out.clues = std::move(subset);
      return out;
    }
  }
  throw ExhaustedError("no uniquely solvable subset up to n = " + std::to_string(all.size()));
}

std::vector<Clue> prune_to_minimal(std::vector<Clue> clues, const SolutionGrid& target) {
  bool removed = true;
  while (removed) {
    removed = false;
    for (std::size_t i = 0; i < clues.size();) {
      std::vector<Clue> trial = clues;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
      if (uniquely_solves(trial, target)) {
        clues = std::move(trial);
        removed = true;
      } else {
        ++i;
      }
    }
  }
  return clues;
}

bool is_minimal(const std::vector<Clue>& clues, const SolutionGrid& target) {
  if (!uniquely_solves(clues, target)) return false;
  ColumnSpec domain = puzzle_domain(target);
  for (std::size_t i = 0; i < clues.size(); ++i) {
    std::vector<Clue> trial = clues;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    if (count_solutions(domain, trial, 2).count < 2) return false;
  }
  return true;
}

LabelMap row_preserving_map(const SolutionGrid& from, const SolutionGrid& to) {
  if (from.columns != to.columns || from.p() != to.p()) throw VerificationError("grids do not share a shape");
  LabelMap m;
  for (int c = 0; c < from.q(); ++c)
    for (int r = 0; r < from.p(); ++r) m[from.columns[c].name][from.at(r, c)] = to.at(r, c);
  return m;
}

namespace {

Atom map_atom(const Atom& a, const LabelMap& m) {
  auto col = m.find(a.category);
  if (col == m.end()) throw VerificationError("no label map for category \"" + a.category + "\"");
  auto it = col->second.find(a.item);
  if (it == col->second.end()) throw VerificationError("no label map for item \"" + a.item + "\"");
  return Atom{a.category, it->second};
}

ClueExpr map_expr(const ClueExpr& e, const LabelMap& m) {
  if (e.op == ClueExpr::Op::link) return ClueExpr::link(map_atom(e.a, m), map_atom(e.b, m));
  ClueExpr out = e;
  for (auto& k : out.args) k = map_expr(k, m);
  return out;
}

}  // namespace

std::vector<Clue> relabel(const std::vector<Clue>& clues, const LabelMap& map) {
  std::vector<Clue> out;
  for (const auto& c : clues) out.push_back(Clue{c.kind, map_expr(c.expr, map), {}});
  return out;
}

std::vector<Clue> substitute_clues(const std::vector<Clue>& generic_minimal, const SolutionGrid& from_grid,
                                   const SolutionGrid& to_grid) {
  auto out = relabel(generic_minimal, row_preserving_map(from_grid, to_grid));
  if (!uniquely_solves(out, to_grid)) throw VerificationError("substituted clues do not pin the target grid");
  if (!is_minimal(out, to_grid)) throw VerificationError("substituted clues are not minimal");
  return out;
}

PuzzleTriplet build_triplet(const Catalog& catalog, int p, int q, std::uint64_t seed,
                            std::optional<std::string> bias_category, const GeneratorOptions& opts) {
  check_shape(catalog, p, q, bias_category);  // not worth retrying
  std::string last_error;
  for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
    const std::uint64_t sub = attempt == 0 ? seed : mix_seed(seed, static_cast<std::uint64_t>(attempt));
    try {
      ColumnSpec spec = sample_column_spec(catalog, p, q, mix_seed(sub, 1), bias_category);
      TripletGrids grids = build_grids(spec, mix_seed(sub, 2));
      std::vector<Clue> all = enumerate_clues(grids.generic);
      SubsetSearch found = find_solvable_subset(all, grids.generic, mix_seed(sub, 3), opts.start_n);
      std::vector<Clue> minimal = prune_to_minimal(found.clues, grids.generic);

      PuzzleTriplet t;
      t.p = p;
      t.q = q;
      t.bp_category = spec.columns[1].name;
      t.seed = seed;
      t.gender_tags = spec.gender_tags;
      t.stats = {all.size(), found.first_n, found.attempts, found.clues.size(), minimal.size(), attempt};
      t.stereo = {Variant::stereo, grids.stereo, substitute_clues(minimal, grids.generic, grids.stereo)};
      t.anti = {Variant::anti, grids.anti, substitute_clues(minimal, grids.generic, grids.anti)};
      t.generic = {Variant::generic, std::move(grids.generic), std::move(minimal)};
      return t;
    } catch (const InfeasibleError& e) {
      last_error = e.what();
    } catch (const ExhaustedError& e) {
      last_error = e.what();
    }
  }
  throw ExhaustedError("triplet " + std::to_string(p) + "x" + std::to_string(q) + " seed " + std::to_string(seed) +
                       " failed after " + std::to_string(opts.max_retries + 1) + " attempts: " + last_error);
}

std::string to_string(GridSize s) { return std::to_string(s.p) + "x" + std::to_string(s.q); }

std::vector<GridSize> parse_sizes(std::string_view csv) {
  std::vector<GridSize> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string_view::npos) comma = csv.size();
    std::string tok(csv.substr(pos, comma - pos));
    std::size_t x = tok.find('x');
    try {
      if (x == std::string::npos) throw std::invalid_argument(tok);
      std::size_t used1 = 0, used2 = 0;
      GridSize s{std::stoi(tok.substr(0, x), &used1), std::stoi(tok.substr(x + 1), &used2)};
      if (used1 != x || used2 != tok.size() - x - 1) throw std::invalid_argument(tok);
      out.push_back(s);
    } catch (const std::logic_error&) {
      throw UsageError("bad size '" + tok + "', expected PxQ such as 2x3");
    }
    pos = comma + 1;
  }
  return out;
}

std::uint64_t triplet_seed(std::uint64_t batch_seed, GridSize size, int index) {
  return mix_seed(mix_seed(batch_seed, static_cast<std::uint64_t>(size.p * 1000 + size.q)),
                  static_cast<std::uint64_t>(index));
}

namespace {

struct Task {
  GridSize size;
  int index;
  std::string bp;
};

std::string triplet_id(GridSize s, int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", index);
  return to_string(s) + "-" + buf;
}

PuzzleTriplet run_task(const Catalog& catalog, const BatchRequest& req, const Task& t) {
  PuzzleTriplet out =
      build_triplet(catalog, t.size.p, t.size.q, triplet_seed(req.seed, t.size, t.index), t.bp, req.options);
  out.id = triplet_id(t.size, t.index);
  return out;
}

}  // namespace

std::vector<PuzzleTriplet> generate_batch(const Catalog& catalog, const BatchRequest& req, Exec exec) {
  for (const auto& s : req.sizes) check_shape(catalog, s.p, s.q);
  auto bps = catalog.in_group(Group::bias_probing);
  std::vector<Task> tasks;
  for (const auto& s : req.sizes)
    for (int i = 0; i < req.per_size; ++i) tasks.push_back({s, i, bps[static_cast<std::size_t>(i) % bps.size()]->name});

  std::vector<PuzzleTriplet> out(tasks.size());
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < tasks.size(); ++i) out[i] = run_task(catalog, req, tasks[i]);
    return out;
  }

  std::vector<std::exception_ptr> errors(tasks.size());
  const long n = static_cast<long>(tasks.size());
  const int threads = req.threads > 0 ? req.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = run_task(catalog, req, tasks[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace prime
