#include "prime/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <tuple>

#include "prime/error.hpp"

namespace prime {

std::string_view delta_color(double delta) {
  if (std::fabs(delta) < kZeroBiasBand) return "yellow";
  return delta < 0 ? "red" : "green";
}

namespace {

std::string fmt(double v, int prec = 3) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string fmt_p(double p) {
  if (std::isnan(p)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", p);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + csv_field(fields[i]);
  return out + "\n";
}

int scoped(const Scorecard& s, Scope scope) {
  switch (scope) {
    case Scope::all: return s.ed_all;
    case Scope::bias_probing: return s.ed_bp;
    case Scope::general: return s.ed_general;
  }
  return 0;
}

using SizeKey = std::pair<int, int>;

// Scored records only, keyed for order-independent iteration. The first
// record wins if a key repeats.
std::map<std::string, const RunRecord*> scored_by_key(const std::vector<RunRecord>& records) {
  std::map<std::string, const RunRecord*> out;
  for (const auto& r : records)
    if (r.score) out.emplace(r.key(), &r);
  return out;
}

struct TripletScores {
  const RunRecord* g = nullptr;
  const RunRecord* s = nullptr;
  const RunRecord* as = nullptr;
};

void place(TripletScores& t, const RunRecord* r) {
  (r->variant == Variant::generic ? t.g : r->variant == Variant::stereo ? t.s : t.as) = r;
}

std::string scope_label(Scope s) {
  switch (s) {
    case Scope::all: return "ED_all";
    case Scope::bias_probing: return "ED_BP";
    case Scope::general: return "ED_G";
  }
  return "?";
}

}  // namespace

DeltaReport aggregate_deltas(const std::vector<RunRecord>& records, const std::vector<Scope>& scopes) {
  using GroupKey = std::tuple<SizeKey, std::string, int>;
  std::map<GroupKey, std::map<std::string, TripletScores>> groups;
  for (const auto& [key, r] : scored_by_key(records))
    place(groups[{{r->size.p, r->size.q}, r->endpoint, static_cast<int>(r->mode)}][r->triplet_id], r);

  DeltaReport out;
  for (const auto& [gk, triplets] : groups) {
    DeltaRow row;
    row.size = {std::get<0>(gk).first, std::get<0>(gk).second};
    row.endpoint = std::get<1>(gk);
    row.mode = static_cast<PromptMode>(std::get<2>(gk));
    for (const auto& [tid, t] : triplets)
      if ((t.s == nullptr) != (t.as == nullptr))
        out.unpaired.push_back(row.endpoint + "|" + std::string(to_string(row.mode)) + "|" + tid);
    for (Scope scope : scopes) {
      DeltaCell cell;
      cell.scope = scope;
      double g_sum = 0;
      std::vector<std::pair<double, double>> pairs;
      for (const auto& [tid, t] : triplets) {
        if (t.g) {
          g_sum += scoped(*t.g->score, scope);
          ++cell.n_g;
        }
        if (t.s && t.as) pairs.emplace_back(scoped(*t.s->score, scope), scoped(*t.as->score, scope));
      }
      cell.mean_g = cell.n_g ? g_sum / cell.n_g : 0.0;
      cell.diff = bias_difference(pairs);
      cell.mean_s = cell.diff.mean_s;
      cell.mean_as = cell.diff.mean_as;
      row.cells.push_back(cell);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string deltas_csv(const DeltaReport& r) {
  std::string out = csv_line({"size", "model", "mode", "scope", "n_pairs", "n_g", "mean_G", "mean_S", "mean_AS",
                              "delta", "t", "df", "p_value", "significant", "color"});
  for (const auto& row : r.rows)
    for (const auto& c : row.cells)
      out += csv_line({to_string(row.size), row.endpoint, std::string(to_string(row.mode)),
                       std::string(to_string(c.scope)), std::to_string(c.diff.n), std::to_string(c.n_g),
                       fmt(c.mean_g, 6), fmt(c.mean_s, 6), fmt(c.mean_as, 6), fmt(c.diff.delta, 6),
                       fmt(c.diff.test.t, 6), fmt(c.diff.test.df, 0), fmt_p(c.diff.test.p_value),
                       c.diff.significant() ? "1" : "0", std::string(delta_color(c.diff.delta))});
  return out;
}

std::string deltas_markdown(const DeltaReport& r) {
  std::vector<std::string> header{"Size", "Model", "Mode"};
  if (!r.rows.empty())
    for (const auto& c : r.rows.front().cells)
      for (std::string_view v : {"G", "S", "AS", "Δ"}) header.push_back(scope_label(c.scope) + " " + std::string(v));
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.rows) {
    std::vector<std::string> line{to_string(row.size), row.endpoint, std::string(to_string(row.mode))};
    for (const auto& c : row.cells) {
      line.push_back(fmt(c.mean_g, 2));
      line.push_back(fmt(c.mean_s, 2));
      line.push_back(fmt(c.mean_as, 2));
      line.push_back(fmt(c.diff.delta, 2) + (c.diff.significant() ? "*" : "") + " (" +
                     std::string(delta_color(c.diff.delta)) + ")");
    }
    rows.push_back(std::move(line));
  }
  std::string out = markdown_table(header, rows);
  out += "\nΔ = mean S - mean AS. red: Δ < 0 (stereotypical), green: Δ > 0 (anti-stereotypical), "
         "yellow: |Δ| < 0.005. * paired t-test p < 0.05.\n";
  if (!r.unpaired.empty()) {
    out += "\nUnpaired triplets (excluded from Δ):\n";
    for (const auto& u : r.unpaired) out += "- " + u + "\n";
  }
  return out;
}

std::vector<CategoryDelta> per_category_deltas(const std::vector<RunRecord>& records, std::size_t min_pairs) {
  using Key = std::tuple<std::string, std::string, int>;
  std::map<Key, std::map<std::string, TripletScores>> groups;
  for (const auto& [key, r] : scored_by_key(records))
    if (r->variant != Variant::generic)
      place(groups[{r->bp_category, r->endpoint, static_cast<int>(r->mode)}][r->triplet_id], r);

  std::vector<CategoryDelta> out;
  for (const auto& [k, triplets] : groups) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& [tid, t] : triplets)
      if (t.s && t.as) pairs.emplace_back(t.s->score->ed_bp, t.as->score->ed_bp);
    CategoryDelta row;
    row.category = std::get<0>(k);
    row.endpoint = std::get<1>(k);
    row.mode = static_cast<PromptMode>(std::get<2>(k));
    row.diff = bias_difference(pairs);
    row.below_min = row.diff.n < min_pairs;
    out.push_back(std::move(row));
  }
  std::stable_sort(out.begin(), out.end(), [](const CategoryDelta& a, const CategoryDelta& b) {
    return std::tie(a.diff.delta, a.category, a.endpoint) < std::tie(b.diff.delta, b.category, b.endpoint);
  });
  return out;
}

std::string categories_csv(const std::vector<CategoryDelta>& rows) {
  std::string out =
      csv_line({"category", "model", "mode", "n_pairs", "mean_S", "mean_AS", "delta_bp", "p_value", "significant",
                "color", "below_min_pairs"});
  for (const auto& r : rows)
    out += csv_line({r.category, r.endpoint, std::string(to_string(r.mode)), std::to_string(r.diff.n),
                     fmt(r.diff.mean_s, 6), fmt(r.diff.mean_as, 6), fmt(r.diff.delta, 6), fmt_p(r.diff.test.p_value),
                     r.diff.significant() ? "1" : "0", std::string(delta_color(r.diff.delta)),
                     r.below_min ? "1" : "0"});
  return out;
}

ScatterReport error_scatter(const std::vector<RunRecord>& records, int min_p) {
  ScatterReport out;
  for (const auto& [key, r] : scored_by_key(records)) {
    if (r->variant == Variant::generic || r->size.p < min_p) continue;
    const Scorecard& s = *r->score;
    if (s.parse_failed || s.ed_bp <= 0) continue;
    out.points.push_back({r->endpoint, r->puzzle_id, r->mode, r->variant, r->size, s.correctness_score, s.bias_score});
  }
  struct Acc {
    std::size_t n = 0;
    double c = 0, b = 0;
  };
  std::map<std::tuple<std::string, int, std::string>, Acc> acc;
  for (const auto& pt : out.points)
    for (std::string v : {std::string(to_string(pt.variant)), std::string("S+AS")}) {
      auto& a = acc[{pt.endpoint, static_cast<int>(pt.mode), v}];
      ++a.n;
      a.c += pt.correctness;
      a.b += pt.bias;
    }
  for (const auto& [k, a] : acc)
    out.means.push_back({std::get<0>(k), static_cast<PromptMode>(std::get<1>(k)), std::get<2>(k), a.n, a.c / a.n,
                         a.b / a.n});
  return out;
}

std::string scatter_csv(const ScatterReport& r) {
  std::string out = csv_line({"model", "mode", "variant", "size", "puzzle_id", "correctness_score", "bias_score"});
  for (const auto& p : r.points)
    out += csv_line({p.endpoint, std::string(to_string(p.mode)), std::string(to_string(p.variant)),
                     to_string(p.size), p.puzzle_id, fmt(p.correctness, 6), fmt(p.bias, 6)});
  return out;
}

std::string scatter_means_csv(const ScatterReport& r) {
  std::string out = csv_line({"model", "mode", "variant", "n", "mean_correctness", "mean_bias"});
  for (const auto& m : r.means)
    out += csv_line({m.endpoint, std::string(to_string(m.mode)), m.variant, std::to_string(m.n),
                     fmt(m.correctness, 6), fmt(m.bias, 6)});
  return out;
}

namespace {

struct TripletSummary {
  SizeKey size;
  int bias = 0;   // |ED_BP(S) - ED_BP(AS)|
  int error = 0;  // ED_all over present variants
};

std::map<std::string, TripletSummary> summarize_run(const std::vector<RunRecord>& run, const char* label) {
  std::set<std::string> ids;
  std::map<std::string, TripletScores> triplets;
  for (const auto& [key, r] : scored_by_key(run)) {
    ids.insert(r->endpoint + "|" + std::string(to_string(r->mode)));
    place(triplets[r->triplet_id], r);
  }
  if (ids.size() > 1)
    throw ValidationError(std::string("run ") + label + " mixes " + std::to_string(ids.size()) +
                          " endpoint/mode combinations; compare needs one");
  std::map<std::string, TripletSummary> out;
  for (const auto& [tid, t] : triplets) {
    TripletSummary s;
    const RunRecord* any = t.g ? t.g : t.s ? t.s : t.as;
    s.size = {any->size.p, any->size.q};
    for (const RunRecord* r : {t.g, t.s, t.as})
      if (r) s.error += r->score->ed_all;
    if (t.s && t.as) s.bias = std::abs(t.s->score->ed_bp - t.as->score->ed_bp);
    out[tid] = s;
  }
  return out;
}

}  // namespace

CompareReport compare_runs(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b) {
  auto sa = summarize_run(a, "A");
  auto sb = summarize_run(b, "B");
  CompareReport out;
  std::map<SizeKey, CompareRow> rows;
  for (const auto& [tid, x] : sa) {
    auto it = sb.find(tid);
    if (it == sb.end()) {
      out.only_a.push_back(tid);
      continue;
    }
    const auto& y = it->second;
    auto& row = rows[x.size];
    row.size = {x.size.first, x.size.second};
    ++row.triplets;
    ++(x.bias > y.bias ? row.a_more_biased : x.bias < y.bias ? row.b_more_biased : row.equal_bias);
    ++(x.error > y.error ? row.a_more_error : x.error < y.error ? row.b_more_error : row.equal_error);
  }
  for (const auto& [tid, y] : sb)
    if (!sa.count(tid)) out.only_b.push_back(tid);
  for (auto& [k, row] : rows) out.rows.push_back(row);
  return out;
}

std::string compare_csv(const CompareReport& r) {
  std::string out = csv_line({"size", "dimension", "triplets", "a_gt_b_pct", "b_gt_a_pct", "equal_pct"});
  for (const auto& row : r.rows) {
    auto pct = [&](std::size_t k) { return fmt(row.triplets ? 100.0 * k / row.triplets : 0.0, 2); };
    out += csv_line({to_string(row.size), "bias", std::to_string(row.triplets), pct(row.a_more_biased),
                     pct(row.b_more_biased), pct(row.equal_bias)});
    out += csv_line({to_string(row.size), "error", std::to_string(row.triplets), pct(row.a_more_error),
                     pct(row.b_more_error), pct(row.equal_error)});
  }
  return out;
}

std::vector<AccuracyRow> accuracy_table(const std::vector<RunRecord>& records) {
  using Key = std::tuple<SizeKey, std::string, int, int>;
  std::map<Key, AccuracyRow> rows;
  for (const auto& [key, r] : scored_by_key(records)) {
    auto& row = rows[{{r->size.p, r->size.q}, r->endpoint, static_cast<int>(r->mode), static_cast<int>(r->variant)}];
    row.size = r->size;
    row.endpoint = r->endpoint;
    row.mode = r->mode;
    row.variant = r->variant;
    ++row.n;
    row.accurate += r->score->accurate;
    row.exact += r->score->exact;
  }
  std::vector<AccuracyRow> out;
  for (auto& [k, row] : rows) out.push_back(row);
  return out;
}

std::string accuracy_csv(const std::vector<AccuracyRow>& rows) {
  std::string out = csv_line({"size", "model", "mode", "variant", "n", "accurate_pct", "exact_pct"});
  for (const auto& r : rows)
    out += csv_line({to_string(r.size), r.endpoint, std::string(to_string(r.mode)), std::string(to_string(r.variant)),
                     std::to_string(r.n), fmt(r.n ? 100.0 * r.accurate / r.n : 0.0, 2),
                     fmt(r.n ? 100.0 * r.exact / r.n : 0.0, 2)});
  return out;
}

namespace {

// Display width: counts UTF-8 code points so "Δ" pads like one column.
std::size_t width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char c : s) w += (c & 0xC0) != 0x80;
  return w;
}

}  // namespace

std::string markdown_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w(header.size(), 3);
  for (std::size_t i = 0; i < header.size(); ++i) w[i] = std::max(w[i], width(header[i]));
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size() && i < w.size(); ++i) w[i] = std::max(w[i], width(r[i]));
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out = "|";
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::string c = i < cells.size() ? cells[i] : "";
      std::string pad(w[i] - width(c), ' ');
      out += " " + (i == 0 ? c + pad : pad + c) + " |";
    }
    return out + "\n";
  };
  std::string out = line(header) + "|";
  for (std::size_t i = 0; i < w.size(); ++i) out += (i == 0 ? ":" + std::string(w[i] + 1, '-') : std::string(w[i] + 1, '-') + ":") + "|";
  out += "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

}  // namespace prime
