// prime: catalog -> generate -> render/solve -> eval -> report.
//
// Exit codes: 0 ok, 1 data or verification error, 2 usage, 3 transport.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "prime/catalog.hpp"
#include "prime/error.hpp"
#include "prime/generator.hpp"
#include "prime/harness.hpp"
#include "prime/probes.hpp"
#include "prime/puzzle_io.hpp"
#include "prime/render.hpp"
#include "prime/report.hpp"
#include "prime/resources.hpp"
#include "prime/solver.hpp"

namespace {

using namespace prime;

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTransport = 3;

struct TransportFailure : Error {
  using Error::Error;
};

// JSON config: top-level scalars apply to every subcommand that has an
// option of that name; objects named after a subcommand apply to it alone.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::vector<std::string> subcommands) : subcommands_(std::move(subcommands)) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config: top level must be an object");
    std::vector<CLI::ConfigItem> out;
    for (const auto& [key, val] : j.items()) {
      if (val.is_object()) {
        for (const auto& [k, v] : val.items()) out.push_back(item({key}, k, v));
      } else {
        for (const auto& sub : subcommands_) out.push_back(item({sub}, key, val));
      }
    }
    return out;
  }

 private:
  static CLI::ConfigItem item(std::vector<std::string> parents, const std::string& name, const nlohmann::json& v) {
    CLI::ConfigItem it;
    it.parents = std::move(parents);
    it.name = name;
    auto scalar = [](const nlohmann::json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
    if (v.is_array()) {
      for (const auto& x : v) it.inputs.push_back(scalar(x));
    } else {
      it.inputs.push_back(scalar(v));
    }
    return it;
  }

  std::vector<std::string> subcommands_;
};

Catalog catalog_from(const std::string& path) { return path.empty() ? load_seed_catalog() : load_catalog(path); }

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');)
    if (!part.empty()) out.push_back(part);
  return out;
}

void print_grid(const SolutionGrid& g) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (int r = 0; r < g.p(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (int c = 1; c < g.q(); ++c) row[g.columns[c].name] = g.at(r, c);
    j[g.at(r, 0)] = row;
  }
  std::cout << j.dump(2) << "\n";
}

std::shared_ptr<ChatClient> make_client(const std::string& model, const std::string& base_url, double rps,
                                        int max_retries, int timeout_s, double temperature) {
  ModelEndpoint ep = endpoint_from_env(model, base_url);
  ep.rate_limit = rps;
  ep.max_retries = max_retries;
  ep.timeout = std::chrono::seconds(timeout_s);
  ep.temperature = temperature;
  std::shared_ptr<RateLimiter> limiter = rps > 0 ? std::make_shared<RateLimiter>(rps) : nullptr;
  return std::make_shared<ChatClient>(ep, std::shared_ptr<Transport>(make_http_transport(ep.base_url)),
                                      real_sleeper(), limiter);
}

void write_out(const std::string& dir, const std::string& name, const std::string& content) {
  if (dir.empty()) return;
  write_file_atomic((std::filesystem::path(dir) / name).string(), content);
}

// --- subcommands -----------------------------------------------------------

struct CatalogArgs {
  std::string catalog, export_path;
};

int cmd_catalog(const CatalogArgs& a) {
  Catalog c;
  if (a.catalog.empty()) {
    c = load_seed_catalog();
  } else {
    c = load_catalog(a.catalog);  // throws ValidationError with every issue listed
  }
  std::cout << "categories: " << c.categories.size() << "\n";
  for (Group g : {Group::names, Group::bias_probing, Group::general}) {
    auto cats = c.in_group(g);
    std::size_t items = 0;
    for (const auto* cat : cats) items += cat->items.size();
    std::cout << "  " << to_string(g) << ": " << cats.size() << " categories, " << items << " items\n";
  }
  for (const auto* bp : c.in_group(Group::bias_probing))
    std::cout << "  bias-probing " << bp->name << ": " << bp->with_gender(Gender::man).size() << " man / "
              << bp->with_gender(Gender::woman).size() << " woman\n";
  if (!a.export_path.empty()) {
    write_file_atomic(a.export_path, a.catalog.empty() ? std::string(resource("data/seed_catalog.json"))
                                                       : read_file(a.catalog));
    std::cout << "wrote " << a.export_path << "\n";
  }
  return 0;
}

struct GenerateArgs {
  std::string catalog, sizes = "2x3,2x4,4x3,4x4", out;
  int per_size = 4;
  std::uint64_t seed = 0;
  int workers = 0;
  bool serial = false;
  int max_retries = 8;
  std::size_t start_n = 10;
};

int cmd_generate(const GenerateArgs& a) {
  Catalog catalog = catalog_from(a.catalog);
  BatchRequest req;
  req.sizes = parse_sizes(a.sizes);
  req.per_size = a.per_size;
  req.seed = a.seed;
  req.threads = a.workers;
  req.options.max_retries = a.max_retries;
  req.options.start_n = a.start_n;
  auto t0 = std::chrono::steady_clock::now();
  auto triplets = generate_batch(catalog, req, a.serial ? Exec::serial : Exec::parallel);
  for (auto& t : triplets) render_english(t, catalog.phrases);
  save_puzzle_set(triplets, a.out);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  for (const auto& size : req.sizes) {
    std::map<std::string, int> per_cat;
    std::size_t clues = 0, n = 0;
    for (const auto& t : triplets)
      if (t.p == size.p && t.q == size.q) {
        ++per_cat[t.bp_category];
        clues += t.generic.clues.size();
        ++n;
      }
    int lo = n ? INT32_MAX : 0, hi = 0;
    for (auto& [k, v] : per_cat) lo = std::min(lo, v), hi = std::max(hi, v);
    std::printf("%s: %zu triplets, %zu puzzles, mean clues %.2f, per-category %d..%d over %zu categories\n",
                to_string(size).c_str(), n, 3 * n, n ? static_cast<double>(clues) / n : 0.0, lo, hi, per_cat.size());
  }
  std::printf("total: %zu triplets, %zu puzzles in %.1fs -> %s\n", triplets.size(), 3 * triplets.size(), secs,
              a.out.c_str());
  return 0;
}

struct RenderArgs {
  std::string puzzles, id, mode = "base", out, translate_model, base_url;
  std::optional<std::uint64_t> shuffle;
};

int cmd_render(const RenderArgs& a) {
  auto triplets = load_puzzle_set(a.puzzles);
  if (!a.translate_model.empty()) {
    if (a.out.empty()) throw UsageError("--translate-clues needs --out for the re-rendered puzzle set");
    auto client = make_client(a.translate_model, a.base_url, 0, 4, 120, 0.0);
    for (auto& t : triplets)
      for (Variant v : kAllVariants)
        for (auto& c : t.variant(v).clues) c.english = translate_clue(c, *client);
    save_puzzle_set(triplets, a.out);
    std::cout << "wrote " << a.out << "\n";
    return 0;
  }
  PromptMode mode = parse_prompt_mode(a.mode);
  bool found = false;
  for (const auto& t : triplets)
    for (Variant v : kAllVariants) {
      std::string pid = puzzle_id(t, v);
      if (!a.id.empty() && pid != a.id && t.id != a.id) continue;
      found = true;
      std::string prompt = build_puzzle_prompt(t.variant(v), mode, a.shuffle);
      if (!a.out.empty()) {
        write_out(a.out, pid + "-" + std::string(to_string(mode)) + ".txt", prompt);
      } else {
        std::cout << "===== " << pid << " (" << to_string(mode) << ") =====\n" << prompt << "\n";
      }
    }
  if (!found) throw UsageError("no puzzle with id '" + a.id + "'");
  return 0;
}

int cmd_solve(const std::string& path) {
  auto triplets = load_puzzle_set(path);
  int bad = 0, total = 0;
  for (const auto& t : triplets)
    for (Variant v : kAllVariants) {
      const Puzzle& pz = t.variant(v);
      SolveOutcome o = solve_unique(puzzle_domain(pz.grid), pz.clues);
      ++total;
      const std::string pid = puzzle_id(t, v);
      switch (o.status) {
        case SolveOutcome::Status::unique: {
          bool match = *o.grid == pz.grid;
          std::cout << pid << ": unique, " << (match ? "matches stored grid" : "DIFFERS from stored grid")
                    << " (" << o.stats.nodes << " nodes)\n";
          print_grid(*o.grid);
          bad += !match;
          break;
        }
        case SolveOutcome::Status::not_unique:
          std::cout << pid << ": AMBIGUOUS, two solutions:\n";
          print_grid(o.witness->first);
          print_grid(o.witness->second);
          ++bad;
          break;
        case SolveOutcome::Status::unsat:
          std::cout << pid << ": UNSATISFIABLE\n";
          ++bad;
          break;
      }
    }
  std::cout << total - bad << "/" << total << " puzzles uniquely solved to their stored grid\n";
  if (bad) throw VerificationError(std::to_string(bad) + " puzzle(s) failed verification");
  return 0;
}

struct EvalArgs {
  std::string puzzles, modes = "base", variants = "G,S,AS", model, mock, base_url, out, denominator = "incorrect";
  std::uint64_t mock_seed = 0;
  int workers = 4, max_retries = 4, timeout_s = 120;
  double rate_limit = 0, temperature = 0;
  bool no_resume = false;
  std::optional<std::uint64_t> shuffle;
};

int cmd_eval(const EvalArgs& a) {
  if (a.model.empty() == a.mock.empty()) throw UsageError("give exactly one of --model or --mock");
  auto triplets = load_puzzle_set(a.puzzles);
  EvalOptions opts;
  opts.modes.clear();
  for (const auto& m : split_csv(a.modes)) opts.modes.push_back(parse_prompt_mode(m));
  opts.variants.clear();
  for (const auto& v : split_csv(a.variants)) opts.variants.push_back(parse_variant(v));
  opts.workers = a.workers;
  opts.resume = !a.no_resume;
  opts.shuffle_seed = a.shuffle;
  if (a.denominator == "all") opts.denominator = BiasDenominator::all_cells;
  else if (a.denominator != "incorrect") throw UsageError("--bias-denominator must be incorrect or all");

  std::unique_ptr<SolverBackend> backend;
  if (!a.mock.empty()) {
    backend = std::make_unique<MockBackend>(parse_mock_policy(a.mock), a.mock_seed);
  } else {
    auto client = make_client(a.model, a.base_url, a.rate_limit, a.max_retries, a.timeout_s, a.temperature);
    backend = std::make_unique<EndpointBackend>(client, a.model);
  }
  RunSummary s = run_evaluation(triplets, *backend, opts, a.out);
  std::printf("planned %zu, skipped %zu (already present), executed %zu, exact %zu, failed %zu -> %s\n", s.planned,
              s.skipped, s.executed, s.exact, s.failed, a.out.c_str());
  for (const auto& [kind, n] : s.failures_by_kind) std::printf("  %s: %zu\n", kind.c_str(), n);
  if (!s.complete())
    throw TransportFailure("run incomplete: " + std::to_string(s.failed) + " request(s) failed; rerun to resume");
  return 0;
}

struct ProbeArgs {
  std::string kind = "explicit", model, mock, base_url, category, out, catalog;
  std::uint64_t mock_seed = 0;
  double rate_limit = 0;
  int max_retries = 4, timeout_s = 120;
};

int cmd_probe(const ProbeArgs& a) {
  if (a.model.empty() == a.mock.empty()) throw UsageError("give exactly one of --model or --mock");
  Catalog catalog = catalog_from(a.catalog);
  std::shared_ptr<ChatClient> client;
  if (!a.model.empty()) client = make_client(a.model, a.base_url, a.rate_limit, a.max_retries, a.timeout_s, 0.0);
  const std::string model_id = a.model.empty() ? "mock:" + a.mock : a.model;
  std::string lines;

  if (a.kind == "explicit") {
    auto respond = client ? explicit_responder(*client) : mock_explicit_responder(parse_mock_policy(a.mock), a.mock_seed);
    std::optional<std::string> cat;
    if (!a.category.empty()) cat = a.category;
    auto records = run_explicit_bias(catalog, respond, default_refusal_lexicon(), cat);
    std::size_t failed = 0;
    for (const auto& r : records) {
      lines += explicit_record_to_json(r).dump() + "\n";
      failed += r.failure != FailureKind::none;
    }
    std::cout << rate_table_markdown(explicit_rate_table(records));
    if (!a.out.empty()) write_file_atomic(a.out, lines);
    if (failed) throw TransportFailure(std::to_string(failed) + " probe request(s) failed");
    return 0;
  }
  if (a.kind == "names") {
    auto respond = client ? name_responder(*client)
                          : mock_name_responder(parse_mock_policy(a.mock), catalog, a.mock_seed);
    std::vector<std::pair<std::string, Gender>> names;
    for (const auto* cat : catalog.in_group(Group::names))
      for (const auto& it : cat->items) names.emplace_back(it.label, *it.gender);
    auto records = classify_gender_names(names, respond);
    for (const auto& r : records) lines += name_record_to_json(r).dump() + "\n";
    std::cout << name_accuracy_markdown(model_id, name_accuracy_table(records));
    if (!a.out.empty()) write_file_atomic(a.out, lines);
    return 0;
  }
  throw UsageError("--kind must be explicit or names");
}

struct ReportArgs {
  std::string runs, kind = "deltas", out;
  std::size_t min_pairs = 24;
  int min_p = 4;
};

int cmd_report(const ReportArgs& a) {
  auto paths = split_csv(a.runs);
  if (paths.empty()) throw UsageError("--runs needs at least one file");
  if (!a.out.empty()) std::filesystem::create_directories(a.out);
  std::vector<std::vector<RunRecord>> runs;
  for (const auto& p : paths) runs.push_back(load_run(p));
  std::vector<RunRecord> pooled;
  for (const auto& r : runs) pooled.insert(pooled.end(), r.begin(), r.end());

  if (a.kind == "deltas") {
    DeltaReport r = aggregate_deltas(pooled);
    write_out(a.out, "deltas.csv", deltas_csv(r));
    write_out(a.out, "deltas.md", deltas_markdown(r));
    std::cout << deltas_markdown(r);
  } else if (a.kind == "categories") {
    auto rows = per_category_deltas(pooled, a.min_pairs);
    write_out(a.out, "categories.csv", categories_csv(rows));
    std::cout << categories_csv(rows);
  } else if (a.kind == "scatter") {
    ScatterReport r = error_scatter(pooled, a.min_p);
    write_out(a.out, "scatter_points.csv", scatter_csv(r));
    write_out(a.out, "scatter_means.csv", scatter_means_csv(r));
    if (r.empty()) std::cout << "no erroneous S/AS records at p >= " << a.min_p << "; scatter set is empty\n";
    std::cout << scatter_means_csv(r);
  } else if (a.kind == "compare") {
    if (runs.size() != 2) throw UsageError("--kind compare needs exactly two runs: --runs a.jsonl,b.jsonl");
    CompareReport r = compare_runs(runs[0], runs[1]);
    write_out(a.out, "compare.csv", compare_csv(r));
    std::cout << compare_csv(r);
    if (!r.only_a.empty() || !r.only_b.empty())
      std::cout << "coverage mismatch: " << r.only_a.size() << " triplet(s) only in A, " << r.only_b.size()
                << " only in B\n";
  } else if (a.kind == "accuracy") {
    auto rows = accuracy_table(pooled);
    write_out(a.out, "accuracy.csv", accuracy_csv(rows));
    std::cout << accuracy_csv(rows);
  } else {
    throw UsageError("--kind must be deltas, categories, scatter, compare or accuracy");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gender-bias logic grid puzzles: generate, solve, evaluate, report"};
  app.require_subcommand(1);
  const std::vector<std::string> names{"catalog", "generate", "render", "solve", "eval", "probe", "report"};
  app.set_config("--config", "", "JSON config; command-line flags override it");
  app.config_formatter(std::make_shared<JsonConfig>(names));
  app.allow_config_extras(CLI::config_extras_mode::ignore);

  CatalogArgs ca;
  auto* c_catalog = app.add_subcommand("catalog", "Validate and summarize a category catalog");
  c_catalog->add_option("--catalog", ca.catalog, "Catalog JSON (default: the built-in seed catalog)");
  c_catalog->add_option("--export", ca.export_path, "Write the catalog JSON to this path");

  GenerateArgs ga;
  ga.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* c_gen = app.add_subcommand("generate", "Generate G/S/AS puzzle triplets");
  c_gen->add_option("--catalog", ga.catalog, "Catalog JSON (default: built-in)");
  c_gen->add_option("--sizes", ga.sizes, "Comma-separated PxQ sizes")->capture_default_str();
  c_gen->add_option("--per-size", ga.per_size, "Triplets per size")->capture_default_str();
  c_gen->add_option("--seed", ga.seed, "Batch seed")->capture_default_str();
  c_gen->add_option("--workers", ga.workers, "OpenMP threads")->capture_default_str();
  c_gen->add_flag("--serial", ga.serial, "Use the single-threaded reference path");
  c_gen->add_option("--max-retries", ga.max_retries, "Sub-seed retries per triplet")->capture_default_str();
  c_gen->add_option("--start-n", ga.start_n, "Initial clue subset size")->capture_default_str();
  c_gen->add_option("--out", ga.out, "Output puzzle set")->required();

  RenderArgs ra;
  auto* c_render = app.add_subcommand("render", "Print solve prompts or re-render clue text");
  c_render->add_option("puzzles", ra.puzzles, "Puzzle set")->required();
  c_render->add_option("--id", ra.id, "Triplet or puzzle id (default: all)");
  c_render->add_option("--mode", ra.mode, "base, cot or debias")->capture_default_str();
  c_render->add_option("--shuffle-clues", ra.shuffle, "Permute clue order with this seed");
  c_render->add_option("--out", ra.out, "Directory for prompt files, or the output set with --translate-clues");
  c_render->add_option("--translate-clues", ra.translate_model, "Re-render clue English with this model");
  c_render->add_option("--base-url", ra.base_url, "Endpoint base URL (default: $PRIME_BASE_URL)");

  std::string solve_path;
  auto* c_solve = app.add_subcommand("solve", "Solve every puzzle in a set and check uniqueness");
  c_solve->add_option("puzzles", solve_path, "Puzzle set")->required();

  EvalArgs ea;
  auto* c_eval = app.add_subcommand("eval", "Run a model or mock solver over a puzzle set");
  c_eval->add_option("--puzzles", ea.puzzles, "Puzzle set")->required();
  c_eval->add_option("--mode", ea.modes, "Comma-separated prompt modes: base, cot, debias")->capture_default_str();
  c_eval->add_option("--variants", ea.variants, "Comma-separated variants")->capture_default_str();
  c_eval->add_option("--model", ea.model, "Model id at the endpoint");
  c_eval->add_option("--mock", ea.mock, "oracle, stereotype, anti_stereotype or uniform_random");
  c_eval->add_option("--mock-seed", ea.mock_seed, "Seed for uniform_random")->capture_default_str();
  c_eval->add_option("--base-url", ea.base_url, "Endpoint base URL (default: $PRIME_BASE_URL)");
  c_eval->add_option("--workers", ea.workers, "Concurrent requests")->capture_default_str();
  c_eval->add_option("--rate-limit", ea.rate_limit, "Requests per second, 0 = unlimited")->capture_default_str();
  c_eval->add_option("--max-retries", ea.max_retries, "Retries on 429/5xx/timeouts")->capture_default_str();
  c_eval->add_option("--timeout", ea.timeout_s, "Request timeout in seconds")->capture_default_str();
  c_eval->add_option("--temperature", ea.temperature, "Sampling temperature")->capture_default_str();
  c_eval->add_option("--shuffle-clues", ea.shuffle, "Permute clue order with this seed");
  c_eval->add_option("--bias-denominator", ea.denominator, "incorrect or all")->capture_default_str();
  c_eval->add_flag("--no-resume", ea.no_resume, "Start the results file from scratch");
  c_eval->add_option("--out", ea.out, "Results file (JSON lines)")->required();

  ProbeArgs pa;
  auto* c_probe = app.add_subcommand("probe", "Explicit-bias or name-gender probes");
  c_probe->add_option("--kind", pa.kind, "explicit or names")->capture_default_str();
  c_probe->add_option("--catalog", pa.catalog, "Catalog JSON (default: built-in)");
  c_probe->add_option("--category", pa.category, "Restrict explicit probes to one category");
  c_probe->add_option("--model", pa.model, "Model id at the endpoint");
  c_probe->add_option("--mock", pa.mock, "oracle, stereotype, anti_stereotype or uniform_random");
  c_probe->add_option("--mock-seed", pa.mock_seed, "Seed for uniform_random")->capture_default_str();
  c_probe->add_option("--base-url", pa.base_url, "Endpoint base URL (default: $PRIME_BASE_URL)");
  c_probe->add_option("--rate-limit", pa.rate_limit, "Requests per second")->capture_default_str();
  c_probe->add_option("--max-retries", pa.max_retries, "Retries on 429/5xx/timeouts")->capture_default_str();
  c_probe->add_option("--timeout", pa.timeout_s, "Request timeout in seconds")->capture_default_str();
  c_probe->add_option("--out", pa.out, "Per-prompt records (JSON lines)");

  ReportArgs rpa;
  auto* c_report = app.add_subcommand("report", "Aggregate run files into tables");
  c_report->add_option("--runs", rpa.runs, "Comma-separated run files")->required();
  c_report->add_option("--kind", rpa.kind, "deltas, categories, scatter, compare or accuracy")->capture_default_str();
  c_report->add_option("--out", rpa.out, "Directory for CSV/markdown output");
  c_report->add_option("--min-pairs", rpa.min_pairs, "Flag categories below this pair count")->capture_default_str();
  c_report->add_option("--min-p", rpa.min_p, "Smallest row count in the scatter set")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*c_catalog) return cmd_catalog(ca);
    if (*c_gen) return cmd_generate(ga);
    if (*c_render) return cmd_render(ra);
    if (*c_solve) return cmd_solve(solve_path);
    if (*c_eval) return cmd_eval(ea);
    if (*c_probe) return cmd_probe(pa);
    if (*c_report) return cmd_report(rpa);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TransportFailure& e) {
    std::cerr << "transport: " << e.what() << "\n";
    return kExitTransport;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
