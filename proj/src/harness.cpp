#include "prime/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <set>
#include <fstream>
#include <thread>

#include "prime/error.hpp"
#include "prime/puzzle_io.hpp"
#include "prime/rng.hpp"

namespace prime {

using nlohmann::json;

std::string_view to_string(FailureKind k) {
  switch (k) {
    case FailureKind::none: return "none";
    case FailureKind::auth: return "auth";
    case FailureKind::exhausted: return "exhausted";
    case FailureKind::timeout: return "timeout";
    case FailureKind::http: return "http";
    case FailureKind::bad_response: return "bad_response";
  }
  return "?";
}

namespace {

FailureKind parse_failure_kind(std::string_view s) {
  for (FailureKind k : {FailureKind::none, FailureKind::auth, FailureKind::exhausted, FailureKind::timeout,
                        FailureKind::http, FailureKind::bad_response})
    if (to_string(k) == s) return k;
  throw ParseError("unknown failure kind '" + std::string(s) + "'");
}

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string norm_key(std::string_view s) {
  std::string out;
  for (char ch : trim(s)) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
  }
  return out;
}

}  // namespace

ModelEndpoint endpoint_from_env(const std::string& model, const std::string& base_url) {
  ModelEndpoint ep;
  ep.model = model;
  ep.base_url = base_url.empty() ? env_or_empty("PRIME_BASE_URL") : base_url;
  if (ep.base_url.empty()) throw UsageError("no endpoint: set PRIME_BASE_URL or pass --base-url");
  return ep;
}

ChatClient::ChatClient(ModelEndpoint ep, std::shared_ptr<Transport> transport, Sleeper sleep,
                       std::shared_ptr<RateLimiter> limiter, RateLimiter::Clock clock)
    : ep_(std::move(ep)),
      transport_(std::move(transport)),
      sleep_(std::move(sleep)),
      limiter_(std::move(limiter)),
      clock_(clock ? std::move(clock) : [] { return std::chrono::steady_clock::now(); }) {}

std::string ChatClient::request_body(const ModelEndpoint& ep, const json& messages) {
  json body;
  body["model"] = ep.model;
  body["messages"] = messages;
  body["temperature"] = ep.temperature;
  return body.dump();
}

Completion ChatClient::complete(const std::string& prompt) {
  return send(json::array({{{"role", "user"}, {"content", prompt}}}));
}

Completion ChatClient::complete_messages(const std::string& system, const std::string& user) {
  return send(json::array({{{"role", "system"}, {"content", system}}, {{"role", "user"}, {"content", user}}}));
}

Completion ChatClient::send(const json& messages) {
  const std::string body = request_body(ep_, messages);
  Headers headers;
  if (std::string key = env_or_empty("PRIME_API_KEY"); !key.empty())
    headers.emplace_back("Authorization", "Bearer " + key);

  Completion out;
  const auto start = clock_();
  auto finish = [&](FailureKind k, std::string detail) {
    out.failure = k;
    out.detail = std::move(detail);
    out.elapsed_ms = static_cast<long>(
        std::chrono::duration_cast<std::chrono::milliseconds>(clock_() - start).count());
    return out;
  };

  for (int attempt = 0;; ++attempt) {
    if (limiter_) limiter_->acquire();
    HttpResponse r = transport_->post("/chat/completions", body, headers, ep_.timeout);
    if (r.status == 200) {
      try {
        json j = json::parse(r.body);
        const auto& content = j.at("choices").at(0).at("message").at("content");
        out.text = content.is_string() ? content.get<std::string>() : content.dump();
        return finish(FailureKind::none, {});
      } catch (const json::exception& e) {
        return finish(FailureKind::bad_response, std::string("unreadable completion body: ") + e.what());
      }
    }
    if (r.status == 401 || r.status == 403) return finish(FailureKind::auth, "HTTP " + std::to_string(r.status));
    const bool retryable = r.status == 0 || r.status == 429 || r.status >= 500;
    std::string detail = r.status ? "HTTP " + std::to_string(r.status) : r.error;
    if (!retryable) return finish(FailureKind::http, detail + ": " + r.body.substr(0, 200));
    if (attempt >= ep_.max_retries)
      return finish(r.timed_out ? FailureKind::timeout : FailureKind::exhausted,
                    detail + " after " + std::to_string(attempt + 1) + " attempts");
    ++out.retries;
    sleep_(ep_.backoff_base * (1LL << std::min(attempt, 20)));
  }
}

namespace {

// End of the balanced object starting at text[i] == '{', or npos.
std::size_t match_brace(const std::string& text, std::size_t i) {
  int depth = 0;
  bool in_str = false, esc = false;
  for (std::size_t k = i; k < text.size(); ++k) {
    char c = text[k];
    if (in_str) {
      if (esc) esc = false;
      else if (c == '\\') esc = true;
      else if (c == '"') in_str = false;
      continue;
    }
    if (c == '"') in_str = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return k;
  }
  return std::string::npos;
}

std::optional<json> last_grid_object(const std::string& text) {
  std::optional<json> best_grid, best_any;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    std::size_t j = match_brace(text, i);
    if (j == std::string::npos) continue;
    json parsed = json::parse(text.substr(i, j - i + 1), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) continue;
    bool grid_like = !parsed.empty();
    for (const auto& [k, v] : parsed.items()) grid_like = grid_like && v.is_object();
    (grid_like ? best_grid : best_any) = std::move(parsed);
    i = j;
  }
  return best_grid ? best_grid : best_any;
}

}  // namespace

PredictedGrid parse_solution(const std::string& text, const SolutionGrid& truth) {
  static const std::string kMarker = "FINAL SOLUTION:";
  std::optional<json> obj;
  if (auto m = text.rfind(kMarker); m != std::string::npos) obj = last_grid_object(text.substr(m + kMarker.size()));
  if (!obj) obj = last_grid_object(text);
  if (!obj) throw ParseError("no JSON object in response");

  PredictedGrid pred = blank_prediction(truth);
  for (const auto& [key, row] : obj->items()) {
    const std::string k = norm_key(key);
    int r = -1;
    for (int i = 0; i < truth.p(); ++i)
      if (norm_key(truth.at(i, 0)) == k) r = i;
    if (r < 0) throw ParseError("response key \"" + key + "\" matches no person in the puzzle");
    if (!row.is_object()) continue;
    for (const auto& [cat, val] : row.items()) {
      const std::string ck = norm_key(cat);
      for (int c = 1; c < truth.q(); ++c) {
        if (norm_key(truth.columns[c].name) != ck) continue;
        std::string v = val.is_string() ? norm_key(val.get<std::string>()) : val.is_null() ? "" : lower(val.dump());
        pred.cells[r][c] = v.empty() ? std::string(kUnknownCell) : v;
      }
    }
  }
  return pred;
}

std::string_view to_string(MockPolicy p) {
  switch (p) {
    case MockPolicy::oracle: return "oracle";
    case MockPolicy::stereotype: return "stereotype";
    case MockPolicy::anti_stereotype: return "anti_stereotype";
    case MockPolicy::uniform_random: return "uniform_random";
  }
  return "?";
}

MockPolicy parse_mock_policy(std::string_view s) {
  for (MockPolicy p : {MockPolicy::oracle, MockPolicy::stereotype, MockPolicy::anti_stereotype,
                       MockPolicy::uniform_random})
    if (to_string(p) == s) return p;
  throw UsageError("unknown mock policy '" + std::string(s) + "'");
}

PredictedGrid mock_solve(MockPolicy policy, const PuzzleTriplet& t, Variant v, std::uint64_t seed) {
  const SolutionGrid& truth = t.variant(v).grid;
  PredictedGrid pred = prediction_of(truth);
  switch (policy) {
    case MockPolicy::oracle: return pred;
    case MockPolicy::uniform_random: {
      Rng rng(mix_seed(seed, hash_string(puzzle_id(t, v))));
      for (int c = 1; c < truth.q(); ++c) {
        auto col = truth.column_values(c);
        rng.shuffle(col);
        for (int r = 0; r < truth.p(); ++r) pred.cells[r][c] = col[r];
      }
      return pred;
    }
    case MockPolicy::stereotype:
    case MockPolicy::anti_stereotype: {
      if (v == Variant::generic) return pred;
      auto items = truth.column_values(1);
      std::sort(items.begin(), items.end());
      std::map<Gender, std::vector<std::string>> by_gender;
      for (const auto& it : items) by_gender[t.gender_tags.at(it)].push_back(it);
      std::map<Gender, std::size_t> used;
      for (int r = 0; r < truth.p(); ++r) {
        Gender g = t.gender_tags.at(truth.at(r, 0));
        if (policy == MockPolicy::anti_stereotype) g = opposite(g);
        pred.cells[r][1] = by_gender[g].at(used[g]++);
      }
      return pred;
    }
  }
  return pred;
}

std::string format_grid_response(const PredictedGrid& grid, const SolutionGrid& truth, PromptMode mode) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t r = 0; r < grid.cells.size(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (int c = 1; c < truth.q(); ++c) row[truth.columns[c].name] = grid.cells[r][c];
    j[display_name(grid.names[r])] = row;
  }
  std::string block = "```json\n" + j.dump(2) + "\n```";
  if (mode == PromptMode::cot) return "REASONING:\nDeterministic mock; no reasoning.\n\nFINAL SOLUTION:\n" + block;
  return block;
}

std::string MockBackend::endpoint_id() const {
  std::string id = "mock:" + std::string(to_string(policy_));
  if (policy_ == MockPolicy::uniform_random) id += ":" + std::to_string(seed_);
  return id;
}

Completion MockBackend::solve(const EvalItem& item, const std::string&) {
  const SolutionGrid& truth = item.triplet->variant(item.variant).grid;
  Completion c;
  c.text = format_grid_response(mock_solve(policy_, *item.triplet, item.variant, seed_), truth, item.mode);
  return c;
}

std::string RunRecord::key() const { return puzzle_id + "|" + std::string(to_string(mode)) + "|" + endpoint; }

nlohmann::ordered_json record_to_json(const RunRecord& r) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["puzzle_id"] = r.puzzle_id;
  j["triplet_id"] = r.triplet_id;
  j["size"] = to_string(r.size);
  j["bp_category"] = r.bp_category;
  j["variant"] = to_string(r.variant);
  j["mode"] = to_string(r.mode);
  j["endpoint"] = r.endpoint;
  j["response"] = r.response;
  j["parse_error"] = r.parse_error.empty() ? oj(nullptr) : oj(r.parse_error);
  if (r.prediction) {
    oj pred = oj::object();
    for (std::size_t i = 0; i < r.prediction->names.size(); ++i) {
      oj row = oj::array();
      for (std::size_t c = 1; c < r.prediction->cells[i].size(); ++c) row.push_back(r.prediction->cells[i][c]);
      pred[r.prediction->names[i]] = row;
    }
    j["prediction"] = pred;
  } else {
    j["prediction"] = nullptr;
  }
  if (r.score) {
    const Scorecard& s = *r.score;
    j["score"] = {{"ed_all", s.ed_all},
                  {"ed_bp", s.ed_bp},
                  {"ed_general", s.ed_general},
                  {"columns", s.columns},
                  {"exact", s.exact},
                  {"accurate", s.accurate},
                  {"parse_failed", s.parse_failed},
                  {"alignment_accuracy", s.alignment_accuracy},
                  {"correctness_score", s.correctness_score},
                  {"bias_score", s.bias_score},
                  {"stereo_count", s.stereo_count},
                  {"anti_count", s.anti_count},
                  {"evaluated_cells", s.evaluated_cells}};
  } else {
    j["score"] = nullptr;
  }
  j["error"] = r.failure == FailureKind::none
                   ? oj(nullptr)
                   : oj({{"kind", to_string(r.failure)}, {"detail", r.failure_detail}});
  j["retries"] = r.retries;
  j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  try {
    r.puzzle_id = j.at("puzzle_id").get<std::string>();
    r.triplet_id = j.at("triplet_id").get<std::string>();
    auto sizes = parse_sizes(j.at("size").get<std::string>());
    if (sizes.size() != 1) throw ParseError("bad size");
    r.size = sizes[0];
    r.bp_category = j.at("bp_category").get<std::string>();
    r.variant = parse_variant(j.at("variant").get<std::string>());
    r.mode = parse_prompt_mode(j.at("mode").get<std::string>());
    r.endpoint = j.at("endpoint").get<std::string>();
    r.response = j.value("response", std::string{});
    if (j.contains("parse_error") && j["parse_error"].is_string()) r.parse_error = j["parse_error"].get<std::string>();
    if (j.contains("prediction") && j["prediction"].is_object()) {
      PredictedGrid p;
      for (const auto& [name, row] : j["prediction"].items()) {
        p.names.push_back(name);
        std::vector<std::string> cells{name};
        for (const auto& v : row) cells.push_back(v.get<std::string>());
        p.cells.push_back(std::move(cells));
      }
      r.prediction = std::move(p);
    }
    if (j.contains("score") && j["score"].is_object()) {
      const auto& s = j["score"];
      Scorecard sc;
      sc.ed_all = s.at("ed_all").get<int>();
      sc.ed_bp = s.at("ed_bp").get<int>();
      sc.ed_general = s.at("ed_general").get<int>();
      sc.columns = s.at("columns").get<std::vector<int>>();
      sc.exact = s.at("exact").get<bool>();
      sc.accurate = s.at("accurate").get<bool>();
      sc.parse_failed = s.at("parse_failed").get<bool>();
      sc.alignment_accuracy = s.value("alignment_accuracy", 0.0);
      sc.correctness_score = s.at("correctness_score").get<double>();
      sc.bias_score = s.at("bias_score").get<double>();
      sc.stereo_count = s.at("stereo_count").get<int>();
      sc.anti_count = s.at("anti_count").get<int>();
      sc.evaluated_cells = s.at("evaluated_cells").get<int>();
      r.score = sc;
    }
    if (j.contains("error") && j["error"].is_object()) {
      r.failure = parse_failure_kind(j["error"].at("kind").get<std::string>());
      r.failure_detail = j["error"].value("detail", std::string{});
    }
    r.retries = j.value("retries", 0);
    r.elapsed_ms = j.value("elapsed_ms", 0L);
  } catch (const json::exception& e) {
    throw ParseError(std::string("run record: ") + e.what());
  }
  return r;
}

std::vector<RunRecord> load_run(const std::string& path) {
  std::vector<RunRecord> out;
  std::string text = read_file(path);
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // torn tail from an interrupted run
    ++line_no;
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError(path + ":" + std::to_string(line_no) + ": malformed JSON line");
    out.push_back(record_from_json(j));
  }
  return out;
}

namespace {

struct WorkItem {
  EvalItem item;
  std::string puzzle_id;
};

RunRecord execute(const WorkItem& w, SolverBackend& backend, const EvalOptions& opts) {
  const PuzzleTriplet& t = *w.item.triplet;
  const Puzzle& pz = t.variant(w.item.variant);
  RunRecord r;
  r.puzzle_id = w.puzzle_id;
  r.triplet_id = t.id;
  r.size = {t.p, t.q};
  r.bp_category = t.bp_category;
  r.variant = w.item.variant;
  r.mode = w.item.mode;
  r.endpoint = backend.endpoint_id();
  try {
    const std::string prompt = build_puzzle_prompt(pz, w.item.mode, opts.shuffle_seed);
    Completion c = backend.solve(w.item, prompt);
    r.retries = c.retries;
    r.elapsed_ms = c.elapsed_ms;
    if (!c.ok()) {
      r.failure = c.failure;
      r.failure_detail = c.detail;
      return r;
    }
    r.response = c.text;
    try {
      r.prediction = parse_solution(c.text, pz.grid);
    } catch (const ParseError& e) {
      r.parse_error = e.what();
    }
    ScoreJob job{r.prediction ? &*r.prediction : nullptr, &pz.grid,
                 w.item.variant == Variant::generic ? nullptr : &t.gender_tags};
    r.score = score(job, opts.denominator);
  } catch (const std::exception& e) {
    r.failure = FailureKind::bad_response;
    r.failure_detail = e.what();
    r.score.reset();
  }
  return r;
}

// Cuts a torn final line and drops failed records. Returns the keys kept.
std::set<std::string> prepare_resume(const std::string& path) {
  std::set<std::string> keys;
  if (!std::filesystem::exists(path)) return keys;
  std::string text = read_file(path);
  std::size_t cut = text.rfind('\n');
  std::string body = cut == std::string::npos ? "" : text.substr(0, cut + 1);
  bool changed = body.size() != text.size();
  std::string kept;
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t nl = body.find('\n', pos);
    std::string line = body.substr(pos, nl - pos);
    pos = nl + 1;
    if (trim(line).empty()) {
      changed = true;
      continue;
    }
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError(path + ": malformed JSON line before end of file");
    RunRecord r = record_from_json(j);
    if (r.failure != FailureKind::none) {
      changed = true;
      continue;
    }
    keys.insert(r.key());
    kept += line + "\n";
  }
  if (changed) write_file_atomic(path, kept);
  return keys;
}

// Lines outside the plan keep their relative order ahead of the planned ones,
// which follow plan order. Rewrites only when something moves.
void canonicalize_order(const std::string& path, const std::vector<std::string>& plan_keys) {
  const std::string text = read_file(path);
  std::vector<std::string> lines, foreign;
  std::map<std::string, std::string> by_key;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    lines.push_back(line);
  }
  std::set<std::string> planned(plan_keys.begin(), plan_keys.end());
  for (const auto& line : lines) {
    const std::string key = record_from_json(json::parse(line)).key();
    if (!planned.count(key)) foreign.push_back(line);
    else by_key.emplace(key, line);
  }
  std::string ordered;
  for (const auto& line : foreign) ordered += line + "\n";
  for (const auto& k : plan_keys)
    if (auto it = by_key.find(k); it != by_key.end()) ordered += it->second + "\n";
  if (ordered != text) write_file_atomic(path, ordered);
}

}  // namespace

RunSummary run_evaluation(const std::vector<PuzzleTriplet>& puzzles, SolverBackend& backend, const EvalOptions& opts,
                          const std::string& out_path) {
  namespace fs = std::filesystem;
  // Unrendered clues would turn every item into a failed record; refuse up front.
  for (const auto& t : puzzles)
    for (Variant v : opts.variants)
      for (const auto& c : t.variant(v).clues)
        if (c.english.empty())
          throw UsageError("puzzle " + puzzle_id(t, v) + " has clues without English text; render the set first");
  if (fs::path(out_path).has_parent_path()) fs::create_directories(fs::path(out_path).parent_path());
  std::set<std::string> done;
  if (opts.resume) done = prepare_resume(out_path);
  else write_file_atomic(out_path, "");

  RunSummary summary;
  std::vector<WorkItem> todo;
  std::vector<std::string> plan_keys;
  const std::string endpoint = backend.endpoint_id();
  for (const auto& t : puzzles)
    for (PromptMode m : opts.modes)
      for (Variant v : opts.variants) {
        ++summary.planned;
        WorkItem w{{&t, v, m}, puzzle_id(t, v)};
        plan_keys.push_back(w.puzzle_id + "|" + std::string(to_string(m)) + "|" + endpoint);
        if (done.count(plan_keys.back())) {
          ++summary.skipped;
          continue;
        }
        todo.push_back(std::move(w));
      }

  std::ofstream out(out_path, std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot open '" + out_path + "' for appending");

  std::mutex mu;
  std::condition_variable cv;
  std::map<std::size_t, RunRecord> ready;
  std::atomic<std::size_t> next{0};
  const std::size_t n = todo.size();
  const int workers = static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(std::max(opts.workers, 1), n)));

  std::vector<std::thread> pool;
  for (int w = 0; w < workers && n > 0; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        RunRecord r = execute(todo[i], backend, opts);
        std::lock_guard<std::mutex> lock(mu);
        ready.emplace(i, std::move(r));
        cv.notify_all();
      }
    });

  for (std::size_t i = 0; i < n; ++i) {
    RunRecord r;
    {
      std::unique_lock<std::mutex> lock(mu);
      cv.wait(lock, [&] { return ready.count(i) > 0; });
      r = std::move(ready.at(i));
      ready.erase(i);
    }
    out << record_to_json(r).dump() << '\n';
    out.flush();
    ++summary.executed;
    if (r.failure != FailureKind::none) {
      ++summary.failed;
      ++summary.failures_by_kind[std::string(to_string(r.failure))];
    } else if (r.score && r.score->exact) {
      ++summary.exact;
    }
  }
  for (auto& t : pool) t.join();
  out.close();
  // Re-run failures land at the end; restore plan order so the file depends
  // only on its records, not on how many resumes produced them.
  if (!done.empty() && n > 0) canonicalize_order(out_path, plan_keys);
  return summary;
}

std::string translate_clue(const Clue& clue, ChatClient& client) {
  auto [sys, user] = clue_translation_messages(clue);
  Completion c = client.complete_messages(sys, user);
  if (!c.ok()) throw Error("clue translation failed (" + std::string(to_string(c.failure)) + "): " + c.detail);
  return trim(c.text);
}

}  // namespace prime
