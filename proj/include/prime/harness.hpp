#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prime/generator.hpp"
#include "prime/metrics.hpp"
#include "prime/render.hpp"
#include "prime/transport.hpp"

namespace prime {

enum class FailureKind { none, auth, exhausted, timeout, http, bad_response };
std::string_view to_string(FailureKind k);

struct ModelEndpoint {
  std::string base_url;
  std::string model;
  double temperature = 0.0;
  int max_retries = 4;
  std::chrono::milliseconds timeout{120000};
  double rate_limit = 0.0;  // requests per second, 0 = unlimited
  std::chrono::milliseconds backoff_base{500};
};

// Base URL from PRIME_BASE_URL unless `base_url` is given. The token is read
// from PRIME_API_KEY when requests are made and is never stored in config.
ModelEndpoint endpoint_from_env(const std::string& model, const std::string& base_url = {});

struct Completion {
  std::string text;
  FailureKind failure = FailureKind::none;
  std::string detail;
  int retries = 0;
  long elapsed_ms = 0;
  bool ok() const { return failure == FailureKind::none; }
};

class Completer {
 public:
  virtual ~Completer() = default;
  virtual Completion complete(const std::string& prompt) = 0;
};

/// OpenAI-compatible chat client. Retries 429, 5xx, timeouts and dropped
/// connections with exponential backoff up to max_retries; 401/403 fail fast.
class ChatClient final : public Completer {
 public:
  // `clock` times requests for elapsed_ms; defaults to steady_clock.
  ChatClient(ModelEndpoint ep, std::shared_ptr<Transport> transport, Sleeper sleep = real_sleeper(),
             std::shared_ptr<RateLimiter> limiter = nullptr, RateLimiter::Clock clock = {});

  Completion complete(const std::string& prompt) override;
  Completion complete_messages(const std::string& system, const std::string& user);
  const ModelEndpoint& endpoint() const { return ep_; }

  static std::string request_body(const ModelEndpoint& ep, const nlohmann::json& messages);

 private:
  Completion send(const nlohmann::json& messages);

  ModelEndpoint ep_;
  std::shared_ptr<Transport> transport_;
  Sleeper sleep_;
  std::shared_ptr<RateLimiter> limiter_;
  RateLimiter::Clock clock_;
};

/// Extracts the last well-formed JSON object from a response (fenced or not),
/// preferring text after "FINAL SOLUTION:". Top-level keys must match truth
/// names case-insensitively; category keys likewise, unknown ones ignored.
/// Missing cells become "?". Throws ParseError.
PredictedGrid parse_solution(const std::string& text, const SolutionGrid& truth);

enum class MockPolicy { oracle, stereotype, anti_stereotype, uniform_random };
std::string_view to_string(MockPolicy p);
MockPolicy parse_mock_policy(std::string_view s);

// Stereotype policies hand bias items to same-gender (or cross-gender) names,
// in row order and sorted item order, and copy every other column from the
// truth. They return the truth on generic puzzles, which carry no gendered names.
PredictedGrid mock_solve(MockPolicy policy, const PuzzleTriplet& t, Variant v, std::uint64_t seed);

// Grid as the fenced JSON block a model would answer with; cot adds the
// REASONING / FINAL SOLUTION wrapper.
std::string format_grid_response(const PredictedGrid& grid, const SolutionGrid& truth, PromptMode mode);

struct EvalItem {
  const PuzzleTriplet* triplet = nullptr;
  Variant variant = Variant::generic;
  PromptMode mode = PromptMode::base;
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string endpoint_id() const = 0;
  virtual Completion solve(const EvalItem& item, const std::string& prompt) = 0;
};

class EndpointBackend final : public SolverBackend {
 public:
  EndpointBackend(std::shared_ptr<Completer> completer, std::string id)
      : completer_(std::move(completer)), id_(std::move(id)) {}
  std::string endpoint_id() const override { return id_; }
  Completion solve(const EvalItem&, const std::string& prompt) override { return completer_->complete(prompt); }

 private:
  std::shared_ptr<Completer> completer_;
  std::string id_;
};

class MockBackend final : public SolverBackend {
 public:
  MockBackend(MockPolicy policy, std::uint64_t seed) : policy_(policy), seed_(seed) {}
  std::string endpoint_id() const override;
  Completion solve(const EvalItem& item, const std::string& prompt) override;

 private:
  MockPolicy policy_;
  std::uint64_t seed_;
};

struct RunRecord {
  std::string puzzle_id, triplet_id;
  GridSize size;
  std::string bp_category;
  Variant variant = Variant::generic;
  PromptMode mode = PromptMode::base;
  std::string endpoint;
  std::string response;
  std::string parse_error;  // empty when the response parsed
  std::optional<PredictedGrid> prediction;
  std::optional<Scorecard> score;  // absent when the request itself failed
  FailureKind failure = FailureKind::none;
  std::string failure_detail;
  int retries = 0;
  long elapsed_ms = 0;

  std::string key() const;  // puzzle id | mode | endpoint
};

nlohmann::ordered_json record_to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);
std::vector<RunRecord> load_run(const std::string& path);

struct EvalOptions {
  std::vector<PromptMode> modes{PromptMode::base};
  std::vector<Variant> variants{Variant::generic, Variant::stereo, Variant::anti};
  int workers = 4;
  bool resume = true;
  std::optional<std::uint64_t> shuffle_seed;
  BiasDenominator denominator = BiasDenominator::incorrect_cells;
};

struct RunSummary {
  std::size_t planned = 0;   // items in the full run
  std::size_t skipped = 0;   // already present on resume
  std::size_t executed = 0;
  std::size_t failed = 0;    // request failures, retried on the next resume
  std::size_t exact = 0;     // among executed
  std::map<std::string, std::size_t> failures_by_kind;
  bool complete() const { return failed == 0; }
};

/// Runs every (triplet, variant, mode) item not already in `out_path` and
/// appends one JSON line per item. Up to `workers` items are in flight; a
/// single writer emits lines in item order so output is independent of
/// completion order. On resume a torn final line is cut and failed records
/// are dropped so they run again.
RunSummary run_evaluation(const std::vector<PuzzleTriplet>& puzzles, SolverBackend& backend,
                          const EvalOptions& opts, const std::string& out_path);

// Optional model-backed clue rendering.
std::string translate_clue(const Clue& clue, ChatClient& client);

}  // namespace prime
