#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace prime {

using Headers = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;           // 0 when no response arrived
  std::string body;
  std::string error;        // transport-level failure description
  bool timed_out = false;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& path, const std::string& body, const Headers& headers,
                            std::chrono::milliseconds timeout) = 0;
};

// base_url: "http(s)://host[:port][/prefix]". Paths passed to post() are
// appended to the prefix.
std::unique_ptr<Transport> make_http_transport(const std::string& base_url);

using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper real_sleeper();

/// Spaces request starts at least 1/rps apart across every thread sharing it.
class RateLimiter {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit RateLimiter(double requests_per_second, Sleeper sleep = real_sleeper(), Clock clock = {});
  void acquire();

 private:
  std::chrono::nanoseconds interval_{0};
  Sleeper sleep_;
  Clock clock_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_{};
};

}  // namespace prime
