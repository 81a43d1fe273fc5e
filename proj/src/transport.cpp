#include "prime/transport.hpp"

#include <thread>

#include <httplib.h>

#include "prime/error.hpp"

namespace prime {

namespace {

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw UsageError("base URL needs a scheme: '" + base_url + "'");
    const auto path_start = base_url.find('/', scheme_end + 3);
    origin_ = base_url.substr(0, path_start);
    if (path_start != std::string::npos) prefix_ = base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  HttpResponse post(const std::string& path, const std::string& body, const Headers& headers,
                    std::chrono::milliseconds timeout) override {
    httplib::Client cli(origin_);
    const auto secs = timeout.count() / 1000;
    const auto usecs = (timeout.count() % 1000) * 1000;
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    httplib::Headers hs;
    for (const auto& [k, v] : headers) hs.emplace(k, v);

    const auto start = std::chrono::steady_clock::now();
    auto res = cli.Post(prefix_ + path, hs, body, "application/json");
    HttpResponse out;
    if (!res) {
      const auto err = res.error();
      out.error = httplib::to_string(err);
      const bool slow = std::chrono::steady_clock::now() - start >= timeout;
      out.timed_out = err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && slow);
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }

 private:
  std::string origin_;
  std::string prefix_;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(const std::string& base_url) {
  return std::make_unique<HttpTransport>(base_url);
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

RateLimiter::RateLimiter(double rps, Sleeper sleep, Clock clock) : sleep_(std::move(sleep)), clock_(std::move(clock)) {
  if (rps > 0) interval_ = std::chrono::nanoseconds(static_cast<long long>(1e9 / rps));
  if (!clock_) clock_ = [] { return std::chrono::steady_clock::now(); };
}

void RateLimiter::acquire() {
  if (interval_.count() == 0) return;
  std::chrono::nanoseconds wait{0};
  {
    std::lock_guard<std::mutex> lock(mu_);
    const auto now = clock_();
    if (next_ < now) next_ = now;
    wait = std::chrono::duration_cast<std::chrono::nanoseconds>(next_ - now);
    next_ += interval_;
  }
  if (wait.count() > 0) sleep_(std::chrono::ceil<std::chrono::milliseconds>(wait));
}

}  // namespace prime
