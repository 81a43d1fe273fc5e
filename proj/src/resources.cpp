#include "prime/resources.hpp"

#include <string_view>
#include <utility>

#include "prime/error.hpp"

namespace prime::detail {
extern const std::pair<std::string_view, std::string_view> kEmbedded[];
extern const unsigned kEmbeddedCount;
}  // namespace prime::detail

namespace prime {

std::string_view resource(std::string_view key) {
  for (unsigned i = 0; i < detail::kEmbeddedCount; ++i)
    if (detail::kEmbedded[i].first == key) return detail::kEmbedded[i].second;
  throw Error("no embedded resource '" + std::string(key) + "'");
}

std::vector<std::string> resource_keys() {
  std::vector<std::string> out;
  for (unsigned i = 0; i < detail::kEmbeddedCount; ++i) out.emplace_back(detail::kEmbedded[i].first);
  return out;
}

std::vector<std::string> resource_lines(std::string_view key) {
  std::vector<std::string> out;
  std::string_view text = resource(key);
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() != '#') out.emplace_back(line);
    pos = nl + 1;
  }
  return out;
}

}  // namespace prime
