#include "mesa/agents/structured_block.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "mesa/error.hpp"

namespace mesa::agents {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(ws) - first + 1);
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

[[noreturn]] void unparseable(const std::string& what) { raise(ErrorCode::UnparseableOutput, what); }

}  // namespace

KeyValues parse_block(std::string_view text, std::string_view label, const std::set<std::string>& required,
                      const std::set<std::string>& allowed) {
  const auto lines = lines_of(text);
  struct Fence {
    std::size_t open;
    std::size_t close;
    std::string_view label;
  };
  std::vector<Fence> fences;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (!line.starts_with("```")) continue;
    std::size_t j = i + 1;
    while (j < lines.size() && !trim(lines[j]).starts_with("```")) ++j;
    if (j == lines.size()) unparseable("unterminated fenced block");
    fences.push_back({i, j, trim(line.substr(3))});
    i = j;
  }
  const Fence* chosen = nullptr;
  for (const auto& f : fences) {
    if (f.label == label) {
      chosen = &f;
      break;
    }
  }
  if (!chosen) {
    for (const auto& f : fences) {
      if (f.label.empty()) {
        chosen = &f;
        break;
      }
    }
  }
  if (!chosen) unparseable(fmt::format("no ```{} block in output", label));

  KeyValues out;
  std::set<std::string> seen;
  for (std::size_t i = chosen->open + 1; i < chosen->close; ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) unparseable(fmt::format("line '{}' is not 'key: value'", line));
    std::string key(trim(line.substr(0, colon)));
    std::string value(trim(line.substr(colon + 1)));
    if (!allowed.contains(key)) unparseable(fmt::format("unknown key '{}'", key));
    if (!seen.insert(key).second) unparseable(fmt::format("key '{}' repeated", key));
    out.emplace_back(std::move(key), std::move(value));
  }
  for (const auto& key : required) {
    if (!seen.contains(key)) unparseable(fmt::format("missing key '{}'", key));
  }
  return out;
}

std::string render_block(std::string_view label, const KeyValues& values) {
  std::string out = fmt::format("```{}\n", label);
  for (const auto& [k, v] : values) out += fmt::format("{}: {}\n", k, v);
  out += "```\n";
  return out;
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    auto end = value.find(';', start);
    if (end == std::string_view::npos) end = value.size();
    auto item = trim(value.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) { return fmt::format("{}", fmt::join(items, "; ")); }

std::string_view lookup(const KeyValues& values, std::string_view key) {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  return {};
}

}  // namespace mesa::agents
