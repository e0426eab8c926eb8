#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Agents exchange data as a fenced block of `key: value` lines:
//
//   ```attributes
//   subjects: pianist; violinist
//   environment: rainy city at night
//   ```
//
// List values are separated by ';'. Free-form text outside the fence is
// ignored.

namespace mesa::agents {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Extracts the first fenced block labelled `label` (or, when none carries
/// that label, the first unlabelled one). Throws UnparseableOutput when no
/// block exists, a line lacks ':', a key repeats, a key is not in `allowed`,
/// or a key from `required` is missing.
KeyValues parse_block(std::string_view text, std::string_view label, const std::set<std::string>& required,
                      const std::set<std::string>& allowed);

std::string render_block(std::string_view label, const KeyValues& values);

std::vector<std::string> split_list(std::string_view value);
std::string join_list(const std::vector<std::string>& items);

std::string_view lookup(const KeyValues& values, std::string_view key);

}  // namespace mesa::agents
