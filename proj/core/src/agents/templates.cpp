#include "mesa/agents/templates.hpp"

#include <fstream>
#include <iterator>

#include "mesa/error.hpp"

namespace mesa::agents {
namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open template " + path.string());
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
  TemplateSet set;
  set.version = dir.filename().string();
  if (set.version.empty()) set.version = dir.parent_path().filename().string();
  for (auto role : kAgentRoles) {
    auto text = slurp(dir / (std::string(to_string(role)) + ".txt"));
    if (text.find("{caption}") == std::string::npos) {
      raise(ErrorCode::InvalidConfig, "template for " + std::string(to_string(role)) + " lacks {caption}");
    }
    set.instructions.emplace(role, std::move(text));
  }
  set.correction = slurp(dir / "correction.txt");
  return set;
}

std::string render_template(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const auto close = text.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(text.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

}  // namespace mesa::agents
