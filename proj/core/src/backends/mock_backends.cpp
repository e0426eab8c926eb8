#include "mesa/backends/mock_backends.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "mesa/backends/stable_hash.hpp"
#include "mesa/error.hpp"
#include "mesa/metrics/text_metrics.hpp"

namespace mesa::backends {
namespace {

constexpr int kPlaceholderSide = 32;
constexpr std::string_view kPromptTag = "# prompt: ";

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::filesystem::path resolve(const std::filesystem::path& root, const std::string& ref) {
  std::filesystem::path p(ref);
  return p.is_absolute() || root.empty() ? p : root / p;
}

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

void add_expansion(std::vector<double>& acc, std::string_view token, std::uint64_t seed, double weight) {
  std::uint64_t state = stable_hash(token, seed);
  for (double& v : acc) v += weight * (2.0 * unit_interval(splitmix64(state)) - 1.0);
}

void normalize(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : v) x /= norm;
  }
}

}  // namespace

ChatResponse MockChatBackend::chat(const ChatRequest& request) {
  const auto h = stable_hash(to_wire(request).dump(), seed_);
  return {fmt::format("mock response {}", hex64(h))};
}

std::vector<double> MockEmbedBackend::embed_text(std::string_view text) const {
  std::vector<double> v(dim_, 0.0);
  const auto tokens = metrics::tokenize(text);
  if (tokens.empty()) {
    add_expansion(v, text, seed_, 1.0);
  } else {
    for (const auto& t : tokens) add_expansion(v, t, seed_, 1.0);
  }
  normalize(v);
  return v;
}

EmbedResponse MockEmbedBackend::embed(const EmbedRequest& request) {
  require(dim_ > 0, ErrorCode::PreconditionViolated, "mock embedding dim must be positive");
  EmbedResponse out;
  out.dim = dim_;
  for (const auto& input : request.inputs) {
    if (request.modality == Modality::Text) {
      out.vectors.push_back(embed_text(input));
      continue;
    }
    const auto bytes = read_file(resolve(image_root_, input));
    std::vector<double> v(dim_, 0.0);
    if (bytes) {
      const auto tag = bytes->find(kPromptTag);
      if (tag != std::string::npos) {
        const auto start = tag + kPromptTag.size();
        const auto prompt = bytes->substr(start, bytes->find('\n', start) - start);
        v = embed_text(prompt);
        for (double& x : v) x *= 3.0;
      }
      add_expansion(v, *bytes, seed_ ^ 0x1ULL, 1.0);
    } else {
      add_expansion(v, input, seed_ ^ 0x1ULL, 1.0);
    }
    normalize(v);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

ImageResult MockImageBackend::generate(const ImageRequest& request) {
  const auto key = fmt::format("{}\n{}\n{}x{}", request.prompt, request.seed, request.width, request.height);
  const auto id = hex64(stable_hash(key, seed_));
  const std::string rel = "images/" + id + ".ppm";
  if (!root_.empty()) {
    std::filesystem::create_directories(root_ / "images");
    std::ostringstream ppm;
    ppm << "P6\n# mesa placeholder\n" << kPromptTag << one_line(request.prompt) << '\n'
        << "# requested " << request.width << 'x' << request.height << " seed " << request.seed << '\n'
        << kPlaceholderSide << ' ' << kPlaceholderSide << "\n255\n";
    std::uint64_t state = stable_hash(id, seed_);
    for (int i = 0; i < kPlaceholderSide * kPlaceholderSide * 3; ++i) {
      ppm.put(static_cast<char>(splitmix64(state) & 0xFF));
    }
    std::ofstream out(root_ / rel, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoError, "cannot write placeholder " + (root_ / rel).string());
    out << ppm.str();
  }
  return {id, rel, request.seed};
}

AestheticResponse MockAestheticBackend::score(const AestheticRequest& request) {
  AestheticResponse out;
  for (const auto& ref : request.image_refs) {
    const auto bytes = read_file(resolve(image_root_, ref));
    const auto h = stable_hash(bytes ? *bytes : ref, seed_);
    out.scores.push_back(3.0 + 6.0 * unit_interval(h));
  }
  return out;
}

}  // namespace mesa::backends
