#include "mesa/backends/rule_backend.hpp"

#include <cstdlib>

#include "mesa/agents/agents.hpp"
#include "mesa/agents/structured_block.hpp"
#include "mesa/error.hpp"

namespace mesa::backends {
namespace {

double parse_number(std::string_view text, std::string_view what) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    raise(ErrorCode::UnparseableOutput, "input block: bad " + std::string(what) + " '" + s + "'");
  }
  return v;
}

}  // namespace

RuleChatBackend::RuleChatBackend(const agents::Lexicon& lexicon, agents::AffectTables tables)
    : lexicon_(lexicon), tables_(tables) {}

ChatResponse RuleChatBackend::chat(const ChatRequest& request) {
  static const std::set<std::string> keys{"agent", "caption", "valence", "arousal", "quadrant"};
  for (const auto& message : request.messages) {
    if (message.role != "user" || message.content.find("```input") == std::string::npos) continue;
    const auto kv = agents::parse_block(message.content, "input", {"agent", "caption"}, keys);
    const auto role = agents::role_from_string(agents::lookup(kv, "agent"));
    if (!role) raise(ErrorCode::UnknownRole, "unknown agent '" + std::string(agents::lookup(kv, "agent")) + "'");
    const auto valence = agents::lookup(kv, "valence");
    const auto arousal = agents::lookup(kv, "arousal");
    VAPoint va{valence.empty() ? 0.5 : parse_number(valence, "valence"),
               arousal.empty() ? 0.5 : parse_number(arousal, "arousal")};
    return {agents::rule_answer(*role, agents::lookup(kv, "caption"), va, lexicon_, tables_)};
  }
  raise(ErrorCode::UnparseableOutput, "request carries no ```input block");
}

}  // namespace mesa::backends
