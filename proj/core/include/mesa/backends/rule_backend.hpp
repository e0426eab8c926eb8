#pragma once

#include "mesa/agents/lexicon.hpp"
#include "mesa/backends/backends.hpp"

namespace mesa::backends {

/// Offline chat backend: reads the fenced `input` block an agent sends and
/// answers from the lexicon rules. Throws UnknownRole when the block names no
/// known agent, UnparseableOutput when the block is missing.
class RuleChatBackend final : public ChatBackend {
 public:
  explicit RuleChatBackend(const agents::Lexicon& lexicon, agents::AffectTables tables = {});

  ChatResponse chat(const ChatRequest& request) override;
  std::string_view name() const noexcept override { return "rule"; }

 private:
  const agents::Lexicon& lexicon_;
  agents::AffectTables tables_;
};

}  // namespace mesa::backends
