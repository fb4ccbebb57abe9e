#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nbcover/configuration.hpp"
#include "nbcover/protocol.hpp"
#include "nbcover/state_set.hpp"

namespace nbcover {

// (q, m): waiting state q may hold one process, last reached by emitting m.
using Token = std::pair<StateId, MessageId>;

struct TokenSet {
  StateSet s;
  std::set<Token> toks;

  StateSet token_states() const;
  bool operator==(const TokenSet&) const = default;
};

TokenSet initial_token_set(const Protocol& p);

// Requires q1 != q2, both carrying a token.
bool conflict_free(const Protocol& p, const TokenSet& g, StateId q1, StateId q2);
bool respects(const Protocol& p, const TokenSet& g, const Configuration& c);

struct ConsistencyReport {
  bool ok = true;
  std::vector<std::string> violations;
};

ConsistencyReport consistent(const Protocol& p, const TokenSet& g);

struct RuleFiring {
  std::string rule;  // "2a", "2b", "3", "4a", "4b", "6", "7", "8"
  StateId state = 0;
  std::optional<MessageId> message;  // set when a token was produced
  std::vector<std::size_t> transitions;
  std::vector<Token> tokens;  // tokens the rule was instantiated with
};

struct FApplication {
  TokenSet intermediate;  // (S'', Toks'')
  TokenSet result;        // (S', Toks')
  std::vector<RuleFiring> log;
};

// Requires a wait-only, broadcast-free, tau-free protocol.
FApplication apply_F_traced(const Protocol& p, const TokenSet& g);
TokenSet apply_F(const Protocol& p, const TokenSet& g);

struct FixpointTrace {
  std::vector<TokenSet> iterates;                 // γ_0, γ_1, ..., γ_f, γ_f
  std::vector<std::vector<RuleFiring>> rule_log;  // rule_log[i] produced iterates[i + 1]
};

FixpointTrace fixpoint(const Protocol& p);
bool check_conf_cover_rdv(const Protocol& p, const Configuration& target);

std::string format_token_set(const Protocol& p, const TokenSet& g);

}  // namespace nbcover
