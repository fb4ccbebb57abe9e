#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "nbcover/protocol.hpp"
#include "nbcover/semantics.hpp"
#include "nbcover/state_set.hpp"

namespace nbcover {

enum class SaturationRule {
  Initial,        // q_in
  ActionStep,     // (q', !a or !!a, q) with q' covered
  SendPair,       // (q1, !a, q1') and (q2, ?a, q) with q1, q2 covered
  BroadcastPair,  // same with !!a
};

struct Justification {
  SaturationRule rule = SaturationRule::Initial;
  // ActionStep: the emitting transition. Pairs: the reception (q2, ?a, q).
  std::size_t transition = 0;
  // Pairs only: the emitting transition (q1, !a or !!a, q1').
  std::optional<std::size_t> partner;
};

struct SaturationRound {
  std::size_t round = 0;
  std::vector<StateId> added;
  std::vector<Justification> justifications;  // parallel to added
};

struct SaturationResult {
  StateSet coverable;
  std::vector<SaturationRound> rounds;  // round 0 holds q_in
  std::vector<std::optional<std::size_t>> round_of;
  std::vector<std::optional<Justification>> justification;
  // Upper bound on the processes needed to cover each state; 0 when not coverable.
  std::vector<std::uint64_t> bound;
};

// Requires a wait-only, tau-free protocol whose initial state is an action state.
SaturationResult saturate(const Protocol& p);

struct StateCoverAnswer {
  bool coverable = false;
  std::optional<std::uint64_t> bound;
};

StateCoverAnswer is_state_coverable(const Protocol& p, StateId q);

// Replay-verified script covering q, assembled from the derivation.
ExecutionScript witness_execution(const Protocol& p, StateId q);
ExecutionScript witness_execution(const Protocol& p, const SaturationResult& sat, StateId q);

const char* rule_name(SaturationRule rule);

}  // namespace nbcover
