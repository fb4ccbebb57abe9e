#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nbcover/configuration.hpp"
#include "nbcover/protocol.hpp"

namespace nbcover {

enum class StepKind { Internal, BroadcastDelivery, NonBlockingSend, RendezVous };

// Reception transition index -> number of processes taking it, sorted by index.
using Receivers = std::vector<std::pair<std::size_t, std::uint64_t>>;

struct StepOutcome {
  std::size_t transition = 0;
  StepKind kind = StepKind::Internal;
  Receivers receivers;
  Configuration result;
};

struct ScriptStep {
  std::size_t transition = 0;
  Receivers receivers;

  bool operator==(const ScriptStep&) const = default;
};

struct ExecutionScript {
  std::uint64_t initial_size = 1;
  std::vector<ScriptStep> steps;
};

std::vector<StepOutcome> successors(const Protocol& p, const Configuration& c);
// Outcomes of firing transition t only.
std::vector<StepOutcome> successors(const Protocol& p, const Configuration& c, std::size_t t);

// Fires one fully resolved step; throws nbcover::Error when it is infeasible.
StepOutcome apply_step(const Protocol& p, const Configuration& c, const ScriptStep& step);
// A deterministic resolution for t at c: the lowest-index reception transition
// wherever a choice exists. Requires the source of t to be occupied.
ScriptStep default_step(const Protocol& p, const Configuration& c, std::size_t t);

std::vector<Configuration> replay(const Protocol& p, const ExecutionScript& script);
std::vector<Configuration> replay_from(const Protocol& p, const Configuration& start,
                                       const std::vector<ScriptStep>& steps);

struct Limits {
  std::size_t max_states = std::size_t{1} << 20;
  std::optional<std::size_t> max_depth;
};

struct ReachSet {
  std::vector<Configuration> configurations;  // BFS order, first is the initial one
  std::vector<std::size_t> depth;
  bool truncated = false;
};

ReachSet explore(const Protocol& p, std::uint64_t n, const Limits& limits = {});

enum class Verdict { Covered, NotCovered, Unknown };

struct CoverResult {
  Verdict verdict = Verdict::NotCovered;
  std::optional<ExecutionScript> witness;
  std::size_t explored = 0;
};

// Breadth-first search from {n·q_in} for a configuration above target.
CoverResult cover_query(const Protocol& p, std::uint64_t n, const Configuration& target, const Limits& limits = {});

struct LiftedExecution {
  std::vector<Configuration> trace;
  std::vector<ScriptStep> steps;
};

// Replays steps (valid from trace[0]) from d0 ⪰ trace[0], keeping D_i ⪰ C_i.
// Surplus processes receive only when the semantics forces them to.
LiftedExecution monotone_lift(const Protocol& p, const std::vector<Configuration>& trace,
                              const std::vector<ScriptStep>& steps, const Configuration& d0);

}  // namespace nbcover
