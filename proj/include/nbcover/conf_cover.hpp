#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nbcover/configuration.hpp"
#include "nbcover/protocol.hpp"
#include "nbcover/state_set.hpp"

namespace nbcover {

// (M, S): K tracked processes and the states that can be populated at will.
struct AbstractConfiguration {
  Configuration m;
  StateSet s;

  bool operator==(const AbstractConfiguration&) const = default;
};

struct AbstractConfigurationHash {
  std::size_t operator()(const AbstractConfiguration& g) const { return g.m.hash() * 31 + g.s.hash(); }
};

enum class AbstractKind { Step, Ext, Switch };

struct AbstractStep {
  AbstractKind kind = AbstractKind::Step;
  std::size_t transition = 0;
  AbstractConfiguration from;
  AbstractConfiguration to;
};

// All successors with the maximal S-part, grouped by emitting transition.
std::vector<AbstractStep> abstract_successors(const Protocol& p, const AbstractConfiguration& g);

struct ConfCoverResult {
  bool covered = false;
  std::vector<AbstractStep> path;
  std::size_t visited = 0;
};

// Requires a wait-only, tau-free protocol whose initial state is an action state.
ConfCoverResult check_conf_cover(const Protocol& p, const Configuration& target);

// K + 2^|Q| · 2^|Q| · |Q|^K with K = |target|.
boost::multiprecision::cpp_int cutoff_bound(const Protocol& p, const Configuration& target);

bool interp_member(const AbstractConfiguration& g, const Configuration& c);

const char* kind_name(AbstractKind kind);

}  // namespace nbcover
