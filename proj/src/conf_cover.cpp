#include "nbcover/conf_cover.hpp"

#include <algorithm>
#include <unordered_map>

#include "nbcover/error.hpp"
#include "nbcover/semantics.hpp"

namespace nbcover {

namespace {

void require_domain(const Protocol& p) {
  auto report = classify(p);
  if (!report.wait_only) throw PreconditionError("protocol is not wait-only");
  if (!report.initial_is_action) throw PreconditionError("initial state is a waiting state");
  if (has_internal(p)) throw PreconditionError("protocol has internal transitions; normalize them first");
}

}  // namespace

const char* kind_name(AbstractKind kind) {
  switch (kind) {
    case AbstractKind::Step: return "step";
    case AbstractKind::Ext: return "ext";
    case AbstractKind::Switch: return "switch";
  }
  return "?";
}

std::vector<AbstractStep> abstract_successors(const Protocol& p, const AbstractConfiguration& g) {
  std::vector<AbstractStep> out;
  const auto& ts = p.transitions();
  for (std::size_t t = 0; t < ts.size(); ++t) {
    const Transition& tr = ts[t];
    if (tr.label != Label::Send && tr.label != Label::Broadcast) continue;
    const bool tracked = g.m.count(tr.source) > 0;
    const bool untracked = g.s.contains(tr.source);
    if (!tracked && !untracked) continue;

    StateSet s2 = g.s;
    s2.insert(tr.destination);
    for (std::size_t r : p.receptions_of(tr.message)) {
      if (g.s.contains(ts[r].source)) s2.insert(ts[r].destination);
    }

    std::vector<AbstractStep> local;
    auto emit = [&](AbstractKind kind, Configuration m2) {
      AbstractConfiguration to{std::move(m2), s2};
      for (const auto& e : local) {
        if (e.kind == kind && e.to == to) return;
      }
      local.push_back({kind, t, g, std::move(to)});
    };

    // A tracked process emits.
    if (tracked) {
      for (auto& o : successors(p, g.m, t)) emit(AbstractKind::Step, std::move(o.result));
    }
    if (untracked) {
      // An untracked process emits; tracked processes receive as the semantics dictates.
      Configuration widened = g.m;
      widened.add(tr.source);
      for (auto& o : successors(p, widened, t)) {
        Configuration m2 = std::move(o.result);
        m2.remove(tr.destination);
        emit(AbstractKind::Ext, std::move(m2));
      }
      if (tr.label == Label::Send) {
        // Rendez-vous entirely among untracked processes.
        for (std::size_t r : p.receptions_of(tr.message)) {
          if (g.s.contains(ts[r].source)) {
            emit(AbstractKind::Ext, g.m);
            break;
          }
        }
        // A tracked receiver leaves M and the untracked sender takes its place.
        for (std::size_t r : p.receptions_of(tr.message)) {
          if (g.m.count(ts[r].source) == 0) continue;
          Configuration m2 = g.m;
          m2.remove(ts[r].source);
          m2.add(tr.destination);
          emit(AbstractKind::Switch, std::move(m2));
        }
      }
    }
    std::move(local.begin(), local.end(), std::back_inserter(out));
  }
  return out;
}

ConfCoverResult check_conf_cover(const Protocol& p, const Configuration& target) {
  require_domain(p);
  if (target.empty()) throw Error("empty target configuration");
  for (const auto& [q, k] : target.entries()) {
    if (q >= p.num_states()) throw Error("target mentions an unknown state");
  }
  const std::size_t n = p.num_states();
  StateSet s0(n);
  s0.insert(p.initial());
  AbstractConfiguration start{Configuration::uniform(p.initial(), target.size()), s0};

  struct Node {
    AbstractConfiguration g;
    std::size_t parent;
    AbstractKind kind;
    std::size_t transition;
  };
  std::vector<Node> nodes{{start, 0, AbstractKind::Step, 0}};
  std::unordered_map<AbstractConfiguration, std::size_t, AbstractConfigurationHash> seen{{start, 0}};
  ConfCoverResult res;
  std::optional<std::size_t> hit;
  if (start.m == target) hit = 0;
  for (std::size_t i = 0; !hit && i < nodes.size(); ++i) {
    AbstractConfiguration g = nodes[i].g;
    for (auto& step : abstract_successors(p, g)) {
      if (seen.count(step.to)) continue;
      seen.emplace(step.to, nodes.size());
      bool done = step.to.m == target;
      nodes.push_back({std::move(step.to), i, step.kind, step.transition});
      if (done) {
        hit = nodes.size() - 1;
        break;
      }
    }
  }
  res.visited = nodes.size();
  if (!hit) return res;
  res.covered = true;
  for (std::size_t i = *hit; i != 0; i = nodes[i].parent) {
    res.path.push_back({nodes[i].kind, nodes[i].transition, nodes[nodes[i].parent].g, nodes[i].g});
  }
  std::reverse(res.path.begin(), res.path.end());
  return res;
}

boost::multiprecision::cpp_int cutoff_bound(const Protocol& p, const Configuration& target) {
  using boost::multiprecision::cpp_int;
  const unsigned q = static_cast<unsigned>(p.num_states());
  const std::uint64_t k = target.size();
  cpp_int two_q = cpp_int(1) << q;
  cpp_int power = 1;
  for (std::uint64_t i = 0; i < k; ++i) power *= q;
  return cpp_int(k) + two_q * two_q * power;
}

bool interp_member(const AbstractConfiguration& g, const Configuration& c) {
  if (!g.m.leq(c)) return false;
  for (const auto& [q, k] : c.entries()) {
    if (!g.s.contains(q)) return false;
  }
  return true;
}

}  // namespace nbcover
