#include "nbcover/semantics.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <unordered_map>

#include "nbcover/error.hpp"

namespace nbcover {

namespace {

// Calls f once per vector of `parts` non-negative integers summing to total.
void for_each_composition(std::uint64_t total, std::size_t parts, std::vector<std::uint64_t>& buf,
                          const std::function<void()>& f, std::size_t at = 0) {
  if (at + 1 == parts) {
    buf[at] = total;
    f();
    return;
  }
  for (std::uint64_t k = total + 1; k-- > 0;) {
    buf[at] = k;
    for_each_composition(total - k, parts, buf, f, at + 1);
  }
}

void broadcast_outcomes(const Protocol& p, const Configuration& rest, std::size_t t,
                        std::vector<StepOutcome>& out) {
  const Transition& tr = p.transition(t);
  struct Group {
    StateId state;
    std::uint64_t count;
    const std::vector<std::size_t>* options;
    std::vector<std::uint64_t> split;
  };
  std::vector<Group> groups;
  Configuration base;
  for (const auto& [q, k] : rest.entries()) {
    const auto& options = p.receptions(q, tr.message);
    if (options.empty()) {
      base.add(q, k);
    } else {
      groups.push_back({q, k, &options, std::vector<std::uint64_t>(options.size())});
    }
  }
  base.add(tr.destination);

  std::function<void(std::size_t)> rec = [&](std::size_t g) {
    if (g == groups.size()) {
      StepOutcome o;
      o.transition = t;
      o.kind = StepKind::BroadcastDelivery;
      o.result = base;
      for (const auto& grp : groups) {
        for (std::size_t i = 0; i < grp.options->size(); ++i) {
          if (grp.split[i] == 0) continue;
          std::size_t r = (*grp.options)[i];
          o.receivers.emplace_back(r, grp.split[i]);
          o.result.add(p.transition(r).destination, grp.split[i]);
        }
      }
      std::sort(o.receivers.begin(), o.receivers.end());
      out.push_back(std::move(o));
      return;
    }
    Group& grp = groups[g];
    for_each_composition(grp.count, grp.options->size(), grp.split, [&] { rec(g + 1); });
  };
  rec(0);
}

}  // namespace

std::vector<StepOutcome> successors(const Protocol& p, const Configuration& c, std::size_t t) {
  std::vector<StepOutcome> out;
  const Transition& tr = p.transition(t);
  if (tr.label == Label::Receive || c.count(tr.source) == 0) return out;
  Configuration rest = c;
  rest.remove(tr.source);

  switch (tr.label) {
    case Label::Internal: {
      StepOutcome o{t, StepKind::Internal, {}, rest};
      o.result.add(tr.destination);
      out.push_back(std::move(o));
      break;
    }
    case Label::Send: {
      for (std::size_t r : p.receptions_of(tr.message)) {
        const Transition& rt = p.transition(r);
        if (rest.count(rt.source) == 0) continue;
        StepOutcome o{t, StepKind::RendezVous, {{r, 1}}, rest};
        o.result.remove(rt.source);
        o.result.add(rt.destination);
        o.result.add(tr.destination);
        out.push_back(std::move(o));
      }
      if (out.empty()) {
        StepOutcome o{t, StepKind::NonBlockingSend, {}, rest};
        o.result.add(tr.destination);
        out.push_back(std::move(o));
      }
      break;
    }
    case Label::Broadcast:
      broadcast_outcomes(p, rest, t, out);
      break;
    case Label::Receive:
      break;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const StepOutcome& a, const StepOutcome& b) { return a.result < b.result; });
  return out;
}

std::vector<StepOutcome> successors(const Protocol& p, const Configuration& c) {
  std::vector<StepOutcome> out;
  for (std::size_t t = 0; t < p.transitions().size(); ++t) {
    auto part = successors(p, c, t);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

StepOutcome apply_step(const Protocol& p, const Configuration& c, const ScriptStep& step) {
  if (step.transition >= p.transitions().size()) throw Error("transition index out of range");
  const Transition& tr = p.transition(step.transition);
  if (tr.label == Label::Receive) throw Error("a reception cannot fire on its own: " + p.describe(tr));
  if (c.count(tr.source) == 0) throw Error("transition disabled: no process on " + p.state_name(tr.source));
  Configuration rest = c;
  rest.remove(tr.source);
  StepOutcome o;
  o.transition = step.transition;
  o.receivers = step.receivers;
  std::sort(o.receivers.begin(), o.receivers.end());

  auto check_reception = [&](std::size_t r, std::uint64_t k) {
    if (r >= p.transitions().size()) throw Error("reception index out of range");
    const Transition& rt = p.transition(r);
    if (rt.label != Label::Receive || rt.message != tr.message)
      throw Error("'" + p.describe(rt) + "' does not receive the message of '" + p.describe(tr) + "'");
    if (k == 0) throw Error("zero receiver count for '" + p.describe(rt) + "'");
  };

  switch (tr.label) {
    case Label::Internal:
      if (!o.receivers.empty()) throw Error("internal step with receivers");
      o.kind = StepKind::Internal;
      o.result = rest;
      break;
    case Label::Send: {
      bool someone = std::any_of(p.receptions_of(tr.message).begin(), p.receptions_of(tr.message).end(),
                                 [&](std::size_t r) { return rest.count(p.transition(r).source) > 0; });
      if (o.receivers.empty()) {
        if (someone) throw Error("a process can receive '" + p.message_name(tr.message) + "': rendez-vous required");
        o.kind = StepKind::NonBlockingSend;
        o.result = rest;
      } else {
        if (o.receivers.size() != 1 || o.receivers[0].second != 1)
          throw Error("a send has exactly one receiver");
        check_reception(o.receivers[0].first, 1);
        const Transition& rt = p.transition(o.receivers[0].first);
        if (rest.count(rt.source) == 0) throw Error("no receiver on " + p.state_name(rt.source));
        o.kind = StepKind::RendezVous;
        o.result = rest;
        o.result.remove(rt.source);
        o.result.add(rt.destination);
      }
      break;
    }
    case Label::Broadcast: {
      std::map<StateId, std::uint64_t> per_state;
      for (std::size_t i = 0; i < o.receivers.size(); ++i) {
        const auto& [r, k] = o.receivers[i];
        if (i > 0 && o.receivers[i - 1].first == r) throw Error("repeated reception in resolution");
        check_reception(r, k);
        per_state[p.transition(r).source] += k;
      }
      for (const auto& [q, k] : rest.entries()) {
        if (p.receives(q, tr.message) && per_state[q] != k)
          throw Error("all " + std::to_string(k) + " process(es) on " + p.state_name(q) + " must receive");
      }
      for (const auto& [q, k] : per_state) {
        if (rest.count(q) != k) throw Error("resolution moves absent processes from " + p.state_name(q));
      }
      o.kind = StepKind::BroadcastDelivery;
      o.result = rest;
      for (const auto& [r, k] : o.receivers) {
        o.result.remove(p.transition(r).source, k);
        o.result.add(p.transition(r).destination, k);
      }
      break;
    }
    case Label::Receive:
      break;
  }
  o.result.add(tr.destination);
  return o;
}

ScriptStep default_step(const Protocol& p, const Configuration& c, std::size_t t) {
  const Transition& tr = p.transition(t);
  if (c.count(tr.source) == 0) throw Error("transition disabled: " + p.describe(tr));
  Configuration rest = c;
  rest.remove(tr.source);
  ScriptStep s{t, {}};
  if (tr.label == Label::Send) {
    for (std::size_t r : p.receptions_of(tr.message)) {
      if (rest.count(p.transition(r).source) > 0) {
        s.receivers.emplace_back(r, 1);
        break;
      }
    }
  } else if (tr.label == Label::Broadcast) {
    for (const auto& [q, k] : rest.entries()) {
      const auto& options = p.receptions(q, tr.message);
      if (!options.empty()) s.receivers.emplace_back(options.front(), k);
    }
    std::sort(s.receivers.begin(), s.receivers.end());
  }
  return s;
}

std::vector<Configuration> replay_from(const Protocol& p, const Configuration& start,
                                       const std::vector<ScriptStep>& steps) {
  std::vector<Configuration> trace{start};
  for (std::size_t k = 0; k < steps.size(); ++k) {
    try {
      trace.push_back(apply_step(p, trace.back(), steps[k]).result);
    } catch (const ReplayError&) {
      throw;
    } catch (const Error& e) {
      throw ReplayError(k, e.what());
    }
  }
  return trace;
}

std::vector<Configuration> replay(const Protocol& p, const ExecutionScript& script) {
  if (script.initial_size == 0) throw Error("initial_size must be positive");
  return replay_from(p, Configuration::uniform(p.initial(), script.initial_size), script.steps);
}

ReachSet explore(const Protocol& p, std::uint64_t n, const Limits& limits) {
  if (n == 0) throw Error("explore needs n >= 1");
  ReachSet rs;
  std::unordered_map<Configuration, std::size_t, ConfigurationHash> index;
  Configuration init = Configuration::uniform(p.initial(), n);
  index.emplace(init, 0);
  rs.configurations.push_back(init);
  rs.depth.push_back(0);
  for (std::size_t i = 0; i < rs.configurations.size(); ++i) {
    Configuration c = rs.configurations[i];
    auto next = successors(p, c);
    if (limits.max_depth && rs.depth[i] >= *limits.max_depth) {
      if (std::any_of(next.begin(), next.end(), [&](const StepOutcome& o) { return !index.count(o.result); }))
        rs.truncated = true;
      continue;
    }
    for (auto& o : next) {
      if (index.count(o.result)) continue;
      if (rs.configurations.size() >= limits.max_states) {
        rs.truncated = true;
        return rs;
      }
      index.emplace(o.result, rs.configurations.size());
      rs.configurations.push_back(std::move(o.result));
      rs.depth.push_back(rs.depth[i] + 1);
    }
  }
  return rs;
}

CoverResult cover_query(const Protocol& p, std::uint64_t n, const Configuration& target, const Limits& limits) {
  if (n == 0) throw Error("cover_query needs n >= 1");
  if (target.size() > n) throw Error("target has more processes than n");
  struct Node {
    Configuration config;
    std::size_t parent;
    ScriptStep step;
    std::size_t depth;
  };
  std::vector<Node> nodes;
  std::unordered_map<Configuration, std::size_t, ConfigurationHash> index;
  Configuration init = Configuration::uniform(p.initial(), n);
  nodes.push_back({init, 0, {}, 0});
  index.emplace(init, 0);
  CoverResult res;
  bool truncated = false;
  std::optional<std::size_t> hit;
  if (target.leq(init)) hit = 0;

  for (std::size_t i = 0; !hit && i < nodes.size(); ++i) {
    Configuration c = nodes[i].config;
    auto next = successors(p, c);
    if (limits.max_depth && nodes[i].depth >= *limits.max_depth) {
      if (std::any_of(next.begin(), next.end(), [&](const StepOutcome& o) { return !index.count(o.result); }))
        truncated = true;
      continue;
    }
    for (auto& o : next) {
      if (index.count(o.result)) continue;
      if (nodes.size() >= limits.max_states) {
        truncated = true;
        break;
      }
      index.emplace(o.result, nodes.size());
      bool covers = target.leq(o.result);
      nodes.push_back({std::move(o.result), i, {o.transition, std::move(o.receivers)}, nodes[i].depth + 1});
      if (covers) {
        hit = nodes.size() - 1;
        break;
      }
    }
    if (truncated) break;
  }
  res.explored = nodes.size();
  if (!hit) {
    res.verdict = truncated ? Verdict::Unknown : Verdict::NotCovered;
    return res;
  }
  ExecutionScript script;
  script.initial_size = n;
  for (std::size_t i = *hit; i != 0; i = nodes[i].parent) script.steps.push_back(nodes[i].step);
  std::reverse(script.steps.begin(), script.steps.end());
  auto trace = replay(p, script);
  if (!target.leq(trace.back())) throw Error("internal: witness does not cover the target");
  res.verdict = Verdict::Covered;
  res.witness = std::move(script);
  return res;
}

LiftedExecution monotone_lift(const Protocol& p, const std::vector<Configuration>& trace,
                              const std::vector<ScriptStep>& steps, const Configuration& d0) {
  if (trace.size() != steps.size() + 1) throw Error("trace and steps disagree in length");
  if (!trace.front().leq(d0)) throw Error("lift start does not dominate the trace start");
  LiftedExecution out;
  out.trace.push_back(d0);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Configuration& c = trace[i];
    const Configuration& d = out.trace.back();
    const ScriptStep& step = steps[i];
    const Transition& tr = p.transition(step.transition);
    ScriptStep lifted{step.transition, {}};
    if (tr.label == Label::Send) {
      if (!step.receivers.empty()) {
        lifted.receivers = step.receivers;
      } else {
        // Only surplus processes can be present as receivers here; the send
        // cannot stay non-blocking in that case.
        lifted = default_step(p, d, step.transition);
      }
    } else if (tr.label == Label::Broadcast) {
      Configuration rest_c = c;
      rest_c.remove(tr.source);
      Configuration rest_d = d;
      rest_d.remove(tr.source);
      std::map<std::size_t, std::uint64_t> merged(step.receivers.begin(), step.receivers.end());
      for (const auto& [q, k] : rest_d.entries()) {
        const auto& options = p.receptions(q, tr.message);
        if (options.empty()) continue;
        std::uint64_t extra = k - rest_c.count(q);
        if (extra > 0) merged[options.front()] += extra;
      }
      lifted.receivers.assign(merged.begin(), merged.end());
    }
    Configuration next;
    try {
      next = apply_step(p, d, lifted).result;
    } catch (const Error& e) {
      throw ReplayError(i, std::string("lift failed: ") + e.what());
    }
    if (!trace[i + 1].leq(next)) throw ReplayError(i, "lift lost domination");
    out.trace.push_back(std::move(next));
    out.steps.push_back(std::move(lifted));
  }
  return out;
}

}  // namespace nbcover
