#include "nbcover/state_cover.hpp"

#include <limits>
#include <map>
#include <tuple>

#include "nbcover/error.hpp"

namespace nbcover {

namespace {

void require_domain(const Protocol& p) {
  auto report = classify(p);
  if (!report.wait_only) throw PreconditionError("protocol is not wait-only");
  if (!report.initial_is_action) throw PreconditionError("initial state is a waiting state");
  if (has_internal(p)) throw PreconditionError("protocol has internal transitions; normalize them first");
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

struct Assembled {
  std::uint64_t size = 1;
  std::vector<ScriptStep> steps;
};

class WitnessBuilder {
 public:
  WitnessBuilder(const Protocol& p, const SaturationResult& sat) : p_(p), sat_(sat) {}

  const Assembled& build(StateId q) {
    if (auto it = memo_.find(q); it != memo_.end()) return it->second;
    const Justification& j = *sat_.justification.at(q);
    Assembled out;
    switch (j.rule) {
      case SaturationRule::Initial:
        break;
      case SaturationRule::ActionStep: {
        out = build(p_.transition(j.transition).source);
        auto trace = replay_from(p_, start(out.size), out.steps);
        out.steps.push_back(default_step(p_, trace.back(), j.transition));
        break;
      }
      case SaturationRule::SendPair:
      case SaturationRule::BroadcastPair:
        out = glue(j);
        break;
    }
    return memo_.emplace(q, std::move(out)).first->second;
  }

 private:
  Configuration start(std::uint64_t n) const { return Configuration::uniform(p_.initial(), n); }

  // Runs the sender's witness with the receiver's processes idling on q_in,
  // then the receiver's witness lifted over what the first one left behind.
  // Action states never receive, so the sender's process stays put; the final
  // emission is then resolved so that the receiver on q2 takes the reception.
  Assembled glue(const Justification& j) {
    const Transition& recv = p_.transition(j.transition);
    const std::size_t emit = *j.partner;
    const Transition& sender = p_.transition(emit);
    Assembled first = build(sender.source);
    Assembled second = build(recv.source);

    Assembled out;
    out.size = first.size + second.size;
    out.steps = first.steps;
    Configuration mid = replay_from(p_, start(out.size), first.steps).back();

    auto second_trace = replay_from(p_, start(second.size), second.steps);
    auto lifted = monotone_lift(p_, second_trace, second.steps, mid);
    out.steps.insert(out.steps.end(), lifted.steps.begin(), lifted.steps.end());
    const Configuration& end = lifted.trace.back();

    ScriptStep last{emit, {}};
    if (sender.label == Label::Send) {
      last.receivers.emplace_back(j.transition, 1);
    } else {
      Configuration rest = end;
      rest.remove(sender.source);
      for (const auto& [q, k] : rest.entries()) {
        const auto& options = p_.receptions(q, sender.message);
        if (options.empty()) continue;
        last.receivers.emplace_back(q == recv.source ? j.transition : options.front(), k);
      }
      std::sort(last.receivers.begin(), last.receivers.end());
    }
    out.steps.push_back(std::move(last));
    return out;
  }

  const Protocol& p_;
  const SaturationResult& sat_;
  std::map<StateId, Assembled> memo_;
};

}  // namespace

const char* rule_name(SaturationRule rule) {
  switch (rule) {
    case SaturationRule::Initial: return "initial";
    case SaturationRule::ActionStep: return "action-step";
    case SaturationRule::SendPair: return "send-rendezvous-pair";
    case SaturationRule::BroadcastPair: return "broadcast-pair";
  }
  return "?";
}

SaturationResult saturate(const Protocol& p) {
  require_domain(p);
  const std::size_t n = p.num_states();
  SaturationResult res;
  res.coverable = StateSet(n);
  res.round_of.assign(n, std::nullopt);
  res.justification.assign(n, std::nullopt);
  res.bound.assign(n, 0);

  const StateId init = p.initial();
  res.coverable.insert(init);
  res.round_of[init] = 0;
  res.justification[init] = Justification{};
  res.bound[init] = 1;
  res.rounds.push_back({0, {init}, {Justification{}}});

  for (std::size_t round = 1;; ++round) {
    using Key = std::tuple<int, std::size_t, std::size_t>;
    std::map<StateId, std::pair<Key, Justification>> best;
    auto offer = [&](StateId q, Key key, Justification j) {
      if (res.coverable.contains(q)) return;
      auto it = best.find(q);
      if (it == best.end() || key < it->second.first) best[q] = {key, j};
    };
    const auto& ts = p.transitions();
    for (std::size_t t = 0; t < ts.size(); ++t) {
      const Transition& tr = ts[t];
      if (tr.label == Label::Receive) {
        if (!res.coverable.contains(tr.source)) continue;
        for (std::size_t s : p.emissions(tr.message)) {
          const Transition& st = ts[s];
          if (!res.coverable.contains(st.source) || st.source == tr.source) continue;
          SaturationRule rule = st.label == Label::Send ? SaturationRule::SendPair : SaturationRule::BroadcastPair;
          offer(tr.destination, {static_cast<int>(rule), t, s}, {rule, t, s});
        }
      } else if (res.coverable.contains(tr.source)) {
        offer(tr.destination, {static_cast<int>(SaturationRule::ActionStep), t, 0},
              {SaturationRule::ActionStep, t, std::nullopt});
      }
    }
    if (best.empty()) break;
    SaturationRound r;
    r.round = round;
    for (const auto& [q, entry] : best) {
      const Justification& j = entry.second;
      std::uint64_t b = 0;
      if (j.rule == SaturationRule::ActionStep) {
        b = res.bound[ts[j.transition].source];
      } else {
        b = saturating_add(res.bound[ts[*j.partner].source], res.bound[ts[j.transition].source]);
      }
      res.bound[q] = b;
      res.round_of[q] = round;
      res.justification[q] = j;
      r.added.push_back(q);
      r.justifications.push_back(j);
    }
    for (StateId q : r.added) res.coverable.insert(q);
    res.rounds.push_back(std::move(r));
  }
  return res;
}

StateCoverAnswer is_state_coverable(const Protocol& p, StateId q) {
  if (q >= p.num_states()) throw Error("unknown state index " + std::to_string(q));
  auto sat = saturate(p);
  if (!sat.coverable.contains(q)) return {false, std::nullopt};
  return {true, sat.bound[q]};
}

ExecutionScript witness_execution(const Protocol& p, StateId q) { return witness_execution(p, saturate(p), q); }

ExecutionScript witness_execution(const Protocol& p, const SaturationResult& sat, StateId q) {
  if (q >= p.num_states()) throw Error("unknown state index " + std::to_string(q));
  if (!sat.coverable.contains(q)) throw Error("state " + p.state_name(q) + " is not coverable");
  if (sat.bound[q] == std::numeric_limits<std::uint64_t>::max()) throw Error("witness size overflows");
  WitnessBuilder builder(p, sat);
  const Assembled& a = builder.build(q);
  ExecutionScript script{a.size, a.steps};
  auto trace = replay(p, script);
  if (trace.back().count(q) == 0) throw Error("internal: assembled witness does not cover " + p.state_name(q));
  return script;
}

}  // namespace nbcover
