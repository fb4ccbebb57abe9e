#include "nbcover/tokenset.hpp"

#include <algorithm>
#include <deque>

#include "nbcover/error.hpp"

namespace nbcover {

namespace {

void require_domain(const Protocol& p) {
  auto report = classify(p);
  if (!report.wait_only) throw PreconditionError("protocol is not wait-only");
  if (!report.rdv_only) throw PreconditionError("protocol has broadcast transitions");
  if (!report.initial_is_action) throw PreconditionError("initial state is a waiting state");
  if (has_internal(p)) throw PreconditionError("protocol has internal transitions; normalize them first");
}

// Some emission of m leaves a state of s.
bool emitted_from(const Protocol& p, const StateSet& s, MessageId m) {
  const auto& es = p.emissions(m);
  return std::any_of(es.begin(), es.end(), [&](std::size_t e) { return s.contains(p.transition(e).source); });
}

// Some reception of m leaves a state of s.
bool received_from(const Protocol& p, const StateSet& s, MessageId m) {
  const auto& rs = p.receptions_of(m);
  return std::any_of(rs.begin(), rs.end(), [&](std::size_t r) { return s.contains(p.transition(r).source); });
}

std::string token_name(const Protocol& p, const Token& t) {
  return "(" + p.state_name(t.first) + "," + p.message_name(t.second) + ")";
}

}  // namespace

StateSet TokenSet::token_states() const {
  StateSet out(s.universe());
  for (const auto& t : toks) out.insert(t.first);
  return out;
}

TokenSet initial_token_set(const Protocol& p) {
  TokenSet g{StateSet(p.num_states()), {}};
  g.s.insert(p.initial());
  return g;
}

bool conflict_free(const Protocol& p, const TokenSet& g, StateId q1, StateId q2) {
  if (q1 == q2) throw Error("conflict-freeness needs two different states");
  auto holders = g.token_states();
  if (!holders.contains(q1) || !holders.contains(q2)) throw Error("conflict-freeness needs two token states");
  for (const auto& [a, m1] : g.toks) {
    if (a != q1) continue;
    for (const auto& [b, m2] : g.toks) {
      if (b != q2) continue;
      if (m1 != m2 && !p.receives(q2, m1) && !p.receives(q1, m2)) return true;
    }
  }
  return false;
}

bool respects(const Protocol& p, const TokenSet& g, const Configuration& c) {
  auto holders = g.token_states();
  for (const auto& [q, k] : c.entries()) {
    if (g.s.contains(q)) continue;
    if (!holders.contains(q) || k != 1) return false;
    for (const auto& [q2, k2] : c.entries()) {
      if (q2 == q || k2 != 1 || !holders.contains(q2)) continue;
      if (!conflict_free(p, g, q, q2)) return false;
    }
  }
  return true;
}

ConsistencyReport consistent(const Protocol& p, const TokenSet& g) {
  ConsistencyReport rep;
  const auto& ts = p.transitions();
  for (const auto& tok : g.toks) {
    // Paths (q0, !m, q1)(q1, ?m1, q2)...(qk, ?mk, q) with q0 in S and every m_i emitted from S.
    StateSet seen(p.num_states());
    std::deque<StateId> todo;
    for (std::size_t e : p.emissions(tok.second)) {
      const Transition& tr = ts[e];
      if (tr.label == Label::Send && g.s.contains(tr.source) && !seen.contains(tr.destination)) {
        seen.insert(tr.destination);
        todo.push_back(tr.destination);
      }
    }
    while (!todo.empty()) {
      StateId x = todo.front();
      todo.pop_front();
      for (std::size_t t : p.outgoing(x)) {
        const Transition& tr = ts[t];
        if (tr.label != Label::Receive || seen.contains(tr.destination)) continue;
        if (!emitted_from(p, g.s, tr.message)) continue;
        seen.insert(tr.destination);
        todo.push_back(tr.destination);
      }
    }
    if (!seen.contains(tok.first)) {
      rep.ok = false;
      rep.violations.push_back("token " + token_name(p, tok) + " has no justifying path from S");
    }
  }
  for (auto i = g.toks.begin(); i != g.toks.end(); ++i) {
    for (auto j = std::next(i); j != g.toks.end(); ++j) {
      if (i->first == j->first) continue;
      bool forward = p.receives(j->first, i->second);
      bool backward = p.receives(i->first, j->second);
      if (forward != backward) {
        rep.ok = false;
        rep.violations.push_back("tokens " + token_name(p, *i) + " and " + token_name(p, *j) +
                                 " are neither mutually received nor mutually unreceived");
      }
    }
  }
  return rep;
}

FApplication apply_F_traced(const Protocol& p, const TokenSet& g) {
  require_domain(p);
  const auto& ts = p.transitions();
  const StateSet& S = g.s;
  const auto& toks = g.toks;
  FApplication out;
  TokenSet& mid = out.intermediate;
  mid = g;

  auto add_state = [&](StateSet& target, StateId q, const char* rule, std::vector<std::size_t> trs,
                       std::vector<Token> used) {
    if (target.contains(q)) return;
    target.insert(q);
    out.log.push_back({rule, q, std::nullopt, std::move(trs), std::move(used)});
  };
  auto add_token = [&](Token t, const char* rule, std::vector<std::size_t> trs, std::vector<Token> used) {
    if (!mid.toks.insert(t).second) return;
    out.log.push_back({rule, t.first, t.second, std::move(trs), std::move(used)});
  };

  // Every condition below reads the input (S, Toks); only the conclusions
  // write to (S'', Toks''), so a single pass yields the least sets.
  for (std::size_t t = 0; t < ts.size(); ++t) {
    const Transition& tr = ts[t];
    if (tr.label != Label::Send || !S.contains(tr.source)) continue;
    const MessageId a = tr.message;
    if (!p.receives(tr.destination, a) || received_from(p, S, a)) {
      add_state(mid.s, tr.destination, "2a", {t}, {});
    } else {
      add_token({tr.destination, a}, "2b", {t}, {});
    }
  }
  for (std::size_t t = 0; t < ts.size(); ++t) {
    const Transition& tr = ts[t];
    if (tr.label != Label::Receive) continue;
    const MessageId a = tr.message;
    if (!emitted_from(p, S, a)) continue;
    const StateId q = tr.source;
    const StateId q2 = tr.destination;
    if (S.contains(q)) {
      add_state(mid.s, q2, "3", {t}, {});
    } else if (toks.count({q, a})) {
      add_state(mid.s, q2, "3", {t}, {{q, a}});
    }
    for (auto it = toks.lower_bound({q, 0}); it != toks.end() && it->first == q; ++it) {
      const MessageId m = it->second;
      if (m == a) continue;
      if (!p.receives(q2, m)) {
        add_state(mid.s, q2, "4a", {t}, {*it});
      } else {
        add_token({q2, m}, "4b", {t}, {*it});
      }
    }
  }

  TokenSet& res = out.result;
  res.s = mid.s;
  std::vector<Token> pool(mid.toks.begin(), mid.toks.end());
  for (const auto& [q1, m1] : pool) {
    for (const auto& [q2, m2] : pool) {
      if (m1 != m2 && !p.receives(q1, m2) && p.receives(q2, m1))
        add_state(res.s, q1, "6", {}, {{q1, m1}, {q2, m2}});
    }
  }
  for (const auto& [q1, m1] : pool) {
    for (std::size_t r : p.receptions_of(m1)) {
      const StateId q2 = ts[r].source;
      const StateId q3 = ts[r].destination;
      for (auto it = mid.toks.lower_bound({q2, 0}); it != mid.toks.end() && it->first == q2; ++it) {
        const MessageId m2 = it->second;
        if (m2 != m1 && mid.toks.count({q3, m2}))
          add_state(res.s, q1, "7", {r}, {{q1, m1}, {q2, m2}, {q3, m2}});
      }
    }
  }
  for (const auto& [q1, m1] : pool) {
    for (const auto& [q2, m2] : pool) {
      if (m1 == m2 || p.receives(q2, m1) || p.receives(q1, m2)) continue;
      for (const auto& [q3, m3] : pool) {
        if (m3 == m1 || m3 == m2) continue;
        if (p.receives(q3, m1) && p.receives(q3, m2) && p.receives(q2, m3) && p.receives(q1, m3))
          add_state(res.s, q1, "8", {}, {{q1, m1}, {q2, m2}, {q3, m3}});
      }
    }
  }
  for (const auto& t : mid.toks) {
    if (!res.s.contains(t.first)) res.toks.insert(t);
  }
  return out;
}

TokenSet apply_F(const Protocol& p, const TokenSet& g) { return apply_F_traced(p, g).result; }

FixpointTrace fixpoint(const Protocol& p) {
  require_domain(p);
  const std::size_t bound = p.num_states() * p.num_states() * std::max<std::size_t>(p.num_messages(), 1) + 1;
  FixpointTrace trace;
  trace.iterates.push_back(initial_token_set(p));
  for (std::size_t i = 0; i < bound; ++i) {
    auto step = apply_F_traced(p, trace.iterates.back());
    bool stable = step.result == trace.iterates.back();
    trace.iterates.push_back(std::move(step.result));
    trace.rule_log.push_back(std::move(step.log));
    if (stable) return trace;
  }
  throw Error("token-set iteration exceeded its bound");
}

bool check_conf_cover_rdv(const Protocol& p, const Configuration& target) {
  if (target.empty()) throw Error("empty target configuration");
  return respects(p, fixpoint(p).iterates.back(), target);
}

std::string format_token_set(const Protocol& p, const TokenSet& g) {
  std::string out = "({";
  bool first = true;
  for (StateId q : g.s.members()) {
    out += (first ? "" : ", ") + p.state_name(q);
    first = false;
  }
  out += "}, {";
  first = true;
  for (const auto& t : g.toks) {
    out += (first ? "" : ", ") + token_name(p, t);
    first = false;
  }
  return out + "})";
}

}  // namespace nbcover
