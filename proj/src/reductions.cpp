#include "nbcover/reductions.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "nbcover/error.hpp"

namespace nbcover {

namespace {

std::vector<std::string_view> tokens_of(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto tok = tokens_of(text.substr(pos, end - pos));
    if (!tok.empty()) f(line_no, tok);
    pos = end + 1;
  }
}

bool parse_bool(std::size_t line, std::string_view s) {
  if (s == "T") return true;
  if (s == "F") return false;
  throw ParseError(line, "expected T or F, got '" + std::string(s) + "'");
}

// Portable draws from the standard-specified engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

std::string value_message(const std::string& x, bool b) { return x + (b ? "_T" : "_F"); }

ProtocolWithTarget build_cvp(const Circuit& c, Label emit, const std::string& name) {
  if (c.gates.empty()) throw Error("the reduction needs at least one gate");
  ProtocolBuilder b(name, "q_in");
  for (const auto& [v, val] : c.inputs) b.add("q_in", emit, value_message(v, val), "q_in");
  for (std::size_t j = 1; j <= c.gates.size(); ++j) b.add("q_in", Label::Internal, "", "g" + std::to_string(j) + "_0");
  for (std::size_t j = 1; j <= c.gates.size(); ++j) {
    const Gate& g = c.gates[j - 1];
    const std::string pre = "g" + std::to_string(j);
    const std::string q0 = pre + "_0", q1 = pre + "_1", top = pre + "_top", bot = pre + "_bot";
    switch (g.op) {
      case GateOp::Or:
        b.add(q0, Label::Receive, value_message(g.operands[0], true), top);
        b.add(q0, Label::Receive, value_message(g.operands[1], true), top);
        b.add(q0, Label::Receive, value_message(g.operands[0], false), q1);
        b.add(q1, Label::Receive, value_message(g.operands[1], false), bot);
        break;
      case GateOp::And:
        b.add(q0, Label::Receive, value_message(g.operands[0], false), bot);
        b.add(q0, Label::Receive, value_message(g.operands[1], false), bot);
        b.add(q0, Label::Receive, value_message(g.operands[0], true), q1);
        b.add(q1, Label::Receive, value_message(g.operands[1], true), top);
        break;
      case GateOp::Not:
        b.add(q0, Label::Receive, value_message(g.operands[0], false), top);
        b.add(q0, Label::Receive, value_message(g.operands[0], true), bot);
        break;
    }
    b.add(top, emit, value_message(g.output, true), top);
    b.add(bot, emit, value_message(g.output, false), bot);
  }
  Protocol p = b.build();
  std::string target = "g" + std::to_string(c.gates.size()) + (c.target ? "_top" : "_bot");
  return {p, Configuration::uniform(p.state_id(target), 1), target};
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
  Circuit c;
  std::set<std::string> defined;
  bool have_output = false;
  for_each_line(text, [&](std::size_t line, const std::vector<std::string_view>& tok) {
    if (have_output) throw ParseError(line, "nothing may follow the output line");
    auto fresh = [&](std::string_view id) {
      if (!is_identifier(id)) throw ParseError(line, "bad identifier '" + std::string(id) + "'");
      if (!defined.insert(std::string(id)).second)
        throw ParseError(line, "'" + std::string(id) + "' defined twice");
    };
    auto known = [&](std::string_view id) {
      if (!defined.count(std::string(id))) throw ParseError(line, "'" + std::string(id) + "' used before definition");
    };
    if (tok[0] == "input" && tok.size() == 3) {
      if (!c.gates.empty()) throw ParseError(line, "inputs must precede gates");
      fresh(tok[1]);
      c.inputs.emplace_back(std::string(tok[1]), parse_bool(line, tok[2]));
    } else if (tok[0] == "gate" && tok.size() >= 4) {
      Gate g;
      g.output = std::string(tok[1]);
      if (tok[2] == "NOT" && tok.size() == 4) {
        g.op = GateOp::Not;
      } else if ((tok[2] == "AND" || tok[2] == "OR") && tok.size() == 5) {
        g.op = tok[2] == "AND" ? GateOp::And : GateOp::Or;
      } else {
        throw ParseError(line, "expected 'gate <o> AND|OR <x> <y>' or 'gate <o> NOT <x>'");
      }
      for (std::size_t i = 3; i < tok.size(); ++i) {
        known(tok[i]);
        g.operands.emplace_back(tok[i]);
      }
      fresh(tok[1]);
      c.gates.push_back(std::move(g));
    } else if (tok[0] == "output" && tok.size() == 3) {
      known(tok[1]);
      c.output = std::string(tok[1]);
      c.target = parse_bool(line, tok[2]);
      if (!c.gates.empty() && c.output != c.gates.back().output)
        throw ParseError(line, "output must be the last gate's output");
      have_output = true;
    } else {
      throw ParseError(line, "unrecognized line");
    }
  });
  if (!have_output) throw ParseError(0, "missing output line");
  return c;
}

std::string render_circuit(const Circuit& c) {
  std::ostringstream out;
  for (const auto& [v, b] : c.inputs) out << "input " << v << (b ? " T" : " F") << "\n";
  for (const auto& g : c.gates) {
    out << "gate " << g.output << (g.op == GateOp::And ? " AND" : g.op == GateOp::Or ? " OR" : " NOT");
    for (const auto& x : g.operands) out << " " << x;
    out << "\n";
  }
  out << "output " << c.output << (c.target ? " T" : " F") << "\n";
  return out.str();
}

std::map<std::string, bool> eval_circuit(const Circuit& c) {
  std::map<std::string, bool> val(c.inputs.begin(), c.inputs.end());
  for (const auto& g : c.gates) {
    bool x = val.at(g.operands[0]);
    switch (g.op) {
      case GateOp::Not: val[g.output] = !x; break;
      case GateOp::And: val[g.output] = x && val.at(g.operands[1]); break;
      case GateOp::Or: val[g.output] = x || val.at(g.operands[1]); break;
    }
  }
  return val;
}

ProtocolWithTarget cvp_to_protocol(const Circuit& c) { return build_cvp(c, Label::Broadcast, "cvp"); }

ProtocolWithTarget cvp_to_rdv_protocol(const Circuit& c) { return build_cvp(c, Label::Send, "cvp_rdv"); }

DfaSet parse_dfa_set(std::string_view text) {
  DfaSet d;
  std::optional<std::vector<std::string>> sigma_of_current;
  auto note_state = [](Dfa& a, std::string_view s) {
    if (std::find(a.states.begin(), a.states.end(), s) == a.states.end()) a.states.emplace_back(s);
  };
  auto finish = [&](std::size_t line) {
    if (d.automata.empty()) return;
    Dfa& a = d.automata.back();
    if (!sigma_of_current) throw ParseError(line, "automaton '" + a.name + "' lacks a sigma line");
    if (a.initial.empty()) throw ParseError(line, "automaton '" + a.name + "' lacks an init line");
    if (a.accepting.empty()) throw ParseError(line, "automaton '" + a.name + "' lacks an accept line");
    for (const auto& q : a.states) {
      for (const auto& x : d.alphabet) {
        if (!a.delta.count({q, x}))
          throw ParseError(line, "automaton '" + a.name + "' has no move from " + q + " on " + x);
      }
    }
    sigma_of_current.reset();
  };
  for_each_line(text, [&](std::size_t line, const std::vector<std::string_view>& tok) {
    for (auto t : tok) {
      if (!is_identifier(t)) throw ParseError(line, "bad identifier '" + std::string(t) + "'");
    }
    if (tok[0] == "dfa" && tok.size() == 2) {
      finish(line);
      d.automata.push_back({std::string(tok[1]), {}, {}, {}, {}});
      return;
    }
    if (d.automata.empty()) throw ParseError(line, "expected 'dfa <name>'");
    Dfa& a = d.automata.back();
    if (tok[0] == "sigma" && tok.size() >= 2) {
      std::vector<std::string> letters(tok.begin() + 1, tok.end());
      std::set<std::string> uniq(letters.begin(), letters.end());
      if (uniq.size() != letters.size()) throw ParseError(line, "repeated letter in sigma");
      if (d.automata.size() == 1) {
        d.alphabet = letters;
      } else if (uniq != std::set<std::string>(d.alphabet.begin(), d.alphabet.end())) {
        throw ParseError(line, "all automata must share one alphabet");
      }
      sigma_of_current = letters;
    } else if (tok[0] == "init" && tok.size() == 2) {
      if (!a.initial.empty()) throw ParseError(line, "duplicate init");
      a.initial = std::string(tok[1]);
      note_state(a, tok[1]);
    } else if (tok[0] == "accept" && tok.size() == 2) {
      if (!a.accepting.empty()) throw ParseError(line, "exactly one accepting state per automaton");
      a.accepting = std::string(tok[1]);
      note_state(a, tok[1]);
    } else if (tok[0] == "delta" && tok.size() == 4) {
      if (!sigma_of_current) throw ParseError(line, "sigma must precede delta");
      std::string letter(tok[2]);
      if (std::find(d.alphabet.begin(), d.alphabet.end(), letter) == d.alphabet.end())
        throw ParseError(line, "letter '" + letter + "' not in sigma");
      if (!a.delta.emplace(std::make_pair(std::string(tok[1]), letter), std::string(tok[3])).second)
        throw ParseError(line, "nondeterministic move from " + std::string(tok[1]) + " on " + letter);
      note_state(a, tok[1]);
      note_state(a, tok[3]);
    } else {
      throw ParseError(line, "unrecognized line");
    }
  });
  finish(0);
  if (d.automata.empty()) throw ParseError(0, "no automata");
  return d;
}

std::string render_dfa_set(const DfaSet& d) {
  std::ostringstream out;
  for (const auto& a : d.automata) {
    out << "dfa " << a.name << "\nsigma";
    for (const auto& x : d.alphabet) out << " " << x;
    out << "\ninit " << a.initial << "\naccept " << a.accepting << "\n";
    std::vector<std::string> sorted(a.states);
    std::sort(sorted.begin(), sorted.end());
    for (const auto& q : sorted) {
      for (const auto& x : d.alphabet) out << "delta " << q << " " << x << " " << a.delta.at({q, x}) << "\n";
    }
  }
  return out.str();
}

ProtocolWithTarget dfa_intersection_to_protocol(const DfaSet& d) {
  if (std::find(d.alphabet.begin(), d.alphabet.end(), "go") != d.alphabet.end())
    throw Error("letter 'go' clashes with the reset message");
  ProtocolBuilder b("dfa_intersection", "q_in");
  b.add("q_in", Label::Internal, "", "q_s");
  auto dispatcher = [](std::size_t i) { return "q_" + std::to_string(i + 1); };
  // Automaton states are renamed apart: a<i>_<state>.
  auto local = [](std::size_t i, const std::string& q) { return "a" + std::to_string(i + 1) + "_" + q; };
  for (std::size_t i = 0; i < d.automata.size(); ++i) b.add("q_in", Label::Internal, "", dispatcher(i));
  b.add("q_s", Label::Broadcast, "go", "q_s");
  for (const auto& x : d.alphabet) b.add("q_s", Label::Broadcast, x, "q_s");
  for (std::size_t i = 0; i < d.automata.size(); ++i) {
    const Dfa& a = d.automata[i];
    b.add(dispatcher(i), Label::Receive, "go", local(i, a.initial));
    for (const auto& q : a.states) {
      for (const auto& x : d.alphabet) b.add(local(i, q), Label::Receive, x, local(i, a.delta.at({q, x})));
    }
    for (const auto& q : a.states) b.add(local(i, q), Label::Receive, "go", "q_fail");
  }
  Protocol p = b.build();
  Configuration target;
  for (std::size_t i = 0; i < d.automata.size(); ++i) target.add(p.state_id(local(i, d.automata[i].accepting)));
  return {p, target, d.automata.size() == 1 ? local(0, d.automata[0].accepting) : std::string()};
}

bool dfa_intersection_nonempty(const DfaSet& d) {
  using Tuple = std::vector<std::string>;
  Tuple start;
  for (const auto& a : d.automata) start.push_back(a.initial);
  auto accepting = [&](const Tuple& t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] != d.automata[i].accepting) return false;
    }
    return true;
  };
  std::set<Tuple> seen{start};
  std::deque<Tuple> todo{start};
  while (!todo.empty()) {
    Tuple t = todo.front();
    todo.pop_front();
    if (accepting(t)) return true;
    for (const auto& x : d.alphabet) {
      Tuple u(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) u[i] = d.automata[i].delta.at({t[i], x});
      if (seen.insert(u).second) todo.push_back(std::move(u));
    }
  }
  return false;
}

Protocol random_protocol(const RandomProtocolParams& params, std::uint64_t seed) {
  if (params.n_states == 0) throw Error("need at least one state");
  Rng rng(seed);
  const std::size_t n = params.n_states;
  const std::size_t k = std::max<std::size_t>(params.n_messages, 1);
  auto state = [](std::size_t i) { return i == 0 ? std::string("q_in") : "s" + std::to_string(i); };
  auto message = [](std::size_t m) { return "m" + std::to_string(m); };
  std::vector<bool> waiting(n, false);
  for (std::size_t i = 1; i < n; ++i) waiting[i] = rng.coin();
  auto label_from = [&](std::size_t i) {
    if (waiting[i]) return Label::Receive;
    if (params.rdv_only) return Label::Send;
    return rng.coin() ? Label::Broadcast : Label::Send;
  };

  ProtocolBuilder b("random_" + std::to_string(seed), state(0));
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t j = rng.below(i);
    Label l = label_from(j);
    b.add(state(j), l, message(rng.below(k)), state(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < k; ++m) {
      if (rng.unit() >= params.density) continue;
      Label l = label_from(i);
      b.add(state(i), l, message(m), state(rng.below(n)));
    }
  }
  return b.build();
}

Circuit random_circuit(const RandomCircuitParams& params, std::uint64_t seed) {
  Rng rng(seed);
  Circuit c;
  std::vector<std::string> ids;
  std::size_t n_inputs = rng.between(1, std::max<std::size_t>(params.max_inputs, 1));
  for (std::size_t i = 1; i <= n_inputs; ++i) {
    c.inputs.emplace_back("v" + std::to_string(i), rng.coin());
    ids.push_back(c.inputs.back().first);
  }
  std::size_t n_gates = rng.between(1, std::max<std::size_t>(params.max_gates, 1));
  for (std::size_t j = 1; j <= n_gates; ++j) {
    Gate g;
    std::uint64_t op = rng.below(3);
    g.op = op == 0 ? GateOp::And : op == 1 ? GateOp::Or : GateOp::Not;
    std::size_t arity = g.op == GateOp::Not ? 1 : 2;
    for (std::size_t a = 0; a < arity; ++a) g.operands.push_back(ids[rng.below(ids.size())]);
    g.output = "o" + std::to_string(j);
    ids.push_back(g.output);
    c.gates.push_back(std::move(g));
  }
  c.output = c.gates.back().output;
  c.target = rng.coin();
  return c;
}

DfaSet random_dfa_set(const RandomDfaParams& params, std::uint64_t seed) {
  Rng rng(seed);
  DfaSet d;
  for (std::size_t x = 0; x < std::max<std::size_t>(params.alphabet, 1); ++x)
    d.alphabet.push_back(std::string(1, static_cast<char>('a' + x)));
  std::size_t count = rng.between(1, std::max<std::size_t>(params.max_automata, 1));
  for (std::size_t i = 1; i <= count; ++i) {
    Dfa a;
    a.name = "A" + std::to_string(i);
    std::size_t n = rng.between(1, std::max<std::size_t>(params.max_states, 1));
    for (std::size_t q = 0; q < n; ++q) a.states.push_back("p" + std::to_string(q));
    a.initial = a.states[0];
    a.accepting = a.states[rng.below(n)];
    for (const auto& q : a.states) {
      for (const auto& x : d.alphabet) a.delta[{q, x}] = a.states[rng.below(n)];
    }
    d.automata.push_back(std::move(a));
  }
  return d;
}

}  // namespace nbcover
