#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nbcover/conf_cover.hpp"
#include "nbcover/error.hpp"
#include "nbcover/reductions.hpp"
#include "nbcover/semantics.hpp"
#include "nbcover/state_cover.hpp"
#include "nbcover/tokenset.hpp"

namespace nbcover::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kCovered = 0;
constexpr int kNotCovered = 1;
constexpr int kInputError = 2;
constexpr int kInconclusive = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_tau_message(const std::string& m) { return m.rfind("__tau_", 0) == 0; }

// Shows normalized tau emissions as the original tau lines.
std::string show(const Protocol& p, std::size_t t) {
  const Transition& tr = p.transition(t);
  if (tr.label != Label::Internal && is_tau_message(p.message_name(tr.message)))
    return p.state_name(tr.source) + " tau " + p.state_name(tr.destination);
  return p.describe(t);
}

json state_list(const Protocol& p, const StateSet& s) {
  json out = json::array();
  for (StateId q : s.members()) out.push_back(p.state_name(q));
  return out;
}

json configuration_json(const Protocol& p, const Configuration& c) {
  json out = json::object();
  for (const auto& [q, k] : c.entries()) out[p.state_name(q)] = k;
  return out;
}

json digest(const Protocol& p) {
  auto rep = classify(p);
  return {{"name", p.name()},
          {"states", p.num_states()},
          {"messages", p.num_messages()},
          {"transitions", p.transitions().size()},
          {"classification",
           {{"wait_only", rep.wait_only},
            {"rdv_only", rep.rdv_only},
            {"broadcast_only", rep.broadcast_only},
            {"initial_is_action", rep.initial_is_action}}}};
}

json transition_json(const Protocol& p, std::size_t t) {
  const Transition& tr = p.transition(t);
  const bool tau = tr.label == Label::Internal || is_tau_message(p.message_name(tr.message));
  const char* label = tau ? "tau"
                      : tr.label == Label::Broadcast ? "!!"
                      : tr.label == Label::Send      ? "!"
                                                     : "?";
  return {p.state_name(tr.source), label, tau ? std::string() : p.message_name(tr.message),
          p.state_name(tr.destination)};
}

json script_json(const Protocol& p, const ExecutionScript& s) {
  json steps = json::array();
  for (const auto& st : s.steps) {
    json step{{"t", transition_json(p, st.transition)}};
    if (!st.receivers.empty()) {
      json recv = json::object();
      for (const auto& [r, k] : st.receivers) recv[show(p, r)] = k;
      step["recv"] = recv;
    }
    steps.push_back(step);
  }
  return {{"initial_size", s.initial_size}, {"steps", steps}};
}

void print_script(std::ostream& out, const Protocol& p, const ExecutionScript& s) {
  auto trace = replay(p, s);
  out << "witness from " << format_configuration(p, trace.front()) << " (" << s.steps.size() << " steps)\n";
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    out << "  " << (i + 1) << ". " << show(p, s.steps[i].transition);
    for (const auto& [r, k] : s.steps[i].receivers) {
      out << "  [" << k << " x " << show(p, r) << "]";
    }
    out << "  -> " << format_configuration(p, trace[i + 1]) << "\n";
  }
}

struct Context {
  std::ostream& out;
  bool as_json = false;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void emit(json doc) const {
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    doc["elapsed_ms"] = ms;
    out << doc.dump(2) << "\n";
  }
};

void require_wait_only(const Protocol& p, const char* command) {
  auto rep = classify(p);
  if (!rep.wait_only) {
    std::string offending;
    for (StateId q : rep.offending_states.members()) offending += (offending.empty() ? "" : ", ") + p.state_name(q);
    throw PreconditionError(std::string(command) + " needs a wait-only protocol; states mixing actions and receptions: " +
                            offending + " (hint: use 'explore' for a bounded search)");
  }
  if (!rep.initial_is_action)
    throw PreconditionError(std::string(command) + " needs an initial action state (hint: use 'explore')");
}

int do_classify(const Context& ctx, const Protocol& p) {
  auto rep = classify(p);
  if (ctx.as_json) {
    json doc{{"command", "classify"}, {"protocol", digest(p)}};
    doc["action_states"] = state_list(p, rep.action_states);
    doc["waiting_states"] = state_list(p, rep.waiting_states);
    doc["offending_states"] = state_list(p, rep.offending_states);
    ctx.emit(doc);
    return kCovered;
  }
  auto names = [&](const StateSet& s) {
    std::string r;
    for (StateId q : s.members()) r += (r.empty() ? "" : " ") + p.state_name(q);
    return r.empty() ? std::string("-") : r;
  };
  ctx.out << "protocol " << p.name() << ": " << p.num_states() << " states, " << p.num_messages() << " messages, "
          << p.transitions().size() << " transitions\n"
          << "wait-only:        " << (rep.wait_only ? "yes" : "no") << "\n"
          << "rendez-vous only: " << (rep.rdv_only ? "yes" : "no") << "\n"
          << "broadcast only:   " << (rep.broadcast_only ? "yes" : "no") << "\n"
          << "initial action:   " << (rep.initial_is_action ? "yes" : "no") << "\n"
          << "action states:    " << names(rep.action_states) << "\n"
          << "waiting states:   " << names(rep.waiting_states) << "\n"
          << "offending states: " << names(rep.offending_states) << "\n";
  return kCovered;
}

int do_state_cover(const Context& ctx, const Protocol& original, const std::string& state, bool with_witness) {
  Protocol p = normalize_tau(original);
  require_wait_only(p, "state-cover");
  StateId q = p.state_id(state);
  auto sat = saturate(p);
  bool ok = sat.coverable.contains(q);
  std::optional<ExecutionScript> witness;
  if (ok && with_witness) witness = witness_execution(p, sat, q);
  if (ctx.as_json) {
    json doc{{"command", "state-cover"}, {"protocol", digest(original)}, {"state", state}, {"covered", ok}};
    doc["coverable"] = state_list(p, sat.coverable);
    doc["rounds"] = json::array();
    for (const auto& r : sat.rounds) {
      json added = json::array();
      json rules = json::array();
      for (std::size_t i = 0; i < r.added.size(); ++i) {
        added.push_back(p.state_name(r.added[i]));
        rules.push_back(rule_name(r.justifications[i].rule));
      }
      doc["rounds"].push_back({{"round", r.round}, {"added", added}, {"rule", rules}});
    }
    doc["bounds"] = json::object();
    for (StateId x : sat.coverable.members()) doc["bounds"][p.state_name(x)] = sat.bound[x];
    if (witness) doc["witness"] = script_json(p, *witness);
    ctx.emit(doc);
  } else {
    if (ok) {
      ctx.out << state << ": coverable (round " << *sat.round_of[q] << ", at most " << sat.bound[q] << " processes)\n";
    } else {
      ctx.out << state << ": not coverable\n";
    }
    for (const auto& r : sat.rounds) {
      ctx.out << "  S" << r.round << " adds";
      for (StateId x : r.added) ctx.out << " " << p.state_name(x);
      ctx.out << "\n";
    }
    if (witness) print_script(ctx.out, p, *witness);
  }
  return ok ? kCovered : kNotCovered;
}

struct ConfCoverOptions {
  std::string target;
  std::string engine;
  std::uint64_t max_n = 8;
  std::size_t max_states = std::size_t{1} << 20;
};

int oracle_sweep(const Context& ctx, const Protocol& p, const Configuration& target, const ConfCoverOptions& o,
                 json& doc) {
  bool truncated = false;
  for (std::uint64_t n = target.size(); n <= o.max_n; ++n) {
    auto res = cover_query(p, n, target, {o.max_states, std::nullopt});
    if (res.verdict == Verdict::Unknown) truncated = true;
    if (res.verdict != Verdict::Covered) continue;
    if (ctx.as_json) {
      doc["covered"] = true;
      doc["processes"] = n;
      doc["witness"] = script_json(p, *res.witness);
      ctx.emit(doc);
    } else {
      ctx.out << "covered with " << n << " processes\n";
      print_script(ctx.out, p, *res.witness);
    }
    return kCovered;
  }
  if (ctx.as_json) {
    doc["covered"] = nullptr;
    doc["searched_up_to"] = o.max_n;
    doc["truncated"] = truncated;
    ctx.emit(doc);
  } else {
    ctx.out << "inconclusive: no witness with up to " << o.max_n << " processes"
            << (truncated ? " (search truncated)" : "") << "\n";
  }
  return kInconclusive;
}

int do_conf_cover(const Context& ctx, const Protocol& original, const ConfCoverOptions& o) {
  Configuration target = parse_target(original, o.target);
  std::string engine = o.engine;
  if (engine.empty()) engine = classify(original).rdv_only ? "tokenset" : "abstract";
  json doc{{"command", "conf-cover"},
           {"protocol", digest(original)},
           {"target", configuration_json(original, target)},
           {"engine", engine}};

  if (engine == "oracle") return oracle_sweep(ctx, original, target, o, doc);

  Protocol p = normalize_tau(original, engine == "tokenset" ? TauEncoding::Send : TauEncoding::Broadcast);
  require_wait_only(p, "conf-cover");
  const auto cutoff = cutoff_bound(p, target).str();
  bool covered = false;
  if (engine == "tokenset") {
    auto trace = fixpoint(p);
    const TokenSet& g = trace.iterates.back();
    covered = respects(p, g, target);
    if (ctx.as_json) {
      json toks = json::array();
      for (const auto& [q, m] : g.toks) toks.push_back({p.state_name(q), p.message_name(m)});
      doc["covered"] = covered;
      doc["cutoff_bound"] = cutoff;
      doc["token_set"] = {{"S", state_list(p, g.s)}, {"Toks", toks}};
      ctx.emit(doc);
    } else {
      ctx.out << format_configuration(p, target) << ": " << (covered ? "covered" : "not covered") << "\n"
              << "  fixpoint " << format_token_set(p, g) << " after " << trace.iterates.size() - 2
              << " applications\n";
    }
  } else {
    auto res = check_conf_cover(p, target);
    covered = res.covered;
    if (ctx.as_json) {
      json path = json::array();
      for (const auto& st : res.path) {
        path.push_back({{"kind", kind_name(st.kind)},
                        {"transition", show(p, st.transition)},
                        {"M", configuration_json(p, st.to.m)},
                        {"S", state_list(p, st.to.s)}});
      }
      doc["covered"] = covered;
      doc["cutoff_bound"] = cutoff;
      doc["abstract_path"] = path;
      doc["visited"] = res.visited;
      ctx.emit(doc);
    } else {
      ctx.out << format_configuration(p, target) << ": " << (covered ? "covered" : "not covered") << " ("
              << res.visited << " abstract configurations visited, cutoff " << cutoff << ")\n";
      for (const auto& st : res.path) {
        ctx.out << "  =" << kind_name(st.kind) << "=> " << show(p, st.transition) << "  M = "
                << format_configuration(p, st.to.m) << ", S = {";
        bool first = true;
        for (StateId q : st.to.s.members()) {
          ctx.out << (first ? "" : ", ") << p.state_name(q);
          first = false;
        }
        ctx.out << "}\n";
      }
    }
  }
  return covered ? kCovered : kNotCovered;
}

int do_tokenset(const Context& ctx, const Protocol& original, bool with_trace) {
  Protocol p = normalize_tau(original, TauEncoding::Send);
  require_wait_only(p, "tokenset");
  auto trace = fixpoint(p);
  if (ctx.as_json) {
    json iterates = json::array();
    for (const auto& g : trace.iterates) {
      json toks = json::array();
      for (const auto& [q, m] : g.toks) toks.push_back({p.state_name(q), p.message_name(m)});
      iterates.push_back({{"S", state_list(p, g.s)}, {"Toks", toks}});
    }
    json rules = json::array();
    for (const auto& log : trace.rule_log) {
      json round = json::array();
      for (const auto& f : log) {
        json e{{"rule", f.rule}, {"state", p.state_name(f.state)}};
        if (f.message) e["message"] = p.message_name(*f.message);
        json trs = json::array();
        for (std::size_t t : f.transitions) trs.push_back(show(p, t));
        json used = json::array();
        for (const auto& [q, m] : f.tokens) used.push_back({p.state_name(q), p.message_name(m)});
        e["transitions"] = trs;
        e["tokens"] = used;
        round.push_back(e);
      }
      rules.push_back(round);
    }
    ctx.emit({{"command", "tokenset"}, {"protocol", digest(original)}, {"iterates", iterates}, {"rules", rules}});
    return kCovered;
  }
  for (std::size_t i = 0; i + 1 < trace.iterates.size(); ++i) {
    ctx.out << "gamma_" << i << " = " << format_token_set(p, trace.iterates[i]) << "\n";
    if (!with_trace) continue;
    for (const auto& f : trace.rule_log[i]) {
      ctx.out << "    rule " << f.rule << ": " << p.state_name(f.state);
      if (f.message) ctx.out << " token " << p.message_name(*f.message);
      for (std::size_t t : f.transitions) ctx.out << "  via " << show(p, t);
      ctx.out << "\n";
    }
  }
  ctx.out << "fixpoint reached after " << trace.iterates.size() - 2 << " applications\n";
  return kCovered;
}

struct ExploreOptions {
  std::uint64_t n = 0;
  std::string target;
  std::size_t max_states = std::size_t{1} << 20;
};

int do_explore(const Context& ctx, const Protocol& p, const ExploreOptions& o) {
  Limits limits{o.max_states, std::nullopt};
  json doc{{"command", "explore"}, {"protocol", digest(p)}, {"processes", o.n}};
  if (o.target.empty()) {
    auto reach = explore(p, o.n, limits);
    if (ctx.as_json) {
      json cs = json::array();
      for (const auto& c : reach.configurations) cs.push_back(configuration_json(p, c));
      doc["reachable"] = reach.configurations.size();
      doc["truncated"] = reach.truncated;
      doc["configurations"] = cs;
      ctx.emit(doc);
    } else {
      ctx.out << reach.configurations.size() << " reachable configurations with " << o.n << " processes"
              << (reach.truncated ? " (truncated)" : "") << "\n";
      for (std::size_t i = 0; i < reach.configurations.size(); ++i)
        ctx.out << "  [" << reach.depth[i] << "] " << format_configuration(p, reach.configurations[i]) << "\n";
    }
    return reach.truncated ? kInconclusive : kCovered;
  }
  Configuration target = parse_target(p, o.target);
  auto res = cover_query(p, o.n, target, limits);
  if (ctx.as_json) {
    doc["target"] = configuration_json(p, target);
    doc["verdict"] = res.verdict == Verdict::Covered ? "covered" : res.verdict == Verdict::NotCovered ? "not covered"
                                                                                                    : "unknown";
    doc["explored"] = res.explored;
    if (res.witness) doc["witness"] = script_json(p, *res.witness);
    ctx.emit(doc);
  } else if (res.verdict == Verdict::Covered) {
    ctx.out << format_configuration(p, target) << ": covered with " << o.n << " processes\n";
    print_script(ctx.out, p, *res.witness);
  } else {
    ctx.out << format_configuration(p, target) << ": "
            << (res.verdict == Verdict::NotCovered ? "not covered" : "unknown (state limit hit)") << " with " << o.n
            << " processes, " << res.explored << " configurations explored\n";
  }
  switch (res.verdict) {
    case Verdict::Covered: return kCovered;
    case Verdict::NotCovered: return kNotCovered;
    case Verdict::Unknown: return kInconclusive;
  }
  return kInconclusive;
}

std::string target_spec(const Protocol& p, const Configuration& c) {
  std::string out;
  for (const auto& [q, k] : c.entries()) out += (out.empty() ? "" : ",") + p.state_name(q) + ":" + std::to_string(k);
  return out;
}

int emit_generated(const Context& ctx, const ProtocolWithTarget& g, json extra) {
  if (ctx.as_json) {
    json doc{{"command", "gen"}, {"protocol", digest(g.protocol)}, {"target", target_spec(g.protocol, g.target)}};
    doc.update(extra);
    doc["text"] = render(g.protocol);
    ctx.emit(doc);
  } else {
    ctx.out << "# target: " << target_spec(g.protocol, g.target) << "\n" << render(g.protocol);
  }
  return kCovered;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coverability checker for broadcast and non-blocking rendez-vous protocols", "nbcover"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Print a JSON document");

  std::string file;
  auto* classify_cmd = app.add_subcommand("classify", "Report the wait-only classification");
  classify_cmd->add_option("FILE", file, "Protocol file")->required();

  std::string state;
  bool with_witness = false;
  auto* state_cmd = app.add_subcommand("state-cover", "Decide whether one state is coverable");
  state_cmd->add_option("FILE", file, "Protocol file")->required();
  state_cmd->add_option("--state", state, "State to cover")->required();
  state_cmd->add_flag("--witness", with_witness, "Print a replay-verified execution");

  ConfCoverOptions cc;
  auto* conf_cmd = app.add_subcommand("conf-cover", "Decide whether a configuration is coverable");
  conf_cmd->add_option("FILE", file, "Protocol file")->required();
  conf_cmd->add_option("--target", cc.target, "Target as q:k,...")->required();
  conf_cmd->add_option("--engine", cc.engine, "abstract, tokenset or oracle")
      ->check(CLI::IsMember({"abstract", "tokenset", "oracle"}));
  conf_cmd->add_option("--max-n", cc.max_n, "Largest population tried by the oracle engine");
  conf_cmd->add_option("--max-states", cc.max_states, "Configuration limit per oracle search");

  bool with_trace = false;
  auto* tok_cmd = app.add_subcommand("tokenset", "Print the token-set iterates");
  tok_cmd->add_option("FILE", file, "Protocol file")->required();
  tok_cmd->add_flag("--trace", with_trace, "Show rule firings");

  ExploreOptions ex;
  auto* explore_cmd = app.add_subcommand("explore", "Explicit-state search with a fixed population");
  explore_cmd->add_option("FILE", file, "Protocol file")->required();
  explore_cmd->add_option("-n", ex.n, "Number of processes")->required()->check(CLI::PositiveNumber);
  explore_cmd->add_option("--target", ex.target, "Target as q:k,...");
  explore_cmd->add_option("--max-states", ex.max_states, "Configuration limit");

  auto* gen_cmd = app.add_subcommand("gen", "Generate protocols");
  gen_cmd->require_subcommand(1);
  std::string spec;
  bool rdv = false;
  auto* gen_cvp = gen_cmd->add_subcommand("cvp", "From a circuit file");
  gen_cvp->add_option("SPEC", spec, "Circuit file")->required();
  gen_cvp->add_flag("--rdv", rdv, "Use rendez-vous sends instead of broadcasts");
  auto* gen_dfa = gen_cmd->add_subcommand("dfa", "From a DFA file");
  gen_dfa->add_option("SPEC", spec, "DFA file")->required();
  RandomProtocolParams rp;
  std::uint64_t seed = 0;
  auto* gen_random = gen_cmd->add_subcommand("random", "Seeded random wait-only protocol");
  gen_random->add_option("--seed", seed, "Seed")->required();
  gen_random->add_option("--states", rp.n_states, "Number of states")->required()->check(CLI::PositiveNumber);
  gen_random->add_option("--messages", rp.n_messages, "Number of messages")->required();
  gen_random->add_option("--density", rp.density, "Extra transition probability")->check(CLI::Range(0.0, 1.0));
  gen_random->add_flag("--rdv", rp.rdv_only, "No broadcasts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kInputError;
  }

  Context ctx{out, as_json};
  try {
    auto load = [&] { return parse_protocol(read_file(file)); };
    if (*classify_cmd) return do_classify(ctx, load());
    if (*state_cmd) return do_state_cover(ctx, load(), state, with_witness);
    if (*conf_cmd) return do_conf_cover(ctx, load(), cc);
    if (*tok_cmd) return do_tokenset(ctx, load(), with_trace);
    if (*explore_cmd) return do_explore(ctx, load(), ex);
    if (*gen_cvp) {
      Circuit c = parse_circuit(read_file(spec));
      auto value = eval_circuit(c).at(c.output);
      auto g = rdv ? cvp_to_rdv_protocol(c) : cvp_to_protocol(c);
      return emit_generated(ctx, g, {{"output_value", value}, {"expect_covered", value == c.target}});
    }
    if (*gen_dfa) {
      DfaSet d = parse_dfa_set(read_file(spec));
      return emit_generated(ctx, dfa_intersection_to_protocol(d),
                            {{"expect_covered", dfa_intersection_nonempty(d)}});
    }
    if (*gen_random) {
      Protocol p = random_protocol(rp, seed);
      if (ctx.as_json) {
        ctx.emit({{"command", "gen"}, {"protocol", digest(p)}, {"text", render(p)}});
      } else {
        out << render(p);
      }
      return kCovered;
    }
  } catch (const ParseError& e) {
    err << "nbcover: parse error: " << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    err << "nbcover: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "nbcover: " << e.what() << "\n";
    return kInputError;
  }
  err << app.help();
  return kInputError;
}

}  // namespace nbcover::cli
