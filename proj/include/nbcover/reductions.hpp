#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nbcover/configuration.hpp"
#include "nbcover/protocol.hpp"

namespace nbcover {

enum class GateOp { And, Or, Not };

struct Gate {
  GateOp op = GateOp::Not;
  std::vector<std::string> operands;  // two for And/Or, one for Not
  std::string output;
};

struct Circuit {
  std::vector<std::pair<std::string, bool>> inputs;
  std::vector<Gate> gates;
  std::string output;
  bool target = true;
};

Circuit parse_circuit(std::string_view text);
std::string render_circuit(const Circuit& c);
std::map<std::string, bool> eval_circuit(const Circuit& c);

struct ProtocolWithTarget {
  Protocol protocol;
  Configuration target;
  std::string target_state;  // set for single-state targets
};

// Requires at least one gate. Target is g<m>_top or g<m>_bot following c.target.
ProtocolWithTarget cvp_to_protocol(const Circuit& c);
ProtocolWithTarget cvp_to_rdv_protocol(const Circuit& c);

struct Dfa {
  std::string name;
  std::vector<std::string> states;
  std::string initial;
  std::string accepting;
  std::map<std::pair<std::string, std::string>, std::string> delta;  // (state, letter) -> state
};

struct DfaSet {
  std::vector<std::string> alphabet;
  std::vector<Dfa> automata;
};

DfaSet parse_dfa_set(std::string_view text);
std::string render_dfa_set(const DfaSet& d);
ProtocolWithTarget dfa_intersection_to_protocol(const DfaSet& d);
bool dfa_intersection_nonempty(const DfaSet& d);

struct RandomProtocolParams {
  std::size_t n_states = 4;
  std::size_t n_messages = 2;
  double density = 0.3;
  bool rdv_only = false;
};

// Wait-only, tau-free, initial state an action state. Every state is the
// destination of a spine transition from an earlier state.
Protocol random_protocol(const RandomProtocolParams& params, std::uint64_t seed);

struct RandomCircuitParams {
  std::size_t max_inputs = 4;
  std::size_t max_gates = 6;
};

Circuit random_circuit(const RandomCircuitParams& params, std::uint64_t seed);

struct RandomDfaParams {
  std::size_t max_automata = 3;
  std::size_t max_states = 4;
  std::size_t alphabet = 2;
};

DfaSet random_dfa_set(const RandomDfaParams& params, std::uint64_t seed);

}  // namespace nbcover
