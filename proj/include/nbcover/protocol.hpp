#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nbcover/state_set.hpp"

namespace nbcover {

using MessageId = std::uint32_t;
inline constexpr MessageId kNoMessage = UINT32_MAX;

enum class Label { Broadcast, Send, Receive, Internal };

struct Transition {
  StateId source = 0;
  Label label = Label::Internal;
  MessageId message = kNoMessage;  // kNoMessage iff label is Internal
  StateId destination = 0;

  bool is_action() const { return label != Label::Receive; }
  bool operator==(const Transition&) const = default;
};

class Protocol {
 public:
  Protocol(std::string name, std::vector<std::string> states, std::vector<std::string> messages, StateId initial,
           std::vector<Transition> transitions);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& messages() const { return messages_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  StateId initial() const { return initial_; }

  std::size_t num_states() const { return states_.size(); }
  std::size_t num_messages() const { return messages_.size(); }
  const Transition& transition(std::size_t t) const { return transitions_.at(t); }

  const std::string& state_name(StateId q) const { return states_.at(q); }
  const std::string& message_name(MessageId m) const { return messages_.at(m); }
  std::optional<StateId> find_state(std::string_view name) const;
  std::optional<MessageId> find_message(std::string_view name) const;
  // Throw nbcover::Error for unknown names.
  StateId state_id(std::string_view name) const;
  MessageId message_id(std::string_view name) const;

  // Indices of transitions leaving q, in declaration order.
  const std::vector<std::size_t>& outgoing(StateId q) const { return outgoing_.at(q); }
  // Indices of (q, ?m, .) transitions.
  const std::vector<std::size_t>& receptions(StateId q, MessageId m) const;
  // Indices of Send/Broadcast transitions carrying m.
  const std::vector<std::size_t>& emissions(MessageId m) const { return emissions_.at(m); }
  // Indices of Receive transitions on m.
  const std::vector<std::size_t>& receptions_of(MessageId m) const { return receptions_of_.at(m); }

  bool receives(StateId q, MessageId m) const { return !receptions(q, m).empty(); }
  // R(q), ascending.
  std::vector<MessageId> receivable(StateId q) const;

  // "src !!m dst" form of one transition.
  std::string describe(std::size_t t) const;
  std::string describe(const Transition& t) const;

  bool operator==(const Protocol& other) const;

 private:
  std::string name_;
  std::vector<std::string> states_;
  std::vector<std::string> messages_;
  StateId initial_;
  std::vector<Transition> transitions_;
  std::unordered_map<std::string, StateId> state_index_;
  std::unordered_map<std::string, MessageId> message_index_;
  std::vector<std::vector<std::size_t>> outgoing_;
  std::vector<std::vector<std::size_t>> receptions_;  // indexed by q * |Σ| + m
  std::vector<std::vector<std::size_t>> emissions_;
  std::vector<std::vector<std::size_t>> receptions_of_;
};

// Builds a protocol by name, collecting states and messages in first-appearance
// order so the result renders and reparses to itself.
class ProtocolBuilder {
 public:
  ProtocolBuilder(std::string name, std::string initial);

  // Duplicate transitions are ignored. msg is ignored for Internal.
  ProtocolBuilder& add(std::string_view source, Label label, std::string_view msg, std::string_view destination);
  ProtocolBuilder& add_state(std::string_view state);
  Protocol build() const;

 private:
  StateId intern_state(std::string_view s);
  MessageId intern_message(std::string_view m);

  std::string name_;
  std::vector<std::string> states_;
  std::vector<std::string> messages_;
  std::unordered_map<std::string, StateId> state_index_;
  std::unordered_map<std::string, MessageId> message_index_;
  std::vector<Transition> transitions_;
};

Protocol parse_protocol(std::string_view text);
std::string render(const Protocol& p);

bool is_identifier(std::string_view s);

// Internal transitions become emissions of fresh never-received messages
// __tau_<k>, k the transition index. Send encoding keeps rendez-vous-only
// protocols free of broadcasts; both are semantically identical to tau.
enum class TauEncoding { Broadcast, Send };
Protocol normalize_tau(const Protocol& p, TauEncoding encoding = TauEncoding::Broadcast);
bool has_internal(const Protocol& p);

struct ClassificationReport {
  bool wait_only = true;
  StateSet action_states;
  StateSet waiting_states;
  StateSet offending_states;
  bool rdv_only = true;
  bool broadcast_only = true;
  bool initial_is_action = true;
};

ClassificationReport classify(const Protocol& p);
std::vector<MessageId> receivable(const Protocol& p, StateId q);

}  // namespace nbcover
