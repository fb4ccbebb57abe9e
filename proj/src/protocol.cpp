#include "nbcover/protocol.hpp"

#include <algorithm>
#include <sstream>

#include "nbcover/error.hpp"

namespace nbcover {

namespace {

const std::vector<std::size_t> kEmpty;

constexpr std::string_view kTauPrefix = "__tau_";

std::vector<std::string_view> split_tokens(std::string_view line) {
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

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  if (!head(s[0])) return false;
  return std::all_of(s.begin() + 1, s.end(), [&](char c) { return head(c) || (c >= '0' && c <= '9'); });
}

Protocol::Protocol(std::string name, std::vector<std::string> states, std::vector<std::string> messages,
                   StateId initial, std::vector<Transition> transitions)
    : name_(std::move(name)),
      states_(std::move(states)),
      messages_(std::move(messages)),
      initial_(initial),
      transitions_(std::move(transitions)) {
  if (states_.empty()) throw Error("protocol has no states");
  if (initial_ >= states_.size()) throw Error("initial state out of range");
  for (StateId q = 0; q < states_.size(); ++q) {
    if (!state_index_.emplace(states_[q], q).second) throw Error("duplicate state '" + states_[q] + "'");
  }
  for (MessageId m = 0; m < messages_.size(); ++m) {
    if (!message_index_.emplace(messages_[m], m).second) throw Error("duplicate message '" + messages_[m] + "'");
  }
  outgoing_.assign(states_.size(), {});
  receptions_.assign(states_.size() * messages_.size(), {});
  emissions_.assign(messages_.size(), {});
  receptions_of_.assign(messages_.size(), {});
  for (std::size_t t = 0; t < transitions_.size(); ++t) {
    const Transition& tr = transitions_[t];
    if (tr.source >= states_.size() || tr.destination >= states_.size())
      throw Error("transition " + std::to_string(t) + " has an endpoint out of range");
    if (tr.label == Label::Internal) {
      if (tr.message != kNoMessage) throw Error("internal transition carries a message");
    } else if (tr.message >= messages_.size()) {
      throw Error("transition " + std::to_string(t) + " has a message out of range");
    }
    for (std::size_t u = 0; u < t; ++u) {
      if (transitions_[u] == tr) throw Error("duplicate transition '" + describe(t) + "'");
    }
    outgoing_[tr.source].push_back(t);
    if (tr.label == Label::Receive) {
      receptions_[tr.source * messages_.size() + tr.message].push_back(t);
      receptions_of_[tr.message].push_back(t);
    } else if (tr.label != Label::Internal) {
      emissions_[tr.message].push_back(t);
    }
  }
}

std::optional<StateId> Protocol::find_state(std::string_view name) const {
  auto it = state_index_.find(std::string(name));
  if (it == state_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<MessageId> Protocol::find_message(std::string_view name) const {
  auto it = message_index_.find(std::string(name));
  if (it == message_index_.end()) return std::nullopt;
  return it->second;
}

StateId Protocol::state_id(std::string_view name) const {
  auto q = find_state(name);
  if (!q) throw Error("unknown state '" + std::string(name) + "'");
  return *q;
}

MessageId Protocol::message_id(std::string_view name) const {
  auto m = find_message(name);
  if (!m) throw Error("unknown message '" + std::string(name) + "'");
  return *m;
}

const std::vector<std::size_t>& Protocol::receptions(StateId q, MessageId m) const {
  if (m >= messages_.size()) return kEmpty;
  return receptions_.at(q * messages_.size() + m);
}

std::vector<MessageId> Protocol::receivable(StateId q) const {
  if (q >= states_.size()) throw Error("unknown state index " + std::to_string(q));
  std::vector<MessageId> out;
  for (MessageId m = 0; m < messages_.size(); ++m) {
    if (receives(q, m)) out.push_back(m);
  }
  return out;
}

std::string Protocol::describe(const Transition& t) const {
  std::string label;
  switch (t.label) {
    case Label::Broadcast: label = "!!" + messages_.at(t.message); break;
    case Label::Send: label = "!" + messages_.at(t.message); break;
    case Label::Receive: label = "?" + messages_.at(t.message); break;
    case Label::Internal: label = "tau"; break;
  }
  return states_.at(t.source) + " " + label + " " + states_.at(t.destination);
}

std::string Protocol::describe(std::size_t t) const { return describe(transitions_.at(t)); }

bool Protocol::operator==(const Protocol& other) const {
  return name_ == other.name_ && states_ == other.states_ && messages_ == other.messages_ &&
         initial_ == other.initial_ && transitions_ == other.transitions_;
}

ProtocolBuilder::ProtocolBuilder(std::string name, std::string initial) : name_(std::move(name)) {
  intern_state(initial);
}

StateId ProtocolBuilder::intern_state(std::string_view s) {
  auto [it, fresh] = state_index_.emplace(std::string(s), static_cast<StateId>(states_.size()));
  if (fresh) states_.emplace_back(s);
  return it->second;
}

MessageId ProtocolBuilder::intern_message(std::string_view m) {
  auto [it, fresh] = message_index_.emplace(std::string(m), static_cast<MessageId>(messages_.size()));
  if (fresh) messages_.emplace_back(m);
  return it->second;
}

ProtocolBuilder& ProtocolBuilder::add_state(std::string_view state) {
  intern_state(state);
  return *this;
}

ProtocolBuilder& ProtocolBuilder::add(std::string_view source, Label label, std::string_view msg,
                                      std::string_view destination) {
  Transition t;
  t.source = intern_state(source);
  t.label = label;
  t.message = label == Label::Internal ? kNoMessage : intern_message(msg);
  t.destination = intern_state(destination);
  if (std::find(transitions_.begin(), transitions_.end(), t) == transitions_.end()) transitions_.push_back(t);
  return *this;
}

Protocol ProtocolBuilder::build() const { return Protocol(name_, states_, messages_, 0, transitions_); }

Protocol parse_protocol(std::string_view text) {
  std::optional<std::string> name;
  std::optional<ProtocolBuilder> builder;
  std::size_t line_no = 0;
  std::size_t count = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = split_tokens(line);
    if (tok.empty()) continue;

    if (!name) {
      if (tok[0] != "protocol" || tok.size() != 2 || !is_identifier(tok[1]))
        throw ParseError(line_no, "expected 'protocol <ident>'");
      name = std::string(tok[1]);
      continue;
    }
    if (tok[0] == "init" && tok.size() == 2) {
      if (builder) throw ParseError(line_no, "duplicate init");
      if (!is_identifier(tok[1])) throw ParseError(line_no, "bad state identifier '" + std::string(tok[1]) + "'");
      builder.emplace(*name, std::string(tok[1]));
      continue;
    }
    if (!builder) throw ParseError(line_no, "missing init");
    if (tok.size() != 3) throw ParseError(line_no, "expected '<src> <label> <dst>'");
    for (auto s : {tok[0], tok[2]}) {
      if (!is_identifier(s)) throw ParseError(line_no, "bad state identifier '" + std::string(s) + "'");
    }
    std::string_view lab = tok[1];
    Label label;
    std::string_view msg;
    if (lab == "tau") {
      label = Label::Internal;
    } else if (lab.starts_with("!!")) {
      label = Label::Broadcast;
      msg = lab.substr(2);
    } else if (lab.starts_with("!")) {
      label = Label::Send;
      msg = lab.substr(1);
    } else if (lab.starts_with("?")) {
      label = Label::Receive;
      msg = lab.substr(1);
    } else {
      throw ParseError(line_no, "bad label '" + std::string(lab) + "'");
    }
    if (label != Label::Internal) {
      if (!is_identifier(msg)) throw ParseError(line_no, "bad message identifier '" + std::string(msg) + "'");
      if (msg.starts_with(kTauPrefix))
        throw ParseError(line_no, "message '" + std::string(msg) + "' uses the reserved prefix __tau_");
    }
    builder->add(tok[0], label, msg, tok[2]);
    ++count;
  }
  if (!name) throw ParseError(0, "missing 'protocol <ident>' line");
  if (!builder) throw ParseError(0, "missing init");
  if (count == 0) throw ParseError(0, "empty transition set");
  return builder->build();
}

std::string render(const Protocol& p) {
  std::ostringstream out;
  out << "protocol " << p.name() << "\n";
  out << "init " << p.state_name(p.initial()) << "\n";
  for (std::size_t t = 0; t < p.transitions().size(); ++t) out << p.describe(t) << "\n";
  return out.str();
}

bool has_internal(const Protocol& p) {
  return std::any_of(p.transitions().begin(), p.transitions().end(),
                     [](const Transition& t) { return t.label == Label::Internal; });
}

Protocol normalize_tau(const Protocol& p, TauEncoding encoding) {
  if (!has_internal(p)) return p;
  std::vector<std::string> messages = p.messages();
  std::vector<Transition> transitions = p.transitions();
  for (std::size_t t = 0; t < transitions.size(); ++t) {
    if (transitions[t].label != Label::Internal) continue;
    std::string fresh = std::string(kTauPrefix) + std::to_string(t);
    if (p.find_message(fresh)) throw Error("message '" + fresh + "' already present");
    transitions[t].label = encoding == TauEncoding::Broadcast ? Label::Broadcast : Label::Send;
    transitions[t].message = static_cast<MessageId>(messages.size());
    messages.push_back(fresh);
  }
  return Protocol(p.name(), p.states(), messages, p.initial(), transitions);
}

ClassificationReport classify(const Protocol& p) {
  const std::size_t n = p.num_states();
  ClassificationReport r;
  r.action_states = StateSet(n);
  r.waiting_states = StateSet(n);
  r.offending_states = StateSet(n);
  for (StateId q = 0; q < n; ++q) {
    bool receives = false;
    bool acts = false;
    for (auto t : p.outgoing(q)) (p.transition(t).label == Label::Receive ? receives : acts) = true;
    // A state with no outgoing transition has no reception, hence is an action state.
    if (!receives || acts) r.action_states.insert(q);
    if (receives) r.waiting_states.insert(q);
    if (receives && acts) r.offending_states.insert(q);
  }
  for (const auto& t : p.transitions()) {
    if (t.label == Label::Broadcast) r.rdv_only = false;
    if (t.label == Label::Send) r.broadcast_only = false;
  }
  r.wait_only = r.offending_states.empty();
  r.initial_is_action = !r.waiting_states.contains(p.initial());
  return r;
}

std::vector<MessageId> receivable(const Protocol& p, StateId q) { return p.receivable(q); }

}  // namespace nbcover
