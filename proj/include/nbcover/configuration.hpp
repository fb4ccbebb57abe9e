#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nbcover/protocol.hpp"
#include "nbcover/state_set.hpp"

namespace nbcover {

// Multiset of states, stored as sorted (state, count) pairs with no zero counts.
class Configuration {
 public:
  using Entry = std::pair<StateId, std::uint64_t>;

  Configuration() = default;
  static Configuration uniform(StateId q, std::uint64_t n);

  const std::vector<Entry>& entries() const { return entries_; }
  std::uint64_t count(StateId q) const;
  std::uint64_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  void add(StateId q, std::uint64_t k = 1);
  // Throws nbcover::Error when fewer than k processes sit on q.
  void remove(StateId q, std::uint64_t k = 1);

  // this ⪯ other
  bool leq(const Configuration& other) const;

  Configuration operator+(const Configuration& other) const;
  // Throws unless other ⪯ this.
  Configuration operator-(const Configuration& other) const;

  StateSet support(std::size_t universe) const;

  std::size_t hash() const;

  bool operator==(const Configuration& other) const { return entries_ == other.entries_; }
  auto operator<=>(const Configuration& other) const { return entries_ <=> other.entries_; }

 private:
  std::vector<Entry> entries_;
  std::uint64_t size_ = 0;
};

struct ConfigurationHash {
  std::size_t operator()(const Configuration& c) const { return c.hash(); }
};

// "{2·q3, q6}"
std::string format_configuration(const Protocol& p, const Configuration& c);
// "q3:2,q6:1" or "q3,q3,q6"; unknown states and zero counts are errors.
Configuration parse_target(const Protocol& p, std::string_view spec);

}  // namespace nbcover
