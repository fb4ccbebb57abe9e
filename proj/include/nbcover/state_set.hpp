#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace nbcover {

using StateId = std::uint32_t;

// Fixed-universe bitset over state indices.
class StateSet {
 public:
  StateSet() = default;
  explicit StateSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

  std::size_t universe() const { return universe_; }

  bool contains(StateId q) const { return q < universe_ && (words_[q / 64] >> (q % 64)) & 1U; }
  void insert(StateId q) { words_[q / 64] |= std::uint64_t{1} << (q % 64); }
  void erase(StateId q) { words_[q / 64] &= ~(std::uint64_t{1} << (q % 64)); }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool empty() const { return count() == 0; }

  bool subset_of(const StateSet& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t theirs = i < other.words_.size() ? other.words_[i] : 0;
      if (words_[i] & ~theirs) return false;
    }
    return true;
  }

  StateSet& operator|=(const StateSet& other) {
    for (std::size_t i = 0; i < words_.size() && i < other.words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
  }

  std::vector<StateId> members() const {
    std::vector<StateId> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w) {
        out.push_back(static_cast<StateId>(i * 64 + std::countr_zero(w)));
        w &= w - 1;
      }
    }
    return out;
  }

  std::size_t hash() const {
    std::size_t h = universe_;
    for (auto w : words_) h = h * 0x9E3779B97F4A7C15ULL + std::hash<std::uint64_t>{}(w);
    return h;
  }

  bool operator==(const StateSet&) const = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace nbcover
