#include "nbcover/configuration.hpp"

#include <algorithm>
#include <charconv>

#include "nbcover/error.hpp"

namespace nbcover {

Configuration Configuration::uniform(StateId q, std::uint64_t n) {
  Configuration c;
  c.add(q, n);
  return c;
}

std::uint64_t Configuration::count(StateId q) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), q,
                             [](const Entry& e, StateId s) { return e.first < s; });
  return it != entries_.end() && it->first == q ? it->second : 0;
}

void Configuration::add(StateId q, std::uint64_t k) {
  if (k == 0) return;
  auto it = std::lower_bound(entries_.begin(), entries_.end(), q,
                             [](const Entry& e, StateId s) { return e.first < s; });
  if (it != entries_.end() && it->first == q) {
    it->second += k;
  } else {
    entries_.insert(it, {q, k});
  }
  size_ += k;
}

void Configuration::remove(StateId q, std::uint64_t k) {
  if (k == 0) return;
  auto it = std::lower_bound(entries_.begin(), entries_.end(), q,
                             [](const Entry& e, StateId s) { return e.first < s; });
  if (it == entries_.end() || it->first != q || it->second < k)
    throw Error("cannot remove " + std::to_string(k) + " process(es) from state index " + std::to_string(q));
  it->second -= k;
  if (it->second == 0) entries_.erase(it);
  size_ -= k;
}

bool Configuration::leq(const Configuration& other) const {
  if (size_ > other.size_) return false;
  auto it = other.entries_.begin();
  for (const auto& [q, k] : entries_) {
    while (it != other.entries_.end() && it->first < q) ++it;
    if (it == other.entries_.end() || it->first != q || it->second < k) return false;
  }
  return true;
}

Configuration Configuration::operator+(const Configuration& other) const {
  Configuration out = *this;
  for (const auto& [q, k] : other.entries_) out.add(q, k);
  return out;
}

Configuration Configuration::operator-(const Configuration& other) const {
  Configuration out = *this;
  for (const auto& [q, k] : other.entries_) out.remove(q, k);
  return out;
}

StateSet Configuration::support(std::size_t universe) const {
  StateSet s(universe);
  for (const auto& e : entries_) s.insert(e.first);
  return s;
}

std::size_t Configuration::hash() const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const auto& [q, k] : entries_) {
    h ^= q;
    h *= 0x100000001b3ULL;
    h ^= static_cast<std::size_t>(k);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_configuration(const Protocol& p, const Configuration& c) {
  std::string out = "{";
  bool first = true;
  for (const auto& [q, k] : c.entries()) {
    if (!first) out += ", ";
    first = false;
    if (k > 1) out += std::to_string(k) + "·";
    out += p.state_name(q);
  }
  return out + "}";
}

Configuration parse_target(const Protocol& p, std::string_view spec) {
  Configuration c;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t end = spec.find(',', pos);
    if (end == std::string_view::npos) end = spec.size();
    std::string_view item = spec.substr(pos, end - pos);
    pos = end + 1;
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) {
      if (end == spec.size()) break;
      throw Error("empty item in target '" + std::string(spec) + "'");
    }
    std::uint64_t k = 1;
    std::string_view name = item;
    if (auto colon = item.find(':'); colon != std::string_view::npos) {
      name = item.substr(0, colon);
      auto digits = item.substr(colon + 1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
      if (ec != std::errc() || ptr != digits.data() + digits.size() || k == 0)
        throw Error("bad count in target item '" + std::string(item) + "'");
    }
    c.add(p.state_id(name), k);
  }
  if (c.empty()) throw Error("empty target");
  return c;
}

}  // namespace nbcover
