#include "fixtures.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "nbcover/error.hpp"

namespace nbcover::fixtures {

std::string fig_path(const std::string& name) { return std::string(NBCOVER_SOURCE_DIR) + "/figs/" + name; }

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Protocol load_fig(const std::string& name) { return parse_protocol(read_text(fig_path(name))); }

std::size_t tid(const Protocol& p, std::string_view desc) {
  for (std::size_t t = 0; t < p.transitions().size(); ++t) {
    if (p.describe(t) == desc) return t;
  }
  throw Error("no transition '" + std::string(desc) + "' in " + p.name());
}

Configuration conf(const Protocol& p, std::string_view spec) { return parse_target(p, spec); }

StateSet states(const Protocol& p, const std::vector<std::string>& names) {
  StateSet s(p.num_states());
  for (const auto& n : names) s.insert(p.state_id(n));
  return s;
}

TokenSet token_set(const Protocol& p, const std::vector<std::string>& s,
                   const std::vector<std::pair<std::string, std::string>>& toks) {
  TokenSet g{states(p, s), {}};
  for (const auto& [q, m] : toks) g.toks.insert({p.state_id(q), p.message_id(m)});
  return g;
}

std::vector<Protocol> random_corpus(std::size_t count, std::size_t max_states, std::size_t max_messages,
                                    bool rdv_only, std::uint64_t base) {
  std::vector<Protocol> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t seed = base + i;
    RandomProtocolParams params;
    params.n_states = 2 + seed % (max_states - 1);
    params.n_messages = 1 + (seed / 7) % max_messages;
    params.density = 0.2 + 0.1 * static_cast<double>(seed % 4);
    params.rdv_only = rdv_only;
    out.push_back(random_protocol(params, seed));
  }
  return out;
}

std::vector<Configuration> configurations_of_size(const std::vector<StateId>& over, std::uint64_t size) {
  std::vector<Configuration> out;
  Configuration cur;
  std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t i, std::uint64_t left) {
    if (i + 1 == over.size()) {
      Configuration c = cur;
      if (left) c.add(over[i], left);
      out.push_back(std::move(c));
      return;
    }
    for (std::uint64_t k = 0; k <= left; ++k) {
      Configuration saved = cur;
      if (k) cur.add(over[i], k);
      rec(i + 1, left - k);
      cur = std::move(saved);
    }
  };
  if (!over.empty()) rec(0, size);
  return out;
}

}  // namespace nbcover::fixtures
