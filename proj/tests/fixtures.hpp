#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nbcover/configuration.hpp"
#include "nbcover/protocol.hpp"
#include "nbcover/reductions.hpp"
#include "nbcover/tokenset.hpp"

namespace nbcover::fixtures {

std::string fig_path(const std::string& name);
std::string read_text(const std::string& path);
Protocol load_fig(const std::string& name);

// Index of the transition rendered as desc ("q_in !!a q1").
std::size_t tid(const Protocol& p, std::string_view desc);

Configuration conf(const Protocol& p, std::string_view spec);
StateSet states(const Protocol& p, const std::vector<std::string>& names);
TokenSet token_set(const Protocol& p, const std::vector<std::string>& s,
                   const std::vector<std::pair<std::string, std::string>>& toks);

// Seeded corpus of wait-only protocols; seeds base, base+1, ...
std::vector<Protocol> random_corpus(std::size_t count, std::size_t max_states, std::size_t max_messages,
                                    bool rdv_only, std::uint64_t base);

// All configurations of the given size over the given states.
std::vector<Configuration> configurations_of_size(const std::vector<StateId>& over, std::uint64_t size);

}  // namespace nbcover::fixtures
