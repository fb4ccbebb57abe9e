#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <random>
#include <unordered_set>

#include "fixtures.hpp"
#include "nbcover/conf_cover.hpp"
#include "nbcover/error.hpp"
#include "nbcover/semantics.hpp"
#include "nbcover/state_cover.hpp"

using namespace nbcover;
using namespace nbcover::fixtures;
using boost::multiprecision::cpp_int;

namespace {

bool has_successor(const Protocol& p, const AbstractConfiguration& from, AbstractKind kind, std::size_t t,
                   const AbstractConfiguration& to) {
  for (const auto& s : abstract_successors(p, from)) {
    if (s.kind == kind && s.transition == t && s.to == to) return true;
  }
  return false;
}

// Every abstract configuration reachable from ({K·q_in}, {q_in}).
std::vector<AbstractConfiguration> abstract_reach(const Protocol& p, std::uint64_t k) {
  StateSet s0(p.num_states());
  s0.insert(p.initial());
  AbstractConfiguration start{Configuration::uniform(p.initial(), k), s0};
  std::unordered_set<AbstractConfiguration, AbstractConfigurationHash> seen{start};
  std::deque<AbstractConfiguration> todo{start};
  std::vector<AbstractConfiguration> out;
  while (!todo.empty()) {
    auto g = todo.front();
    todo.pop_front();
    out.push_back(g);
    for (auto& st : abstract_successors(p, g)) {
      if (seen.insert(st.to).second) todo.push_back(st.to);
    }
  }
  return out;
}

bool oracle_covers(const Protocol& p, const Configuration& target, std::uint64_t max_n) {
  for (std::uint64_t n = target.size(); n <= max_n; ++n) {
    if (cover_query(p, n, target, {200000, std::nullopt}).verdict == Verdict::Covered) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("abstract step where an untracked process broadcasts") {
  Protocol p = normalize_tau(load_fig("p_prime.nbp"));
  AbstractConfiguration from{conf(p, "q5:2,q1"), states(p, {"q_in", "q1", "q4", "q5"})};
  AbstractConfiguration to{conf(p, "q5:2,q2"), states(p, {"q_in", "q1", "q2", "q4", "q5", "q6"})};
  CHECK(has_successor(p, from, AbstractKind::Ext, tid(p, "q5 !!c q6"), to));
}

TEST_CASE("abstract switch of a tracked receiver") {
  Protocol p = normalize_tau(load_fig("p_prime.nbp"));
  StateSet all(p.num_states());
  for (StateId q = 0; q < p.num_states(); ++q) all.insert(q);
  AbstractConfiguration from{conf(p, "q6,q5,q3"), all};
  AbstractConfiguration to{conf(p, "q3:2,q5"), all};
  CHECK(has_successor(p, from, AbstractKind::Switch, tid(p, "q2 !b q3"), to));
}

TEST_CASE("no successors when nothing can act") {
  Protocol p = parse_protocol("protocol X\ninit q_in\nw ?a q_in\nv !a w\n");
  AbstractConfiguration g{conf(p, "q_in:2"), states(p, {"q_in"})};
  CHECK(abstract_successors(p, g).empty());
}

TEST_CASE("configuration cover on the tau protocol") {
  Protocol p = normalize_tau(load_fig("p_prime.nbp"));
  auto res = check_conf_cover(p, conf(p, "q3:2,q6"));
  REQUIRE(res.covered);
  CHECK(res.path.size() == 8);
  CHECK(res.path.back().to.m == conf(p, "q3:2,q6"));
  std::size_t switches = 0;
  for (const auto& st : res.path) switches += st.kind == AbstractKind::Switch;
  CHECK(switches >= 1);
}

TEST_CASE("configuration cover on the broadcast protocol") {
  Protocol p = load_fig("p.nbp");
  CHECK(check_conf_cover(p, conf(p, "q3,q6")).covered);
  auto trivial = check_conf_cover(p, conf(p, "q_in"));
  CHECK(trivial.covered);
  CHECK(trivial.path.empty());
  CHECK_THROWS_AS(check_conf_cover(p, Configuration()), Error);
  CHECK_THROWS_AS(check_conf_cover(load_fig("p_dashed.nbp"), conf(p, "q3")), PreconditionError);
}

TEST_CASE("cutoff bound") {
  Protocol one("one", {"q_in"}, {}, 0, {});
  CHECK(cutoff_bound(one, Configuration::uniform(0, 1)) == 5);
  Protocol p = load_fig("p_prime.nbp");
  CHECK(cutoff_bound(p, conf(p, "q3:2,q6")) == 33554435);
  CHECK(cutoff_bound(p, conf(p, "q3:2,q6")).str() == "33554435");
  Protocol big = load_fig("p2.nbp");
  Protocol small = load_fig("p.nbp");
  cpp_int prev = 0;
  for (std::uint64_t k = 1; k <= 40; ++k) {
    cpp_int b = cutoff_bound(big, Configuration::uniform(0, k));
    CHECK(b > prev);
    CHECK(b == cpp_int(k) + (cpp_int(1) << 16) * boost::multiprecision::pow(cpp_int(8), static_cast<unsigned>(k)));
    CHECK(cutoff_bound(small, Configuration::uniform(0, k)) < b);
    prev = b;
  }
}

TEST_CASE("interp_member") {
  Protocol p = load_fig("p_prime.nbp");
  AbstractConfiguration g{conf(p, "q2:2,q4"), states(p, {"q_in", "q1", "q2", "q4", "q5", "q6"})};
  CHECK(interp_member(g, conf(p, "q2:2,q4")));
  CHECK(interp_member(g, conf(p, "q2:3,q4,q6:5,q_in")));
  CHECK_FALSE(interp_member(g, conf(p, "q2:2,q4,q3")));
  CHECK_FALSE(interp_member(g, conf(p, "q2:2,q4,q7")));
  CHECK_FALSE(interp_member(g, conf(p, "q2,q4,q6")));
}

TEST_CASE("S only grows along abstract paths and stays within the coverable states") {
  for (const Protocol& p : random_corpus(80, 4, 3, false, 5000)) {
    auto sat = saturate(p);
    for (std::uint64_t k = 1; k <= 2; ++k) {
      for (const auto& g : abstract_reach(p, k)) {
        CHECK(g.s.subset_of(sat.coverable));
        CHECK(g.m.size() == k);
        CHECK(g.m.support(p.num_states()).subset_of(g.s));
        for (const auto& st : abstract_successors(p, g)) CHECK(g.s.subset_of(st.to.s));
      }
    }
  }
}

TEST_CASE("every concrete step has an abstract counterpart") {
  for (const Protocol& p : random_corpus(60, 4, 2, false, 6000)) {
    std::vector<StateId> all;
    for (StateId q = 0; q < p.num_states(); ++q) all.push_back(q);
    for (std::uint64_t k = 1; k <= 2; ++k) {
      auto reach = explore(p, 3, {3000, std::nullopt});
      for (const auto& c : reach.configurations) {
        StateSet s = c.support(p.num_states());
        for (const auto& o : successors(p, c)) {
          for (const auto& m2 : configurations_of_size(all, k)) {
            if (!m2.leq(o.result)) continue;
            bool found = false;
            for (const auto& m : configurations_of_size(all, k)) {
              if (!m.leq(c)) continue;
              AbstractConfiguration g{m, s};
              for (const auto& st : abstract_successors(p, g)) {
                if (st.transition == o.transition && st.to.m == m2 &&
                    o.result.support(p.num_states()).subset_of(st.to.s)) {
                  found = true;
                  break;
                }
              }
              if (found) break;
            }
            CAPTURE(render(p));
            CAPTURE(format_configuration(p, c));
            CAPTURE(p.describe(o.transition));
            CAPTURE(format_configuration(p, m2));
            CHECK(found);
          }
        }
      }
    }
  }
}

TEST_CASE("agreement with explicit search") {
  std::mt19937_64 rng(17);
  for (const Protocol& p : random_corpus(100, 4, 3, false, 7000)) {
    for (int i = 0; i < 3; ++i) {
      Configuration target;
      std::size_t k = 1 + rng() % 3;
      for (std::size_t j = 0; j < k; ++j) target.add(static_cast<StateId>(rng() % p.num_states()));
      CAPTURE(render(p));
      CAPTURE(format_configuration(p, target));
      bool abstract = check_conf_cover(p, target).covered;
      bool oracle = oracle_covers(p, target, 8);
      CHECK(abstract == oracle);
    }
  }
}
