#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "nbcover/conf_cover.hpp"
#include "nbcover/error.hpp"
#include "nbcover/semantics.hpp"

using namespace nbcover;
using namespace nbcover::fixtures;

namespace {

bool oracle_covers(const Protocol& p, const Configuration& target, std::uint64_t max_n) {
  for (std::uint64_t n = target.size(); n <= max_n; ++n) {
    if (cover_query(p, n, target, {200000, std::nullopt}).verdict == Verdict::Covered) return true;
  }
  return false;
}

Configuration random_configuration(const Protocol& p, std::mt19937_64& rng, std::uint64_t max_size) {
  Configuration c;
  std::uint64_t n = 1 + rng() % max_size;
  for (std::uint64_t i = 0; i < n; ++i) c.add(static_cast<StateId>(rng() % p.num_states()));
  return c;
}

}  // namespace

TEST_CASE("conflict_free") {
  Protocol ex1 = load_fig("wo_rdv_ex1.nbp");
  TokenSet g = token_set(ex1, {"q_in"}, {{"q1", "a"}, {"q3", "b"}});
  CHECK_FALSE(conflict_free(ex1, g, ex1.state_id("q1"), ex1.state_id("q3")));

  // q1 receives c, so no pair of tokens separates q1 from q5.
  Protocol p1 = load_fig("p1.nbp");
  TokenSet first = token_set(p1, {"q_in", "q4"}, {{"q1", "a"}, {"q1", "b"}, {"q5", "c"}});
  CHECK_FALSE(conflict_free(p1, first, p1.state_id("q1"), p1.state_id("q5")));

  Protocol two = parse_protocol("protocol X\ninit q_in\nq_in !a x\nq_in !b y\nx ?c z\ny ?c z\nq_in !c q_in\n");
  TokenSet t = token_set(two, {"q_in"}, {{"x", "a"}, {"y", "b"}});
  CHECK(conflict_free(two, t, two.state_id("x"), two.state_id("y")));
  CHECK_THROWS_AS(conflict_free(two, t, two.state_id("x"), two.state_id("x")), Error);
  CHECK_THROWS_AS(conflict_free(two, t, two.state_id("x"), two.state_id("z")), Error);
}

TEST_CASE("respects") {
  Protocol ex1 = load_fig("wo_rdv_ex1.nbp");
  TokenSet g = token_set(ex1, {"q_in", "q2", "q4"}, {{"q1", "a"}, {"q3", "b"}});
  CHECK_FALSE(respects(ex1, g, conf(ex1, "q1,q3")));
  CHECK(respects(ex1, g, conf(ex1, "q1,q_in:2")));
  CHECK(respects(ex1, g, conf(ex1, "q2:40")));
  CHECK_FALSE(respects(ex1, g, conf(ex1, "q1:2")));
}

TEST_CASE("consistent") {
  Protocol p1 = load_fig("p1.nbp");
  CHECK(consistent(p1, initial_token_set(p1)).ok);
  CHECK(consistent(p1, apply_F(p1, initial_token_set(p1))).ok);

  Protocol h = parse_protocol("protocol X\ninit q_in\nq_in !m q\nq_in !n r\nr ?m s\nq ?k s\n");
  auto bad = consistent(h, token_set(h, {"q_in"}, {{"q", "m"}, {"r", "n"}}));
  CHECK_FALSE(bad.ok);
  CHECK(bad.violations.size() == 1);

  auto unjustified = consistent(h, token_set(h, {"q_in"}, {{"s", "m"}}));
  CHECK_FALSE(unjustified.ok);

  // A token on q5 next to a token on q1 breaks the mutual-reception condition.
  auto printed = consistent(p1, token_set(p1, {"q_in", "q4"}, {{"q1", "a"}, {"q1", "b"}, {"q5", "c"}}));
  CHECK_FALSE(printed.ok);
}

TEST_CASE("operator F on the protocol with an unbounded sender") {
  Protocol p1 = load_fig("p1.nbp");
  auto first = apply_F_traced(p1, initial_token_set(p1));
  CHECK(first.intermediate == token_set(p1, {"q_in", "q4"}, {{"q1", "a"}, {"q1", "b"}, {"q5", "c"}}));
  // The two-token rule fires on (q5,c),(q1,a): q1 receives c, q5 does not receive a.
  CHECK(first.result == token_set(p1, {"q_in", "q4", "q5"}, {{"q1", "a"}, {"q1", "b"}}));

  TokenSet printed = token_set(p1, {"q_in", "q4"}, {{"q1", "a"}, {"q1", "b"}, {"q5", "c"}});
  auto second = apply_F_traced(p1, printed);
  CHECK(second.intermediate ==
        token_set(p1, {"q_in", "q2", "q4", "q6", "q7"}, {{"q1", "a"}, {"q1", "b"}, {"q3", "a"}, {"q3", "b"}, {"q5", "c"}}));
  TokenSet expected =
      token_set(p1, {"q_in", "q2", "q4", "q5", "q6", "q7"}, {{"q1", "a"}, {"q1", "b"}, {"q3", "a"}, {"q3", "b"}});
  CHECK(second.result == expected);
  bool promoted_again = false;
  for (const auto& f : second.log) promoted_again = promoted_again || (f.rule == "6" && p1.state_name(f.state) == "q5");
  CHECK(promoted_again);
  CHECK(apply_F(p1, first.result) == expected);

  auto trace = fixpoint(p1);
  CHECK(trace.iterates.back() == expected);
  CHECK(trace.iterates.size() == 4);
}

TEST_CASE("operator F on the symmetric protocol") {
  Protocol p2 = load_fig("p2.nbp");
  auto first = apply_F_traced(p2, initial_token_set(p2));
  CHECK(first.intermediate ==
        token_set(p2, {"q_in"}, {{"q1", "a"}, {"q2", "b"}, {"p1", "m1"}, {"p2", "m2"}, {"p3", "m3"}}));
  // Swapping p1/m1 with p2/m2 maps the protocol to itself, so p1 and p2 are promoted together.
  CHECK(first.result == token_set(p2, {"q_in", "q1", "p1", "p2"}, {{"q2", "b"}, {"p3", "m3"}}));
  auto trace = fixpoint(p2);
  CHECK(trace.iterates.back() == token_set(p2, {"q_in", "q1", "q3", "p1", "p2", "p3", "p4"}, {{"q2", "b"}}));
}

TEST_CASE("fixpoint without sends") {
  Protocol p = parse_protocol("protocol X\ninit q_in\nq_in tau q_in\n");
  Protocol n = normalize_tau(p, TauEncoding::Send);
  auto only_recv = parse_protocol("protocol Y\ninit q_in\nw ?a v\n");
  auto trace = fixpoint(only_recv);
  CHECK(trace.iterates.back() == initial_token_set(only_recv));
  CHECK(trace.iterates.size() == 2);
  CHECK(fixpoint(n).iterates.back().s.count() == 1);
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(fixpoint(load_fig("p.nbp")), PreconditionError);
  CHECK_THROWS_AS(fixpoint(load_fig("p_dashed.nbp")), PreconditionError);
  CHECK_THROWS_AS(fixpoint(parse_protocol("protocol X\ninit a\na tau b\n")), PreconditionError);
  CHECK_THROWS_AS(check_conf_cover_rdv(load_fig("p1.nbp"), Configuration()), Error);
}

TEST_CASE("configuration cover with token sets") {
  Protocol ex1 = load_fig("wo_rdv_ex1.nbp");
  CHECK_FALSE(check_conf_cover_rdv(ex1, conf(ex1, "q1,q3")));
  Protocol ex2 = load_fig("wo_rdv_ex2.nbp");
  CHECK(check_conf_cover_rdv(ex2, conf(ex2, "q1,q3")));
  CHECK(fixpoint(ex2).iterates.back() == token_set(ex2, {"q_in", "q1", "q2", "q4"}, {{"q3", "b"}}));
  Protocol p1 = load_fig("p1.nbp");
  for (StateId q : fixpoint(p1).iterates.back().s.members()) {
    Configuration c;
    c.add(q, 10);
    CHECK(check_conf_cover_rdv(p1, c));
  }
}

TEST_CASE("iterates are consistent and make progress") {
  for (const Protocol& p : random_corpus(300, 6, 3, true, 8000)) {
    auto trace = fixpoint(p);
    const std::size_t bound = p.num_states() * p.num_states() * std::max<std::size_t>(p.num_messages(), 1) + 1;
    CHECK(trace.iterates.size() <= bound + 1);
    CHECK(trace.iterates.back() == trace.iterates[trace.iterates.size() - 2]);
    for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
      const TokenSet& g = trace.iterates[i];
      CAPTURE(render(p));
      CAPTURE(format_token_set(p, g));
      CHECK(consistent(p, g).ok);
      for (const auto& [q, m] : g.toks) CHECK_FALSE(g.s.contains(q));
      if (i + 2 < trace.iterates.size()) {
        const TokenSet& next = trace.iterates[i + 1];
        CHECK(g.s.subset_of(next.s));
        bool grows = g.s != next.s;
        bool toks_grow = std::includes(next.toks.begin(), next.toks.end(), g.toks.begin(), g.toks.end());
        CHECK((grows || toks_grow));
      }
    }
  }
}

TEST_CASE("membership is downward closed") {
  std::mt19937_64 rng(23);
  std::size_t checked = 0;
  for (const Protocol& p : random_corpus(200, 5, 3, true, 9000)) {
    TokenSet g = fixpoint(p).iterates.back();
    for (int i = 0; i < 20; ++i) {
      Configuration big = random_configuration(p, rng, 6);
      if (!respects(p, g, big)) continue;
      Configuration small;
      for (const auto& [q, k] : big.entries()) {
        std::uint64_t keep = rng() % (k + 1);
        if (keep) small.add(q, keep);
      }
      if (small.empty()) continue;
      CHECK(respects(p, g, small));
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("concrete steps from respecting configurations land in the next iterate") {
  for (const Protocol& p : random_corpus(120, 5, 3, true, 10000)) {
    auto trace = fixpoint(p);
    auto reach = explore(p, 4, {20000, std::nullopt});
    for (std::size_t i = 0; i + 1 < trace.iterates.size(); ++i) {
      for (const auto& c : reach.configurations) {
        if (!respects(p, trace.iterates[i], c)) continue;
        for (const auto& o : successors(p, c)) {
          CAPTURE(render(p));
          CAPTURE(i);
          CAPTURE(format_configuration(p, c));
          CAPTURE(format_configuration(p, o.result));
          CHECK(respects(p, trace.iterates[i + 1], o.result));
        }
      }
    }
  }
}

TEST_CASE("token sets, abstract search and explicit search agree") {
  std::mt19937_64 rng(29);
  for (const Protocol& p : random_corpus(120, 5, 3, true, 11000)) {
    for (int i = 0; i < 3; ++i) {
      Configuration target = random_configuration(p, rng, 3);
      CAPTURE(render(p));
      CAPTURE(format_configuration(p, target));
      bool tok = check_conf_cover_rdv(p, target);
      CHECK(tok == check_conf_cover(p, target).covered);
      CHECK(tok == oracle_covers(p, target, 8));
    }
  }
}

TEST_CASE("unbounded states fill up together") {
  for (const Protocol& p : random_corpus(40, 4, 2, true, 12000)) {
    auto s = fixpoint(p).iterates.back().s.members();
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        Configuration target;
        target.add(s[i], 2);
        target.add(s[j], 2);
        CAPTURE(render(p));
        CAPTURE(format_configuration(p, target));
        CHECK(oracle_covers(p, target, 12));
      }
    }
  }
}
