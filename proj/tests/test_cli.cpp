#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fixtures.hpp"

using nbcover::fixtures::fig_path;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run nb(std::vector<std::string> args) {
  args.insert(args.begin(), "nbcover");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = nbcover::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

nlohmann::json nbj(std::vector<std::string> args, int expected_code) {
  args.insert(args.begin(), "--json");
  Run r = nb(args);
  CHECK(r.code == expected_code);
  return nlohmann::json::parse(r.out);
}

}  // namespace

TEST_CASE("classify") {
  Run r = nb({"classify", fig_path("p.nbp")});
  CHECK(r.code == 0);
  CHECK(r.out.find("wait-only:        yes") != std::string::npos);
  auto j = nbj({"classify", fig_path("p_dashed.nbp")}, 0);
  CHECK(j["protocol"]["classification"]["wait_only"] == false);
  CHECK(j["offending_states"] == nlohmann::json::array({"q2"}));
}

TEST_CASE("conf-cover") {
  Run r = nb({"conf-cover", fig_path("p_prime.nbp"), "--target", "q3:2,q6:1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("covered") != std::string::npos);
  CHECK(r.out.find("=switch=>") != std::string::npos);

  auto j = nbj({"conf-cover", fig_path("p_prime.nbp"), "--target", "q3:2,q6:1"}, 0);
  CHECK(j["engine"] == "abstract");
  CHECK(j["covered"] == true);
  CHECK(j["cutoff_bound"] == "33554435");
  CHECK(j["abstract_path"].size() == 8);
  CHECK(j["abstract_path"][0]["transition"] == "q_in tau q4");

  auto t = nbj({"conf-cover", fig_path("wo_rdv_ex2.nbp"), "--target", "q1,q3"}, 0);
  CHECK(t["engine"] == "tokenset");
  CHECK(t["token_set"]["Toks"] == nlohmann::json::parse(R"([["q3","b"]])"));

  CHECK(nb({"conf-cover", fig_path("wo_rdv_ex1.nbp"), "--target", "q1,q3"}).code == 1);
  CHECK(nb({"conf-cover", fig_path("wo_rdv_ex1.nbp"), "--target", "q1,q3", "--engine", "abstract"}).code == 1);
  CHECK(nb({"conf-cover", fig_path("wo_rdv_ex2.nbp"), "--target", "q1,q3", "--engine", "oracle"}).code == 0);
  Run inc = nb({"conf-cover", fig_path("wo_rdv_ex1.nbp"), "--target", "q1,q3", "--engine", "oracle", "--max-n", "4"});
  CHECK(inc.code == 3);
  CHECK(inc.out.find("inconclusive") != std::string::npos);
  CHECK(nb({"conf-cover", fig_path("p.nbp"), "--target", "q3", "--engine", "tokenset"}).code == 2);
  CHECK(nb({"conf-cover", fig_path("p.nbp"), "--target", "nowhere:2"}).code == 2);
  CHECK(nb({"conf-cover", fig_path("p.nbp"), "--target", "q3:x"}).code == 2);
}

TEST_CASE("state-cover") {
  Run bad = nb({"state-cover", fig_path("p_dashed.nbp"), "--state", "q3"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("explore") != std::string::npos);

  auto j = nbj({"state-cover", fig_path("p.nbp"), "--state", "q6", "--witness"}, 0);
  CHECK(j["covered"] == true);
  CHECK(j["bounds"]["q6"] == 3);
  CHECK(j["witness"]["initial_size"] == 3);
  CHECK(j["rounds"].size() == 5);

  CHECK(nb({"state-cover", fig_path("p.nbp"), "--state", "q7"}).code == 2);
  CHECK(nb({"state-cover", fig_path("missing.nbp"), "--state", "q1"}).code == 2);
}

TEST_CASE("explore") {
  CHECK(nb({"explore", fig_path("p_dashed.nbp"), "-n", "4", "--target", "q2:2"}).code == 1);
  CHECK(nb({"explore", fig_path("p_dashed.nbp"), "-n", "4", "--target", "q3"}).code == 0);
  auto j = nbj({"explore", fig_path("p_dashed.nbp"), "-n", "4", "--target", "q2:2"}, 1);
  CHECK(j["verdict"] == "not covered");
  CHECK(j["explored"] == 53);
  CHECK(nb({"explore", fig_path("p_dashed.nbp"), "-n", "6", "--max-states", "5"}).code == 3);
}

TEST_CASE("tokenset") {
  auto j = nbj({"tokenset", fig_path("wo_rdv_ex2.nbp")}, 0);
  CHECK(j["iterates"].size() == 4);
  CHECK(j["iterates"].back()["S"] == nlohmann::json::parse(R"(["q_in","q1","q2","q4"])"));
  CHECK(j["rules"].size() == 3);
  Run trace = nb({"tokenset", fig_path("p1.nbp"), "--trace"});
  CHECK(trace.code == 0);
  CHECK(trace.out.find("rule 6: q5") != std::string::npos);
  CHECK(nb({"tokenset", fig_path("p.nbp")}).code == 2);
}

TEST_CASE("gen") {
  Run cvp = nb({"gen", "cvp", fig_path("cvp_example.cvp")});
  CHECK(cvp.code == 0);
  CHECK(cvp.out.rfind("# target: g2_bot:1\nprotocol cvp\n", 0) == 0);
  Run rdv = nb({"gen", "cvp", fig_path("cvp_example.cvp"), "--rdv"});
  CHECK(rdv.out.find("q_in !v1_T q_in") != std::string::npos);
  Run dfa = nb({"gen", "dfa", fig_path("dfa_even_a_ends_a.dfa")});
  CHECK(dfa.out.rfind("# target: a1_e:1,a2_y:1\n", 0) == 0);
  Run a = nb({"gen", "random", "--seed", "7", "--states", "5", "--messages", "2"});
  Run b = nb({"gen", "random", "--seed", "7", "--states", "5", "--messages", "2"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(nb({"gen", "random", "--seed", "7", "--states", "0", "--messages", "2"}).code == 2);
}

TEST_CASE("usage errors") {
  CHECK(nb({}).code == 2);
  CHECK(nb({"bogus"}).code == 2);
  CHECK(nb({"conf-cover", fig_path("p.nbp")}).code == 2);
  CHECK(nb({"conf-cover", fig_path("p.nbp"), "--target", "q3", "--engine", "magic"}).code == 2);
  CHECK(nb({"--help"}).code == 0);
}
