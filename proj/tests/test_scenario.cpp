#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "deedchain/scenario.hpp"

using namespace deedchain;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarioDir = fs::path(DEEDCHAIN_SOURCE_DIR) / "data" / "scenarios";

Scenario must_parse(const std::string& src) {
    auto sc = parse_scenario(src);
    REQUIRE_MESSAGE(sc.ok(), sc.detail);
    return *sc;
}

}  // namespace

TEST_CASE("parser accepts the documented header fields") {
    auto sc = must_parse(
        "schema: 1\n"
        "name: demo\n"
        "seed: 99\n"
        "consensus: pow-memory difficulty=6 memory=32\n"
        "base_fee: 2\n"
        "token: DOGE\n"
        "actor: alice coin=100 usds=50 DOGE=7\n"
        "actor: bob stake=3\n");
    CHECK(sc.name == "demo");
    CHECK(sc.seed == 99);
    CHECK(sc.consensus.strategy == ConsensusStrategy::PowMemory);
    CHECK(sc.consensus.work.difficulty_bits == 6);
    CHECK(sc.consensus.work.memory_cost == 32);
    CHECK(sc.base_fee == 2);
    REQUIRE(sc.actors.size() == 2);
    CHECK(sc.actors[0].coin == 100);
    CHECK(sc.actors[0].usds == 50);
    CHECK(sc.actors[0].token_balances.at("DOGE") == 7);
    CHECK(sc.actors[1].stake == 3);
    CHECK(sc.consensus.stakes.stakes.at("bob") == 3);
}

TEST_CASE("parser rejections") {
    CHECK(parse_scenario("name: x\n").err == Err::ScenarioParseError);  // no schema
    CHECK(parse_scenario("schema: 2\n").err == Err::ScenarioParseError);
    CHECK(parse_scenario("schema: 1\nbogus: 1\n").err == Err::ScenarioParseError);
    CHECK(parse_scenario("schema: 1\nactor: a\nactor: a\n").err == Err::ScenarioParseError);
    CHECK(parse_scenario("schema: 1\nactor: a DOGE=5\n").err ==
          Err::ScenarioParseError);  // undeclared token
    CHECK(parse_scenario("schema: 1\nconsensus: pos\n").err ==
          Err::ScenarioParseError);  // pos without stake
    CHECK(parse_scenario("schema: 1\nfrobnicate x y\n").err == Err::ScenarioParseError);
}

TEST_CASE("empty action list yields a genesis-only report") {
    auto sc = must_parse("schema: 1\nname: idle\nactor: solo coin=10\n");
    auto report = run_scenario(sc);
    CHECK(report.outcomes.empty());
    CHECK(report.assertions_total == 0);
    CHECK(report.ok());
    REQUIRE(!report.summary.empty());
    CHECK(report.summary[0] == "height 0");
}

TEST_CASE("token transfer scenario with assertions") {
    auto sc = must_parse(
        "schema: 1\n"
        "name: pay\n"
        "base_fee: 1\n"
        "actor: a coin=1000000\n"
        "actor: b coin=0\n"
        "transfer a b COIN 2500\n"
        "advance 1\n"
        "expect balance b COIN 2500\n"
        "expect balance b USDS 0\n");
    auto report = run_scenario(sc);
    CHECK(report.assertions_total == 2);
    CHECK(report.assertions_failed == 0);
    CHECK(report.actions_failed == 0);
}

TEST_CASE("failed assertions and failed actions are both reported") {
    auto sc = must_parse(
        "schema: 1\n"
        "name: sour\n"
        "base_fee: 1\n"
        "actor: a coin=1000000\n"
        "actor: b coin=1000000\n"
        "transfer a b COIN 999999999\n"
        "advance 1\n"
        "expect balance b COIN 123\n");
    auto report = run_scenario(sc);
    CHECK(report.actions_failed == 1);   // transfer exceeds balance
    CHECK(report.assertions_failed == 1);
    CHECK(!report.ok());
}

TEST_CASE("bundled sale_happy_path ends with the buyer owning the deed") {
    auto sc = load_scenario(kScenarioDir / "sale_happy_path.scn");
    REQUIRE_MESSAGE(sc.ok(), sc.detail);
    auto report = run_scenario(*sc);
    for (const auto& o : report.outcomes) {
        INFO(o.text, " -> ", err_name(o.status.err), " ", o.status.detail);
        CHECK(o.status.ok());
    }
    CHECK(report.assertions_total == 3);
    CHECK(report.assertions_failed == 0);
    CHECK(report.actions_failed == 0);
}

TEST_CASE("bundled ftx_stress liquidates DOGE and spares the stablecoin loan") {
    auto sc = load_scenario(kScenarioDir / "ftx_stress.scn");
    REQUIRE_MESSAGE(sc.ok(), sc.detail);
    auto report = run_scenario(*sc);
    CHECK(report.assertions_total == 5);
    CHECK(report.assertions_failed == 0);
    // exactly one intended failure: liquidating the healthy stablecoin loan
    CHECK(report.actions_failed == 1);
    bool saw_not_liquidatable = false;
    for (const auto& o : report.outcomes)
        if (o.status.err == Err::NotLiquidatable) saw_not_liquidatable = true;
    CHECK(saw_not_liquidatable);
}

TEST_CASE("same seed gives byte-identical persistence files and reports") {
    auto sc = load_scenario(kScenarioDir / "ftx_stress.scn");
    REQUIRE(sc.ok());
    auto p1 = fs::temp_directory_path() / ("scn-a-" + std::to_string(::getpid()) + ".dcl");
    auto p2 = fs::temp_directory_path() / ("scn-b-" + std::to_string(::getpid()) + ".dcl");
    auto r1 = run_scenario(*sc, p1);
    auto r2 = run_scenario(*sc, p2);

    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(!b1.empty());
    CHECK(b1 == b2);

    auto t1 = render_report(r1, "text");
    auto t2 = render_report(r2, "text");
    REQUIRE(t1.ok());
    CHECK(t1->at("report.txt") == t2->at("report.txt"));
    fs::remove(p1);
    fs::remove(p2);
}

TEST_CASE("render_report formats") {
    auto sc = must_parse(
        "schema: 1\nname: r\nactor: a coin=1000000\n"
        "transfer a a COIN 1\nadvance 1\nexpect balance a COIN 999978984\n");
    auto report = run_scenario(sc);
    auto text = render_report(report, "text");
    REQUIRE(text.ok());
    CHECK(text->count("report.txt") == 1);
    auto again = render_report(report, "text");
    CHECK(text->at("report.txt") == again->at("report.txt"));

    auto csv = render_report(report, "csv");
    REQUIRE(csv.ok());
    CHECK(csv->count("events.csv") == 1);
    CHECK(csv->count("balances.csv") == 1);
    CHECK(csv->at("events.csv").rfind("line,kind,result,detail\n", 0) == 0);

    CHECK(render_report(report, "yaml").err == Err::UnknownFormat);
}
