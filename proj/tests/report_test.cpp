#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include <nftlens/findings_io.hpp>

using namespace nftlens;

namespace {

std::vector<json> sample_findings() {
    return {
        json{{"pattern", "buy_buy"}, {"block_number", 12}, {"gas_delta", "5000"},
             {"txn", "0xaa"}, {"nft", {{"contract", "0x01"}, {"token_id", "7"}}}},
        json{{"kind", "arbitrage"}, {"block_number", 9}, {"net_profit_wei", "5000000000000000"},
             {"txn", "0xbb"}, {"clique", json::array({"0x01", "0x02"})}},
        json{{"kind", "reward_collection"}, {"block_number", 9}, {"net_profit_wei", "0"},
             {"txn", "0xcc"}},
    };
}

}  // namespace

TEST_CASE("zero findings render as a header-only table") {
    std::ostringstream out;
    render_table({}, out);
    const std::string text = out.str();
    CHECK(text.find("block") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);  // header + rule, no rows
}

TEST_CASE("jsonl to csv to jsonl round trip preserves fields") {
    const auto findings = sample_findings();
    std::ostringstream csv;
    render_csv(findings, csv);
    std::istringstream csv_in(csv.str());
    const auto back = parse_csv(csv_in);
    REQUIRE(back.size() == findings.size());
    for (size_t i = 0; i < findings.size(); ++i) CHECK(back[i] == findings[i]);
}

TEST_CASE("table sorts by block, then by money figure descending") {
    std::ostringstream out;
    render_table(sample_findings(), out);
    const std::string text = out.str();
    const auto pos_arb = text.find("0xbb");
    const auto pos_reward = text.find("0xcc");
    const auto pos_frontrun = text.find("0xaa");
    REQUIRE(pos_arb != std::string::npos);
    CHECK(pos_arb < pos_reward);      // same block, larger profit first
    CHECK(pos_reward < pos_frontrun);  // lower block first
}

TEST_CASE("table footer counts findings per kind") {
    std::ostringstream out;
    render_table(sample_findings(), out);
    const std::string text = out.str();
    CHECK(text.find("buy_buy: 1") != std::string::npos);
    CHECK(text.find("arbitrage: 1") != std::string::npos);
    CHECK(text.find("reward_collection: 1") != std::string::npos);
}

TEST_CASE("malformed findings lines are rejected") {
    std::istringstream in("{\"ok\":1}\nnot json\n");
    CHECK_THROWS_AS(parse_findings(in), MalformedFinding);
}

TEST_CASE("csv quoting survives commas and quotes") {
    std::vector<json> findings = {json{{"note", "a,b \"c\""}, {"n", 1}}};
    std::ostringstream csv;
    render_csv(findings, csv);
    std::istringstream csv_in(csv.str());
    const auto back = parse_csv(csv_in);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == findings[0]);
}

TEST_CASE("jsonl rendering is lossless") {
    const auto findings = sample_findings();
    std::ostringstream out;
    render_jsonl(findings, out);
    std::istringstream in(out.str());
    const auto back = parse_findings(in);
    REQUIRE(back.size() == findings.size());
    for (size_t i = 0; i < findings.size(); ++i) CHECK(back[i] == findings[i]);
}
