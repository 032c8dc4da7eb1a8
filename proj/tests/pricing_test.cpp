#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include <nftlens/payment_graph.hpp>
#include <nftlens/pricing.hpp>
#include <support/demo_world.hpp>

using namespace nftlens;
using namespace nftlens::fixtures;

namespace {

constexpr uint64_t kNow = 1'700'000'000;

CollectionStatsBatch batch(const Address& contract, uint64_t end, Wei volume, uint64_t trades,
                           uint64_t span = 5'000) {
    return {contract, end - span, end, std::move(volume), trades};
}

}  // namespace

TEST_CASE("rule (i): no trades within the lookback window") {
    StatsStore stats;
    // last trade 13 months ago, lookback 12
    stats.add(batch(addr(0xA1), kNow - 13 * kSecondsPerMonth, eth("100"), 80));
    const auto q = speculative_price(addr(0xA1), kNow, stats, 12, 50);
    CHECK(q.basis == PriceBasis::kDevaluedZero);
    CHECK(q.price == 0);
}

TEST_CASE("rule (ii): too few recent trades") {
    StatsStore stats;
    stats.add(batch(addr(0xA1), kNow - 1000, eth("100"), 40));
    const auto q = speculative_price(addr(0xA1), kNow, stats, 12, 50);
    CHECK(q.basis == PriceBasis::kDevaluedZero);
    CHECK(q.price == 0);
}

TEST_CASE("rule (iii): most recent batch average") {
    StatsStore stats;
    stats.add(batch(addr(0xA1), kNow - 1000, eth("120"), 60));
    const auto q = speculative_price(addr(0xA1), kNow, stats, 12, 50);
    CHECK(q.basis == PriceBasis::kRecentAverage);
    CHECK(q.price == eth("2"));
}

TEST_CASE("unknown contract is an error, not a zero quote") {
    StatsStore stats;
    stats.add(batch(addr(0xA1), kNow - 1000, eth("120"), 60));
    CHECK_THROWS_AS(speculative_price(addr(0xB2), kNow, stats, 12, 50), NoDataError);
}

TEST_CASE("the most recent overlapping batch wins, not the largest") {
    StatsStore stats;
    stats.add(batch(addr(0xA1), kNow - 50'000, eth("500"), 100));
    stats.add(batch(addr(0xA1), kNow - 1000, eth("120"), 60));
    const auto q = speculative_price(addr(0xA1), kNow, stats, 12, 50);
    CHECK(q.price == eth("2"));
}

TEST_CASE("adding an older batch never changes a rule-(iii) result") {
    StatsStore stats;
    stats.add(batch(addr(0xA1), kNow - 1000, eth("120"), 60));
    const auto before = speculative_price(addr(0xA1), kNow, stats, 12, 50);
    stats.add(batch(addr(0xA1), kNow - 2 * kSecondsPerMonth, eth("999"), 90));
    const auto after = speculative_price(addr(0xA1), kNow, stats, 12, 50);
    CHECK(before.price == after.price);
    CHECK(before.basis == after.basis);
}

TEST_CASE("devalued quote propagates to a full-loss speculative profit") {
    StatsStore stats;
    stats.add(batch(addr(0xA1), kNow - 13 * kSecondsPerMonth, eth("100"), 80));
    const auto q = speculative_price(addr(0xA1), kNow, stats, 12, 50);
    CHECK(speculative_profit(eth("3"), q.price) == -SignedWei(eth("3")));
}

TEST_CASE("stats file round trip") {
    std::istringstream in(demo_stats_jsonl());
    const auto stats = StatsStore::load(in);
    const auto q = speculative_price(kNftAz, 1'650'010'000, stats, 3, 50);
    CHECK(q.price == eth("2"));
}

// --- fiat ------------------------------------------------------------------------

TEST_CASE("one ETH at rate 2000 is 2000 USD") {
    FiatFeed feed;
    feed.add({1000, BigInt(2000) * kUsdScale});
    CHECK(to_usd(eth("1"), 2000, feed).str() == "2000");
}

TEST_CASE("zero wei is zero USD") {
    FiatFeed feed;
    feed.add({1000, BigInt(2000) * kUsdScale});
    CHECK(to_usd(0, 2000, feed).str() == "0");
}

TEST_CASE("no rate at or before the timestamp is an error") {
    FiatFeed feed;
    feed.add({5000, BigInt(2000) * kUsdScale});
    CHECK_THROWS_AS(to_usd(eth("1"), 4999, feed), NoRateError);
}

TEST_CASE("step-function feed picks the nearest preceding rate") {
    FiatFeed feed;
    std::vector<std::pair<uint64_t, int>> points = {{100, 1500}, {200, 1600}, {300, 1400},
                                                    {400, 2000}, {500, 1900}};
    for (auto [ts, rate] : points) feed.add({ts, BigInt(rate) * kUsdScale});
    // linear-scan oracle
    for (uint64_t at : {100, 150, 200, 250, 399, 400, 401, 1000}) {
        int expected = 0;
        for (auto [ts, rate] : points)
            if (ts <= at) expected = rate;
        const auto usd = to_usd(eth("1"), at, feed);
        CHECK(usd.micro == BigInt(expected) * kUsdScale);
    }
}

TEST_CASE("fractional rates parse to micro-USD") {
    auto r = FiatFeed::parse_rate("1850.25");
    REQUIRE(r.has_value());
    CHECK(*r == BigInt(1'850'250'000));
    CHECK(to_usd(eth("2"), 10, [] {
              FiatFeed f;
              f.add({1, BigInt(1'850'250'000)});
              return f;
          }()).str() == "3700.5");
}

TEST_CASE("fiat CSV loads") {
    std::istringstream in("# comment\n1650000000,2000\n1650000100,1999.5\n");
    const auto feed = FiatFeed::load(in);
    CHECK(to_usd(eth("1"), 1'650'000'050, feed).str() == "2000");
    CHECK(to_usd(eth("1"), 1'650'000'200, feed).str() == "1999.5");
}
