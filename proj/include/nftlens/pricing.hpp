#pragma once

#include <algorithm>
#include <istream>
#include <map>

#include <json.hpp>

#include "types.hpp"

namespace nftlens {

/// Aggregate sale stats a marketplace releases in batches per collection.
struct CollectionStatsBatch {
    Address contract;
    uint64_t window_start = 0;
    uint64_t window_end = 0;
    Wei total_volume;
    uint64_t trade_count = 0;
};

struct NoDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoRateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Stats file: JSON lines {contract, window_start, window_end,
/// total_volume_wei, trade_count}.
class StatsStore {
  public:
    void add(CollectionStatsBatch batch) {
        if (batch.window_start >= batch.window_end)
            throw std::runtime_error("stats batch window_start must precede window_end");
        auto& v = batches_[batch.contract];
        v.push_back(std::move(batch));
        std::sort(v.begin(), v.end(),
                  [](const auto& a, const auto& b) { return a.window_end < b.window_end; });
    }

    const std::vector<CollectionStatsBatch>* batches(const Address& contract) const {
        auto it = batches_.find(contract);
        return it == batches_.end() ? nullptr : &it->second;
    }

    static StatsStore load(std::istream& in) {
        StatsStore store;
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded())
                throw std::runtime_error("stats line " + std::to_string(line_no) + ": bad JSON");
            CollectionStatsBatch b;
            auto addr = Address::from_hex(j.at("contract").get<std::string>());
            if (!addr)
                throw std::runtime_error("stats line " + std::to_string(line_no) + ": bad contract");
            b.contract = *addr;
            b.window_start = j.at("window_start").get<uint64_t>();
            b.window_end = j.at("window_end").get<uint64_t>();
            b.trade_count = j.at("trade_count").get<uint64_t>();
            const auto& vol = j.at("total_volume_wei");
            auto v = vol.is_string() ? bigint_from_dec(vol.get<std::string>())
                                     : std::optional<BigInt>(BigInt(vol.get<uint64_t>()));
            if (!v) throw std::runtime_error("stats line " + std::to_string(line_no) + ": bad volume");
            b.total_volume = *v;
            store.add(std::move(b));
        }
        return store;
    }

  private:
    std::map<Address, std::vector<CollectionStatsBatch>> batches_;
};

enum class PriceBasis : uint8_t { kRecentAverage, kDevaluedZero };

inline std::string_view price_basis_name(PriceBasis b) {
    return b == PriceBasis::kRecentAverage ? "recent_average" : "devalued_zero";
}

struct PriceQuote {
    Address nft_contract;
    uint64_t as_of = 0;
    Wei price;  // 0 whenever basis is devalued_zero
    PriceBasis basis = PriceBasis::kDevaluedZero;
};

inline constexpr uint64_t kSecondsPerMonth = 30ull * 24 * 3600;

/// §4.1 pricing rules: (i) no trades within the lookback window → 0;
/// (ii) the most recent batch traded fewer than min_trades times → 0;
/// (iii) otherwise the most recent batch's average sale price.
/// Unknown contracts are an error, distinct from a devalued quote.
inline PriceQuote speculative_price(const Address& contract, uint64_t as_of,
                                    const StatsStore& stats, uint32_t lookback_months,
                                    uint64_t min_trades) {
    const auto* batches = stats.batches(contract);
    if (!batches) throw NoDataError("no stats for contract " + contract.hex());

    const uint64_t lookback = uint64_t{lookback_months} * kSecondsPerMonth;
    const uint64_t window_from = as_of >= lookback ? as_of - lookback : 0;
    const CollectionStatsBatch* recent = nullptr;
    for (const auto& b : *batches) {
        if (b.trade_count == 0) continue;
        if (b.window_start > as_of || b.window_end < window_from) continue;
        if (!recent || b.window_end > recent->window_end) recent = &b;
    }
    PriceQuote q;
    q.nft_contract = contract;
    q.as_of = as_of;
    if (!recent || recent->trade_count < min_trades) {
        q.price = 0;
        q.basis = PriceBasis::kDevaluedZero;
        return q;
    }
    q.price = recent->total_volume / recent->trade_count;
    q.basis = PriceBasis::kRecentAverage;
    return q;
}

// ---------------------------------------------------------------------------
// Fiat conversion
// ---------------------------------------------------------------------------

inline constexpr int64_t kUsdScale = 1'000'000;  // micro-USD fixed point

/// Decimal USD amount kept in micro-USD; no floating point.
struct Usd {
    BigInt micro;

    std::string str() const {
        BigInt v = micro < 0 ? BigInt(-micro) : micro;
        BigInt whole = v / kUsdScale;
        BigInt frac = v % kUsdScale;
        std::string out = (micro < 0 ? "-" : "") + whole.str();
        if (frac != 0) {
            std::string f = frac.str();
            f.insert(f.begin(), 6 - f.size(), '0');
            while (!f.empty() && f.back() == '0') f.pop_back();
            out += "." + f;
        }
        return out;
    }
};

struct FiatRate {
    uint64_t timestamp = 0;
    BigInt micro_usd;  // USD per native unit, scaled by kUsdScale; > 0
};

/// Historical price feed: CSV lines "timestamp,usd_rate", rate a decimal with
/// up to six fractional digits.
class FiatFeed {
  public:
    void add(FiatRate r) {
        if (r.micro_usd <= 0) throw std::runtime_error("fiat rate must be positive");
        rates_.push_back(std::move(r));
        std::sort(rates_.begin(), rates_.end(),
                  [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    }

    /// Latest rate at or before `at`.
    const FiatRate* rate_before(uint64_t at) const {
        const FiatRate* best = nullptr;
        for (const auto& r : rates_) {
            if (r.timestamp > at) break;
            best = &r;
        }
        return best;
    }

    bool empty() const { return rates_.empty(); }

    static FiatFeed load(std::istream& in) {
        FiatFeed feed;
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            const size_t comma = line.find(',');
            if (comma == std::string::npos)
                throw std::runtime_error("fiat line " + std::to_string(line_no) + ": expected 'timestamp,rate'");
            FiatRate r;
            r.timestamp = std::stoull(line.substr(0, comma));
            auto rate = parse_rate(line.substr(comma + 1));
            if (!rate)
                throw std::runtime_error("fiat line " + std::to_string(line_no) + ": bad rate");
            r.micro_usd = *rate;
            feed.add(std::move(r));
        }
        return feed;
    }

    static std::optional<BigInt> parse_rate(std::string_view s) {
        const size_t dot = s.find('.');
        std::string_view whole = dot == std::string_view::npos ? s : s.substr(0, dot);
        std::string_view frac = dot == std::string_view::npos ? "" : s.substr(dot + 1);
        if (frac.size() > 6) frac = frac.substr(0, 6);
        auto w = bigint_from_dec(whole);
        if (!w || *w < 0) return std::nullopt;
        BigInt micro = *w * kUsdScale;
        if (!frac.empty()) {
            auto f = bigint_from_dec(frac);
            if (!f) return std::nullopt;
            BigInt scale = 1;
            for (size_t i = frac.size(); i < 6; ++i) scale *= 10;
            micro += *f * scale;
        }
        return micro;
    }

  private:
    std::vector<FiatRate> rates_;
};

/// Converts wei to USD at the nearest preceding feed point.
inline Usd to_usd(const Wei& amount, uint64_t at, const FiatFeed& feed) {
    const FiatRate* r = feed.rate_before(at);
    if (!r) throw NoRateError("no fiat rate at or before " + std::to_string(at));
    static const BigInt kWeiPerEth = []() {
        BigInt e = 1;
        for (int i = 0; i < 18; ++i) e *= 10;
        return e;
    }();
    return Usd{amount * r->micro_usd / kWeiPerEth};
}

}  // namespace nftlens
