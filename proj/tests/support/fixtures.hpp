#pragma once

// Synthetic chain-world builders shared by the test suites and the demo
// fixture generator. Everything here is deterministic.

#include <string>
#include <vector>

#include <nftlens/ingest.hpp>
#include <nftlens/registry.hpp>

namespace nftlens::fixtures {

inline Address addr(uint64_t n) { return Address::from_seed(n); }
inline Hash32 hash(uint64_t n) { return Hash32::from_seed(n); }

/// Exact decimal-ETH literal, e.g. eth("14.36") == 14360000000000000000 wei.
inline Wei eth(const std::string& dec) {
    const size_t dot = dec.find('.');
    std::string whole = dot == std::string::npos ? dec : dec.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : dec.substr(dot + 1);
    if (frac.size() > 18) throw std::runtime_error("more than 18 fractional digits: " + dec);
    frac.resize(18, '0');
    auto w = bigint_from_dec(whole.empty() ? "0" : whole);
    auto f = bigint_from_dec(frac);
    if (!w || !f) throw std::runtime_error("bad eth literal: " + dec);
    static const BigInt kOne = []() {
        BigInt e = 1;
        for (int i = 0; i < 18; ++i) e *= 10;
        return e;
    }();
    return *w * kOne + *f;
}

inline Wei gwei(uint64_t n) { return BigInt(n) * 1'000'000'000; }

/// ABI-style calldata: selector followed by 32-byte words.
inline Bytes calldata(const Selector& sel, const std::vector<Hash32>& words = {}) {
    Bytes out(sel.begin(), sel.end());
    for (const Hash32& w : words) out.insert(out.end(), w.bytes.begin(), w.bytes.end());
    return out;
}

class TxnBuilder {
  public:
    explicit TxnBuilder(uint64_t hash_seed) { t_.hash = hash(hash_seed); }

    TxnBuilder& from(const Address& a) {
        t_.sender = a;
        return *this;
    }
    TxnBuilder& to(const Address& a) {
        t_.receiver = a;
        return *this;
    }
    TxnBuilder& creates_contract() {
        t_.receiver.reset();
        return *this;
    }
    TxnBuilder& reverted() {
        t_.status = TxnStatus::kReverted;
        return *this;
    }
    TxnBuilder& gas(Wei gas_price, uint64_t gas_used) {
        t_.gas_price = std::move(gas_price);
        t_.gas_used = gas_used;
        return *this;
    }
    TxnBuilder& value(Wei v) {
        t_.value = std::move(v);
        return *this;
    }
    TxnBuilder& input(Bytes data) {
        t_.input = std::move(data);
        return *this;
    }
    TxnBuilder& call(const Address& from, const Address& to, Wei value, uint32_t depth = 1,
                     Bytes input = {}, CallKind kind = CallKind::kCall) {
        t_.internal_calls.push_back({from, to, std::move(value), std::move(input), kind, depth});
        return *this;
    }
    TxnBuilder& log(const Address& emitter, std::vector<Hash32> topics, Bytes data = {}) {
        t_.logs.push_back({emitter, std::move(topics), std::move(data), next_log_++});
        return *this;
    }
    TxnBuilder& transfer721(const Address& contract, const Address& from, const Address& to,
                            const TokenId& id) {
        return log(contract, {kTransferTopic, word_from_address(from), word_from_address(to),
                              word_from_uint(id)});
    }
    TxnBuilder& transfer20(const Address& contract, const Address& from, const Address& to,
                           const Wei& amount) {
        const Hash32 w = word_from_uint(amount);
        return log(contract, {kTransferTopic, word_from_address(from), word_from_address(to)},
                   Bytes(w.bytes.begin(), w.bytes.end()));
    }

    Txn build() { return std::move(t_); }

  private:
    Txn t_{.gas_price = 1'000'000'000, .gas_used = 21'000};
    uint32_t next_log_ = 0;
};

inline Block make_block(uint64_t number, std::vector<Txn> txns,
                        const Address& miner = addr(0x777),
                        uint64_t timestamp_base = 1'650'000'000) {
    Block b;
    b.number = number;
    b.timestamp = timestamp_base + number * 12;
    b.miner = miner;
    for (size_t i = 0; i < txns.size(); ++i) txns[i].index = static_cast<uint32_t>(i);
    b.txns = std::move(txns);
    return b;
}

// ---------------------------------------------------------------------------
// Demo marketplaces: a punks-like single-collection market with on-chain
// listings and bid-agnostic accepts, a wyvern-like generic market (off-chain
// listings), and a synthetic market that reports sales through an event log.
// ---------------------------------------------------------------------------

inline const Address kMktPunks = addr(0xA1);
inline const Address kMktWyvern = addr(0xA2);
inline const Address kMktSynth = addr(0xA3);

inline const Address kNftPunk = addr(0xB2);

inline const Selector kPunksListing = {0x70, 0x10, 0x00, 0x01};
inline const Selector kPunksCancelListing = {0x70, 0x10, 0x00, 0x02};
inline const Selector kPunksBuy = {0x70, 0x10, 0x00, 0x03};
inline const Selector kPunksPlaceBid = {0x70, 0x10, 0x00, 0x04};
inline const Selector kPunksAcceptBid = {0x70, 0x10, 0x00, 0x05};
inline const Selector kPunksCancelBid = {0x70, 0x10, 0x00, 0x06};

inline const Selector kWyvernBuy = {0x70, 0x20, 0x00, 0x01};
inline const Selector kWyvernCancelListing = {0x70, 0x20, 0x00, 0x02};
inline const Selector kWyvernAcceptBid = {0x70, 0x20, 0x00, 0x03};
inline const Selector kWyvernCancelBid = {0x70, 0x20, 0x00, 0x04};
inline const Selector kWyvernPlaceBid = {0x70, 0x20, 0x00, 0x05};

inline const Selector kSynthBuy = {0x70, 0x30, 0x00, 0x01};
inline const Selector kSynthListing = {0x70, 0x30, 0x00, 0x02};

// Synthetic Sale(address nft, uint256 tokenId) event with price in data.
inline const Hash32 kSynthSaleTopic = hash(0x5A1E);

inline std::string demo_registry_json() {
    auto src_calldata = [](uint32_t index) {
        return nlohmann::json{{"source", "calldata_word"}, {"index", index}};
    };
    nlohmann::json punks_actions = nlohmann::json::array();
    auto punks_action = [&](const Selector& sel, const char* kind, nlohmann::json price) {
        punks_actions.push_back({{"selector", selector_hex(sel)},
                                 {"kind", kind},
                                 {"nft_contract", {{"source", "const"}, {"value", kNftPunk.hex()}}},
                                 {"token_id", src_calldata(0)},
                                 {"price", std::move(price)},
                                 {"user", {{"source", "txn_sender"}}}});
    };
    punks_action(kPunksListing, "listing", src_calldata(1));
    punks_action(kPunksCancelListing, "cancel_listing", src_calldata(1));
    punks_action(kPunksBuy, "buy", {{"source", "txn_value"}});
    punks_action(kPunksPlaceBid, "place_bid", {{"source", "txn_value"}});
    punks_action(kPunksAcceptBid, "accept_bid", src_calldata(1));
    punks_action(kPunksCancelBid, "cancel_bid", src_calldata(1));

    nlohmann::json wyvern_actions = nlohmann::json::array();
    auto wyvern_action = [&](const Selector& sel, const char* kind, nlohmann::json price) {
        wyvern_actions.push_back({{"selector", selector_hex(sel)},
                                  {"kind", kind},
                                  {"nft_contract", src_calldata(0)},
                                  {"token_id", src_calldata(1)},
                                  {"price", std::move(price)},
                                  {"user", {{"source", "txn_sender"}}}});
    };
    wyvern_action(kWyvernBuy, "buy", {{"source", "txn_value"}});
    wyvern_action(kWyvernCancelListing, "cancel_listing", src_calldata(2));
    wyvern_action(kWyvernAcceptBid, "accept_bid", src_calldata(2));
    wyvern_action(kWyvernCancelBid, "cancel_bid", src_calldata(2));
    wyvern_action(kWyvernPlaceBid, "place_bid", src_calldata(2));

    nlohmann::json synth_actions = nlohmann::json::array();
    synth_actions.push_back({{"selector", selector_hex(kSynthBuy)},
                             {"kind", "buy"},
                             {"nft_contract", {{"source", "log_topic"}, {"log", 0}, {"topic", 1}}},
                             {"token_id", {{"source", "log_topic"}, {"log", 0}, {"topic", 2}}},
                             {"price", {{"source", "log_data_word"}, {"log", 0}, {"word", 0}}},
                             {"user", {{"source", "txn_sender"}}}});
    synth_actions.push_back({{"selector", selector_hex(kSynthListing)},
                             {"kind", "listing"},
                             {"nft_contract", src_calldata(0)},
                             {"token_id", src_calldata(1)},
                             {"price", src_calldata(2)},
                             {"user", {{"source", "txn_sender"}}}});

    nlohmann::json root = nlohmann::json::array();
    root.push_back({{"name", "punksmart"},
                    {"contracts", {kMktPunks.hex()}},
                    {"listing_on_chain", true},
                    {"bid_agnostic_accept", true},
                    {"actions", punks_actions}});
    root.push_back({{"name", "wyvermart"},
                    {"contracts", {kMktWyvern.hex()}},
                    {"listing_on_chain", false},
                    {"bid_agnostic_accept", false},
                    {"actions", wyvern_actions}});
    root.push_back({{"name", "synthmart"},
                    {"contracts", {kMktSynth.hex()}},
                    {"listing_on_chain", false},
                    {"bid_agnostic_accept", false},
                    {"actions", synth_actions}});
    return root.dump(2);
}

inline Registry demo_registry() {
    return registry_from_json(nlohmann::json::parse(demo_registry_json()));
}

// Marketplace txn builders -------------------------------------------------

inline Txn punks_txn(uint64_t hash_seed, const Selector& sel, const Address& user,
                     const TokenId& token, const Wei& price, const Wei& gas_price, bool success,
                     uint64_t gas_used = 90'000) {
    const bool value_priced = sel == kPunksBuy || sel == kPunksPlaceBid;
    TxnBuilder b(hash_seed);
    b.from(user).to(kMktPunks).gas(gas_price, gas_used);
    if (value_priced) {
        b.value(price).input(calldata(sel, {word_from_uint(token)}));
    } else {
        b.input(calldata(sel, {word_from_uint(token), word_from_uint(price)}));
    }
    if (!success) b.reverted();
    return b.build();
}

inline Txn wyvern_txn(uint64_t hash_seed, const Selector& sel, const Address& user,
                      const Address& nft, const TokenId& token, const Wei& price,
                      const Wei& gas_price, bool success, uint64_t gas_used = 120'000) {
    TxnBuilder b(hash_seed);
    b.from(user).to(kMktWyvern).gas(gas_price, gas_used);
    if (sel == kWyvernBuy) {
        b.value(price).input(calldata(sel, {word_from_address(nft), word_from_uint(token)}));
    } else {
        b.input(calldata(
            sel, {word_from_address(nft), word_from_uint(token), word_from_uint(price)}));
    }
    if (!success) b.reverted();
    return b.build();
}

inline Txn synth_buy_txn(uint64_t hash_seed, const Address& buyer, const Address& seller,
                         const Address& nft, const TokenId& token, const Wei& price,
                         const Wei& gas_price, bool success, uint64_t gas_used = 150'000) {
    // Log-based recipes only decode successful txns; a reverted synth buy
    // keeps no Sale log and scans report it as a recipe failure.
    const Hash32 pw = word_from_uint(price);
    TxnBuilder b(hash_seed);
    b.from(buyer).to(kMktSynth).gas(gas_price, gas_used).value(price).input(calldata(kSynthBuy));
    if (success) {
        b.log(kMktSynth, {kSynthSaleTopic, word_from_address(nft), word_from_uint(token)},
              Bytes(pw.bytes.begin(), pw.bytes.end()))
            .call(kMktSynth, seller, price)
            .transfer721(nft, seller, buyer, token);
    } else {
        b.reverted();
    }
    return b.build();
}

}  // namespace nftlens::fixtures
