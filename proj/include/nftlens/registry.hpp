#pragma once

#include <istream>
#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "chain.hpp"

namespace nftlens {

enum class TradeActionKind : uint8_t {
    kListing,
    kCancelListing,
    kBuy,
    kPlaceBid,
    kAcceptBid,
    kCancelBid,
};

inline std::string_view trade_kind_name(TradeActionKind k) {
    switch (k) {
        case TradeActionKind::kListing: return "listing";
        case TradeActionKind::kCancelListing: return "cancel_listing";
        case TradeActionKind::kBuy: return "buy";
        case TradeActionKind::kPlaceBid: return "place_bid";
        case TradeActionKind::kAcceptBid: return "accept_bid";
        case TradeActionKind::kCancelBid: return "cancel_bid";
    }
    return "buy";
}

inline std::optional<TradeActionKind> trade_kind_from_name(std::string_view s) {
    if (s == "listing") return TradeActionKind::kListing;
    if (s == "cancel_listing") return TradeActionKind::kCancelListing;
    if (s == "buy") return TradeActionKind::kBuy;
    if (s == "place_bid") return TradeActionKind::kPlaceBid;
    if (s == "accept_bid") return TradeActionKind::kAcceptBid;
    if (s == "cancel_bid") return TradeActionKind::kCancelBid;
    return std::nullopt;
}

/// Where one decoded trade field comes from. Declarative so new marketplaces
/// can be added without code changes.
struct FieldSource {
    enum class Kind : uint8_t {
        kCalldataWord,  // 32-byte word `index` of calldata past the selector
        kTxnValue,
        kTxnSender,
        kLogTopic,     // log `index`, topic `word`
        kLogDataWord,  // log `index`, data word `word`
        kConst,        // fixed address/number, e.g. single-collection markets
    };

    Kind kind = Kind::kTxnValue;
    uint32_t index = 0;
    uint32_t word = 0;
    Hash32 const_word{};  // kConst payload, ABI-word encoded
};

struct ActionRecipe {
    TradeActionKind kind = TradeActionKind::kBuy;
    FieldSource nft_contract;
    FieldSource token_id;
    FieldSource price;
    FieldSource user;
};

struct MarketplaceDescriptor {
    std::string name;
    std::set<Address> contracts;
    std::map<Selector, ActionRecipe> actions;  // selectors unique per descriptor
    bool listing_on_chain = false;
    // Accept-bid calldata carries no reference to a specific bid; required for
    // the place_bid/accept_bid frontrun pattern to be meaningful.
    bool bid_agnostic_accept = false;
};

struct RegistryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Registry {
  public:
    Registry() = default;
    explicit Registry(std::vector<MarketplaceDescriptor> descriptors)
        : descriptors_(std::move(descriptors)) {
        for (const auto& d : descriptors_)
            for (const Address& a : d.contracts) by_contract_.emplace(a, &d);
    }

    const MarketplaceDescriptor* find(const Address& contract) const {
        auto it = by_contract_.find(contract);
        return it == by_contract_.end() ? nullptr : it->second;
    }

    const std::vector<MarketplaceDescriptor>& descriptors() const { return descriptors_; }

  private:
    std::vector<MarketplaceDescriptor> descriptors_;
    std::map<Address, const MarketplaceDescriptor*> by_contract_;
};

namespace detail {

inline FieldSource field_source_from_json(const nlohmann::json& j, const std::string& ctx) {
    if (!j.is_object() || !j.contains("source"))
        throw RegistryError(ctx + ": field recipe needs a 'source'");
    FieldSource f;
    const std::string source = j.at("source").get<std::string>();
    auto idx = [&](const char* name) -> uint32_t {
        if (!j.contains(name)) throw RegistryError(ctx + ": source '" + source + "' needs '" + name + "'");
        return j.at(name).get<uint32_t>();
    };
    if (source == "calldata_word") {
        f.kind = FieldSource::Kind::kCalldataWord;
        f.index = idx("index");
    } else if (source == "txn_value") {
        f.kind = FieldSource::Kind::kTxnValue;
    } else if (source == "txn_sender") {
        f.kind = FieldSource::Kind::kTxnSender;
    } else if (source == "log_topic") {
        f.kind = FieldSource::Kind::kLogTopic;
        f.index = idx("log");
        f.word = idx("topic");
    } else if (source == "log_data_word") {
        f.kind = FieldSource::Kind::kLogDataWord;
        f.index = idx("log");
        f.word = idx("word");
    } else if (source == "const") {
        f.kind = FieldSource::Kind::kConst;
        if (!j.contains("value")) throw RegistryError(ctx + ": const source needs 'value'");
        const std::string v = j.at("value").get<std::string>();
        if (auto addr = Address::from_hex(v)) {
            f.const_word = word_from_address(*addr);
        } else if (auto num = bigint_from_dec(v)) {
            f.const_word = word_from_uint(*num);
        } else {
            throw RegistryError(ctx + ": const value is neither an address nor a decimal");
        }
    } else {
        throw RegistryError(ctx + ": unknown source '" + source + "'");
    }
    return f;
}

}  // namespace detail

inline Registry registry_from_json(const nlohmann::json& root) {
    if (!root.is_array()) throw RegistryError("registry root must be a JSON array");
    std::vector<MarketplaceDescriptor> out;
    for (const auto& dj : root) {
        MarketplaceDescriptor d;
        if (!dj.contains("name")) throw RegistryError("descriptor without a name");
        d.name = dj.at("name").get<std::string>();
        for (const auto& c : dj.at("contracts")) {
            auto a = Address::from_hex(c.get<std::string>());
            if (!a) throw RegistryError(d.name + ": bad contract address");
            d.contracts.insert(*a);
        }
        d.listing_on_chain = dj.value("listing_on_chain", false);
        d.bid_agnostic_accept = dj.value("bid_agnostic_accept", false);
        for (const auto& aj : dj.at("actions")) {
            auto sel = selector_from_hex(aj.at("selector").get<std::string>());
            if (!sel) throw RegistryError(d.name + ": bad selector");
            auto kind = trade_kind_from_name(aj.at("kind").get<std::string>());
            if (!kind) throw RegistryError(d.name + ": bad action kind");
            ActionRecipe r;
            r.kind = *kind;
            const std::string ctx = d.name + "/" + selector_hex(*sel);
            r.nft_contract = detail::field_source_from_json(aj.at("nft_contract"), ctx);
            r.token_id = detail::field_source_from_json(aj.at("token_id"), ctx);
            r.price = detail::field_source_from_json(aj.at("price"), ctx);
            r.user = detail::field_source_from_json(aj.at("user"), ctx);
            if (!d.actions.emplace(*sel, std::move(r)).second)
                throw RegistryError(d.name + ": duplicate selector " + selector_hex(*sel));
        }
        out.push_back(std::move(d));
    }
    return Registry(std::move(out));
}

inline Registry load_registry(std::istream& in) {
    nlohmann::json root = nlohmann::json::parse(in, nullptr, false);
    if (root.is_discarded()) throw RegistryError("registry file is not valid JSON");
    return registry_from_json(root);
}

}  // namespace nftlens
