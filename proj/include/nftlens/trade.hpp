#pragma once

#include <span>

#include "registry.hpp"

namespace nftlens {

struct NftRef {
    Address contract;
    TokenId token_id;

    bool operator==(const NftRef&) const = default;
    bool operator<(const NftRef& o) const {
        if (contract != o.contract) return contract < o.contract;
        return token_id < o.token_id;
    }
};

/// One decoded marketplace action; fields mirror the source txn.
struct TradeAction {
    TradeActionKind kind = TradeActionKind::kBuy;
    Address user;
    std::string marketplace;
    NftRef nft;
    Wei price;
    Hash32 txn_hash;
    uint64_t block_number = 0;
    uint32_t txn_index = 0;
    TxnStatus status = TxnStatus::kSuccess;
    Wei gas_price;
    uint64_t gas_used = 0;
    uint64_t timestamp = 0;
};

/// Calldata shorter than the recipe expects, or a log position that does not
/// exist. The txn is skipped, not fatal to a scan.
struct RecipeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline Hash32 resolve_word(const FieldSource& f, const Txn& t) {
    switch (f.kind) {
        case FieldSource::Kind::kCalldataWord: {
            const size_t off = 4 + size_t{f.index} * 32;
            if (t.input.size() < off + 32)
                throw RecipeError("calldata word " + std::to_string(f.index) +
                                  " out of range (input is " + std::to_string(t.input.size()) +
                                  " bytes)");
            Hash32 w;
            std::copy(t.input.begin() + off, t.input.begin() + off + 32, w.bytes.begin());
            return w;
        }
        case FieldSource::Kind::kTxnValue:
            return word_from_uint(t.value);
        case FieldSource::Kind::kTxnSender:
            return word_from_address(t.sender);
        case FieldSource::Kind::kLogTopic: {
            if (t.logs.size() <= f.index)
                throw RecipeError("log " + std::to_string(f.index) + " out of range");
            const auto& topics = t.logs[f.index].topics;
            if (topics.size() <= f.word)
                throw RecipeError("topic " + std::to_string(f.word) + " out of range");
            return topics[f.word];
        }
        case FieldSource::Kind::kLogDataWord: {
            if (t.logs.size() <= f.index)
                throw RecipeError("log " + std::to_string(f.index) + " out of range");
            const auto& data = t.logs[f.index].data;
            const size_t off = size_t{f.word} * 32;
            if (data.size() < off + 32)
                throw RecipeError("log data word " + std::to_string(f.word) + " out of range");
            Hash32 w;
            std::copy(data.begin() + off, data.begin() + off + 32, w.bytes.begin());
            return w;
        }
        case FieldSource::Kind::kConst:
            return f.const_word;
    }
    throw RecipeError("unhandled field source");
}

}  // namespace detail

/// Step-II action recovery: receiver must be a registered marketplace
/// contract and the leading four bytes of calldata a known selector.
/// Returns nullopt for anything else; throws RecipeError when the recipe
/// cannot be applied to this txn's calldata/logs.
inline std::optional<TradeAction> decode_trade_action(const Block& block, const Txn& t,
                                                      const Registry& registry) {
    if (!t.receiver) return std::nullopt;
    const MarketplaceDescriptor* mkt = registry.find(*t.receiver);
    if (!mkt) return std::nullopt;
    if (t.input.size() < 4)
        throw RecipeError("calldata to marketplace '" + mkt->name + "' shorter than a selector");
    const Selector sel = *txn_selector(t);
    auto it = mkt->actions.find(sel);
    if (it == mkt->actions.end()) return std::nullopt;
    const ActionRecipe& recipe = it->second;

    TradeAction a;
    a.kind = recipe.kind;
    a.marketplace = mkt->name;
    a.user = address_from_word(detail::resolve_word(recipe.user, t));
    a.nft.contract = address_from_word(detail::resolve_word(recipe.nft_contract, t));
    a.nft.token_id = uint_from_word(detail::resolve_word(recipe.token_id, t));
    a.price = uint_from_word(detail::resolve_word(recipe.price, t));
    a.txn_hash = t.hash;
    a.block_number = block.number;
    a.txn_index = t.index;
    a.status = t.status;
    a.gas_price = t.gas_price;
    a.gas_used = t.gas_used;
    a.timestamp = block.timestamp;
    return a;
}

/// Scans blocks in order and emits all decodable actions in
/// (block_number, txn_index) order. Recipe failures are reported and skipped.
inline std::vector<TradeAction> scan_trade_actions(std::span<const Block> blocks,
                                                   const Registry& registry,
                                                   DiagnosticSink* diags = nullptr) {
    std::vector<TradeAction> out;
    for (const Block& b : blocks) {
        for (const Txn& t : b.txns) {
            try {
                if (auto a = decode_trade_action(b, t, registry)) out.push_back(std::move(*a));
            } catch (const RecipeError& e) {
                report(diags, "recipe_failure", t.hash.hex() + ": " + e.what());
            }
        }
    }
    return out;
}

}  // namespace nftlens
