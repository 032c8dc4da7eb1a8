#pragma once

#include <algorithm>
#include <set>
#include <span>

#include "tokens.hpp"
#include "trade.hpp"

namespace nftlens {

struct Asset {
    enum class Kind : uint8_t { kNative, kErc20, kNft };

    Kind kind = Kind::kNative;
    Address contract;  // erc20 / nft
    TokenId token_id;  // nft

    bool operator==(const Asset&) const = default;
    bool is_money() const { return kind != Kind::kNft; }

    std::string key() const {
        switch (kind) {
            case Kind::kNative: return "native";
            case Kind::kErc20: return "erc20:" + contract.hex();
            case Kind::kNft: return "nft:" + contract.hex() + "/" + token_id.str();
        }
        return "native";
    }

    static Asset native() { return {}; }
    static Asset erc20(const Address& c) { return {Kind::kErc20, c, 0}; }
    static Asset nft(const Address& c, TokenId id) { return {Kind::kNft, c, std::move(id)}; }
};

struct PaymentEdge {
    Address payer;
    Address payee;
    Wei amount;  // > 0 for native/erc20, 1 for nft
    Asset asset;
};

/// Directed value-flow multigraph over the accounts one external transaction
/// touches; edge order is occurrence order within the txn.
struct PaymentGraph {
    Hash32 txn_hash;
    std::vector<PaymentEdge> edges;
};

/// Native edges come from value-carrying calls (the external txn's own value
/// first, then plain internal calls); erc20/nft edges from Transfer logs,
/// split by the token set's classification.
inline PaymentGraph build_payment_graph(const Txn& t, const TokenContractSet& tokens) {
    PaymentGraph g;
    g.txn_hash = t.hash;
    if (t.value > 0 && t.receiver)
        g.edges.push_back({t.sender, *t.receiver, t.value, Asset::native()});
    for (const InternalCall& c : t.internal_calls) {
        if (c.kind == CallKind::kCall && c.value > 0)
            g.edges.push_back({c.caller, c.callee, c.value, Asset::native()});
    }
    for (const EventLog& l : t.logs) {
        if (l.topics.empty() || l.topics[0] != kTransferTopic) continue;
        if (l.topics.size() == 4 && tokens.is_erc721(l.emitter)) {
            g.edges.push_back({address_from_word(l.topics[1]), address_from_word(l.topics[2]), 1,
                               Asset::nft(l.emitter, uint_from_word(l.topics[3]))});
        } else if (l.topics.size() == 3 && !tokens.is_nft(l.emitter)) {
            if (l.data.size() < 32) continue;
            Wei amount = uint_from_be(std::span(l.data).subspan(0, 32));
            if (amount == 0) continue;
            g.edges.push_back({address_from_word(l.topics[1]), address_from_word(l.topics[2]),
                               std::move(amount), Asset::erc20(l.emitter)});
        }
    }
    return g;
}

struct SaleRecord {
    NftRef nft;
    Address seller;
    Address buyer;
    Hash32 sale_txn;
    Wei pay_in;            // buyer's money reaching the seller (taint-tracked)
    Wei pay_out;           // deductions paid out of the seller's earnings
    SignedWei net_earning;  // pay_in - pay_out
};

namespace detail {

// Depth-first taint from the buyer over money edges, exploring out-edges in
// occurrence order. A node-visited set terminates cycles.
inline void taint_earnings(const PaymentGraph& g, const Address& buyer, const Address& seller,
                           Wei& pay_in, Wei& pay_out) {
    std::map<Address, std::vector<const PaymentEdge*>> out_edges;
    for (const PaymentEdge& e : g.edges)
        if (e.asset.is_money()) out_edges[e.payer].push_back(&e);

    pay_in = 0;
    pay_out = 0;
    std::set<Address> visited;
    std::vector<Address> stack{buyer};
    visited.insert(buyer);
    while (!stack.empty()) {
        const Address node = stack.back();
        stack.pop_back();
        auto it = out_edges.find(node);
        if (it == out_edges.end()) continue;
        for (const PaymentEdge* e : it->second) {
            if (e->payee == seller) pay_in += e->amount;
            if (e->payer == seller) pay_out += e->amount;
            if (visited.insert(e->payee).second) stack.push_back(e->payee);
        }
    }
}

}  // namespace detail

/// §4.1 Step II: taint-tracks the buyer's money to the seller. When nothing
/// tainted reaches the seller (unconditional transfer), buyer and seller are
/// treated as the same entity and the pass is re-applied with the buyer in
/// the seller role.
inline SaleRecord compute_sale_earnings(const Txn& sale_txn, const NftRef& nft,
                                        const Address& seller, const Address& buyer,
                                        const TokenContractSet& tokens) {
    const PaymentGraph g = build_payment_graph(sale_txn, tokens);
    SaleRecord rec;
    rec.nft = nft;
    rec.seller = seller;
    rec.buyer = buyer;
    rec.sale_txn = sale_txn.hash;
    detail::taint_earnings(g, buyer, seller, rec.pay_in, rec.pay_out);
    if (rec.pay_in == 0) detail::taint_earnings(g, buyer, buyer, rec.pay_in, rec.pay_out);
    rec.net_earning = SignedWei(rec.pay_in) - SignedWei(rec.pay_out);
    return rec;
}

struct SaleEvent {
    uint64_t block_number = 0;
    uint32_t txn_index = 0;
    Hash32 txn_hash;
    Address buyer;
    const Block* block = nullptr;
    const Txn* txn = nullptr;
};

/// §4.1 Step I: the first external txn after (after_block, after_index) whose
/// logs include Transfer(seller, *, token_id) emitted by the NFT contract.
inline std::optional<SaleEvent> detect_sale(const NftRef& nft, const Address& seller,
                                            uint64_t after_block, uint32_t after_index,
                                            std::span<const Block> blocks) {
    for (const Block& b : blocks) {
        if (b.number < after_block) continue;
        for (const Txn& t : b.txns) {
            if (b.number == after_block && t.index <= after_index) continue;
            for (const EventLog& l : t.logs) {
                if (l.emitter != nft.contract || l.topics.size() != 4 ||
                    l.topics[0] != kTransferTopic)
                    continue;
                if (address_from_word(l.topics[1]) != seller) continue;
                if (uint_from_word(l.topics[3]) != nft.token_id) continue;
                return SaleEvent{b.number, t.index, t.hash, address_from_word(l.topics[2]), &b, &t};
            }
        }
    }
    return std::nullopt;
}

/// Hypothetical gross profit of selling at the model price now.
inline SignedWei speculative_profit(const Wei& buy_price, const Wei& current_price) {
    return SignedWei(current_price) - SignedWei(buy_price);
}

}  // namespace nftlens
