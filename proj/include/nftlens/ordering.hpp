#pragma once

#include <cassert>
#include <istream>

#include "payment_graph.hpp"

namespace nftlens {

enum class OrderingPattern : uint8_t {
    kBuyBuy,
    kBuyCancel,
    kAcceptBidCancelBid,
    kPlaceBidAcceptBid,
    kListingBuyBackrun,
    kCancelBuyLossMin,
};

inline std::string_view pattern_name(OrderingPattern p) {
    switch (p) {
        case OrderingPattern::kBuyBuy: return "buy_buy";
        case OrderingPattern::kBuyCancel: return "buy_cancel";
        case OrderingPattern::kAcceptBidCancelBid: return "acceptbid_cancelbid";
        case OrderingPattern::kPlaceBidAcceptBid: return "placebid_acceptbid";
        case OrderingPattern::kListingBuyBackrun: return "listing_buy_backrun";
        case OrderingPattern::kCancelBuyLossMin: return "cancel_buy_lossmin";
    }
    return "buy_buy";
}

inline std::optional<OrderingPattern> pattern_from_name(std::string_view s) {
    if (s == "buy_buy") return OrderingPattern::kBuyBuy;
    if (s == "buy_cancel") return OrderingPattern::kBuyCancel;
    if (s == "acceptbid_cancelbid") return OrderingPattern::kAcceptBidCancelBid;
    if (s == "placebid_acceptbid") return OrderingPattern::kPlaceBidAcceptBid;
    if (s == "listing_buy_backrun") return OrderingPattern::kListingBuyBackrun;
    if (s == "cancel_buy_lossmin") return OrderingPattern::kCancelBuyLossMin;
    return std::nullopt;
}

struct OrderingFinding {
    OrderingPattern pattern = OrderingPattern::kBuyBuy;
    TradeAction attacker;
    TradeAction victim;
    NftRef nft;
    std::string marketplace;
    SignedWei gas_delta;  // attacker gas price minus victim gas price
    uint64_t block_number = 0;
    std::optional<SignedWei> bid_delta;  // placebid_acceptbid only
};

/// Marketplace capabilities the detectors depend on, lifted from the registry.
struct DetectorContext {
    std::set<std::string> onchain_listing_markets;
    std::set<std::string> bid_agnostic_markets;

    static DetectorContext from_registry(const Registry& registry) {
        DetectorContext ctx;
        for (const auto& d : registry.descriptors()) {
            if (d.listing_on_chain) ctx.onchain_listing_markets.insert(d.name);
            if (d.bid_agnostic_accept) ctx.bid_agnostic_markets.insert(d.name);
        }
        return ctx;
    }
};

namespace detail {

struct PatternKinds {
    TradeActionKind attacker;
    TradeActionKind victim;
    bool victim_fails;  // Rule 4; placebid_acceptbid needs both successful
};

inline PatternKinds frontrun_kinds(OrderingPattern p) {
    switch (p) {
        case OrderingPattern::kBuyBuy:
            return {TradeActionKind::kBuy, TradeActionKind::kBuy, true};
        case OrderingPattern::kBuyCancel:
            return {TradeActionKind::kBuy, TradeActionKind::kCancelListing, true};
        case OrderingPattern::kAcceptBidCancelBid:
            return {TradeActionKind::kAcceptBid, TradeActionKind::kCancelBid, true};
        case OrderingPattern::kPlaceBidAcceptBid:
            return {TradeActionKind::kPlaceBid, TradeActionKind::kAcceptBid, false};
        case OrderingPattern::kCancelBuyLossMin:
            return {TradeActionKind::kCancelListing, TradeActionKind::kBuy, true};
        default:
            assert(false && "not a frontrun-shaped pattern");
            return {TradeActionKind::kBuy, TradeActionKind::kBuy, true};
    }
}

inline OrderingFinding make_finding(OrderingPattern p, const TradeAction& attacker,
                                    const TradeAction& victim) {
    // Rules 1-2 must hold on every emission.
    assert(attacker.nft == victim.nft);
    assert(attacker.marketplace == victim.marketplace);
    assert(attacker.user != victim.user);
    assert(attacker.block_number == victim.block_number);
    OrderingFinding f;
    f.pattern = p;
    f.attacker = attacker;
    f.victim = victim;
    f.nft = attacker.nft;
    f.marketplace = attacker.marketplace;
    f.gas_delta = SignedWei(attacker.gas_price) - SignedWei(victim.gas_price);
    f.block_number = attacker.block_number;
    if (p == OrderingPattern::kPlaceBidAcceptBid)
        f.bid_delta = SignedWei(attacker.price) - SignedWei(victim.price);
    return f;
}

// Walks the stream one block at a time; `emit` sees every ordered
// same-block action pair grouped by (nft, marketplace).
template <typename Emit>
void for_each_block_pair(std::span<const TradeAction> actions, Emit&& emit) {
    size_t begin = 0;
    while (begin < actions.size()) {
        size_t end = begin;
        while (end < actions.size() &&
               actions[end].block_number == actions[begin].block_number)
            ++end;
        std::map<std::pair<NftRef, std::string>, std::vector<const TradeAction*>> groups;
        for (size_t i = begin; i < end; ++i)
            groups[{actions[i].nft, actions[i].marketplace}].push_back(&actions[i]);
        for (const auto& [key, group] : groups) {
            for (size_t i = 0; i < group.size(); ++i)
                for (size_t j = i + 1; j < group.size(); ++j) emit(*group[i], *group[j]);
        }
        begin = end;
    }
}

}  // namespace detail

/// §4.2 Rules 1-4 over a (block, index)-ordered action stream. The earlier,
/// higher-gas-priced action is the attacker. placebid_acceptbid is only
/// meaningful on bid-agnostic marketplaces and requires both txns to succeed
/// and the attacker to outbid the victim.
inline std::vector<OrderingFinding> detect_frontruns(std::span<const TradeAction> actions,
                                                     OrderingPattern pattern,
                                                     const DetectorContext& ctx = {}) {
    const auto kinds = detail::frontrun_kinds(pattern);
    std::vector<OrderingFinding> out;
    detail::for_each_block_pair(actions, [&](const TradeAction& first, const TradeAction& second) {
        if (first.kind != kinds.attacker || second.kind != kinds.victim) return;
        if (first.user == second.user) return;
        if (!(first.gas_price > second.gas_price)) return;
        if (first.status != TxnStatus::kSuccess) return;
        if (kinds.victim_fails) {
            if (second.status != TxnStatus::kReverted) return;
        } else {
            if (second.status != TxnStatus::kSuccess) return;
        }
        if (pattern == OrderingPattern::kPlaceBidAcceptBid) {
            if (!ctx.bid_agnostic_markets.contains(first.marketplace)) return;
            if (first.price < second.price) return;
        }
        out.push_back(detail::make_finding(pattern, first, second));
    });
    return out;
}

/// §4.3 Listing-Buy: the buy lands right after the listing with a lower gas
/// price, both succeed. Only on-chain-listing marketplaces participate.
inline std::vector<OrderingFinding> detect_backruns(std::span<const TradeAction> actions,
                                                    const DetectorContext& ctx) {
    std::vector<OrderingFinding> out;
    detail::for_each_block_pair(actions, [&](const TradeAction& first, const TradeAction& second) {
        if (first.kind != TradeActionKind::kListing || second.kind != TradeActionKind::kBuy) return;
        if (!ctx.onchain_listing_markets.contains(first.marketplace)) return;
        if (first.user == second.user) return;
        if (!(second.gas_price < first.gas_price)) return;
        if (first.status != TxnStatus::kSuccess || second.status != TxnStatus::kSuccess) return;
        out.push_back(detail::make_finding(OrderingPattern::kListingBuyBackrun, second, first));
    });
    return out;
}

/// §6 Cancel-Buy: a seller frontruns a pending buy of their own listing with
/// a cancel; the buy reverts.
inline std::vector<OrderingFinding> detect_loss_minimization(
    std::span<const TradeAction> actions) {
    return detect_frontruns(actions, OrderingPattern::kCancelBuyLossMin);
}

enum class Channel : uint8_t { kMempool, kFlashbots, kPrivateMining };

inline std::string_view channel_name(Channel c) {
    switch (c) {
        case Channel::kMempool: return "mempool";
        case Channel::kFlashbots: return "flashbots";
        case Channel::kPrivateMining: return "private_mining";
    }
    return "mempool";
}

struct MinerClassification {
    Channel channel = Channel::kMempool;
    Wei miner_payment;  // > 0 iff private_mining
};

/// One 0x-prefixed txn hash per line; blank lines ignored.
inline std::set<Hash32> load_flashbots_list(std::istream& in) {
    std::set<Hash32> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (auto h = Hash32::from_hex(line)) out.insert(*h);
    }
    return out;
}

/// Exactly one channel per finding: relayed via flashbots, a direct in-txn
/// payment to the block's miner (private mining), or the public mempool.
inline MinerClassification classify_channel(const OrderingFinding& f,
                                            const std::set<Hash32>& flashbots_list,
                                            const Block& block) {
    if (flashbots_list.contains(f.attacker.txn_hash)) return {Channel::kFlashbots, 0};
    const Txn* attacker = nullptr;
    for (const Txn& t : block.txns)
        if (t.hash == f.attacker.txn_hash) attacker = &t;
    if (attacker) {
        Wei paid = 0;
        if (attacker->value > 0 && attacker->receiver && *attacker->receiver == block.miner)
            paid += attacker->value;
        for (const InternalCall& c : attacker->internal_calls)
            if (c.kind == CallKind::kCall && c.value > 0 && c.callee == block.miner)
                paid += c.value;
        if (paid > 0) return {Channel::kPrivateMining, paid};
    }
    return {Channel::kMempool, 0};
}

struct GasWarStat {
    NftRef nft;
    uint64_t block_number = 0;
    uint32_t contender_count = 1;
    Wei gc_high;     // winner gas price x winner gas used
    Wei gc_low_est;  // min contender gas price x winner gas used
    Hash32 winner_txn;
};

/// §4.2 gas-war metric per (nft, block) instance. Contenders are the winner
/// plus the victims competing with the same action kind (a failed buy losing
/// to a winning buy is a losing frontrunner; a canceled listing is not).
/// The winner's gas_used stands in for the losers' (a successful txn burns
/// the same gas regardless of sender).
inline std::vector<GasWarStat> gas_war_stats(std::span<const OrderingFinding> findings,
                                             DiagnosticSink* diags = nullptr) {
    std::map<std::pair<NftRef, uint64_t>, std::vector<const OrderingFinding*>> groups;
    for (const OrderingFinding& f : findings)
        groups[{f.nft, f.block_number}].push_back(&f);

    std::vector<GasWarStat> out;
    for (const auto& [key, group] : groups) {
        std::set<Hash32> winners;
        for (const auto* f : group)
            if (f->attacker.status == TxnStatus::kSuccess) winners.insert(f->attacker.txn_hash);
        if (winners.size() != 1) {
            report(diags, "no_winner",
                   key.first.contract.hex() + "/" + key.first.token_id.str() + " block " +
                       std::to_string(key.second) + ": " + std::to_string(winners.size()) +
                       " successful attackers, group skipped");
            continue;
        }
        const TradeAction* winner = nullptr;
        std::map<Hash32, Wei> contender_gp;
        for (const auto* f : group) {
            if (f->attacker.txn_hash == *winners.begin()) winner = &f->attacker;
            contender_gp[f->attacker.txn_hash] = f->attacker.gas_price;
            if (f->victim.kind == f->attacker.kind)
                contender_gp[f->victim.txn_hash] = f->victim.gas_price;
        }
        Wei min_gp = winner->gas_price;
        for (const auto& [hash, gp] : contender_gp) min_gp = std::min(min_gp, gp);
        GasWarStat s;
        s.nft = key.first;
        s.block_number = key.second;
        s.contender_count = static_cast<uint32_t>(contender_gp.size());
        s.gc_high = winner->gas_price * winner->gas_used;
        s.gc_low_est = min_gp * winner->gas_used;
        s.winner_txn = winner->txn_hash;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace nftlens
