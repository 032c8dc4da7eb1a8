#pragma once

#include "history.hpp"
#include "payment_graph.hpp"

namespace nftlens {

struct AssetFlow {
    Wei in;
    Wei out;
};

struct ProfitFinding {
    enum class KindHint : uint8_t { kArbitrage, kRewardCollection, kUnknown };

    Hash32 txn_hash;
    std::set<Address> clique;                // ℳ, the trader-controlled addresses
    std::map<std::string, AssetFlow> flows;  // per-asset totals across the boundary
    SignedWei net_native_profit;             // native + wrapped-native, gas deducted
    KindHint kind_hint = KindHint::kUnknown;
    std::vector<PaymentEdge> evidence;       // boundary edges
};

inline std::string_view kind_hint_name(ProfitFinding::KindHint k) {
    switch (k) {
        case ProfitFinding::KindHint::kArbitrage: return "arbitrage";
        case ProfitFinding::KindHint::kRewardCollection: return "reward_collection";
        case ProfitFinding::KindHint::kUnknown: return "unknown";
    }
    return "unknown";
}

struct InstantProfitParams {
    size_t th_e = 200;                    // unique-sender cutoff for "is an exchange"
    std::set<Address> exchange_allowlist;  // never excluded by th_e
    std::set<Address> native_equivalents;  // 1:1 wrapped-native erc20s (WETH)
    bool charge_gas = true;
};

/// §5 Steps I-V. Flags txns that buy an NFT and dispose of it atomically with
/// a positive net inflow to the trader's address clique. Reward-collection
/// trades keep an NFT instead of (or on top of) cash.
inline std::optional<ProfitFinding> detect_instant_profit(const Txn& t,
                                                          const TokenContractSet& tokens,
                                                          const HistoryIndex& history,
                                                          const InstantProfitParams& params) {
    const PaymentGraph g = build_payment_graph(t, tokens);

    // Step I: some NFT must arrive at a buyer and leave it again within t.
    std::optional<Address> buyer;
    for (size_t i = 0; i < g.edges.size() && !buyer; ++i) {
        const PaymentEdge& in = g.edges[i];
        if (in.asset.kind != Asset::Kind::kNft || in.payee == in.payer) continue;
        for (size_t j = i + 1; j < g.edges.size(); ++j) {
            const PaymentEdge& out = g.edges[j];
            if (out.asset == in.asset && out.payer == in.payee && out.payee != in.payee) {
                buyer = in.payee;
                break;
            }
        }
    }
    if (!buyer) return std::nullopt;

    // Step II: seed the clique with sender, buyer, receiver.
    std::set<Address> clique{t.sender, *buyer};
    if (t.receiver) clique.insert(*t.receiver);

    // Step III: one expansion round over prior counterparties, skipping
    // exchange-like addresses (too many unique senders).
    std::set<Address> expanded = clique;
    for (const Address& m : clique) {
        if (const auto* cps = history.counterparties(m)) {
            for (const Address& a : *cps) {
                if (history.unique_senders(a) > params.th_e &&
                    !params.exchange_allowlist.contains(a))
                    continue;
                expanded.insert(a);
            }
        }
    }

    // Step IV: restrict to addresses this txn actually touches.
    std::set<Address> touched{t.sender};
    if (t.receiver) touched.insert(*t.receiver);
    for (const InternalCall& c : t.internal_calls) {
        touched.insert(c.caller);
        touched.insert(c.callee);
    }
    for (const PaymentEdge& e : g.edges) {
        touched.insert(e.payer);
        touched.insert(e.payee);
    }
    std::set<Address> members;
    std::ranges::set_intersection(expanded, touched, std::inserter(members, members.end()));

    // Step V: net per-asset flows across the clique boundary; intra-clique
    // edges are the trader shuffling their own funds.
    ProfitFinding f;
    f.txn_hash = t.hash;
    f.clique = members;
    SignedWei net_native = 0;
    std::map<std::pair<Address, TokenId>, int64_t> nft_net;
    for (const PaymentEdge& e : g.edges) {
        const bool payer_in = members.contains(e.payer);
        const bool payee_in = members.contains(e.payee);
        if (payer_in == payee_in) continue;
        f.evidence.push_back(e);
        auto& flow = f.flows[e.asset.key()];
        if (payee_in)
            flow.in += e.amount;
        else
            flow.out += e.amount;
        const bool native_like =
            e.asset.kind == Asset::Kind::kNative ||
            (e.asset.kind == Asset::Kind::kErc20 && params.native_equivalents.contains(e.asset.contract));
        if (native_like) net_native += payee_in ? SignedWei(e.amount) : -SignedWei(e.amount);
        if (e.asset.kind == Asset::Kind::kNft)
            nft_net[{e.asset.contract, e.asset.token_id}] += payee_in ? 1 : -1;
    }
    if (params.charge_gas && members.contains(t.sender)) net_native -= SignedWei(txn_fee(t));

    bool nft_retained = false;
    for (const auto& [token, n] : nft_net)
        if (n > 0) nft_retained = true;

    f.net_native_profit = net_native;
    if (nft_retained && net_native >= 0) {
        f.kind_hint = ProfitFinding::KindHint::kRewardCollection;
        return f;
    }
    if (net_native > 0) {
        f.kind_hint = ProfitFinding::KindHint::kArbitrage;
        return f;
    }
    return std::nullopt;
}

}  // namespace nftlens
