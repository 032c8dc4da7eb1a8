#pragma once

#include "minting.hpp"

namespace nftlens {

/// Exact rational threshold; th_f has no recoverable default and must be
/// supplied by configuration.
struct Ratio {
    uint64_t num = 0;
    uint64_t den = 1;
};

struct CorneringFinding {
    Address contract;
    Address holder;
    uint64_t balance_at_alert = 0;  // fraction = balance / total_supply
    uint64_t total_supply_at_alert = 0;
    uint64_t block_number = 0;
};

/// §4.5: while folding a collection's transfer stream, every receiver update
/// is checked against the supply fraction threshold. Alerts are suppressed
/// until the supply reaches th_t, while the collection has a single holder
/// (pre-sale creator minting), and after the first crossing per holder.
inline std::vector<CorneringFinding> detect_cornering(const Address& contract,
                                                      std::span<const TransferObs> transfers,
                                                      Ratio th_f, uint64_t th_t,
                                                      const std::set<Address>& excluded = {}) {
    CollectionTracker tracker(contract);
    std::vector<CorneringFinding> out;
    std::set<Address> alerted;
    for (const TransferObs& obs : transfers) {
        tracker.apply(obs);
        if (is_mint_sink(obs.to) || excluded.contains(obs.to)) continue;
        const CollectionLedger& ledger = tracker.ledger();
        if (ledger.total_supply < th_t) continue;
        if (ledger.holder_count() <= 1) continue;
        if (alerted.contains(obs.to)) continue;
        auto it = ledger.holder_balances.find(obs.to);
        if (it == ledger.holder_balances.end()) continue;
        // balance/supply > th_f, compared in integers
        if (BigInt(it->second) * th_f.den > BigInt(th_f.num) * ledger.total_supply) {
            out.push_back({contract, obs.to, it->second, ledger.total_supply, obs.block_number});
            alerted.insert(obs.to);
        }
    }
    return out;
}

}  // namespace nftlens
