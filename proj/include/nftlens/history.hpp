#pragma once

#include <map>
#include <set>
#include <span>

#include "chain.hpp"

namespace nftlens {

/// Address-interaction index built in a pre-pass over the dataset: per-address
/// counterparty sets and unique-sender counts (the §5 exchange heuristic).
/// Single-writer during construction, immutable and shareable afterwards.
class HistoryIndex {
  public:
    void add_block(const Block& b) {
        for (const Txn& t : b.txns) {
            if (!t.receiver) continue;
            senders_of_[*t.receiver].insert(t.sender);
            counterparties_[t.sender].insert(*t.receiver);
            counterparties_[*t.receiver].insert(t.sender);
        }
    }

    size_t unique_senders(const Address& a) const {
        auto it = senders_of_.find(a);
        return it == senders_of_.end() ? 0 : it->second.size();
    }

    const std::set<Address>* counterparties(const Address& a) const {
        auto it = counterparties_.find(a);
        return it == counterparties_.end() ? nullptr : &it->second;
    }

  private:
    std::map<Address, std::set<Address>> senders_of_;
    std::map<Address, std::set<Address>> counterparties_;
};

inline HistoryIndex build_history_index(std::span<const Block> blocks) {
    HistoryIndex idx;
    for (const Block& b : blocks) idx.add_block(b);
    return idx;
}

}  // namespace nftlens
