#pragma once

#include <map>
#include <set>
#include <span>

#include "chain.hpp"

namespace nftlens {

/// Token contracts classified from transfer-log shapes. ERC-721 emits
/// Transfer with the tokenId as a third indexed argument (four topics);
/// ERC-20 shares the signature but keeps the amount in the data section
/// (three topics). ERC-1155 uses its own signatures.
struct TokenContractSet {
    std::set<Address> erc721;
    std::set<Address> erc1155;
    std::set<Address> ambiguous;  // mixed shapes, classified by majority

    bool is_erc721(const Address& a) const { return erc721.contains(a); }
    bool is_nft(const Address& a) const { return erc721.contains(a) || erc1155.contains(a); }
};

inline TokenContractSet identify_token_contracts(std::span<const Block> blocks,
                                                 DiagnosticSink* diags = nullptr) {
    struct Counts {
        uint64_t nft721 = 0;
        uint64_t fungible = 0;  // 3-topic Transfer shape
        uint64_t nft1155 = 0;
    };
    std::map<Address, Counts> seen;
    for (const Block& b : blocks) {
        for (const Txn& t : b.txns) {
            for (const EventLog& l : t.logs) {
                if (l.topics.empty()) continue;
                if (l.topics[0] == kTransferTopic) {
                    if (l.topics.size() == 4)
                        ++seen[l.emitter].nft721;
                    else
                        ++seen[l.emitter].fungible;
                } else if (l.topics[0] == kTransferSingleTopic ||
                           l.topics[0] == kTransferBatchTopic) {
                    ++seen[l.emitter].nft1155;
                }
            }
        }
    }

    TokenContractSet out;
    for (const auto& [addr, c] : seen) {
        const int shapes = (c.nft721 > 0) + (c.fungible > 0) + (c.nft1155 > 0);
        // Majority shape wins; pure fungible shape (or a tie against it) is
        // excluded from the token set.
        if (c.nft721 > c.fungible && c.nft721 >= c.nft1155) {
            out.erc721.insert(addr);
        } else if (c.nft1155 > c.fungible && c.nft1155 > c.nft721) {
            out.erc1155.insert(addr);
        }
        if (shapes > 1) {
            out.ambiguous.insert(addr);
            report(diags, "ambiguous_emitter",
                   addr.hex() + " emits mixed transfer shapes (721:" + std::to_string(c.nft721) +
                       " 20:" + std::to_string(c.fungible) + " 1155:" + std::to_string(c.nft1155) +
                       "), classified by majority");
        }
    }
    return out;
}

}  // namespace nftlens
