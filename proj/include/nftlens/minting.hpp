#pragma once

#include <istream>
#include <map>
#include <set>
#include <span>

#include <json.hpp>

#include "tokens.hpp"

namespace nftlens {

/// One ERC-721 Transfer observation, in chronological (block, txn index,
/// log index) order.
struct TransferObs {
    uint64_t block_number = 0;
    uint32_t txn_index = 0;
    uint32_t log_index = 0;
    Hash32 txn_hash;
    Address from;
    Address to;
    TokenId token_id;
};

inline bool is_mint_sink(const Address& a) { return a == kNullAddress || a == kBurnAddress; }

/// Extracts per-contract transfer streams for every classified ERC-721
/// contract, preserving chain order.
inline std::map<Address, std::vector<TransferObs>> collect_erc721_transfers(
    std::span<const Block> blocks, const TokenContractSet& tokens) {
    std::map<Address, std::vector<TransferObs>> out;
    for (const Block& b : blocks) {
        for (const Txn& t : b.txns) {
            for (const EventLog& l : t.logs) {
                if (l.topics.size() != 4 || l.topics[0] != kTransferTopic) continue;
                if (!tokens.is_erc721(l.emitter)) continue;
                out[l.emitter].push_back({b.number, t.index, l.log_index, t.hash,
                                          address_from_word(l.topics[1]),
                                          address_from_word(l.topics[2]),
                                          uint_from_word(l.topics[3])});
            }
        }
    }
    return out;
}

struct LedgerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CollectionLedger {
    Address contract;
    std::set<TokenId> seen_token_ids;
    std::set<TokenId> burned;
    uint64_t total_supply = 0;  // live supply: minted minus burned
    std::map<Address, uint64_t> holder_balances;
    std::map<Address, std::set<TokenId>> holder_token_ids;

    size_t holder_count() const { return holder_balances.size(); }
};

struct MintEvent {
    Hash32 txn_hash;
    uint64_t block_number = 0;
    Address to;
    TokenId token_id;
};

/// §4.4 Step I fold: a tokenId never seen before is a minting event; every
/// transfer moves balances; transfers to the null/burn address reduce the
/// live supply. Throws LedgerError on a balance that would go negative
/// (dataset inconsistency) — the collection is abandoned with a diagnostic.
class CollectionTracker {
  public:
    explicit CollectionTracker(const Address& contract) { ledger_.contract = contract; }

    std::optional<MintEvent> apply(const TransferObs& obs) {
        std::optional<MintEvent> mint;
        if (!ledger_.seen_token_ids.contains(obs.token_id)) {
            ledger_.seen_token_ids.insert(obs.token_id);
            mint = MintEvent{obs.txn_hash, obs.block_number, obs.to, obs.token_id};
            if (is_mint_sink(obs.to)) {
                ledger_.burned.insert(obs.token_id);
            } else {
                ++ledger_.total_supply;
                credit(obs.to, obs.token_id);
            }
            return mint;
        }
        if (obs.from == obs.to) return std::nullopt;
        if (!is_mint_sink(obs.from)) debit(obs.from, obs.token_id);
        if (is_mint_sink(obs.to)) {
            ledger_.burned.insert(obs.token_id);
            if (ledger_.total_supply == 0)
                throw LedgerError(ledger_.contract.hex() + ": burn below zero supply");
            --ledger_.total_supply;
        } else {
            credit(obs.to, obs.token_id);
        }
        return std::nullopt;
    }

    const CollectionLedger& ledger() const { return ledger_; }

  private:
    void credit(const Address& a, const TokenId& id) {
        ++ledger_.holder_balances[a];
        ledger_.holder_token_ids[a].insert(id);
    }

    void debit(const Address& a, const TokenId& id) {
        auto it = ledger_.holder_balances.find(a);
        if (it == ledger_.holder_balances.end() || it->second == 0)
            throw LedgerError(ledger_.contract.hex() + ": negative balance for " + a.hex());
        if (--it->second == 0) ledger_.holder_balances.erase(it);
        auto ht = ledger_.holder_token_ids.find(a);
        if (ht != ledger_.holder_token_ids.end()) {
            ht->second.erase(id);
            if (ht->second.empty()) ledger_.holder_token_ids.erase(ht);
        }
    }

    CollectionLedger ledger_;
};

/// Convenience fold: all mint events plus the final ledger.
inline std::pair<std::vector<MintEvent>, CollectionLedger> track_collection(
    const Address& contract, std::span<const TransferObs> transfers) {
    CollectionTracker tracker(contract);
    std::vector<MintEvent> mints;
    for (const TransferObs& obs : transfers)
        if (auto m = tracker.apply(obs)) mints.push_back(std::move(*m));
    return {std::move(mints), tracker.ledger()};
}

// ---------------------------------------------------------------------------
// Replay oracle and mint-method analysis (§4.4 Steps II-III)
// ---------------------------------------------------------------------------

struct ReplayContext {
    uint64_t block_number = 0;
    Address sender;
    Address receiver;
    Bytes calldata;
    Wei value;
};

struct ReplayOutcome {
    bool success = false;
    std::optional<uint64_t> minted;  // Transfer-log count, when observable
};

/// Replay facility answering whether a transaction variant succeeds at a
/// given block. Production backs this with a forked dev node; tests use the
/// scripted table oracle below. Deterministic for identical inputs.
class ExecutionOracle {
  public:
    virtual ~ExecutionOracle() = default;
    virtual ReplayOutcome replay(const ReplayContext& ctx) = 0;
};

/// Table-driven oracle. File format: {"methods": [{"selector": "0x...",
/// "count_word": 0, "limit": 7, "price_per_token": "1000", "exact_value":
/// true, "owner": "0x..."}]}. A method with an owner succeeds only for that
/// sender; a count_word/limit pair models a per-txn mint cap; exact_value
/// enforces value == count x price_per_token.
class ScriptedOracle : public ExecutionOracle {
  public:
    struct Method {
        std::optional<Address> owner;
        std::optional<uint32_t> count_word;
        std::optional<uint64_t> limit;
        Wei price_per_token;
        bool exact_value = false;
    };

    void add_method(const Selector& sel, Method m) { methods_[sel] = std::move(m); }

    ReplayOutcome replay(const ReplayContext& ctx) override {
        ++probes_;
        if (ctx.calldata.size() < 4) return {false, std::nullopt};
        Selector sel;
        std::copy(ctx.calldata.begin(), ctx.calldata.begin() + 4, sel.begin());
        auto it = methods_.find(sel);
        if (it == methods_.end()) return {false, std::nullopt};
        const Method& m = it->second;
        if (m.owner && *m.owner != ctx.sender) return {false, std::nullopt};
        uint64_t count = 1;
        if (m.count_word) {
            const size_t off = 4 + size_t{*m.count_word} * 32;
            if (ctx.calldata.size() < off + 32) return {false, std::nullopt};
            BigInt v = uint_from_be(std::span(ctx.calldata).subspan(off, 32));
            if (v > std::numeric_limits<uint64_t>::max()) return {false, std::nullopt};
            count = v.convert_to<uint64_t>();
        }
        if (m.limit && count > *m.limit) return {false, std::nullopt};
        if (m.exact_value && ctx.value != m.price_per_token * count) return {false, std::nullopt};
        return {true, count};
    }

    uint64_t probes() const { return probes_; }
    void reset_probes() { probes_ = 0; }

    static ScriptedOracle load(std::istream& in) {
        nlohmann::json root = nlohmann::json::parse(in);
        ScriptedOracle oracle;
        for (const auto& mj : root.at("methods")) {
            auto sel = selector_from_hex(mj.at("selector").get<std::string>());
            if (!sel) throw std::runtime_error("scripted oracle: bad selector");
            Method m;
            if (mj.contains("owner")) m.owner = Address::from_hex(mj.at("owner").get<std::string>());
            if (mj.contains("count_word")) m.count_word = mj.at("count_word").get<uint32_t>();
            if (mj.contains("limit")) m.limit = mj.at("limit").get<uint64_t>();
            if (mj.contains("price_per_token"))
                m.price_per_token = *bigint_from_dec(mj.at("price_per_token").get<std::string>());
            m.exact_value = mj.value("exact_value", false);
            oracle.add_method(*sel, std::move(m));
        }
        return oracle;
    }

  private:
    std::map<Selector, Method> methods_;
    uint64_t probes_ = 0;
};

struct MintMethod {
    Address contract;
    Selector selector{};
    bool privileged = false;
    std::optional<uint32_t> count_arg_offset;  // calldata word index holding a_m
    std::optional<uint64_t> inferred_limit;
    std::optional<Wei> price_per_token;
    bool price_estimated = false;  // division was inexact; limit is lower-confidence
};

/// One observed invocation of a method on a token contract within a minting
/// txn: the replay sample plus how many tokens that txn minted.
struct MintInvocation {
    Address contract;
    Selector selector{};
    ReplayContext sample;
    uint64_t minted = 0;
    bool direct = false;  // external receiver was the token contract itself
};

/// Collects, per (contract, selector), a representative invocation from the
/// minting txns (§4.4 Step II "public methods touched by T_m"). Direct
/// external calls are preferred as samples: their minted count is
/// unambiguously the txn's own.
inline std::vector<MintInvocation> collect_mint_invocations(
    std::span<const Block> blocks, const std::map<Address, std::vector<MintEvent>>& mints) {
    std::map<std::pair<Address, Hash32>, uint64_t> counts;  // (contract, txn) -> mints
    for (const auto& [contract, events] : mints)
        for (const MintEvent& e : events) ++counts[{contract, e.txn_hash}];

    std::map<std::pair<Address, Selector>, MintInvocation> best;
    auto offer = [&](const Address& contract, const Selector& sel, ReplayContext ctx,
                     uint64_t minted, bool direct) {
        auto key = std::make_pair(contract, sel);
        auto it = best.find(key);
        if (it == best.end() || (direct && !it->second.direct))
            best[key] = {contract, sel, std::move(ctx), minted, direct};
    };
    for (const Block& b : blocks) {
        for (const Txn& t : b.txns) {
            if (t.status != TxnStatus::kSuccess) continue;
            if (t.receiver) {
                auto it = counts.find({*t.receiver, t.hash});
                if (it != counts.end() && it->second > 0) {
                    if (auto sel = txn_selector(t))
                        offer(*t.receiver, *sel, {b.number, t.sender, *t.receiver, t.input, t.value},
                              it->second, true);
                }
            }
            for (const InternalCall& c : t.internal_calls) {
                auto it = counts.find({c.callee, t.hash});
                if (it == counts.end() || it->second == 0) continue;
                if (auto sel = call_selector(c))
                    offer(c.callee, *sel, {b.number, c.caller, c.callee, c.input, c.value},
                          it->second, false);
            }
        }
    }
    std::vector<MintInvocation> out;
    out.reserve(best.size());
    for (auto& [key, inv] : best) out.push_back(std::move(inv));
    return out;
}

// Fresh sender for privilege probes: never appears in real datasets.
inline const Address kProbeSender =
    *Address::from_hex("0xfeedfacefeedfacefeedfacefeedfacefeedface");

/// §4.4 Step II: replays each touched method with a fresh sender; a revert
/// means the method is privileged (owner/whitelist gated) and it is labeled
/// as such, success adds it to the unprivileged set.
inline std::vector<MintMethod> identify_unprivileged_mints(
    std::span<const MintInvocation> invocations, ExecutionOracle& oracle) {
    std::vector<MintMethod> out;
    for (const MintInvocation& inv : invocations) {
        ReplayContext probe = inv.sample;
        probe.sender = kProbeSender;
        MintMethod m;
        m.contract = inv.contract;
        m.selector = inv.selector;
        m.privileged = !oracle.replay(probe).success;
        out.push_back(m);
    }
    return out;
}

namespace detail {

inline Bytes with_count_word(const Bytes& calldata, uint32_t word_index, uint64_t count) {
    Bytes out = calldata;
    const Hash32 w = word_from_uint(BigInt(count));
    std::copy(w.bytes.begin(), w.bytes.end(), out.begin() + 4 + size_t{word_index} * 32);
    return out;
}

}  // namespace detail

inline constexpr uint64_t kDefaultMintProbeCap = 10'000;  // a_max

/// §4.4 Step III: locates the count argument a_m in the sample calldata (the
/// word equal to the sample's minted count), estimates the per-token price
/// from the sample's value, then binary-searches the largest count that still
/// replays successfully. Unresolvable methods keep an absent limit and the
/// caller falls back to a per-txn default of one.
inline MintMethod infer_mint_limit(MintMethod method, const MintInvocation& sample,
                                   ExecutionOracle& oracle,
                                   uint64_t a_max = kDefaultMintProbeCap,
                                   DiagnosticSink* diags = nullptr) {
    const uint64_t n = sample.minted;
    if (n == 0 || method.privileged) return method;
    const Bytes& calldata = sample.sample.calldata;
    const size_t words = calldata.size() < 4 ? 0 : (calldata.size() - 4) / 32;

    std::vector<uint32_t> candidates;
    for (uint32_t k = 0; k < words; ++k) {
        const size_t off = 4 + size_t{k} * 32;
        if (uint_from_be(std::span(calldata).subspan(off, 32)) == n)
            candidates.push_back(k);
    }
    if (candidates.empty()) {
        report(diags, "unresolved_count_arg",
               method.contract.hex() + "/" + selector_hex(method.selector) +
                   ": no calldata word equals the minted count " + std::to_string(n));
        return method;
    }

    Wei price = sample.sample.value / n;
    method.price_estimated = sample.sample.value % n != 0;
    auto probe = [&](uint32_t word, uint64_t count) {
        ReplayContext ctx = sample.sample;
        ctx.sender = kProbeSender;
        ctx.calldata = detail::with_count_word(calldata, word, count);
        ctx.value = price * count;
        return oracle.replay(ctx);
    };

    std::optional<uint32_t> chosen;
    if (candidates.size() == 1) {
        chosen = candidates[0];
    } else {
        // Ambiguous: accept the candidate whose bump from n to n+1 both
        // succeeds and actually changes the minted count.
        for (uint32_t k : candidates) {
            if (!probe(k, n).success) continue;
            auto bumped = probe(k, n + 1);
            if (bumped.success && bumped.minted && *bumped.minted == n + 1) {
                chosen = k;
                break;
            }
            if (!bumped.success) {
                // n is already the cap for this candidate; that also pins it.
                chosen = k;
                break;
            }
        }
        if (!chosen) {
            report(diags, "ambiguous_count_arg",
                   method.contract.hex() + "/" + selector_hex(method.selector) +
                       ": multiple calldata words equal " + std::to_string(n) +
                       ", none confirmed by replay");
            return method;
        }
    }
    method.count_arg_offset = chosen;
    method.price_per_token = price;

    if (!probe(*chosen, n).success) {
        report(diags, "unresolved_limit",
               method.contract.hex() + "/" + selector_hex(method.selector) +
                   ": replay at the observed count failed");
        return method;
    }
    if (probe(*chosen, a_max).success) {
        report(diags, "unresolved_limit",
               method.contract.hex() + "/" + selector_hex(method.selector) +
                   ": no revert up to a_max " + std::to_string(a_max));
        return method;
    }
    uint64_t lo = n, hi = a_max;  // success(lo), revert(hi)
    while (hi - lo > 1) {
        const uint64_t mid = lo + (hi - lo) / 2;
        if (probe(*chosen, mid).success)
            lo = mid;
        else
            hi = mid;
    }
    method.inferred_limit = lo;
    return method;
}

inline uint64_t limit_or_default(const MintMethod& m) { return m.inferred_limit.value_or(1); }

struct EvasionFinding {
    Hash32 txn_hash;
    Address contract;
    Selector selector{};
    uint64_t limit = 0;
    uint64_t minted = 0;  // > limit by construction
    bool via_contract = false;
};

/// §4.4 evasion scan: per external txn, mints of a contract (internal-call
/// fan-out included) are counted against the limit of the unprivileged
/// method the txn invoked.
inline std::vector<EvasionFinding> detect_limit_evasion(
    std::span<const Block> blocks, const std::map<Address, std::vector<MintEvent>>& mints,
    std::span<const MintMethod> methods) {
    std::map<std::pair<Address, Hash32>, uint64_t> counts;
    for (const auto& [contract, events] : mints)
        for (const MintEvent& e : events) ++counts[{contract, e.txn_hash}];

    std::map<std::pair<Address, Selector>, const MintMethod*> unprivileged;
    std::set<Address> tracked;
    for (const MintMethod& m : methods) {
        if (m.privileged) continue;
        unprivileged[{m.contract, m.selector}] = &m;
        tracked.insert(m.contract);
    }

    std::vector<EvasionFinding> out;
    for (const Block& b : blocks) {
        for (const Txn& t : b.txns) {
            if (t.status != TxnStatus::kSuccess) continue;
            // Which unprivileged methods does this txn invoke, per contract?
            std::map<Address, const MintMethod*> invoked;
            auto consider = [&](const Address& callee, const std::optional<Selector>& sel) {
                if (!sel || !tracked.contains(callee)) return;
                auto it = unprivileged.find({callee, *sel});
                if (it != unprivileged.end()) invoked.emplace(callee, it->second);
            };
            if (t.receiver) consider(*t.receiver, txn_selector(t));
            for (const InternalCall& c : t.internal_calls) consider(c.callee, call_selector(c));
            for (const auto& [contract, method] : invoked) {
                auto it = counts.find({contract, t.hash});
                if (it == counts.end()) continue;
                const uint64_t minted = it->second;
                const uint64_t limit = limit_or_default(*method);
                if (minted > limit) {
                    out.push_back({t.hash, contract, method->selector, limit, minted,
                                   t.receiver && *t.receiver != contract});
                }
            }
        }
    }
    return out;
}

}  // namespace nftlens
