#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "types.hpp"

namespace nftlens {

enum class TxnStatus : uint8_t { kSuccess, kReverted };

inline std::string_view status_name(TxnStatus s) {
    return s == TxnStatus::kSuccess ? "success" : "reverted";
}

inline std::optional<TxnStatus> status_from_name(std::string_view s) {
    if (s == "success") return TxnStatus::kSuccess;
    if (s == "reverted") return TxnStatus::kReverted;
    return std::nullopt;
}

enum class CallKind : uint8_t { kCall, kDelegateCall, kStaticCall, kCreate };

inline std::string_view call_kind_name(CallKind k) {
    switch (k) {
        case CallKind::kCall: return "call";
        case CallKind::kDelegateCall: return "delegatecall";
        case CallKind::kStaticCall: return "staticcall";
        case CallKind::kCreate: return "create";
    }
    return "call";
}

inline std::optional<CallKind> call_kind_from_name(std::string_view s) {
    if (s == "call") return CallKind::kCall;
    if (s == "delegatecall") return CallKind::kDelegateCall;
    if (s == "staticcall") return CallKind::kStaticCall;
    if (s == "create") return CallKind::kCreate;
    return std::nullopt;
}

struct EventLog {
    Address emitter;
    std::vector<Hash32> topics;  // topics[0], when present, is the event signature hash
    Bytes data;
    uint32_t log_index = 0;
};

struct InternalCall {
    Address caller;
    Address callee;
    Wei value;
    Bytes input;
    CallKind kind = CallKind::kCall;
    uint32_t depth = 1;
};

struct Txn {
    Hash32 hash;
    TxnStatus status = TxnStatus::kSuccess;
    Address sender;
    std::optional<Address> receiver;  // absent: contract creation
    Wei gas_price;
    uint64_t gas_used = 0;
    uint32_t index = 0;
    Bytes input;
    Wei value;
    std::vector<EventLog> logs;             // strictly increasing log_index
    std::vector<InternalCall> internal_calls;  // preorder: each child's parent precedes it
};

struct Block {
    uint64_t number = 0;
    uint64_t timestamp = 0;
    Address miner;
    std::vector<Txn> txns;  // ascending txn index, 0..n-1
};

inline Wei txn_fee(const Txn& t) { return t.gas_price * t.gas_used; }

inline std::optional<Selector> txn_selector(const Txn& t) {
    if (t.input.size() < 4) return std::nullopt;
    Selector s;
    std::copy(t.input.begin(), t.input.begin() + 4, s.begin());
    return s;
}

inline std::optional<Selector> call_selector(const InternalCall& c) {
    if (c.input.size() < 4) return std::nullopt;
    Selector s;
    std::copy(c.input.begin(), c.input.begin() + 4, s.begin());
    return s;
}

}  // namespace nftlens
