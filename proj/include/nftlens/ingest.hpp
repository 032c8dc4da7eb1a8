#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chain.hpp"

namespace nftlens {

/// Dataset format: UTF-8 newline-delimited JSON, one self-describing record
/// per line ("kind" in {block, txn, call, log}). Records for one block are
/// contiguous; calls and logs attach to the most recent txn record. Numeric
/// chain quantities are decimal strings (plain JSON integers also accepted);
/// addresses and hashes are 0x-prefixed lowercase hex.
struct IngestError : std::runtime_error {
    enum class Kind { kMalformedRecord, kOutOfOrderBlock, kDanglingChild };

    IngestError(Kind k, size_t line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
          kind(k),
          line(line_no) {}

    Kind kind;
    size_t line;
};

namespace detail {

using nlohmann::json;

inline IngestError malformed(size_t line, const std::string& what) {
    return {IngestError::Kind::kMalformedRecord, line, what};
}

inline BigInt require_uint(const json& j, const char* field, size_t line) {
    if (!j.contains(field)) throw malformed(line, std::string("missing field '") + field + "'");
    const auto& v = j.at(field);
    std::optional<BigInt> out;
    if (v.is_string()) {
        out = bigint_from_dec(v.get_ref<const std::string&>());
    } else if (v.is_number_unsigned()) {
        out = BigInt(v.get<uint64_t>());
    } else if (v.is_number_integer()) {
        out = BigInt(v.get<int64_t>());
    }
    if (!out || *out < 0) throw malformed(line, std::string("field '") + field + "' is not a non-negative integer");
    return *out;
}

inline uint64_t require_u64(const json& j, const char* field, size_t line) {
    BigInt v = require_uint(j, field, line);
    if (v > std::numeric_limits<uint64_t>::max())
        throw malformed(line, std::string("field '") + field + "' out of range");
    return v.convert_to<uint64_t>();
}

inline std::string require_str(const json& j, const char* field, size_t line) {
    if (!j.contains(field) || !j.at(field).is_string())
        throw malformed(line, std::string("missing string field '") + field + "'");
    return j.at(field).get<std::string>();
}

inline Address require_address(const json& j, const char* field, size_t line) {
    auto a = Address::from_hex(require_str(j, field, line));
    if (!a) throw malformed(line, std::string("field '") + field + "' is not a 20-byte hex address");
    return *a;
}

inline Hash32 require_hash(const json& j, const char* field, size_t line) {
    auto h = Hash32::from_hex(require_str(j, field, line));
    if (!h) throw malformed(line, std::string("field '") + field + "' is not a 32-byte hex hash");
    return *h;
}

inline Bytes require_bytes(const json& j, const char* field, size_t line) {
    auto b = bytes_from_hex(require_str(j, field, line));
    if (!b) throw malformed(line, std::string("field '") + field + "' is not valid hex");
    return *b;
}

}  // namespace detail

/// Single-reader streaming assembler: yields Blocks in ascending block-number
/// order. Assembled Blocks are immutable and safe to share across threads.
class DatasetReader {
  public:
    explicit DatasetReader(std::istream& in) : in_(in) {}

    /// Returns the next fully assembled block, or nullopt at end of stream.
    /// Throws IngestError with the offending line number.
    std::optional<Block> next() {
        using detail::json;
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (line.empty()) continue;
            json rec = json::parse(line, nullptr, false);
            if (rec.is_discarded() || !rec.is_object())
                throw detail::malformed(line_no_, "not a JSON object");
            const std::string kind = detail::require_str(rec, "kind", line_no_);
            if (kind == "block") {
                std::optional<Block> done;
                if (current_) {
                    finalize_current();
                    done = std::move(current_);
                }
                start_block(rec);
                if (done) return done;
            } else if (kind == "txn") {
                if (!current_)
                    throw IngestError(IngestError::Kind::kDanglingChild, line_no_,
                                      "txn record with no enclosing block");
                append_txn(rec);
            } else if (kind == "call") {
                append_call(rec);
            } else if (kind == "log") {
                append_log(rec);
            } else {
                throw detail::malformed(line_no_, "unknown record kind '" + kind + "'");
            }
        }
        if (current_) {
            finalize_current();
            auto done = std::move(current_);
            current_.reset();
            return done;
        }
        return std::nullopt;
    }

  private:
    void start_block(const detail::json& rec) {
        Block b;
        b.number = detail::require_u64(rec, "block_number", line_no_);
        b.timestamp = detail::require_u64(rec, "timestamp", line_no_);
        b.miner = detail::require_address(rec, "miner", line_no_);
        if (last_number_ && b.number <= *last_number_)
            throw IngestError(IngestError::Kind::kOutOfOrderBlock, line_no_,
                              "block " + std::to_string(b.number) + " does not follow " +
                                  std::to_string(*last_number_));
        last_number_ = b.number;
        block_line_ = line_no_;
        current_ = std::move(b);
    }

    void append_txn(const detail::json& rec) {
        Txn t;
        t.hash = detail::require_hash(rec, "tx_hash", line_no_);
        t.sender = detail::require_address(rec, "from", line_no_);
        if (rec.contains("to") && !rec.at("to").is_null())
            t.receiver = detail::require_address(rec, "to", line_no_);
        auto st = status_from_name(detail::require_str(rec, "status", line_no_));
        if (!st) throw detail::malformed(line_no_, "status must be 'success' or 'reverted'");
        t.status = *st;
        t.gas_price = detail::require_uint(rec, "gas_price", line_no_);
        if (t.gas_price <= 0) throw detail::malformed(line_no_, "gas_price must be positive");
        t.gas_used = detail::require_u64(rec, "gas_used", line_no_);
        t.index = static_cast<uint32_t>(detail::require_u64(rec, "index", line_no_));
        t.input = detail::require_bytes(rec, "input", line_no_);
        t.value = detail::require_uint(rec, "value", line_no_);
        current_->txns.push_back(std::move(t));
    }

    void append_call(const detail::json& rec) {
        if (!current_ || current_->txns.empty())
            throw IngestError(IngestError::Kind::kDanglingChild, line_no_,
                              "call record with no enclosing txn");
        InternalCall c;
        c.caller = detail::require_address(rec, "from", line_no_);
        c.callee = detail::require_address(rec, "to", line_no_);
        c.value = detail::require_uint(rec, "value", line_no_);
        c.input = detail::require_bytes(rec, "input", line_no_);
        auto kind = call_kind_from_name(detail::require_str(rec, "call_kind", line_no_));
        if (!kind) throw detail::malformed(line_no_, "bad call_kind");
        c.kind = *kind;
        c.depth = static_cast<uint32_t>(detail::require_u64(rec, "depth", line_no_));
        auto& calls = current_->txns.back().internal_calls;
        if (c.depth < 1) throw detail::malformed(line_no_, "call depth must be >= 1");
        const uint32_t prev = calls.empty() ? 0 : calls.back().depth;
        if (c.depth > prev + 1)
            throw detail::malformed(line_no_, "call tree gap: depth " + std::to_string(c.depth) +
                                                  " after depth " + std::to_string(prev));
        calls.push_back(std::move(c));
    }

    void append_log(const detail::json& rec) {
        if (!current_ || current_->txns.empty())
            throw IngestError(IngestError::Kind::kDanglingChild, line_no_,
                              "log record with no enclosing txn");
        EventLog l;
        l.emitter = detail::require_address(rec, "address", line_no_);
        if (!rec.contains("topics") || !rec.at("topics").is_array())
            throw detail::malformed(line_no_, "missing topics array");
        for (const auto& t : rec.at("topics")) {
            if (!t.is_string()) throw detail::malformed(line_no_, "topic is not a string");
            auto h = Hash32::from_hex(t.get<std::string>());
            if (!h) throw detail::malformed(line_no_, "topic is not a 32-byte word");
            l.topics.push_back(*h);
        }
        if (l.topics.size() > 4) throw detail::malformed(line_no_, "more than 4 topics");
        l.data = detail::require_bytes(rec, "data", line_no_);
        l.log_index = static_cast<uint32_t>(detail::require_u64(rec, "log_index", line_no_));
        auto& logs = current_->txns.back().logs;
        // one txn's logs are a contiguous slice of the block's log sequence
        if (!logs.empty() && l.log_index != logs.back().log_index + 1)
            throw detail::malformed(line_no_, "log_index not contiguous within the txn");
        logs.push_back(std::move(l));
    }

    void finalize_current() {
        for (size_t i = 0; i < current_->txns.size(); ++i) {
            if (current_->txns[i].index != i)
                throw detail::malformed(block_line_,
                                        "block " + std::to_string(current_->number) +
                                            ": txn indices are not contiguous from 0");
        }
    }

    std::istream& in_;
    size_t line_no_ = 0;
    size_t block_line_ = 0;
    std::optional<Block> current_;
    std::optional<uint64_t> last_number_;
};

inline std::vector<Block> read_dataset(std::istream& in) {
    DatasetReader reader(in);
    std::vector<Block> blocks;
    while (auto b = reader.next()) blocks.push_back(std::move(*b));
    return blocks;
}

inline void write_dataset(std::span<const Block> blocks, std::ostream& out) {
    using detail::json;
    for (const Block& b : blocks) {
        json rec{{"kind", "block"},
                 {"block_number", b.number},
                 {"timestamp", b.timestamp},
                 {"miner", b.miner.hex()}};
        out << rec.dump() << '\n';
        for (const Txn& t : b.txns) {
            json tr{{"kind", "txn"},
                    {"index", t.index},
                    {"tx_hash", t.hash.hex()},
                    {"from", t.sender.hex()},
                    {"status", std::string(status_name(t.status))},
                    {"gas_price", to_dec(t.gas_price)},
                    {"gas_used", t.gas_used},
                    {"input", to_hex(t.input)},
                    {"value", to_dec(t.value)}};
            if (t.receiver) tr["to"] = t.receiver->hex();
            out << tr.dump() << '\n';
            for (const InternalCall& c : t.internal_calls) {
                json cr{{"kind", "call"},
                        {"from", c.caller.hex()},
                        {"to", c.callee.hex()},
                        {"value", to_dec(c.value)},
                        {"input", to_hex(c.input)},
                        {"call_kind", std::string(call_kind_name(c.kind))},
                        {"depth", c.depth}};
                out << cr.dump() << '\n';
            }
            for (const EventLog& l : t.logs) {
                json topics = json::array();
                for (const Hash32& h : l.topics) topics.push_back(h.hex());
                json lr{{"kind", "log"},
                        {"address", l.emitter.hex()},
                        {"topics", topics},
                        {"data", to_hex(l.data)},
                        {"log_index", l.log_index}};
                out << lr.dump() << '\n';
            }
        }
    }
}

}  // namespace nftlens
