#pragma once

#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cornering.hpp"
#include "instant_profit.hpp"
#include "ordering.hpp"
#include "pricing.hpp"

namespace nftlens {

using json = nlohmann::json;

inline json to_json(const NftRef& n) {
    return {{"contract", n.contract.hex()}, {"token_id", n.token_id.str()}};
}

inline json to_json(const TradeAction& a) {
    return {{"kind", std::string(trade_kind_name(a.kind))},
            {"user", a.user.hex()},
            {"marketplace", a.marketplace},
            {"nft", to_json(a.nft)},
            {"price", to_dec(a.price)},
            {"txn_hash", a.txn_hash.hex()},
            {"block_number", a.block_number},
            {"txn_index", a.txn_index},
            {"status", std::string(status_name(a.status))},
            {"gas_price", to_dec(a.gas_price)},
            {"gas_used", a.gas_used},
            {"timestamp", a.timestamp}};
}

inline json to_json(const OrderingFinding& f, std::optional<Channel> channel = {}) {
    json j{{"pattern", std::string(pattern_name(f.pattern))},
           {"attacker", to_json(f.attacker)},
           {"victim", to_json(f.victim)},
           {"nft", to_json(f.nft)},
           {"marketplace", f.marketplace},
           {"block_number", f.block_number},
           {"gas_delta", to_dec(f.gas_delta)}};
    if (f.bid_delta) j["bid_delta"] = to_dec(*f.bid_delta);
    if (channel) j["channel"] = std::string(channel_name(*channel));
    return j;
}

inline json to_json(const PaymentEdge& e) {
    return {{"payer", e.payer.hex()},
            {"payee", e.payee.hex()},
            {"amount", to_dec(e.amount)},
            {"asset", e.asset.key()}};
}

inline json to_json(const ProfitFinding& f) {
    json clique = json::array();
    for (const Address& a : f.clique) clique.push_back(a.hex());
    json flows = json::object();
    for (const auto& [asset, flow] : f.flows)
        flows[asset] = {{"in", to_dec(flow.in)}, {"out", to_dec(flow.out)}};
    json edges = json::array();
    for (const PaymentEdge& e : f.evidence) edges.push_back(to_json(e));
    return {{"kind", std::string(kind_hint_name(f.kind_hint))},
            {"txn", f.txn_hash.hex()},
            {"clique", clique},
            {"net_profit_wei", to_dec(f.net_native_profit)},
            {"flows", flows},
            {"evidence", {{"edges", edges}}}};
}

inline json to_json(const GasWarStat& s) {
    return {{"nft", to_json(s.nft)},
            {"block_number", s.block_number},
            {"contender_count", s.contender_count},
            {"gc_high", to_dec(s.gc_high)},
            {"gc_low_est", to_dec(s.gc_low_est)},
            {"winner_txn", s.winner_txn.hex()}};
}

inline json to_json(const EvasionFinding& f) {
    return {{"txn", f.txn_hash.hex()},
            {"contract", f.contract.hex()},
            {"selector", selector_hex(f.selector)},
            {"limit", f.limit},
            {"minted", f.minted},
            {"via_contract", f.via_contract}};
}

inline json to_json(const CorneringFinding& f) {
    return {{"contract", f.contract.hex()},
            {"holder", f.holder.hex()},
            {"balance", f.balance_at_alert},
            {"total_supply", f.total_supply_at_alert},
            {"fraction", std::to_string(f.balance_at_alert) + "/" +
                             std::to_string(f.total_supply_at_alert)},
            {"block_number", f.block_number}};
}

inline json to_json(const MintMethod& m) {
    json j{{"contract", m.contract.hex()},
           {"selector", selector_hex(m.selector)},
           {"privileged", m.privileged}};
    if (m.count_arg_offset) j["count_arg_offset"] = *m.count_arg_offset;
    if (m.inferred_limit) j["inferred_limit"] = *m.inferred_limit;
    if (m.price_per_token) j["price_per_token"] = to_dec(*m.price_per_token);
    if (m.price_estimated) j["price_estimated"] = true;
    return j;
}

inline json to_json(const PriceQuote& q) {
    return {{"nft_contract", q.nft_contract.hex()},
            {"as_of", q.as_of},
            {"price", to_dec(q.price)},
            {"basis", std::string(price_basis_name(q.basis))}};
}

// ---------------------------------------------------------------------------
// Report rendering: findings files are JSON lines; table and csv are lossless
// re-renderings (csv cells hold JSON-encoded values).
// ---------------------------------------------------------------------------

struct MalformedFinding : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::vector<json> parse_findings(std::istream& in) {
    std::vector<json> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw MalformedFinding("line " + std::to_string(line_no) + ": not a JSON object");
        out.push_back(std::move(j));
    }
    return out;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

// Sort key for table mode: block ascending, then money figure descending.
inline std::pair<uint64_t, SignedWei> table_key(const json& j) {
    uint64_t block = 0;
    if (j.contains("block_number") && j.at("block_number").is_number_integer())
        block = j.at("block_number").get<uint64_t>();
    SignedWei figure = 0;
    for (const char* field : {"net_profit_wei", "gas_delta", "gc_high"}) {
        if (j.contains(field) && j.at(field).is_string()) {
            if (auto v = bigint_from_dec(j.at(field).get<std::string>())) figure = *v;
            break;
        }
    }
    return {block, figure};
}

}  // namespace detail

inline void render_jsonl(std::span<const json> findings, std::ostream& out) {
    for (const json& j : findings) out << j.dump() << '\n';
}

inline void render_csv(std::span<const json> findings, std::ostream& out) {
    std::set<std::string> columns;
    for (const json& j : findings)
        for (auto it = j.begin(); it != j.end(); ++it) columns.insert(it.key());
    bool first = true;
    for (const auto& c : columns) {
        if (!first) out << ',';
        out << detail::csv_escape(c);
        first = false;
    }
    out << '\n';
    for (const json& j : findings) {
        first = true;
        for (const auto& c : columns) {
            if (!first) out << ',';
            first = false;
            if (j.contains(c)) out << detail::csv_escape(j.at(c).dump());
        }
        out << '\n';
    }
}

/// Inverse of render_csv: cells are parsed back as JSON values, empty cells
/// mean the field was absent.
inline std::vector<json> parse_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) return {};
    const std::vector<std::string> columns = detail::csv_split(header);
    std::vector<json> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = detail::csv_split(line);
        json j = json::object();
        for (size_t i = 0; i < columns.size() && i < cells.size(); ++i) {
            if (cells[i].empty()) continue;
            json v = json::parse(cells[i], nullptr, false);
            if (v.is_discarded()) throw MalformedFinding("bad csv cell: " + cells[i]);
            j[columns[i]] = std::move(v);
        }
        out.push_back(std::move(j));
    }
    return out;
}

inline void render_table(std::vector<json> findings, std::ostream& out) {
    std::stable_sort(findings.begin(), findings.end(), [](const json& a, const json& b) {
        const auto ka = detail::table_key(a);
        const auto kb = detail::table_key(b);
        if (ka.first != kb.first) return ka.first < kb.first;
        return ka.second > kb.second;
    });
    out << "block      kind                 txn                                       figure (ETH)\n";
    out << "---------- -------------------- ----------------------------------------- ------------\n";
    for (const json& j : findings) {
        const auto key = detail::table_key(j);
        std::string kind = "-";
        for (const char* f : {"pattern", "kind"}) {
            if (j.contains(f) && j.at(f).is_string()) {
                kind = j.at(f).get<std::string>();
                break;
            }
        }
        std::string txn = "-";
        for (const char* f : {"txn", "txn_hash", "winner_txn"}) {
            if (j.contains(f) && j.at(f).is_string()) {
                txn = j.at(f).get<std::string>();
                break;
            }
        }
        if (txn == "-" && j.contains("attacker") && j.at("attacker").contains("txn_hash"))
            txn = j.at("attacker").at("txn_hash").get<std::string>();
        std::ostringstream row;
        row << key.first;
        std::string block_s = row.str();
        block_s.resize(10, ' ');
        kind.resize(std::max<size_t>(kind.size(), 20), ' ');
        out << block_s << ' ' << kind << ' ' << txn << ' ' << format_eth(key.second) << '\n';
    }
    std::map<std::string, uint64_t> counts;
    for (const json& j : findings) {
        for (const char* f : {"pattern", "kind"}) {
            if (j.contains(f) && j.at(f).is_string()) {
                ++counts[j.at(f).get<std::string>()];
                break;
            }
        }
    }
    if (!counts.empty()) {
        out << "\ncounts:\n";
        for (const auto& [kind, n] : counts) out << "  " << kind << ": " << n << '\n';
    }
}

}  // namespace nftlens
