#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>

#include "findings_io.hpp"
#include "ingest.hpp"

namespace nftlens {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::set<std::string> kKnownDetectors = {
    "frontrun", "backrun", "lossmin", "instant-profit", "mint-evasion", "cornering"};

struct Thresholds {
    size_t th_e = 200;              // §5 exchange cutoff
    std::optional<Ratio> th_f;      // §4.5 supply fraction; mandatory for cornering
    uint64_t th_t = 50;             // §4.5 supply gate
    uint32_t lookback_months = 3;   // §4.1 pricing rule (i); assumption, see README
    uint64_t min_trades = 50;       // §4.1 pricing rule (ii)
    uint64_t a_max = kDefaultMintProbeCap;
};

struct RunConfig {
    std::string dataset_path;
    std::string registry_path;
    std::string output_dir = "out";
    std::string flashbots_path;  // optional
    std::string oracle_path;     // optional; mint-evasion degrades without it
    std::set<std::string> detectors;
    Thresholds thresholds;
    unsigned workers = 1;
    std::set<Address> native_equivalents;
    std::set<Address> exchange_allowlist;
    std::set<Address> cornering_excluded;
};

struct DetectorRun {
    std::string name;
    uint64_t findings = 0;
    double wall_ms = 0;
};

struct RunSummary {
    uint64_t blocks = 0;
    uint64_t txns = 0;
    uint64_t trade_actions = 0;
    std::vector<DetectorRun> detectors;
    std::vector<Diagnostic> diagnostics;
};

namespace detail {

inline std::vector<std::pair<size_t, size_t>> chunk_ranges(size_t n, unsigned workers) {
    std::vector<std::pair<size_t, size_t>> ranges;
    const size_t w = std::max(1u, workers);
    const size_t step = (n + w - 1) / std::max<size_t>(w, 1);
    for (size_t begin = 0; begin < n; begin += std::max<size_t>(step, 1))
        ranges.emplace_back(begin, std::min(n, begin + std::max<size_t>(step, 1)));
    return ranges;
}

// Runs `fn` over block chunks, possibly in parallel, and concatenates the
// results in chunk order so output is identical to a serial pass.
template <typename T, typename Fn>
std::vector<T> map_blocks(std::span<const Block> blocks, unsigned workers, Fn&& fn) {
    const auto ranges = chunk_ranges(blocks.size(), workers);
    if (workers <= 1 || ranges.size() <= 1) {
        std::vector<T> out;
        for (const auto& [b, e] : ranges) {
            auto part = fn(blocks.subspan(b, e - b));
            out.insert(out.end(), std::make_move_iterator(part.begin()),
                       std::make_move_iterator(part.end()));
        }
        if (ranges.empty()) return fn(blocks);  // empty input, run once for side effects
        return out;
    }
    std::vector<std::future<std::vector<T>>> futures;
    futures.reserve(ranges.size());
    for (const auto& [b, e] : ranges)
        futures.push_back(std::async(std::launch::async,
                                     [&fn, blocks, b = b, e = e] { return fn(blocks.subspan(b, e - b)); }));
    std::vector<T> out;
    for (auto& f : futures) {
        auto part = f.get();
        out.insert(out.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }
    return out;
}

class Stopwatch {
  public:
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
    }

  private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_ = clock::now();
};

inline void write_lines(const std::filesystem::path& path, std::span<const json> lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    for (const json& j : lines) out << j.dump() << '\n';
}

}  // namespace detail

/// Executes the selected detectors in dependency order (token identification
/// → trade scan → detectors) and writes one JSON-lines findings file per
/// detector plus summary.json. Two runs with identical config and dataset
/// produce byte-identical files; worker count only affects wall time.
inline RunSummary run(const RunConfig& config) {
    namespace fs = std::filesystem;
    for (const auto& d : config.detectors)
        if (!kKnownDetectors.contains(d)) throw ConfigError("unknown detector '" + d + "'");

    std::ifstream registry_in(config.registry_path);
    if (!registry_in) throw ConfigError("cannot open registry " + config.registry_path);
    Registry registry;
    try {
        registry = load_registry(registry_in);
    } catch (const RegistryError& e) {
        throw ConfigError("registry: " + std::string(e.what()));
    }

    std::ifstream dataset_in(config.dataset_path, std::ios::binary);
    if (!dataset_in) throw ConfigError("cannot open dataset " + config.dataset_path);
    std::vector<Block> blocks;
    try {
        blocks = read_dataset(dataset_in);
    } catch (const IngestError& e) {
        throw DataError("dataset: " + std::string(e.what()));
    }

    if (config.detectors.contains("cornering") && !config.thresholds.th_f)
        throw ConfigError("cornering requires --th-f (no default exists)");

    fs::create_directories(config.output_dir);
    const fs::path out_dir(config.output_dir);

    RunSummary summary;
    summary.blocks = blocks.size();
    for (const Block& b : blocks) summary.txns += b.txns.size();

    const TokenContractSet tokens = identify_token_contracts(blocks, &summary.diagnostics);
    const DetectorContext ctx = DetectorContext::from_registry(registry);

    const std::vector<TradeAction> actions = detail::map_blocks<TradeAction>(
        blocks, config.workers, [&](std::span<const Block> chunk) {
            return scan_trade_actions(chunk, registry, nullptr);
        });
    summary.trade_actions = actions.size();

    std::set<Hash32> flashbots;
    if (!config.flashbots_path.empty()) {
        std::ifstream in(config.flashbots_path);
        if (!in) throw ConfigError("cannot open flashbots list " + config.flashbots_path);
        flashbots = load_flashbots_list(in);
    }

    auto block_of = [&](uint64_t number) -> const Block& {
        auto it = std::lower_bound(blocks.begin(), blocks.end(), number,
                                   [](const Block& b, uint64_t n) { return b.number < n; });
        return *it;
    };

    auto emit_ordering = [&](const std::string& name, std::vector<OrderingFinding> findings) {
        std::vector<json> lines;
        lines.reserve(findings.size());
        for (const OrderingFinding& f : findings) {
            const auto cls = classify_channel(f, flashbots, block_of(f.block_number));
            lines.push_back(to_json(f, cls.channel));
        }
        detail::write_lines(out_dir / (name + ".jsonl"), lines);
        return findings;
    };

    for (const std::string& name : config.detectors) {
        detail::Stopwatch watch;
        uint64_t count = 0;
        if (name == "frontrun") {
            std::vector<OrderingFinding> all = detail::map_blocks<OrderingFinding>(
                blocks, config.workers, [&](std::span<const Block> chunk) {
                    auto chunk_actions = scan_trade_actions(chunk, registry, nullptr);
                    std::vector<OrderingFinding> found;
                    for (auto p : {OrderingPattern::kBuyBuy, OrderingPattern::kBuyCancel,
                                   OrderingPattern::kAcceptBidCancelBid,
                                   OrderingPattern::kPlaceBidAcceptBid}) {
                        auto part = detect_frontruns(chunk_actions, p, ctx);
                        found.insert(found.end(), part.begin(), part.end());
                    }
                    return found;
                });
            // canonical order: block, victim index, attacker index, pattern
            std::sort(all.begin(), all.end(), [](const OrderingFinding& a, const OrderingFinding& b) {
                return std::tuple(a.block_number, a.victim.txn_index, a.attacker.txn_index,
                                  a.pattern) < std::tuple(b.block_number, b.victim.txn_index,
                                                          b.attacker.txn_index, b.pattern);
            });
            auto findings = emit_ordering("frontrun", std::move(all));
            count = findings.size();
            std::vector<json> war_lines;
            for (const GasWarStat& s : gas_war_stats(findings, &summary.diagnostics))
                war_lines.push_back(to_json(s));
            detail::write_lines(out_dir / "gas_wars.jsonl", war_lines);
        } else if (name == "backrun") {
            count = emit_ordering("backrun", detect_backruns(actions, ctx)).size();
        } else if (name == "lossmin") {
            count = emit_ordering("lossmin", detect_loss_minimization(actions)).size();
        } else if (name == "instant-profit") {
            const HistoryIndex history = build_history_index(blocks);
            InstantProfitParams params;
            params.th_e = config.thresholds.th_e;
            params.exchange_allowlist = config.exchange_allowlist;
            params.native_equivalents = config.native_equivalents;
            auto findings = detail::map_blocks<ProfitFinding>(
                blocks, config.workers, [&](std::span<const Block> chunk) {
                    std::vector<ProfitFinding> found;
                    for (const Block& b : chunk)
                        for (const Txn& t : b.txns) {
                            if (t.status != TxnStatus::kSuccess) continue;
                            if (auto f = detect_instant_profit(t, tokens, history, params))
                                found.push_back(std::move(*f));
                        }
                    return found;
                });
            std::vector<json> lines;
            lines.reserve(findings.size());
            for (const auto& f : findings) lines.push_back(to_json(f));
            detail::write_lines(out_dir / "instant_profit.jsonl", lines);
            count = findings.size();
        } else if (name == "mint-evasion") {
            const auto transfers = collect_erc721_transfers(blocks, tokens);
            std::map<Address, std::vector<MintEvent>> mints;
            for (const auto& [contract, stream] : transfers) {
                try {
                    mints[contract] = track_collection(contract, stream).first;
                } catch (const LedgerError& e) {
                    report(&summary.diagnostics, "ledger_abort", e.what());
                }
            }
            const auto invocations = collect_mint_invocations(blocks, mints);
            std::vector<json> method_lines;
            std::vector<json> finding_lines;
            if (config.oracle_path.empty()) {
                report(&summary.diagnostics, "oracle_unavailable",
                       "no oracle configured; reporting touched methods without privilege labels");
                for (const MintInvocation& inv : invocations) {
                    MintMethod m;
                    m.contract = inv.contract;
                    m.selector = inv.selector;
                    method_lines.push_back(to_json(m));
                }
            } else {
                std::ifstream oin(config.oracle_path);
                if (!oin) throw ConfigError("cannot open oracle file " + config.oracle_path);
                ScriptedOracle oracle = ScriptedOracle::load(oin);
                std::vector<MintMethod> methods = identify_unprivileged_mints(invocations, oracle);
                for (size_t i = 0; i < methods.size(); ++i) {
                    if (!methods[i].privileged)
                        methods[i] = infer_mint_limit(methods[i], invocations[i], oracle,
                                                      config.thresholds.a_max,
                                                      &summary.diagnostics);
                    method_lines.push_back(to_json(methods[i]));
                }
                for (const EvasionFinding& f : detect_limit_evasion(blocks, mints, methods))
                    finding_lines.push_back(to_json(f));
            }
            detail::write_lines(out_dir / "mint_methods.jsonl", method_lines);
            detail::write_lines(out_dir / "mint_evasion.jsonl", finding_lines);
            count = finding_lines.size();
        } else if (name == "cornering") {
            const auto transfers = collect_erc721_transfers(blocks, tokens);
            std::vector<json> lines;
            for (const auto& [contract, stream] : transfers) {
                try {
                    for (const CorneringFinding& f :
                         detect_cornering(contract, stream, *config.thresholds.th_f,
                                          config.thresholds.th_t, config.cornering_excluded))
                        lines.push_back(to_json(f));
                } catch (const LedgerError& e) {
                    report(&summary.diagnostics, "ledger_abort", e.what());
                }
            }
            detail::write_lines(out_dir / "cornering.jsonl", lines);
            count = lines.size();
        }
        summary.detectors.push_back({name, count, watch.elapsed_ms()});
    }

    // summary.json carries counts only; wall times vary run to run and would
    // break byte-identical reruns.
    json js{{"blocks", summary.blocks},
            {"txns", summary.txns},
            {"trade_actions", summary.trade_actions},
            {"errors", summary.diagnostics.size()}};
    json det = json::object();
    for (const DetectorRun& d : summary.detectors) det[d.name] = d.findings;
    js["findings"] = det;
    std::ofstream sout(out_dir / "summary.json", std::ios::binary);
    sout << js.dump(2) << '\n';

    return summary;
}

}  // namespace nftlens
