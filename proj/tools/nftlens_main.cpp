// nftlens: forensic scanner for opportunistic NFT trading over exported
// Ethereum block datasets.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include <nftlens/pipeline.hpp>

namespace fs = std::filesystem;
using namespace nftlens;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

// Paths resolve against $NFTLENS_DATA_DIR when not found as given.
std::string resolve_data_path(const std::string& path) {
    if (path.empty() || fs::exists(path) || fs::path(path).is_absolute()) return path;
    if (const char* dir = std::getenv("NFTLENS_DATA_DIR")) {
        fs::path candidate = fs::path(dir) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
    return path;
}

std::optional<Ratio> parse_ratio(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const size_t slash = s.find('/');
    if (slash != std::string::npos) {
        Ratio r;
        r.num = std::stoull(s.substr(0, slash));
        r.den = std::stoull(s.substr(slash + 1));
        if (r.den == 0) return std::nullopt;
        return r;
    }
    const size_t dot = s.find('.');
    if (dot == std::string::npos) return Ratio{std::stoull(s), 1};
    const std::string whole = s.substr(0, dot);
    const std::string frac = s.substr(dot + 1);
    if (frac.size() > 9) return std::nullopt;
    uint64_t den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    return Ratio{std::stoull(whole.empty() ? "0" : whole) * den + std::stoull(frac), den};
}

std::set<Address> parse_addresses(const std::vector<std::string>& items) {
    std::set<Address> out;
    for (const auto& s : items) {
        auto a = Address::from_hex(s);
        if (!a) throw ConfigError("bad address: " + s);
        out.insert(*a);
    }
    return out;
}

std::vector<Block> load_blocks(const std::string& dataset) {
    std::ifstream in(resolve_data_path(dataset), std::ios::binary);
    if (!in) throw ConfigError("cannot open dataset " + dataset);
    return read_dataset(in);
}

void print_summary(const RunSummary& summary) {
    std::cout << "blocks: " << summary.blocks << "  txns: " << summary.txns
              << "  trade actions: " << summary.trade_actions << '\n';
    for (const DetectorRun& d : summary.detectors) {
        std::cout << "  " << d.name << ": " << d.findings << " finding"
                  << (d.findings == 1 ? "" : "s") << " (" << d.wall_ms << " ms)\n";
    }
    if (!summary.diagnostics.empty())
        std::cout << "  diagnostics: " << summary.diagnostics.size() << " (see stderr)\n";
    for (const Diagnostic& d : summary.diagnostics)
        std::cerr << "[" << d.code << "] " << d.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nftlens - NFT trade forensics over exported block datasets"};
    app.fallthrough();
    app.set_config("--config", "", "key=value config file; flags override file values");

    std::string dataset, registry, out_dir = "out";
    std::string flashbots, oracle, stats_path, fiat_path;
    unsigned workers = 1;
    Thresholds th;
    std::string th_f_raw;
    std::vector<std::string> native_eq, exchange_allow, corner_exclude;

    app.add_option("--dataset", dataset, "newline-delimited JSON block dataset")
        ->envname("NFTLENS_DATASET");
    app.add_option("--registry", registry, "marketplace descriptor registry (JSON)");
    app.add_option("--out", out_dir, "output directory for findings files");
    app.add_option("--workers", workers, "parallel block-batch workers");
    app.add_option("--flashbots", flashbots, "relay list, one txn hash per line");
    app.add_option("--oracle", oracle, "scripted replay oracle (JSON)");
    app.add_option("--stats", stats_path, "collection stats batches (JSON lines)");
    app.add_option("--fiat", fiat_path, "fiat feed CSV: timestamp,usd_rate");
    app.add_option("--th-e", th.th_e, "unique-sender cutoff for exchange-like addresses");
    app.add_option("--th-f", th_f_raw, "cornering supply fraction (e.g. 1/20 or 0.05)");
    app.add_option("--th-t", th.th_t, "cornering minimum total supply");
    app.add_option("--lookback-months", th.lookback_months, "pricing lookback window");
    app.add_option("--min-trades", th.min_trades, "pricing minimum trade count");
    app.add_option("--a-max", th.a_max, "mint-limit probe ceiling");
    app.add_option("--native-equivalent", native_eq, "erc20 contracts counted 1:1 as native");
    app.add_option("--exchange-allow", exchange_allow, "addresses never excluded as exchanges");
    app.add_option("--corner-exclude", corner_exclude, "escrow-style holders to ignore");

    auto* cmd_tokens = app.add_subcommand("identify-tokens", "classify token contracts from transfer logs");
    auto* cmd_scan = app.add_subcommand("scan-trades", "decode marketplace trade actions");
    auto* cmd_detect = app.add_subcommand("detect", "run detectors and write findings files");
    std::vector<std::string> detector_names;
    cmd_detect->add_option("detectors", detector_names,
                           "frontrun backrun lossmin instant-profit mint-evasion cornering | all")
        ->required();

    auto* cmd_price = app.add_subcommand("price", "speculative price quote for a collection");
    std::string price_contract;
    uint64_t as_of = 0;
    cmd_price->add_option("--contract", price_contract)->required();
    cmd_price->add_option("--as-of", as_of, "unix seconds")->required();

    auto* cmd_profit = app.add_subcommand("profit", "speculative profit of a held NFT");
    std::string buy_price_raw, current_price_raw, profit_contract;
    uint64_t profit_as_of = 0;
    cmd_profit->add_option("--buy-price", buy_price_raw, "wei")->required();
    cmd_profit->add_option("--current-price", current_price_raw, "wei; otherwise priced via --stats");
    cmd_profit->add_option("--contract", profit_contract);
    cmd_profit->add_option("--as-of", profit_as_of);

    auto* cmd_report = app.add_subcommand("report", "re-render findings files");
    std::string format = "table";
    std::vector<std::string> report_files;
    cmd_report->add_option("--format", format)->check(CLI::IsMember({"jsonl", "table", "csv"}));
    cmd_report->add_option("files", report_files, "findings files (.jsonl or .csv)")->required();

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*cmd_tokens) {
            const auto blocks = load_blocks(dataset);
            DiagnosticSink diags;
            const TokenContractSet tokens = identify_token_contracts(blocks, &diags);
            json j{{"erc721", json::array()}, {"erc1155", json::array()}, {"ambiguous", json::array()}};
            for (const auto& a : tokens.erc721) j["erc721"].push_back(a.hex());
            for (const auto& a : tokens.erc1155) j["erc1155"].push_back(a.hex());
            for (const auto& a : tokens.ambiguous) j["ambiguous"].push_back(a.hex());
            fs::create_directories(out_dir);
            std::ofstream out(fs::path(out_dir) / "tokens.json", std::ios::binary);
            out << j.dump(2) << '\n';
            std::cout << tokens.erc721.size() << " erc721, " << tokens.erc1155.size()
                      << " erc1155, " << tokens.ambiguous.size() << " ambiguous\n";
            for (const Diagnostic& d : diags) std::cerr << "[" << d.code << "] " << d.message << '\n';
        } else if (*cmd_scan) {
            const auto blocks = load_blocks(dataset);
            std::ifstream rin(resolve_data_path(registry));
            if (!rin) throw ConfigError("cannot open registry " + registry);
            const Registry reg = load_registry(rin);
            DiagnosticSink diags;
            const auto actions = scan_trade_actions(blocks, reg, &diags);
            fs::create_directories(out_dir);
            std::ofstream out(fs::path(out_dir) / "trade_actions.jsonl", std::ios::binary);
            for (const TradeAction& a : actions) out << to_json(a).dump() << '\n';
            std::cout << actions.size() << " trade actions\n";
            for (const Diagnostic& d : diags) std::cerr << "[" << d.code << "] " << d.message << '\n';
        } else if (*cmd_detect) {
            RunConfig cfg;
            cfg.dataset_path = resolve_data_path(dataset);
            cfg.registry_path = resolve_data_path(registry);
            cfg.output_dir = out_dir;
            cfg.flashbots_path = flashbots.empty() ? "" : resolve_data_path(flashbots);
            cfg.oracle_path = oracle.empty() ? "" : resolve_data_path(oracle);
            cfg.thresholds = th;
            if (!th_f_raw.empty()) {
                cfg.thresholds.th_f = parse_ratio(th_f_raw);
                if (!cfg.thresholds.th_f) throw ConfigError("bad --th-f value: " + th_f_raw);
            }
            cfg.workers = workers;
            cfg.native_equivalents = parse_addresses(native_eq);
            cfg.exchange_allowlist = parse_addresses(exchange_allow);
            cfg.cornering_excluded = parse_addresses(corner_exclude);
            for (const auto& d : detector_names) {
                if (d == "all")
                    cfg.detectors = kKnownDetectors;
                else
                    cfg.detectors.insert(d);
            }
            print_summary(run(cfg));
        } else if (*cmd_price) {
            std::ifstream sin(resolve_data_path(stats_path));
            if (!sin) throw ConfigError("cannot open stats " + stats_path);
            const StatsStore stats = StatsStore::load(sin);
            auto contract = Address::from_hex(price_contract);
            if (!contract) throw ConfigError("bad contract address");
            const PriceQuote q =
                speculative_price(*contract, as_of, stats, th.lookback_months, th.min_trades);
            json j = to_json(q);
            j["price_eth"] = format_eth(q.price);
            if (!fiat_path.empty()) {
                std::ifstream fin(resolve_data_path(fiat_path));
                if (!fin) throw ConfigError("cannot open fiat feed " + fiat_path);
                j["price_usd"] = to_usd(q.price, as_of, FiatFeed::load(fin)).str();
            }
            std::cout << j.dump(2) << '\n';
        } else if (*cmd_profit) {
            auto buy = bigint_from_dec(buy_price_raw);
            if (!buy || *buy < 0) throw ConfigError("bad --buy-price");
            Wei current;
            if (!current_price_raw.empty()) {
                auto c = bigint_from_dec(current_price_raw);
                if (!c || *c < 0) throw ConfigError("bad --current-price");
                current = *c;
            } else {
                if (profit_contract.empty() || stats_path.empty())
                    throw ConfigError("profit needs --current-price or --contract/--as-of/--stats");
                std::ifstream sin(resolve_data_path(stats_path));
                if (!sin) throw ConfigError("cannot open stats " + stats_path);
                auto contract = Address::from_hex(profit_contract);
                if (!contract) throw ConfigError("bad contract address");
                current = speculative_price(*contract, profit_as_of, StatsStore::load(sin),
                                            th.lookback_months, th.min_trades)
                              .price;
            }
            const SignedWei profit = speculative_profit(*buy, current);
            json j{{"buy_price_wei", to_dec(*buy)},
                   {"current_price_wei", to_dec(current)},
                   {"profit_wei", to_dec(profit)},
                   {"profit_eth", format_eth(profit)}};
            std::cout << j.dump(2) << '\n';
        } else if (*cmd_report) {
            std::vector<json> findings;
            for (const auto& file : report_files) {
                std::ifstream in(resolve_data_path(file), std::ios::binary);
                if (!in) throw ConfigError("cannot open findings file " + file);
                std::vector<json> part = file.ends_with(".csv") ? parse_csv(in) : parse_findings(in);
                findings.insert(findings.end(), std::make_move_iterator(part.begin()),
                                std::make_move_iterator(part.end()));
            }
            if (format == "jsonl")
                render_jsonl(findings, std::cout);
            else if (format == "csv")
                render_csv(findings, std::cout);
            else
                render_table(std::move(findings), std::cout);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const RegistryError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NoDataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NoRateError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const IngestError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const MalformedFinding& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}
