#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include <nftlens/findings_io.hpp>
#include <nftlens/ingest.hpp>
#include <support/demo_world.hpp>

using namespace nftlens;
using namespace nftlens::fixtures;
namespace fs = std::filesystem;

namespace {

struct CliWorld {
    fs::path dir;

    CliWorld() {
        dir = fs::temp_directory_path() / ("nftlens_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        const auto world = build_demo_world();
        std::ofstream out(dir / "dataset.jsonl", std::ios::binary);
        write_dataset(world.blocks, out);
        write("registry.json", demo_registry_json());
        write("oracle.json", demo_oracle_json());
        write("flashbots.txt", demo_flashbots_list());
        write("stats.jsonl", demo_stats_jsonl());
        write("fiat.csv", demo_fiat_csv());
    }
    ~CliWorld() { fs::remove_all(dir); }

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        out << content;
    }

    std::string file(const std::string& name) const { return (dir / name).string(); }
};

int run_cli(const std::string& args, const fs::path& capture) {
    const std::string cmd = std::string(NFTLENS_CLI_PATH) + " " + args + " >" + capture.string() +
                            " 2>" + capture.string() + ".err";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("cli: help exits clean") {
    CliWorld w;
    CHECK(run_cli("--help", w.dir / "help.txt") == 0);
    CHECK(slurp(w.dir / "help.txt").find("detect") != std::string::npos);
}

TEST_CASE("cli: detect all over the demo dataset") {
    CliWorld w;
    const std::string args = "detect all --dataset " + w.file("dataset.jsonl") + " --registry " +
                             w.file("registry.json") + " --oracle " + w.file("oracle.json") +
                             " --flashbots " + w.file("flashbots.txt") + " --th-f 1/2 --out " +
                             w.file("out") + " --native-equivalent " + kWeth.hex();
    REQUIRE(run_cli(args, w.dir / "detect.txt") == 0);
    const json summary = json::parse(slurp(w.dir / "out/summary.json"));
    const auto manifest = build_demo_world().manifest;
    CHECK(summary.at("findings") == manifest.at("findings"));
    CHECK(summary.at("trade_actions") == manifest.at("trade_actions"));
}

TEST_CASE("cli: missing registry exits with the config code") {
    CliWorld w;
    const std::string args = "detect frontrun --dataset " + w.file("dataset.jsonl") +
                             " --registry " + w.file("missing.json") + " --out " + w.file("out2");
    CHECK(run_cli(args, w.dir / "cfg.txt") == 2);
}

TEST_CASE("cli: corrupt dataset exits with the data code") {
    CliWorld w;
    w.write("bad.jsonl", "nope\n");
    const std::string args = "detect frontrun --dataset " + w.file("bad.jsonl") + " --registry " +
                             w.file("registry.json") + " --out " + w.file("out3");
    CHECK(run_cli(args, w.dir / "data.txt") == 3);
}

TEST_CASE("cli: cornering without th-f is a config error") {
    CliWorld w;
    const std::string args = "detect cornering --dataset " + w.file("dataset.jsonl") +
                             " --registry " + w.file("registry.json") + " --out " + w.file("out4");
    CHECK(run_cli(args, w.dir / "thf.txt") == 2);
}

TEST_CASE("cli: price quote from the stats file") {
    CliWorld w;
    const std::string args = "price --contract " + kNftAz.hex() +
                             " --as-of 1650010000 --stats " + w.file("stats.jsonl") + " --fiat " +
                             w.file("fiat.csv");
    REQUIRE(run_cli(args, w.dir / "price.txt") == 0);
    const json q = json::parse(slurp(w.dir / "price.txt"));
    CHECK(q.at("price") == to_dec(eth("2")));
    CHECK(q.at("price_eth") == "2");
    CHECK(q.at("price_usd") == "4000");
}

TEST_CASE("cli: speculative profit against a model price") {
    CliWorld w;
    const std::string args = "profit --buy-price " + to_dec(eth("0.16")) + " --current-price " +
                             to_dec(eth("14.36"));
    REQUIRE(run_cli(args, w.dir / "profit.txt") == 0);
    const json p = json::parse(slurp(w.dir / "profit.txt"));
    CHECK(p.at("profit_wei") == to_dec(eth("14.2")));
    CHECK(p.at("profit_eth") == "14.2");
}

TEST_CASE("cli: scan-trades and report round trip") {
    CliWorld w;
    const std::string scan_args = "scan-trades --dataset " + w.file("dataset.jsonl") +
                                  " --registry " + w.file("registry.json") + " --out " +
                                  w.file("out5");
    REQUIRE(run_cli(scan_args, w.dir / "scan.txt") == 0);
    REQUIRE(run_cli("report --format csv " + w.file("out5/trade_actions.jsonl"),
                    w.dir / "report.csv") == 0);
    REQUIRE(run_cli("report --format jsonl " + w.dir.string() + "/report.csv",
                    w.dir / "report.jsonl") == 0);
    std::istringstream original(slurp(w.dir / "out5/trade_actions.jsonl"));
    std::istringstream round_tripped(slurp(w.dir / "report.jsonl"));
    const auto a = parse_findings(original);
    const auto b = parse_findings(round_tripped);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("cli: table report renders") {
    CliWorld w;
    const std::string args = "detect frontrun --dataset " + w.file("dataset.jsonl") +
                             " --registry " + w.file("registry.json") + " --out " + w.file("out6");
    REQUIRE(run_cli(args, w.dir / "d6.txt") == 0);
    REQUIRE(run_cli("report --format table " + w.file("out6/frontrun.jsonl"),
                    w.dir / "table.txt") == 0);
    const std::string table = slurp(w.dir / "table.txt");
    CHECK(table.find("buy_buy") != std::string::npos);
}

TEST_CASE("cli: config file supplies defaults, flags override") {
    CliWorld w;
    w.write("run.conf",
            "dataset=" + w.file("dataset.jsonl") + "\nregistry=" + w.file("registry.json") +
                "\nth-f=1/2\nout=" + w.file("out_conf") + "\n");
    const std::string args = "detect cornering --config " + w.file("run.conf");
    REQUIRE(run_cli(args, w.dir / "conf.txt") == 0);
    const json summary = json::parse(slurp(w.dir / "out_conf/summary.json"));
    CHECK(summary.at("findings").at("cornering") == 2);

    // flag overrides the config's th-f; at 9/10 the whale (26/50) no longer
    // crosses, the bulk-mint evader (200/204) still does
    const std::string args2 = "detect cornering --config " + w.file("run.conf") + " --th-f 9/10" +
                              " --out " + w.file("out_conf2");
    REQUIRE(run_cli(args2, w.dir / "conf2.txt") == 0);
    const json summary2 = json::parse(slurp(w.dir / "out_conf2/summary.json"));
    CHECK(summary2.at("findings").at("cornering") == 1);
}

TEST_CASE("cli: identify-tokens writes the classification file") {
    CliWorld w;
    const std::string args = "identify-tokens --dataset " + w.file("dataset.jsonl") + " --out " +
                             w.file("out8");
    REQUIRE(run_cli(args, w.dir / "tokens.txt") == 0);
    const json tokens = json::parse(slurp(w.dir / "out8/tokens.json"));
    CHECK(tokens.at("erc721").size() == 8);
    CHECK(tokens.at("erc1155").empty());
}

TEST_CASE("cli: NFTLENS_DATA_DIR resolves bare filenames") {
    CliWorld w;
    const std::string args = "detect lossmin --dataset dataset.jsonl --registry registry.json "
                             "--out " + w.file("out7");
    const std::string cmd = "NFTLENS_DATA_DIR=" + w.dir.string() + " " + std::string(NFTLENS_CLI_PATH) +
                            " " + args + " >" + (w.dir / "env.txt").string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(rc));
    CHECK(WEXITSTATUS(rc) == 0);
    const json summary = json::parse(slurp(w.dir / "out7/summary.json"));
    CHECK(summary.at("findings").at("lossmin") == 1);
}
