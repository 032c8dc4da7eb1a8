// Regenerates the bundled demo fixture files under fixtures/demo.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <support/demo_world.hpp>

namespace fs = std::filesystem;
using namespace nftlens;

int main(int argc, char** argv) {
    const fs::path out_dir = argc > 1 ? argv[1] : "fixtures/demo";
    fs::create_directories(out_dir);

    const auto world = fixtures::build_demo_world();
    {
        std::ofstream out(out_dir / "dataset.jsonl", std::ios::binary);
        write_dataset(world.blocks, out);
    }
    auto write_text = [&](const char* name, const std::string& content) {
        std::ofstream out(out_dir / name, std::ios::binary);
        out << content;
    };
    write_text("registry.json", fixtures::demo_registry_json() + "\n");
    write_text("oracle.json", fixtures::demo_oracle_json() + "\n");
    write_text("flashbots.txt", fixtures::demo_flashbots_list());
    write_text("stats.jsonl", fixtures::demo_stats_jsonl());
    write_text("fiat.csv", fixtures::demo_fiat_csv());
    write_text("manifest.json", world.manifest.dump(2) + "\n");
    write_text("demo.conf",
               "# nftlens config: keys are long option names, flags override these values\n"
               "dataset=fixtures/demo/dataset.jsonl\n"
               "registry=fixtures/demo/registry.json\n"
               "flashbots=fixtures/demo/flashbots.txt\n"
               "oracle=fixtures/demo/oracle.json\n"
               "th-f=1/2\n"
               "th-t=50\n"
               "native-equivalent=" + fixtures::kWeth.hex() + "\n");

    std::cout << "wrote demo fixtures to " << out_dir.string() << '\n';
    return 0;
}
