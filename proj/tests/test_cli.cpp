#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "adiafactor/io.hpp"

namespace fs = std::filesystem;
using namespace adiafactor;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(ADIAFACTOR_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("adiafactor_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST(Cli, EncodeWritesLayoutAndPauliTerms) {
    const fs::path dir = scratch("encode");
    ASSERT_EQ(run("encode --n 21 --out " + dir.string()), 0);
    const io::CsvTable layout = io::read_csv_file((dir / "layout.csv").string());
    EXPECT_EQ(layout.rows.front(), (std::vector<std::string>{"1", "2", "3"}));
    const PauliZExpansion pz = io::pauli_from_csv(io::read_csv_file((dir / "pauli_z.csv").string()), 3);
    EXPECT_EQ(pz.coefficient(0), 210);
    EXPECT_EQ(pz.coefficient(7), -16);
    EXPECT_TRUE(fs::exists(dir / "costs.csv"));
    ASSERT_EQ(run("encode --n 21 --format json --out " + dir.string()), 0);
    EXPECT_EQ(io::read_json_file((dir / "encode.json").string())["layout"]["n"], 3);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("encode --n 22"), 2);
    EXPECT_EQ(run("encode --n 23"), 2);
    EXPECT_EQ(run("encode --n banana"), 2);
    EXPECT_EQ(run("evolve --n 21 --mode sideways"), 2);
    EXPECT_EQ(run("scaling --n 3 --window 0.5,0.4"), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    const fs::path dir = scratch("drift");
    EXPECT_EQ(run("evolve --n 143 --time 0.5 --alpha 0.5 --out " + dir.string()), 3);
}

TEST(Cli, ShowcaseArtifacts) {
    const fs::path dir = scratch("showcase");
    ASSERT_EQ(run("showcase --out " + dir.string()), 0);
    const auto summary = io::read_json_file((dir / "summary.json").string());
    EXPECT_EQ(summary["target_label"], "111");
    EXPECT_GE(summary["continuous"]["fidelity"].get<double>(), 0.8);
    const io::CsvTable sweep = io::read_csv_file((dir / "spectrum.csv").string());
    EXPECT_EQ(sweep.rows.size(), 101u);
    EXPECT_EQ(sweep.header.size(), 9u);
    const io::CsvTable pops = io::read_csv_file((dir / "populations.csv").string());
    EXPECT_EQ(pops.rows.size(), (6u + 7u) * 8u);
}

TEST(Cli, ReproduceLineRegeneratesOutput) {
    const fs::path dir = scratch("reproduce");
    ASSERT_EQ(run("showcase --grid 5 --out " + (dir / "a").string()), 0);
    const io::CsvTable first = io::read_csv_file((dir / "a" / "spectrum.csv").string());
    std::string line;
    for (const auto& p : first.preamble) {
        if (p.rfind("reproduce: adiafactor ", 0) == 0) line = p.substr(std::string("reproduce: adiafactor ").size());
    }
    ASSERT_FALSE(line.empty());
    ASSERT_EQ(run(line + " --out " + (dir / "b").string()), 0);
    EXPECT_EQ(slurp(dir / "a" / "spectrum.csv"), slurp(dir / "b" / "spectrum.csv"));
    EXPECT_EQ(slurp(dir / "a" / "populations.csv"), slurp(dir / "b" / "populations.csv"));
}

TEST(Cli, ScalingIsByteIdenticalUnderFixedSeed) {
    const fs::path a = scratch("scaling_a");
    const fs::path b = scratch("scaling_b");
    ASSERT_EQ(run("scaling --n 2,3,5 --samples 3 --window 0.3,0.31 --seed 17 --threads 1 --out " + a.string()), 0);
    ASSERT_EQ(run("scaling --n 2,3,5 --samples 3 --window 0.3,0.31 --seed 17 --threads 2 --out " + b.string()), 0);
    EXPECT_EQ(slurp(a / "scaling.csv"), slurp(b / "scaling.csv"));
    EXPECT_EQ(slurp(a / "fit.json"), slurp(b / "fit.json"));
    EXPECT_FALSE(io::read_json_file((a / "fit.json").string())["fit"].is_null());
}

TEST(Cli, ScalingThreeQubitUsesBothInstances) {
    const fs::path dir = scratch("scaling3");
    ASSERT_EQ(run("scaling --n 3 --samples 2 --out " + dir.string()), 0);
    const auto records = io::scaling_records_from_csv(io::read_csv_file((dir / "scaling.csv").string()));
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].N + records[1].N, 36u);
    const auto fit = io::read_json_file((dir / "fit.json").string());
    EXPECT_TRUE(fit["fit"].is_null());
    EXPECT_EQ(fit["means"][0]["available"], 2);
}

TEST(Cli, ScalingShortfallFlagged) {
    const fs::path dir = scratch("shortfall");
    ASSERT_EQ(run("scaling --n 2 --samples 3 --window 0.3,0.31 --out " + dir.string()), 0);
    const auto fit = io::read_json_file((dir / "fit.json").string());
    EXPECT_EQ(fit["means"][0]["available"], 1);
    EXPECT_TRUE(fit["means"][0]["shortfall"].get<bool>());
}

TEST(Cli, WindowBelowUniformProbabilityIsConfigError) {
    EXPECT_EQ(run("scaling --n 2 --samples 1 --out " + scratch("below").string()), 2);
}
