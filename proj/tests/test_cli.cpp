#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("moonlab_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CliRun moonlab(const std::string& args, const std::string& env = "") {
    const fs::path out = scratch() / "stdout";
    const fs::path err = scratch() / "stderr";
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" MOONLAB_CLI_PATH "' " + args + " >'" + out.string() +
                            "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

}  // namespace

TEST(Cli, SimulateParallelMean) {
    const CliRun r = moonlab("simulate --model linear --n 3 --m 1 --p 0 --samples 1000000 --seed 7");
    ASSERT_EQ(r.code, 0) << r.err;
    const Json doc = Json::parse(r.out);
    EXPECT_NEAR(doc["stats"]["mean"].get<double>(), 11.0 / 6.0, 0.006);
    EXPECT_EQ(doc["metadata"]["command"], "simulate");
    EXPECT_EQ(doc["metadata"]["config"]["seed"], 7);
}

TEST(Cli, SimulateTwoOfThreeMean) {
    const CliRun r = moonlab("simulate --m 2 --samples 1000000 --seed 7");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(Json::parse(r.out)["stats"]["mean"].get<double>(), 5.0 / 6.0, 0.003);
}

TEST(Cli, InvalidArchitectureIsUsageError) {
    const CliRun r = moonlab("simulate --n 3 --m 4");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("invalid m"), std::string::npos) << r.err;
    EXPECT_EQ(moonlab("simulate --p 1.5").code, 2);
    EXPECT_EQ(moonlab("simulate --model bogus").code, 2);
    EXPECT_EQ(moonlab("simulate --no-such-flag").code, 2);
    EXPECT_EQ(moonlab("sweep --p-grid 5 --p-list 0.1,0.2").code, 2);
}

TEST(Cli, ReproducibleExceptTimestamp) {
    const std::string args = "simulate --model marginal-ccf --p 0.3 --samples 50000 --seed 11";
    const CliRun a = moonlab(args);
    const CliRun b = moonlab(args, "MOONLAB_THREADS=3");
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    Json ja = Json::parse(a.out);
    Json jb = Json::parse(b.out);
    EXPECT_TRUE(ja["metadata"].contains("timestamp"));
    for (Json* j : {&ja, &jb}) {
        (*j)["metadata"].erase("timestamp");
        (*j)["metadata"].erase("threads");
    }
    EXPECT_EQ(ja.dump(), jb.dump());
}

TEST(Cli, SweepCsv) {
    const CliRun r = moonlab("sweep --model global-ccf --m 2 --samples 20000 --p-grid 20");
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    std::string line;
    int rows = 0;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("model,n,m,shape,scale,samples,seed,p,mean,", 0), 0u) << line;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 20);
}

TEST(Cli, SweepToFile) {
    const fs::path file = scratch() / "sweep.json";
    const CliRun r = moonlab("sweep --samples 5000 --p-list 0,0.5,1 --format json --out '" + file.string() + "'");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const Json doc = Json::parse(slurp(file));
    EXPECT_EQ(doc["points"].size(), 3u);
}

TEST(Cli, UnwritableOutputIsIoError) {
    EXPECT_EQ(moonlab("simulate --samples 1000 --out /nonexistent-dir/x.json").code, 3);
}

TEST(Cli, Oracle) {
    CliRun r = moonlab("oracle --model global-ccf --n 3 --m 3 --p 0.5 --t 1");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\"reliability\":0.208833254769653"), std::string::npos) << r.out;

    r = moonlab("oracle --model linear --n 3 --m 2 --p 0.5 --mean");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\"mean\":0.916666666666667"), std::string::npos) << r.out;

    r = moonlab("oracle --t 0");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(Json::parse(r.out)["reliability"], 1.0);
}

TEST(Cli, OracleUnsupportedMean) {
    const CliRun r = moonlab("oracle --model linear --shape 2 --p 0.5 --mean");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("unsupported"), std::string::npos) << r.err;
    EXPECT_EQ(moonlab("oracle --model linear --shape 2 --p 0.5 --mean --quadrature").code, 0);
    EXPECT_EQ(moonlab("oracle --p 0.5").code, 2);
}

TEST(Cli, ForcedScalarKernel) {
    const std::string args = "simulate --samples 20000 --seed 4 --p 0.2";
    const CliRun scalar = moonlab(args, "MOONLAB_KERNEL=scalar");
    ASSERT_EQ(scalar.code, 0) << scalar.err;
    Json js = Json::parse(scalar.out);
    EXPECT_EQ(js["metadata"]["kernel"], "scalar");
    Json jd = Json::parse(moonlab(args).out);
    for (Json* j : {&js, &jd}) {
        (*j)["metadata"].erase("timestamp");
        (*j)["metadata"].erase("kernel");
    }
    EXPECT_EQ(js.dump(), jd.dump());
    EXPECT_EQ(moonlab(args, "MOONLAB_KERNEL=sse9").code, 2);
}

TEST(Cli, SelftestCanaryFails) {
    const CliRun r = moonlab("selftest --canary --samples 100000");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, SelftestSmallRunPasses) {
    const CliRun r = moonlab("selftest --samples 100");
    EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, Version) {
    const CliRun r = moonlab("--version");
    EXPECT_EQ(r.code, 0);
    EXPECT_FALSE(r.out.empty());
}
