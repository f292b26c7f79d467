#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "fixtures.hpp"
#include "osv/library_io.hpp"
#include "osv/weights.hpp"

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    const char* bin = std::getenv("OSV_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "OSV_BIN must point at the osv binary");
    const std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0)
        r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string temp_path(const char* tag, const char* ext) {
    static int counter = 0;
    return "/tmp/osv_cli_" + std::to_string(::getpid()) + "_" + tag + "_" +
           std::to_string(counter++) + ext;
}

std::string table1_file() {
    const auto path = temp_path("table1", ".jsonl");
    osv::library_save_file(testing::table1(), path);
    return path;
}

} // namespace

TEST_CASE("version and usage") {
    CHECK(run_cli("--version").out.rfind("osv", 0) == 0);
    CHECK(run_cli("--version").exit_code == 0);
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("align --no-such-flag x").exit_code == 1);
    CHECK(run_cli("weights --library x.jsonl").exit_code == 1); // missing required
}

TEST_CASE("align subcommand prints the gapped pair and score") {
    const auto r = run_cli("align --a efheh --b eheheg");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "efheh--\ne-heheg\nscore: 4\n");
}

TEST_CASE("weights subcommand derives 26 weights from the fixture") {
    const auto lib_path = table1_file();
    const auto out_path = temp_path("weights", ".json");
    const auto r = run_cli("weights --library " + lib_path +
                           " --method richness --scaler hyper --a 1 --c 10 --out " +
                           out_path);
    REQUIRE(r.exit_code == 0);
    const auto w = osv::weights_load_file(out_path);
    CHECK(w.length() == 26);
    CHECK(w.provenance.entropy_method == "richness");
    CHECK(w.weights[0] == 1.0);
    std::remove(lib_path.c_str());
    std::remove(out_path.c_str());
}

TEST_CASE("match subcommand reports index, distance and response") {
    const auto lib_path = table1_file();
    // base64 of {id:552,op:S,sn:Hossain}
    const auto r = run_cli("match --library " + lib_path +
                           " --request-b64 e2lkOjU1MixvcDpTLHNuOkhvc3NhaW59 "
                           "--strategy nw");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("index: 4\n") != std::string::npos);
    CHECK(r.out.find("distance: 0.125\n") != std::string::npos);

    SUBCASE("per-candidate table lands in the CSV file") {
        const auto csv_path = temp_path("cand", ".csv");
        run_cli("match --library " + lib_path +
                " --request-b64 e2lkOjU1MixvcDpTLHNuOkhvc3NhaW59 --candidates " +
                csv_path);
        std::ifstream csv(csv_path);
        std::string line;
        std::size_t lines = 0;
        bool header = false;
        while (std::getline(csv, line)) {
            if (lines == 0) header = line == "index,distance";
            ++lines;
        }
        CHECK(header);
        CHECK(lines == 9); // header + 8 candidates
        std::remove(csv_path.c_str());
    }

    SUBCASE("hash strategy reports exact hits and misses") {
        // base64 of {id:001,op:S,sn:Du}
        const auto hit = run_cli("match --library " + lib_path +
                                 " --request-b64 e2lkOjAwMSxvcDpTLHNuOkR1fQ== "
                                 "--strategy hash");
        CHECK(hit.out.find("index: 1\n") != std::string::npos);
        CHECK(hit.out.find("distance: exact\n") != std::string::npos);

        const auto miss = run_cli("match --library " + lib_path +
                                  " --request-b64 e2lkOjU1MixvcDpTLHNuOkhvc3NhaW59 "
                                  "--strategy hash");
        CHECK(miss.exit_code == 0);
        CHECK(miss.out.find("index: none\n") != std::string::npos);
        CHECK(miss.out.find("distance: none\n") != std::string::npos);
    }
    std::remove(lib_path.c_str());
}

TEST_CASE("generate emits a loadable library") {
    const auto path = temp_path("gen", ".jsonl");
    const auto r = run_cli("generate --kind fixed --n 25 --ops 4 --seed 9 --out " + path);
    REQUIRE(r.exit_code == 0);
    const auto lib = osv::library_load_file(path);
    CHECK(lib.size() == 25);
    CHECK(lib.at1(1).request.size() == 21);
    std::remove(path.c_str());
}

TEST_CASE("evaluate validates the fold count before running") {
    const auto r = run_cli("evaluate --dataset gen:fixed --n 5 --ops 2 --k 10 "
                           "--repeats 1 --strategies nw");
    CHECK(r.exit_code == 1);
}

TEST_CASE("evaluate writes a CSV report") {
    const auto path = temp_path("report", ".csv");
    const auto r = run_cli("evaluate --dataset gen:directory --n 30 --ops 2 "
                           "--gen-seed 4 --k 3 --repeats 2 --strategies nw "
                           "--report " + path);
    REQUIRE(r.exit_code == 0);
    std::ifstream csv(path);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "strategy,entropy_method,scaler,params,repeat,accuracy");
    std::string row;
    std::size_t rows = 0;
    while (std::getline(csv, row))
        ++rows;
    CHECK(rows == 2); // one per repeat
    std::remove(path.c_str());
}

TEST_CASE("a config file fills in flags and the command line wins") {
    const auto lib_path = table1_file();
    const auto cfg_path = temp_path("cfg", ".json");
    const auto out_path = temp_path("wout", ".json");
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"library":")" << lib_path
            << R"(","method":"shannon","scaler":"hyper","a":1,"c":10,"out":")"
            << out_path << R"("})";
    }
    // --method on the command line overrides the config's shannon
    const auto r =
        run_cli("weights --config " + cfg_path + " --method richness");
    REQUIRE(r.exit_code == 0);
    CHECK(osv::weights_load_file(out_path).provenance.entropy_method == "richness");
    std::remove(lib_path.c_str());
    std::remove(cfg_path.c_str());
    std::remove(out_path.c_str());
}
