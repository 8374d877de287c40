#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "test_support.hpp"

namespace fs = std::filesystem;
using Catch::Approx;

namespace {

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("moranfrac_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args, const std::string& stdout_path = "/dev/null") {
    const std::string cmd =
        std::string(MORANFRAC_BIN) + " " + args + " > " + stdout_path + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string write_temp(const std::string& name, const std::string& content) {
    const fs::path p = work_dir() / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
}

struct Pgm {
    std::size_t width = 0, height = 0;
    std::string pixels;
};

Pgm read_pgm(const std::string& path) {
    const std::string bytes = mftest::read_file(path);
    Pgm p;
    REQUIRE(bytes.rfind("P5\n", 0) == 0);
    std::istringstream head(bytes.substr(3));
    int maxval = 0;
    head >> p.width >> p.height >> maxval;
    REQUIRE(maxval == 255);
    const std::size_t header_len = 3 + static_cast<std::size_t>(head.tellg()) + 1;
    p.pixels = bytes.substr(header_len);
    REQUIRE(p.pixels.size() == p.width * p.height);
    return p;
}

}  // namespace

TEST_CASE("cli validate: exit codes and report text") {
    const std::string out = (work_dir() / "validate.txt").string();
    SECTION("valid RSC example exits 0 and names the license") {
        REQUIRE(run("validate --config " + mftest::corpus_path("eg3.json"), out) == 0);
        const std::string text = mftest::read_file(out);
        CHECK(text.find("licensed: thm_mfa_via_RSC") != std::string::npos);
        CHECK(text.find("zeta: 0.860") != std::string::npos);
    }
    SECTION("probability sum violation exits 1") {
        const std::string bad = write_temp("badsum.json", R"({
          "patterns": [{"name": "P", "n": 2, "m": 2, "digits": [[0,0],[1,1]], "probs": [0.5, 0.6]}],
          "frequencies": {"P": [1, 1]}
        })");
        CHECK(run("validate --config " + bad) == 1);
    }
    SECTION("missing file exits 2") {
        CHECK(run("validate --config " + (work_dir() / "no_such_file.json").string()) == 2);
    }
    SECTION("malformed document exits 2") {
        const std::string bad = write_temp("malformed.json", "{ not json");
        CHECK(run("validate --config " + bad) == 2);
    }
    SECTION("usage error exits 2") {
        CHECK(run("validate") == 2);
        CHECK(run("frobnicate --config x") == 2);
    }
}

TEST_CASE("cli spectrum: csv contract") {
    const std::string carpet = mftest::corpus_path("mcmullen32.json");
    const std::string out = (work_dir() / "spec.csv").string();
    REQUIRE(run("spectrum --config " + carpet + " --alpha-steps 129 --out " + out) == 0);
    const std::string csv = mftest::read_file(out);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "# orientation: original");
    std::getline(lines, line);
    CHECK(line == "t,beta,alpha,H");
    std::size_t rows = 0;
    double max_h = 0.0;
    while (std::getline(lines, line)) {
        ++rows;
        double t, b, a, h;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &b, &a, &h) == 4);
        max_h = std::max(max_h, h);
    }
    CHECK(rows == 129);
    CHECK(max_h == Approx(1.3497).margin(5e-4));  // the dimension shows up as the peak

    SECTION("degenerate spectrum exits 1") {
        CHECK(run("spectrum --config " + mftest::corpus_path("diagonal.json") + " --out " +
                  (work_dir() / "deg.csv").string()) == 1);
    }
    SECTION("zeta > 1 records the transposed orientation") {
        const std::string out1b = (work_dir() / "spec1b.csv").string();
        REQUIRE(run("spectrum --config " + mftest::corpus_path("eg1b.json") +
                    " --alpha-steps 9 --out " + out1b) == 0);
        CHECK(mftest::read_file(out1b).rfind("# orientation: transposed", 0) == 0);
    }
    SECTION("svg output") {
        const std::string svg = (work_dir() / "spec.svg").string();
        REQUIRE(run("spectrum --config " + carpet + " --alpha-steps 9 --format svg --out " + svg) ==
                0);
        CHECK(mftest::read_file(svg).rfind("<svg", 0) == 0);
    }
}

TEST_CASE("cli sample: determinism and usage errors") {
    const std::string carpet = mftest::corpus_path("mcmullen32.json");
    const std::string out1 = (work_dir() / "s1.json").string();
    const std::string out2 = (work_dir() / "s2.json").string();
    const std::string args =
        " --t 1 --depth 300 --samples 500 --seed 42 --config " + carpet + " --out ";
    REQUIRE(run("sample" + args + out1) == 0);
    REQUIRE(run("sample" + args + out2) == 0);
    CHECK(mftest::read_file(out1) == mftest::read_file(out2));

    const auto rec = moranfrac::Json::parse(mftest::read_file(out1));
    CHECK(rec.at("target_alpha").get<double>() == Approx(1.3389).margin(5e-5));
    CHECK(rec.at("samples").get<int>() == 500);

    CHECK(run("sample --samples 0 --config " + carpet) == 2);

    SECTION("per-sample csv") {
        const std::string sout = (work_dir() / "ratios.csv").string();
        REQUIRE(run("sample --t 1 --depth 50 --samples 20 --seed 3 --config " + carpet +
                    " --out /dev/null --samples-out " + sout) == 0);
        const std::string csv = mftest::read_file(sout);
        CHECK(csv.rfind("index,ratio\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
    }
}

TEST_CASE("csv doubles round-trip exactly at 17 significant digits") {
    for (double x : {1.3389740945040154, -13.955977529132376, 0.0, 1.0 / 3.0, 5e-324,
                     0.74460358644106452, 1e300}) {
        const std::string s = moranfrac::detail::fmt17(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
}

TEST_CASE("cli render: pixel cap exits 1") {
    CHECK(run("render --depth 13 --mode set --config " + mftest::corpus_path("diagonal.json") +
              " --out " + (work_dir() / "big.pgm").string()) == 1);
}

TEST_CASE("cli enumerate: row counts") {
    const std::string out = (work_dir() / "enum.csv").string();
    REQUIRE(run("enumerate --depth 8 --config " + mftest::corpus_path("diagonal.json") + " --out " +
                out) == 0);
    const std::string csv = mftest::read_file(out);
    std::size_t rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    CHECK(rows == 257);  // header + 2^8 addresses
    CHECK(csv.rfind("k,l,i,j,log_mu\n", 0) == 0);

    SECTION("cap exceeded exits 1") {
        CHECK(run("enumerate --depth 8 --config " + mftest::corpus_path("diagonal.json") + " --out " +
                  out + " --env-unused", "/dev/null") == 2);  // unknown flag is usage
        setenv("MORANFRAC_ENUM_CAP", "10", 1);
        CHECK(run("enumerate --depth 8 --config " + mftest::corpus_path("diagonal.json") + " --out " +
                  out) == 1);
        unsetenv("MORANFRAC_ENUM_CAP");
    }
}

TEST_CASE("cli render: raster geometry") {
    SECTION("diagonal depth 8 fills one cell per column") {
        const std::string out = (work_dir() / "diag.pgm").string();
        REQUIRE(run("render --depth 8 --mode set --config " + mftest::corpus_path("diagonal.json") +
                    " --out " + out) == 0);
        const Pgm p = read_pgm(out);
        CHECK(p.width == 256);
        CHECK(p.height == 256);
        CHECK(std::count(p.pixels.begin(), p.pixels.end(), '\0') == 256);
    }
    SECTION("carpet depth 4 set mode has 54 filled cells on a 27x16 grid") {
        const std::string out = (work_dir() / "carpet.pgm").string();
        REQUIRE(run("render --depth 4 --mode set --config " + mftest::corpus_path("mcmullen32.json") +
                    " --out " + out) == 0);
        const Pgm p = read_pgm(out);
        CHECK(p.width == 27);
        CHECK(p.height == 16);
        CHECK(std::count(p.pixels.begin(), p.pixels.end(), '\0') == 54);
        // per-pattern diagram emitted alongside
        const Pgm d = read_pgm(out + ".C.pgm");
        CHECK(d.width == 3 * 32);
        CHECK(d.height == 2 * 32);
    }
    SECTION("uniform measure at l = k renders one gray level") {
        const std::string out = (work_dir() / "measure.pgm").string();
        REQUIRE(run("render --depth 6 --mode measure --config " +
                    mftest::corpus_path("diagonal.json") + " --out " + out) == 0);
        const Pgm p = read_pgm(out);
        std::set<char> levels(p.pixels.begin(), p.pixels.end());
        CHECK(levels == std::set<char>{'\0', '\xff'});  // one fill level plus background
    }
}

TEST_CASE("cli report: deterministic structured document") {
    const std::string out1 = (work_dir() / "r1.json").string();
    const std::string out2 = (work_dir() / "r2.json").string();
    const std::string eg1 = mftest::corpus_path("eg1.json");
    REQUIRE(run("report --config " + eg1 + " --out " + out1) == 0);
    REQUIRE(run("report --config " + eg1 + " --out " + out2) == 0);
    CHECK(mftest::read_file(out1) == mftest::read_file(out2));

    const auto rep = moranfrac::Json::parse(mftest::read_file(out1));
    CHECK(rep.at("zeta").get<double>() == Approx(0.9888).margin(5e-4));
    CHECK(rep.at("conditions").at("tbsc").at("holds").get<bool>());
    CHECK(rep.at("input_digest").get<std::string>().rfind("fnv1a64:", 0) == 0);
    CHECK(rep.at("checks").at("partition").at("base_residual").get<double>() <= 1e-12);

    SECTION("unlicensed systems carry the warning") {
        const std::string out3 = (work_dir() / "r3.json").string();
        REQUIRE(run("report --config " + mftest::corpus_path("unlicensed.json") + " --out " + out3) ==
                0);
        const auto rep3 = moranfrac::Json::parse(mftest::read_file(out3));
        REQUIRE(rep3.contains("warnings"));
        CHECK(rep3.at("warnings")[0].get<std::string>().find("unproven") != std::string::npos);
    }
}
