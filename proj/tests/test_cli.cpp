#include "commands.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using nfcli::run_cli;
using normality::Rational;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(const std::vector<std::string>& args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    int code = run_cli(args, in, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("nfcli-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::string slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        rows.push_back(cells);
    }
    return rows;
}

std::string digit_file(unsigned base, const std::vector<unsigned>& digits) {
    std::ostringstream os;
    os << "nfdig/1 base=" << base << "\n";
    for (std::size_t i = 0; i < digits.size(); ++i) {
        os << digits[i];
        os << ((i + 1) % 64 == 0 || i + 1 == digits.size() ? "\n" : " ");
    }
    return os.str();
}

}  // namespace

TEST_CASE("decimal rendering") {
    using nfcli::format_decimal;
    CHECK(format_decimal(Rational(1, 2)) == "0.5");
    CHECK(format_decimal(Rational(0)) == "0");
    CHECK(format_decimal(Rational(1)) == "1");
    CHECK(format_decimal(Rational(1, 3)) == "0.333333333333");
    CHECK(format_decimal(Rational(2, 3)) == "0.666666666667");
    // Exact ties go to the even neighbour.
    CHECK(format_decimal(Rational(1, 8), 2) == "0.12");
    CHECK(format_decimal(Rational(3, 8), 2) == "0.38");
    CHECK(format_decimal(Rational(5, 8), 2) == "0.62");
    CHECK(format_decimal(Rational(1, 1024), 3) == "0.000977");
    CHECK(format_decimal(Rational(1, 1000000)) == "0.000001");
}

TEST_CASE("checkpoints") {
    using V = std::vector<std::uint64_t>;
    CHECK(nfcli::geometric_checkpoints(1000, 64, 2) == V{64, 128, 256, 512, 1000});
    CHECK(nfcli::geometric_checkpoints(512, 64, 2) == V{64, 128, 256, 512});
    CHECK(nfcli::geometric_checkpoints(10, 64, 2) == V{10});
    CHECK(nfcli::geometric_checkpoints(0, 64, 2).empty());
    CHECK(nfcli::linear_checkpoints(2500, 1000) == V{1000, 2000, 2500});
    CHECK(nfcli::linear_checkpoints(3000, 1000) == V{1000, 2000, 3000});
}

TEST_CASE("config parsing") {
    auto kv = nfcli::parse_config("# defaults\nstages = 12\n  cap_ell=32  # inline\n\nseed = 7\n");
    REQUIRE(kv.size() == 3);
    CHECK(kv[0] == std::pair<std::string, std::string>{"stages", "12"});
    CHECK(kv[1] == std::pair<std::string, std::string>{"cap_ell", "32"});
    CHECK(kv[2] == std::pair<std::string, std::string>{"seed", "7"});
    CHECK_THROWS(nfcli::parse_config("no equals sign\n"));
}

TEST_CASE("bounds") {
    Result l = run({"bounds", "leveque", "--eps", "1"});
    CHECK(l.code == 0);
    CHECK(l.out.find("T = {1,2}") != std::string::npos);
    CHECK(l.out.find("0.2056") != std::string::npos);
    Result p = run({"bounds", "padding", "--s0", "3", "--s1", "2"});
    CHECK(p.code == 0);
    CHECK(p.out.find("padding = 8") != std::string::npos);
    Result e = run({"bounds", "ell", "--R", "2", "--s", "3", "--k", "1", "--eps", "1/2", "--c", "1/100"});
    CHECK(e.code == 0);
    CHECK(e.out.find("report-only") != std::string::npos);
    CHECK(run({"bounds", "padding", "--s0", "1", "--s1", "2"}).code == 2);
    CHECK(run({"bounds", "leveque", "--eps", "banana"}).code == 2);
    CHECK(run({"bounds", "nosuch"}).code == 2);
}

TEST_CASE("construct writes deterministic run files") {
    TempDir d;
    const std::vector<std::string> args{"construct", "thm5", "--R", "2", "--S", "3", "--stages", "12", "--mode", "desk",
                                        "--cap-ell", "64", "--seed", "7", "--out"};
    auto a = args, b = args;
    a.push_back(d / "a.nfr");
    b.push_back(d / "b.nfr");
    Result ra = run(a), rb = run(b);
    REQUIRE(ra.code == 0);
    REQUIRE(rb.code == 0);
    CHECK(ra.out.find("capped") != std::string::npos);
    const std::string text = slurp(d / "a.nfr");
    CHECK(text.rfind("nfrun/1", 0) == 0);
    CHECK(text == slurp(d / "b.nfr"));

    // Resume equals the uninterrupted run.
    auto head = args;
    head[7] = "5";
    head.push_back(d / "head.nfr");
    REQUIRE(run(head).code == 0);
    Result rc = run({"construct", "thm5", "--resume", d / "head.nfr", "--stages", "12", "--out", d / "c.nfr"});
    REQUIRE(rc.code == 0);
    CHECK(slurp(d / "c.nfr") == text);

    // Config file supplies defaults; flags beat it.
    std::ofstream(d / "cfg.txt") << "R = 2\nS = 3\nstages = 12\ncap_ell = 64\nseed = 3\n";
    REQUIRE(run({"--config", d / "cfg.txt", "construct", "thm5", "--seed", "7", "--out", d / "cfg.nfr"}).code == 0);
    CHECK(slurp(d / "cfg.nfr") == text);
    std::ofstream(d / "bad.txt") << "colour = blue\n";
    CHECK(run({"--config", d / "bad.txt", "construct", "thm5", "--out", d / "x.nfr"}).code == 2);

    // Digit files.
    Result rd = run({"construct", "thm5", "--resume", d / "a.nfr", "--stages", "12", "--out", d / "a2.nfr",
                     "--digits-base", "2,3", "--digits-out", d / "digits.{base}"});
    REQUIRE(rd.code == 0);
    CHECK(slurp(d / "digits.2").rfind("nfdig/1 base=2\n", 0) == 0);
    CHECK(slurp(d / "digits.3").rfind("nfdig/1 base=3\n", 0) == 0);
}

TEST_CASE("construct thm4 writes an f-trace") {
    TempDir d;
    Result r = run({"construct", "thm4", "--s", "3", "--g", "log2", "--stages", "6", "--mode", "desk", "--cap-ell", "64",
                    "--out", d / "t4.nfr"});
    REQUIRE(r.code == 0);
    auto rows = csv_rows(slurp(d / "t4.nfr.ftrace.csv"));
    REQUIRE(rows.size() == 8);
    CHECK(rows[0] == std::vector<std::string>{"n", "f", "m0"});
}

TEST_CASE("construct input and budget errors") {
    TempDir d;
    CHECK(run({"construct", "thm5", "--R", "2", "--S", "4", "--out", d / "x.nfr"}).code == 2);
    CHECK(run({"construct", "thm5", "--R", "2", "--S", "2", "--out", d / "x.nfr"}).code == 2);
    CHECK(run({"construct", "thm4", "--s", "1", "--out", d / "x.nfr"}).code == 2);
    CHECK(run({"construct", "thm2", "--oracle", "maybe", "--out", d / "x.nfr"}).code == 2);
    CHECK(run({"construct", "thm5", "--resume", d / "missing.nfr", "--out", d / "x.nfr"}).code == 2);
    // Faithful lengths exceed anything executable.
    CHECK(run({"construct", "thm5", "--R", "2", "--S", "3", "--mode", "faithful", "--stages", "1", "--out", d / "x.nfr"})
              .code == 4);
    // No partial file is left behind.
    CHECK_FALSE(fs::exists(d / "x.nfr"));
    CHECK(run({"construct"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("analyze") {
    TempDir d;
    // All zeros: simple discrepancy is 1/2 at every checkpoint.
    std::ofstream(d / "zeros.nfd") << digit_file(2, std::vector<unsigned>(1000, 0));
    Result z = run({"analyze", d / "zeros.nfd", "--bases", "2"});
    REQUIRE(z.code == 0);
    auto rows = csv_rows(z.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"N", "base", "star", "extreme", "simple", "block_C", "block_ell"});
    std::uint64_t prevN = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 7);
        CHECK(std::stoull(rows[i][0]) > prevN);
        prevN = std::stoull(rows[i][0]);
        CHECK(rows[i][1] == "2");
        CHECK(rows[i][4] == "0.5");
        CHECK(rows[i][5].empty());
        CHECK(rows[i][6].empty());
    }
    CHECK(prevN == 1000);

    // Exact rationals and block discrepancy columns.
    Result ex = run({"analyze", d / "zeros.nfd", "--bases", "2", "--exact", "--block-ell", "2"});
    REQUIRE(ex.code == 0);
    auto erows = csv_rows(ex.out);
    CHECK(erows[1][4] == "1/2");
    // occ(00) = 63 of 64 positions: 63/64 - 1/4.
    CHECK(erows[1][5] == "47/64");
    CHECK(erows[1][6] == "2");

    // Champernowne in base 10 from stdin: star discrepancy falls across geometric checkpoints.
    std::vector<unsigned> champ;
    for (unsigned n = 1; champ.size() < 10000; ++n)
        for (char c : std::to_string(n)) champ.push_back(static_cast<unsigned>(c - '0'));
    champ.resize(10000);
    Result c = run({"analyze", "-", "--bases", "10", "--extreme-cap", "0"}, digit_file(10, champ));
    REQUIRE(c.code == 0);
    auto crows = csv_rows(c.out);
    REQUIRE(crows.size() >= 5);
    CHECK(std::stod(crows.back()[2]) < std::stod(crows[1][2]));
    CHECK(std::stod(crows.back()[2]) < std::stod(crows[crows.size() / 2][2]));
    for (std::size_t i = 1; i < crows.size(); ++i) CHECK(crows[i][3].empty());

    // Malformed input.
    std::ofstream(d / "bad.nfd") << "nfdig/1 base=2\n0 1 2\n";
    CHECK(run({"analyze", d / "bad.nfd", "--bases", "2"}).code == 2);
    std::ofstream(d / "junk.txt") << "hello\n";
    CHECK(run({"analyze", d / "junk.txt"}).code == 2);
}

TEST_CASE("analyze run files per stage") {
    TempDir d;
    REQUIRE(run({"construct", "thm5", "--R", "2", "--S", "3", "--stages", "6", "--cap-ell", "48", "--out", d / "r.nfr"})
                .code == 0);
    Result a = run({"analyze", d / "r.nfr", "--bases", "3", "--per-stage"});
    REQUIRE(a.code == 0);
    auto rows = csv_rows(a.out);
    CHECK(rows.size() >= 4);
    Result a2 = run({"analyze", d / "r.nfr", "--bases", "3", "--per-stage", "--out", d / "trace.csv"});
    REQUIRE(a2.code == 0);
    CHECK(slurp(d / "trace.csv") == a.out);
}

TEST_CASE("verify suites") {
    Result ok = run({"verify", "basechange", "--n", "200"});
    CHECK(ok.code == 0);
    Result alias = run({"verify", "lemma31", "--n", "300"});
    CHECK(alias.code == 0);
    CHECK(run({"verify", "partition", "--n", "300"}).out == alias.out);
    Result survey = run({"verify", "survey", "--R", "2", "--s", "3", "--ell", "12", "--exhaustive"});
    CHECK(survey.code == 0);
    CHECK(survey.out.find("fraction") != std::string::npos);
    Result defect = run({"verify", "base4-defect", "--N", "10"});
    CHECK(defect.code == 0);
    CHECK(defect.out.find("3/4") != std::string::npos);
    CHECK(run({"verify", "nosuch"}).code == 2);
}
