#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "routechoice/cli.hpp"
#include "routechoice/geo.hpp"
#include "routechoice/io.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace routechoice;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("routechoice_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string fixture(const std::string& name) { return std::string(ROUTECHOICE_FIXTURES) + "/" + name; }

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
    return out;
}

std::size_t file_count(const fs::path& dir) {
    if (!fs::exists(dir)) return 0;
    return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator()));
}

}  // namespace

TEST_CASE("exit codes") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"--version"}).out == "0.1.0\n");
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"charges", "--flights", "x"}).code == 2);
    CHECK(run({"charges", "--flights", "x", "--zones", "y", "--airac", "1601", "--bogus"}).code == 2);
    const auto missing = run({"charges", "--flights", "/nonexistent/f.jsonl", "--zones", "/nonexistent/z.json",
                              "--airac", "1601"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("error:") != std::string::npos);
}

TEST_CASE("charges against a direct computation") {
    TempDir dir("charges");
    write_file_atomic(dir / "zones.json", R"({"type":"FeatureCollection","features":[
      {"type":"Feature","properties":{"id":"A","unit_rates":{"1601":50.0}},
       "geometry":{"type":"Polygon","coordinates":[[[0,0],[10,0],[10,10],[0,10],[0,0]]]}},
      {"type":"Feature","properties":{"id":"B","unit_rates":{"1601":80.0}},
       "geometry":{"type":"Polygon","coordinates":[[[10,0],[20,0],[20,10],[10,10],[10,0]]]}}]})");
    write_file_atomic(dir / "flights.jsonl",
                    R"({"flight_id":"F1","airline":"IBE","aircraft_mtow":80,"origin":"LEBL","destination":"EGLL",)"
                    R"("date":"2016-01-08","arrival_time":9.5,"regulated":false,)"
                    R"("trajectory":[[1.0,1.0,0,0],[1.0,5.0,35000,1800],[3.0,5.0,0,3600]]})"
                    "\n"
                    R"({"flight_id":"F2","airline":"IBE","aircraft_mtow":50,"origin":"LEBL","destination":"EGLL",)"
                    R"("date":"2016-01-08","arrival_time":9.5,"regulated":false,)"
                    R"("trajectory":[[2.0,12.0,0,0],[2.0,18.0,0,3600]]})"
                    "\n");
    const auto r = run({"charges", "--flights", dir / "flights.jsonl", "--zones", dir / "zones.json", "--airac",
                        "1601"});
    REQUIRE(r.code == 0);
    std::stringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "flight_id,weight_factor,A,B,total_eur");

    const double d1 = oracle::chord_distance_km({1, 1}, {1, 5}) + oracle::chord_distance_km({1, 5}, {3, 5});
    const double wf1 = std::sqrt(80.0 / 50.0);
    std::getline(lines, line);
    auto c = split_line(line);
    REQUIRE(c.size() == 5);
    CHECK(c[0] == "F1");
    CHECK(std::stod(c[1]) == doctest::Approx(wf1).epsilon(1e-6));
    CHECK(std::stod(c[2]) == doctest::Approx(50.0 * d1 / 100.0 * wf1).epsilon(1e-6));
    CHECK(std::stod(c[3]) == 0.0);
    CHECK(std::stod(c[4]) == doctest::Approx(50.0 * d1 / 100.0 * wf1).epsilon(1e-6));

    const double d2 = oracle::chord_distance_km({2, 12}, {2, 18});
    std::getline(lines, line);
    c = split_line(line);
    REQUIRE(c.size() == 5);
    CHECK(std::stod(c[1]) == 1.0);
    CHECK(std::stod(c[2]) == 0.0);
    CHECK(std::stod(c[3]) == doctest::Approx(80.0 * d2 / 100.0).epsilon(1e-6));

    // A rate missing for the cycle is an error, not a zero charge.
    CHECK(run({"charges", "--flights", dir / "flights.jsonl", "--zones", dir / "zones.json", "--airac", "1602"}).code ==
          1);

    const auto w = run({"charges", "--flights", dir / "flights.jsonl", "--zones", dir / "zones.json", "--airac",
                        "1601", "--out", dir / "out"});
    REQUIRE(w.code == 0);
    CHECK(read_text_file(dir / "out/charges.csv") == r.out);
    CHECK(fs::exists(dir / "out/manifest.json"));
}

TEST_CASE("failed commands leave no outputs") {
    TempDir dir("fail");
    REQUIRE(run({"synth", "--spec", fixture("four_corridors.json"), "--seed", "7", "--out", dir / "data"}).code == 0);
    // The OD filter matches nothing, so training fails after the inputs were read.
    write_file_atomic(dir / "config.json",
                    R"({"origins":["LFPG"],"destinations":["EGLL"],"training_airacs":["1601"],)"
                    R"("testing_airacs":["1602","1603"]})");
    const auto r = run({"train", "--flights", dir / "data/flights.jsonl", "--zones", dir / "data/zones.json", "--cask",
                        dir / "data/cask.csv", "--config", dir / "config.json", "--out", dir / "model"});
    CHECK(r.code == 1);
    CHECK(file_count(dir.path / "model") == 0);

    const auto v = run({"validate", "--model", dir / "missing", "--flights", dir / "data/flights.jsonl", "--zones",
                        dir / "data/zones.json", "--out", dir / "val"});
    CHECK(v.code == 1);
    CHECK(file_count(dir.path / "val") == 0);
}

TEST_CASE("repeated runs give identical outputs") {
    TempDir dir("determinism");
    for (const char* tag : {"a", "b"}) {
        const std::string d = dir / tag;
        REQUIRE(run({"synth", "--spec", fixture("four_corridors.json"), "--seed", "7", "--out", d + "/data"}).code ==
                0);
        REQUIRE(run({"cluster", "--flights", d + "/data/flights.jsonl", "--zones", d + "/data/zones.json", "--out",
                     d + "/clusters"})
                    .code == 0);
        REQUIRE(run({"--threads", "2", "segment", "--flights", d + "/data/flights.jsonl", "--cask",
                     d + "/data/cask.csv", "--seed", "3", "--out", d + "/segments"})
                    .code == 0);
    }
    std::size_t compared = 0;
    for (const char* sub : {"data", "clusters", "segments"}) {
        for (const auto& entry : fs::directory_iterator(dir.path / "a" / sub)) {
            const auto name = entry.path().filename().string();
            if (name == "manifest.json") continue;
            CHECK_MESSAGE(read_text_file(entry.path()) == read_text_file(dir.path / "b" / sub / name), name);
            ++compared;
        }
        CHECK(fs::exists(dir.path / "a" / sub / "manifest.json"));
    }
    CHECK(compared == 9);
}
