// End-to-end checks of the command-line tool, run against the real binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "dwiseg/volume_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kCli = DWISEG_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("dwiseg-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

int run(const std::string& args, const fs::path& err_file = {}) {
    std::string cmd = std::string(kCli) + " " + args + " > /dev/null";
    cmd += err_file.empty() ? " 2> /dev/null" : " 2> " + err_file.string();
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("stage-by-stage workflow on a small grid") {
    TempDir tmp;
    const std::string d = tmp.path.string();

    REQUIRE(run("phantom --out " + d + "/ph --grid 64x64x12 --roi-out " + d + "/rois") == 0);
    REQUIRE(run("synth --phantom " + d + "/ph --out " + d + "/dwi --noise rician --snr 20"
                " --seed 5") == 0);
    REQUIRE(run("adc --in " + d + "/dwi --out " + d + "/adc") == 0);
    REQUIRE(run("train --model poly --in " + d + "/dwi --out " + d + "/poly.json"
                " --roi-csf " + d + "/rois/csf --roi-matter " + d + "/rois/matter"
                " --roi-background " + d + "/rois/background --slices 7 --seed 3") == 0);
    REQUIRE(run("classify --model " + d + "/poly.json --in " + d + "/dwi --out " + d +
                "/truth") == 0);
    REQUIRE(run("train --model fcm --in " + d + "/adc --out " + d + "/fcm.json --seed 4") == 0);
    REQUIRE(run("classify --model " + d + "/fcm.json --in " + d + "/adc --out " + d +
                "/fcm_labels") == 0);

    // Truth against itself: perfect agreement.
    REQUIRE(run("evaluate --truth " + d + "/truth --pred " + d + "/truth --out " + d +
                "/self.json") == 0);
    json self = json::parse(slurp(tmp.path / "self.json"));
    CHECK(self["prediction"]["kappa"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(self["prediction"]["phi"].get<double>() == 1.0);

    REQUIRE(run("evaluate --truth " + d + "/truth --pred " + d + "/fcm_labels --out " + d +
                "/fcm_eval.json --kappa-literal") == 0);
    json fcm_eval = json::parse(slurp(tmp.path / "fcm_eval.json"));
    CHECK(fcm_eval["prediction"]["kappa"].get<double>() < 1.0);
    CHECK(fcm_eval["prediction"].contains("kappa_literal"));

    // Rendered label slices stay on the three-level gray map.
    REQUIRE(run("render --in " + d + "/truth --slice 6 --out " + d + "/truth.pgm") == 0);
    std::string pgm = slurp(tmp.path / "truth.pgm");
    REQUIRE(pgm.substr(0, 3) == "P5\n");
    std::size_t header_end = pgm.find("255\n") + 4;
    for (std::size_t i = header_end; i < pgm.size(); ++i) {
        unsigned char v = static_cast<unsigned char>(pgm[i]);
        CHECK((v == 0 || v == 128 || v == 255));
    }
}

TEST_CASE("pipeline without a seed is refused") {
    TempDir tmp;
    fs::path err = tmp.path / "err.txt";
    int code = run("pipeline --out " + (tmp.path / "out").string(), err);
    CHECK(code == 2);
    std::string message = slurp(err);
    CHECK(message.find("error: usage:") != std::string::npos);
    CHECK(message.find("--seed") != std::string::npos);
}

TEST_CASE("runtime failures carry a machine-parsable category") {
    TempDir tmp;
    fs::path err = tmp.path / "err.txt";
    int code = run("adc --in " + (tmp.path / "missing").string() + " --out " +
                       (tmp.path / "o").string(),
                   err);
    CHECK(code == 1);
    std::string message = slurp(err);
    CHECK(message.rfind("error: io-error:", 0) == 0);
    CHECK(std::count(message.begin(), message.end(), '\n') == 1);

    code = run("render --in " + (tmp.path / "missing").string() + " --slice 0 --out " +
                   (tmp.path / "x.pgm").string(),
               err);
    CHECK(code == 1);
}

TEST_CASE("pipeline artifacts are byte-identical across reruns") {
    TempDir tmp;
    const std::string d = tmp.path.string();
    REQUIRE(run("pipeline --out " + d + "/a --seed 11 --grid 64x64x12") == 0);
    REQUIRE(run("pipeline --out " + d + "/b --seed 11 --grid 64x64x12") == 0);

    int compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(tmp.path / "a")) {
        if (!entry.is_regular_file())
            continue;
        fs::path rel = fs::relative(entry.path(), tmp.path / "a");
        CAPTURE(rel.string());
        CHECK(slurp(entry.path()) == slurp(tmp.path / "b" / rel));
        ++compared;
    }
    CHECK(compared > 10);

    // A different seed must change the synthesized data.
    REQUIRE(run("pipeline --out " + d + "/c --seed 12 --grid 64x64x12") == 0);
    CHECK(slurp(tmp.path / "a" / "dwi" / "data.raw") !=
          slurp(tmp.path / "c" / "dwi" / "data.raw"));
}
