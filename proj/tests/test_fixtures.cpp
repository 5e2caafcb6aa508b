#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "geosep/eval.hpp"
#include "geosep/separation.hpp"
#include "geosep/shearlets.hpp"
#include "geosep/synth.hpp"

using namespace geosep;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// FNV-1a over the raw bytes of the doubles.
std::string fingerprint(const RasterImage& img) {
    std::uint64_t h = 1469598103934665603ull;
    for (double v : img.values()) {
        unsigned char b[sizeof v];
        std::memcpy(b, &v, sizeof v);
        for (unsigned char c : b) {
            h ^= c;
            h *= 1099511628211ull;
        }
    }
    std::ostringstream s;
    s << std::hex << h;
    return s.str();
}

struct Outputs {
    std::map<std::string, RasterImage> images;
    std::map<std::string, double> scalars;
};

Phantom phantom_from(const json& in) {
    const std::size_t n = in.at("size");
    return gen_phantom(n, n, default_point_scene(n, n), default_curve_scene(n, n), in.at("noise_sigma"),
                       in.at("seed"));
}

Outputs produce(const json& fixture) {
    const auto& in = fixture.at("input");
    const std::string kind = fixture.at("kind");
    Outputs out;
    if (kind == "phantom") {
        const auto ph = phantom_from(in);
        out.images = {{"I", ph.image}, {"P", ph.points}, {"C", ph.curves}};
        out.scalars = {{"sum_P", sum(ph.points)}, {"sum_C", sum(ph.curves)}, {"max_I", max_value(ph.image)}};
    } else if (kind == "filter_bank") {
        const std::size_t n = in.at("size");
        const auto fb = frame_bounds(build_filter_bank(n, n));
        out.scalars = {{"frame_lower", fb.lower}, {"frame_upper", fb.upper}, {"frame_ratio", fb.ratio()}};
    } else if (kind == "separation") {
        const auto ph = phantom_from(in);
        SolverConfig cfg;
        cfg.iterations = in.at("iterations");
        cfg.wavelets = WaveletSpec::cdf97(in.at("levels"));
        const auto r = separate_image(ph.image, cfg);
        out.images = {{"W", r.points}, {"S", r.curves}};
        out.scalars = {{"min_M_p", min_measure(measure_curve_over_thresholds(ph.points, r.points))},
                       {"min_M_c", min_measure(measure_curve_over_thresholds(ph.curves, r.curves))},
                       {"rho", r.rho},
                       {"lambda_max", r.lambda_max}};
    } else {
        throw std::runtime_error("unknown fixture kind " + kind);
    }
    return out;
}

std::vector<fs::path> fixture_files() {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(GEOSEP_FIXTURE_DIR)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

class Golden : public ::testing::TestWithParam<fs::path> {};

} // namespace

TEST_P(Golden, Reproduces) {
    std::ifstream f(GetParam());
    json fixture = json::parse(f);
    const auto got = produce(fixture);

    if (std::getenv("GEOSEP_REGENERATE_FIXTURES")) {
        auto& exp = fixture["expected"];
        for (const auto& [name, img] : got.images) exp["images"][name] = {{"fnv1a64", fingerprint(img)}};
        for (const auto& [name, v] : got.scalars) {
            const double tol = exp["scalars"].contains(name) ? exp["scalars"][name].value("tol", 1e-9) : 1e-9;
            exp["scalars"][name] = {{"value", v}, {"tol", tol}};
        }
        std::ofstream(GetParam()) << fixture.dump(2) << '\n';
        GTEST_SKIP() << "regenerated " << GetParam();
    }

    const auto& exp = fixture.at("expected");
    for (const auto& [name, img] : got.images) {
        EXPECT_EQ(fingerprint(img), exp.at("images").at(name).at("fnv1a64").get<std::string>()) << name;
    }
    for (const auto& [name, v] : got.scalars) {
        const auto& e = exp.at("scalars").at(name);
        EXPECT_NEAR(v, e.at("value").get<double>(), e.at("tol").get<double>()) << name;
    }
}

INSTANTIATE_TEST_SUITE_P(Fixtures, Golden, ::testing::ValuesIn(fixture_files()),
                         [](const auto& info) { return info.param.stem().string(); });
