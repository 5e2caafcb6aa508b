#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "geosep/cli.hpp"

namespace {

// Flags that were given on the command line, applied on top of the config file.
struct Overrides {
    std::optional<std::string> out, input, weights, schedule, lambda_min, truth_points, truth_curves, est_points,
        est_curves;
    std::optional<unsigned long long> seed;
    std::optional<unsigned> threads;
    std::optional<int> iterations, scales, levels;
    std::optional<std::size_t> size;
    std::optional<double> sigma, sigma_g;
    bool no_preprocess = false;

    void apply(geosep::RunConfig& cfg) const {
        auto set = [&](const char* key, const auto& v) {
            if (!v) return;
            if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::string>) {
                geosep::set_config_value(cfg, key, *v);
            } else {
                std::ostringstream s;
                s.precision(17);
                s << *v;
                geosep::set_config_value(cfg, key, s.str());
            }
        };
        set("out", out);
        set("input", input);
        set("weights", weights);
        set("schedule", schedule);
        set("lambda_min", lambda_min);
        set("truth_points", truth_points);
        set("truth_curves", truth_curves);
        set("est_points", est_points);
        set("est_curves", est_curves);
        set("seed", seed);
        set("threads", threads);
        set("iterations", iterations);
        set("scales", scales);
        set("levels", levels);
        set("size", size);
        set("noise_sigma", sigma);
        set("sigma_g", sigma_g);
        if (no_preprocess) cfg.preprocess = false;
    }
};

void add_shared(CLI::App* cmd, Overrides& o, std::string& config_path) {
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--config", config_path, "key = value config file");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--threads", o.threads, "cap on worker threads");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"geosep: separate point-like and curve-like structures in images"};
    app.require_subcommand(1);
    Overrides o;
    std::string config_path;
    bool dump_filters = false;

    auto* synth = app.add_subcommand("synth", "write a points + curves phantom");
    add_shared(synth, o, config_path);
    synth->add_option("--sigma", o.sigma, "noise standard deviation");
    synth->add_option("--size", o.size, "image side length");

    auto* sep = app.add_subcommand("separate", "split an image into points and curves");
    add_shared(sep, o, config_path);
    sep->add_option("--input", o.input, "input image (PNG or PGM)");
    sep->add_option("--iterations", o.iterations, "number of thresholding iterations");
    sep->add_option("--weights", o.weights, "subband weights w0,...,wL");
    sep->add_option("--scales", o.scales, "shearlet scales");
    sep->add_option("--levels", o.levels, "wavelet levels");
    sep->add_option("--lambda-min", o.lambda_min, "final threshold (or 'auto')");
    sep->add_option("--schedule", o.schedule, "linear or exp");
    sep->add_flag("--no-preprocess", o.no_preprocess, "skip subband weighting");

    auto* ev = app.add_subcommand("eval", "measure a separation against ground truth");
    add_shared(ev, o, config_path);
    ev->add_option("--truth-points", o.truth_points);
    ev->add_option("--truth-curves", o.truth_curves);
    ev->add_option("--est-points", o.est_points);
    ev->add_option("--est-curves", o.est_curves);
    ev->add_option("--sigma-g", o.sigma_g, "Gaussian sigma of the measure");

    auto* tr = app.add_subcommand("transform", "roundtrip diagnostics for both dictionaries");
    add_shared(tr, o, config_path);
    tr->add_option("--input", o.input, "input image (default: seeded random)");
    tr->add_option("--size", o.size, "side length of the random image");
    tr->add_option("--scales", o.scales, "shearlet scales");
    tr->add_option("--levels", o.levels, "wavelet levels");
    tr->add_flag("--dump-filters", dump_filters, "write one PNG per directional filter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? geosep::exit_ok : geosep::exit_config;
    }

    try {
        geosep::RunConfig cfg;
        if (!config_path.empty()) geosep::load_config_file(cfg, config_path);
        o.apply(cfg);
        if (*synth) geosep::run_synth(cfg, std::cout);
        else if (*sep) geosep::run_separate(cfg, std::cout);
        else if (*ev) geosep::run_eval(cfg, std::cout);
        else if (*tr) geosep::run_transform(cfg, dump_filters, std::cout);
    } catch (...) {
        return geosep::report_failure(std::cerr);
    }
    return geosep::exit_ok;
}
