#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "geosep/config.hpp"
#include "geosep/error.hpp"
#include "geosep/eval.hpp"
#include "geosep/image_io.hpp"
#include "geosep/parallel.hpp"
#include "geosep/plot.hpp"
#include "geosep/separation.hpp"
#include "geosep/shearlets.hpp"
#include "geosep/subband.hpp"
#include "geosep/synth.hpp"
#include "geosep/wavelets.hpp"

namespace geosep {

/// Process exit status per failure class.
enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_config = 2,
    exit_numeric = 3,
    exit_io = 4,
};

/// Maps the active exception to an exit code and writes its message to err.
inline int report_failure(std::ostream& err) {
    try {
        throw;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const ParameterError& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return exit_config;
    } catch (const DimensionError& e) {
        err << "dimension error: " << e.what() << '\n';
        return exit_config;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    } catch (const AdmissibilityError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    } catch (const UndefinedMeasureError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return exit_numeric;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return exit_io;
    } catch (const UnsupportedFormatError& e) {
        err << "i/o error: " << e.what() << '\n';
        return exit_io;
    } catch (const CorruptFileError& e) {
        err << "i/o error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_internal;
    }
}

namespace detail {

inline std::filesystem::path prepare_out_dir(const std::string& out) {
    if (out.empty()) throw ConfigError("output directory must not be empty");
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec || !std::filesystem::is_directory(out)) {
        throw IoError("cannot create output directory " + out + (ec ? ": " + ec.message() : ""));
    }
    return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw IoError("write failed: " + path.string());
}

inline void begin_run(const RunConfig& cfg, const std::filesystem::path& dir) {
    cfg.validate();
    if (cfg.threads > 0) set_thread_limit(cfg.threads);
    write_text(dir / "config.txt", format_config(cfg));
}

/// Maps [0, max] to [0, 1]; negative values clip to 0.
inline RasterImage for_display(const RasterImage& img) {
    RasterImage out = peak_normalized(img);
    for (double& v : out.values()) v = std::max(0.0, v);
    return out;
}

/// Signed image mapped to [0, 1] around 0.5.
inline RasterImage signed_for_display(const RasterImage& img) {
    const double peak = max_abs(img);
    RasterImage out(img.height(), img.width());
    for (std::size_t i = 0; i < img.size(); ++i) {
        out.data()[i] = peak > 0.0 ? 0.5 + 0.5 * img.data()[i] / peak : 0.5;
    }
    return out;
}

inline nlohmann::json to_json(const Point2& p) { return {{"x", p.x}, {"y", p.y}}; }

inline nlohmann::json scene_json(const RunConfig& cfg, const PointSceneSpec& points, const CurveSceneSpec& curves) {
    nlohmann::json j;
    j["height"] = cfg.size;
    j["width"] = cfg.size;
    j["seed"] = cfg.seed;
    j["noise_sigma"] = cfg.noise_sigma;
    auto& pj = j["points"];
    pj["r_clamp"] = points.r_clamp;
    pj["positions"] = nlohmann::json::array();
    for (std::size_t i = 0; i < points.positions.size(); ++i) {
        auto p = to_json(points.positions[i]);
        p["amplitude"] = points.amplitude(i);
        pj["positions"].push_back(p);
    }
    auto& cj = j["curves"];
    cj["intensity"] = curves.intensity;
    cj["stroke_width"] = curves.stroke_width;
    cj["items"] = nlohmann::json::array();
    for (const auto& c : curves.curves) {
        nlohmann::json item{{"kind", to_string(c.kind)}};
        if (c.kind == CurveKind::spline) {
            item["control"] = nlohmann::json::array();
            for (const auto& p : c.control) item["control"].push_back(to_json(p));
        } else {
            item["center"] = to_json(c.center);
            item["axis_a"] = c.axis_a;
            item["axis_b"] = c.axis_b;
            item["rotation"] = c.rotation;
        }
        cj["items"].push_back(item);
    }
    return j;
}

/// |spectrum| on the full frequency grid with DC moved to the center.
inline RasterImage centered_magnitude(const HalfSpectrum& s) {
    const std::size_t h = s.bins.height();
    const std::size_t w = s.width;
    const std::size_t half = s.bins.width();
    RasterImage out(h, w);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            const double m = c < half ? std::abs(s.bins(r, c)) : std::abs(s.bins((h - r) % h, w - c));
            out((r + h / 2) % h, (c + w / 2) % w) = m;
        }
    }
    return out;
}

inline RasterImage random_image(std::size_t size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RasterImage img(size, size);
    for (double& v : img.values()) v = u(rng);
    return img;
}

} // namespace detail

/// Writes I.png, P.png, C.png and spec.json for the default phantom.
inline void run_synth(const RunConfig& cfg, std::ostream& log) {
    const auto dir = detail::prepare_out_dir(cfg.out);
    detail::begin_run(cfg, dir);
    const auto points = default_point_scene(cfg.size, cfg.size);
    const auto curves = default_curve_scene(cfg.size, cfg.size);
    const Phantom ph = gen_phantom(cfg.size, cfg.size, points, curves, cfg.noise_sigma, cfg.seed);
    save_image(ph.image, dir / "I.png");
    save_image(ph.points, dir / "P.png");
    save_image(ph.curves, dir / "C.png");
    detail::write_text(dir / "spec.json", detail::scene_json(cfg, points, curves).dump(2) + "\n");
    log << "synth: " << cfg.size << "x" << cfg.size << " phantom, noise sigma " << cfg.noise_sigma << " -> "
        << dir.string() << '\n';
}

/// Preprocess + separate cfg.input; writes points/curves/residual PNGs, trace.csv
/// and summary.json.
inline SeparationResult run_separate(const RunConfig& cfg, std::ostream& log) {
    if (cfg.input.empty()) throw ConfigError("separate needs --input");
    const auto dir = detail::prepare_out_dir(cfg.out);
    detail::begin_run(cfg, dir);
    const RasterImage f = load_image(cfg.input);
    SolverConfig solver = cfg.solver;
    if (!cfg.preprocess) solver.weights.values.assign(static_cast<std::size_t>(solver.subbands) + 1, 1.0);
    const auto result = separate_image(f, solver, [&](const IterationRecord& r, const IterationState&) {
        log << "iter " << std::setw(3) << r.iteration << "  lambda " << std::setprecision(6) << r.lambda
            << "  residual " << r.residual_norm << '\n';
    });
    save_image(detail::for_display(result.points), dir / "points.png");
    save_image(detail::for_display(result.curves), dir / "curves.png");
    save_image(detail::signed_for_display(result.residual), dir / "residual.png");
    detail::write_text(dir / "trace.csv", trace_csv(result.trace));
    nlohmann::json summary{{"lambda_max", result.lambda_max},
                           {"lambda_min", result.lambda_min},
                           {"rho", result.rho},
                           {"noise_sigma", result.noise_sigma},
                           {"iterations", result.trace.size()},
                           {"points_peak", max_value(result.points)},
                           {"curves_peak", max_value(result.curves)}};
    detail::write_text(dir / "summary.json", summary.dump(2) + "\n");
    return result;
}

struct EvalSummary {
    double min_points = 0.0;
    double min_curves = 0.0;
};

/// Measure curves over the threshold grid; writes measures.csv and measures.png.
inline EvalSummary run_eval(const RunConfig& cfg, std::ostream& log) {
    for (const auto* p : {&cfg.truth_points, &cfg.truth_curves, &cfg.est_points, &cfg.est_curves}) {
        if (p->empty()) throw ConfigError("eval needs --truth-points, --truth-curves, --est-points and --est-curves");
    }
    const auto dir = detail::prepare_out_dir(cfg.out);
    detail::begin_run(cfg, dir);
    const auto tp = load_image(cfg.truth_points);
    const auto tc = load_image(cfg.truth_curves);
    const auto ep = load_image(cfg.est_points);
    const auto ec = load_image(cfg.est_curves);
    const auto mp = measure_curve_over_thresholds(tp, ep, cfg.measure);
    const auto mc = measure_curve_over_thresholds(tc, ec, cfg.measure);
    detail::write_text(dir / "measures.csv", measures_csv(mp, mc));

    double top = 1.0;
    for (const auto& [t, v] : mp) top = std::max(top, v);
    for (const auto& [t, v] : mc) top = std::max(top, v);
    LinePlot plot;
    plot.set_y_range(0.0, top);
    plot.add({mp, {200, 40, 40}});
    plot.add({mc, {40, 80, 200}});
    plot.save(dir / "measures.png");

    const EvalSummary s{min_measure(mp), min_measure(mc)};
    log << "min M_p " << s.min_points << "  min M_c " << s.min_curves << '\n';
    return s;
}

struct TransformReport {
    double wavelet_error = 0.0;
    double shearlet_error = 0.0;
    double frame_ratio = 0.0;
    std::size_t filters_dumped = 0;
};

/// Forward + inverse of both dictionaries on cfg.input (or a seeded random image
/// when no input is given).
inline TransformReport run_transform(const RunConfig& cfg, bool dump_filters, std::ostream& log) {
    const auto dir = detail::prepare_out_dir(cfg.out);
    detail::begin_run(cfg, dir);
    const RasterImage f = cfg.input.empty() ? detail::random_image(cfg.size, cfg.seed) : load_image(cfg.input);
    TransformReport rep;
    const auto& ws = cfg.solver.wavelets;
    rep.wavelet_error = relative_error(uwt_inverse(uwt_forward(f, ws), ws), f);
    const auto bank = build_filter_bank(f.height(), f.width(), cfg.solver.shearlets);
    const auto dual = compute_dual_bank(bank);
    rep.shearlet_error = relative_error(shearlet_inverse(shearlet_forward(f, bank), dual), f);
    rep.frame_ratio = frame_bounds(bank).ratio();

    std::ostringstream report;
    report << std::setprecision(6);
    report << "wavelet_roundtrip_error = " << rep.wavelet_error << '\n';
    report << "shearlet_roundtrip_error = " << rep.shearlet_error << '\n';
    report << "shearlet_frame_ratio = " << rep.frame_ratio << '\n';
    report << "shearlet_filters = " << bank.size() << '\n';

    if (dump_filters) {
        const auto fdir = dir / "filters";
        std::error_code ec;
        std::filesystem::create_directories(fdir, ec);
        if (ec) throw IoError("cannot create " + fdir.string() + ": " + ec.message());
        for (std::size_t i = 0; i < bank.size(); ++i) {
            const auto& idx = bank.index(i);
            if (idx.cone == Cone::lowpass) continue;
            char name[64];
            std::snprintf(name, sizeof name, "filter_%03zu_%s_j%d_k%+d.png", i, to_string(idx.cone), idx.scale,
                          idx.shear);
            save_image(peak_normalized(detail::centered_magnitude(bank.spectrum(i))), fdir / name);
            ++rep.filters_dumped;
        }
        report << "filters_dumped = " << rep.filters_dumped << '\n';
    }
    detail::write_text(dir / "transform.txt", report.str());
    log << report.str();
    return rep;
}

} // namespace geosep
