#include <strainmodal/errors.hpp>
#include <strainmodal/io.hpp>
#include <strainmodal/metrics.hpp>
#include <strainmodal/pipeline.hpp>
#include <strainmodal/record_io.hpp>
#include <strainmodal/sim.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace strainmodal;

namespace {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3 };

LogLevel log_threshold() {
    static const LogLevel level = [] {
        const char* raw = std::getenv("STRAINMODAL_LOG");
        const std::string value = raw ? raw : "info";
        if (value == "debug") return LogLevel::debug;
        if (value == "warn") return LogLevel::warn;
        if (value == "error") return LogLevel::error;
        return LogLevel::info;
    }();
    return level;
}

void log(LogLevel level, const std::string& message) {
    static constexpr const char* names[] = {"debug", "info", "warn", "error"};
    if (level >= log_threshold()) {
        std::cerr << "strainmodal: [" << names[int(level)] << "] " << message << '\n';
    }
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

// Exit codes are a scripting contract: 0 success, 2 config/usage,
// 3 simulation, 4 identification or fit degeneracy.
template <typename Fn>
int run_guarded(Fn&& fn, int processing_code) {
    try {
        return fn();
    } catch (const ParseError& e) {
        log(LogLevel::error, e.what());
        return 2;
    } catch (const ValidationError& e) {
        log(LogLevel::error, e.what());
        return 2;
    } catch (const InvalidCutoff& e) {
        log(LogLevel::error, e.what());
        return 2;
    } catch (const RecordTooShort& e) {
        log(LogLevel::error, e.what());
        return 2;
    } catch (const InsufficientSamples& e) {
        log(LogLevel::error, e.what());
        return 2;
    } catch (const PositionOutOfRange& e) {
        log(LogLevel::error, e.what());
        return 2;
    } catch (const LengthMismatch& e) {
        log(LogLevel::error, e.what());
        return 2;
    } catch (const Error& e) {
        log(LogLevel::error, e.what());
        return processing_code;
    } catch (const std::exception& e) {
        log(LogLevel::error, std::string("unexpected: ") + e.what());
        return 1;
    }
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory " + dir.string());
    return dir;
}

RecordFormat format_for(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return ext == ".csv" ? RecordFormat::csv : RecordFormat::binary_f64;
}

PipelineConfig load_config_or_default(const std::string& config_path) {
    if (!config_path.empty()) return load_pipeline_config(config_path);
    PipelineConfig config;
    config.layout = default_scenario().beam.layout;
    return config;
}

ModalSet resample_onto(const ModalSet& set, const std::vector<double>& target) {
    if (set.positions_m == target) return set;
    if (set.positions_m.size() < 2) {
        throw ValidationError("cannot resample a set with fewer than two positions");
    }
    const double lo = set.positions_m.front();
    const double hi = set.positions_m.back();
    const double tol = 1e-9 * std::max(1.0, hi - lo);
    ModalSet out = set;
    out.positions_m = target;
    for (ModalEstimate& mode : out.modes) {
        Eigen::VectorXcd values(Eigen::Index(target.size()));
        for (std::size_t k = 0; k < target.size(); ++k) {
            const double x = target[k];
            if (x < lo - tol || x > hi + tol) {
                throw ValidationError("comparison grids do not overlap at " +
                                      std::to_string(x) + " m");
            }
            auto it = std::upper_bound(set.positions_m.begin(), set.positions_m.end(), x);
            std::size_t hi_idx = std::size_t(it - set.positions_m.begin());
            hi_idx = std::clamp<std::size_t>(hi_idx, 1, set.positions_m.size() - 1);
            const std::size_t lo_idx = hi_idx - 1;
            const double t = (x - set.positions_m[lo_idx]) /
                             (set.positions_m[hi_idx] - set.positions_m[lo_idx]);
            values(Eigen::Index(k)) = mode.shape(Eigen::Index(lo_idx)) +
                                      t * (mode.shape(Eigen::Index(hi_idx)) -
                                           mode.shape(Eigen::Index(lo_idx)));
        }
        mode.shape = std::move(values);
    }
    return out;
}

int cmd_simulate(const std::string& config_path, const std::string& out,
                 const std::uint64_t* seed_override) {
    SimScenario scenario = config_path.empty() ? default_scenario() : load_scenario(config_path);
    if (seed_override) scenario.seed = *seed_override;

    const fs::path dir = prepare_out_dir(out);
    log(LogLevel::info, "simulating " + std::to_string(scenario.duration_s) + " s at " +
                            std::to_string(scenario.fs_hz) + " Hz");
    const SimOutput output = simulate(scenario);

    save_record(output.strain, dir / "strain.smr", RecordFormat::binary_f64);
    save_record(output.accel, dir / "accel.smr", RecordFormat::binary_f64);

    std::map<std::string, std::string> meta;
    meta["source"] = "simulate";
    meta["seed"] = std::to_string(scenario.seed);
    meta["generated_at"] = utc_timestamp();
    save_ground_truth(output.truth, scenario.channel_positions(), output.ei_over_rho_a, meta,
                      dir / "truth_modes.json");

    log(LogLevel::info, "wrote strain.smr, accel.smr, truth_modes.json to " + dir.string());
    return 0;
}

int cmd_identify(const std::string& config_path, const std::string& record_path,
                 const std::string& out, bool differentiate) {
    const PipelineConfig config = load_config_or_default(config_path);
    LoadOptions options;
    options.differentiate = differentiate;
    const Record record = load_record(record_path, format_for(record_path), options);
    const fs::path dir = prepare_out_dir(out);

    const Record clean = preprocess(record, config);
    log(LogLevel::info, "scanning model orders " + std::to_string(config.ssi.order_min) +
                            ".." + std::to_string(config.ssi.order_max));
    const StabilizationDiagram diagram = stabilization_scan(clean, config.ssi);
    {
        std::ofstream csv(dir / "stabilization.csv");
        if (!csv) throw ValidationError("cannot write " + (dir / "stabilization.csv").string());
        csv << diagram.to_csv();
    }
    for (const auto& [order, reason] : diagram.failed_orders) {
        log(LogLevel::warn, "order " + std::to_string(order) + " failed: " + reason);
    }

    ModalSet set;
    set.kind = "SMS";
    set.positions_m = record.channel_positions_m();
    set.meta["source"] = "ssi";
    set.meta["record"] = fs::path(record_path).filename().string();
    set.meta["generated_at"] = utc_timestamp();
    try {
        set.modes = select_modes(diagram, config.fitting.n_modes, config.ssi.cluster_tol);
    } catch (const NotEnoughStableModes& e) {
        set.meta["note"] = e.what();
        save_modal_set(set, dir / "modes.json");
        log(LogLevel::error, e.what());
        log(LogLevel::info, "partial results written to " + dir.string());
        return 4;
    }
    save_modal_set(set, dir / "modes.json");
    log(LogLevel::info, "identified " + std::to_string(set.modes.size()) + " modes");
    return 0;
}

int cmd_fit_shapes(const std::string& config_path, const std::string& modes_path,
                   const std::string& out) {
    const PipelineConfig config = load_config_or_default(config_path);
    const ModalSet modes = load_modal_set(modes_path, "SMS");
    const fs::path dir = prepare_out_dir(out);

    const FitStageResult stage = run_shape_fitting(modes, config);

    nlohmann::json report;
    report["schema_version"] = kSchemaVersion;
    report["fitted"] = nlohmann::json::array();
    report["failed"] = nlohmann::json::array();

    ModalSet physics, trapezoid, polynomial;
    for (ModalSet* route : {&physics, &trapezoid, &polynomial}) {
        route->kind = "DMS";
        route->positions_m = modes.positions_m;
        route->meta["source"] = "fit-shapes";
    }
    physics.meta["route"] = "physics";
    trapezoid.meta["route"] = "trapezoid";
    polynomial.meta["route"] = "polynomial";

    for (const FittedMode& fitted : stage.fitted) {
        const std::string tag = "_mode" + std::to_string(fitted.mode_index);
        save_shape_model(fitted.fit.model, dir / ("shape_model" + tag + ".json"));
        save_samples_csv(fitted.sms_measured, dir / ("sms_measured" + tag + ".csv"));
        save_samples_csv(fitted.sms_fitted, dir / ("sms_fitted" + tag + ".csv"));
        save_samples_csv(fitted.dms_physics, dir / ("dms_physics" + tag + ".csv"));
        save_samples_csv(fitted.dms_trapezoid, dir / ("dms_trapezoid" + tag + ".csv"));
        save_samples_csv(fitted.dms_polynomial, dir / ("dms_polynomial" + tag + ".csv"));

        auto route_mode = [&](const ModeShapeSamples& samples) {
            ModalEstimate estimate;
            estimate.frequency_hz = fitted.frequency_hz;
            estimate.damping_ratio = fitted.damping_ratio;
            estimate.shape = samples.values.cast<std::complex<double>>();
            estimate.order_found = 0;
            return estimate;
        };
        physics.modes.push_back(route_mode(fitted.dms_physics));
        trapezoid.modes.push_back(route_mode(fitted.dms_trapezoid));
        polynomial.modes.push_back(route_mode(fitted.dms_polynomial));

        report["fitted"].push_back({{"mode_index", fitted.mode_index},
                                    {"frequency_hz", fitted.frequency_hz},
                                    {"beta", fitted.fit.beta},
                                    {"objective", fitted.fit.objective},
                                    {"residual_rms", fitted.fit.residual_rms},
                                    {"sigma_min", fitted.fit.sigma_min}});
    }
    for (const auto& [index, reason] : stage.failed) {
        log(LogLevel::warn, "mode " + std::to_string(index) + " not fitted: " + reason);
        report["failed"].push_back({{"mode_index", index}, {"reason", reason}});
    }

    save_modal_set(physics, dir / "modes_dms_physics.json");
    save_modal_set(trapezoid, dir / "modes_dms_trapezoid.json");
    save_modal_set(polynomial, dir / "modes_dms_polynomial.json");
    {
        std::ofstream file(dir / "fit_report.json");
        if (!file) throw ValidationError("cannot write " + (dir / "fit_report.json").string());
        file << report.dump(2) << '\n';
    }

    if (stage.fitted.empty()) {
        log(LogLevel::error, "no mode could be fitted");
        return 4;
    }
    log(LogLevel::info, "fitted " + std::to_string(stage.fitted.size()) + " of " +
                            std::to_string(modes.modes.size()) + " modes");
    return 0;
}

int cmd_compare(const std::string& set_a_path, const std::string& set_b_path,
                const std::string& out, const std::vector<std::string>& baseline_specs,
                const std::string& kind, const std::string& label_a,
                const std::string& label_b) {
    ModalSet set_a = load_modal_set(set_a_path, kind);
    const ModalSet set_b = load_modal_set(set_b_path, kind);
    if (set_a.kind != set_b.kind) {
        throw ValidationError("cannot compare " + set_a.kind + " against " + set_b.kind);
    }
    set_a = resample_onto(set_a, set_b.positions_m);

    ComparisonReport report;
    report.comparison = pair_modes(set_a.modes, set_b.modes);

    for (const std::string& spec : baseline_specs) {
        const std::size_t eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
            throw ValidationError("baseline must be given as name=path, got '" + spec + "'");
        }
        const std::string name = spec.substr(0, eq);
        ModalSet baseline = load_modal_set(spec.substr(eq + 1), kind);
        if (baseline.kind != set_b.kind) {
            throw ValidationError("baseline '" + name + "' is " + baseline.kind +
                                  ", reference is " + set_b.kind);
        }
        baseline = resample_onto(baseline, set_b.positions_m);
        const double baseline_mac = pair_modes(baseline.modes, set_b.modes).mean_mac;
        report.baseline_mean_mac[name] = baseline_mac;
        report.improvement_percent[name] =
            improvement_percent(report.comparison.mean_mac, baseline_mac);
    }

    const fs::path dir = prepare_out_dir(out);
    save_comparison(report, dir / "comparison.json");
    {
        std::ofstream table(dir / "comparison_table.txt");
        if (!table) {
            throw ValidationError("cannot write " + (dir / "comparison_table.txt").string());
        }
        table << comparison_table(report.comparison, label_a, label_b);
    }
    std::cout << comparison_table(report.comparison, label_a, label_b);
    for (const auto& [name, value] : report.improvement_percent) {
        std::cout << "improvement over " << name << ": " << value << "%\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"strain-based modal identification for multi-span bridges"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string record_path;
    std::string modes_path;
    std::string set_a_path;
    std::string set_b_path;
    std::string kind = "DMS";
    std::string label_a = "ours";
    std::string label_b = "reference";
    std::vector<std::string> baseline_specs;
    std::uint64_t seed = 0;
    bool differentiate = false;

    CLI::App* sim = app.add_subcommand("simulate", "synthesize strain/accel records + truth");
    sim->add_option("--config", config_path, "scenario JSON (defaults to the 3-span bridge)");
    sim->add_option("--out", out_dir, "output directory")->required();
    CLI::Option* seed_opt = sim->add_option("--seed", seed, "override the scenario seed");

    CLI::App* identify = app.add_subcommand("identify", "modal identification from a record");
    identify->add_option("record", record_path, "strain record (.smr or .csv)")->required();
    identify->add_option("--config", config_path, "pipeline config JSON");
    identify->add_option("--out", out_dir, "output directory")->required();
    identify->add_flag("--differentiate", differentiate,
                       "difference the record along time on load");

    CLI::App* fit = app.add_subcommand("fit-shapes", "displacement shapes from strain modes");
    fit->add_option("modes", modes_path, "modes JSON from identify")->required();
    fit->add_option("--config", config_path, "pipeline config JSON");
    fit->add_option("--out", out_dir, "output directory")->required();

    CLI::App* compare = app.add_subcommand("compare", "pair two modal sets and report MAC");
    compare->add_option("set_a", set_a_path, "modes JSON, ours")->required();
    compare->add_option("set_b", set_b_path, "modes JSON, reference")->required();
    compare->add_option("--out", out_dir, "output directory")->required();
    compare->add_option("--baseline", baseline_specs,
                        "name=path of a baseline set, repeatable");
    compare->add_option("--kind", kind, "shape kind to take from truth files (SMS or DMS)");
    compare->add_option("--label-a", label_a, "column label for set_a");
    compare->add_option("--label-b", label_b, "column label for set_b");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (sim->parsed()) {
        return run_guarded(
            [&] {
                return cmd_simulate(config_path, out_dir, seed_opt->count() ? &seed : nullptr);
            },
            3);
    }
    if (identify->parsed()) {
        return run_guarded(
            [&] { return cmd_identify(config_path, record_path, out_dir, differentiate); }, 4);
    }
    if (fit->parsed()) {
        return run_guarded([&] { return cmd_fit_shapes(config_path, modes_path, out_dir); }, 4);
    }
    return run_guarded(
        [&] {
            return cmd_compare(set_a_path, set_b_path, out_dir, baseline_specs, kind, label_a,
                               label_b);
        },
        4);
}
