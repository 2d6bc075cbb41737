#include "strainmodal/io.hpp"

#include "strainmodal/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <complex>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace strainmodal {

namespace {

using nlohmann::json;

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json(const json& doc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw ValidationError("write failed for " + path.string());
}

void require_schema(const json& doc, const std::filesystem::path& path) {
    if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer()) {
        throw ParseError(path.string() + ": missing schema_version");
    }
    const int version = doc.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
        throw ParseError(path.string() + ": unsupported schema_version " +
                         std::to_string(version));
    }
}

template <typename T>
T field(const json& doc, const char* key, const std::string& where) {
    if (!doc.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where + ": field '" + key + "': " + e.what());
    }
}

template <typename T>
void assign_if(const json& doc, const char* key, T& target, const std::string& where) {
    if (!doc.contains(key)) return;
    target = field<T>(doc, key, where);
}

std::vector<double> from_eigen(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

std::map<std::string, std::string> meta_from_json(const json& doc, const std::string& where) {
    if (!doc.is_object()) throw ParseError(where + ": meta must be an object");
    std::map<std::string, std::string> meta;
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_string()) {
            throw ParseError(where + ": meta value '" + key + "' must be a string");
        }
        meta[key] = value.get<std::string>();
    }
    return meta;
}

} // namespace

void save_modal_set(const ModalSet& set, const std::filesystem::path& path) {
    set.validate();
    json doc;
    doc["schema_version"] = kSchemaVersion;
    json modes = json::array();
    for (const ModalEstimate& mode : set.modes) {
        json entry;
        entry["frequency_hz"] = mode.frequency_hz;
        entry["damping_ratio"] = mode.damping_ratio;
        std::vector<double> re(std::size_t(mode.shape.size()));
        std::vector<double> im(std::size_t(mode.shape.size()));
        for (Eigen::Index k = 0; k < mode.shape.size(); ++k) {
            re[std::size_t(k)] = mode.shape(k).real();
            im[std::size_t(k)] = mode.shape(k).imag();
        }
        entry["shape_re"] = re;
        entry["shape_im"] = im;
        entry["positions_m"] = set.positions_m;
        modes.push_back(std::move(entry));
    }
    doc["modes"] = std::move(modes);
    json meta = json::object();
    for (const auto& [key, value] : set.meta) meta[key] = value;
    meta["kind"] = set.kind;
    doc["meta"] = std::move(meta);
    write_json(doc, path);
}

ModalSet load_modal_set(const std::filesystem::path& path, const std::string& kind) {
    const json doc = read_json(path);
    require_schema(doc, path);
    const std::string where = path.string();
    if (!doc.contains("modes") || !doc.at("modes").is_array()) {
        throw ParseError(where + ": missing modes array");
    }
    const json& modes = doc.at("modes");

    ModalSet set;
    if (doc.contains("meta")) set.meta = meta_from_json(doc.at("meta"), where);

    const bool truth_file =
        doc.contains("ei_over_rho_a") || (!modes.empty() && modes.front().contains("sms"));
    if (truth_file) {
        if (kind != "SMS" && kind != "DMS") {
            throw ValidationError("kind must be SMS or DMS, got '" + kind + "'");
        }
        set.kind = kind;
        set.positions_m = field<std::vector<double>>(doc, "positions_m", where);
        const char* shape_key = kind == "SMS" ? "sms" : "dms";
        for (const json& entry : modes) {
            ModalEstimate mode;
            mode.frequency_hz = field<double>(entry, "frequency_hz", where);
            mode.damping_ratio = field<double>(entry, "damping_ratio", where);
            const auto values = field<std::vector<double>>(entry, shape_key, where);
            mode.shape.resize(Eigen::Index(values.size()));
            for (std::size_t k = 0; k < values.size(); ++k) {
                mode.shape(Eigen::Index(k)) = values[k];
            }
            set.modes.push_back(std::move(mode));
        }
    } else {
        const auto it = set.meta.find("kind");
        set.kind = it != set.meta.end() ? it->second : std::string("SMS");
        set.meta.erase("kind");
        bool first = true;
        for (const json& entry : modes) {
            const auto positions = field<std::vector<double>>(entry, "positions_m", where);
            if (first) {
                set.positions_m = positions;
                first = false;
            } else if (positions != set.positions_m) {
                throw ValidationError(where + ": modes are sampled on different grids");
            }
            const auto re = field<std::vector<double>>(entry, "shape_re", where);
            const auto im = field<std::vector<double>>(entry, "shape_im", where);
            if (re.size() != im.size() || re.size() != positions.size()) {
                throw ParseError(where + ": shape and position lengths differ");
            }
            ModalEstimate mode;
            mode.frequency_hz = field<double>(entry, "frequency_hz", where);
            mode.damping_ratio = field<double>(entry, "damping_ratio", where);
            mode.shape.resize(Eigen::Index(re.size()));
            for (std::size_t k = 0; k < re.size(); ++k) {
                mode.shape(Eigen::Index(k)) = {re[k], im[k]};
            }
            set.modes.push_back(std::move(mode));
        }
    }
    set.validate();
    return set;
}

void save_ground_truth(const std::vector<GroundTruthMode>& truth,
                       const std::vector<double>& positions_m, double ei_over_rho_a,
                       const std::map<std::string, std::string>& meta,
                       const std::filesystem::path& path) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["positions_m"] = positions_m;
    doc["ei_over_rho_a"] = ei_over_rho_a;
    json modes = json::array();
    for (const GroundTruthMode& mode : truth) {
        json entry;
        entry["beta"] = mode.beta;
        entry["frequency_hz"] = mode.frequency_hz;
        entry["damping_ratio"] = mode.damping_ratio;
        entry["sms"] = from_eigen(mode.sms);
        entry["dms"] = from_eigen(mode.dms);
        modes.push_back(std::move(entry));
    }
    doc["modes"] = std::move(modes);
    doc["meta"] = meta;
    write_json(doc, path);
}

void save_shape_model(const ShapeModel& model, const std::filesystem::path& path) {
    model.validate();
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["mode_index"] = model.mode_index;
    doc["beta_per_span"] = model.beta_per_span;
    json constants = json::array();
    for (const auto& span : model.constants) {
        constants.push_back(std::vector<double>(span.begin(), span.end()));
    }
    doc["constants"] = std::move(constants);
    doc["layout"] = {{"span_lengths_m", model.layout.span_lengths_m},
                     {"fiber_offset_m", model.layout.fiber_offset_m}};
    write_json(doc, path);
}

ShapeModel load_shape_model(const std::filesystem::path& path) {
    const json doc = read_json(path);
    require_schema(doc, path);
    const std::string where = path.string();

    ShapeModel model;
    model.mode_index = field<int>(doc, "mode_index", where);
    model.beta_per_span = field<std::vector<double>>(doc, "beta_per_span", where);
    const auto spans = field<std::vector<std::vector<double>>>(doc, "constants", where);
    for (const auto& span : spans) {
        if (span.size() != 4) {
            throw ParseError(where + ": each constant set needs exactly 4 values");
        }
        model.constants.push_back({span[0], span[1], span[2], span[3]});
    }
    if (!doc.contains("layout")) throw ParseError(where + ": missing field 'layout'");
    const json& layout = doc.at("layout");
    model.layout.span_lengths_m = field<std::vector<double>>(layout, "span_lengths_m", where);
    model.layout.fiber_offset_m = field<double>(layout, "fiber_offset_m", where);
    model.validate();
    return model;
}

SimScenario load_scenario(const std::filesystem::path& path) {
    const json doc = read_json(path);
    if (doc.contains("schema_version")) require_schema(doc, path);
    const std::string where = path.string();

    SimScenario scenario = default_scenario();
    bool geometry_changed = false;
    bool ei_explicit = false;
    bool target_explicit = false;
    double target_f1_hz = 4.61;

    if (doc.contains("beam")) {
        const json& beam = doc.at("beam");
        if (beam.contains("span_lengths_m")) {
            scenario.beam.layout.span_lengths_m =
                field<std::vector<double>>(beam, "span_lengths_m", where);
            geometry_changed = true;
        }
        assign_if(beam, "fiber_offset_m", scenario.beam.layout.fiber_offset_m, where);
        assign_if(beam, "modal_damping", scenario.beam.modal_damping, where);
        assign_if(beam, "n_modes", scenario.beam.n_modes, where);
        if (beam.contains("rho_a_kg_per_m")) {
            scenario.beam.rho_a_kg_per_m = field<double>(beam, "rho_a_kg_per_m", where);
            geometry_changed = true;
        }
        if (beam.contains("ei_n_m2")) {
            scenario.beam.ei_n_m2 = field<double>(beam, "ei_n_m2", where);
            ei_explicit = true;
        }
        if (beam.contains("target_f1_hz")) {
            target_f1_hz = field<double>(beam, "target_f1_hz", where);
            target_explicit = true;
        }
    }
    assign_if(doc, "duration_s", scenario.duration_s, where);
    assign_if(doc, "fs_hz", scenario.fs_hz, where);
    assign_if(doc, "channel_spacing_m", scenario.channel_spacing_m, where);
    assign_if(doc, "accel_positions_m", scenario.accel_positions_m, where);
    assign_if(doc, "forcing_intensity", scenario.forcing_intensity, where);
    assign_if(doc, "seed", scenario.seed, where);
    if (doc.contains("snr_db")) {
        const json& snr = doc.at("snr_db");
        scenario.snr_db = snr.is_null() ? std::numeric_limits<double>::infinity()
                                        : field<double>(doc, "snr_db", where);
    }

    if (ei_explicit && target_explicit) {
        throw ValidationError(where + ": give either ei_n_m2 or target_f1_hz, not both");
    }
    if (!ei_explicit && (target_explicit || geometry_changed)) {
        scenario.beam.layout.validate();
        scenario.beam.ei_n_m2 =
            scenario.beam.rho_a_kg_per_m *
            calibrate_first_frequency(scenario.beam.layout, target_f1_hz);
    }
    scenario.validate();
    return scenario;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    const json doc = read_json(path);
    if (doc.contains("schema_version")) require_schema(doc, path);
    const std::string where = path.string();

    PipelineConfig config;
    config.layout = default_scenario().beam.layout;

    if (doc.contains("filter")) {
        const json& filter = doc.at("filter");
        assign_if(filter, "cutoff_hz", config.filter.cutoff_hz, where);
        assign_if(filter, "order", config.filter.order, where);
        assign_if(filter, "zero_phase", config.filter.zero_phase, where);
    }
    if (doc.contains("ssi")) {
        const json& ssi = doc.at("ssi");
        assign_if(ssi, "block_rows", config.ssi.block_rows, where);
        assign_if(ssi, "order_min", config.ssi.order_min, where);
        assign_if(ssi, "order_max", config.ssi.order_max, where);
        assign_if(ssi, "order_step", config.ssi.order_step, where);
        assign_if(ssi, "freq_band_hz", config.ssi.freq_band_hz, where);
        assign_if(ssi, "damping_bounds", config.ssi.damping_bounds, where);
        assign_if(ssi, "stab_freq_tol", config.ssi.stab_freq_tol, where);
        assign_if(ssi, "stab_damp_tol", config.ssi.stab_damp_tol, where);
        assign_if(ssi, "stab_mac_tol", config.ssi.stab_mac_tol, where);
        assign_if(ssi, "cluster_tol", config.ssi.cluster_tol, where);
    }
    // Config files must state the geometry they apply to; the built-in
    // default layout is only used when no config file is given at all.
    if (!doc.contains("layout")) throw ParseError(where + ": missing field 'layout'");
    {
        const json& layout = doc.at("layout");
        assign_if(layout, "span_lengths_m", config.layout.span_lengths_m, where);
        assign_if(layout, "fiber_offset_m", config.layout.fiber_offset_m, where);
    }
    if (doc.contains("fitting")) {
        const json& fitting = doc.at("fitting");
        assign_if(fitting, "beta_scan_factor", config.fitting.beta_scan_factor, where);
        assign_if(fitting, "n_modes", config.fitting.n_modes, where);
    }
    if (doc.contains("baselines")) {
        const json& baselines = doc.at("baselines");
        assign_if(baselines, "polynomial_degree", config.baselines.polynomial_degree, where);
    }
    config.validate();
    return config;
}

void save_comparison(const ComparisonReport& report, const std::filesystem::path& json_path) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    json pairs = json::array();
    for (const ModePair& pair : report.comparison.pairs) {
        pairs.push_back({{"index_a", pair.index_a},
                         {"index_b", pair.index_b},
                         {"mac", pair.mac},
                         {"freq_a_hz", pair.freq_a_hz},
                         {"freq_b_hz", pair.freq_b_hz},
                         {"abs_freq_diff_hz", pair.abs_freq_diff_hz}});
    }
    doc["pairs"] = std::move(pairs);
    doc["unmatched_a"] = report.comparison.unmatched_a;
    doc["unmatched_b"] = report.comparison.unmatched_b;
    doc["mean_mac"] = report.comparison.mean_mac;
    doc["mad_hz"] = report.comparison.mad_hz;
    doc["baseline_mean_mac"] = report.baseline_mean_mac;
    doc["improvement_percent"] = report.improvement_percent;
    write_json(doc, json_path);
}

std::string comparison_table(const ModalComparison& comparison, const std::string& label_a,
                             const std::string& label_b) {
    const std::string head_a = label_a + " f [Hz]";
    const std::string head_b = label_b + " f [Hz]";
    const int width_a = int(std::max<std::size_t>(head_a.size(), 12));
    const int width_b = int(std::max<std::size_t>(head_b.size(), 12));

    std::ostringstream out;
    out << std::left << std::setw(8) << "Mode #" << std::right << std::setw(width_a) << head_a
        << "  " << std::setw(width_b) << head_b << "  " << std::setw(10) << "|df| [Hz]"
        << "  " << std::setw(6) << "MAC" << '\n';
    out << std::fixed;
    for (const ModePair& pair : comparison.pairs) {
        out << std::left << std::setw(8) << (pair.index_a + 1) << std::right
            << std::setprecision(4) << std::setw(width_a) << pair.freq_a_hz << "  "
            << std::setw(width_b) << pair.freq_b_hz << "  " << std::setw(10)
            << pair.abs_freq_diff_hz << "  " << std::setprecision(3) << std::setw(6)
            << pair.mac << '\n';
    }
    out << '\n';
    out << "mean MAC:  " << std::setprecision(3) << comparison.mean_mac << '\n';
    out << "mean |df|: " << std::setprecision(4) << comparison.mad_hz << " Hz\n";
    if (!comparison.unmatched_a.empty() || !comparison.unmatched_b.empty()) {
        out << "unmatched: " << comparison.unmatched_a.size() << " in " << label_a << ", "
            << comparison.unmatched_b.size() << " in " << label_b << '\n';
    }
    return out.str();
}

void save_samples_csv(const ModeShapeSamples& samples, const std::filesystem::path& path) {
    if (Eigen::Index(samples.positions_m.size()) != samples.values.size()) {
        throw LengthMismatch("positions and values differ in length");
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out.precision(std::numeric_limits<double>::max_digits10);
    out << "position_m,value\n";
    for (std::size_t k = 0; k < samples.positions_m.size(); ++k) {
        out << samples.positions_m[k] << ',' << samples.values(Eigen::Index(k)) << '\n';
    }
    if (!out) throw ValidationError("write failed for " + path.string());
}

} // namespace strainmodal
