#pragma once

#include "strainmodal/beam.hpp"
#include "strainmodal/metrics.hpp"
#include "strainmodal/modal_set.hpp"
#include "strainmodal/pipeline.hpp"
#include "strainmodal/sim.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace strainmodal {

// All JSON documents carry a top-level "schema_version": 1.
inline constexpr int kSchemaVersion = 1;

// Modes JSON: {"schema_version", "modes":[{"frequency_hz","damping_ratio",
// "shape_re","shape_im","positions_m"}], "meta":{...}}.
void save_modal_set(const ModalSet& set, const std::filesystem::path& path);

// Accepts the modes schema above, or a ground-truth file (which stores both
// strain and displacement shapes per mode); `kind` picks which shape to load
// from a truth file and is ignored otherwise.
ModalSet load_modal_set(const std::filesystem::path& path, const std::string& kind = "DMS");

void save_ground_truth(const std::vector<GroundTruthMode>& truth,
                       const std::vector<double>& positions_m, double ei_over_rho_a,
                       const std::map<std::string, std::string>& meta,
                       const std::filesystem::path& path);

void save_shape_model(const ShapeModel& model, const std::filesystem::path& path);
ShapeModel load_shape_model(const std::filesystem::path& path);

SimScenario load_scenario(const std::filesystem::path& path);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct ComparisonReport {
    ModalComparison comparison;
    std::map<std::string, double> baseline_mean_mac;   // per baseline name
    std::map<std::string, double> improvement_percent; // physics route vs each baseline
};

void save_comparison(const ComparisonReport& report, const std::filesystem::path& json_path);

// Fixed column order: Mode #, then the two frequency columns, then the
// absolute difference, then MAC.
std::string comparison_table(const ModalComparison& comparison, const std::string& label_a,
                             const std::string& label_b);

// Two-column CSV "position_m,value" for plot data.
void save_samples_csv(const ModeShapeSamples& samples, const std::filesystem::path& path);

} // namespace strainmodal
