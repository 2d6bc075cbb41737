#pragma once

#include "strainmodal/beam.hpp"
#include "strainmodal/filter.hpp"
#include "strainmodal/modal_set.hpp"
#include "strainmodal/ssi.hpp"

#include <optional>
#include <string>
#include <vector>

namespace strainmodal {

struct FittingConfig {
    double beta_scan_factor = 0.0; // <=0: use the span count
    int n_modes = 3;
};

struct BaselineConfig {
    int polynomial_degree = 8;
};

struct PipelineConfig {
    FilterSpec filter;
    SsiConfig ssi;
    SpanLayout layout;
    FittingConfig fitting;
    BaselineConfig baselines;

    void validate() const;
};

// detrend -> high-pass, the preprocessing applied before identification.
Record preprocess(const Record& record, const PipelineConfig& config);

struct IdentificationResult {
    ModalSet modes;                 // strain mode shapes at channel positions
    StabilizationDiagram diagram;
};

// Full identification stage: preprocess, stabilization scan, mode selection.
// NotEnoughStableModes propagates; use stabilization_scan directly when the
// diagram is needed regardless of selection success.
IdentificationResult run_identification(const Record& record, const PipelineConfig& config);

struct FittedMode {
    int mode_index = 1;               // 1-based rank by frequency
    double frequency_hz = 0.0;
    double damping_ratio = 0.0;
    FitResult fit;                    // physics-guided shape model + diagnostics
    ModeShapeSamples sms_measured;    // realified SSI shape
    ModeShapeSamples sms_fitted;
    ModeShapeSamples dms_physics;
    ModeShapeSamples dms_trapezoid;
    ModeShapeSamples dms_polynomial;
};

struct FitStageResult {
    std::vector<FittedMode> fitted;
    std::vector<std::pair<int, std::string>> failed; // mode index, reason
};

// Shape-fitting stage over every mode of an identified set: physics-guided
// fit plus both baseline integrators. Per-mode failures are recorded and do
// not stop the remaining modes.
FitStageResult run_shape_fitting(const ModalSet& modes, const PipelineConfig& config);

} // namespace strainmodal
