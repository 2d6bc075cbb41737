#include "strainmodal/pipeline.hpp"

#include "strainmodal/errors.hpp"

#include <string>
#include <utility>

namespace strainmodal {

void PipelineConfig::validate() const {
    if (!(filter.cutoff_hz > 0.0)) throw ValidationError("filter cutoff must be positive");
    if (filter.order < 1) throw ValidationError("filter order must be positive");
    ssi.validate();
    layout.validate();
    if (fitting.n_modes < 1) throw ValidationError("need at least one mode to fit");
    if (baselines.polynomial_degree < 1) {
        throw ValidationError("polynomial degree must be at least 1");
    }
}

Record preprocess(const Record& record, const PipelineConfig& config) {
    return high_pass(detrend(record), config.filter);
}

IdentificationResult run_identification(const Record& record, const PipelineConfig& config) {
    config.validate();
    const Record clean = preprocess(record, config);

    IdentificationResult result;
    result.diagram = stabilization_scan(clean, config.ssi);
    result.modes.modes =
        select_modes(result.diagram, config.fitting.n_modes, config.ssi.cluster_tol);
    result.modes.positions_m = clean.channel_positions_m();
    result.modes.kind = "SMS";
    result.modes.meta["source"] = "ssi";
    result.modes.meta["channels"] = std::to_string(clean.channel_count());
    result.modes.meta["block_rows"] = std::to_string(config.ssi.effective_block_rows(
        clean.sampling_rate_hz(), clean.channel_count(), clean.sample_count()));
    result.modes.validate();
    return result;
}

FitStageResult run_shape_fitting(const ModalSet& modes, const PipelineConfig& config) {
    config.validate();
    modes.validate();
    if (modes.kind != "SMS") {
        throw ValidationError("shape fitting expects strain mode shapes, got " + modes.kind);
    }

    FitStageResult result;
    for (std::size_t i = 0; i < modes.modes.size(); ++i) {
        const int mode_index = int(i) + 1;
        try {
            ModeShapeSamples measured;
            measured.positions_m = modes.positions_m;
            measured.values = to_real_shape(modes.modes[i].shape);
            measured.kind = ModeShapeSamples::Kind::sms;

            FitOptions options;
            options.mode_index = mode_index;
            options.beta_scan_factor = config.fitting.beta_scan_factor;

            FittedMode fitted;
            fitted.mode_index = mode_index;
            fitted.frequency_hz = modes.modes[i].frequency_hz;
            fitted.damping_ratio = modes.modes[i].damping_ratio;
            fitted.fit = fit_sms(measured, config.layout, options);
            fitted.sms_fitted = eval_sms(fitted.fit.model, modes.positions_m);
            fitted.dms_physics = eval_dms(fitted.fit.model, modes.positions_m);
            fitted.dms_trapezoid = dms_via_trapezoid(measured, config.layout);
            fitted.dms_polynomial =
                dms_via_polynomial(measured, config.layout, config.baselines.polynomial_degree)
                    .dms;
            fitted.sms_measured = std::move(measured);
            result.fitted.push_back(std::move(fitted));
        } catch (const Error& err) {
            result.failed.emplace_back(mode_index, err.what());
        }
    }
    return result;
}

} // namespace strainmodal
