#pragma once

#include "strainmodal/errors.hpp"

#include <Eigen/Core>

#include <array>
#include <optional>
#include <vector>

namespace strainmodal {

// Bridge geometry: span lengths, support locations and the offset between
// the strain-sensing fiber and the beam neutral axis.
struct SpanLayout {
    enum class EndCondition { simply_supported };

    std::vector<double> span_lengths_m;
    double fiber_offset_m = 0.0;
    EndCondition end_condition = EndCondition::simply_supported;

    int span_count() const { return int(span_lengths_m.size()); }
    double total_length_m() const;

    // K+1 support positions, exterior ends included.
    std::vector<double> support_positions_m() const;
    double span_start_m(int span) const;

    // Index of the span containing x; interior supports belong to the span
    // to their right, the last support to the last span.
    int span_at(double x) const;

    void validate() const; // throws ValidationError
};

// Modal shape of a multi-span beam: per span, a wavenumber beta and four
// constants weighting sin/cos/sinh/cosh of the local coordinate. The
// displacement shape per span is
//   w(l) = C1 sin(bl) + C2 cos(bl) + C3 sinh(bl) + C4 cosh(bl)
// and the measured strain shape is -d * w''(l).
struct ShapeModel {
    std::vector<double> beta_per_span;                // 1/m, all equal by default
    std::vector<std::array<double, 4>> constants;     // C1..C4 per span
    SpanLayout layout;
    int mode_index = 1;

    // Raw model-scale evaluation at a global position (no normalization).
    double strain_at(double x_m) const;
    double displacement_at(double x_m) const;
    double slope_at(double x_m) const;

    void validate() const;
};

struct ModeShapeSamples {
    enum class Kind { sms, dms };

    std::vector<double> positions_m;
    Eigen::VectorXd values;   // unit-normalized: max |value| = 1
    Kind kind = Kind::sms;
};

// Evaluates the strain mode shape at global positions, normalized so the
// largest magnitude over the requested positions is 1.
// Throws PositionOutOfRange for positions outside the layout and
// DegenerateShape when the shape vanishes at every requested position.
ModeShapeSamples eval_sms(const ShapeModel& model, const std::vector<double>& positions_m);

// Displacement counterpart of eval_sms; the analytic double integral of the
// strain shape whose integration constants are already fixed by the
// boundary-condition constants of the model.
ModeShapeSamples eval_dms(const ShapeModel& model, const std::vector<double>& positions_m);

// Boundary-condition matrix acting on the stacked constants (4 per span).
// Rows, ordered along the bridge: zero displacement and zero moment at the
// left end; per interior support zero displacement on both adjoining spans
// plus rotation and moment continuity; zero displacement and zero moment at
// the right end. Rows are scaled to unit norm, which leaves the null space
// unchanged.
Eigen::MatrixXd assemble_bc_matrix(const SpanLayout& layout,
                                   const std::vector<double>& beta_per_span);

// Smallest singular value of the boundary-condition matrix at a shared beta,
// and the corresponding right singular vector (candidate constants).
struct CharacteristicPoint {
    double sigma_min = 0.0;
    Eigen::VectorXd constants; // 4K, unit norm
};
CharacteristicPoint characteristic_point(const SpanLayout& layout, double beta);

// Scans sigma_min over [beta_min, beta_max] on a fine grid, refines each
// bracketed minimum by golden-section and keeps those that reach
// sigma_min < 1e-9. Returns the first n_roots ascending; throws
// RootsNotFound when fewer exist in the range.
std::vector<double> find_characteristic_roots(const SpanLayout& layout, double beta_min,
                                              double beta_max, int n_roots);

struct FitOptions {
    int mode_index = 1;                  // centers the default beta scan
    std::optional<double> beta_hint;     // scan +-25% around the hint instead
    double beta_scan_factor = 0.0;       // <=0: use the span count
    int grid_points = 400;
};

struct FitResult {
    ShapeModel model;
    double beta = 0.0;
    double objective = 0.0;      // 1 - correlation^2 at the optimum
    double residual_rms = 0.0;   // RMS misfit in max-abs-normalized units
    double sigma_min = 0.0;      // BC-matrix smallest singular value at beta
};

// Fits the physics-guided shape to measured strain samples: for each
// candidate beta the constants are the null-space direction of the
// boundary-condition matrix, so boundary conditions hold exactly and the
// search reduces to one dimension. The objective is correlation between
// predicted and measured samples, making the fit invariant to measurement
// scale.
//
// Throws InsufficientSamples (< 8 samples on some span) and FitDegenerate
// (objective > 0.5 at the optimum).
FitResult fit_sms(const ModeShapeSamples& measured, const SpanLayout& layout,
                  const FitOptions& options = {});

// Baseline 1: cumulative trapezoidal double integration of -SMS/d over
// position, then per span the unique linear correction that zeroes the
// displacement at both supports of the span.
ModeShapeSamples dms_via_trapezoid(const ModeShapeSamples& measured, const SpanLayout& layout);

struct PolyDmsResult {
    ModeShapeSamples dms;
    std::vector<double> span_residual_rms; // polynomial misfit per span
    double max_condition = 0.0;            // worst Vandermonde condition seen
};

// Baseline 2: per-span least-squares polynomial fit of the SMS (positions
// rescaled to [-1,1] first), analytic double integration, integration
// constants fixed by zero displacement at the span supports.
PolyDmsResult dms_via_polynomial(const ModeShapeSamples& measured, const SpanLayout& layout,
                                 int degree);

// Rotates a complex shape by the phase that maximizes the norm of its real
// part, takes the real part, and normalizes to max-abs 1 with a positive
// value at the max-magnitude entry.
Eigen::VectorXd to_real_shape(const Eigen::VectorXcd& shape);

} // namespace strainmodal
