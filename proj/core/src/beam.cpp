#include "strainmodal/beam.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace strainmodal {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Golden-section minimization of a unimodal scalar function on [a, b].
template <typename F>
double golden_min(F&& f, double a, double b, double tol) {
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

Eigen::RowVector4d w_basis(double beta, double l) {
    const double p = beta * l;
    return {std::sin(p), std::cos(p), std::sinh(p), std::cosh(p)};
}

Eigen::RowVector4d slope_basis(double beta, double l) {
    const double p = beta * l;
    return Eigen::RowVector4d{std::cos(p), -std::sin(p), std::cosh(p), std::sinh(p)} * beta;
}

Eigen::RowVector4d curvature_basis(double beta, double l) {
    const double p = beta * l;
    return Eigen::RowVector4d{-std::sin(p), -std::cos(p), std::sinh(p), std::cosh(p)} *
           (beta * beta);
}

void check_positions_in_range(const std::vector<double>& positions_m, double total_m) {
    const double tol = 1e-9 * std::max(1.0, total_m);
    for (double x : positions_m) {
        if (!std::isfinite(x) || x < -tol || x > total_m + tol) {
            throw PositionOutOfRange("position " + std::to_string(x) +
                                     " m lies outside the bridge [0, " +
                                     std::to_string(total_m) + "] m");
        }
    }
}

// Largest shape magnitude over a dense sweep of the bridge; the reference
// scale for deciding that requested positions all sit on nodes.
template <typename Eval>
double dense_max_abs(const SpanLayout& layout, Eval&& eval) {
    double best = 0.0;
    for (int k = 0; k < layout.span_count(); ++k) {
        const double start = layout.span_start_m(k);
        const double len = layout.span_lengths_m[std::size_t(k)];
        for (int t = 0; t <= 64; ++t) {
            best = std::max(best, std::abs(eval(start + len * t / 64.0)));
        }
    }
    return best;
}

template <typename Eval>
ModeShapeSamples eval_shape(const ShapeModel& model, const std::vector<double>& positions_m,
                            ModeShapeSamples::Kind kind, Eval&& eval) {
    model.validate();
    if (positions_m.empty()) throw ValidationError("no positions to evaluate");
    check_positions_in_range(positions_m, model.layout.total_length_m());

    Eigen::VectorXd values(Eigen::Index(positions_m.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        values(i) = eval(positions_m[std::size_t(i)]);
    }
    const double max_abs = values.cwiseAbs().maxCoeff();
    const double reference = dense_max_abs(model.layout, eval);
    if (reference == 0.0 || max_abs < 1e-9 * reference) {
        throw DegenerateShape("shape vanishes at every requested position");
    }
    values /= max_abs;
    return ModeShapeSamples{positions_m, std::move(values), kind};
}

Eigen::VectorXd normalize_max_abs(Eigen::VectorXd values) {
    const double max_abs = values.cwiseAbs().maxCoeff();
    if (max_abs == 0.0) throw DegenerateShape("shape vanishes at every position");
    return values / max_abs;
}

// Linear interpolation on a strictly increasing grid; end segments extend
// beyond the grid.
double interp_linear(const std::vector<double>& xs, const Eigen::VectorXd& ys, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t hi = std::size_t(it - xs.begin());
    hi = std::clamp<std::size_t>(hi, 1, xs.size() - 1);
    const std::size_t lo = hi - 1;
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys(Eigen::Index(lo)) + t * (ys(Eigen::Index(hi)) - ys(Eigen::Index(lo)));
}

void check_strictly_increasing(const std::vector<double>& xs) {
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) {
            throw ValidationError("sample positions must be strictly increasing");
        }
    }
}

// -values / fiber offset: the curvature implied by a strain shape.
Eigen::VectorXd curvature_from_strain(const ModeShapeSamples& measured,
                                      const SpanLayout& layout) {
    if (layout.fiber_offset_m == 0.0) {
        throw DivideByZeroBaseline("fiber offset is zero, strain cannot be mapped to curvature");
    }
    return -measured.values / layout.fiber_offset_m;
}

} // namespace

double SpanLayout::total_length_m() const {
    double total = 0.0;
    for (double l : span_lengths_m) total += l;
    return total;
}

std::vector<double> SpanLayout::support_positions_m() const {
    std::vector<double> supports;
    supports.reserve(span_lengths_m.size() + 1);
    supports.push_back(0.0);
    double x = 0.0;
    for (double l : span_lengths_m) {
        x += l;
        supports.push_back(x);
    }
    return supports;
}

double SpanLayout::span_start_m(int span) const {
    double x = 0.0;
    for (int k = 0; k < span; ++k) x += span_lengths_m[std::size_t(k)];
    return x;
}

int SpanLayout::span_at(double x) const {
    double end = 0.0;
    const int count = span_count();
    for (int k = 0; k + 1 < count; ++k) {
        end += span_lengths_m[std::size_t(k)];
        if (x < end) return k;
    }
    return count - 1;
}

void SpanLayout::validate() const {
    if (span_lengths_m.empty()) throw ValidationError("layout needs at least one span");
    for (double l : span_lengths_m) {
        if (!std::isfinite(l) || l <= 0.0) {
            throw ValidationError("span lengths must be positive");
        }
    }
    if (!std::isfinite(fiber_offset_m) || fiber_offset_m <= 0.0) {
        throw ValidationError("fiber offset must be positive");
    }
}

double ShapeModel::strain_at(double x_m) const {
    const int k = layout.span_at(x_m);
    const double l = x_m - layout.span_start_m(k);
    const Eigen::RowVector4d basis = curvature_basis(beta_per_span[std::size_t(k)], l);
    const auto& c = constants[std::size_t(k)];
    const double curvature = basis(0) * c[0] + basis(1) * c[1] + basis(2) * c[2] + basis(3) * c[3];
    return -layout.fiber_offset_m * curvature;
}

double ShapeModel::displacement_at(double x_m) const {
    const int k = layout.span_at(x_m);
    const double l = x_m - layout.span_start_m(k);
    const Eigen::RowVector4d basis = w_basis(beta_per_span[std::size_t(k)], l);
    const auto& c = constants[std::size_t(k)];
    return basis(0) * c[0] + basis(1) * c[1] + basis(2) * c[2] + basis(3) * c[3];
}

double ShapeModel::slope_at(double x_m) const {
    const int k = layout.span_at(x_m);
    const double l = x_m - layout.span_start_m(k);
    const Eigen::RowVector4d basis = slope_basis(beta_per_span[std::size_t(k)], l);
    const auto& c = constants[std::size_t(k)];
    return basis(0) * c[0] + basis(1) * c[1] + basis(2) * c[2] + basis(3) * c[3];
}

void ShapeModel::validate() const {
    layout.validate();
    const std::size_t spans = std::size_t(layout.span_count());
    if (beta_per_span.size() != spans || constants.size() != spans) {
        throw ValidationError("shape model needs one beta and one constant set per span");
    }
    for (double b : beta_per_span) {
        if (!std::isfinite(b) || b <= 0.0) throw ValidationError("beta must be positive");
    }
    if (mode_index < 1) throw ValidationError("mode index starts at 1");
}

ModeShapeSamples eval_sms(const ShapeModel& model, const std::vector<double>& positions_m) {
    return eval_shape(model, positions_m, ModeShapeSamples::Kind::sms,
                      [&](double x) { return model.strain_at(x); });
}

ModeShapeSamples eval_dms(const ShapeModel& model, const std::vector<double>& positions_m) {
    return eval_shape(model, positions_m, ModeShapeSamples::Kind::dms,
                      [&](double x) { return model.displacement_at(x); });
}

Eigen::MatrixXd assemble_bc_matrix(const SpanLayout& layout,
                                   const std::vector<double>& beta_per_span) {
    layout.validate();
    const int spans = layout.span_count();
    if (int(beta_per_span.size()) != spans) {
        throw LengthMismatch("need one beta per span, got " +
                             std::to_string(beta_per_span.size()) + " for " +
                             std::to_string(spans) + " spans");
    }
    for (double b : beta_per_span) {
        if (!std::isfinite(b) || b <= 0.0) throw ValidationError("beta must be positive");
    }

    Eigen::MatrixXd bc = Eigen::MatrixXd::Zero(4 * spans, 4 * spans);
    int row = 0;

    bc.block<1, 4>(row++, 0) = w_basis(beta_per_span[0], 0.0);
    bc.block<1, 4>(row++, 0) = curvature_basis(beta_per_span[0], 0.0);

    for (int k = 0; k + 1 < spans; ++k) {
        const double len = layout.span_lengths_m[std::size_t(k)];
        const double bl = beta_per_span[std::size_t(k)];
        const double br = beta_per_span[std::size_t(k) + 1];
        const int left = 4 * k;
        const int right = 4 * (k + 1);

        bc.block<1, 4>(row++, left) = w_basis(bl, len);
        bc.block<1, 4>(row++, right) = w_basis(br, 0.0);
        bc.block<1, 4>(row, left) = slope_basis(bl, len);
        bc.block<1, 4>(row++, right) = -slope_basis(br, 0.0);
        bc.block<1, 4>(row, left) = curvature_basis(bl, len);
        bc.block<1, 4>(row++, right) = -curvature_basis(br, 0.0);
    }

    const double last_len = layout.span_lengths_m[std::size_t(spans) - 1];
    const double last_beta = beta_per_span[std::size_t(spans) - 1];
    bc.block<1, 4>(row++, 4 * (spans - 1)) = w_basis(last_beta, last_len);
    bc.block<1, 4>(row++, 4 * (spans - 1)) = curvature_basis(last_beta, last_len);

    // Unit-norm rows keep sinh/cosh growth from swamping the small singular
    // values; the null space is unchanged.
    for (int r = 0; r < bc.rows(); ++r) {
        const double norm = bc.row(r).norm();
        if (norm > 0.0) bc.row(r) /= norm;
    }
    return bc;
}

CharacteristicPoint characteristic_point(const SpanLayout& layout, double beta) {
    const std::vector<double> betas(std::size_t(layout.span_count()), beta);
    const Eigen::MatrixXd bc = assemble_bc_matrix(layout, betas);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(bc, Eigen::ComputeFullV);
    CharacteristicPoint point;
    point.sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
    point.constants = svd.matrixV().col(bc.cols() - 1);
    return point;
}

std::vector<double> find_characteristic_roots(const SpanLayout& layout, double beta_min,
                                              double beta_max, int n_roots) {
    layout.validate();
    if (!(beta_min > 0.0) || !(beta_max > beta_min)) {
        throw ValidationError("need 0 < beta_min < beta_max");
    }
    if (n_roots < 1) throw ValidationError("need at least one root");

    const int grid = 2000;
    const double step = (beta_max - beta_min) / grid;
    std::vector<double> sigma(std::size_t(grid) + 1);
    for (int i = 0; i <= grid; ++i) {
        sigma[std::size_t(i)] = characteristic_point(layout, beta_min + step * i).sigma_min;
    }

    auto sigma_at = [&](double beta) { return characteristic_point(layout, beta).sigma_min; };

    std::vector<double> roots;
    for (int i = 1; i < grid; ++i) {
        const double here = sigma[std::size_t(i)];
        if (here < sigma[std::size_t(i) - 1] && here <= sigma[std::size_t(i) + 1]) {
            const double lo = beta_min + step * (i - 1);
            const double hi = beta_min + step * (i + 1);
            const double beta = golden_min(sigma_at, lo, hi, 1e-12 * std::max(1.0, hi));
            if (sigma_at(beta) < 1e-9) {
                if (roots.empty() || beta - roots.back() > 1e-6 * std::max(1.0, beta)) {
                    roots.push_back(beta);
                    if (int(roots.size()) == n_roots) return roots;
                }
            }
        }
    }
    throw RootsNotFound("found " + std::to_string(roots.size()) + " roots in [" +
                        std::to_string(beta_min) + ", " + std::to_string(beta_max) +
                        "] 1/m, wanted " + std::to_string(n_roots));
}

FitResult fit_sms(const ModeShapeSamples& measured, const SpanLayout& layout,
                  const FitOptions& options) {
    layout.validate();
    if (measured.kind != ModeShapeSamples::Kind::sms) {
        throw ValidationError("fit expects strain samples");
    }
    if (Eigen::Index(measured.positions_m.size()) != measured.values.size()) {
        throw LengthMismatch("positions and values differ in length");
    }
    if (options.mode_index < 1) throw ValidationError("mode index starts at 1");
    if (options.grid_points < 2) throw ValidationError("need at least two scan points");
    const double total = layout.total_length_m();
    check_positions_in_range(measured.positions_m, total);

    std::vector<int> per_span(std::size_t(layout.span_count()), 0);
    for (double x : measured.positions_m) ++per_span[std::size_t(layout.span_at(x))];
    for (int k = 0; k < layout.span_count(); ++k) {
        if (per_span[std::size_t(k)] < 8) {
            throw InsufficientSamples("span " + std::to_string(k) + " has " +
                                      std::to_string(per_span[std::size_t(k)]) +
                                      " samples, the fit needs at least 8");
        }
    }

    const Eigen::VectorXd& m = measured.values;
    const double mm = m.squaredNorm();
    if (mm == 0.0) throw DegenerateShape("measured shape is identically zero");

    auto make_model = [&](double beta, const Eigen::VectorXd& constants) {
        ShapeModel model;
        model.layout = layout;
        model.mode_index = options.mode_index;
        model.beta_per_span.assign(std::size_t(layout.span_count()), beta);
        model.constants.resize(std::size_t(layout.span_count()));
        for (int k = 0; k < layout.span_count(); ++k) {
            for (int c = 0; c < 4; ++c) {
                model.constants[std::size_t(k)][std::size_t(c)] = constants(4 * k + c);
            }
        }
        return model;
    };

    auto predict = [&](const ShapeModel& model) {
        Eigen::VectorXd p(m.size());
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            p(i) = model.strain_at(measured.positions_m[std::size_t(i)]);
        }
        return p;
    };

    // Constants come from the null-space direction, so boundary conditions
    // hold for every candidate and only beta is free. 1 - corr^2 against the
    // measurement is invariant to the arbitrary model scale.
    auto objective_at = [&](double beta) {
        const CharacteristicPoint cp = characteristic_point(layout, beta);
        const Eigen::VectorXd p = predict(make_model(beta, cp.constants));
        const double pp = p.squaredNorm();
        if (pp == 0.0) return 1.0;
        const double c = p.dot(m);
        return 1.0 - c * c / (pp * mm);
    };

    double lo = 0.0;
    double hi = 0.0;
    if (options.beta_hint) {
        if (!(*options.beta_hint > 0.0)) throw ValidationError("beta hint must be positive");
        lo = 0.75 * *options.beta_hint;
        hi = 1.25 * *options.beta_hint;
    } else {
        const double factor =
            options.beta_scan_factor > 0.0 ? options.beta_scan_factor : layout.span_count();
        const double center = options.mode_index * std::numbers::pi / total * factor;
        lo = 0.3 * center;
        hi = 1.5 * center;
    }

    const double step = (hi - lo) / (options.grid_points - 1);
    double best_beta = lo;
    double best_obj = objective_at(lo);
    for (int i = 1; i < options.grid_points; ++i) {
        const double beta = lo + step * i;
        const double obj = objective_at(beta);
        if (obj < best_obj) {
            best_obj = obj;
            best_beta = beta;
        }
    }
    const double coarse =
        golden_min(objective_at, std::max(lo, best_beta - step), std::min(hi, best_beta + step),
                   1e-10 * std::max(1.0, best_beta));

    // Near the optimum 1 - corr^2 loses its leading digits to cancellation and
    // bottoms out around 1e-15, which caps the argmin at ~1e-10. The gap
    // between unit-normalized shapes measures the same misfit without the
    // cancellation, so a short second pass on it pins beta a few decades
    // tighter.
    const Eigen::VectorXd m_hat = m / std::sqrt(mm);
    auto gap_at = [&](double b) {
        const CharacteristicPoint point = characteristic_point(layout, b);
        const Eigen::VectorXd p = predict(make_model(b, point.constants));
        const double norm = p.norm();
        if (norm == 0.0) return 2.0;
        Eigen::VectorXd p_hat = p / norm;
        if (p_hat.dot(m_hat) < 0.0) p_hat = -p_hat;
        return (p_hat - m_hat).squaredNorm();
    };
    const double width = 1e-8 * std::max(1.0, coarse);
    const double beta = golden_min(gap_at, std::max(lo, coarse - width), coarse + width,
                                   1e-13 * std::max(1.0, coarse));

    CharacteristicPoint cp = characteristic_point(layout, beta);
    Eigen::VectorXd p = predict(make_model(beta, cp.constants));
    const double pp = p.squaredNorm();
    const double c = pp > 0.0 ? p.dot(m) : 0.0;
    const double objective = pp > 0.0 ? 1.0 - c * c / (pp * mm) : 1.0;
    if (objective > 0.5) {
        throw FitDegenerate("best candidate explains too little of the measured shape "
                            "(objective " +
                            std::to_string(objective) + ")");
    }
    if (c < 0.0) cp.constants = -cp.constants;

    FitResult result;
    result.model = make_model(beta, cp.constants);
    result.beta = beta;
    result.objective = objective;
    result.sigma_min = cp.sigma_min;
    p = predict(result.model);
    const double scale = p.dot(m) / p.squaredNorm();
    result.residual_rms = (m - scale * p).norm() / std::sqrt(double(m.size()));
    return result;
}

ModeShapeSamples dms_via_trapezoid(const ModeShapeSamples& measured, const SpanLayout& layout) {
    const Eigen::VectorXd curvature = curvature_from_strain(measured, layout);
    layout.validate();
    if (Eigen::Index(measured.positions_m.size()) != measured.values.size()) {
        throw LengthMismatch("positions and values differ in length");
    }
    // with two samples the support-line removal zeroes everything
    if (measured.positions_m.size() < 3) {
        throw InsufficientSamples("double integration needs at least three samples");
    }
    check_strictly_increasing(measured.positions_m);
    check_positions_in_range(measured.positions_m, layout.total_length_m());

    const std::vector<double>& xs = measured.positions_m;
    const Eigen::Index n = curvature.size();

    Eigen::VectorXd slope(n);
    slope(0) = 0.0;
    for (Eigen::Index i = 1; i < n; ++i) {
        const double h = xs[std::size_t(i)] - xs[std::size_t(i) - 1];
        slope(i) = slope(i - 1) + 0.5 * (curvature(i) + curvature(i - 1)) * h;
    }
    Eigen::VectorXd disp(n);
    disp(0) = 0.0;
    for (Eigen::Index i = 1; i < n; ++i) {
        const double h = xs[std::size_t(i)] - xs[std::size_t(i) - 1];
        disp(i) = disp(i - 1) + 0.5 * (slope(i) + slope(i - 1)) * h;
    }

    // Per span, remove the line through the integrated values at the two
    // supports; supports off the sample grid are interpolated.
    const std::vector<double> supports = layout.support_positions_m();
    Eigen::VectorXd corrected(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int k = layout.span_at(xs[std::size_t(i)]);
        const double a = supports[std::size_t(k)];
        const double b = supports[std::size_t(k) + 1];
        const double wa = interp_linear(xs, disp, a);
        const double wb = interp_linear(xs, disp, b);
        corrected(i) = disp(i) - (wa + (wb - wa) * (xs[std::size_t(i)] - a) / (b - a));
    }

    return ModeShapeSamples{xs, normalize_max_abs(std::move(corrected)),
                            ModeShapeSamples::Kind::dms};
}

PolyDmsResult dms_via_polynomial(const ModeShapeSamples& measured, const SpanLayout& layout,
                                 int degree) {
    if (degree < 1) throw ValidationError("polynomial degree must be at least 1");
    const Eigen::VectorXd curvature = curvature_from_strain(measured, layout);
    layout.validate();
    if (Eigen::Index(measured.positions_m.size()) != measured.values.size()) {
        throw LengthMismatch("positions and values differ in length");
    }
    check_positions_in_range(measured.positions_m, layout.total_length_m());

    const std::vector<double>& xs = measured.positions_m;
    const int spans = layout.span_count();
    const std::size_t span_count = std::size_t(spans);
    std::vector<std::vector<Eigen::Index>> by_span(span_count);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        by_span[std::size_t(layout.span_at(xs[i]))].push_back(Eigen::Index(i));
    }

    PolyDmsResult result;
    result.span_residual_rms.resize(std::size_t(spans), 0.0);
    Eigen::VectorXd values(Eigen::Index(xs.size()));

    for (int k = 0; k < spans; ++k) {
        const std::vector<Eigen::Index>& idx = by_span[std::size_t(k)];
        if (int(idx.size()) < degree + 1) {
            throw InsufficientSamples("span " + std::to_string(k) + " has " +
                                      std::to_string(idx.size()) +
                                      " samples, a degree " + std::to_string(degree) +
                                      " fit needs " + std::to_string(degree + 1));
        }
        const double start = layout.span_start_m(k);
        const double len = layout.span_lengths_m[std::size_t(k)];

        Eigen::MatrixXd vand(Eigen::Index(idx.size()), degree + 1);
        Eigen::VectorXd rhs(Eigen::Index(idx.size()));
        for (Eigen::Index r = 0; r < vand.rows(); ++r) {
            const double u = 2.0 * (xs[std::size_t(idx[std::size_t(r)])] - start) / len - 1.0;
            double power = 1.0;
            for (int j = 0; j <= degree; ++j) {
                vand(r, j) = power;
                power *= u;
            }
            rhs(r) = curvature(idx[std::size_t(r)]);
        }

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(vand, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double s_max = svd.singularValues()(0);
        const double s_min = svd.singularValues()(svd.singularValues().size() - 1);
        const double condition = s_min > 0.0 ? s_max / s_min
                                             : std::numeric_limits<double>::infinity();
        result.max_condition = std::max(result.max_condition, condition);
        if (condition > 1e12) {
            throw IllConditionedFit("degree " + std::to_string(degree) +
                                    " fit on span " + std::to_string(k) +
                                    " is ill conditioned (condition " +
                                    std::to_string(condition) + ")");
        }
        const Eigen::VectorXd coeff = svd.solve(rhs);
        result.span_residual_rms[std::size_t(k)] =
            (vand * coeff - rhs).norm() / std::sqrt(double(idx.size()));

        // Double integration in the rescaled coordinate: x = start + (u+1) h/2
        // gives dx = (h/2) du, so each integration picks up a factor h/2.
        const double half = 0.5 * len;
        Eigen::VectorXd integ = Eigen::VectorXd::Zero(degree + 3);
        for (int j = 0; j <= degree; ++j) {
            integ(j + 2) = coeff(j) * half * half / ((j + 1.0) * (j + 2.0));
        }
        auto poly_at = [&](double u) {
            double acc = 0.0;
            double power = 1.0;
            for (Eigen::Index j = 0; j < integ.size(); ++j) {
                acc += integ(j) * power;
                power *= u;
            }
            return acc;
        };
        // Zero displacement at both span supports fixes the linear part.
        const double at_right = poly_at(1.0);
        const double at_left = poly_at(-1.0);
        const double lin = -0.5 * (at_right - at_left);
        const double off = -0.5 * (at_right + at_left);

        for (Eigen::Index r : idx) {
            const double u = 2.0 * (xs[std::size_t(r)] - start) / len - 1.0;
            values(r) = poly_at(u) + lin * u + off;
        }
    }

    result.dms = ModeShapeSamples{xs, normalize_max_abs(std::move(values)),
                                  ModeShapeSamples::Kind::dms};
    return result;
}

Eigen::VectorXd to_real_shape(const Eigen::VectorXcd& shape) {
    if (shape.size() == 0 || shape.norm() == 0.0) {
        throw ZeroVector("cannot realign an empty or zero shape");
    }
    // Rotating by half the argument of sum(z^2) maximizes the norm of the
    // real part.
    const std::complex<double> spread = shape.array().square().sum();
    const double theta = 0.5 * std::arg(spread);
    Eigen::VectorXd real_part = (shape * std::polar(1.0, -theta)).real();

    Eigen::Index at = 0;
    real_part.cwiseAbs().maxCoeff(&at);
    if (real_part(at) == 0.0) throw DegenerateShape("realigned shape is zero");
    return real_part / real_part(at);
}

} // namespace strainmodal
