#include "strainmodal/filter.hpp"

#include "strainmodal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace strainmodal {

namespace {

// One second-order section, direct form II transposed. b2/a2 are zero for a
// first-order section.
struct Biquad {
    double b0, b1, b2;
    double a1, a2;
};

// Butterworth high-pass as a cascade of sections: analog prototype poles
// mapped through the high-pass transform and the bilinear transform with
// prewarped cutoff. Each section is normalized to unit gain at Nyquist.
std::vector<Biquad> design_high_pass(int order, double cutoff_hz, double fs_hz) {
    const double warped = 2.0 * fs_hz * std::tan(std::numbers::pi * cutoff_hz / fs_hz);
    std::vector<Biquad> sections;
    sections.reserve(std::size_t(order + 1) / 2);

    const int pairs = order / 2;
    for (int k = 0; k < pairs; ++k) {
        // Conjugate analog prototype pole pair on the unit circle.
        const double theta = std::numbers::pi * (2.0 * k + 1.0 + order) / (2.0 * order);
        const std::complex<double> lp_pole = std::polar(1.0, theta);
        const std::complex<double> hp_pole = warped / lp_pole;
        const std::complex<double> z_pole =
            (2.0 * fs_hz + hp_pole) / (2.0 * fs_hz - hp_pole);

        Biquad s{};
        s.a1 = -2.0 * z_pole.real();
        s.a2 = std::norm(z_pole);
        const double gain = (1.0 - s.a1 + s.a2) / 4.0; // |den| / |num| at z = -1
        s.b0 = gain;
        s.b1 = -2.0 * gain;
        s.b2 = gain;
        sections.push_back(s);
    }
    if (order % 2 == 1) {
        const double hp_pole = -warped; // real prototype pole at s = -1
        const double z_pole = (2.0 * fs_hz + hp_pole) / (2.0 * fs_hz - hp_pole);
        Biquad s{};
        s.a1 = -z_pole;
        s.a2 = 0.0;
        const double gain = (1.0 - s.a1) / 2.0;
        s.b0 = gain;
        s.b1 = -gain;
        s.b2 = 0.0;
        sections.push_back(s);
    }
    return sections;
}

// In-place single pass of one section over x. The state starts at the
// section's steady-state response to x[0], so a constant input produces the
// steady-state output from the first sample on.
void run_section(const Biquad& s, std::vector<double>& x) {
    const double dc_gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    double z1 = (dc_gain - s.b0) * x.front();
    double z2 = (s.b2 - s.a2 * dc_gain) * x.front();
    for (double& v : x) {
        const double in = v;
        const double out = s.b0 * in + z1;
        z1 = s.b1 * in - s.a1 * out + z2;
        z2 = s.b2 * in - s.a2 * out;
        v = out;
    }
}

void run_cascade(const std::vector<Biquad>& sections, std::vector<double>& x) {
    for (const Biquad& s : sections) run_section(s, x);
}

// Odd (point-symmetric) reflection about both end samples.
std::vector<double> reflect_pad(const Eigen::VectorXd& x, Eigen::Index pad) {
    const Eigen::Index n = x.size();
    std::vector<double> out(std::size_t(n + 2 * pad));
    for (Eigen::Index k = 0; k < pad; ++k) {
        out[std::size_t(k)] = 2.0 * x(0) - x(pad - k);
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        out[std::size_t(pad + k)] = x(k);
    }
    for (Eigen::Index k = 0; k < pad; ++k) {
        out[std::size_t(pad + n + k)] = 2.0 * x(n - 1) - x(n - 2 - k);
    }
    return out;
}

} // namespace

Record high_pass(const Record& record, const FilterSpec& spec) {
    const double fs = record.sampling_rate_hz();
    if (spec.order < 1) {
        throw ValidationError("filter order must be positive");
    }
    if (!(spec.cutoff_hz > 0.0) || spec.cutoff_hz >= fs / 2.0) {
        throw InvalidCutoff("cutoff " + std::to_string(spec.cutoff_hz) +
                            " Hz violates the Nyquist limit of " + std::to_string(fs / 2.0) +
                            " Hz");
    }
    const Eigen::Index n = record.sample_count();
    if (n < Eigen::Index(3) * spec.order) {
        throw RecordTooShort("record has " + std::to_string(n) +
                             " samples, need at least 3x filter order (" +
                             std::to_string(3 * spec.order) + ")");
    }

    const std::vector<Biquad> sections = design_high_pass(spec.order, spec.cutoff_hz, fs);
    const Eigen::Index pad = std::min<Eigen::Index>(3 * spec.order, n - 1);

    Eigen::MatrixXd out(record.channel_count(), n);
    for (Eigen::Index ch = 0; ch < record.channel_count(); ++ch) {
        std::vector<double> x = reflect_pad(record.samples().row(ch).transpose(), pad);
        run_cascade(sections, x);
        if (spec.zero_phase) {
            std::reverse(x.begin(), x.end());
            run_cascade(sections, x);
            std::reverse(x.begin(), x.end());
        }
        for (Eigen::Index k = 0; k < n; ++k) out(ch, k) = x[std::size_t(pad + k)];
    }
    return record.with_samples(std::move(out));
}

Record detrend(const Record& record) {
    const Eigen::Index n = record.sample_count();
    Eigen::MatrixXd out = record.samples();
    if (n == 0) return record;

    // Centered time axis keeps the two normal equations decoupled.
    Eigen::VectorXd t(n);
    for (Eigen::Index k = 0; k < n; ++k) t(k) = double(k) - 0.5 * double(n - 1);
    const double tt = t.squaredNorm();

    for (Eigen::Index ch = 0; ch < out.rows(); ++ch) {
        const double mean = out.row(ch).mean();
        const double slope = tt > 0.0 ? out.row(ch).dot(t.transpose()) / tt : 0.0;
        out.row(ch) -= (mean + slope * t.array()).matrix().transpose();
    }
    return record.with_samples(std::move(out));
}

} // namespace strainmodal
