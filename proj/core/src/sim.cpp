#include "strainmodal/sim.hpp"

#include "strainmodal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace strainmodal {

namespace {

// Box-Muller on top of mt19937_64. std::normal_distribution is not pinned
// across standard libraries; this is, so fixed seeds reproduce everywhere.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = (double(rng_() >> 11) + 1.0) * 0x1p-53; // (0, 1]
        const double u2 = double(rng_() >> 11) * 0x1p-53;         // [0, 1)
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace

double BeamSpec::damping_for_mode(int mode_index) const {
    if (mode_index < 1) throw ValidationError("mode index starts at 1");
    if (modal_damping.empty()) return 0.0;
    if (modal_damping.size() == 1) return modal_damping.front();
    if (std::size_t(mode_index) > modal_damping.size()) {
        throw ValidationError("no damping ratio for mode " + std::to_string(mode_index));
    }
    return modal_damping[std::size_t(mode_index) - 1];
}

void BeamSpec::validate() const {
    layout.validate();
    if (!(ei_n_m2 > 0.0)) throw ValidationError("flexural rigidity must be positive");
    if (!(rho_a_kg_per_m > 0.0)) throw ValidationError("mass per length must be positive");
    if (n_modes < 1) throw ValidationError("need at least one mode");
    if (modal_damping.size() > 1 && modal_damping.size() < std::size_t(n_modes)) {
        throw ValidationError("give one damping ratio, or one per mode");
    }
    for (double z : modal_damping) {
        if (!(z >= 0.0) || z >= 1.0) {
            throw ValidationError("damping ratios must lie in [0, 1)");
        }
    }
}

std::vector<double> SimScenario::channel_positions() const {
    const double total = beam.layout.total_length_m();
    const int count = int(std::floor(total / channel_spacing_m + 1e-9)) + 1;
    std::vector<double> positions(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) positions[std::size_t(k)] = k * channel_spacing_m;
    return positions;
}

void SimScenario::validate() const {
    beam.validate();
    if (!(duration_s > 0.0) || !(fs_hz > 0.0)) {
        throw ValidationError("duration and sampling rate must be positive");
    }
    if (duration_s * fs_hz < 2.0) throw ValidationError("scenario yields fewer than two samples");
    const double total = beam.layout.total_length_m();
    if (!(channel_spacing_m > 0.0) || channel_spacing_m > total) {
        throw ValidationError("channel spacing must lie in (0, bridge length]");
    }
    for (std::size_t k = 0; k < accel_positions_m.size(); ++k) {
        const double x = accel_positions_m[k];
        if (!std::isfinite(x) || x < 0.0 || x > total) {
            throw PositionOutOfRange("accelerometer at " + std::to_string(x) +
                                     " m lies outside the bridge");
        }
        if (k > 0 && !(x > accel_positions_m[k - 1])) {
            throw ValidationError("accelerometer positions must be strictly increasing");
        }
    }
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
        throw ValidationError("signal-to-noise ratio must be a real value or +infinity");
    }
    if (!(forcing_intensity > 0.0)) throw ValidationError("forcing intensity must be positive");
}

std::vector<BeamMode> solve_modes(const BeamSpec& beam) {
    beam.validate();
    const double min_span =
        *std::min_element(beam.layout.span_lengths_m.begin(), beam.layout.span_lengths_m.end());
    const double beta_min = 0.1 * std::numbers::pi / beam.layout.total_length_m();
    const double beta_max =
        (beam.n_modes + beam.layout.span_count() + 2) * std::numbers::pi / min_span;
    const std::vector<double> roots =
        find_characteristic_roots(beam.layout, beta_min, beta_max, beam.n_modes);

    std::vector<BeamMode> modes;
    modes.reserve(roots.size());
    const double wave_speed = std::sqrt(beam.ei_over_rho_a());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const double beta = roots[i];
        const CharacteristicPoint point = characteristic_point(beam.layout, beta);

        BeamMode mode;
        mode.beta = beta;
        mode.frequency_hz = beta * beta * wave_speed / (2.0 * std::numbers::pi);
        mode.model.layout = beam.layout;
        mode.model.mode_index = int(i) + 1;
        mode.model.beta_per_span.assign(std::size_t(beam.layout.span_count()), beta);
        mode.model.constants.resize(std::size_t(beam.layout.span_count()));
        for (int k = 0; k < beam.layout.span_count(); ++k) {
            for (int c = 0; c < 4; ++c) {
                mode.model.constants[std::size_t(k)][std::size_t(c)] =
                    point.constants(4 * k + c);
            }
        }
        modes.push_back(std::move(mode));
    }
    return modes;
}

double calibrate_first_frequency(const SpanLayout& layout, double target_f1_hz) {
    layout.validate();
    if (!(target_f1_hz > 0.0)) throw ValidationError("target frequency must be positive");
    const double min_span =
        *std::min_element(layout.span_lengths_m.begin(), layout.span_lengths_m.end());
    const double beta_min = 0.1 * std::numbers::pi / layout.total_length_m();
    const double beta_max = (layout.span_count() + 3) * std::numbers::pi / min_span;
    const double beta1 = find_characteristic_roots(layout, beta_min, beta_max, 1).front();
    const double speed = 2.0 * std::numbers::pi * target_f1_hz / (beta1 * beta1);
    return speed * speed;
}

SimOutput simulate(const SimScenario& scenario) {
    scenario.validate();
    const std::vector<BeamMode> modes = solve_modes(scenario.beam);

    const double fs = scenario.fs_hz;
    const double dt = 1.0 / fs;
    const Eigen::Index samples = Eigen::Index(std::llround(scenario.duration_s * fs));
    for (const BeamMode& mode : modes) {
        if (mode.frequency_hz > fs / 2.0) {
            throw NyquistViolation("mode at " + std::to_string(mode.frequency_hz) +
                                   " Hz exceeds the Nyquist frequency " +
                                   std::to_string(fs / 2.0) + " Hz");
        }
    }

    const std::vector<double> strain_positions = scenario.channel_positions();
    const Eigen::Index strain_channels = Eigen::Index(strain_positions.size());
    const Eigen::Index accel_channels = Eigen::Index(scenario.accel_positions_m.size());

    Eigen::MatrixXd strain = Eigen::MatrixXd::Zero(strain_channels, samples);
    Eigen::MatrixXd accel = Eigen::MatrixXd::Zero(accel_channels, samples);

    GaussianSampler draw(scenario.seed);
    const double input_std = std::sqrt(scenario.forcing_intensity);

    Eigen::VectorXd q(samples);
    Eigen::VectorXd qdd(samples);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const BeamMode& mode = modes[i];
        const double zeta = scenario.beam.damping_for_mode(int(i) + 1);
        const double omega = 2.0 * std::numbers::pi * mode.frequency_hz;
        const double omega_d = omega * std::sqrt(1.0 - zeta * zeta);

        // Exact zero-order-hold discretization of the modal oscillator
        // qdd + 2 zeta omega qd + omega^2 q = u.
        const double decay = std::exp(-zeta * omega * dt);
        const double cosd = std::cos(omega_d * dt);
        const double sind = std::sin(omega_d * dt);
        const double a00 = decay * (cosd + zeta * omega * sind / omega_d);
        const double a01 = decay * sind / omega_d;
        const double a10 = -omega * omega * a01;
        const double a11 = decay * (cosd - zeta * omega * sind / omega_d);
        const double b0 = -2.0 * zeta / omega * a01 - (a11 - 1.0) / (omega * omega);
        const double b1 = a01;

        double x0 = 0.0;
        double x1 = 0.0;
        for (Eigen::Index k = 0; k < samples; ++k) {
            const double u = input_std * draw();
            q(k) = x0;
            qdd(k) = -omega * omega * x0 - 2.0 * zeta * omega * x1 + u;
            const double next0 = a00 * x0 + a01 * x1 + b0 * u;
            x1 = a10 * x0 + a11 * x1 + b1 * u;
            x0 = next0;
        }

        Eigen::VectorXd strain_shape(strain_channels);
        for (Eigen::Index c = 0; c < strain_channels; ++c) {
            strain_shape(c) = mode.model.strain_at(strain_positions[std::size_t(c)]);
        }
        strain.noalias() += strain_shape * q.transpose();

        if (accel_channels > 0) {
            Eigen::VectorXd disp_shape(accel_channels);
            for (Eigen::Index c = 0; c < accel_channels; ++c) {
                disp_shape(c) =
                    mode.model.displacement_at(scenario.accel_positions_m[std::size_t(c)]);
            }
            accel.noalias() += disp_shape * qdd.transpose();
        }
    }

    if (std::isfinite(scenario.snr_db)) {
        const double power_ratio = std::pow(10.0, scenario.snr_db / 10.0);
        auto add_noise = [&](Eigen::MatrixXd& mat) {
            for (Eigen::Index c = 0; c < mat.rows(); ++c) {
                const double power = mat.row(c).squaredNorm() / double(samples);
                const double sigma = std::sqrt(power / power_ratio);
                for (Eigen::Index k = 0; k < samples; ++k) mat(c, k) += sigma * draw();
            }
        };
        add_noise(strain);
        add_noise(accel);
    }

    SimOutput output{
        StrainRecord(std::move(strain), fs, strain_positions),
        AccelRecord(std::move(accel), fs, scenario.accel_positions_m),
        {},
        scenario.beam.ei_over_rho_a(),
    };
    output.truth.reserve(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        GroundTruthMode truth;
        truth.beta = modes[i].beta;
        truth.frequency_hz = modes[i].frequency_hz;
        truth.damping_ratio = scenario.beam.damping_for_mode(int(i) + 1);
        truth.sms = eval_sms(modes[i].model, strain_positions).values;
        truth.dms = eval_dms(modes[i].model, strain_positions).values;
        output.truth.push_back(std::move(truth));
    }
    return output;
}

SimScenario default_scenario() {
    SimScenario scenario;
    scenario.beam.layout.span_lengths_m = {16.0, 18.0, 16.0};
    scenario.beam.layout.fiber_offset_m = 0.05;
    scenario.beam.rho_a_kg_per_m = 1.0;
    scenario.beam.ei_n_m2 = calibrate_first_frequency(scenario.beam.layout, 4.61);
    scenario.beam.modal_damping = {0.02};
    scenario.beam.n_modes = 3;
    scenario.accel_positions_m = {5.0, 13.0, 25.0, 37.0, 45.0};
    return scenario;
}

} // namespace strainmodal
