#pragma once

#include "strainmodal/beam.hpp"
#include "strainmodal/record.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace strainmodal {

// Physical beam description. Frequencies follow from the characteristic
// roots as omega_i = beta_i^2 * sqrt(EI / rhoA).
struct BeamSpec {
    SpanLayout layout;
    double ei_n_m2 = 1.0;          // flexural rigidity
    double rho_a_kg_per_m = 1.0;   // mass per unit length
    std::vector<double> modal_damping; // one ratio per mode, or one broadcast
    int n_modes = 3;

    double ei_over_rho_a() const { return ei_n_m2 / rho_a_kg_per_m; }
    double damping_for_mode(int mode_index) const;
    void validate() const;
};

struct SimScenario {
    BeamSpec beam;
    double duration_s = 480.0;
    double fs_hz = 250.0;
    double channel_spacing_m = 1.0;
    std::vector<double> accel_positions_m;
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 2021;
    double forcing_intensity = 1.0; // modal white-noise variance scale

    std::vector<double> channel_positions() const;
    void validate() const;
};

struct BeamMode {
    double beta = 0.0;          // 1/m
    double frequency_hz = 0.0;
    ShapeModel model;           // strain and displacement shapes share constants
};

// Exact modes of the beam: characteristic roots of the boundary-condition
// matrix, constants from its null space, frequencies from the dispersion
// relation. Throws RootsNotFound if the root scan cannot supply n_modes.
std::vector<BeamMode> solve_modes(const BeamSpec& beam);

// EI/rhoA ratio that places the first natural frequency at the target.
double calibrate_first_frequency(const SpanLayout& layout, double target_f1_hz);

struct GroundTruthMode {
    double beta = 0.0;
    double frequency_hz = 0.0;
    double damping_ratio = 0.0;
    Eigen::VectorXd sms;  // at strain channel positions, max-abs 1
    Eigen::VectorXd dms;  // at strain channel positions, max-abs 1
};

struct SimOutput {
    StrainRecord strain;
    AccelRecord accel;
    std::vector<GroundTruthMode> truth;
    double ei_over_rho_a = 0.0;
};

// Simulates the beam under stochastic modal excitation. Each modal
// coordinate is an SDOF oscillator driven by white noise, discretized
// exactly (zero-order hold), so the discrete poles carry no stepping bias.
// Strain channels superpose strain shapes times modal coordinates;
// accelerometers superpose displacement shapes times modal accelerations.
// Additive white Gaussian noise per channel at the configured SNR.
// Deterministic for a fixed seed.
SimOutput simulate(const SimScenario& scenario);

// Three spans of 16/18/16 m, 1 m channel spacing, 250 Hz, 480 s, 2% damping,
// EI/rhoA calibrated so the first mode sits at 4.61 Hz.
SimScenario default_scenario();

} // namespace strainmodal
