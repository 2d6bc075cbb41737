#pragma once

#include "strainmodal/record.hpp"

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

namespace strainmodal {

// Discrete-time stochastic state-space realization identified from output
// data: x(k+1) = A x(k) + w(k), y(k) = C x(k) + v(k).
struct StateSpaceRealization {
    Eigen::MatrixXd A;  // n x n
    Eigen::MatrixXd C;  // m x n
    int order = 0;
    double sampling_rate_hz = 0.0;

    // Diagnostics: physical modes come in conjugate pairs, so an odd order
    // is suspicious; eigenvalues outside the unit circle are permitted but
    // flagged.
    double spectral_radius = 0.0;
    bool has_unstable_poles = false;
    bool odd_order = false;
};

struct ModalEstimate {
    double frequency_hz = 0.0;
    double damping_ratio = 0.0;
    Eigen::VectorXcd shape;  // normalized: max-magnitude entry is exactly 1+0i
    int order_found = 0;
};

struct SsiConfig {
    // 0 selects the default rule ceil(1.5 * fs / (f_low * channels)),
    // clamped to [10, 60] and to what the record length allows.
    int block_rows = 0;

    int order_min = 2;
    int order_max = 20;
    int order_step = 2;

    std::pair<double, double> freq_band_hz{0.5, 1e12};  // upper also capped at fs/2
    std::pair<double, double> damping_bounds{-0.01, 0.2};

    // Stabilization thresholds between consecutive model orders.
    double stab_freq_tol = 0.01;   // relative
    double stab_damp_tol = 0.05;   // absolute
    double stab_mac_tol = 0.98;

    // Relative frequency linkage used when clustering stable entries.
    double cluster_tol = 0.01;

    int effective_block_rows(double sampling_rate_hz, Eigen::Index channels,
                             Eigen::Index sample_count) const;
    void validate() const;
};

struct StabilizationEntry {
    int model_order = 0;
    ModalEstimate mode;
    bool freq_stable = false;
    bool damp_stable = false;
    bool shape_stable = false;

    bool fully_stable() const { return freq_stable && damp_stable && shape_stable; }
};

struct StabilizationDiagram {
    std::vector<StabilizationEntry> entries;  // sorted by (model_order, frequency)
    std::vector<std::pair<int, std::string>> failed_orders;

    std::string to_csv() const;  // order,frequency_hz,damping,f_stable,d_stable,s_stable
};

// Block Hankel matrix of the record: 2i block rows of m channels, j = T-2i+1
// columns, scaled by 1/sqrt(j). Block r at column c holds y(r+c). The top i
// blocks are the past, the bottom i the future.
Eigen::MatrixXd build_block_hankel(const StrainRecord& record, int block_rows);

// Orthogonal projection of the future row space onto the past row space,
// computed from an LQ factorization of the full Hankel matrix; no Gram
// matrix inverse is ever formed. Throws RankDeficientPast when the past
// block has numerical rank zero.
Eigen::MatrixXd project_future_onto_past(const Eigen::MatrixXd& hankel, int block_rows,
                                         int channels);

// Balanced realization from the projection: SVD, observability matrix from
// the leading `order` singular triplets, C from its first block row, A from
// the shift-invariance least-squares problem.
// Throws OrderTooHigh when the order is not positive, exceeds the rank of
// the projection, or leaves no spare block row for the shift.
StateSpaceRealization realize(const Eigen::MatrixXd& projection, int order, int channels,
                              double sampling_rate_hz);

// Eigendecomposition of A; keeps poles with positive imaginary part,
// converts to continuous time via fs*log(lambda), filters by the configured
// frequency band and damping bounds, sorts by frequency. Shapes are C times
// the eigenvector, normalized to 1+0i at the max-magnitude channel.
std::vector<ModalEstimate> extract_modes(const StateSpaceRealization& realization,
                                         const SsiConfig& config);

// Runs realize + extract_modes over the configured order range on one shared
// projection. A mode is flagged stable when the closest-frequency mode at
// the previous order agrees in frequency (1%), damping (0.05) and shape
// (MAC > 0.98); the three flags are recorded separately. Per-order failures
// are recorded, not fatal.
StabilizationDiagram stabilization_scan(const StrainRecord& record, const SsiConfig& config);

// Clusters fully-stable entries by relative frequency linkage and returns
// the n lowest clusters: median frequency and damping, shape from the
// highest order in the cluster. Clusters need at least two entries, so a
// mode must persist across three consecutive orders to be selectable.
// Throws NotEnoughStableModes.
std::vector<ModalEstimate> select_modes(const StabilizationDiagram& diagram, int n_modes,
                                        double cluster_tol = 0.01);

} // namespace strainmodal
