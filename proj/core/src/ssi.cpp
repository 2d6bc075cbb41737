#include "strainmodal/ssi.hpp"

#include "strainmodal/errors.hpp"
#include "strainmodal/metrics.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace strainmodal {

namespace {

// L21 restricted to the row space of the past: the projection with the
// orthonormal right factor dropped. Its left singular vectors and singular
// values match the full projection's exactly.
Eigen::MatrixXd projection_core(const Eigen::MatrixXd& lower, Eigen::Index past_rows) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(lower.topLeftCorner(past_rows, past_rows),
                                       Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw SvdFailure("singular value decomposition of the past block failed");
    }
    const Eigen::Index rank = svd.rank();
    if (rank == 0) {
        throw RankDeficientPast("past block of the data matrix has rank zero");
    }
    Eigen::MatrixXd core = lower.block(past_rows, 0, past_rows, past_rows);
    if (rank < past_rows) {
        const Eigen::MatrixXd basis = svd.matrixV().leftCols(rank);
        core = core * (basis * basis.transpose());
    }
    return core;
}

// The same compressed projection computed from the Gram matrix of the Hankel
// blocks: with Gpp = W L W^T, the orthonormal past row basis is
// Q1 = L_r^{-1/2} W_r^T Hp, so Hf Q1^T = Gfp W_r L_r^{-1/2} and its left
// singular pairs match the full projection's. One symmetric rank update over
// the columns replaces the LQ pass; on half-hour records that is the
// difference between seconds and minutes.
Eigen::MatrixXd projection_core_gram(const Eigen::MatrixXd& hankel, Eigen::Index past_rows) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(hankel.rows(), hankel.rows());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(hankel);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram.topLeftCorner(past_rows, past_rows));
    if (eig.info() != Eigen::Success) {
        throw SvdFailure("spectral decomposition of the past Gram block failed");
    }
    const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
    const double lambda_max = lambda(past_rows - 1);
    const double tol =
        lambda_max * double(past_rows) * std::numeric_limits<double>::epsilon();
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < past_rows; ++k) {
        if (lambda(k) > tol) ++rank;
    }
    if (!(lambda_max > 0.0) || rank == 0) {
        throw RankDeficientPast("past block of the data matrix has rank zero");
    }
    const Eigen::MatrixXd basis = eig.eigenvectors().rightCols(rank);
    const Eigen::VectorXd inv_sigma = lambda.tail(rank).cwiseSqrt().cwiseInverse();
    return gram.block(past_rows, 0, past_rows, past_rows) * basis * inv_sigma.asDiagonal();
}

double median(std::vector<double> values) {
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + std::ptrdiff_t(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + std::ptrdiff_t(mid));
    return 0.5 * (lower + upper);
}

} // namespace

int SsiConfig::effective_block_rows(double sampling_rate_hz, Eigen::Index channels,
                                    Eigen::Index sample_count) const {
    if (channels < 1 || sample_count < 1) {
        throw ValidationError("record must have channels and samples");
    }
    // Largest block count that still leaves at least as many Hankel columns
    // as rows.
    const int feasible = int((sample_count + 1) / (2 * channels + 2));
    if (block_rows > 0) {
        if (block_rows > feasible) {
            throw InsufficientSamples("record supports at most " + std::to_string(feasible) +
                                      " block rows, got " + std::to_string(block_rows));
        }
        return block_rows;
    }
    const double f_low = std::max(freq_band_hz.first, 1e-6);
    int rows = int(std::ceil(1.5 * sampling_rate_hz / (f_low * double(channels))));
    rows = std::clamp(rows, 10, 60);
    rows = std::min(rows, feasible);
    if (rows < 2) {
        throw InsufficientSamples("record too short for subspace identification");
    }
    return rows;
}

void SsiConfig::validate() const {
    if (block_rows < 0) throw ValidationError("block rows cannot be negative");
    if (order_min < 1 || order_max < order_min || order_step < 1) {
        throw ValidationError("order range must satisfy 1 <= order_min <= order_max, step >= 1");
    }
    if (!(freq_band_hz.first >= 0.0) || !(freq_band_hz.second > freq_band_hz.first)) {
        throw ValidationError("frequency band must satisfy 0 <= low < high");
    }
    if (!(damping_bounds.second > damping_bounds.first)) {
        throw ValidationError("damping bounds must satisfy low < high");
    }
    if (!(stab_freq_tol > 0.0) || !(stab_damp_tol > 0.0)) {
        throw ValidationError("stabilization tolerances must be positive");
    }
    if (!(stab_mac_tol > 0.0) || stab_mac_tol > 1.0) {
        throw ValidationError("shape stabilization threshold must lie in (0, 1]");
    }
    if (!(cluster_tol > 0.0)) throw ValidationError("cluster tolerance must be positive");
}

Eigen::MatrixXd build_block_hankel(const StrainRecord& record, int block_rows) {
    if (block_rows < 1) throw ValidationError("block rows must be positive");
    const Eigen::Index m = record.channel_count();
    const Eigen::Index T = record.sample_count();
    const Eigen::Index j = T - 2 * Eigen::Index(block_rows) + 1;
    if (j < 1) {
        throw RecordTooShort("record has " + std::to_string(T) + " samples, need at least " +
                             std::to_string(2 * block_rows));
    }
    if (j < 2 * Eigen::Index(block_rows) * m) {
        throw RecordTooShort("Hankel matrix would be taller than wide: " +
                             std::to_string(2 * block_rows * m) + " rows of " +
                             std::to_string(j) + " columns");
    }
    Eigen::MatrixXd hankel(2 * block_rows * m, j);
    const double scale = 1.0 / std::sqrt(double(j));
    for (Eigen::Index r = 0; r < 2 * block_rows; ++r) {
        hankel.middleRows(r * m, m) = record.samples().middleCols(r, j) * scale;
    }
    return hankel;
}

Eigen::MatrixXd project_future_onto_past(const Eigen::MatrixXd& hankel, int block_rows,
                                         int channels) {
    if (block_rows < 1 || channels < 1) {
        throw ValidationError("block rows and channels must be positive");
    }
    const Eigen::Index past_rows = Eigen::Index(block_rows) * channels;
    if (hankel.rows() != 2 * past_rows) {
        throw ValidationError("Hankel height must be twice block_rows times channels");
    }
    if (hankel.cols() < hankel.rows()) {
        throw ValidationError("Hankel needs at least as many columns as rows");
    }

    Eigen::MatrixXd transposed = hankel.transpose();
    Eigen::HouseholderQR<Eigen::Ref<Eigen::MatrixXd>> qr(transposed);
    const Eigen::MatrixXd lower =
        Eigen::MatrixXd(qr.matrixQR().topRows(hankel.rows()).triangularView<Eigen::Upper>())
            .transpose();
    const Eigen::MatrixXd core = projection_core(lower, past_rows);

    // Right factor: the orthonormal rows spanning the past block's row space.
    Eigen::MatrixXd q1 = Eigen::MatrixXd::Identity(hankel.cols(), past_rows);
    q1.applyOnTheLeft(qr.householderQ());
    return core * q1.transpose();
}

StateSpaceRealization realize(const Eigen::MatrixXd& projection, int order, int channels,
                              double sampling_rate_hz) {
    if (channels < 1) throw ValidationError("channel count must be positive");
    if (!(sampling_rate_hz > 0.0)) throw ValidationError("sampling rate must be positive");
    if (projection.rows() % channels != 0) {
        throw ValidationError("projection height must be a multiple of the channel count");
    }
    const Eigen::Index blocks = projection.rows() / channels;
    if (order < 1) throw OrderTooHigh("model order must be positive");
    if (blocks < 2 || order > (blocks - 1) * channels) {
        throw OrderTooHigh("order " + std::to_string(order) +
                           " leaves no spare block row for the shift");
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(projection, Eigen::ComputeThinU);
    if (svd.info() != Eigen::Success) {
        throw SvdFailure("singular value decomposition of the projection failed");
    }
    if (order > svd.rank()) {
        throw OrderTooHigh("order " + std::to_string(order) + " exceeds the projection rank " +
                           std::to_string(svd.rank()));
    }

    const Eigen::MatrixXd observability =
        svd.matrixU().leftCols(order) *
        svd.singularValues().head(order).cwiseSqrt().asDiagonal();

    StateSpaceRealization realization;
    realization.order = order;
    realization.sampling_rate_hz = sampling_rate_hz;
    realization.C = observability.topRows(channels);

    const Eigen::Index shift_rows = projection.rows() - channels;
    realization.A = observability.topRows(shift_rows)
                        .colPivHouseholderQr()
                        .solve(observability.bottomRows(shift_rows));

    const Eigen::VectorXcd poles =
        Eigen::EigenSolver<Eigen::MatrixXd>(realization.A, false).eigenvalues();
    realization.spectral_radius = poles.cwiseAbs().maxCoeff();
    realization.has_unstable_poles = realization.spectral_radius > 1.0;
    realization.odd_order = order % 2 != 0;
    return realization;
}

std::vector<ModalEstimate> extract_modes(const StateSpaceRealization& realization,
                                         const SsiConfig& config) {
    config.validate();
    const double fs = realization.sampling_rate_hz;
    if (!(fs > 0.0)) throw ValidationError("realization carries no sampling rate");
    if (realization.A.rows() != realization.A.cols() ||
        realization.C.cols() != realization.A.rows()) {
        throw ValidationError("system matrices have inconsistent shapes");
    }

    Eigen::EigenSolver<Eigen::MatrixXd> eig(realization.A);
    if (eig.info() != Eigen::Success || !eig.eigenvalues().allFinite()) {
        throw DefectiveSystemMatrix("eigendecomposition of the system matrix failed");
    }

    const double f_high = std::min(config.freq_band_hz.second, fs / 2.0);
    std::vector<ModalEstimate> modes;
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
        const std::complex<double> pole = eig.eigenvalues()(k);
        if (!(pole.imag() > 0.0)) continue;  // one pole per conjugate pair

        const std::complex<double> continuous = std::log(pole) * fs;
        const double magnitude = std::abs(continuous);
        if (magnitude == 0.0) continue;
        const double frequency = magnitude / (2.0 * std::numbers::pi);
        const double damping = -continuous.real() / magnitude;
        if (frequency < config.freq_band_hz.first || frequency > f_high) continue;
        if (damping < config.damping_bounds.first || damping > config.damping_bounds.second) {
            continue;
        }

        Eigen::VectorXcd shape = realization.C * eig.eigenvectors().col(k);
        Eigen::Index at = 0;
        shape.cwiseAbs().maxCoeff(&at);
        if (std::abs(shape(at)) == 0.0) continue;
        shape /= shape(at);
        shape(at) = 1.0;

        ModalEstimate mode;
        mode.frequency_hz = frequency;
        mode.damping_ratio = damping;
        mode.shape = std::move(shape);
        mode.order_found = realization.order;
        modes.push_back(std::move(mode));
    }
    std::sort(modes.begin(), modes.end(), [](const ModalEstimate& a, const ModalEstimate& b) {
        return a.frequency_hz < b.frequency_hz;
    });
    return modes;
}

StabilizationDiagram stabilization_scan(const StrainRecord& record, const SsiConfig& config) {
    config.validate();
    const Eigen::Index m = record.channel_count();
    const int block_rows =
        config.effective_block_rows(record.sampling_rate_hz(), m, record.sample_count());
    const Eigen::Index past_rows = Eigen::Index(block_rows) * m;

    // One pass over the data serves every model order; only the compressed
    // projection core is kept, so the per-order work is small.
    Eigen::MatrixXd core;
    {
        const Eigen::MatrixXd hankel = build_block_hankel(record, block_rows);
        core = projection_core_gram(hankel, past_rows);
    }

    StabilizationDiagram diagram;
    std::vector<ModalEstimate> previous;
    bool have_previous = false;
    for (int order = config.order_min; order <= config.order_max; order += config.order_step) {
        try {
            const StateSpaceRealization realization =
                realize(core, order, int(m), record.sampling_rate_hz());
            std::vector<ModalEstimate> modes = extract_modes(realization, config);
            for (ModalEstimate& mode : modes) {
                StabilizationEntry entry;
                entry.model_order = order;
                entry.mode = mode;
                if (have_previous && !previous.empty()) {
                    const ModalEstimate* closest = &previous.front();
                    for (const ModalEstimate& cand : previous) {
                        if (std::abs(cand.frequency_hz - mode.frequency_hz) <
                            std::abs(closest->frequency_hz - mode.frequency_hz)) {
                            closest = &cand;
                        }
                    }
                    entry.freq_stable =
                        std::abs(mode.frequency_hz - closest->frequency_hz) <=
                        config.stab_freq_tol * std::max(mode.frequency_hz, 1e-12);
                    entry.damp_stable = std::abs(mode.damping_ratio - closest->damping_ratio) <=
                                        config.stab_damp_tol;
                    entry.shape_stable = mac(mode.shape, closest->shape) > config.stab_mac_tol;
                }
                diagram.entries.push_back(std::move(entry));
            }
            previous = std::move(modes);
            have_previous = true;
        } catch (const Error& err) {
            diagram.failed_orders.emplace_back(order, err.what());
            previous.clear();
            have_previous = false;
        }
    }
    return diagram;
}

std::string StabilizationDiagram::to_csv() const {
    std::ostringstream out;
    out.precision(std::numeric_limits<double>::max_digits10);
    out << "order,frequency_hz,damping,f_stable,d_stable,s_stable\n";
    for (const StabilizationEntry& entry : entries) {
        out << entry.model_order << ',' << entry.mode.frequency_hz << ','
            << entry.mode.damping_ratio << ',' << int(entry.freq_stable) << ','
            << int(entry.damp_stable) << ',' << int(entry.shape_stable) << '\n';
    }
    return out.str();
}

std::vector<ModalEstimate> select_modes(const StabilizationDiagram& diagram, int n_modes,
                                        double cluster_tol) {
    if (n_modes < 1) throw ValidationError("need at least one mode");
    if (!(cluster_tol > 0.0)) throw ValidationError("cluster tolerance must be positive");

    std::vector<const StabilizationEntry*> stable;
    for (const StabilizationEntry& entry : diagram.entries) {
        if (entry.fully_stable()) stable.push_back(&entry);
    }
    std::sort(stable.begin(), stable.end(),
              [](const StabilizationEntry* a, const StabilizationEntry* b) {
                  return a->mode.frequency_hz < b->mode.frequency_hz;
              });

    std::vector<std::vector<const StabilizationEntry*>> clusters;
    for (const StabilizationEntry* entry : stable) {
        if (clusters.empty() ||
            entry->mode.frequency_hz >
                clusters.back().back()->mode.frequency_hz * (1.0 + cluster_tol)) {
            clusters.emplace_back();
        }
        clusters.back().push_back(entry);
    }
    std::erase_if(clusters, [](const auto& cluster) { return cluster.size() < 2; });

    if (int(clusters.size()) < n_modes) {
        throw NotEnoughStableModes("only " + std::to_string(clusters.size()) +
                                   " modes persist across consecutive orders, need " +
                                   std::to_string(n_modes));
    }

    std::vector<ModalEstimate> selected;
    selected.reserve(std::size_t(n_modes));
    for (int c = 0; c < n_modes; ++c) {
        const auto& cluster = clusters[std::size_t(c)];
        std::vector<double> freqs;
        std::vector<double> damps;
        const StabilizationEntry* best = cluster.front();
        for (const StabilizationEntry* entry : cluster) {
            freqs.push_back(entry->mode.frequency_hz);
            damps.push_back(entry->mode.damping_ratio);
            if (entry->model_order >= best->model_order) best = entry;
        }
        ModalEstimate mode;
        mode.frequency_hz = median(std::move(freqs));
        mode.damping_ratio = median(std::move(damps));
        mode.shape = best->mode.shape;
        mode.order_found = best->model_order;
        selected.push_back(std::move(mode));
    }
    return selected;
}

} // namespace strainmodal
