#pragma once

#include <Eigen/Core>

#include <vector>

namespace strainmodal {

// Multi-channel time series on a uniform sampling grid. Rows of `samples`
// are channels, columns are time steps. Channel positions are longitudinal
// coordinates along the structure, strictly increasing, one per channel.
//
// Strain values follow the dimensionless microstrain convention (1e-6);
// acceleration records reuse the same container with m/s^2 values.
class Record {
public:
    Record() = default;

    // Validates on construction; throws ValidationError on non-finite
    // samples, non-positive sampling rate, or bad channel positions.
    Record(Eigen::MatrixXd samples, double sampling_rate_hz,
           std::vector<double> channel_positions_m);

    const Eigen::MatrixXd& samples() const { return samples_; }
    double sampling_rate_hz() const { return sampling_rate_hz_; }
    const std::vector<double>& channel_positions_m() const { return positions_; }

    Eigen::Index channel_count() const { return samples_.rows(); }
    Eigen::Index sample_count() const { return samples_.cols(); }
    double duration_s() const {
        return sampling_rate_hz_ > 0 ? double(sample_count()) / sampling_rate_hz_ : 0.0;
    }

    // Returns a copy with the same geometry but different samples. The new
    // samples must have identical dimensions.
    Record with_samples(Eigen::MatrixXd samples) const;

private:
    Eigen::MatrixXd samples_;
    double sampling_rate_hz_ = 0.0;
    std::vector<double> positions_;
};

using StrainRecord = Record;
using AccelRecord = Record;

} // namespace strainmodal
