#include "strainmodal/record.hpp"

#include "strainmodal/errors.hpp"

#include <cmath>
#include <utility>

namespace strainmodal {

Record::Record(Eigen::MatrixXd samples, double sampling_rate_hz,
               std::vector<double> channel_positions_m)
    : samples_(std::move(samples)),
      sampling_rate_hz_(sampling_rate_hz),
      positions_(std::move(channel_positions_m)) {
    if (!(sampling_rate_hz_ > 0.0)) {
        throw ValidationError("sampling rate must be positive, got " +
                              std::to_string(sampling_rate_hz_));
    }
    if (Eigen::Index(positions_.size()) != samples_.rows()) {
        throw ValidationError("channel position count (" + std::to_string(positions_.size()) +
                              ") does not match channel count (" +
                              std::to_string(samples_.rows()) + ")");
    }
    for (std::size_t i = 1; i < positions_.size(); ++i) {
        if (!(positions_[i] > positions_[i - 1])) {
            throw ValidationError("channel positions must be strictly increasing");
        }
    }
    if (!samples_.allFinite()) {
        throw ValidationError("record contains non-finite samples");
    }
}

Record Record::with_samples(Eigen::MatrixXd samples) const {
    if (samples.rows() != samples_.rows() || samples.cols() != samples_.cols()) {
        throw ValidationError("replacement samples must keep the record dimensions");
    }
    return Record(std::move(samples), sampling_rate_hz_, positions_);
}

} // namespace strainmodal
