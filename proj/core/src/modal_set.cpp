#include "strainmodal/modal_set.hpp"

#include "strainmodal/errors.hpp"

#include <string>

namespace strainmodal {

void ModalSet::validate() const {
    if (kind != "SMS" && kind != "DMS") {
        throw ValidationError("modal set kind must be SMS or DMS, got '" + kind + "'");
    }
    if (modes.empty() && positions_m.empty()) return;
    if (positions_m.empty()) {
        throw ValidationError("modal set has modes but no sample positions");
    }
    for (std::size_t i = 1; i < positions_m.size(); ++i) {
        if (!(positions_m[i] > positions_m[i - 1])) {
            throw ValidationError("sample positions must be strictly increasing");
        }
    }
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const ModalEstimate& mode = modes[i];
        if (mode.shape.size() != Eigen::Index(positions_m.size())) {
            throw ValidationError("mode " + std::to_string(i + 1) + " has " +
                                  std::to_string(mode.shape.size()) + " shape values for " +
                                  std::to_string(positions_m.size()) + " positions");
        }
        if (!(mode.frequency_hz > 0.0)) {
            throw ValidationError("mode " + std::to_string(i + 1) +
                                  " has a non-positive frequency");
        }
        if (!std::isfinite(mode.damping_ratio) || !mode.shape.allFinite()) {
            throw ValidationError("mode " + std::to_string(i + 1) +
                                  " carries non-finite values");
        }
    }
}

} // namespace strainmodal
