#pragma once

#include "strainmodal/record.hpp"

namespace strainmodal {

// High-pass filter applied per channel before identification. The magnitude
// response is Butterworth; zero_phase runs the filter forward and backward
// so channel-to-channel phase relations are preserved.
struct FilterSpec {
    enum class Kind { high_pass };

    double cutoff_hz = 1.0;
    int order = 4;
    Kind kind = Kind::high_pass;
    bool zero_phase = true;
};

// Filters every channel independently. Output dimensions equal input
// dimensions. Channels are reflect-padded by 3x the filter order and each
// pass starts from its steady-state response to the first padded sample,
// which kills startup transients (a constant channel maps to exact zeros).
//
// Throws InvalidCutoff if cutoff_hz >= sampling_rate/2, RecordTooShort if
// the record has fewer than 3x order samples.
Record high_pass(const Record& record, const FilterSpec& spec);

// Removes the least-squares line (mean and slope) from every channel.
// Idempotent.
Record detrend(const Record& record);

} // namespace strainmodal
