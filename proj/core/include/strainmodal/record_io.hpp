#pragma once

#include "strainmodal/record.hpp"

#include <filesystem>

namespace strainmodal {

enum class RecordFormat { csv, binary_f64 };

struct LoadOptions {
    // Convert the ingested samples by central differences (scaled by the
    // sampling rate), turning strain into strain rate. Off by default.
    bool differentiate = false;
};

// CSV layout: first row "fs=<value>", second row comma-separated channel
// positions, then one time step per row.
//
// Binary layout: magic "SMR1", little-endian u32 channel count, u32 sample
// count, f64 sampling rate, f64 positions, then row-major f64 samples
// (each channel contiguous).
Record load_record(const std::filesystem::path& path, RecordFormat format,
                   const LoadOptions& options = {});

void save_record(const Record& record, const std::filesystem::path& path,
                 RecordFormat format);

} // namespace strainmodal
