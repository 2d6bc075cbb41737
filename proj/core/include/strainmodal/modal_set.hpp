#pragma once

#include "strainmodal/beam.hpp"
#include "strainmodal/ssi.hpp"

#include <map>
#include <string>
#include <vector>

namespace strainmodal {

// A set of identified or reference modes sampled on one common grid.
// This is the unit of exchange between the pipeline stages.
struct ModalSet {
    std::vector<ModalEstimate> modes;
    std::vector<double> positions_m;
    std::string kind = "SMS";                     // "SMS" or "DMS"
    std::map<std::string, std::string> meta;      // source, seed, generated_at ...

    void validate() const;
};

} // namespace strainmodal
