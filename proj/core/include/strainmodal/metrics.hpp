#pragma once

#include "strainmodal/ssi.hpp"

#include <Eigen/Core>

#include <vector>

namespace strainmodal {

// Modal assurance criterion |a^H b|^2 / ((a^H a)(b^H b)), in [0, 1].
// Throws LengthMismatch and ZeroVector.
double mac(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);
double mac(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct ModePair {
    int index_a = -1;
    int index_b = -1;
    double mac = 0.0;
    double freq_a_hz = 0.0;
    double freq_b_hz = 0.0;
    double abs_freq_diff_hz = 0.0;
};

struct ModalComparison {
    std::vector<ModePair> pairs;   // ordered by index_a
    std::vector<int> unmatched_a;
    std::vector<int> unmatched_b;
    double mean_mac = 0.0;
    double mad_hz = 0.0;           // mean absolute frequency difference over pairs
};

// Greedy one-to-one pairing by descending MAC, ties broken by smaller
// frequency difference. Deterministic and independent of input order.
ModalComparison pair_modes(const std::vector<ModalEstimate>& set_a,
                           const std::vector<ModalEstimate>& set_b);

// Signed percentage (ours - baseline) / baseline * 100.
double improvement_percent(double mac_ours, double mac_baseline);

} // namespace strainmodal
