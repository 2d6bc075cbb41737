#include "strainmodal/metrics.hpp"

#include "strainmodal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace strainmodal {

namespace {

template <typename Vector>
double mac_impl(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw LengthMismatch("shape lengths differ: " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    }
    const double aa = a.squaredNorm();
    const double bb = b.squaredNorm();
    if (aa == 0.0 || bb == 0.0) throw ZeroVector("modal assurance needs nonzero shapes");
    return std::norm(std::complex<double>(a.adjoint() * b)) / (aa * bb);
}

} // namespace

double mac(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return mac_impl(a, b); }

double mac(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size()) {
        throw LengthMismatch("shape lengths differ: " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    }
    const double aa = a.squaredNorm();
    const double bb = b.squaredNorm();
    if (aa == 0.0 || bb == 0.0) throw ZeroVector("modal assurance needs nonzero shapes");
    const double dot = a.dot(b);
    return dot * dot / (aa * bb);
}

ModalComparison pair_modes(const std::vector<ModalEstimate>& set_a,
                           const std::vector<ModalEstimate>& set_b) {
    struct Candidate {
        int a;
        int b;
        double mac_value;
        double freq_diff;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(set_a.size() * set_b.size());
    for (int i = 0; i < int(set_a.size()); ++i) {
        for (int k = 0; k < int(set_b.size()); ++k) {
            Candidate c;
            c.a = i;
            c.b = k;
            c.mac_value = mac(set_a[std::size_t(i)].shape, set_b[std::size_t(k)].shape);
            c.freq_diff = std::abs(set_a[std::size_t(i)].frequency_hz -
                                   set_b[std::size_t(k)].frequency_hz);
            candidates.push_back(c);
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
        if (x.mac_value != y.mac_value) return x.mac_value > y.mac_value;
        if (x.freq_diff != y.freq_diff) return x.freq_diff < y.freq_diff;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });

    std::vector<bool> used_a(set_a.size(), false);
    std::vector<bool> used_b(set_b.size(), false);
    ModalComparison result;
    for (const Candidate& c : candidates) {
        if (used_a[std::size_t(c.a)] || used_b[std::size_t(c.b)]) continue;
        used_a[std::size_t(c.a)] = true;
        used_b[std::size_t(c.b)] = true;
        ModePair pair;
        pair.index_a = c.a;
        pair.index_b = c.b;
        pair.mac = c.mac_value;
        pair.freq_a_hz = set_a[std::size_t(c.a)].frequency_hz;
        pair.freq_b_hz = set_b[std::size_t(c.b)].frequency_hz;
        pair.abs_freq_diff_hz = c.freq_diff;
        result.pairs.push_back(pair);
    }
    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const ModePair& x, const ModePair& y) { return x.index_a < y.index_a; });

    for (int i = 0; i < int(set_a.size()); ++i) {
        if (!used_a[std::size_t(i)]) result.unmatched_a.push_back(i);
    }
    for (int k = 0; k < int(set_b.size()); ++k) {
        if (!used_b[std::size_t(k)]) result.unmatched_b.push_back(k);
    }

    if (!result.pairs.empty()) {
        double mac_sum = 0.0;
        double diff_sum = 0.0;
        for (const ModePair& pair : result.pairs) {
            mac_sum += pair.mac;
            diff_sum += pair.abs_freq_diff_hz;
        }
        result.mean_mac = mac_sum / double(result.pairs.size());
        result.mad_hz = diff_sum / double(result.pairs.size());
    }
    return result;
}

double improvement_percent(double mac_ours, double mac_baseline) {
    if (mac_baseline == 0.0) {
        throw DivideByZeroBaseline("baseline value is zero, improvement is undefined");
    }
    return (mac_ours - mac_baseline) / mac_baseline * 100.0;
}

} // namespace strainmodal
