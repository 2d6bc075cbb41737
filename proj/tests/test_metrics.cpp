#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <strainmodal/errors.hpp>
#include <strainmodal/metrics.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

using namespace strainmodal;

namespace {

constexpr double kPi = std::numbers::pi;

ModalEstimate mode_of(double freq, const Eigen::VectorXd& shape) {
    ModalEstimate mode;
    mode.frequency_hz = freq;
    mode.damping_ratio = 0.01;
    mode.shape = shape.cast<std::complex<double>>();
    return mode;
}

Eigen::VectorXd sine_shape(int harmonics, int points) {
    Eigen::VectorXd shape(points);
    for (int k = 0; k < points; ++k) {
        shape(k) = std::sin(harmonics * kPi * double(k + 1) / double(points + 1));
    }
    return shape;
}

} // namespace

TEST_CASE("mac basics") {
    Eigen::VectorXd a(3);
    a << 1.0, 2.0, -1.0;
    CHECK(mac(a, a) == doctest::Approx(1.0));

    Eigen::VectorXd e1(2), e2(2);
    e1 << 1.0, 0.0;
    e2 << 0.0, 1.0;
    CHECK(mac(e1, e2) == doctest::Approx(0.0));

    CHECK(mac(sine_shape(1, 50), sine_shape(2, 50)) < 0.02);

    Eigen::VectorXd b(4);
    CHECK_THROWS_AS(mac(a, Eigen::VectorXd::Ones(4)), LengthMismatch);
    CHECK_THROWS_AS(mac(a, Eigen::VectorXd::Zero(3)), ZeroVector);
}

TEST_CASE("mac is symmetric and scale invariant") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Eigen::VectorXcd a(6), b(6);
    for (Eigen::Index k = 0; k < 6; ++k) {
        a(k) = {uniform(rng), uniform(rng)};
        b(k) = {uniform(rng), uniform(rng)};
    }
    const double base = mac(a, b);
    CHECK(mac(b, a) == doctest::Approx(base).epsilon(1e-12));

    for (int trial = 0; trial < 10; ++trial) {
        const std::complex<double> sa(uniform(rng) + 1.5, uniform(rng));
        const std::complex<double> sb(uniform(rng) - 1.5, uniform(rng));
        CHECK(mac(Eigen::VectorXcd(sa * a), Eigen::VectorXcd(sb * b)) ==
              doctest::Approx(base).epsilon(1e-12));
    }
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);
}

TEST_CASE("mode pairing on nearby frequency sets") {
    const Eigen::VectorXd s1 = sine_shape(1, 20);
    const Eigen::VectorXd s2 = sine_shape(2, 20);
    const Eigen::VectorXd s3 = sine_shape(3, 20);

    const std::vector<ModalEstimate> ours = {mode_of(4.57, s1), mode_of(6.33, s2),
                                             mode_of(8.94, s3)};
    const std::vector<ModalEstimate> reference = {mode_of(4.61, s1), mode_of(6.32, s2),
                                                  mode_of(8.85, s3)};

    const ModalComparison comparison = pair_modes(ours, reference);
    REQUIRE(comparison.pairs.size() == 3);
    CHECK(comparison.unmatched_a.empty());
    CHECK(comparison.unmatched_b.empty());
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(comparison.pairs[k].index_a == int(k));
        CHECK(comparison.pairs[k].index_b == int(k));
    }
    CHECK(comparison.pairs[0].abs_freq_diff_hz == doctest::Approx(0.04));
    CHECK(comparison.pairs[1].abs_freq_diff_hz == doctest::Approx(0.01));
    CHECK(comparison.pairs[2].abs_freq_diff_hz == doctest::Approx(0.09));
    CHECK(comparison.mad_hz == doctest::Approx((0.04 + 0.01 + 0.09) / 3.0));
    CHECK(comparison.mean_mac == doctest::Approx(1.0));
}

TEST_CASE("identical sets give perfect agreement") {
    const std::vector<ModalEstimate> set = {mode_of(4.61, sine_shape(1, 12)),
                                            mode_of(6.32, sine_shape(2, 12))};
    const ModalComparison comparison = pair_modes(set, set);
    CHECK(comparison.mean_mac == doctest::Approx(1.0));
    CHECK(comparison.mad_hz == doctest::Approx(0.0));
}

TEST_CASE("surplus modes are reported as unmatched") {
    const std::vector<ModalEstimate> three = {mode_of(4.6, sine_shape(1, 12)),
                                              mode_of(6.3, sine_shape(2, 12)),
                                              mode_of(8.9, sine_shape(3, 12))};
    const std::vector<ModalEstimate> two = {mode_of(4.6, sine_shape(1, 12)),
                                            mode_of(6.3, sine_shape(2, 12))};

    const ModalComparison comparison = pair_modes(three, two);
    CHECK(comparison.pairs.size() == 2);
    REQUIRE(comparison.unmatched_a.size() == 1);
    CHECK(comparison.unmatched_a[0] == 2);
    CHECK(comparison.unmatched_b.empty());
}

TEST_CASE("pairing ignores input order") {
    const std::vector<ModalEstimate> ours = {mode_of(4.57, sine_shape(1, 20)),
                                             mode_of(6.33, sine_shape(2, 20)),
                                             mode_of(8.94, sine_shape(3, 20))};
    const std::vector<ModalEstimate> shuffled = {ours[2], ours[0], ours[1]};
    const std::vector<ModalEstimate> reference = {mode_of(4.61, sine_shape(1, 20)),
                                                  mode_of(6.32, sine_shape(2, 20)),
                                                  mode_of(8.85, sine_shape(3, 20))};

    const ModalComparison base = pair_modes(ours, reference);
    const ModalComparison mixed = pair_modes(shuffled, reference);
    CHECK(base.mean_mac == doctest::Approx(mixed.mean_mac).epsilon(1e-12));
    CHECK(base.mad_hz == doctest::Approx(mixed.mad_hz).epsilon(1e-12));

    // same physical pairing, expressed through the permuted indices
    std::vector<std::pair<double, double>> base_pairs, mixed_pairs;
    for (const ModePair& p : base.pairs) base_pairs.push_back({p.freq_a_hz, p.freq_b_hz});
    for (const ModePair& p : mixed.pairs) mixed_pairs.push_back({p.freq_a_hz, p.freq_b_hz});
    std::sort(base_pairs.begin(), base_pairs.end());
    std::sort(mixed_pairs.begin(), mixed_pairs.end());
    CHECK(base_pairs == mixed_pairs);
}

TEST_CASE("improvement percentages") {
    CHECK(improvement_percent(0.80, 0.465) == doctest::Approx(72.0).epsilon(0.01));
    CHECK(improvement_percent(0.80, 0.721) == doctest::Approx(11.0).epsilon(0.01));
    CHECK(improvement_percent(0.75, 0.75) == doctest::Approx(0.0));
    CHECK(improvement_percent(0.5, 0.8) < 0.0);
    CHECK_THROWS_AS(improvement_percent(0.5, 0.0), DivideByZeroBaseline);
}
