#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <strainmodal/errors.hpp>
#include <strainmodal/metrics.hpp>
#include <strainmodal/sim.hpp>
#include <strainmodal/ssi.hpp>

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

Record make_record(const Eigen::MatrixXd& samples, double fs) {
    std::vector<double> positions(std::size_t(samples.rows()));
    for (std::size_t c = 0; c < positions.size(); ++c) positions[c] = double(c);
    return Record(samples, fs, positions);
}

// Moore-Penrose pseudoinverse, the brute-force reference the projection is
// checked against.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double tol = 1e-12 * svd.singularValues()(0) * double(std::max(m.rows(), m.cols()));
    Eigen::VectorXd inv = svd.singularValues();
    for (Eigen::Index k = 0; k < inv.size(); ++k) {
        inv(k) = inv(k) > tol ? 1.0 / inv(k) : 0.0;
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

std::complex<double> discrete_pole(double freq_hz, double damping, double fs) {
    const double omega = 2.0 * kPi * freq_hz;
    const std::complex<double> continuous(-damping * omega,
                                          omega * std::sqrt(1.0 - damping * damping));
    return std::exp(continuous / fs);
}

// Free decay of lightly damped modes: every Hankel row then lies exactly in
// the span of the modal geometric sequences, so subspace realization is
// exact rather than asymptotic.
Eigen::MatrixXd free_decay(const std::vector<std::complex<double>>& poles,
                           const Eigen::MatrixXd& shapes, Eigen::Index samples) {
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(shapes.rows(), samples);
    for (std::size_t i = 0; i < poles.size(); ++i) {
        std::complex<double> state(0.3 + 0.7 * double(i + 1), 0.4);
        for (Eigen::Index k = 0; k < samples; ++k) {
            y.col(k) += shapes.col(Eigen::Index(i)) * state.real();
            state *= poles[i];
        }
    }
    return y;
}

Eigen::MatrixXd rotation_block(double freq_hz, double fs, double radius = 1.0) {
    const double theta = 2.0 * kPi * freq_hz / fs;
    Eigen::MatrixXd block(2, 2);
    block << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return radius * block;
}

} // namespace

TEST_CASE("block hankel layout for one channel") {
    Eigen::MatrixXd samples(1, 5);
    samples << 1.0, 2.0, 3.0, 4.0, 5.0;
    const Eigen::MatrixXd hankel = build_block_hankel(make_record(samples, 10.0), 1);

    REQUIRE(hankel.rows() == 2);
    REQUIRE(hankel.cols() == 4);
    Eigen::MatrixXd expected(2, 4);
    expected << 1, 2, 3, 4, 2, 3, 4, 5;
    expected /= 2.0; // 1/sqrt(j), j = 4
    CHECK((hankel - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("block hankel interleaves channels within a block row") {
    Eigen::MatrixXd samples(2, 6);
    samples << 1, 2, 3, 4, 5, 6, 10, 20, 30, 40, 50, 60;
    const Eigen::MatrixXd hankel = build_block_hankel(make_record(samples, 10.0), 1);

    REQUIRE(hankel.rows() == 4);
    REQUIRE(hankel.cols() == 5);
    const double scale = 1.0 / std::sqrt(5.0);
    CHECK(hankel(0, 0) == doctest::Approx(1.0 * scale));
    CHECK(hankel(1, 0) == doctest::Approx(10.0 * scale));
    CHECK(hankel(2, 0) == doctest::Approx(2.0 * scale));
    CHECK(hankel(3, 0) == doctest::Approx(20.0 * scale));
    CHECK(hankel(2, 4) == doctest::Approx(6.0 * scale));
}

TEST_CASE("block hankel has shift structure") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Eigen::MatrixXd samples(3, 64);
    for (Eigen::Index c = 0; c < 3; ++c) {
        for (Eigen::Index t = 0; t < 64; ++t) samples(c, t) = uniform(rng);
    }
    const int i = 4;
    const int m = 3;
    const Eigen::MatrixXd hankel = build_block_hankel(make_record(samples, 10.0), i);

    for (int r = 1; r < 2 * i; ++r) {
        for (Eigen::Index c = 0; c + 1 < hankel.cols(); ++c) {
            const Eigen::VectorXd here = hankel.block(r * m, c, m, 1);
            const Eigen::VectorXd prev = hankel.block((r - 1) * m, c + 1, m, 1);
            REQUIRE((here - prev).cwiseAbs().maxCoeff() < 1e-15);
        }
    }
}

TEST_CASE("block hankel rejects short records") {
    CHECK_THROWS_AS(build_block_hankel(make_record(Eigen::MatrixXd::Ones(1, 3), 10.0), 2),
                    RecordTooShort);
    // tall-and-narrow is as unusable as too few samples: 4 channels over 18
    // samples give 15 columns against 16 rows
    CHECK_THROWS_AS(build_block_hankel(make_record(Eigen::MatrixXd::Ones(4, 18), 10.0), 2),
                    RecordTooShort);
    CHECK_THROWS_AS(build_block_hankel(make_record(Eigen::MatrixXd::Ones(1, 5), 10.0), 0),
                    ValidationError);
}

TEST_CASE("projection reproduces future rows contained in the past span") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    const int i = 3, m = 1;
    const Eigen::Index j = 24;
    Eigen::MatrixXd past(i * m, j);
    for (Eigen::Index r = 0; r < past.rows(); ++r) {
        for (Eigen::Index c = 0; c < j; ++c) past(r, c) = uniform(rng);
    }
    Eigen::MatrixXd hankel(2 * i * m, j);
    hankel << past, past;

    const Eigen::MatrixXd p = project_future_onto_past(hankel, i, m);
    CHECK((p - past).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("projection of an orthogonal future vanishes") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    const int i = 2, m = 2;
    const Eigen::Index j = 40;
    Eigen::MatrixXd raw(j, 2 * i * m);
    for (Eigen::Index r = 0; r < j; ++r) {
        for (Eigen::Index c = 0; c < raw.cols(); ++c) raw(r, c) = uniform(rng);
    }
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(raw)
                                  .householderQ() *
                              Eigen::MatrixXd::Identity(j, 2 * i * m);
    Eigen::MatrixXd hankel(2 * i * m, j);
    hankel.topRows(i * m) = q.leftCols(i * m).transpose();
    hankel.bottomRows(i * m) = q.rightCols(i * m).transpose();

    const Eigen::MatrixXd p = project_future_onto_past(hankel, i, m);
    CHECK(p.norm() < 1e-10);
}

TEST_CASE("projection matches the explicit pseudoinverse formula") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    const int i = 2, m = 2;
    const Eigen::Index j = 30;
    Eigen::MatrixXd hankel(2 * i * m, j);
    for (Eigen::Index r = 0; r < hankel.rows(); ++r) {
        for (Eigen::Index c = 0; c < j; ++c) hankel(r, c) = uniform(rng);
    }
    const Eigen::MatrixXd yp = hankel.topRows(i * m);
    const Eigen::MatrixXd yf = hankel.bottomRows(i * m);
    const Eigen::MatrixXd expected = yf * yp.transpose() * pinv(yp * yp.transpose()) * yp;

    const Eigen::MatrixXd p = project_future_onto_past(hankel, i, m);
    CHECK((p - expected).norm() < 1e-8);

    SUBCASE("idempotence: re-projecting onto the past span is a no-op") {
        const Eigen::MatrixXd again = p * yp.transpose() * pinv(yp * yp.transpose()) * yp;
        CHECK((again - p).norm() < 1e-10);
    }
}

TEST_CASE("projection rejects a rank-zero past") {
    Eigen::MatrixXd hankel = Eigen::MatrixXd::Zero(4, 12);
    hankel.bottomRows(2).setOnes();
    CHECK_THROWS_AS(project_future_onto_past(hankel, 1, 2), RankDeficientPast);
}

TEST_CASE("realization recovers exact poles from an order-2 free decay") {
    const double fs = 100.0;
    const std::complex<double> pole = discrete_pole(5.0, 0.02, fs);
    Eigen::MatrixXd shapes(3, 1);
    shapes << 1.0, 0.6, -0.4;
    const Eigen::MatrixXd y = free_decay({pole}, shapes, 400);

    const int i = 4;
    const Eigen::MatrixXd hankel = build_block_hankel(make_record(y, fs), i);
    const Eigen::MatrixXd p = project_future_onto_past(hankel, i, 3);
    const StateSpaceRealization real = realize(p, 2, 3, fs);

    REQUIRE(real.order == 2);
    const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(real.A).eigenvalues();
    const double err0 = std::abs(eig(0) - pole) / std::abs(pole);
    const double err1 = std::abs(eig(1) - pole) / std::abs(pole);
    CHECK(std::min(err0, err1) < 1e-6);
    CHECK(std::abs(real.spectral_radius - std::abs(pole)) < 1e-6);
    CHECK_FALSE(real.has_unstable_poles);
    CHECK_FALSE(real.odd_order);
}

TEST_CASE("realization rejects impossible orders") {
    const Eigen::MatrixXd p = Eigen::MatrixXd::Random(2, 10);
    CHECK_THROWS_AS(realize(p, 0, 1, 10.0), OrderTooHigh);
    // two block rows of one channel leave no spare row for the shift
    CHECK_THROWS_AS(realize(p, 2, 1, 10.0), OrderTooHigh);
}

TEST_CASE("realization refuses orders beyond the projection rank") {
    const double fs = 100.0;
    const std::complex<double> pole = discrete_pole(5.0, 0.02, fs);
    Eigen::MatrixXd shapes(2, 1);
    shapes << 1.0, 0.5;
    const Eigen::MatrixXd y = free_decay({pole}, shapes, 300);
    const int i = 4;
    const Eigen::MatrixXd hankel = build_block_hankel(make_record(y, fs), i);
    const Eigen::MatrixXd p = project_future_onto_past(hankel, i, 2);
    CHECK_THROWS_AS(realize(p, 6, 2, fs), OrderTooHigh);
}

TEST_CASE("realized poles are invariant under uniform data scaling") {
    const double fs = 100.0;
    const std::vector<std::complex<double>> poles = {discrete_pole(4.0, 0.01, fs),
                                                     discrete_pole(9.0, 0.03, fs)};
    Eigen::MatrixXd shapes(3, 2);
    shapes << 1.0, 0.8, 0.6, -0.5, -0.3, 0.9;
    const Eigen::MatrixXd y = free_decay(poles, shapes, 500);

    auto poles_of = [&](const Eigen::MatrixXd& data) {
        const int i = 5;
        const Eigen::MatrixXd hankel = build_block_hankel(make_record(data, fs), i);
        const Eigen::MatrixXd p = project_future_onto_past(hankel, i, 3);
        Eigen::VectorXcd eig =
            Eigen::EigenSolver<Eigen::MatrixXd>(realize(p, 4, 3, fs).A).eigenvalues();
        std::sort(eig.data(), eig.data() + eig.size(),
                  [](std::complex<double> a, std::complex<double> b) {
                      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
                  });
        return eig;
    };

    const Eigen::VectorXcd base = poles_of(y);
    const Eigen::VectorXcd scaled = poles_of(10.0 * y);
    for (Eigen::Index k = 0; k < base.size(); ++k) {
        CHECK(std::abs(scaled(k) - base(k)) / std::abs(base(k)) < 1e-9);
    }
}

TEST_CASE("mode extraction converts a unit-circle rotation to an undamped mode") {
    StateSpaceRealization real;
    real.A = rotation_block(4.61, 250.0);
    real.C = Eigen::MatrixXd::Identity(2, 2);
    real.order = 2;
    real.sampling_rate_hz = 250.0;

    const std::vector<ModalEstimate> modes = extract_modes(real, SsiConfig{});
    REQUIRE(modes.size() == 1);
    CHECK(modes[0].frequency_hz == doctest::Approx(4.61).epsilon(1e-9));
    CHECK(std::abs(modes[0].damping_ratio) < 1e-9);
}

TEST_CASE("mode extraction drops purely real poles") {
    StateSpaceRealization real;
    real.A = Eigen::Vector2d(0.5, 0.25).asDiagonal();
    real.C = Eigen::MatrixXd::Identity(2, 2);
    real.order = 2;
    real.sampling_rate_hz = 100.0;
    CHECK(extract_modes(real, SsiConfig{}).empty());
}

TEST_CASE("mode extraction sorts by frequency and normalizes shapes") {
    const auto block_for = [](double f, double zeta, double fs) {
        const std::complex<double> pole = discrete_pole(f, zeta, fs);
        Eigen::MatrixXd block(2, 2);
        block << pole.real(), -pole.imag(), pole.imag(), pole.real();
        return block;
    };
    StateSpaceRealization real;
    real.A = Eigen::MatrixXd::Zero(4, 4);
    real.A.topLeftCorner(2, 2) = block_for(6.32, 0.01, 250.0);
    real.A.bottomRightCorner(2, 2) = block_for(4.61, 0.015, 250.0);
    Eigen::MatrixXd c(3, 4);
    c << 1.0, 0.2, -0.3, 0.4, 0.5, -0.6, 0.7, 0.1, -0.2, 0.3, 0.9, -0.5;
    real.C = c;
    real.order = 4;
    real.sampling_rate_hz = 250.0;

    const std::vector<ModalEstimate> modes = extract_modes(real, SsiConfig{});
    REQUIRE(modes.size() == 2);
    CHECK(modes[0].frequency_hz == doctest::Approx(4.61).epsilon(1e-6));
    CHECK(modes[1].frequency_hz == doctest::Approx(6.32).epsilon(1e-6));
    CHECK(modes[0].damping_ratio == doctest::Approx(0.015).epsilon(1e-6));
    CHECK(modes[1].damping_ratio == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(modes[0].frequency_hz < modes[1].frequency_hz);

    for (const ModalEstimate& mode : modes) {
        Eigen::Index at = 0;
        mode.shape.cwiseAbs().maxCoeff(&at);
        CHECK(mode.shape(at) == std::complex<double>(1.0, 0.0));
        CHECK(mode.frequency_hz > 0.0);
        CHECK(mode.frequency_hz < 125.0);
    }
}

TEST_CASE("mode extraction honors the damping bounds") {
    StateSpaceRealization real;
    real.A = rotation_block(10.0, 100.0, 0.5); // heavily damped pole
    real.C = Eigen::MatrixXd::Identity(2, 2);
    real.order = 2;
    real.sampling_rate_hz = 100.0;
    CHECK(extract_modes(real, SsiConfig{}).empty());
}

TEST_CASE("stabilization scan flags persistent modes on a clean two-mode record") {
    SimScenario scenario;
    scenario.beam.layout.span_lengths_m = {12.0};
    scenario.beam.layout.fiber_offset_m = 0.05;
    scenario.beam.ei_n_m2 = calibrate_first_frequency(scenario.beam.layout, 4.0);
    scenario.beam.rho_a_kg_per_m = 1.0;
    scenario.beam.modal_damping = {0.02};
    scenario.beam.n_modes = 2;
    scenario.duration_s = 120.0;
    scenario.fs_hz = 100.0;
    scenario.channel_spacing_m = 2.0;
    scenario.seed = 99;
    const SimOutput sim = simulate(scenario);
    const std::vector<double> truth = {sim.truth[0].frequency_hz, sim.truth[1].frequency_hz};

    SsiConfig config;
    config.block_rows = 8;
    config.order_min = 2;
    config.order_max = 8;
    const StabilizationDiagram diagram = stabilization_scan(sim.strain, config);
    CHECK(diagram.failed_orders.empty());

    // order 2 can hold only one conjugate pair, so full two-mode stability
    // is expected from order 6 on (order 4 is the first to see both modes).
    for (int order : {6, 8}) {
        for (double f : truth) {
            const bool found = std::any_of(
                diagram.entries.begin(), diagram.entries.end(),
                [&](const StabilizationEntry& e) {
                    return e.model_order == order && e.fully_stable() &&
                           std::abs(e.mode.frequency_hz - f) / f < 0.01;
                });
            CHECK_MESSAGE(found, "order ", order, " missing stable mode near ", f, " Hz");
        }
    }

    SUBCASE("entries are sorted by order then frequency") {
        for (std::size_t k = 1; k < diagram.entries.size(); ++k) {
            const StabilizationEntry& a = diagram.entries[k - 1];
            const StabilizationEntry& b = diagram.entries[k];
            const bool ordered =
                a.model_order < b.model_order ||
                (a.model_order == b.model_order &&
                 a.mode.frequency_hz <= b.mode.frequency_hz);
            REQUIRE(ordered);
        }
    }

    SUBCASE("selection returns the physical modes") {
        const std::vector<ModalEstimate> selected = select_modes(diagram, 2);
        REQUIRE(selected.size() == 2);
        CHECK(std::abs(selected[0].frequency_hz - truth[0]) / truth[0] < 0.01);
        CHECK(std::abs(selected[1].frequency_hz - truth[1]) / truth[1] < 0.01);
        CHECK_THROWS_AS(select_modes(diagram, 5), NotEnoughStableModes);
    }
}

TEST_CASE("white noise never yields a persistent stable mode") {
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd samples(6, 6000);
    for (Eigen::Index c = 0; c < samples.rows(); ++c) {
        for (Eigen::Index t = 0; t < samples.cols(); ++t) samples(c, t) = gauss(rng);
    }
    SsiConfig config;
    config.block_rows = 10;
    config.order_min = 2;
    config.order_max = 12;
    const StabilizationDiagram diagram =
        stabilization_scan(make_record(samples, 100.0), config);
    CHECK_THROWS_AS(select_modes(diagram, 1), NotEnoughStableModes);
}

TEST_CASE("a single-order scan has no stability flags") {
    // one mode, so order 2 is the exact model for the record
    const double fs = 100.0;
    const std::vector<std::complex<double>> poles = {discrete_pole(4.0, 0.01, fs)};
    Eigen::MatrixXd shapes(3, 1);
    shapes << 1.0, 0.6, -0.3;
    const Eigen::MatrixXd y = free_decay(poles, shapes, 500);

    SsiConfig config;
    config.block_rows = 5;
    config.order_min = 2;
    config.order_max = 2;
    const StabilizationDiagram diagram = stabilization_scan(make_record(y, fs), config);
    REQUIRE(diagram.entries.size() == 1);
    const StabilizationEntry& entry = diagram.entries.front();
    CHECK(entry.model_order == 2);
    CHECK(entry.mode.frequency_hz == doctest::Approx(4.0).epsilon(1e-6));
    CHECK_FALSE(entry.freq_stable);
    CHECK_FALSE(entry.damp_stable);
    CHECK_FALSE(entry.shape_stable);
}

TEST_CASE("conjugate duplicates collapse into one cluster") {
    StabilizationDiagram diagram;
    auto add = [&](int order, double freq) {
        StabilizationEntry entry;
        entry.model_order = order;
        entry.mode.frequency_hz = freq;
        entry.mode.damping_ratio = 0.01;
        entry.mode.shape = Eigen::VectorXcd::Ones(3);
        entry.mode.order_found = order;
        entry.freq_stable = entry.damp_stable = entry.shape_stable = true;
        diagram.entries.push_back(entry);
    };
    // the same physical mode reported twice per order
    add(4, 5.0);
    add(4, 5.0001);
    add(6, 5.0);
    add(6, 5.0001);

    const std::vector<ModalEstimate> one = select_modes(diagram, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].frequency_hz == doctest::Approx(5.0).epsilon(1e-3));
    CHECK(one[0].order_found == 6);
    CHECK_THROWS_AS(select_modes(diagram, 2), NotEnoughStableModes);
}

TEST_CASE("csv serialization of the diagram") {
    StabilizationDiagram diagram;
    StabilizationEntry entry;
    entry.model_order = 4;
    entry.mode.frequency_hz = 4.61;
    entry.mode.damping_ratio = 0.02;
    entry.mode.shape = Eigen::VectorXcd::Ones(2);
    entry.freq_stable = true;
    diagram.entries.push_back(entry);

    const std::string csv = diagram.to_csv();
    CHECK(csv.find("order,frequency_hz,damping,f_stable,d_stable,s_stable") == 0);
    CHECK(csv.find("4,4.61") != std::string::npos);
    CHECK(csv.find(",1,0,0") != std::string::npos);
}
