#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <strainmodal/errors.hpp>
#include <strainmodal/filter.hpp>
#include <strainmodal/record.hpp>
#include <strainmodal/record_io.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

using namespace strainmodal;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

Record make_record(const Eigen::MatrixXd& samples, double fs) {
    std::vector<double> positions(std::size_t(samples.rows()));
    for (std::size_t c = 0; c < positions.size(); ++c) positions[c] = double(c);
    return Record(samples, fs, positions);
}

Eigen::RowVectorXd sine(double freq_hz, double fs, Eigen::Index n, double amplitude = 1.0,
                        double phase = 0.0) {
    Eigen::RowVectorXd x(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        x(k) = amplitude * std::sin(2.0 * kPi * freq_hz * double(k) / fs + phase);
    }
    return x;
}

// Least-squares fit of a*sin + b*cos at a known frequency; returns
// (amplitude, phase) of the component.
std::pair<double, double> fit_tone(const Eigen::RowVectorXd& x, double freq_hz, double fs) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd basis(n, 2);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double arg = 2.0 * kPi * freq_hz * double(k) / fs;
        basis(k, 0) = std::sin(arg);
        basis(k, 1) = std::cos(arg);
    }
    const Eigen::Vector2d ab = basis.colPivHouseholderQr().solve(x.transpose());
    return {std::hypot(ab(0), ab(1)), std::atan2(ab(1), ab(0))};
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("strainmodal_signal_" + name);
}

} // namespace

TEST_CASE("record construction validates geometry and finiteness") {
    Eigen::MatrixXd samples = Eigen::MatrixXd::Ones(2, 4);

    CHECK_THROWS_AS(Record(samples, 0.0, {0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(Record(samples, -5.0, {0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(Record(samples, 100.0, {0.0}), ValidationError);
    CHECK_THROWS_AS(Record(samples, 100.0, {1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(Record(samples, 100.0, {2.0, 1.0}), ValidationError);

    samples(1, 2) = std::nan("");
    CHECK_THROWS_AS(Record(samples, 100.0, {0.0, 1.0}), ValidationError);

    samples(1, 2) = 0.0;
    const Record record = make_record(samples, 100.0);
    CHECK(record.channel_count() == 2);
    CHECK(record.sample_count() == 4);
    CHECK(record.duration_s() == doctest::Approx(0.04));
    CHECK_THROWS_AS(record.with_samples(Eigen::MatrixXd::Zero(3, 4)), ValidationError);
}

TEST_CASE("csv record round trip") {
    const fs::path path = temp_file("roundtrip.csv");
    {
        std::ofstream out(path);
        out << "fs=250\n";
        out << "0.0, 1.5, 3.0\n";
        out << "1, 2, 3\n";
        out << "4, 5, 6\n";
        out << "\n";
        out << "7, 8, 9\n";
        out << "10, 11, 12\n";
    }
    const Record record = load_record(path, RecordFormat::csv);
    CHECK(record.channel_count() == 3);
    CHECK(record.sample_count() == 4);
    CHECK(record.sampling_rate_hz() == 250.0);
    CHECK(record.channel_positions_m() == std::vector<double>{0.0, 1.5, 3.0});
    CHECK(record.samples()(0, 0) == 1.0);
    CHECK(record.samples()(2, 0) == 3.0);
    CHECK(record.samples()(1, 3) == 11.0);

    const fs::path copy = temp_file("roundtrip_copy.csv");
    save_record(record, copy, RecordFormat::csv);
    const Record again = load_record(copy, RecordFormat::csv);
    CHECK(again.samples() == record.samples());
    CHECK(again.channel_positions_m() == record.channel_positions_m());
    fs::remove(path);
    fs::remove(copy);
}

TEST_CASE("csv rejects malformed input") {
    const fs::path path = temp_file("bad.csv");

    SUBCASE("missing sampling-rate header") {
        std::ofstream(path) << "250\n0,1\n1,2\n";
        CHECK_THROWS_AS(load_record(path, RecordFormat::csv), ParseError);
    }
    SUBCASE("field count mismatch") {
        std::ofstream(path) << "fs=250\n0,1\n1,2\n1\n";
        CHECK_THROWS_AS(load_record(path, RecordFormat::csv), ParseError);
    }
    SUBCASE("non-numeric field") {
        std::ofstream(path) << "fs=250\n0,1\n1,abc\n";
        CHECK_THROWS_AS(load_record(path, RecordFormat::csv), ParseError);
    }
    SUBCASE("nan sample rejected by validation") {
        std::ofstream(path) << "fs=250\n0,1\n1,2\nnan,3\n";
        CHECK_THROWS_AS(load_record(path, RecordFormat::csv), Error);
    }
    SUBCASE("no sample rows") {
        std::ofstream(path) << "fs=250\n0,1\n";
        CHECK_THROWS_AS(load_record(path, RecordFormat::csv), ParseError);
    }
    fs::remove(path);
}

TEST_CASE("binary record round trip is bit exact") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Eigen::MatrixXd samples(3, 17);
    for (Eigen::Index c = 0; c < 3; ++c) {
        for (Eigen::Index t = 0; t < 17; ++t) samples(c, t) = uniform(rng);
    }
    const Record record(samples, 123.456, {0.0, 0.25, 1.0});

    const fs::path path = temp_file("roundtrip.smr");
    save_record(record, path, RecordFormat::binary_f64);
    const Record loaded = load_record(path, RecordFormat::binary_f64);

    CHECK(loaded.sampling_rate_hz() == 123.456);
    CHECK(loaded.channel_positions_m() == record.channel_positions_m());
    REQUIRE(loaded.samples().rows() == record.samples().rows());
    REQUIRE(loaded.samples().cols() == record.samples().cols());
    CHECK((loaded.samples().array() == record.samples().array()).all());
    fs::remove(path);
}

TEST_CASE("binary loader rejects foreign files") {
    const fs::path path = temp_file("foreign.bin");
    std::ofstream(path, std::ios::binary) << "not a record";
    CHECK_THROWS_AS(load_record(path, RecordFormat::binary_f64), ParseError);
    fs::remove(path);
}

TEST_CASE("differentiation on load uses central differences") {
    Eigen::MatrixXd samples(1, 5);
    samples << 0.0, 1.0, 4.0, 9.0, 16.0;
    const fs::path path = temp_file("diff.smr");
    save_record(make_record(samples, 10.0), path, RecordFormat::binary_f64);

    LoadOptions options;
    options.differentiate = true;
    const Record rate = load_record(path, RecordFormat::binary_f64, options);

    CHECK(rate.samples()(0, 0) == doctest::Approx(10.0));   // one-sided
    CHECK(rate.samples()(0, 1) == doctest::Approx(20.0));   // (4-0)/2 * 10
    CHECK(rate.samples()(0, 2) == doctest::Approx(40.0));
    CHECK(rate.samples()(0, 3) == doctest::Approx(60.0));
    CHECK(rate.samples()(0, 4) == doctest::Approx(70.0));   // one-sided
    fs::remove(path);
}

TEST_CASE("high-pass rejects DC") {
    const double fs = 250.0;
    const Record record = make_record(Eigen::MatrixXd::Constant(1, 2000, 5.0), fs);
    const Record filtered = high_pass(record, FilterSpec{});
    CHECK(filtered.samples().cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("high-pass preserves a passband tone") {
    const double fs = 250.0;
    const Eigen::Index n = 5000;
    Eigen::MatrixXd samples(1, n);
    samples.row(0) = sine(10.0, fs, n);
    const Record filtered = high_pass(make_record(samples, fs), FilterSpec{});

    // steady-state region, away from the ends
    const Eigen::RowVectorXd mid = filtered.samples().row(0).segment(500, n - 1000);
    Eigen::RowVectorXd ref(n - 1000);
    for (Eigen::Index k = 0; k < ref.size(); ++k) {
        ref(k) = std::sin(2.0 * kPi * 10.0 * double(k + 500) / fs);
    }
    const auto [amp_out, phase_out] = fit_tone(mid, 10.0, fs);
    const auto [amp_in, phase_in] = fit_tone(ref, 10.0, fs);
    CHECK(amp_out == doctest::Approx(amp_in).epsilon(0.01));
    double dphi = phase_out - phase_in;
    while (dphi > kPi) dphi -= 2.0 * kPi;
    while (dphi < -kPi) dphi += 2.0 * kPi;
    CHECK(std::abs(dphi) < 0.01);
}

TEST_CASE("high-pass attenuates a sub-cutoff tone by at least 20 dB") {
    const double fs = 250.0;
    const Eigen::Index n = 50000; // several periods of the 0.2 Hz component
    Eigen::MatrixXd samples(1, n);
    samples.row(0) = sine(0.2, fs, n) + sine(5.0, fs, n);
    const Record filtered = high_pass(make_record(samples, fs), FilterSpec{});

    const Eigen::RowVectorXd mid = filtered.samples().row(0).segment(2500, n - 5000);
    const double low_amp = fit_tone(mid, 0.2, fs).first;
    const double high_amp = fit_tone(mid, 5.0, fs).first;
    CHECK(20.0 * std::log10(1.0 / low_amp) > 20.0);
    CHECK(high_amp == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("high-pass is linear") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    const Eigen::Index n = 800;
    Eigen::MatrixXd x(2, n), y(2, n);
    for (Eigen::Index c = 0; c < 2; ++c) {
        for (Eigen::Index t = 0; t < n; ++t) {
            x(c, t) = uniform(rng);
            y(c, t) = uniform(rng);
        }
    }
    const double fs = 100.0;
    const double a = 2.5, b = -0.75;
    const FilterSpec spec;
    const Eigen::MatrixXd lhs =
        high_pass(make_record(a * x + b * y, fs), spec).samples();
    const Eigen::MatrixXd rhs = a * high_pass(make_record(x, fs), spec).samples() +
                                b * high_pass(make_record(y, fs), spec).samples();
    CHECK((lhs - rhs).norm() / rhs.norm() < 1e-9);
}

TEST_CASE("zero-phase filtering is direction blind away from the ends") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    const Eigen::Index n = 3000;
    Eigen::MatrixXd x(1, n);
    for (Eigen::Index t = 0; t < n; ++t) x(0, t) = uniform(rng);

    const double fs = 100.0;
    const FilterSpec spec;
    const Eigen::MatrixXd forward = high_pass(make_record(x, fs), spec).samples();
    const Eigen::MatrixXd reversed =
        high_pass(make_record(x.rowwise().reverse(), fs), spec).samples();
    // edge transients are not reversal symmetric, but they decay with the
    // filter poles, so the interior third must agree
    const Eigen::RowVectorXd a = forward.row(0).segment(1000, 1000);
    const Eigen::RowVectorXd b = reversed.rowwise().reverse().row(0).segment(1000, 1000);
    CHECK((a - b).norm() / a.norm() < 1e-9);
}

TEST_CASE("filter input validation") {
    const Record record = make_record(Eigen::MatrixXd::Random(1, 100), 100.0);

    FilterSpec nyquist;
    nyquist.cutoff_hz = 50.0;
    CHECK_THROWS_AS(high_pass(record, nyquist), InvalidCutoff);
    nyquist.cutoff_hz = -1.0;
    CHECK_THROWS_AS(high_pass(record, nyquist), InvalidCutoff);

    FilterSpec bad_order;
    bad_order.order = 0;
    CHECK_THROWS_AS(high_pass(record, bad_order), ValidationError);

    const Record tiny = make_record(Eigen::MatrixXd::Random(1, 8), 100.0);
    CHECK_THROWS_AS(high_pass(tiny, FilterSpec{}), RecordTooShort);
}

TEST_CASE("odd filter orders are supported") {
    const double fs = 250.0;
    const Eigen::Index n = 4000;
    Eigen::MatrixXd samples(1, n);
    samples.row(0) = sine(10.0, fs, n).array() + 3.0;
    FilterSpec spec;
    spec.order = 3;
    const Record filtered = high_pass(make_record(samples, fs), spec);
    // 1000 samples is 40 whole periods of the tone, far enough in for the
    // startup transient of the near-unit-circle pole to have died
    const Eigen::RowVectorXd mid = filtered.samples().row(0).segment(1500, 1000);
    CHECK(std::abs(mid.mean()) < 1e-6);
    CHECK(fit_tone(mid, 10.0, fs).first == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("detrend removes lines and is idempotent") {
    SUBCASE("pure line goes to zero") {
        Eigen::MatrixXd samples(1, 4);
        samples << 1.0, 2.0, 3.0, 4.0;
        const Record out = detrend(make_record(samples, 10.0));
        CHECK(out.samples().cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("constant goes to zero") {
        const Record out = detrend(make_record(Eigen::MatrixXd::Constant(2, 50, -3.25), 10.0));
        CHECK(out.samples().cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("matches an explicit least-squares line fit") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> uniform(-1.0, 1.0);
        const Eigen::Index n = 500;
        Eigen::MatrixXd x(1, n);
        for (Eigen::Index t = 0; t < n; ++t) x(0, t) = uniform(rng) + 0.01 * double(t) + 4.0;

        Eigen::MatrixXd basis(n, 2);
        for (Eigen::Index t = 0; t < n; ++t) {
            basis(t, 0) = 1.0;
            basis(t, 1) = double(t);
        }
        const Eigen::Vector2d coef = basis.colPivHouseholderQr().solve(x.row(0).transpose());
        const Eigen::RowVectorXd expected =
            x.row(0) - (basis * coef).transpose();

        const Record out = detrend(make_record(x, 10.0));
        CHECK((out.samples().row(0) - expected).norm() < 1e-9 * expected.norm());
    }
    SUBCASE("idempotence") {
        const Record record = make_record(Eigen::MatrixXd::Random(3, 400), 10.0);
        const Record once = detrend(record);
        const Record twice = detrend(once);
        CHECK((twice.samples() - once.samples()).cwiseAbs().maxCoeff() < 1e-12);
    }
}
