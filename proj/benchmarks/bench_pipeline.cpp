#include <strainmodal/beam.hpp>
#include <strainmodal/filter.hpp>
#include <strainmodal/sim.hpp>
#include <strainmodal/ssi.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace strainmodal;

SimScenario small_scenario(double duration_s) {
    SimScenario scenario = default_scenario();
    scenario.duration_s = duration_s;
    scenario.snr_db = 20.0;
    return scenario;
}

const StrainRecord& bench_record() {
    static const StrainRecord record = simulate(small_scenario(60.0)).strain;
    return record;
}

void bm_simulate(benchmark::State& state) {
    const SimScenario scenario = small_scenario(double(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(scenario));
    }
}
BENCHMARK(bm_simulate)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

void bm_high_pass(benchmark::State& state) {
    const StrainRecord& record = bench_record();
    FilterSpec spec;
    for (auto _ : state) {
        benchmark::DoNotOptimize(high_pass(record, spec));
    }
}
BENCHMARK(bm_high_pass)->Unit(benchmark::kMillisecond);

void bm_block_hankel(benchmark::State& state) {
    const StrainRecord& record = bench_record();
    const int block_rows = int(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_block_hankel(record, block_rows));
    }
}
BENCHMARK(bm_block_hankel)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);

void bm_projection(benchmark::State& state) {
    const StrainRecord& record = bench_record();
    const int block_rows = int(state.range(0));
    const int channels = int(record.channel_count());
    const Eigen::MatrixXd hankel = build_block_hankel(record, block_rows);
    for (auto _ : state) {
        benchmark::DoNotOptimize(project_future_onto_past(hankel, block_rows, channels));
    }
}
BENCHMARK(bm_projection)->Arg(10)->Unit(benchmark::kMillisecond);

void bm_stabilization_scan(benchmark::State& state) {
    const StrainRecord& record = bench_record();
    SsiConfig config;
    config.block_rows = 10;
    for (auto _ : state) {
        benchmark::DoNotOptimize(stabilization_scan(record, config));
    }
}
BENCHMARK(bm_stabilization_scan)->Unit(benchmark::kMillisecond);

void bm_fit_sms(benchmark::State& state) {
    const SimScenario scenario = small_scenario(10.0);
    const std::vector<BeamMode> modes = solve_modes(scenario.beam);
    const std::vector<double> positions = scenario.channel_positions();

    ModeShapeSamples measured;
    measured.kind = ModeShapeSamples::Kind::sms;
    measured.positions_m = positions;
    measured.values.resize(Eigen::Index(positions.size()));
    for (std::size_t k = 0; k < positions.size(); ++k) {
        measured.values(Eigen::Index(k)) = modes[1].model.strain_at(positions[k]);
    }
    measured.values /= measured.values.cwiseAbs().maxCoeff();

    FitOptions options;
    options.mode_index = 2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_sms(measured, scenario.beam.layout, options));
    }
}
BENCHMARK(bm_fit_sms)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
