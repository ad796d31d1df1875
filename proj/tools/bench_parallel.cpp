// Benchmark of the OpenMP-parallel paths against their serial references:
// exposure sweeps and multistart calibration.
#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "flatfish/calibration.hpp"
#include "flatfish/casestudy.hpp"
#include "flatfish/dynamics.hpp"

using namespace flatfish;
using clock_type = std::chrono::steady_clock;

static double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not available; both paths run serially\n");
#endif

    CaseStudyConfig config;
    config.grid_n = 501;
    SweepModel model(config);
    impact::DriverVector theta0 = model.baseline();

    impact::SweepOptions serial_opt;
    serial_opt.parallel = false;
    impact::SweepOptions parallel_opt;

    std::printf("%-28s %10s %10s %8s\n", "workload", "serial[s]", "parallel", "speedup");
    for (const auto& box : config.exposure_box) {
        auto t0 = clock_type::now();
        auto serial = impact::sweep_serial(model, theta0, box.driver, box.lower, box.upper,
                                           config.grid_n, serial_opt);
        double ts = seconds_since(t0);
        t0 = clock_type::now();
        auto parallel = impact::sweep(model, theta0, box.driver, box.lower, box.upper,
                                      config.grid_n, parallel_opt);
        double tp = seconds_since(t0);
        bool identical = serial.size() == parallel.size();
        for (size_t i = 0; identical && i < serial.size(); ++i)
            identical = serial[i].TI == parallel[i].TI && serial[i].S == parallel[i].S;
        std::printf("sweep %-22s %10.3f %10.3f %7.2fx %s\n", box.driver.c_str(), ts, tp,
                    tp > 0 ? ts / tp : 0.0, identical ? "" : "MISMATCH");
    }

    // multistart calibration on a small synthetic dataset
    ModelParams truth = default_params();
    Quota quota = Quota::sole_tac(truth, SteadyAnchors{}.sole_quantity_t);
    SyntheticOptions sopt;
    sopt.years = 48;
    TimeSeriesDataset ds = generate_synthetic(truth, quota, default_steady_seed(truth), sopt);

    CalibrateOptions copt;
    copt.starts = 8;
    copt.max_eval_per_start = 1500;
    auto t0 = clock_type::now();
    copt.parallel = false;
    CalibrationResult serial_result = calibrate(ds, truth, copt);
    double ts = seconds_since(t0);
    t0 = clock_type::now();
    copt.parallel = true;
    CalibrationResult parallel_result = calibrate(ds, truth, copt);
    double tp = seconds_since(t0);
    bool same = serial_result.zeta == parallel_result.zeta &&
                serial_result.winner.start_index == parallel_result.winner.start_index;
    std::printf("calibrate 8 starts          %10.3f %10.3f %7.2fx %s\n", ts, tp,
                tp > 0 ? ts / tp : 0.0, same ? "" : "MISMATCH");
    return 0;
}
