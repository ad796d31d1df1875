#pragma once

#include <span>
#include <string>
#include <vector>

#include "flatfish/dataset.hpp"

// Fits the model to time series: Ricker parameters from stock growth,
// economic parameters from per-period harvests and prices through weighted
// nonlinear least squares with a deterministic multistart grid.
namespace flatfish {

struct RickerFit {
    double a = 0, b = 0;
    int used_points = 0;
    int excluded_points = 0;  // nonpositive growth ratios dropped
    double sse = 0;           // refined nonlinear residual
};

// growth reconstruction g_t = x_{t+1} - x_t + H_t in model units
RickerFit fit_ricker(std::span<const double> stock, std::span<const double> landings);

// Theil inequality coefficient U = rmse(pred-actual)/(rms(pred)+rms(actual)),
// in [0,1]; defined as 0 when both series vanish.
double theil_u(std::span<const double> predicted, std::span<const double> actual);

// free parameters of the economic calibration, in a fixed order
struct EconParams {
    double epsilon, chi1, chi2, phi, eta, alpha, sigma, beta1, beta2;

    static EconParams from_model(const ModelParams& p);
    ModelParams apply(const ModelParams& base) const;
    std::vector<double> pack() const;
    static EconParams unpack(std::span<const double> v);
};

// Calibration constraint box: every parameter above 1e-6, sigma above
// 1 + 1e-6, epsilon below 1; upper bounds from prior trials.
struct CalibrationBox {
    std::vector<double> lower{1e-6, 1e-6, 1e-6, 1e-6, 1e-6, 1e-6, 1.0 + 1e-6, 1e-6, 1e-6};
    std::vector<double> upper{0.95, 3.0, 3.0, 1e-3, 6.0, 1e-2, 12.0, 60.0, 60.0};
    std::vector<bool> log_scale{false, false, false, true, false, true, false, false, false};
};

struct ObjectiveDiagnostics {
    int periods = 0;
    int penalized = 0;  // closure failures / non-finite predictions
};

// zeta = sum_t sum_i m_i^h (Hhat - H)^2 + m_i^p (phat - p)^2 with weights
// 1/mean(real series); predictions conditioned on the observed stocks of
// each period, quotas from the data's TAC columns.
double economic_objective(const ModelParams& params, const ScaledDataset& data,
                          ObjectiveDiagnostics* diag = nullptr);

struct Candidate {
    int start_index = -1;
    EconParams params{};
    double zeta = 0;
    bool feasible = false;  // interior steady state under the final-year quota
    bool converged = false;
    int evaluations = 0;
};

struct CalibrationResult {
    ModelParams params;             // winning parameters on top of the base
    double zeta = 0;
    Candidate winner;
    std::vector<Candidate> candidates;
    RickerFit ricker[2];
    // Theil coefficients at the winner: harvests then prices, per species
    double theil_harvest[2] = {0, 0};
    double theil_price[2] = {0, 0};
    std::vector<std::string> notes;
};

struct CalibrateOptions {
    int starts = 519;          // multistart grid size
    CalibrationBox box;
    int max_eval_per_start = 10000;
    bool parallel = true;
    unsigned long long seed = 0;  // recorded in manifests; the grid itself is deterministic
};

// Deterministic multistart grid: box center first, then the corner product,
// then Halton fill, truncated to `count` points.
std::vector<EconParams> multistart_grid(const CalibrationBox& box, int count);

// Full calibration: Ricker fits first (ecosystem independent), then the
// economic objective from every start; the winner is the feasible minimum
// (ties broken lexicographically by parameter vector).
CalibrationResult calibrate(const TimeSeriesDataset& raw, const ModelParams& base,
                            const CalibrateOptions& opt = {});

// predicted per-period harvests/prices at given params on observed stocks
struct PredictedSeries {
    std::array<std::vector<double>, 2> harvest;       // aligned with harvest_actual
    std::array<std::vector<double>, 2> harvest_actual;
    std::array<std::vector<double>, 2> price;         // aligned with price_actual
    std::array<std::vector<double>, 2> price_actual;
};

PredictedSeries predict_series(const ModelParams& params, const ScaledDataset& data);

}  // namespace flatfish
