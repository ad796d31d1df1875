#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flatfish/equilibrium.hpp"

// Time integration of the stock dynamics under the per-period market
// equilibrium, numerical steady states, driver continuation and
// bifurcation scans.
namespace flatfish {

// drivers the long-run scans understand (ModelParams fields by name)
ModelParams apply_driver(const ModelParams& base, const std::string& driver, double value);
double read_driver(const ModelParams& p, const std::string& driver);

enum class SteadyStatus {
    kInterior,
    kCornerMetier1,
    kCornerMetier2,
    kNoSteadyState  // a finding, not a failure
};

struct SteadyState {
    SteadyStatus status = SteadyStatus::kNoSteadyState;
    StockState stocks;
    PeriodEquilibrium eq;
    double residual_norm = 0.0;

    bool exists() const { return status != SteadyStatus::kNoSteadyState; }
    bool interior() const { return status == SteadyStatus::kInterior; }
};

struct SteadyOptions {
    double tol = 1e-13;          // Newton residual target (model units)
    double accept_tol = 1e-8;    // residual bound for a usable steady state
    int max_iter = 120;
    bool harvesting = true;      // false: pure ecological fixed point
};

StockState default_steady_seed(const ModelParams& p);

// Root of stock stationarity + market closure. Returns a NoSteadyState
// result (never throws for that case). Harvest-free systems relax to the
// trivial ecological fixed point at the origin.
SteadyState find_steady_state(const ModelParams& p, const Quota& quota, const StockState& seed,
                              const SteadyOptions& opt = {});

struct TrajectoryEvent {
    double time;
    int species;
    std::string what;
};

struct Trajectory {
    std::vector<double> time;
    std::vector<StockState> stocks;
    std::vector<Vec2> harvest;
    std::vector<TrajectoryEvent> events;
};

struct IntegrateOptions {
    bool harvesting = true;   // false: pure Ricker growth
    double clip_floor = 0.0;  // stocks clipped here when they go negative
};

// Fixed-step RK4 on xdot = g(x) - H(x); H re-solves the market each
// evaluation (per-period fleet adjustment). Negative stocks are clipped
// with an event record.
Trajectory integrate(const ModelParams& p, const StockState& x0, const Quota& quota,
                     double horizon_years, double step_years, const IntegrateOptions& opt = {});

struct BranchPoint {
    double driver_value;
    SteadyState state;
};

enum class BifurcationKind {
    kNone,              // scan completed, interior everywhere
    kFold,              // steady state ceases to exist
    kCornerTransition   // steady state persists but a metier exits
};

struct BifurcationResult {
    std::string driver;
    BifurcationKind kind = BifurcationKind::kNone;
    double last_interior = 0.0;   // driver value of the last interior solve
    double bracket_lo = 0.0;      // critical value lies inside [lo, hi]
    double bracket_hi = 0.0;
    bool decreasing_side = false; // scan direction relative to the start
};

struct ScanResult {
    std::vector<BranchPoint> branch;  // interior part, then corner part if any
    BifurcationResult bifurcation;
};

struct ScanOptions {
    int steps = 200;
    SteadyOptions steady;
    // reject continuation jumps larger than this multiple of the local secant
    double jump_guard = 10.0;
    bool follow_corner = true;  // keep marching on the corner branch after a transition
};

// Warm-started continuation of steady states over one driver from the value
// in `p` to `target`. Detects loss of the interior steady state and brackets
// the critical driver value to grid resolution.
ScanResult bifurcation_scan(const ModelParams& p, const Quota& quota, const std::string& driver,
                            double target, const StockState& seed, const ScanOptions& opt = {});

struct SteadyTableRow {
    std::string label;        // e.g. "omega-upper"
    std::string driver;
    double driver_value = 0.0;
    bool truncated = false;   // stopped short of the requested bound (fold)
    SteadyState state;
};

struct SteadyTable {
    SteadyState initial;
    std::vector<SteadyTableRow> rows;
};

struct DriverBound {
    std::string driver;
    double lower;
    double upper;
};

// Default exposure bounds for the long-run drivers.
std::vector<DriverBound> default_driver_bounds();

// Steady states at the exposure bounds of each driver, relative to the
// initial state; corner rows carry the metier-exit flag, unreachable bounds
// report the end of the solvable branch instead.
SteadyTable relative_steady_table(const ModelParams& p, const Quota& quota, const StockState& seed,
                                  const std::vector<DriverBound>& bounds = default_driver_bounds(),
                                  const ScanOptions& opt = {});

}  // namespace flatfish
