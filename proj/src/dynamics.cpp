#include "flatfish/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "num/solvers.hpp"

namespace flatfish {

using impact::ValidationError;

ModelParams apply_driver(const ModelParams& base, const std::string& driver, double value) {
    ModelParams p = base;
    if (driver == "epsilon") p.epsilon = value;
    else if (driver == "chi1") p.chi[0] = value;
    else if (driver == "chi2") p.chi[1] = value;
    else if (driver == "omega") p.omega = value;
    else if (driver == "alpha") p.alpha = value;
    else if (driver == "beta1") p.beta[0] = value;
    else if (driver == "beta2") p.beta[1] = value;
    else if (driver == "eta") p.eta = value;
    else if (driver == "sigma") p.sigma = value;
    else if (driver == "phi") p.phi = {value, value};
    else throw ValidationError("unknown long-run driver: " + driver);
    return p;
}

double read_driver(const ModelParams& p, const std::string& driver) {
    if (driver == "epsilon") return p.epsilon;
    if (driver == "chi1") return p.chi[0];
    if (driver == "chi2") return p.chi[1];
    if (driver == "omega") return p.omega;
    if (driver == "alpha") return p.alpha;
    if (driver == "beta1") return p.beta[0];
    if (driver == "beta2") return p.beta[1];
    if (driver == "eta") return p.eta;
    if (driver == "sigma") return p.sigma;
    if (driver == "phi") return p.phi[0];
    throw ValidationError("unknown long-run driver: " + driver);
}

StockState default_steady_seed(const ModelParams& p) {
    SteadyAnchors a;
    return StockState::from_tonnes(p, {a.plaice_stock_t, a.sole_stock_t});
}

namespace {

constexpr double kStockFloor = 1e-12;

// residual of stationarity under a fixed closure regime (-1 auto)
bool steady_residual(const ModelParams& p, const Quota& quota, int force_regime,
                     std::span<const double> x, std::span<double> out) {
    if (!(x[0] > 0) || !(x[1] > 0)) return false;
    StockState s{{x[0], x[1]}};
    try {
        ClosureOptions copt;
        copt.force_regime = force_regime;
        PeriodEquilibrium eq = period_equilibrium(p, s, quota, copt);
        Vec2 dx = stock_change(p, s, eq.harvest());
        out[0] = dx[0];
        out[1] = dx[1];
        return true;
    } catch (const ValidationError&) {
        return false;
    }
}

std::optional<StockState> newton_stocks(const ModelParams& p, const Quota& quota, int force_regime,
                                        const StockState& seed, const SteadyOptions& opt,
                                        double* residual_out) {
    num::NewtonOptions nopt;
    nopt.tol = opt.tol;
    nopt.max_iter = opt.max_iter;
    auto F = [&](std::span<const double> x, std::span<double> out) {
        return steady_residual(p, quota, force_regime, x, out);
    };
    num::NewtonResult r = num::newton_solve(F, {seed.x[0], seed.x[1]}, nopt);
    if (residual_out) *residual_out = r.residual_norm;
    if (r.residual_norm <= opt.accept_tol && r.x[0] > kStockFloor && r.x[1] > kStockFloor)
        return StockState{{r.x[0], r.x[1]}};
    return std::nullopt;
}

SteadyStatus status_of(const PeriodEquilibrium& eq) {
    switch (eq.regime) {
        case Regime::kInterior: return SteadyStatus::kInterior;
        case Regime::kCornerMetier1: return SteadyStatus::kCornerMetier1;
        case Regime::kCornerMetier2: return SteadyStatus::kCornerMetier2;
        default: return SteadyStatus::kNoSteadyState;
    }
}

}  // namespace

SteadyState find_steady_state(const ModelParams& p, const Quota& quota, const StockState& seed,
                              const SteadyOptions& opt) {
    SteadyState out;
    if (!opt.harvesting) {
        // xdot = g(x) has its only nonnegative root at the origin
        out.status = SteadyStatus::kInterior;
        out.stocks = StockState{{0.0, 0.0}};
        out.residual_norm = 0.0;
        return out;
    }
    double res = std::numeric_limits<double>::infinity();
    if (auto x = newton_stocks(p, quota, -1, seed, opt, &res)) {
        out.stocks = *x;
        out.eq = period_equilibrium(p, out.stocks, quota);
        out.status = status_of(out.eq);
        out.residual_norm = res;
        return out;
    }
    // retry on the explicit corner branches; a corner is accepted when the
    // interior inversion at its stocks puts the dead metier at (or below)
    // zero, with a small tolerance for the transition neighbourhood
    for (int forced = 1; forced <= 2; ++forced) {
        int dead = forced - 1;
        if (auto x = newton_stocks(p, quota, forced, seed, opt, &res)) {
            ClosureOptions copt;
            copt.force_regime = forced;
            PeriodEquilibrium corner = period_equilibrium(p, *x, quota, copt);
            bool valid = true;
            try {
                PeriodEquilibrium auto_eq = period_equilibrium(p, *x, quota);
                if (auto_eq.regime == Regime::kInterior) {
                    double scale = std::max(auto_eq.fleet[1 - dead], 1e-12);
                    valid = auto_eq.fleet[dead] < 0.02 * scale;
                }
            } catch (const ValidationError&) {
                // no interior pricing at these stocks: the corner stands
            }
            if (valid) {
                out.stocks = *x;
                out.eq = corner;
                out.status = status_of(corner);
                out.residual_norm = res;
                return out;
            }
        }
    }
    out.status = SteadyStatus::kNoSteadyState;
    out.residual_norm = res;
    return out;
}

Trajectory integrate(const ModelParams& p, const StockState& x0, const Quota& quota,
                     double horizon_years, double step_years, const IntegrateOptions& opt) {
    if (!(step_years > 0)) throw ValidationError("integrate: step must be positive");
    Trajectory traj;
    auto harvest_at = [&](const StockState& s) -> Vec2 {
        if (!opt.harvesting) return {0.0, 0.0};
        try {
            return period_equilibrium(p, s, quota).harvest();
        } catch (const ValidationError&) {
            return {0.0, 0.0};  // collapsed market: no harvest
        }
    };
    auto deriv = [&](double, std::span<const double> x, std::span<double> dxdt) {
        StockState s{{std::max(x[0], 0.0), std::max(x[1], 0.0)}};
        Vec2 dx = stock_change(p, s, harvest_at(s));
        dxdt[0] = dx[0];
        dxdt[1] = dx[1];
    };
    std::vector<double> state{x0.x[0], x0.x[1]};
    auto observe = [&](double t, std::span<double> x) {
        for (int i = 0; i < kSpecies; ++i) {
            if (x[i] < opt.clip_floor) {
                x[i] = opt.clip_floor;  // the integrator continues from the floor
                traj.events.push_back({t, i, "stock clipped at floor"});
            }
        }
        StockState s{{x[0], x[1]}};
        traj.time.push_back(t);
        traj.stocks.push_back(s);
        traj.harvest.push_back(harvest_at(s));
    };
    num::rk4_integrate(deriv, state, 0.0, horizon_years, step_years, observe);
    return traj;
}

ScanResult bifurcation_scan(const ModelParams& p, const Quota& quota, const std::string& driver,
                            double target, const StockState& seed, const ScanOptions& opt) {
    ScanResult out;
    double start = read_driver(p, driver);
    out.bifurcation.driver = driver;
    out.bifurcation.decreasing_side = target < start;
    if (opt.steps < 1) throw ValidationError("bifurcation_scan: steps must be >= 1");

    double step = (target - start) / opt.steps;
    StockState warm = seed;
    SteadyState base = find_steady_state(p, quota, warm, opt.steady);
    if (!base.interior())
        throw ValidationError("bifurcation_scan: no interior steady state at the scan start");
    warm = base.stocks;
    out.branch.push_back({start, base});

    double secant = 0.0;  // stock movement across the previous step
    bool on_corner = false;
    double last_ok = start;
    SteadyStatus prev_status = base.status;
    for (int k = 1; k <= opt.steps; ++k) {
        double value = start + step * k;
        ModelParams pk = apply_driver(p, driver, value);
        SteadyState st = find_steady_state(pk, quota, warm, opt.steady);
        bool jump = false;
        if (st.exists()) {
            double move = std::hypot(st.stocks.x[0] - warm.x[0], st.stocks.x[1] - warm.x[1]);
            bool regime_change = st.status != prev_status;  // corner transitions may jump
            if (secant > 0 && move > opt.jump_guard * secant && !regime_change) jump = true;
            if (!jump) secant = regime_change ? 0.0 : std::max(move, 1e-12);
            prev_status = st.status;
        }
        if (!st.exists() || jump) {
            out.bifurcation.kind = BifurcationKind::kFold;
            out.bifurcation.last_interior = last_ok;
            out.bifurcation.bracket_lo = std::min(value, last_ok);
            out.bifurcation.bracket_hi = std::max(value, last_ok);
            return out;
        }
        if (!on_corner && !st.interior()) {
            out.bifurcation.kind = BifurcationKind::kCornerTransition;
            out.bifurcation.last_interior = last_ok;
            out.bifurcation.bracket_lo = std::min(value, last_ok);
            out.bifurcation.bracket_hi = std::max(value, last_ok);
            on_corner = true;
            if (!opt.follow_corner) return out;
        }
        if (!on_corner) last_ok = value;
        warm = st.stocks;
        out.branch.push_back({value, st});
    }
    if (!on_corner) {
        out.bifurcation.kind = BifurcationKind::kNone;
        out.bifurcation.last_interior = last_ok;
        out.bifurcation.bracket_lo = out.bifurcation.bracket_hi = target;
    }
    return out;
}

std::vector<DriverBound> default_driver_bounds() {
    return {
        {"epsilon", 0.48, 0.52},
        {"chi1", 0.093, 0.607},
        {"chi2", 0.230, 0.549},
        {"omega", 0.65, 1.37},
    };
}

SteadyTable relative_steady_table(const ModelParams& p, const Quota& quota, const StockState& seed,
                                  const std::vector<DriverBound>& bounds, const ScanOptions& opt) {
    SteadyTable table;
    table.initial = find_steady_state(p, quota, seed, opt.steady);
    if (!table.initial.exists())
        throw ValidationError("relative_steady_table: no steady state at the baseline");

    for (const DriverBound& b : bounds) {
        for (int side = 0; side < 2; ++side) {
            double bound = side == 0 ? b.lower : b.upper;
            SteadyTableRow row;
            row.driver = b.driver;
            row.label = b.driver + (side == 0 ? "-lower" : "-upper");
            ScanOptions sopt = opt;
            sopt.steps = std::max(20, opt.steps / 4);
            ScanResult scan = bifurcation_scan(p, quota, b.driver, bound, table.initial.stocks, sopt);
            const BranchPoint& end = scan.branch.back();
            row.driver_value = end.driver_value;
            row.state = end.state;
            row.truncated = std::abs(end.driver_value - bound) >
                            1e-9 * std::max(std::abs(bound), 1.0);
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

}  // namespace flatfish
