#include "flatfish/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flatfish/dynamics.hpp"
#include "num/solvers.hpp"

namespace flatfish {

using impact::ValidationError;

RickerFit fit_ricker(std::span<const double> stock, std::span<const double> landings) {
    if (stock.size() != landings.size())
        throw ValidationError("fit_ricker: series length mismatch");
    std::vector<double> xs, gs;
    int excluded = 0;
    for (size_t t = 0; t + 1 < stock.size(); ++t) {
        double g = stock[t + 1] - stock[t] + landings[t];
        if (stock[t] > 0 && g > 0) {
            xs.push_back(stock[t]);
            gs.push_back(g);
        } else {
            ++excluded;
        }
    }
    if (xs.size() < 10)
        throw ValidationError("fit_ricker: need at least 10 usable growth observations, have " +
                              std::to_string(xs.size()));
    // linearized seed: ln(g/x) = ln a - b x
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = static_cast<int>(xs.size());
    for (int t = 0; t < n; ++t) {
        double y = std::log(gs[t] / xs[t]);
        sx += xs[t];
        sy += y;
        sxx += xs[t] * xs[t];
        sxy += xs[t] * y;
    }
    double denom = n * sxx - sx * sx;
    double b0 = denom != 0 ? -(n * sxy - sx * sy) / denom : 0.0;
    double lna0 = (sy + b0 * sx) / n;
    double a0 = std::exp(lna0);

    // nonlinear refinement on the growth residuals
    auto sse = [&](std::span<const double> v) {
        double s = 0;
        for (int t = 0; t < n; ++t) {
            double r = v[0] * xs[t] * std::exp(-v[1] * xs[t]) - gs[t];
            s += r * r;
        }
        return s;
    };
    std::vector<double> lo{1e-12, 0.0}, hi{1e9, 1e6};
    num::BfgsOptions bopt;
    bopt.grad_tol = 1e-14;
    bopt.max_eval = 20000;
    num::BfgsResult r = num::bfgs_box_min(sse, {std::max(a0, 1e-12), std::max(b0, 0.0)}, lo, hi, bopt);

    RickerFit fit;
    fit.a = r.x[0];
    fit.b = r.x[1];
    fit.used_points = n;
    fit.excluded_points = excluded;
    fit.sse = r.fx;
    return fit;
}

double theil_u(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size())
        throw ValidationError("theil_u: series length mismatch");
    if (predicted.empty()) throw ValidationError("theil_u: empty series");
    double denom = num::rms(predicted) + num::rms(actual);
    if (denom == 0) return 0.0;
    return num::rmse(predicted, actual) / denom;
}

EconParams EconParams::from_model(const ModelParams& p) {
    return {p.epsilon, p.chi[0], p.chi[1], p.phi[0], p.eta, p.alpha, p.sigma, p.beta[0], p.beta[1]};
}

ModelParams EconParams::apply(const ModelParams& base) const {
    ModelParams p = base;
    p.epsilon = epsilon;
    p.chi = {chi1, chi2};
    p.phi = {phi, phi};
    p.eta = eta;
    p.alpha = alpha;
    p.sigma = sigma;
    p.beta = {beta1, beta2};
    return p;
}

std::vector<double> EconParams::pack() const {
    return {epsilon, chi1, chi2, phi, eta, alpha, sigma, beta1, beta2};
}

EconParams EconParams::unpack(std::span<const double> v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
}

namespace {

constexpr double kPenalty = 1e10;

// Per-period prediction used by both the objective and the Theil report.
// Returns false when the market closure fails at these stocks.
bool predict_period(const ModelParams& p, const Vec2& stocks, const Quota& quota, Vec2* harvest,
                    Vec2* price) {
    try {
        PeriodEquilibrium eq = period_equilibrium(p, StockState{stocks}, quota);
        *harvest = eq.quantity;
        *price = eq.price;
        return std::isfinite(eq.quantity[0]) && std::isfinite(eq.quantity[1]) &&
               std::isfinite(eq.price[0]) && std::isfinite(eq.price[1]);
    } catch (const ValidationError&) {
        return false;
    }
}

struct AlignedYears {
    std::vector<int> years;
    std::vector<size_t> idx0, idx1;
};

AlignedYears align(const ScaledDataset& d) {
    AlignedYears out;
    size_t j = 0;
    for (size_t i = 0; i < d.species[0].year.size(); ++i) {
        while (j < d.species[1].year.size() && d.species[1].year[j] < d.species[0].year[i]) ++j;
        if (j < d.species[1].year.size() && d.species[1].year[j] == d.species[0].year[i]) {
            out.years.push_back(d.species[0].year[i]);
            out.idx0.push_back(i);
            out.idx1.push_back(j);
        }
    }
    return out;
}

}  // namespace

PredictedSeries predict_series(const ModelParams& params, const ScaledDataset& data) {
    PredictedSeries out;
    AlignedYears al = align(data);
    for (size_t t = 0; t < al.years.size(); ++t) {
        size_t i0 = al.idx0[t], i1 = al.idx1[t];
        Vec2 stocks{data.species[0].stock[i0], data.species[1].stock[i1]};
        Quota quota;
        if (data.species[0].tac[i0]) quota.tac[0] = *data.species[0].tac[i0];
        if (data.species[1].tac[i1]) quota.tac[1] = *data.species[1].tac[i1];
        Vec2 H, P;
        if (!predict_period(params, stocks, quota, &H, &P)) continue;
        const std::array<size_t, 2> idx{i0, i1};
        for (int i = 0; i < 2; ++i) {
            out.harvest[i].push_back(H[i]);
            out.harvest_actual[i].push_back(data.species[i].landings[idx[i]]);
            if (data.species[i].price[idx[i]]) {
                out.price[i].push_back(P[i]);
                out.price_actual[i].push_back(*data.species[i].price[idx[i]]);
            }
        }
    }
    return out;
}

double economic_objective(const ModelParams& params, const ScaledDataset& data,
                          ObjectiveDiagnostics* diag) {
    AlignedYears al = align(data);
    if (al.years.empty()) throw ValidationError("economic_objective: no overlapping years");

    // normalization weights 1/mean of the observed series
    double mh[2], mp[2];
    for (int i = 0; i < 2; ++i) {
        const ScaledSeries& s = data.species[i];
        double sum = 0;
        for (double v : s.landings) sum += v;
        mh[i] = s.landings.empty() || sum <= 0 ? 1.0 : s.landings.size() / sum;
        double psum = 0;
        int pn = 0;
        for (auto& v : s.price)
            if (v) {
                psum += *v;
                ++pn;
            }
        mp[i] = pn == 0 || psum <= 0 ? 1.0 : pn / psum;
    }

    double zeta = 0;
    int penalized = 0;
    for (size_t t = 0; t < al.years.size(); ++t) {
        size_t i0 = al.idx0[t], i1 = al.idx1[t];
        Vec2 stocks{data.species[0].stock[i0], data.species[1].stock[i1]};
        Quota quota;
        if (data.species[0].tac[i0]) quota.tac[0] = *data.species[0].tac[i0];
        if (data.species[1].tac[i1]) quota.tac[1] = *data.species[1].tac[i1];
        Vec2 H, P;
        if (!predict_period(params, stocks, quota, &H, &P)) {
            zeta += kPenalty;
            ++penalized;
            continue;
        }
        const std::array<size_t, 2> idx{i0, i1};
        for (int i = 0; i < 2; ++i) {
            double dh = H[i] - data.species[i].landings[idx[i]];
            zeta += mh[i] * dh * dh;
            if (data.species[i].price[idx[i]]) {
                double dp = P[i] - *data.species[i].price[idx[i]];
                zeta += mp[i] * dp * dp;
            }
        }
    }
    if (diag) {
        diag->periods = static_cast<int>(al.years.size());
        diag->penalized = penalized;
    }
    return zeta;
}

std::vector<EconParams> multistart_grid(const CalibrationBox& box, int count) {
    const int dim = 9;
    std::vector<std::vector<double>> pts;
    auto decode = [&](const std::vector<double>& unit) {
        std::vector<double> v(dim);
        for (int i = 0; i < dim; ++i) {
            if (box.log_scale[i]) {
                double llo = std::log(box.lower[i]), lhi = std::log(box.upper[i]);
                v[i] = std::exp(llo + unit[i] * (lhi - llo));
            } else {
                v[i] = box.lower[i] + unit[i] * (box.upper[i] - box.lower[i]);
            }
        }
        return v;
    };
    pts.push_back(decode(std::vector<double>(dim, 0.5)));  // center first
    // corners alternate with low-discrepancy interior points so truncated
    // grids keep global coverage instead of only extreme vertices
    int corner = 0, h = 0;
    while (static_cast<int>(pts.size()) < count) {
        if (corner < (1 << dim)) {
            std::vector<double> unit(dim);
            // pulled slightly inside so every start is strictly feasible
            for (int i = 0; i < dim; ++i) unit[i] = (corner >> i) & 1 ? 0.999 : 0.001;
            pts.push_back(decode(unit));
            ++corner;
        }
        if (static_cast<int>(pts.size()) < count) pts.push_back(decode(num::halton_point(h++, dim)));
    }
    pts.resize(count);
    std::vector<EconParams> out;
    out.reserve(pts.size());
    for (auto& v : pts) out.push_back(EconParams::unpack(v));
    return out;
}

CalibrationResult calibrate(const TimeSeriesDataset& raw, const ModelParams& base,
                            const CalibrateOptions& opt) {
    if (opt.starts < 1) throw ValidationError("calibrate: empty multistart grid");
    ScaledDataset data = scale_data(raw, base);

    CalibrationResult result;
    ModelParams fitted = base;
    for (int i = 0; i < 2; ++i) {
        result.ricker[i] = fit_ricker(data.species[i].stock, data.species[i].landings);
        fitted.ricker_a[i] = result.ricker[i].a;
        fitted.ricker_b[i] = result.ricker[i].b;
        if (result.ricker[i].excluded_points > 0)
            result.notes.push_back(raw.species[i].name + ": excluded " +
                                   std::to_string(result.ricker[i].excluded_points) +
                                   " nonpositive growth observations");
    }

    // finishing quota: the last observed TAC per species
    Quota final_quota;
    Vec2 last_stock{data.species[0].stock.back(), data.species[1].stock.back()};
    for (int i = 0; i < 2; ++i)
        if (!data.species[i].tac.empty() && data.species[i].tac.back())
            final_quota.tac[i] = *data.species[i].tac.back();

    const CalibrationBox& box = opt.box;
    std::vector<EconParams> starts = multistart_grid(box, opt.starts);
    std::vector<Candidate> candidates(starts.size());

    // optimize in the unit cube (log cells for the scale-like parameters)
    const int dim = 9;
    auto to_unit = [&](const EconParams& e) {
        std::vector<double> raw_v = e.pack(), u(dim);
        for (int i = 0; i < dim; ++i) {
            if (box.log_scale[i])
                u[i] = (std::log(raw_v[i]) - std::log(box.lower[i])) /
                       (std::log(box.upper[i]) - std::log(box.lower[i]));
            else
                u[i] = (raw_v[i] - box.lower[i]) / (box.upper[i] - box.lower[i]);
            u[i] = std::clamp(u[i], 0.0, 1.0);
        }
        return u;
    };
    auto from_unit = [&](std::span<const double> u) {
        std::vector<double> v(dim);
        for (int i = 0; i < dim; ++i) {
            if (box.log_scale[i])
                v[i] = std::exp(std::log(box.lower[i]) +
                                u[i] * (std::log(box.upper[i]) - std::log(box.lower[i])));
            else
                v[i] = box.lower[i] + u[i] * (box.upper[i] - box.lower[i]);
        }
        return EconParams::unpack(v);
    };

#pragma omp parallel for schedule(dynamic) if (opt.parallel)
    for (int k = 0; k < static_cast<int>(starts.size()); ++k) {
        auto objective = [&](std::span<const double> u) {
            ModelParams p = from_unit(u).apply(fitted);
            try {
                p.validate();
                return economic_objective(p, data);
            } catch (const ValidationError&) {
                return kPenalty * 1e3;
            }
        };
        std::vector<double> lo(dim, 0.0), hi(dim, 1.0);
        num::BfgsOptions bopt;
        bopt.max_eval = opt.max_eval_per_start;
        bopt.grad_tol = 1e-11;
        bopt.fd_step = 3e-8;
        num::BfgsResult r = num::bfgs_box_min(objective, to_unit(starts[k]), lo, hi, bopt);
        Candidate c;
        c.start_index = k;
        c.params = from_unit(r.x);
        c.zeta = r.fx;
        c.converged = r.converged;
        c.evaluations = r.evaluations;
        ModelParams pk = c.params.apply(fitted);
        SteadyState ss = find_steady_state(pk, final_quota, StockState{last_stock});
        c.feasible = ss.interior();
        candidates[k] = c;
    }
    result.candidates = candidates;

    // deterministic merge: feasible first, then zeta, then lexicographic params
    auto better = [](const Candidate& a, const Candidate& b) {
        if (a.feasible != b.feasible) return a.feasible;
        if (a.zeta != b.zeta) return a.zeta < b.zeta;
        return a.params.pack() < b.params.pack();
    };
    const Candidate* best = &candidates[0];
    for (const Candidate& c : candidates)
        if (better(c, *best)) best = &c;
    result.winner = *best;
    if (!best->feasible)
        result.notes.push_back("no candidate produced an interior steady state; "
                               "returning the best objective value flagged infeasible");
    result.params = best->params.apply(fitted);
    result.zeta = best->zeta;

    PredictedSeries ps = predict_series(result.params, data);
    for (int i = 0; i < 2; ++i) {
        result.theil_harvest[i] = ps.harvest[i].empty() ? 0.0 : theil_u(ps.harvest[i], ps.harvest_actual[i]);
        result.theil_price[i] = ps.price[i].empty() ? 0.0 : theil_u(ps.price[i], ps.price_actual[i]);
    }
    return result;
}

}  // namespace flatfish
