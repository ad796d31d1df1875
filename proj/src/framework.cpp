#include "impact/framework.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "num/solvers.hpp"

namespace impact {

int DriverSchema::index(std::string_view name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw SchemaError("unknown driver: " + std::string(name));
}

DriverVector DriverVector::with(std::string_view name, double v) const {
    DriverVector out = *this;
    out.value[schema->index(name)] = v;
    out.baseline = false;
    return out;
}

void DriverVector::validate() const {
    if (!schema) throw SchemaError("driver vector has no schema");
    if (value.size() != schema->names.size())
        throw SchemaError("driver vector length does not match schema");
    for (size_t i = 0; i < value.size(); ++i)
        if (!std::isfinite(value[i]))
            throw ValidationError("non-finite driver value: " + schema->names[i]);
}

bool PropertySchema::is_maximized(int property_index) const {
    for (auto& [p, m] : objective_pairs)
        if (p == property_index) return true;
    return false;
}

namespace {

void require_same_schema(const DriverVector& a, const DriverVector& b) {
    a.validate();
    b.validate();
    if (a.schema != b.schema && a.schema->names != b.schema->names)
        throw SchemaError("driver vectors use different schemas");
}

std::vector<double> eval_checked(const ModelInterface& model, const DriverVector& theta,
                                 std::span<const double> tau) {
    std::vector<double> psi = model.property(theta, tau);
    if (psi.size() != model.schema().property_count())
        throw EvaluationError("property vector has wrong length", theta.value);
    for (double v : psi)
        if (!std::isfinite(v)) throw EvaluationError("non-finite property value", theta.value);
    return psi;
}

// Finite-difference displacement for driver d, honoring the exposure box.
// mode: 0 central, +1 forward only, -1 backward only.
struct FdPlan {
    double h;
    int mode;
};

FdPlan fd_plan(const DriverSchema& schema, const DriverVector& theta, int d, double rel_step) {
    double x = theta.value[d];
    double h = rel_step * std::max(std::abs(x), 1.0);
    double lo = schema.lower[d], hi = schema.upper[d];
    if (hi - lo <= 0) return {h, 0};  // point box: driver fixed, derivative still defined
    bool room_up = x + h <= hi, room_dn = x - h >= lo;
    if (room_up && room_dn) return {h, 0};
    if (room_up) return {h, +1};
    if (room_dn) return {h, -1};
    return {(hi - lo) / 2, x > (lo + hi) / 2 ? -1 : +1};
}

}  // namespace

std::vector<double> exposure(const DriverVector& theta, const DriverVector& theta0) {
    require_same_schema(theta, theta0);
    std::vector<double> e(theta.value.size());
    for (size_t d = 0; d < e.size(); ++d) e[d] = theta.value[d] - theta0.value[d];
    return e;
}

std::vector<double> argmax_adaptation(const ModelInterface& model, const DriverVector& theta,
                                      const EngineOptions& opt) {
    const PropertySchema& ps = model.schema();
    const size_t M = ps.behaviour_count();
    std::vector<double> tau(M);
    for (size_t m = 0; m < M; ++m) {
        if (!std::isfinite(ps.behaviour_lower[m]) || !std::isfinite(ps.behaviour_upper[m]))
            throw ValidationError("behaviour bounds must be finite for argmax_adaptation");
        tau[m] = 0.5 * (ps.behaviour_lower[m] + ps.behaviour_upper[m]);
    }
    // Each behaviour maximizes the property it is paired with; with no pair,
    // it maximizes the primary property.
    std::vector<int> target(M, ps.primary_property);
    for (auto& [p, m] : ps.objective_pairs) target[m] = p;

    bool converged = false;
    for (int cycle = 0; cycle < opt.argmax_max_iter && !converged; ++cycle) {
        converged = true;
        for (size_t m = 0; m < M; ++m) {
            auto f = [&](double t) {
                std::vector<double> probe = tau;
                probe[m] = t;
                return eval_checked(model, theta, probe)[target[m]];
            };
            num::ScalarMaxResult r = num::golden_max(f, ps.behaviour_lower[m], ps.behaviour_upper[m],
                                                     opt.argmax_rel_tol, opt.argmax_max_iter);
            if (!r.converged)
                throw ConvergenceError("argmax_adaptation: bracket did not converge", tau, r.fx);
            double scale = std::max(std::abs(tau[m]), 1.0);
            if (std::abs(r.x - tau[m]) > opt.argmax_rel_tol * scale) converged = false;
            tau[m] = r.x;
        }
        if (M == 1) break;  // single behaviour: one bracketed pass is exact
    }
    if (!converged && M > 1) {
        double best = eval_checked(model, theta, tau)[target[0]];
        throw ConvergenceError("argmax_adaptation: coordinate cycling stalled", tau, best);
    }
    return tau;
}

std::vector<double> behaviour_response(const ModelInterface& model, const DriverVector& theta,
                                       const EngineOptions& opt) {
    if (auto closed = model.closed_form_response(theta)) {
        if (closed->size() != model.schema().behaviour_count())
            throw EvaluationError("closed-form response has wrong length", theta.value);
        return *closed;
    }
    return argmax_adaptation(model, theta, opt);
}

std::vector<double> sensitivity_abs(const ModelInterface& model, const DriverVector& theta,
                                    const DriverVector& theta0, const EngineOptions& opt) {
    require_same_schema(theta, theta0);
    std::vector<double> tau0 = behaviour_response(model, theta0, opt);
    std::vector<double> at = eval_checked(model, theta, tau0);
    std::vector<double> base = eval_checked(model, theta0, tau0);
    for (size_t p = 0; p < at.size(); ++p) at[p] -= base[p];
    return at;
}

namespace {

// d/d theta_d of p -> f(theta) for all properties at once.
template <typename F>
Matrix jacobian(const ModelInterface& model, const DriverVector& theta, const F& f, int P,
                double rel_step, std::vector<unsigned char>* one_sided) {
    const DriverSchema& ds = model.drivers();
    const int D = static_cast<int>(ds.size());
    Matrix J(P, D);
    if (one_sided) one_sided->assign(D, 0);
    std::vector<double> center;  // evaluated lazily, only if some driver needs one-sided
    for (int d = 0; d < D; ++d) {
        FdPlan plan = fd_plan(ds, theta, d, rel_step);
        DriverVector tp = theta, tm = theta;
        if (plan.mode == 0) {
            tp.value[d] += plan.h;
            tm.value[d] -= plan.h;
            std::vector<double> fp = f(tp), fm = f(tm);
            for (int p = 0; p < P; ++p) J.at(p, d) = (fp[p] - fm[p]) / (2 * plan.h);
        } else {
            if (one_sided) (*one_sided)[d] = 1;
            if (center.empty()) center = f(theta);
            if (plan.mode > 0) {
                tp.value[d] += plan.h;
                std::vector<double> fp = f(tp);
                for (int p = 0; p < P; ++p) J.at(p, d) = (fp[p] - center[p]) / plan.h;
            } else {
                tm.value[d] -= plan.h;
                std::vector<double> fm = f(tm);
                for (int p = 0; p < P; ++p) J.at(p, d) = (center[p] - fm[p]) / plan.h;
            }
        }
    }
    return J;
}

}  // namespace

Matrix sensitivity_marginal(const ModelInterface& model, const DriverVector& theta,
                            const DriverVector& theta0, const EngineOptions& opt,
                            std::vector<unsigned char>* one_sided) {
    require_same_schema(theta, theta0);
    std::vector<double> tau0 = behaviour_response(model, theta0, opt);
    const int P = static_cast<int>(model.schema().property_count());
    auto f = [&](const DriverVector& t) { return eval_checked(model, t, tau0); };
    return jacobian(model, theta, f, P, opt.fd_rel_step, one_sided);
}

std::vector<double> adaptation_abs(const ModelInterface& model, const DriverVector& theta,
                                   const DriverVector& theta0, const EngineOptions& opt) {
    require_same_schema(theta, theta0);
    std::vector<double> tau0 = behaviour_response(model, theta0, opt);
    std::vector<double> tau = behaviour_response(model, theta, opt);
    std::vector<double> adapted = eval_checked(model, theta, tau);
    std::vector<double> frozen = eval_checked(model, theta, tau0);
    const PropertySchema& ps = model.schema();
    std::vector<double> aA(adapted.size());
    for (size_t p = 0; p < aA.size(); ++p) {
        aA[p] = adapted[p] - frozen[p];
        if (ps.is_maximized(static_cast<int>(p)) && aA[p] < -opt.optimality_slack) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "adaptation decreased maximized property '%s' by %.3e",
                          ps.properties[p].c_str(), -aA[p]);
            throw OptimalityViolation(buf);
        }
    }
    return aA;
}

std::vector<double> adaptation_behaviour(const ModelInterface& model, const DriverVector& theta,
                                         const DriverVector& theta0, const EngineOptions& opt) {
    require_same_schema(theta, theta0);
    std::vector<double> tau = behaviour_response(model, theta, opt);
    std::vector<double> tau0 = behaviour_response(model, theta0, opt);
    for (size_t m = 0; m < tau.size(); ++m) tau[m] -= tau0[m];
    return tau;
}

AdaptationMarginals adaptation_marginals(const ModelInterface& model, const DriverVector& theta,
                                         const DriverVector& theta0, const EngineOptions& opt) {
    require_same_schema(theta, theta0);
    const DriverSchema& ds = model.drivers();
    const PropertySchema& ps = model.schema();
    const int P = static_cast<int>(ps.property_count());
    const int M = static_cast<int>(ps.behaviour_count());
    const int D = static_cast<int>(ds.size());

    std::vector<double> tau0 = behaviour_response(model, theta0, opt);
    auto aA_at = [&](const DriverVector& t) {
        std::vector<double> tau = behaviour_response(model, t, opt);
        std::vector<double> adapted = eval_checked(model, t, tau);
        std::vector<double> frozen = eval_checked(model, t, tau0);
        for (int p = 0; p < P; ++p) adapted[p] -= frozen[p];
        return adapted;
    };
    auto tau_at = [&](const DriverVector& t) { return behaviour_response(model, t, opt); };

    AdaptationMarginals out;
    out.aa = jacobian(model, theta, aA_at, P, opt.fd_rel_step, &out.one_sided);
    out.ca = jacobian(model, theta, tau_at, M, opt.fd_rel_step, nullptr);

    // curvature of the adaptive capacity: central second difference
    out.ba = Matrix(P, D);
    std::vector<double> fc = aA_at(theta);
    for (int d = 0; d < D; ++d) {
        FdPlan plan = fd_plan(ds, theta, d, opt.fd2_rel_step);
        DriverVector tp = theta, tm = theta;
        if (plan.mode == 0) {
            tp.value[d] += plan.h;
            tm.value[d] -= plan.h;
            std::vector<double> fp = aA_at(tp), fm = aA_at(tm);
            for (int p = 0; p < P; ++p)
                out.ba.at(p, d) = (fp[p] - 2 * fc[p] + fm[p]) / (plan.h * plan.h);
        } else {
            // one-sided second difference at a box edge
            double sgn = plan.mode > 0 ? 1.0 : -1.0;
            DriverVector t1 = theta, t2 = theta;
            t1.value[d] += sgn * plan.h;
            t2.value[d] += sgn * 2 * plan.h;
            std::vector<double> f1 = aA_at(t1), f2 = aA_at(t2);
            for (int p = 0; p < P; ++p)
                out.ba.at(p, d) = (f2[p] - 2 * f1[p] + fc[p]) / (plan.h * plan.h);
            out.one_sided[d] = 1;
        }
    }
    return out;
}

TotalImpact total_impact(const ModelInterface& model, const DriverVector& theta,
                         const DriverVector& theta0, const EngineOptions& opt) {
    require_same_schema(theta, theta0);
    std::vector<double> tau0 = behaviour_response(model, theta0, opt);
    std::vector<double> tau = behaviour_response(model, theta, opt);
    std::vector<double> adapted = eval_checked(model, theta, tau);
    std::vector<double> base = eval_checked(model, theta0, tau0);

    TotalImpact out;
    out.TI.resize(adapted.size());
    for (size_t p = 0; p < adapted.size(); ++p) out.TI[p] = adapted[p] - base[p];

    // identity check: TI must equal S + aA
    std::vector<double> frozen = eval_checked(model, theta, tau0);
    for (size_t p = 0; p < adapted.size(); ++p) {
        double S = frozen[p] - base[p];
        double aA = adapted[p] - frozen[p];
        if (std::abs(out.TI[p] - (S + aA)) > opt.decomposition_tol)
            throw ConsistencyError("total impact decomposition identity violated");
    }

    const int P = static_cast<int>(model.schema().property_count());
    auto adapted_at = [&](const DriverVector& t) {
        return eval_checked(model, t, behaviour_response(model, t, opt));
    };
    out.ti_marginal = jacobian(model, theta, adapted_at, P, opt.fd_rel_step, nullptr);
    return out;
}

ImpactRecord evaluate_record(const ModelInterface& model, const DriverVector& theta,
                             const DriverVector& theta0, const EngineOptions& opt) {
    require_same_schema(theta, theta0);
    const PropertySchema& ps = model.schema();
    ImpactRecord rec;
    rec.theta = theta;
    rec.exposure = exposure(theta, theta0);

    std::vector<double> tau0 = behaviour_response(model, theta0, opt);
    std::vector<double> tau = behaviour_response(model, theta, opt);
    std::vector<double> base = eval_checked(model, theta0, tau0);
    std::vector<double> frozen = eval_checked(model, theta, tau0);
    std::vector<double> adapted = eval_checked(model, theta, tau);

    const size_t P = ps.property_count();
    rec.S.resize(P);
    rec.aA.resize(P);
    rec.TI.resize(P);
    for (size_t p = 0; p < P; ++p) {
        rec.S[p] = frozen[p] - base[p];
        rec.aA[p] = adapted[p] - frozen[p];
        rec.TI[p] = adapted[p] - base[p];
        if (ps.is_maximized(static_cast<int>(p)) && rec.aA[p] < -opt.optimality_slack)
            throw OptimalityViolation("adaptation decreased a maximized property");
    }
    rec.cA = tau;
    for (size_t m = 0; m < rec.cA.size(); ++m) rec.cA[m] -= tau0[m];

    rec.s = sensitivity_marginal(model, theta, theta0, opt, &rec.one_sided);
    AdaptationMarginals am = adaptation_marginals(model, theta, theta0, opt);
    rec.aa = std::move(am.aa);
    rec.ba = std::move(am.ba);
    rec.ca = std::move(am.ca);
    for (size_t d = 0; d < rec.one_sided.size() && d < am.one_sided.size(); ++d)
        rec.one_sided[d] |= am.one_sided[d];

    rec.ti_marginal = Matrix(rec.s.rows, rec.s.cols);
    for (int p = 0; p < rec.s.rows; ++p)
        for (int d = 0; d < rec.s.cols; ++d)
            rec.ti_marginal.at(p, d) = rec.s.at(p, d) + rec.aa.at(p, d);

    double Sprim = rec.S[ps.primary_property];
    rec.stressor_sign = (Sprim > 0) - (Sprim < 0);
    return rec;
}

std::vector<double> sweep_grid(double lo, double hi, double baseline, int n) {
    if (n < 3) throw ValidationError("sweep needs at least 3 grid points");
    if (!(lo < hi)) throw ValidationError("sweep bounds must satisfy lo < hi");
    std::vector<double> grid(n);
    double step = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) grid[i] = lo + step * i;
    grid.front() = lo;
    grid.back() = hi;
    if (baseline < lo || baseline > hi) return grid;

    // keep a plain linspace when the baseline already is a node
    double pos = (baseline - lo) / step;
    double nearest = std::round(pos);
    if (std::abs(pos - nearest) < 1e-9) {
        grid[static_cast<int>(nearest)] = baseline;
        return grid;
    }
    // otherwise: two even half-ranges meeting exactly at the baseline
    int n_lo = std::max(1, static_cast<int>(std::round((baseline - lo) / (hi - lo) * (n - 1))));
    n_lo = std::min(n_lo, n - 2);
    for (int i = 0; i <= n_lo; ++i) grid[i] = lo + (baseline - lo) * i / n_lo;
    int n_hi = n - 1 - n_lo;
    for (int i = 1; i <= n_hi; ++i) grid[n_lo + i] = baseline + (hi - baseline) * i / n_hi;
    grid[n_lo] = baseline;
    return grid;
}

static std::vector<ImpactRecord> sweep_impl(const ModelInterface& model, const DriverVector& theta0,
                                            std::string_view driver, double lo, double hi, int n,
                                            const SweepOptions& opt, bool parallel) {
    theta0.validate();
    const DriverSchema& ds = model.drivers();
    int d = ds.index(driver);
    if (!opt.allow_out_of_box && (lo < ds.lower[d] - 1e-12 || hi > ds.upper[d] + 1e-12))
        throw ValidationError("sweep bounds outside the exposure box for driver '" +
                              std::string(driver) + "' (pass allow_out_of_box to override)");
    std::vector<double> grid = sweep_grid(lo, hi, theta0.value[d], n);
    std::vector<ImpactRecord> records(grid.size());

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < static_cast<int>(grid.size()); ++i) {
            DriverVector theta = theta0;
            theta.value[d] = grid[i];
            theta.baseline = (grid[i] == theta0.value[d]);
            records[i] = evaluate_record(model, theta, theta0, opt.engine);
        }
    } else {
        for (int i = 0; i < static_cast<int>(grid.size()); ++i) {
            DriverVector theta = theta0;
            theta.value[d] = grid[i];
            theta.baseline = (grid[i] == theta0.value[d]);
            records[i] = evaluate_record(model, theta, theta0, opt.engine);
        }
    }
    return records;
}

std::vector<ImpactRecord> sweep(const ModelInterface& model, const DriverVector& theta0,
                                std::string_view driver, double lo, double hi, int n,
                                const SweepOptions& opt) {
    return sweep_impl(model, theta0, driver, lo, hi, n, opt, opt.parallel);
}

std::vector<ImpactRecord> sweep_serial(const ModelInterface& model, const DriverVector& theta0,
                                       std::string_view driver, double lo, double hi, int n,
                                       const SweepOptions& opt) {
    return sweep_impl(model, theta0, driver, lo, hi, n, opt, false);
}

}  // namespace impact
