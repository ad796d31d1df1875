#include "flatfish/model.hpp"

#include <cmath>
#include <cstdio>

namespace flatfish {

using impact::ValidationError;

void ModelParams::validate() const {
    auto fail = [](const std::string& what) { throw ValidationError("ModelParams: " + what); };
    if (!(epsilon > 0.0 && epsilon < 1.0)) fail("epsilon must lie in (0,1)");
    for (int i = 0; i < kSpecies; ++i) {
        if (!(chi[i] > 0)) fail("chi must be positive");
        if (!(beta[i] > 0)) fail("beta must be positive");
        if (!(ricker_a[i] > 0)) fail("ricker_a must be positive");
        if (ricker_b[i] < 0) fail("ricker_b must be nonnegative");
        if (!(phi[i] > 0)) fail("phi must be positive");
        for (int k = 0; k < kMetiers; ++k)
            if (nu[i][k] < 0) fail("nu entries must be nonnegative");
    }
    if (nu_det() == 0.0) fail("nu matrix is singular");
    if (!(sigma > 1.0)) fail("sigma must exceed 1");
    if (!(eta > 0.0)) fail("eta must be positive");
    if (!(alpha > 0.0)) fail("alpha must be positive");
    if (!(omega > 0.0)) fail("omega must be positive");
    if (!(kappa > 0.0) || !(w_scale > 0.0)) fail("scale parameters must be positive");
}

ModelParams default_params() {
    ModelParams p;
    SteadyAnchors a;
    double x1 = a.plaice_stock_t / p.kappa;
    double q1 = a.plaice_quantity_t / p.kappa;
    double x2 = a.sole_stock_t / p.kappa;
    double q2 = a.sole_quantity_t / p.kappa;
    p.ricker_a[0] = q1 * std::exp(p.ricker_b[0] * x1) / x1;
    p.ricker_a[1] = q2 * std::exp(p.ricker_b[1] * x2) / x2;
    return p;
}

double ricker_growth(double x, double a, double b) {
    if (x < 0) throw ValidationError("ricker_growth: negative stock");
    return a * x * std::exp(-b * x);
}

Vec2 stock_change(const ModelParams& p, const StockState& s, const Vec2& harvest) {
    Vec2 dx;
    for (int i = 0; i < kSpecies; ++i)
        dx[i] = ricker_growth(s.x[i], p.ricker_a[i], p.ricker_b[i]) - harvest[i];
    return dx;
}

Vec2 harvestability(const ModelParams& p, const StockState& s) {
    Vec2 X;
    for (int i = 0; i < kSpecies; ++i) {
        if (s.x[i] < 0) throw ValidationError("harvestability: negative stock");
        X[i] = std::pow(s.x[i], p.chi[i]);
    }
    return X;
}

Vec2 harvest_per_firm(const ModelParams& p, double effort, const StockState& s, int metier) {
    if (effort < 0) throw ValidationError("harvest_per_firm: negative effort");
    Vec2 X = harvestability(p, s);
    double epow = std::pow(effort, p.epsilon);
    Vec2 h;
    for (int i = 0; i < kSpecies; ++i) h[i] = p.nu[i][metier] * epow * X[i];
    return h;
}

double revenue_basket(const ModelParams& p, const StockState& s, const Vec2& price, int metier) {
    Vec2 X = harvestability(p, s);
    double b = 0;
    for (int i = 0; i < kSpecies; ++i) b += p.nu[i][metier] * X[i] * price[i];
    return b;
}

AdaptiveEffort adaptive_effort(const ModelParams& p, const StockState& s, const Vec2& price) {
    AdaptiveEffort out;
    for (int k = 0; k < kMetiers; ++k) {
        double basket = revenue_basket(p, s, price, k);
        if (basket <= 0) {
            out.effort[k] = 0.0;
            out.zero_revenue[k] = true;
            continue;
        }
        out.effort[k] = std::pow(p.epsilon / p.omega * basket, 1.0 / (1.0 - p.epsilon));
    }
    return out;
}

Vec2 zero_profit_effort(const ModelParams& p) {
    Vec2 e;
    for (int k = 0; k < kMetiers; ++k)
        e[k] = p.phi[k] / p.omega * p.epsilon / (1.0 - p.epsilon);
    return e;
}

double profit(const ModelParams& p, const StockState& s, const Vec2& price, double effort,
              int metier) {
    if (effort < 0) throw ValidationError("profit: negative effort");
    double revenue = std::pow(effort, p.epsilon) * revenue_basket(p, s, price, metier);
    return revenue - p.omega * effort - p.phi[metier];
}

Vec2 zero_profit_baskets(const ModelParams& p) {
    Vec2 estar = zero_profit_effort(p);
    Vec2 pb;
    for (int k = 0; k < kMetiers; ++k)
        pb[k] = (p.omega * estar[k] + p.phi[k]) / std::pow(estar[k], p.epsilon);
    return pb;
}

Vec2 equilibrium_prices(const ModelParams& p, const StockState& s) {
    double det = p.nu_det();
    if (det == 0.0) throw ValidationError("equilibrium_prices: singular nu matrix");
    Vec2 pb = zero_profit_baskets(p);
    Vec2 X = harvestability(p, s);
    if (X[0] <= 0 || X[1] <= 0)
        throw ValidationError("equilibrium_prices: vanished stock");
    Vec2 price;
    price[0] = (p.nu[1][1] * pb[0] - p.nu[1][0] * pb[1]) / (det * X[0]);
    price[1] = (p.nu[0][0] * pb[1] - p.nu[0][1] * pb[0]) / (det * X[1]);
    for (int i = 0; i < kSpecies; ++i)
        if (!(price[i] > 0) || !std::isfinite(price[i]))
            throw ValidationError("equilibrium_prices: non-positive price, inconsistent parameters");
    return price;
}

double ces_quantity(const ModelParams& p, const Vec2& q) {
    double inner = (p.sigma - 1.0) / p.sigma;
    double sum = 0;
    for (int i = 0; i < kSpecies; ++i) {
        if (q[i] < 0) throw ValidationError("ces_quantity: negative quantity");
        sum += std::pow(p.beta[i] * q[i], inner);
    }
    return std::pow(sum, p.sigma / (p.sigma - 1.0));
}

double utility(const ModelParams& p, const Vec2& q, double numeraire) {
    double Q = ces_quantity(p, q);
    if (p.eta == 1.0) {
        if (Q <= 0) throw ValidationError("utility: log branch needs positive Q");
        return numeraire + p.alpha * std::log(Q);
    }
    if (Q == 0 && p.eta < 1.0)
        throw ValidationError("utility: Q = 0 with eta < 1 is undefined");
    return numeraire + p.alpha * p.eta / (p.eta - 1.0) * std::pow(Q, (p.eta - 1.0) / p.eta);
}

Vec2 demanded_quantities(const ModelParams& p, const Vec2& price) {
    for (int i = 0; i < kSpecies; ++i)
        if (!(price[i] > 0)) throw ValidationError("demanded_quantities: prices must be positive");
    double sum = 0;
    for (int j = 0; j < kSpecies; ++j) sum += std::pow(price[j] / p.beta[j], 1.0 - p.sigma);
    double outer = std::pow(sum, (p.sigma - p.eta) / (1.0 - p.sigma));
    Vec2 q;
    for (int i = 0; i < kSpecies; ++i)
        q[i] = std::pow(p.alpha, p.eta) * std::pow(price[i], -p.sigma) *
               std::pow(p.beta[i], p.sigma - 1.0) * outer;
    return q;
}

Vec2 willingness_to_pay(const ModelParams& p, const Vec2& q) {
    for (int i = 0; i < kSpecies; ++i)
        if (!(q[i] > 0)) throw ValidationError("willingness_to_pay: quantities must be positive");
    double Q = ces_quantity(p, q);
    Vec2 price;
    for (int i = 0; i < kSpecies; ++i)
        price[i] = p.alpha * p.beta[i] * std::pow(p.beta[i] * q[i], -1.0 / p.sigma) *
                   std::pow(Q, (p.eta - p.sigma) / (p.eta * p.sigma));
    return price;
}

double conditional_demand(const ModelParams& p, int fixed_species, double fixed_quantity,
                          double own_price) {
    if (!(fixed_quantity > 0) || !(own_price > 0))
        throw ValidationError("conditional_demand: inputs must be positive");
    int other = 1 - fixed_species;
    double bq = p.beta[fixed_species] * fixed_quantity;
    double lead = std::pow(own_price / (p.alpha * p.beta[fixed_species]) * std::pow(bq, 1.0 / p.sigma),
                           p.eta * (p.sigma - 1.0) / (p.eta - p.sigma));
    double inner = lead - std::pow(bq, (p.sigma - 1.0) / p.sigma);
    if (inner <= 0)
        throw ValidationError("conditional_demand: infeasible quantity/price combination");
    return std::pow(inner, p.sigma / (p.sigma - 1.0)) / p.beta[other];
}

double invert_willingness_to_pay(const ModelParams& p, int species, double other_quantity,
                                 double target_price) {
    if (!(target_price > 0) || !(other_quantity > 0))
        throw ValidationError("invert_willingness_to_pay: inputs must be positive");
    // WTP is strictly decreasing in the own quantity (elasticity between
    // -1/sigma and -1/eta), so a log-space bisection cannot fail
    double lo = 1e-30, hi = 1e30;
    Vec2 q;
    q[1 - species] = other_quantity;
    for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-15; ++it) {
        double mid = std::sqrt(lo * hi);
        q[species] = mid;
        if (willingness_to_pay(p, q)[species] > target_price)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

FleetResult fleet_sizes(const ModelParams& p, const Vec2& q, const StockState& s, const Vec2& effort) {
    double det = p.nu_det();
    if (det == 0.0) throw ValidationError("fleet_sizes: singular nu matrix");
    Vec2 X = harvestability(p, s);
    FleetResult out;
    // q_i / X_i = sum_k nu_ik u_k with u_k = n_k e_k^eps
    Vec2 r{0, 0};
    for (int i = 0; i < kSpecies; ++i) {
        if (q[i] > 0 && X[i] <= 0)
            throw ValidationError("fleet_sizes: positive consumption of an absent species");
        r[i] = X[i] > 0 ? q[i] / X[i] : 0.0;
    }
    Vec2 u;
    u[0] = (p.nu[1][1] * r[0] - p.nu[0][1] * r[1]) / det;
    u[1] = (p.nu[0][0] * r[1] - p.nu[1][0] * r[0]) / det;
    for (int k = 0; k < kMetiers; ++k) {
        double epow = std::pow(effort[k], p.epsilon);
        out.raw[k] = epow > 0 ? u[k] / epow : 0.0;
        if (out.raw[k] < 0) {
            out.n[k] = 0.0;
            out.corner[k] = true;
        } else {
            out.n[k] = out.raw[k];
        }
    }
    return out;
}

double tonnes_to_model(const ModelParams& p, double tonnes) { return tonnes / p.kappa; }
double model_to_tonnes(const ModelParams& p, double model_units) { return model_units * p.kappa; }

double eurkg_to_model(const ModelParams& p, double eur_per_kg) {
    return eur_per_kg * 1000.0 * p.kappa / p.w_scale;
}

double model_to_eurkg(const ModelParams& p, double model_price) {
    return model_price * p.w_scale / (1000.0 * p.kappa);
}

}  // namespace flatfish
