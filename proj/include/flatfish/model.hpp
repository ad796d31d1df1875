#pragma once

#include <array>
#include <optional>
#include <string>

#include "impact/errors.hpp"

// Two-species, two-metier North Sea flatfish model: Ricker growth,
// generalized Gordon-Schaefer harvesting, CES/Dixit-Stiglitz household
// demand, zero-profit pricing and endogenous fleet sizes. Species index 0
// is plaice, 1 is sole; metier 0 targets plaice, metier 1 targets sole.
namespace flatfish {

using Vec2 = std::array<double, 2>;

constexpr int kSpecies = 2;
constexpr int kMetiers = 2;

struct ModelParams {
    double epsilon = 0.5;              // returns to effort, in (0,1)
    Vec2 chi{0.308, 0.308};            // stock harvesting efficiency exponents
    double nu[2][2] = {{1.00, 0.75},   // nu[species][metier] catchability
                       {0.00, 0.25}};
    double omega = 1.0;                // wage, model units (household income)
    Vec2 phi{1e-8, 1e-8};              // fixed cost per firm, per metier
    double alpha = 6.77e-5;            // fish-consumption weight
    Vec2 beta{2.69, 4.14};             // species utility weights
    double eta = 1.10;                 // demand elasticity of fish
    double sigma = 2.01;               // substitution elasticity
    Vec2 ricker_a{0.0, 0.0};           // growth scale per species
    Vec2 ricker_b{1.0, 1.0};           // density dependence per species
    double kappa = 533459.8;           // tonnes per model stock unit
    double w_scale = 1.005218e13;      // EUR per model income unit

    double nu_det() const { return nu[0][0] * nu[1][1] - nu[0][1] * nu[1][0]; }
    void validate() const;  // throws impact::ValidationError
};

// Default calibrated parameter set. The Ricker scales are pinned so the
// reference steady state (plaice 586,709 t harvesting 132,122 t; sole
// 85,937 t harvesting the 17,545 t quota) sits exactly on the growth curves
// with b_i = 1 in MSY-scaled stock units.
ModelParams default_params();

// Reference steady-state anchors used across defaults and tests (tonnes).
struct SteadyAnchors {
    double plaice_stock_t = 586709.0;
    double sole_stock_t = 85937.0;
    double plaice_quantity_t = 132122.0;
    double sole_quantity_t = 17545.0;   // 2020 sole quota
    double plaice_price_eur = 3.67;
    double sole_price_eur = 6.63;
    double fleet_plaice = 674.0;
    double fleet_sole = 2315.0;
    // short-run analysis baseline (calibration vintage)
    double sweep_plaice_stock_t = 148589.0;
    double sweep_sole_stock_t = 85936.0;
};

struct StockState {
    Vec2 x{0.0, 0.0};  // model units, >= 0

    Vec2 tonnes(const ModelParams& p) const { return {x[0] * p.kappa, x[1] * p.kappa}; }
    static StockState from_tonnes(const ModelParams& p, const Vec2& t) {
        return StockState{{t[0] / p.kappa, t[1] / p.kappa}};
    }
};

struct Quota {
    std::array<std::optional<double>, 2> tac;  // model units per species

    static Quota sole_tac(const ModelParams& p, double tonnes) {
        Quota q;
        q.tac[1] = tonnes / p.kappa;
        return q;
    }
    static Quota none() { return Quota{}; }
};

// --- ecosystem ---------------------------------------------------------

// Ricker recruitment a*x*exp(-b*x); x >= 0
double ricker_growth(double x, double a, double b);

// xdot_i = g_i(x_i) - H_i
Vec2 stock_change(const ModelParams& p, const StockState& s, const Vec2& harvest);

// --- harvesting --------------------------------------------------------

// harvest of each species by one firm of metier k at effort e
Vec2 harvest_per_firm(const ModelParams& p, double effort, const StockState& s, int metier);

// abundance factors x_i^chi_i
Vec2 harvestability(const ModelParams& p, const StockState& s);

// revenue per unit effective effort of metier k: sum_i nu_ik x_i^chi_i p_i
double revenue_basket(const ModelParams& p, const StockState& s, const Vec2& price, int metier);

struct AdaptiveEffort {
    Vec2 effort{0, 0};
    std::array<bool, 2> zero_revenue{false, false};  // empty basket flagged
};

// profit-maximizing effort per metier before free entry binds:
// e_k = (eps/omega * basket_k)^(1/(1-eps))
AdaptiveEffort adaptive_effort(const ModelParams& p, const StockState& s, const Vec2& price);

// effort implied by the zero-profit condition: e_k = phi_k/omega * eps/(1-eps)
Vec2 zero_profit_effort(const ModelParams& p);

// per-firm profit of metier k at given effort and prices
double profit(const ModelParams& p, const StockState& s, const Vec2& price, double effort,
              int metier);

// prices making both metiers' maximized profit zero; positive for sane
// parameters, throws on singular nu or non-positive result
Vec2 equilibrium_prices(const ModelParams& p, const StockState& s);

// the zero-profit revenue baskets pb_k = phi_k(1 + eps/(1-eps)) e*^(-eps)
Vec2 zero_profit_baskets(const ModelParams& p);

// --- household ---------------------------------------------------------

// CES composite Q(q)
double ces_quantity(const ModelParams& p, const Vec2& q);

// U(Q, y) with the eta == 1 logarithmic branch
double utility(const ModelParams& p, const Vec2& q, double numeraire);

// quantities demanded at prices (household optimum, no rationing)
Vec2 demanded_quantities(const ModelParams& p, const Vec2& price);

// willingness to pay for each species at consumed quantities
Vec2 willingness_to_pay(const ModelParams& p, const Vec2& q);

// demand for species j given the consumption of species i fixed (rationing);
// throws on an infeasible (negative inner base) combination
double conditional_demand(const ModelParams& p, int fixed_species, double fixed_quantity,
                          double own_price);

// quantity of `species` whose willingness to pay equals target_price while
// the other species stays at other_quantity; the rationed household optimum
double invert_willingness_to_pay(const ModelParams& p, int species, double other_quantity,
                                 double target_price);

struct FleetResult {
    Vec2 n{0, 0};
    std::array<bool, 2> corner{false, false};  // clamped at zero
    Vec2 raw{0, 0};                            // before clamping
};

// fleet sizes reproducing consumed quantities q at efforts e (market
// clearing, A-matrix inversion); negative sizes are clamped and flagged
FleetResult fleet_sizes(const ModelParams& p, const Vec2& q, const StockState& s, const Vec2& effort);

// --- scale conversions ---------------------------------------------------

double tonnes_to_model(const ModelParams& p, double tonnes);
double model_to_tonnes(const ModelParams& p, double model_units);
// EUR/kg <-> model price (relative to income): factor 1000*kappa/w_scale
double eurkg_to_model(const ModelParams& p, double eur_per_kg);
double model_to_eurkg(const ModelParams& p, double model_price);

}  // namespace flatfish
