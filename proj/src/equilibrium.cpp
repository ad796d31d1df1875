#include "flatfish/equilibrium.hpp"

#include <cmath>
#include <limits>

namespace flatfish {

using impact::ValidationError;

namespace {

PeriodEquilibrium corner_solution(const ModelParams& p, const StockState& s, const Quota& quota,
                                  int dead_metier) {
    PeriodEquilibrium out;
    out.regime = dead_metier == 0 ? Regime::kCornerMetier1 : Regime::kCornerMetier2;
    out.metier_active[dead_metier] = false;
    int k = 1 - dead_metier;
    Vec2 X = harvestability(p, s);
    Vec2 estar = zero_profit_effort(p);
    out.effort = estar;
    out.effort[dead_metier] = 0.0;

    // supply is proportional along the remaining metier's catch composition;
    // the scale u = n_k e_k^eps comes from the tightest binding quota, else
    // from the zero-profit condition at willingness-to-pay prices
    auto quantities_at = [&](double u) {
        Vec2 q;
        for (int i = 0; i < kSpecies; ++i) q[i] = p.nu[i][k] * X[i] * u;
        return q;
    };
    double u_cap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kSpecies; ++i) {
        if (quota.tac[i] && p.nu[i][k] * X[i] > 0)
            u_cap = std::min(u_cap, *quota.tac[i] / (p.nu[i][k] * X[i]));
    }
    // zero-profit scale: pow(e*,eps) * sum_i nu_ik X_i WTP_i(q(u)) = omega e* + phi
    double pb = zero_profit_baskets(p)[k];
    auto basket_at = [&](double u) {
        Vec2 q = quantities_at(u);
        for (int i = 0; i < kSpecies; ++i) q[i] = std::max(q[i], 1e-300);
        Vec2 w = willingness_to_pay(p, q);
        double b = 0;
        for (int i = 0; i < kSpecies; ++i) b += p.nu[i][k] * X[i] * w[i];
        return b;
    };
    double u_zero = std::numeric_limits<double>::infinity();
    {
        double lo = 1e-30, hi = 1e30;
        if (basket_at(lo) > pb && basket_at(hi) < pb) {
            for (int it = 0; it < 400 && hi / lo > 1e-15 + 1.0; ++it) {
                double mid = std::sqrt(lo * hi);
                (basket_at(mid) > pb ? lo : hi) = mid;
            }
            u_zero = std::sqrt(lo * hi);
        }
    }
    double u = std::min(u_cap, u_zero);
    if (!std::isfinite(u) || !(u > 0))
        throw ValidationError("corner_solution: no viable scale for the remaining metier");
    out.quantity = quantities_at(u);
    for (int i = 0; i < kSpecies; ++i)
        out.quota_binding[i] = quota.tac[i] && out.quantity[i] >= *quota.tac[i] * (1 - 1e-12);
    {
        // a species the surviving metier cannot catch has no market: its
        // quantity is zero and it carries no price
        Vec2 floored{std::max(out.quantity[0], 1e-300), std::max(out.quantity[1], 1e-300)};
        Vec2 wtp = willingness_to_pay(p, floored);
        for (int i = 0; i < kSpecies; ++i) out.price[i] = out.quantity[i] > 0 ? wtp[i] : 0.0;
    }
    out.fleet[k] = u / std::pow(estar[k], p.epsilon);
    out.fleet[dead_metier] = 0.0;
    out.metier_rent[k] = profit(p, s, out.price, estar[k], k);
    out.numeraire = p.omega;
    for (int i = 0; i < kSpecies; ++i) out.numeraire -= out.price[i] * out.quantity[i];
    out.negative_numeraire = out.numeraire < 0;
    return out;
}

}  // namespace

PeriodEquilibrium period_equilibrium(const ModelParams& p, const StockState& s, const Quota& quota,
                                     const ClosureOptions& opt) {
    if (opt.force_regime == 1) return corner_solution(p, s, quota, 0);
    if (opt.force_regime == 2) return corner_solution(p, s, quota, 1);

    PeriodEquilibrium out;
    out.effort = zero_profit_effort(p);
    out.price = equilibrium_prices(p, s);

    Vec2 q = demanded_quantities(p, out.price);
    for (int i = 0; i < kSpecies; ++i)
        out.quota_binding[i] = quota.tac[i] && q[i] > *quota.tac[i];
    if (out.quota_binding[0] && out.quota_binding[1]) {
        q = {*quota.tac[0], *quota.tac[1]};
    } else if (out.quota_binding[0] || out.quota_binding[1]) {
        int capped = out.quota_binding[0] ? 0 : 1;
        int open = 1 - capped;
        q[capped] = *quota.tac[capped];
        // rationed household: the open species clears at its market price;
        // with substitutes this raises its demand, possibly onto its own cap
        q[open] = invert_willingness_to_pay(p, open, q[capped], out.price[open]);
        if (quota.tac[open] && q[open] > *quota.tac[open]) {
            q[open] = *quota.tac[open];
            out.quota_binding[open] = true;
        }
    }
    FleetResult fleets = fleet_sizes(p, q, s, out.effort);
    if (fleets.corner[0] || fleets.corner[1]) {
        int dead = fleets.corner[0] ? 0 : 1;
        return corner_solution(p, s, quota, dead);
    }
    out.quantity = q;
    out.fleet = fleets.n;
    out.numeraire = p.omega;
    for (int i = 0; i < kSpecies; ++i) out.numeraire -= out.price[i] * out.quantity[i];
    out.negative_numeraire = out.numeraire < 0;
    out.metier_rent = {0.0, 0.0};  // zero profit by construction
    return out;
}

}  // namespace flatfish
