#pragma once

#include "flatfish/model.hpp"

namespace flatfish {

enum class Regime {
    kInterior,        // both metiers active, zero-profit prices
    kCornerMetier1,   // metier targeting plaice exited
    kCornerMetier2,   // metier targeting sole exited
    kCollapsed        // no viable metier
};

// Market equilibrium for one period at given stocks: free entry drives both
// active metiers to zero profit; a binding quota caps a species' harvest
// with the fleet count of its metier pinned by the cap. When a fleet size
// from market clearing turns negative that metier is removed and prices
// fall back to household willingness to pay (the quota rent then stays with
// the remaining metier).
struct PeriodEquilibrium {
    Regime regime = Regime::kInterior;
    Vec2 price{0, 0};        // market prices, model units
    Vec2 quantity{0, 0};     // consumed = harvested per species
    Vec2 effort{0, 0};       // per-firm effort per metier
    Vec2 fleet{0, 0};        // firm counts (real-valued, >= 0)
    double numeraire = 0.0;  // household numeraire consumption
    bool negative_numeraire = false;  // flagged, budget identity still holds
    std::array<bool, 2> quota_binding{false, false};
    std::array<bool, 2> metier_active{true, true};
    Vec2 metier_rent{0, 0};  // per-firm profit of active metiers (nonzero only off zero-profit)

    Vec2 harvest() const { return quantity; }
};

struct ClosureOptions {
    // force the metier-1-exit branch (used by continuation across a corner
    // transition); the interior inversion is still reported via fleet raw
    int force_regime = -1;  // -1 auto, 1 = corner metier 1, 2 = corner metier 2
};

// Throws impact::ValidationError when no equilibrium exists at these stocks
// (vanished stock with demanded consumption, non-positive prices).
PeriodEquilibrium period_equilibrium(const ModelParams& p, const StockState& s, const Quota& quota,
                                     const ClosureOptions& opt = {});

}  // namespace flatfish
