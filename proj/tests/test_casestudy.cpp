#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flatfish/casestudy.hpp"

using namespace flatfish;
using impact::DriverVector;

namespace {

CaseStudyConfig small_config(int grid = 21) {
    CaseStudyConfig c;
    c.grid_n = grid;
    c.parallel = false;
    return c;
}

}  // namespace

TEST_CASE("sweep baseline: zero-profit prices, quota-bound sole, adaptive = equilibrium effort") {
    CaseStudyConfig config = small_config();
    SweepBaseline base = resolve_sweep_baseline(config);
    const ModelParams& p = config.params;
    CHECK(model_to_eurkg(p, base.price[0]) == doctest::Approx(5.6).epsilon(0.02));
    CHECK(model_to_eurkg(p, base.price[1]) == doctest::Approx(6.6).epsilon(0.02));
    CHECK(model_to_tonnes(p, base.quantity[1]) == doctest::Approx(17545).epsilon(1e-10));

    // at a zero-profit state the profit-maximizing effort equals the
    // equilibrium effort, so the baseline behaviour is already optimal
    AdaptiveEffort e = adaptive_effort(p, base.stocks, base.price);
    CHECK(e.effort[0] == doctest::Approx(base.effort[0]).epsilon(1e-10));
    CHECK(e.effort[1] == doctest::Approx(base.effort[1]).epsilon(1e-10));
    CHECK(base.effort[0] == doctest::Approx(1e-8).epsilon(1e-12));
}

TEST_CASE("baseline record is identically zero") {
    CaseStudyConfig config = small_config();
    ImpactCurves curves = analyze_driver(config, "omega");
    REQUIRE(curves.baseline_index >= 0);
    const impact::ImpactRecord& rec = curves.records[curves.baseline_index];
    for (int pidx = 0; pidx < 7; ++pidx) {
        CHECK(rec.S[pidx] == 0.0);
        CHECK(rec.aA[pidx] == 0.0);
        CHECK(rec.TI[pidx] == 0.0);
    }
    CHECK(rec.cA[0] == 0.0);
    CHECK(rec.cA[1] == 0.0);
}

TEST_CASE("decomposition and profit-adaptation invariants hold at every grid point") {
    CaseStudyConfig config = small_config(31);
    for (const auto& box : config.exposure_box) {
        ImpactCurves curves = analyze_driver(config, box.driver);
        for (const auto& rec : curves.records) {
            for (int pidx = 0; pidx < 7; ++pidx)
                CHECK(std::abs(rec.TI[pidx] - (rec.S[pidx] + rec.aA[pidx])) <= 1e-10);
            CHECK(rec.aA[0] >= -1e-12);  // metier 1 profit
            CHECK(rec.aA[1] >= -1e-12);  // metier 2 profit
        }
    }
}

TEST_CASE("wage exposure leaves quantity sensitivity identically zero") {
    CaseStudyConfig config = small_config(31);
    ImpactCurves curves = analyze_driver(config, "omega");
    for (size_t i = 0; i < curves.records.size(); ++i) {
        const auto& rec = curves.records[i];
        CHECK(rec.S[2] == 0.0);  // quantity1: no omega in the harvest map
        CHECK(rec.S[3] == 0.0);
        if (static_cast<int>(i) != curves.baseline_index) {
            CHECK(std::abs(rec.cA[0]) > 0.0);  // fishers adapt through effort
            CHECK(rec.aA[2] != 0.0);           // adapted quantities move with effort
        }
    }
}

TEST_CASE("wage increase: sensitivity matches the closed form and TI stays negative") {
    CaseStudyConfig config = small_config();
    SweepModel model(config);
    DriverVector theta0 = model.baseline();
    double e0 = model.base_state().effort[0];

    DriverVector up = theta0.with("omega", 1.1 * config.params.omega);
    auto S = impact::sensitivity_abs(model, up, theta0);
    CHECK(S[0] == doctest::Approx(-0.1 * config.params.omega * e0).epsilon(1e-10));

    auto aA = impact::adaptation_abs(model, up, theta0);
    impact::TotalImpact ti = impact::total_impact(model, up, theta0);
    CHECK(ti.TI[0] < 0.0);
    CHECK(aA[0] > 0.0);
    CHECK(ti.TI[0] < aA[0]);

    // effort falls with wages, rises when returns to effort improve
    auto cA_up = impact::adaptation_behaviour(model, up, theta0);
    CHECK(cA_up[0] < 0.0);
    DriverVector eps_dn = theta0.with("epsilon", 0.48);
    auto cA_eps = impact::adaptation_behaviour(model, eps_dn, theta0);
    CHECK(cA_eps[0] > 0.0);
}

TEST_CASE("marginal adaptive effort: closed-form wage derivative at the baseline") {
    CaseStudyConfig config = small_config();
    SweepModel model(config);
    DriverVector theta0 = model.baseline();
    impact::AdaptationMarginals am = impact::adaptation_marginals(model, theta0, theta0);
    int d_omega = model.drivers().index("omega");
    const ModelParams& p = config.params;
    double e0 = model.base_state().effort[0];
    double expect = -e0 / ((1.0 - p.epsilon) * p.omega);
    CHECK(am.ca.at(0, d_omega) == doctest::Approx(expect).epsilon(1e-5));
    CHECK(am.ca.at(0, d_omega) < 0.0);
}

TEST_CASE("epsilon sweep: adaptation on profits is positive at both endpoints") {
    CaseStudyConfig config = small_config();
    ImpactCurves curves = analyze_driver(config, "epsilon");
    const auto& first = curves.records.front();
    const auto& last = curves.records.back();
    for (int k = 0; k < 2; ++k) {
        CHECK(first.aA[k] > 0.0);
        CHECK(last.aA[k] > 0.0);
    }
    // quantities are exposed to epsilon even with frozen effort
    CHECK(std::abs(first.S[2]) > 0.0);
}

TEST_CASE("closed-form effort matches the generic argmax on every grid point") {
    CaseStudyConfig config = small_config(21);
    SweepModel model(config);
    DriverVector theta0 = model.baseline();
    const impact::DriverSchema& ds = model.drivers();
    for (const auto& box : config.exposure_box) {
        int d = ds.index(box.driver);
        auto grid = impact::sweep_grid(box.lower, box.upper, theta0.value[d], config.grid_n);
        for (double v : grid) {
            DriverVector theta = theta0;
            theta.value[d] = v;
            auto closed = *model.closed_form_response(theta);
            auto numeric = impact::argmax_adaptation(model, theta);
            for (int m = 0; m < 2; ++m)
                CHECK(numeric[m] == doctest::Approx(closed[m]).epsilon(1e-6));
        }
    }
}

TEST_CASE("household overlay dominates forced consumption and binds where expected") {
    CaseStudyConfig config = small_config(41);
    for (const auto& box : config.exposure_box) {
        ImpactCurves curves = analyze_driver(config, box.driver);
        REQUIRE(curves.household.size() == curves.records.size());
        for (size_t i = 0; i < curves.records.size(); ++i) {
            const HouseholdOverlayPoint& hh = curves.household[i];
            CHECK(hh.level_adapted >= curves.forced_utility_adapted[i] - 1e-12);
            CHECK(hh.level_frozen >= curves.forced_utility_frozen[i] - 1e-12);
            if (!hh.constrained_adapted)  // demand-constrained: overlay equals the base curve
                CHECK(hh.level_adapted == doctest::Approx(curves.forced_utility_adapted[i]).epsilon(1e-14));
        }
    }

    // a deep wage cut floods the market: households discard fish and gain
    ImpactCurves omega = analyze_driver(config, "omega");
    const HouseholdOverlayPoint& low = omega.household.front();  // omega = 0.65
    CHECK(low.constrained_adapted);
    CHECK(low.level_adapted > omega.forced_utility_adapted.front() + 1e-12);
}

TEST_CASE("utility at the baseline exceeds the deep-wage-cut forced point") {
    CaseStudyConfig config = small_config();
    ImpactCurves omega = analyze_driver(config, "omega");
    CHECK(omega.base_utility > omega.forced_utility_adapted.front());
    CHECK(omega.base_utility > omega.forced_utility_frozen.front());
}

TEST_CASE("marginal summary: envelope zeros on profits at baseline and ordering of |ca|") {
    CaseStudyConfig config = small_config();
    auto rows = marginal_summary(config);
    double ca_eps = 0, ca_chi1 = 0, ca_omega = 0;
    for (const auto& r : rows) {
        if (!r.at_baseline) continue;
        // the envelope condition kills the marginal adaptation of the
        // maximized properties at zero exposure; co-properties keep the
        // effort-response term H_e de/dtheta and stay nonzero
        CHECK(std::abs(r.aa_pi1) <= 1e-8);
        CHECK(std::abs(r.aa_pi2) <= 1e-8);
        CHECK(std::abs(r.ti_pi1 - r.s_pi1) <= 1e-8);
        CHECK(std::abs(r.ti_pi2 - r.s_pi2) <= 1e-8);
        // decomposition of the marginals holds for every property
        CHECK(r.ti_q1 == doctest::Approx(r.s_q1 + r.aa_q1).epsilon(1e-10));
        CHECK(r.ti_u == doctest::Approx(r.s_u + r.aa_u).epsilon(1e-10));
        if (r.driver == "omega") {
            CHECK(r.s_q1 == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
            CHECK(r.s_q2 == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
            CHECK(std::abs(r.aa_q1) > 0.0);  // quantities move only through adaptation
            ca_omega = std::abs(r.ca_e1);
        }
        if (r.driver == "epsilon") ca_eps = std::abs(r.ca_e1);
        if (r.driver == "chi1") ca_chi1 = std::abs(r.ca_e1);
    }
    CHECK(ca_eps > ca_chi1);
    CHECK(ca_chi1 > ca_omega);
}

TEST_CASE("absolute summary: returns-to-effort dominates quantities, wages dominate utility") {
    CaseStudyConfig config = small_config();
    auto rows = absolute_summary(config);
    double best_q = -1, best_u = -1;
    std::string best_q_driver, best_u_driver;
    for (const auto& r : rows) {
        if (r.property == "quantity1" || r.property == "quantity2") {
            if (std::abs(r.TI) > best_q) {
                best_q = std::abs(r.TI);
                best_q_driver = r.driver;
            }
        }
        if (r.property == "utility") {
            if (std::abs(r.TI) > best_u) {
                best_u = std::abs(r.TI);
                best_u_driver = r.driver;
            }
        }
    }
    CHECK(best_q_driver == "epsilon");
    CHECK(best_u_driver == "omega");
}

TEST_CASE("degenerate zero-exposure box rejects the sweep") {
    CaseStudyConfig config = small_config();
    CHECK_THROWS_AS((void)analyze_driver(config, "x1"), impact::ValidationError);
}
