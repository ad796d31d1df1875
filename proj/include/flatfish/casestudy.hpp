#pragma once

#include <memory>
#include <string>
#include <vector>

#include "flatfish/equilibrium.hpp"
#include "impact/framework.hpp"

// Short-run exposure analysis: drivers epsilon, chi1, chi2 and omega move
// inside their configured exposure boxes while stocks, market prices and
// fleet counts stay frozen at the baseline state. Fishers re-optimize
// per-firm effort; quantities, willingness-to-pay prices and household
// utility follow from the offered harvest.
namespace flatfish {

struct CaseStudyConfig {
    ModelParams params = default_params();
    Vec2 baseline_stock_tonnes{SteadyAnchors{}.sweep_plaice_stock_t,
                               SteadyAnchors{}.sweep_sole_stock_t};
    double quota_sole_tonnes = SteadyAnchors{}.sole_quantity_t;
    int grid_n = 101;
    bool household_variant = true;
    bool parallel = true;
    impact::EngineOptions engine;
    // which property panels to evaluate/emit
    std::vector<std::string> properties{"profit1", "profit2", "quantity1", "quantity2",
                                        "price1",  "price2",  "utility"};

    struct Box {
        std::string driver;
        double lower, upper;
    };
    std::vector<Box> exposure_box{
        {"epsilon", 0.48, 0.52},
        {"chi1", 0.093, 0.607},
        {"chi2", 0.230, 0.549},
        {"omega", 0.65, 1.37},
    };
};

// resolved baseline state for the sweeps
struct SweepBaseline {
    StockState stocks;
    Vec2 price;
    Vec2 fleet;
    Vec2 effort;     // zero-profit effort, equals the adaptive optimum here
    Vec2 quantity;   // offered = consumed
    double numeraire;
};

SweepBaseline resolve_sweep_baseline(const CaseStudyConfig& config);

// Property order: profit1, profit2, quantity1, quantity2, price1, price2, utility.
// Behaviours: effort1, effort2, each maximizing its metier's profit.
class SweepModel : public impact::ModelInterface {
  public:
    explicit SweepModel(const CaseStudyConfig& config);

    const impact::DriverSchema& drivers() const override { return *driver_schema_; }
    const impact::PropertySchema& schema() const override { return property_schema_; }
    std::vector<double> property(const impact::DriverVector& theta,
                                 std::span<const double> tau) const override;
    std::optional<std::vector<double>> closed_form_response(
        const impact::DriverVector& theta) const override;

    impact::DriverVector baseline() const;
    const SweepBaseline& base_state() const { return base_; }

    // model parameters and frozen state with the drivers of theta applied
    ModelParams params_at(const impact::DriverVector& theta) const;
    StockState stocks_at(const impact::DriverVector& theta) const;
    Vec2 prices_at(const impact::DriverVector& theta) const;

    // offered quantities at given effort
    Vec2 offered(const impact::DriverVector& theta, std::span<const double> tau) const;

    // household utility when consumption may be reduced below the offered
    // quantities (free disposal at market prices)
    struct HouseholdChoice {
        Vec2 consumed;
        double utility;
        bool offered_exceeds_demand;  // the forced-consumption constraint binds
    };
    HouseholdChoice household_choice(const impact::DriverVector& theta, const Vec2& offered) const;

    double forced_utility(const impact::DriverVector& theta, const Vec2& offered) const;

    // numeraire left after buying the offered basket at market prices
    double forced_numeraire(const impact::DriverVector& theta, const Vec2& offered) const;

  private:
    CaseStudyConfig config_;
    SweepBaseline base_;
    std::shared_ptr<impact::DriverSchema> driver_schema_;
    impact::PropertySchema property_schema_;
};

struct HouseholdOverlayPoint {
    double S = 0, aA = 0, TI = 0;       // utility impact with household adaptation
    double level_frozen = 0;            // U_hh(theta, e(theta0))
    double level_adapted = 0;           // U_hh(theta, e(theta))
    bool constrained_frozen = false;    // offered exceeded desired quantities
    bool constrained_adapted = false;
};

struct ImpactCurves {
    std::string driver;
    std::vector<double> grid;
    std::vector<impact::ImpactRecord> records;
    std::vector<HouseholdOverlayPoint> household;  // empty when disabled
    std::vector<double> forced_utility_frozen;     // U(theta, e(theta0)) levels
    std::vector<double> forced_utility_adapted;    // U(theta, e(theta)) levels
    // flagged, never dropped: forced over-consumption can exhaust the budget
    std::vector<unsigned char> negative_numeraire;
    double base_utility = 0;
    int baseline_index = -1;
};

ImpactCurves analyze_driver(const CaseStudyConfig& config, const std::string& driver);

struct MarginalSummaryRow {
    std::string driver;
    double at_value;          // evaluation point of the driver
    bool at_baseline;
    // marginal sensitivity / adaptation / total impact for q1, q2, U
    double s_q1, s_q2, s_u;
    double aa_q1, aa_q2, aa_u;
    double ti_q1, ti_q2, ti_u;
    // profits: the maximized properties, where marginal adaptation vanishes
    // at zero exposure (envelope condition)
    double s_pi1, s_pi2;
    double aa_pi1, aa_pi2;
    double ti_pi1, ti_pi2;
    double ca_e1, ca_e2;      // marginal adaptive effort
};

std::vector<MarginalSummaryRow> marginal_summary(const CaseStudyConfig& config);

struct AbsoluteSummaryRow {
    std::string driver;
    double driver_value;
    bool exposure_positive;   // "Adapt+" endpoint
    std::string property;
    double S, aA, TI;
    double aA_household, TI_household;  // with household adaptation (utility only; else = base)
};

std::vector<AbsoluteSummaryRow> absolute_summary(const CaseStudyConfig& config);

}  // namespace flatfish
