#include "flatfish/casestudy.hpp"

#include <algorithm>
#include <cmath>

namespace flatfish {

using impact::DriverSchema;
using impact::DriverVector;
using impact::ValidationError;

SweepBaseline resolve_sweep_baseline(const CaseStudyConfig& config) {
    const ModelParams& p = config.params;
    StockState stocks = StockState::from_tonnes(
        p, {config.baseline_stock_tonnes[0], config.baseline_stock_tonnes[1]});
    Quota quota = Quota::sole_tac(p, config.quota_sole_tonnes);
    PeriodEquilibrium eq = period_equilibrium(p, stocks, quota);
    SweepBaseline base;
    base.stocks = stocks;
    base.price = eq.price;
    base.fleet = eq.fleet;
    base.effort = eq.effort;
    base.quantity = eq.quantity;
    base.numeraire = eq.numeraire;
    return base;
}

SweepModel::SweepModel(const CaseStudyConfig& config)
    : config_(config), base_(resolve_sweep_baseline(config)) {
    const ModelParams& p = config_.params;
    auto schema = std::make_shared<DriverSchema>();
    schema->names = {"epsilon", "chi1", "chi2", "omega", "x1", "x2", "p1",
                     "p2",      "phi",  "alpha", "beta1", "beta2", "eta", "sigma"};
    std::vector<double> baseline_values = {
        p.epsilon, p.chi[0], p.chi[1], p.omega, base_.stocks.x[0], base_.stocks.x[1],
        base_.price[0], base_.price[1], p.phi[0], p.alpha, p.beta[0], p.beta[1], p.eta, p.sigma};
    schema->lower = baseline_values;
    schema->upper = baseline_values;  // point boxes unless configured below
    for (const auto& box : config_.exposure_box) {
        int d = schema->index(box.driver);
        schema->lower[d] = box.lower;
        schema->upper[d] = box.upper;
    }
    driver_schema_ = std::move(schema);

    property_schema_.properties = {"profit1", "profit2", "quantity1", "quantity2",
                                   "price1",  "price2",  "utility"};
    property_schema_.behaviours = {"effort1", "effort2"};
    // effort_k maximizes profit_k; bounds wide enough for every box corner
    double e0 = base_.effort[0];
    property_schema_.behaviour_lower = {0.0, 0.0};
    property_schema_.behaviour_upper = {1e4 * e0, 1e4 * e0};
    property_schema_.objective_pairs = {{0, 0}, {1, 1}};
    property_schema_.primary_property = 0;
}

ModelParams SweepModel::params_at(const DriverVector& theta) const {
    ModelParams p = config_.params;
    p.epsilon = theta.at("epsilon");
    p.chi[0] = theta.at("chi1");
    p.chi[1] = theta.at("chi2");
    p.omega = theta.at("omega");
    double phi = theta.at("phi");
    p.phi = {phi, phi};
    p.alpha = theta.at("alpha");
    p.beta[0] = theta.at("beta1");
    p.beta[1] = theta.at("beta2");
    p.eta = theta.at("eta");
    p.sigma = theta.at("sigma");
    return p;
}

StockState SweepModel::stocks_at(const DriverVector& theta) const {
    return StockState{{theta.at("x1"), theta.at("x2")}};
}

Vec2 SweepModel::prices_at(const DriverVector& theta) const {
    return {theta.at("p1"), theta.at("p2")};
}

Vec2 SweepModel::offered(const DriverVector& theta, std::span<const double> tau) const {
    ModelParams p = params_at(theta);
    StockState s = stocks_at(theta);
    Vec2 H{0, 0};
    for (int k = 0; k < kMetiers; ++k) {
        Vec2 h = harvest_per_firm(p, tau[k], s, k);
        for (int i = 0; i < kSpecies; ++i) H[i] += base_.fleet[k] * h[i];
    }
    return H;
}

std::vector<double> SweepModel::property(const DriverVector& theta,
                                         std::span<const double> tau) const {
    ModelParams p = params_at(theta);
    StockState s = stocks_at(theta);
    Vec2 price = prices_at(theta);

    std::vector<double> psi(7);
    for (int k = 0; k < kMetiers; ++k) psi[k] = profit(p, s, price, tau[k], k);
    Vec2 H = offered(theta, tau);
    psi[2] = H[0];
    psi[3] = H[1];
    // the floor only matters for zero-effort probes of the inner maximizer
    Vec2 wtp = willingness_to_pay(p, {std::max(H[0], 1e-30), std::max(H[1], 1e-30)});
    psi[4] = wtp[0];
    psi[5] = wtp[1];
    psi[6] = forced_utility(theta, H);
    return psi;
}

std::optional<std::vector<double>> SweepModel::closed_form_response(
    const DriverVector& theta) const {
    ModelParams p = params_at(theta);
    AdaptiveEffort e = adaptive_effort(p, stocks_at(theta), prices_at(theta));
    return std::vector<double>{e.effort[0], e.effort[1]};
}

double SweepModel::forced_numeraire(const DriverVector& theta, const Vec2& offered) const {
    ModelParams p = params_at(theta);
    Vec2 price = prices_at(theta);
    return p.omega - price[0] * offered[0] - price[1] * offered[1];
}

double SweepModel::forced_utility(const DriverVector& theta, const Vec2& offered) const {
    return utility(params_at(theta), offered, forced_numeraire(theta, offered));
}

SweepModel::HouseholdChoice SweepModel::household_choice(const DriverVector& theta,
                                                         const Vec2& offered) const {
    ModelParams p = params_at(theta);
    Vec2 price = prices_at(theta);
    Vec2 want = demanded_quantities(p, price);
    Vec2 q;
    bool exceeded = false;
    if (want[0] <= offered[0] && want[1] <= offered[1]) {
        q = want;
        exceeded = true;  // market offers more than desired of both species
    } else if (want[0] > offered[0] && want[1] > offered[1]) {
        q = offered;  // rationed in both: consume everything
    } else {
        int capped = want[0] > offered[0] ? 0 : 1;  // species the household wants more of
        int free_i = 1 - capped;
        q[capped] = offered[capped];
        // own first-order condition of the free species at the rationed bundle
        double cond = invert_willingness_to_pay(p, free_i, q[capped], price[free_i]);
        if (cond > offered[free_i]) {
            q[free_i] = offered[free_i];
        } else {
            q[free_i] = cond;
            exceeded = true;
        }
    }
    double y = p.omega - price[0] * q[0] - price[1] * q[1];
    HouseholdChoice out;
    out.consumed = q;
    out.utility = utility(p, q, y);
    out.offered_exceeds_demand = exceeded;
    return out;
}

DriverVector SweepModel::baseline() const {
    const ModelParams& p = config_.params;
    DriverVector theta;
    theta.schema = driver_schema_;
    theta.value = {p.epsilon, p.chi[0], p.chi[1], p.omega, base_.stocks.x[0], base_.stocks.x[1],
                   base_.price[0], base_.price[1], p.phi[0], p.alpha, p.beta[0], p.beta[1], p.eta,
                   p.sigma};
    theta.baseline = true;
    return theta;
}

ImpactCurves analyze_driver(const CaseStudyConfig& config, const std::string& driver) {
    SweepModel model(config);
    DriverVector theta0 = model.baseline();
    const DriverSchema& ds = model.drivers();
    int d = ds.index(driver);
    if (ds.upper[d] <= ds.lower[d])
        throw ValidationError("analyze_driver: driver '" + driver + "' has no exposure box");

    impact::SweepOptions sopt;
    sopt.engine = config.engine;
    sopt.parallel = config.parallel;
    ImpactCurves curves;
    curves.driver = driver;
    curves.records =
        impact::sweep(model, theta0, driver, ds.lower[d], ds.upper[d], config.grid_n, sopt);
    curves.grid.reserve(curves.records.size());

    std::vector<double> tau0 = impact::behaviour_response(model, theta0, config.engine);
    Vec2 offered0 = model.offered(theta0, tau0);
    curves.base_utility = model.forced_utility(theta0, offered0);
    auto hh0 = model.household_choice(theta0, offered0);

    const int U = 6;  // utility property index
    for (size_t i = 0; i < curves.records.size(); ++i) {
        const impact::ImpactRecord& rec = curves.records[i];
        curves.grid.push_back(rec.theta.value[d]);
        if (rec.exposure[d] == 0.0) curves.baseline_index = static_cast<int>(i);
        double u_frozen = curves.base_utility + rec.S[U];
        double u_adapted = curves.base_utility + rec.TI[U];
        curves.forced_utility_frozen.push_back(u_frozen);
        curves.forced_utility_adapted.push_back(u_adapted);

        std::vector<double> tau = impact::behaviour_response(model, rec.theta, config.engine);
        Vec2 off_frozen = model.offered(rec.theta, tau0);
        Vec2 off_adapted = model.offered(rec.theta, tau);
        bool y_neg = model.forced_numeraire(rec.theta, off_frozen) < 0 ||
                     model.forced_numeraire(rec.theta, off_adapted) < 0;
        curves.negative_numeraire.push_back(y_neg ? 1 : 0);
        if (!config.household_variant) continue;

        auto hh_frozen = model.household_choice(rec.theta, off_frozen);
        auto hh_adapted = model.household_choice(rec.theta, off_adapted);
        HouseholdOverlayPoint pt;
        pt.level_frozen = hh_frozen.utility;
        pt.level_adapted = hh_adapted.utility;
        pt.S = hh_frozen.utility - hh0.utility;
        pt.aA = hh_adapted.utility - hh_frozen.utility;
        pt.TI = pt.S + pt.aA;
        pt.constrained_frozen = hh_frozen.offered_exceeds_demand;
        pt.constrained_adapted = hh_adapted.offered_exceeds_demand;
        curves.household.push_back(pt);
    }
    return curves;
}

std::vector<MarginalSummaryRow> marginal_summary(const CaseStudyConfig& config) {
    SweepModel model(config);
    DriverVector theta0 = model.baseline();
    const DriverSchema& ds = model.drivers();
    std::vector<MarginalSummaryRow> rows;
    for (const auto& box : config.exposure_box) {
        int d = ds.index(box.driver);
        double base = theta0.value[d];
        for (double value : {base, box.lower, box.upper}) {
            DriverVector theta = theta0;
            theta.value[d] = value;
            theta.baseline = (value == base);
            impact::ImpactRecord rec = impact::evaluate_record(model, theta, theta0, config.engine);
            MarginalSummaryRow row;
            row.driver = box.driver;
            row.at_value = value;
            row.at_baseline = (value == base);
            row.s_q1 = rec.s.at(2, d);
            row.s_q2 = rec.s.at(3, d);
            row.s_u = rec.s.at(6, d);
            row.aa_q1 = rec.aa.at(2, d);
            row.aa_q2 = rec.aa.at(3, d);
            row.aa_u = rec.aa.at(6, d);
            row.ti_q1 = rec.ti_marginal.at(2, d);
            row.ti_q2 = rec.ti_marginal.at(3, d);
            row.ti_u = rec.ti_marginal.at(6, d);
            row.s_pi1 = rec.s.at(0, d);
            row.s_pi2 = rec.s.at(1, d);
            row.aa_pi1 = rec.aa.at(0, d);
            row.aa_pi2 = rec.aa.at(1, d);
            row.ti_pi1 = rec.ti_marginal.at(0, d);
            row.ti_pi2 = rec.ti_marginal.at(1, d);
            row.ca_e1 = rec.ca.at(0, d);
            row.ca_e2 = rec.ca.at(1, d);
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<AbsoluteSummaryRow> absolute_summary(const CaseStudyConfig& config) {
    static const char* kProps[] = {"profit1", "profit2", "quantity1", "quantity2",
                                   "price1",  "price2",  "utility"};
    SweepModel model(config);
    DriverVector theta0 = model.baseline();
    const DriverSchema& ds = model.drivers();
    std::vector<AbsoluteSummaryRow> rows;
    for (const auto& box : config.exposure_box) {
        int d = ds.index(box.driver);
        double base = theta0.value[d];
        for (double value : {box.lower, box.upper}) {
            DriverVector theta = theta0;
            theta.value[d] = value;
            impact::ImpactRecord rec = impact::evaluate_record(model, theta, theta0, config.engine);

            HouseholdOverlayPoint hh;
            if (config.household_variant) {
                std::vector<double> tau0 = impact::behaviour_response(model, theta0, config.engine);
                std::vector<double> tau = impact::behaviour_response(model, theta, config.engine);
                auto hh0 = model.household_choice(theta0, model.offered(theta0, tau0));
                auto hf = model.household_choice(theta, model.offered(theta, tau0));
                auto ha = model.household_choice(theta, model.offered(theta, tau));
                hh.S = hf.utility - hh0.utility;
                hh.aA = ha.utility - hf.utility;
                hh.TI = hh.S + hh.aA;
            }
            for (int pidx = 0; pidx < 7; ++pidx) {
                AbsoluteSummaryRow row;
                row.driver = box.driver;
                row.driver_value = value;
                row.exposure_positive = value > base;
                row.property = kProps[pidx];
                row.S = rec.S[pidx];
                row.aA = rec.aA[pidx];
                row.TI = rec.TI[pidx];
                bool is_utility = pidx == 6;
                row.aA_household = is_utility && config.household_variant ? hh.aA : row.aA;
                row.TI_household = is_utility && config.household_variant ? hh.TI : row.TI;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

}  // namespace flatfish
