// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured values. Criteria run against the reference
// parameter set; tolerances are fixed here, not configurable.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "flatfish/calibration.hpp"
#include "flatfish/casestudy.hpp"
#include "flatfish/dynamics.hpp"
#include "num/solvers.hpp"

using namespace flatfish;

namespace {

void report(const char* tag, bool pass, const std::string& detail = "") {
    std::printf("ACCEPTANCE %s: %s%s%s\n", tag, pass ? "PASS" : "FAIL",
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

Quota sole_quota(const ModelParams& p) { return Quota::sole_tac(p, 17545.0); }

// test-side brute-force profit maximizer, independent of the closed form
double brute_force_effort(const ModelParams& p, const StockState& s, const Vec2& price, int k) {
    double e_hi = 1e-5;
    double best_e = 0, best_pi = profit(p, s, price, 0.0, k);
    const int n = 10000;
    for (int i = 1; i <= n; ++i) {
        double e = e_hi * i / n;
        double pi = profit(p, s, price, e, k);
        if (pi > best_pi) {
            best_pi = pi;
            best_e = e;
        }
    }
    double lo = std::max(0.0, best_e - 2 * e_hi / n), hi = best_e + 2 * e_hi / n;
    auto r = num::golden_max([&](double e) { return profit(p, s, price, e, k); }, lo, hi, 1e-12, 300);
    return r.x;
}

}  // namespace

TEST_CASE("criterion_01_zero_profit_effort") {
    ModelParams p = default_params();
    Vec2 estar = zero_profit_effort(p);
    double rel = std::abs(estar[0] - 1e-8) / 1e-8;
    bool pass = rel <= 1e-12 && std::abs(estar[1] - 1e-8) / 1e-8 <= 1e-12;
    report("01 zero-profit effort", pass, fmt("e* = %.17g, rel err %.3g", estar[0], rel));
    CHECK(pass);
}

TEST_CASE("criterion_02_adaptive_effort_vs_brute_force") {
    ModelParams base = default_params();
    SteadyAnchors a;
    StockState s = StockState::from_tonnes(base, {a.sweep_plaice_stock_t, a.sweep_sole_stock_t});
    Vec2 price = equilibrium_prices(base, s);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ue(0.48, 0.52), uc1(0.093, 0.607), uc2(0.230, 0.549),
        uw(0.65, 1.37);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
        ModelParams p = base;
        p.epsilon = ue(rng);
        p.chi = {uc1(rng), uc2(rng)};
        p.omega = uw(rng);
        int metier = k % 2;
        double closed = adaptive_effort(p, s, price).effort[metier];
        double numeric = brute_force_effort(p, s, price, metier);
        worst = std::max(worst, std::abs(closed - numeric) / numeric);
    }
    bool pass = worst <= 1e-6;
    report("02 analytic vs numeric adaptation", pass, fmt("worst rel err %.3g over 100 draws", worst));
    CHECK(pass);
}

TEST_CASE("criterion_03_decomposition_identity") {
    CaseStudyConfig config;
    config.grid_n = 101;
    double worst = 0;
    for (const auto& box : config.exposure_box) {
        ImpactCurves curves = analyze_driver(config, box.driver);
        for (const auto& rec : curves.records)
            for (size_t pidx = 0; pidx < rec.TI.size(); ++pidx)
                worst = std::max(worst, std::abs(rec.TI[pidx] - (rec.S[pidx] + rec.aA[pidx])));
    }
    bool pass = worst <= 1e-10;
    report("03 decomposition identity", pass, fmt("worst |TI-(S+aA)| = %.3g over 4x101 points", worst));
    CHECK(pass);
}

TEST_CASE("criterion_04_baseline_zeros_and_marginal_consistency") {
    CaseStudyConfig config;
    SweepModel model(config);
    impact::DriverVector theta0 = model.baseline();
    impact::ImpactRecord rec = impact::evaluate_record(model, theta0, theta0);
    double worst_zero = 0, worst_marg = 0, worst_aa = 0;
    // marginal adaptation vanishes at zero exposure by the envelope
    // condition, which holds for the properties the behaviour maximizes
    // (profits); co-properties keep the effort-response term
    for (size_t pidx = 0; pidx < rec.TI.size(); ++pidx) {
        worst_zero = std::max({worst_zero, std::abs(rec.S[pidx]), std::abs(rec.aA[pidx]),
                               std::abs(rec.TI[pidx])});
        if (!model.schema().is_maximized(static_cast<int>(pidx))) continue;
        for (int d = 0; d < rec.s.cols; ++d) {
            worst_marg = std::max(worst_marg,
                                  std::abs(rec.ti_marginal.at(pidx, d) - rec.s.at(pidx, d)));
            worst_aa = std::max(worst_aa, std::abs(rec.aa.at(pidx, d)));
        }
    }
    bool pass = worst_zero == 0.0 && worst_marg <= 1e-8 && worst_aa <= 1e-8;
    report("04 baseline zeros and marginal consistency", pass,
           fmt("baseline %.3g, |ti_m - s| %.3g, |aa| %.3g (maximized properties)", worst_zero,
               worst_marg, worst_aa));
    CHECK(pass);
}

TEST_CASE("criterion_05_closed_form_derivative_checks") {
    CaseStudyConfig config;
    SweepModel model(config);
    impact::DriverVector theta0 = model.baseline();
    const impact::DriverSchema& ds = model.drivers();
    const ModelParams& base = config.params;
    int d_omega = ds.index("omega"), d_eps = ds.index("epsilon");

    std::mt19937_64 rng(77);
    // stay strictly inside the box so differences remain central
    std::uniform_real_distribution<double> ue(0.485, 0.515), uc1(0.15, 0.55), uc2(0.26, 0.52),
        uw(0.70, 1.30);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
        impact::DriverVector theta = theta0;
        theta.value[d_eps] = ue(rng);
        theta.value[ds.index("chi1")] = uc1(rng);
        theta.value[ds.index("chi2")] = uc2(rng);
        theta.value[d_omega] = uw(rng);

        // profit sensitivity to wages at frozen baseline effort: -e0
        impact::Matrix s = impact::sensitivity_marginal(model, theta, theta0);
        double e0 = model.base_state().effort[0];
        worst = std::max(worst, std::abs(s.at(0, d_omega) + e0) / e0);

        // adaptive-effort derivatives from the closed form
        ModelParams p = model.params_at(theta);
        StockState st = model.stocks_at(theta);
        Vec2 price = model.prices_at(theta);
        impact::AdaptationMarginals am = impact::adaptation_marginals(model, theta, theta0);
        for (int m = 0; m < 2; ++m) {
            double estar = adaptive_effort(p, st, price).effort[m];
            double de_domega = -estar / ((1.0 - p.epsilon) * p.omega);
            worst = std::max(worst,
                             std::abs(am.ca.at(m, d_omega) - de_domega) / std::abs(de_domega));
            double basket = revenue_basket(p, st, price, m);
            double ln_arg = std::log(p.epsilon / p.omega * basket);
            double de_deps = estar * (1.0 / (p.epsilon * (1.0 - p.epsilon)) +
                                      ln_arg / ((1.0 - p.epsilon) * (1.0 - p.epsilon)));
            worst = std::max(worst, std::abs(am.ca.at(m, d_eps) - de_deps) / std::abs(de_deps));
        }
    }
    bool pass = worst <= 1e-5;
    report("05 derivative checks", pass, fmt("worst rel err %.3g over 100 interior points", worst));
    CHECK(pass);
    (void)base;
}

TEST_CASE("criterion_06_steady_state_reproduction") {
    ModelParams p = default_params();
    SteadyState ss = find_steady_state(p, sole_quota(p), default_steady_seed(p));
    bool interior = ss.interior();
    auto within = [](double v, double target) { return std::abs(v - target) <= 0.02 * target; };
    bool pass = interior;
    double stock1 = model_to_tonnes(p, ss.stocks.x[0]);
    double stock2 = model_to_tonnes(p, ss.stocks.x[1]);
    double q1 = model_to_tonnes(p, ss.eq.quantity[0]);
    double q2 = model_to_tonnes(p, ss.eq.quantity[1]);
    double p1 = model_to_eurkg(p, ss.eq.price[0]);
    double p2 = model_to_eurkg(p, ss.eq.price[1]);
    pass = pass && within(stock1, 586709) && within(stock2, 85937);
    pass = pass && within(q1, 132122) && within(q2, 17545);
    pass = pass && within(p1, 3.67) && within(p2, 6.63);
    pass = pass && within(ss.eq.fleet[0], 674) && within(ss.eq.fleet[1], 2315);
    report("06 steady-state reproduction", pass,
           fmt("stocks %.0f/%.0f t", stock1, stock2) + fmt(", q %.0f/%.0f t", q1, q2) +
               fmt(", prices %.3f/%.3f", p1, p2) +
               fmt(", fleets %.0f/%.0f", ss.eq.fleet[0], ss.eq.fleet[1]));
    CHECK(pass);
}

TEST_CASE("criterion_07_bifurcation_brackets") {
    ModelParams p = default_params();
    ScanOptions opt;
    opt.steps = 200;
    ScanResult omega = bifurcation_scan(p, sole_quota(p), "omega", 0.65, default_steady_seed(p), opt);
    ScanResult eps = bifurcation_scan(p, sole_quota(p), "epsilon", 0.48, default_steady_seed(p), opt);

    double w_lo = omega.bifurcation.bracket_lo, w_hi = omega.bifurcation.bracket_hi;
    double e_lo = eps.bifurcation.bracket_lo, e_hi = eps.bifurcation.bracket_hi;
    bool omega_found = omega.bifurcation.kind == BifurcationKind::kFold;
    bool eps_found = eps.bifurcation.kind == BifurcationKind::kFold;
    // stated windows: omega critical in [0.95, 0.97] w0, epsilon critical in
    // [0.985, 0.995] eps0
    bool omega_pass = omega_found && w_lo >= 0.95 * p.omega && w_hi <= 0.97 * p.omega;
    bool eps_pass = eps_found && e_lo >= 0.985 * 0.5 && e_hi <= 0.995 * 0.5;
    report("07 bifurcation brackets", omega_pass && eps_pass,
           fmt("omega critical in [%.4f, %.4f] (window 0.95..0.97)", w_lo, w_hi) +
               fmt("; epsilon critical in [%.5f, %.5f] of eps0 (window 0.985..0.995)", e_lo / 0.5,
                   e_hi / 0.5));
    CHECK(eps_pass);
    CHECK(omega_pass);
}

TEST_CASE("criterion_08_relative_table_corners") {
    ModelParams p = default_params();
    SteadyTable table = relative_steady_table(p, sole_quota(p), default_steady_seed(p));
    double f1 = 0, f2 = 0;
    double eps_up_f1 = -1;
    for (const auto& row : table.rows) {
        if (row.label == "omega-upper") {
            f1 = 100 * row.state.eq.fleet[0] / table.initial.eq.fleet[0];
            f2 = 100 * row.state.eq.fleet[1] / table.initial.eq.fleet[1];
        }
        if (row.label == "epsilon-upper")
            eps_up_f1 = 100 * row.state.eq.fleet[0] / table.initial.eq.fleet[0];
    }
    bool pass = std::abs(f1 - 49.0) <= 3.0 && std::abs(f2 - 117.0) <= 3.0 &&
                eps_up_f1 >= 0 && eps_up_f1 <= 3.0;
    report("08 relative-table corners", pass,
           fmt("wages-up fleets %.1f%% / %.1f%%", f1, f2) + fmt("; eps-up metier1 %.2f%%", eps_up_f1));
    CHECK(pass);
}

TEST_CASE("criterion_09_ordering_claims") {
    CaseStudyConfig config;
    auto marginals = marginal_summary(config);
    double ca_eps = 0, ca_chi1 = 0, ca_omega = 0;
    for (const auto& r : marginals) {
        if (!r.at_baseline) continue;
        if (r.driver == "epsilon") ca_eps = std::abs(r.ca_e1);
        if (r.driver == "chi1") ca_chi1 = std::abs(r.ca_e1);
        if (r.driver == "omega") ca_omega = std::abs(r.ca_e1);
    }
    bool order_ca = ca_eps > ca_chi1 && ca_chi1 > ca_omega;

    auto rows = absolute_summary(config);
    double best_q = -1, best_u = -1;
    std::string q_driver, u_driver;
    for (const auto& r : rows) {
        if ((r.property == "quantity1" || r.property == "quantity2") && std::abs(r.TI) > best_q) {
            best_q = std::abs(r.TI);
            q_driver = r.driver;
        }
        if (r.property == "utility" && std::abs(r.TI) > best_u) {
            best_u = std::abs(r.TI);
            u_driver = r.driver;
        }
    }
    bool pass = order_ca && q_driver == "epsilon" && u_driver == "omega";
    report("09 ordering claims", pass,
           fmt("|ca|: eps %.3g > chi1 %.3g > omega %.3g; ", ca_eps, ca_chi1, ca_omega) +
               "largest quantity driver " + q_driver + ", largest utility driver " + u_driver);
    CHECK(pass);
}

TEST_CASE("criterion_10_calibration_recovery") {
    ModelParams truth = default_params();  // reference truth, phi below the box floor
    Quota quota = sole_quota(truth);
    SyntheticOptions gen;
    gen.years = 64;
    gen.noise = 0.0;
    gen.seed = 1;
    TimeSeriesDataset clean = generate_synthetic(truth, quota, default_steady_seed(truth), gen);

    CalibrateOptions opt;
    opt.starts = 32;
    CalibrationResult r = calibrate(clean, default_params(), opt);
    double worst_theil = 0;
    for (int i = 0; i < 2; ++i)
        worst_theil = std::max({worst_theil, r.theil_harvest[i], r.theil_price[i]});
    bool clean_pass = r.zeta <= 1e-8 && worst_theil <= 1e-4 && r.winner.feasible;

    gen.noise = 0.01;
    gen.seed = 2;
    TimeSeriesDataset noisy = generate_synthetic(truth, quota, default_steady_seed(truth), gen);
    CalibrationResult rn = calibrate(noisy, default_params(), opt);
    double worst_noisy = 0;
    for (int i = 0; i < 2; ++i)
        worst_noisy = std::max({worst_noisy, rn.theil_harvest[i], rn.theil_price[i]});
    bool noisy_pass = worst_noisy <= 0.02;

    report("10 calibration recovery", clean_pass && noisy_pass,
           fmt("clean zeta %.3g, worst Theil %.3g", r.zeta, worst_theil) +
               fmt("; 1%% noise worst Theil %.3g", worst_noisy));
    CHECK(clean_pass);
    CHECK(noisy_pass);
}

TEST_CASE("criterion_11_real_data_theil") {
    const char* env = std::getenv("FLATFISH_REAL_DATA");
    std::string path = env ? env : "data/real_dataset.csv";
    if (!std::filesystem::exists(path)) {
        report("11 real-data Theil", true,
               "SKIPPED with notice: no ICES/EUMOFA dataset at '" + path +
                   "' (set FLATFISH_REAL_DATA to enable)");
        return;
    }
    TimeSeriesDataset ds = load_dataset(path);
    ModelParams p = default_params();
    ScaledDataset data = scale_data(ds, p);
    PredictedSeries ps = predict_series(p, data);
    // figure-caption values: stocks 0.049/0.1507, harvest 0.1506/0.1389,
    // prices 0.1615/0.0516; harvests and prices are checked here
    double th_h[2], th_p[2];
    for (int i = 0; i < 2; ++i) {
        th_h[i] = theil_u(ps.harvest[i], ps.harvest_actual[i]);
        th_p[i] = theil_u(ps.price[i], ps.price_actual[i]);
    }
    bool pass = std::abs(th_h[0] - 0.1506) <= 0.02 && std::abs(th_h[1] - 0.1389) <= 0.02 &&
                std::abs(th_p[0] - 0.1615) <= 0.02 && std::abs(th_p[1] - 0.0516) <= 0.02;
    report("11 real-data Theil", pass,
           fmt("harvest %.4f/%.4f, ", th_h[0], th_h[1]) + fmt("prices %.4f/%.4f", th_p[0], th_p[1]));
    CHECK(pass);
}

TEST_CASE("criterion_12_household_adaptation_dominance") {
    CaseStudyConfig config;
    config.grid_n = 101;
    bool pass = true;
    bool strict_seen = false;
    for (const auto& box : config.exposure_box) {
        ImpactCurves curves = analyze_driver(config, box.driver);
        for (size_t i = 0; i < curves.records.size(); ++i) {
            const HouseholdOverlayPoint& hh = curves.household[i];
            if (hh.level_adapted < curves.forced_utility_adapted[i] - 1e-12) pass = false;
            if (hh.level_frozen < curves.forced_utility_frozen[i] - 1e-12) pass = false;
            if (hh.constrained_adapted) {
                strict_seen = true;
                if (hh.level_adapted <= curves.forced_utility_adapted[i]) pass = false;
            }
        }
    }
    pass = pass && strict_seen;
    report("12 household-adaptation dominance", pass,
           strict_seen ? "overlay dominates pointwise, strictly where the offer binds"
                       : "no binding region found");
    CHECK(pass);
}
