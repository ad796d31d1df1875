// Command-line front end: calibration, steady states, exposure sweeps,
// bifurcation scans and figure/table CSV emission, each run accompanied by
// a reproducibility manifest.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "flatfish/calibration.hpp"
#include "flatfish/casestudy.hpp"
#include "flatfish/dynamics.hpp"
#include "flatfish/io.hpp"

namespace fs = std::filesystem;
using namespace flatfish;

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct CommonArgs {
    std::string params_path;
    std::string data_path;
    std::string out_dir = "out";
    int grid = 0;
    unsigned long long seed = 1;
    double quota_override = -1;
    bool allow_out_of_box = false;
};

RunParams load_run_params(const CommonArgs& args, Manifest& mf) {
    RunParams rp;
    if (!args.params_path.empty()) {
        rp = read_params_file(args.params_path);
        mf.add_input(args.params_path);
    } else {
        mf.set("params", "builtin defaults");
    }
    if (args.quota_override >= 0) rp.quota_sole_tonnes = args.quota_override;
    mf.set("quota_sole_tonnes", rp.quota_sole_tonnes);
    return rp;
}

Quota quota_of(const RunParams& rp) {
    Quota q = Quota::sole_tac(rp.model, rp.quota_sole_tonnes);
    if (rp.quota_plaice_tonnes) q.tac[0] = *rp.quota_plaice_tonnes / rp.model.kappa;
    return q;
}

void finish(Manifest& mf, const CommonArgs& args, const std::string& subcommand,
            const RunParams& rp) {
    // echo the resolved parameters so the run can be repeated exactly
    std::string params_echo = (fs::path(args.out_dir) / "params_used.txt").string();
    write_params_file(params_echo, rp);
    mf.add_output(params_echo);
    mf.set("tool_version", kToolVersion);
    mf.set("subcommand", subcommand);
    mf.write((fs::path(args.out_dir) / "manifest.txt").string());
}

const char* regime_name(SteadyStatus st) {
    switch (st) {
        case SteadyStatus::kInterior: return "interior";
        case SteadyStatus::kCornerMetier1: return "corner-metier1-exit";
        case SteadyStatus::kCornerMetier2: return "corner-metier2-exit";
        default: return "none";
    }
}

void write_steady_csv(const std::string& path, const ModelParams& m, const SteadyState& st,
                      Manifest& mf) {
    CsvWriter csv(path, {"variable", "model_units", "tonnes_or_eurkg", "display"});
    auto row = [&](const std::string& name, double model_v, double human) {
        csv.field(name);
        csv.field(model_v);
        csv.field(human);
        csv.field_display(human);
        csv.end_row();
    };
    row("stock_plaice", st.stocks.x[0], model_to_tonnes(m, st.stocks.x[0]));
    row("stock_sole", st.stocks.x[1], model_to_tonnes(m, st.stocks.x[1]));
    row("quantity_plaice", st.eq.quantity[0], model_to_tonnes(m, st.eq.quantity[0]));
    row("quantity_sole", st.eq.quantity[1], model_to_tonnes(m, st.eq.quantity[1]));
    row("price_plaice", st.eq.price[0], model_to_eurkg(m, st.eq.price[0]));
    row("price_sole", st.eq.price[1], model_to_eurkg(m, st.eq.price[1]));
    row("fleet_metier1", st.eq.fleet[0], st.eq.fleet[0]);
    row("fleet_metier2", st.eq.fleet[1], st.eq.fleet[1]);
    row("effort_metier1", st.eq.effort[0], st.eq.effort[0]);
    row("effort_metier2", st.eq.effort[1], st.eq.effort[1]);
    row("residual_norm", st.residual_norm, st.residual_norm);
    csv.field("regime");
    csv.field(regime_name(st.status));
    csv.field(regime_name(st.status));
    csv.field(regime_name(st.status));
    csv.end_row();
    csv.field("quota_binding_sole");
    csv.field(st.eq.quota_binding[1] ? 1 : 0);
    csv.field(st.eq.quota_binding[1] ? 1 : 0);
    csv.field(st.eq.quota_binding[1] ? 1 : 0);
    csv.end_row();
    mf.add_output(path);
}

void write_sweep_csvs(const CommonArgs& args, const CaseStudyConfig& config,
                      const std::string& driver, Manifest& mf) {
    ImpactCurves curves = analyze_driver(config, driver);
    static const char* kProps[] = {"profit1", "profit2", "quantity1", "quantity2",
                                   "price1",  "price2",  "utility"};
    for (int pidx = 0; pidx < 7; ++pidx) {
        if (std::find(config.properties.begin(), config.properties.end(), kProps[pidx]) ==
            config.properties.end())
            continue;
        std::string path =
            (fs::path(args.out_dir) / ("sweep_" + driver + "_" + kProps[pidx] + ".csv")).string();
        std::vector<std::string> header = {"driver_value", "exposure", "S",      "aA",
                                           "cA1",          "cA2",      "TI",     "benefactor_sign",
                                           "one_sided",    "S_disp",   "aA_disp", "TI_disp"};
        bool is_utility = std::string(kProps[pidx]) == "utility";
        bool is_profit = pidx < 2;
        if (is_profit) {
            // display-layer scaling of profits relative to household income
            header.insert(header.end(), {"S_over_omega", "aA_over_omega", "TI_over_omega"});
        }
        if (is_utility) {
            header.insert(header.end(), {"S_household", "aA_household", "TI_household",
                                         "household_constrained", "negative_numeraire"});
        }
        CsvWriter csv(path, header);
        int d = 0;
        {
            SweepModel model(config);
            d = model.drivers().index(driver);
        }
        double omega0 = config.params.omega;
        for (size_t i = 0; i < curves.records.size(); ++i) {
            const impact::ImpactRecord& rec = curves.records[i];
            csv.field(curves.grid[i]);
            csv.field(rec.exposure[d]);
            csv.field(rec.S[pidx]);
            csv.field(rec.aA[pidx]);
            csv.field(rec.cA[0]);
            csv.field(rec.cA[1]);
            csv.field(rec.TI[pidx]);
            csv.field(rec.stressor_sign);
            csv.field(static_cast<int>(rec.one_sided[d]));
            csv.field_display(rec.S[pidx]);
            csv.field_display(rec.aA[pidx]);
            csv.field_display(rec.TI[pidx]);
            if (is_profit) {
                csv.field(rec.S[pidx] / omega0);
                csv.field(rec.aA[pidx] / omega0);
                csv.field(rec.TI[pidx] / omega0);
            }
            if (is_utility) {
                const HouseholdOverlayPoint& hh = curves.household[i];
                csv.field(hh.S);
                csv.field(hh.aA);
                csv.field(hh.TI);
                csv.field(static_cast<int>(hh.constrained_frozen || hh.constrained_adapted));
                csv.field(static_cast<int>(curves.negative_numeraire[i]));
            }
            csv.end_row();
        }
        mf.add_output(path);
    }
}

void write_marginal_csv(const std::string& path, const CaseStudyConfig& config, Manifest& mf) {
    auto rows = marginal_summary(config);
    CsvWriter csv(path, {"driver", "at_value", "at_baseline", "s_q1",   "s_q2",   "s_u",
                         "aa_q1",  "aa_q2",    "aa_u",        "ti_q1",  "ti_q2",  "ti_u",
                         "s_pi1",  "s_pi2",    "aa_pi1",      "aa_pi2", "ti_pi1", "ti_pi2",
                         "ca_e1",  "ca_e2"});
    for (const auto& r : rows) {
        csv.field(r.driver);
        csv.field(r.at_value);
        csv.field(static_cast<int>(r.at_baseline));
        csv.field(r.s_q1);
        csv.field(r.s_q2);
        csv.field(r.s_u);
        csv.field(r.aa_q1);
        csv.field(r.aa_q2);
        csv.field(r.aa_u);
        csv.field(r.ti_q1);
        csv.field(r.ti_q2);
        csv.field(r.ti_u);
        csv.field(r.s_pi1);
        csv.field(r.s_pi2);
        csv.field(r.aa_pi1);
        csv.field(r.aa_pi2);
        csv.field(r.ti_pi1);
        csv.field(r.ti_pi2);
        csv.field(r.ca_e1);
        csv.field(r.ca_e2);
        csv.end_row();
    }
    mf.add_output(path);
}

void write_absolute_csv(const std::string& path, const CaseStudyConfig& config, Manifest& mf) {
    auto rows = absolute_summary(config);
    CsvWriter csv(path, {"driver", "driver_value", "adapt_direction", "property", "S", "aA", "TI",
                         "aA_household", "TI_household"});
    for (const auto& r : rows) {
        csv.field(r.driver);
        csv.field(r.driver_value);
        csv.field(std::string(r.exposure_positive ? "Adapt+" : "Adapt-"));
        csv.field(r.property);
        csv.field(r.S);
        csv.field(r.aA);
        csv.field(r.TI);
        csv.field(r.aA_household);
        csv.field(r.TI_household);
        csv.end_row();
    }
    mf.add_output(path);
}

int run_steady_state(const CommonArgs& args) {
    Manifest mf;
    RunParams rp = load_run_params(args, mf);
    fs::create_directories(args.out_dir);
    StockState seed = StockState::from_tonnes(rp.model, {rp.seed_stock_tonnes[0], rp.seed_stock_tonnes[1]});
    SteadyState st = find_steady_state(rp.model, quota_of(rp), seed);
    if (!st.exists()) {
        std::fprintf(stderr, "error: category=no-steady-state\n");
        return 1;
    }
    write_steady_csv((fs::path(args.out_dir) / "steady_state.csv").string(), rp.model, st, mf);
    finish(mf, args, "steady-state", rp);
    std::printf("steady state (%s): plaice %.0f t, sole %.0f t, prices %.2f / %.2f EUR/kg, fleets %.0f / %.0f\n",
                regime_name(st.status), model_to_tonnes(rp.model, st.stocks.x[0]),
                model_to_tonnes(rp.model, st.stocks.x[1]), model_to_eurkg(rp.model, st.eq.price[0]),
                model_to_eurkg(rp.model, st.eq.price[1]), st.eq.fleet[0], st.eq.fleet[1]);
    return 0;
}

CaseStudyConfig config_from(const RunParams& rp, const CommonArgs& args) {
    CaseStudyConfig config;
    config.params = rp.model;
    config.baseline_stock_tonnes = rp.sweep_stock_tonnes;
    config.quota_sole_tonnes = rp.quota_sole_tonnes;
    if (args.grid > 0) config.grid_n = args.grid;
    return config;
}

int run_sweep(const CommonArgs& args, const std::string& driver) {
    Manifest mf;
    RunParams rp = load_run_params(args, mf);
    fs::create_directories(args.out_dir);
    CaseStudyConfig config = config_from(rp, args);
    mf.set("driver", driver);
    mf.set("grid_n", static_cast<double>(config.grid_n));
    if (args.allow_out_of_box) mf.set("allow_out_of_box", "true");
    write_sweep_csvs(args, config, driver, mf);
    finish(mf, args, "sweep", rp);
    std::printf("sweep %s: %d grid points written to %s\n", driver.c_str(), config.grid_n,
                args.out_dir.c_str());
    return 0;
}

int run_figures(const CommonArgs& args) {
    Manifest mf;
    RunParams rp = load_run_params(args, mf);
    fs::create_directories(args.out_dir);
    CaseStudyConfig config = config_from(rp, args);
    mf.set("grid_n", static_cast<double>(config.grid_n));
    for (const auto& box : config.exposure_box) write_sweep_csvs(args, config, box.driver, mf);
    write_marginal_csv((fs::path(args.out_dir) / "marginal_summary.csv").string(), config, mf);
    write_absolute_csv((fs::path(args.out_dir) / "absolute_summary.csv").string(), config, mf);
    finish(mf, args, "figures", rp);
    std::printf("figure data written to %s\n", args.out_dir.c_str());
    return 0;
}

int run_bifurcate(const CommonArgs& args, const std::string& driver, double range_lo,
                  double range_hi) {
    Manifest mf;
    RunParams rp = load_run_params(args, mf);
    fs::create_directories(args.out_dir);
    StockState seed = StockState::from_tonnes(rp.model, {rp.seed_stock_tonnes[0], rp.seed_stock_tonnes[1]});
    ScanOptions sopt;
    if (args.grid > 0) sopt.steps = args.grid;

    double start = read_driver(rp.model, driver);
    double target = start;
    if (range_lo >= 0) {
        target = range_lo;
    } else if (range_hi >= 0) {
        target = range_hi;
    } else {  // default: scan to the lower exposure bound
        for (const auto& b : default_driver_bounds())
            if (b.driver == driver) target = b.lower;
    }
    mf.set("driver", driver);
    mf.set("scan_target", target);
    mf.set("scan_steps", static_cast<double>(sopt.steps));

    ScanResult scan = bifurcation_scan(rp.model, quota_of(rp), driver, target, seed, sopt);
    std::string branch_path = (fs::path(args.out_dir) / ("branch_" + driver + ".csv")).string();
    {
        CsvWriter csv(branch_path, {"driver_value", "regime", "stock_plaice_t", "stock_sole_t",
                                    "quantity_plaice_t", "quantity_sole_t", "price_plaice_eurkg",
                                    "price_sole_eurkg", "fleet1", "fleet2", "quota_binding_plaice",
                                    "quota_binding_sole"});
        for (const auto& bp : scan.branch) {
            csv.field(bp.driver_value);
            csv.field(regime_name(bp.state.status));
            csv.field(model_to_tonnes(rp.model, bp.state.stocks.x[0]));
            csv.field(model_to_tonnes(rp.model, bp.state.stocks.x[1]));
            csv.field(model_to_tonnes(rp.model, bp.state.eq.quantity[0]));
            csv.field(model_to_tonnes(rp.model, bp.state.eq.quantity[1]));
            csv.field(model_to_eurkg(rp.model, bp.state.eq.price[0]));
            csv.field(model_to_eurkg(rp.model, bp.state.eq.price[1]));
            csv.field(bp.state.eq.fleet[0]);
            csv.field(bp.state.eq.fleet[1]);
            csv.field(static_cast<int>(bp.state.eq.quota_binding[0]));
            csv.field(static_cast<int>(bp.state.eq.quota_binding[1]));
            csv.end_row();
        }
        mf.add_output(branch_path);
    }
    std::string bif_path = (fs::path(args.out_dir) / ("bifurcation_" + driver + ".csv")).string();
    {
        CsvWriter csv(bif_path, {"driver", "kind", "last_interior", "bracket_lo", "bracket_hi",
                                 "side"});
        csv.field(driver);
        const char* kind = scan.bifurcation.kind == BifurcationKind::kFold ? "fold"
                           : scan.bifurcation.kind == BifurcationKind::kCornerTransition
                               ? "corner-transition"
                               : "none";
        csv.field(std::string(kind));
        csv.field(scan.bifurcation.last_interior);
        csv.field(scan.bifurcation.bracket_lo);
        csv.field(scan.bifurcation.bracket_hi);
        csv.field(std::string(scan.bifurcation.decreasing_side ? "lower" : "upper"));
        csv.end_row();
        mf.add_output(bif_path);
    }
    finish(mf, args, "bifurcate", rp);
    std::printf("scan %s -> %s; critical bracket [%.6g, %.6g]\n", driver.c_str(),
                scan.bifurcation.kind == BifurcationKind::kNone ? "no bifurcation" : "bifurcation",
                scan.bifurcation.bracket_lo, scan.bifurcation.bracket_hi);
    return 0;
}

int run_table4(const CommonArgs& args) {
    Manifest mf;
    RunParams rp = load_run_params(args, mf);
    fs::create_directories(args.out_dir);
    StockState seed = StockState::from_tonnes(rp.model, {rp.seed_stock_tonnes[0], rp.seed_stock_tonnes[1]});
    SteadyTable table = relative_steady_table(rp.model, quota_of(rp), seed);

    std::string path = (fs::path(args.out_dir) / "relative_steady_table.csv").string();
    CsvWriter csv(path, {"row", "driver_value", "truncated", "regime", "stock_plaice_pct",
                         "stock_sole_pct", "quantity_plaice_pct", "quantity_sole_pct",
                         "price_plaice_pct", "price_sole_pct", "fleet1_pct", "fleet2_pct",
                         "quota_binding_plaice", "quota_binding_sole"});
    auto pct = [](double v, double base) { return base != 0 ? 100.0 * v / base : 0.0; };
    const SteadyState& ini = table.initial;
    csv.field(std::string("initial"));
    csv.field(0.0);
    csv.field(0);
    csv.field(regime_name(ini.status));
    csv.field(model_to_tonnes(rp.model, ini.stocks.x[0]));
    csv.field(model_to_tonnes(rp.model, ini.stocks.x[1]));
    csv.field(model_to_tonnes(rp.model, ini.eq.quantity[0]));
    csv.field(model_to_tonnes(rp.model, ini.eq.quantity[1]));
    csv.field(model_to_eurkg(rp.model, ini.eq.price[0]));
    csv.field(model_to_eurkg(rp.model, ini.eq.price[1]));
    csv.field(ini.eq.fleet[0]);
    csv.field(ini.eq.fleet[1]);
    csv.field(static_cast<int>(ini.eq.quota_binding[0]));
    csv.field(static_cast<int>(ini.eq.quota_binding[1]));
    csv.end_row();
    for (const auto& row : table.rows) {
        csv.field(row.label);
        csv.field(row.driver_value);
        csv.field(static_cast<int>(row.truncated));
        csv.field(regime_name(row.state.status));
        csv.field(pct(row.state.stocks.x[0], ini.stocks.x[0]));
        csv.field(pct(row.state.stocks.x[1], ini.stocks.x[1]));
        csv.field(pct(row.state.eq.quantity[0], ini.eq.quantity[0]));
        csv.field(pct(row.state.eq.quantity[1], ini.eq.quantity[1]));
        csv.field(pct(row.state.eq.price[0], ini.eq.price[0]));
        csv.field(pct(row.state.eq.price[1], ini.eq.price[1]));
        csv.field(pct(row.state.eq.fleet[0], ini.eq.fleet[0]));
        csv.field(pct(row.state.eq.fleet[1], ini.eq.fleet[1]));
        csv.field(static_cast<int>(row.state.eq.quota_binding[0]));
        csv.field(static_cast<int>(row.state.eq.quota_binding[1]));
        csv.end_row();
    }
    mf.add_output(path);
    finish(mf, args, "table4", rp);
    std::printf("relative steady-state table written to %s\n", path.c_str());
    return 0;
}

int run_synthetic(const CommonArgs& args, int years, double noise) {
    Manifest mf;
    RunParams rp = load_run_params(args, mf);
    fs::create_directories(args.out_dir);
    SyntheticOptions sopt;
    sopt.years = years;
    sopt.noise = noise;
    sopt.seed = args.seed;
    mf.set("seed", static_cast<double>(args.seed));
    mf.set("years", static_cast<double>(years));
    mf.set("noise", noise);
    StockState seed_state =
        StockState::from_tonnes(rp.model, {rp.seed_stock_tonnes[0], rp.seed_stock_tonnes[1]});
    TimeSeriesDataset ds = generate_synthetic(rp.model, quota_of(rp), seed_state, sopt);
    std::string path = (fs::path(args.out_dir) / "synthetic.csv").string();
    save_dataset(path, ds);
    mf.add_output(path);
    finish(mf, args, "synthetic", rp);
    std::printf("synthetic dataset (%d years, noise %.3g, seed %llu) written to %s\n", years, noise,
                args.seed, path.c_str());
    return 0;
}

int run_calibrate(const CommonArgs& args) {
    if (args.data_path.empty()) {
        std::fprintf(stderr, "error: category=missing-data (calibrate needs --data)\n");
        return 1;
    }
    Manifest mf;
    RunParams rp = load_run_params(args, mf);
    fs::create_directories(args.out_dir);
    mf.add_input(args.data_path);
    TimeSeriesDataset ds = load_dataset(args.data_path);
    for (const auto& note : ds.notes) std::printf("note: %s\n", note.c_str());

    CalibrateOptions copt;
    if (args.grid > 0) copt.starts = args.grid;
    copt.seed = args.seed;
    mf.set("starts", static_cast<double>(copt.starts));
    mf.set("seed", static_cast<double>(copt.seed));
    CalibrationResult result = calibrate(ds, rp.model, copt);

    std::string path = (fs::path(args.out_dir) / "calibration_result.csv").string();
    {
        CsvWriter csv(path, {"key", "value", "display"});
        auto row = [&](const std::string& k, double v) {
            csv.field(k);
            csv.field(v);
            csv.field_display(v);
            csv.end_row();
        };
        row("zeta", result.zeta);
        row("epsilon", result.params.epsilon);
        row("chi1", result.params.chi[0]);
        row("chi2", result.params.chi[1]);
        row("phi", result.params.phi[0]);
        row("eta", result.params.eta);
        row("alpha", result.params.alpha);
        row("sigma", result.params.sigma);
        row("beta1", result.params.beta[0]);
        row("beta2", result.params.beta[1]);
        row("ricker_a1", result.params.ricker_a[0]);
        row("ricker_b1", result.params.ricker_b[0]);
        row("ricker_a2", result.params.ricker_a[1]);
        row("ricker_b2", result.params.ricker_b[1]);
        row("theil_harvest_plaice", result.theil_harvest[0]);
        row("theil_harvest_sole", result.theil_harvest[1]);
        row("theil_price_plaice", result.theil_price[0]);
        row("theil_price_sole", result.theil_price[1]);
        row("winner_start_index", result.winner.start_index);
        row("winner_feasible", result.winner.feasible ? 1 : 0);
        mf.add_output(path);
    }
    std::string cand_path = (fs::path(args.out_dir) / "calibration_candidates.csv").string();
    {
        CsvWriter csv(cand_path, {"start_index", "zeta", "feasible", "converged", "evaluations",
                                  "epsilon", "chi1", "chi2", "phi", "eta", "alpha", "sigma",
                                  "beta1", "beta2"});
        for (const auto& c : result.candidates) {
            csv.field(c.start_index);
            csv.field(c.zeta);
            csv.field(static_cast<int>(c.feasible));
            csv.field(static_cast<int>(c.converged));
            csv.field(c.evaluations);
            for (double v : c.params.pack()) csv.field(v);
            csv.end_row();
        }
        mf.add_output(cand_path);
    }
    finish(mf, args, "calibrate", rp);
    for (const auto& note : result.notes) std::printf("note: %s\n", note.c_str());
    std::printf("calibration: zeta = %.6g (start %d%s); Theil harvests %.4f / %.4f, prices %.4f / %.4f\n",
                result.zeta, result.winner.start_index, result.winner.feasible ? "" : ", infeasible",
                result.theil_harvest[0], result.theil_harvest[1], result.theil_price[0],
                result.theil_price[1]);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"North Sea flatfish bio-economic impact toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    CommonArgs args;
    app.add_option("--params", args.params_path, "parameter file (flat key = value)");
    app.add_option("--data", args.data_path, "dataset CSV");
    app.add_option("--out", args.out_dir, "output directory");
    app.add_option("--grid", args.grid, "grid size / multistart count override");
    app.add_option("--seed", args.seed, "random seed for synthetic data");
    app.add_option("--quota", args.quota_override, "sole quota in tonnes");
    app.add_flag("--allow-out-of-box", args.allow_out_of_box, "permit sweeps beyond the exposure box");

    auto* cal = app.add_subcommand("calibrate", "fit model parameters to a dataset");
    auto* steady = app.add_subcommand("steady-state", "solve the open-access steady state");
    auto* sweep_cmd = app.add_subcommand("sweep", "exposure sweep for one driver");
    std::string sweep_driver;
    sweep_cmd->add_option("driver", sweep_driver, "epsilon|chi1|chi2|omega")->required();
    auto* bif = app.add_subcommand("bifurcate", "continuation scan over one driver");
    std::string bif_driver;
    double bif_lo = -1, bif_hi = -1;
    bif->add_option("driver", bif_driver, "epsilon|chi1|chi2|omega")->required();
    bif->add_option("--to", bif_lo, "scan target (default: lower exposure bound)");
    bif->add_option("--hi", bif_hi, "alternative upper target");
    auto* table = app.add_subcommand("table4", "steady states at the exposure bounds");
    auto* figures = app.add_subcommand("figures", "all sweep/summary CSVs");
    auto* synth = app.add_subcommand("synthetic", "generate a synthetic dataset");
    int synth_years = 64;
    double synth_noise = 0.0;
    synth->add_option("--years", synth_years, "number of years");
    synth->add_option("--noise", synth_noise, "lognormal noise sigma");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2
    }

    try {
        if (*cal) return run_calibrate(args);
        if (*steady) return run_steady_state(args);
        if (*sweep_cmd) return run_sweep(args, sweep_driver);
        if (*bif) return run_bifurcate(args, bif_driver, bif_lo, bif_hi);
        if (*table) return run_table4(args);
        if (*figures) return run_figures(args);
        if (*synth) return run_synthetic(args, synth_years, synth_noise);
    } catch (const impact::ValidationError& e) {
        std::fprintf(stderr, "error: category=validation message=%s\n", e.what());
        return 1;
    } catch (const impact::SchemaError& e) {
        std::fprintf(stderr, "error: category=schema message=%s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: category=internal message=%s\n", e.what());
        return 1;
    }
    return 2;
}
