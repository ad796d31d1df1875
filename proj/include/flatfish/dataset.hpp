#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flatfish/equilibrium.hpp"

namespace flatfish {

// Yearly series for one species, raw units (tonnes, EUR/kg at constant
// prices). Prices and TACs may be missing in part of the history.
struct SpeciesSeries {
    std::string name;
    std::vector<int> year;
    std::vector<double> ssb_tonnes;
    std::vector<double> landings_tonnes;
    std::vector<std::optional<double>> price_eur_kg;
    std::vector<std::optional<double>> tac_tonnes;

    size_t size() const { return year.size(); }
};

struct TimeSeriesDataset {
    std::array<SpeciesSeries, 2> species;  // plaice, sole
    std::vector<std::string> notes;        // gaps and flags reported by the loader

    std::optional<int> price_start_year(int i) const;
};

// CSV schema: year,species,ssb_tonnes,landings_tonnes,price_eur_kg,tac_tonnes
// (price/tac may be empty). Decimal point is '.', thousands separators are
// rejected with a hint. Throws impact::ValidationError with the line number.
TimeSeriesDataset load_dataset(const std::string& path);
void save_dataset(const std::string& path, const TimeSeriesDataset& ds);

// model-unit view of the dataset after dividing by kappa / price scaling
struct ScaledSeries {
    std::vector<int> year;
    std::vector<double> stock;
    std::vector<double> landings;
    std::vector<std::optional<double>> price;
    std::vector<std::optional<double>> tac;
};

struct ScaledDataset {
    std::array<ScaledSeries, 2> species;
};

ScaledDataset scale_data(const TimeSeriesDataset& raw, const ModelParams& p);
TimeSeriesDataset unscale_data(const ScaledDataset& scaled, const ModelParams& p);

struct SyntheticOptions {
    int years = 64;
    int first_year = 1957;
    double noise = 0.0;          // lognormal sigma on ssb/landings/prices
    unsigned long long seed = 1;
    Vec2 start_stock_fraction{0.5, 1.5};  // relative to the solved steady state
    bool emit_tac = true;
};

// Forward-simulated dataset with annual stock bookkeeping
// x[t+1] = x[t] + g(x[t]) - H[t], H and prices from the period equilibrium.
// Deterministic per seed.
TimeSeriesDataset generate_synthetic(const ModelParams& p, const Quota& quota,
                                     const StockState& steady_guess, const SyntheticOptions& opt);

}  // namespace flatfish
