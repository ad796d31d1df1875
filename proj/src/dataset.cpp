#include "flatfish/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "flatfish/dynamics.hpp"

namespace flatfish {

using impact::ValidationError;

std::optional<int> TimeSeriesDataset::price_start_year(int i) const {
    const SpeciesSeries& s = species[i];
    for (size_t t = 0; t < s.size(); ++t)
        if (s.price_eur_kg[t]) return s.year[t];
    return std::nullopt;
}

namespace {

int species_index(const std::string& name, int line) {
    std::string lower;
    for (char c : name) lower.push_back(static_cast<char>(std::tolower(c)));
    if (lower == "plaice" || lower == "1") return 0;
    if (lower == "sole" || lower == "2") return 1;
    throw ValidationError("dataset line " + std::to_string(line) + ": unknown species '" + name +
                          "' (expected plaice or sole)");
}

// strict numeric parse; rejects European-format numbers. "148.589" in a
// tonnage column is a known hazard: a thousands-separated integer that also
// reads as a small decimal.
double parse_number(const std::string& raw, int line, const char* column, bool tonnage) {
    if (raw.find(',') != std::string::npos)
        throw ValidationError("dataset line " + std::to_string(line) + ", column " + column +
                              ": comma in '" + raw +
                              "' (European decimal/thousands format; use '.' decimals, no separators)");
    size_t first_dot = raw.find('.');
    if (first_dot != std::string::npos && raw.find('.', first_dot + 1) != std::string::npos)
        throw ValidationError("dataset line " + std::to_string(line) + ", column " + column +
                              ": multiple dots in '" + raw + "' look like thousands separators");
    if (tonnage && first_dot != std::string::npos) {
        // groups of exactly three digits after the dot on a small tonnage
        size_t tail = raw.size() - first_dot - 1;
        bool all_digits = tail == 3 && std::all_of(raw.begin() + first_dot + 1, raw.end(),
                                                   [](char c) { return std::isdigit(c); });
        if (all_digits) {
            double v = std::strtod(raw.c_str(), nullptr);
            if (v < 10000.0)
                throw ValidationError(
                    "dataset line " + std::to_string(line) + ", column " + column + ": '" + raw +
                    "' looks like a European thousands-separated integer; write it as plain digits");
        }
    }
    char* end = nullptr;
    double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0' || !std::isfinite(v))
        throw ValidationError("dataset line " + std::to_string(line) + ", column " + column +
                              ": cannot parse '" + raw + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

TimeSeriesDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset: " + path);
    TimeSeriesDataset ds;
    ds.species[0].name = "plaice";
    ds.species[1].name = "sole";

    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw ValidationError("dataset is empty: " + path);
    ++lineno;
    const std::string base_header = "year,species,ssb_tonnes,landings_tonnes,price_eur_kg,tac_tonnes";
    std::string header = trim(line);
    bool has_deflator = header == base_header + ",deflator";  // optional price deflator
    if (!has_deflator && header != base_header)
        throw ValidationError("dataset header mismatch; expected " + base_header +
                              " (optionally with a trailing deflator column)");
    const size_t expect_fields = has_deflator ? 7 : 6;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        // the species column must not smuggle extra separators
        std::vector<std::string> f = split_csv(line);
        if (f.size() != expect_fields)
            throw ValidationError("dataset line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(expect_fields) + " fields, got " +
                                  std::to_string(f.size()) +
                                  " (commas inside numbers are not supported)");
        for (auto& x : f) x = trim(x);
        int year = static_cast<int>(parse_number(f[0], lineno, "year", false));
        int i = species_index(f[1], lineno);
        SpeciesSeries& s = ds.species[i];
        if (!s.year.empty() && year <= s.year.back())
            throw ValidationError("dataset line " + std::to_string(lineno) +
                                  ": years must be strictly increasing per species");
        double ssb = parse_number(f[2], lineno, "ssb_tonnes", true);
        double landings = parse_number(f[3], lineno, "landings_tonnes", true);
        if (ssb < 0 || landings < 0)
            throw ValidationError("dataset line " + std::to_string(lineno) + ": negative value");
        s.year.push_back(year);
        s.ssb_tonnes.push_back(ssb);
        s.landings_tonnes.push_back(landings);
        if (f[4].empty())
            s.price_eur_kg.push_back(std::nullopt);
        else {
            double v = parse_number(f[4], lineno, "price_eur_kg", false);
            if (v < 0) throw ValidationError("dataset line " + std::to_string(lineno) + ": negative price");
            if (has_deflator && !f[6].empty()) {
                double defl = parse_number(f[6], lineno, "deflator", false);
                if (!(defl > 0))
                    throw ValidationError("dataset line " + std::to_string(lineno) +
                                          ": deflator must be positive");
                v /= defl;  // bring the price to constant terms
            }
            s.price_eur_kg.push_back(v);
        }
        if (f[5].empty())
            s.tac_tonnes.push_back(std::nullopt);
        else
            s.tac_tonnes.push_back(parse_number(f[5], lineno, "tac_tonnes", true));
    }
    for (int i = 0; i < 2; ++i) {
        const SpeciesSeries& s = ds.species[i];
        if (s.year.empty())
            throw ValidationError("dataset has no rows for " + std::string(i == 0 ? "plaice" : "sole"));
        for (size_t t = 1; t < s.year.size(); ++t)
            if (s.year[t] != s.year[t - 1] + 1)
                ds.notes.push_back(s.name + ": gap between " + std::to_string(s.year[t - 1]) +
                                   " and " + std::to_string(s.year[t]));
        if (auto y0 = ds.price_start_year(i); y0 && *y0 > s.year.front())
            ds.notes.push_back(s.name + ": price series starts " + std::to_string(*y0));
    }
    return ds;
}

void save_dataset(const std::string& path, const TimeSeriesDataset& ds) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ValidationError("cannot write dataset: " + path);
    std::fprintf(f, "year,species,ssb_tonnes,landings_tonnes,price_eur_kg,tac_tonnes\n");
    for (int i = 0; i < 2; ++i) {
        const SpeciesSeries& s = ds.species[i];
        for (size_t t = 0; t < s.size(); ++t) {
            std::fprintf(f, "%d,%s,%.17g,%.17g,", s.year[t], s.name.c_str(), s.ssb_tonnes[t],
                         s.landings_tonnes[t]);
            if (s.price_eur_kg[t]) std::fprintf(f, "%.17g", *s.price_eur_kg[t]);
            std::fprintf(f, ",");
            if (s.tac_tonnes[t]) std::fprintf(f, "%.17g", *s.tac_tonnes[t]);
            std::fprintf(f, "\n");
        }
    }
    std::fclose(f);
}

ScaledDataset scale_data(const TimeSeriesDataset& raw, const ModelParams& p) {
    if (!(p.kappa > 0) || !(p.w_scale > 0))
        throw ValidationError("scale_data: scale parameters must be positive");
    ScaledDataset out;
    for (int i = 0; i < 2; ++i) {
        const SpeciesSeries& s = raw.species[i];
        ScaledSeries& d = out.species[i];
        d.year = s.year;
        for (size_t t = 0; t < s.size(); ++t) {
            d.stock.push_back(tonnes_to_model(p, s.ssb_tonnes[t]));
            d.landings.push_back(tonnes_to_model(p, s.landings_tonnes[t]));
            d.price.push_back(s.price_eur_kg[t] ? std::optional<double>(eurkg_to_model(p, *s.price_eur_kg[t]))
                                                : std::nullopt);
            d.tac.push_back(s.tac_tonnes[t] ? std::optional<double>(tonnes_to_model(p, *s.tac_tonnes[t]))
                                            : std::nullopt);
        }
    }
    return out;
}

TimeSeriesDataset unscale_data(const ScaledDataset& scaled, const ModelParams& p) {
    TimeSeriesDataset out;
    out.species[0].name = "plaice";
    out.species[1].name = "sole";
    for (int i = 0; i < 2; ++i) {
        const ScaledSeries& d = scaled.species[i];
        SpeciesSeries& s = out.species[i];
        s.year = d.year;
        for (size_t t = 0; t < d.year.size(); ++t) {
            s.ssb_tonnes.push_back(model_to_tonnes(p, d.stock[t]));
            s.landings_tonnes.push_back(model_to_tonnes(p, d.landings[t]));
            s.price_eur_kg.push_back(d.price[t] ? std::optional<double>(model_to_eurkg(p, *d.price[t]))
                                                : std::nullopt);
            s.tac_tonnes.push_back(d.tac[t] ? std::optional<double>(model_to_tonnes(p, *d.tac[t]))
                                            : std::nullopt);
        }
    }
    return out;
}

TimeSeriesDataset generate_synthetic(const ModelParams& p, const Quota& quota,
                                     const StockState& steady_guess, const SyntheticOptions& opt) {
    SteadyState ss = find_steady_state(p, quota, steady_guess);
    if (!ss.exists())
        throw ValidationError("generate_synthetic: no steady state to anchor the trajectory");
    StockState x{{ss.stocks.x[0] * opt.start_stock_fraction[0],
                  ss.stocks.x[1] * opt.start_stock_fraction[1]}};

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto noisy = [&](double v) { return opt.noise > 0 ? v * std::exp(opt.noise * gauss(rng)) : v; };

    TimeSeriesDataset out;
    out.species[0].name = "plaice";
    out.species[1].name = "sole";
    for (int t = 0; t < opt.years; ++t) {
        PeriodEquilibrium eq = period_equilibrium(p, x, quota);
        for (int i = 0; i < 2; ++i) {
            SpeciesSeries& s = out.species[i];
            s.year.push_back(opt.first_year + t);
            s.ssb_tonnes.push_back(noisy(model_to_tonnes(p, x.x[i])));
            s.landings_tonnes.push_back(noisy(model_to_tonnes(p, eq.quantity[i])));
            s.price_eur_kg.push_back(noisy(model_to_eurkg(p, eq.price[i])));
            s.tac_tonnes.push_back(opt.emit_tac && quota.tac[i]
                                       ? std::optional<double>(model_to_tonnes(p, *quota.tac[i]))
                                       : std::nullopt);
        }
        // annual bookkeeping, consistent with growth reconstruction from data
        Vec2 dx = stock_change(p, x, eq.harvest());
        for (int i = 0; i < 2; ++i) x.x[i] = std::max(x.x[i] + dx[i], 1e-9);
    }
    return out;
}

}  // namespace flatfish
