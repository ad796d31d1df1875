#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flatfish/model.hpp"

namespace flatfish {

// Flat key-value parameter file using the model symbol names:
// epsilon, chi1, chi2, nu11..nu22, omega, phi (or phi1/phi2), alpha,
// beta1, beta2, eta, sigma, ricker_a1/b1/a2/b2, kappa, wscale, plus run
// settings (quota_sole_tonnes, stock1_tonnes, seed_stock1_tonnes, ...).
struct RunParams {
    ModelParams model = default_params();
    double quota_sole_tonnes = SteadyAnchors{}.sole_quantity_t;
    std::optional<double> quota_plaice_tonnes;
    Vec2 sweep_stock_tonnes{SteadyAnchors{}.sweep_plaice_stock_t,
                            SteadyAnchors{}.sweep_sole_stock_t};
    Vec2 seed_stock_tonnes{SteadyAnchors{}.plaice_stock_t, SteadyAnchors{}.sole_stock_t};
};

RunParams read_params_file(const std::string& path);
void write_params_file(const std::string& path, const RunParams& params);

// CSV writer with full round-trip precision; display columns are emitted by
// callers as "<name>_disp" at reduced precision.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void field(const std::string& v);
    void field(double v);
    void field_display(double v);  // %.6g companion column
    void field(int v);
    void end_row();
    const std::string& path() const { return path_; }

  private:
    std::FILE* f_;
    std::string path_;
    size_t columns_;
    size_t at_ = 0;
};

// Reproducibility manifest: inputs with hashes, settings, outputs with
// hashes. Deliberately clock-free so reruns are byte-identical.
class Manifest {
  public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void add_input(const std::string& path);
    void add_output(const std::string& path);  // hashes at write()
    void write(const std::string& path) const;

  private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::vector<std::string> outputs_;
};

std::string format_full(double v);     // %.17g
std::string format_display(double v);  // %.6g

}  // namespace flatfish
