#include "flatfish/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "num/solvers.hpp"

namespace flatfish {

using impact::ValidationError;

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

RunParams read_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open parameter file: " + path);
    std::map<std::string, double> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("parameter file line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        char* end = nullptr;
        double v = std::strtod(val.c_str(), &end);
        if (end == val.c_str() || *end != '\0' || !std::isfinite(v))
            throw ValidationError("parameter file line " + std::to_string(lineno) +
                                  ": cannot parse value '" + val + "'");
        kv[key] = v;
    }
    RunParams rp;
    ModelParams& m = rp.model;
    auto take = [&](const char* key, double& target) {
        auto it = kv.find(key);
        if (it != kv.end()) {
            target = it->second;
            kv.erase(it);
        }
    };
    take("epsilon", m.epsilon);
    take("chi1", m.chi[0]);
    take("chi2", m.chi[1]);
    take("nu11", m.nu[0][0]);
    take("nu12", m.nu[0][1]);
    take("nu21", m.nu[1][0]);
    take("nu22", m.nu[1][1]);
    take("omega", m.omega);
    if (auto it = kv.find("phi"); it != kv.end()) {
        m.phi = {it->second, it->second};
        kv.erase(it);
    }
    take("phi1", m.phi[0]);
    take("phi2", m.phi[1]);
    take("alpha", m.alpha);
    take("beta1", m.beta[0]);
    take("beta2", m.beta[1]);
    take("eta", m.eta);
    take("sigma", m.sigma);
    take("ricker_a1", m.ricker_a[0]);
    take("ricker_b1", m.ricker_b[0]);
    take("ricker_a2", m.ricker_a[1]);
    take("ricker_b2", m.ricker_b[1]);
    take("kappa", m.kappa);
    take("wscale", m.w_scale);
    take("quota_sole_tonnes", rp.quota_sole_tonnes);
    if (auto it = kv.find("quota_plaice_tonnes"); it != kv.end()) {
        rp.quota_plaice_tonnes = it->second;
        kv.erase(it);
    }
    take("stock1_tonnes", rp.sweep_stock_tonnes[0]);
    take("stock2_tonnes", rp.sweep_stock_tonnes[1]);
    take("seed_stock1_tonnes", rp.seed_stock_tonnes[0]);
    take("seed_stock2_tonnes", rp.seed_stock_tonnes[1]);
    if (!kv.empty())
        throw ValidationError("parameter file: unknown key '" + kv.begin()->first + "'");
    m.validate();
    return rp;
}

void write_params_file(const std::string& path, const RunParams& rp) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ValidationError("cannot write parameter file: " + path);
    const ModelParams& m = rp.model;
    auto put = [&](const char* key, double v) { std::fprintf(f, "%s = %.17g\n", key, v); };
    std::fprintf(f, "# flatfish model parameters\n");
    put("epsilon", m.epsilon);
    put("chi1", m.chi[0]);
    put("chi2", m.chi[1]);
    put("nu11", m.nu[0][0]);
    put("nu12", m.nu[0][1]);
    put("nu21", m.nu[1][0]);
    put("nu22", m.nu[1][1]);
    put("omega", m.omega);
    put("phi1", m.phi[0]);
    put("phi2", m.phi[1]);
    put("alpha", m.alpha);
    put("beta1", m.beta[0]);
    put("beta2", m.beta[1]);
    put("eta", m.eta);
    put("sigma", m.sigma);
    put("ricker_a1", m.ricker_a[0]);
    put("ricker_b1", m.ricker_b[0]);
    put("ricker_a2", m.ricker_a[1]);
    put("ricker_b2", m.ricker_b[1]);
    put("kappa", m.kappa);
    put("wscale", m.w_scale);
    std::fprintf(f, "# run settings\n");
    put("quota_sole_tonnes", rp.quota_sole_tonnes);
    if (rp.quota_plaice_tonnes) put("quota_plaice_tonnes", *rp.quota_plaice_tonnes);
    put("stock1_tonnes", rp.sweep_stock_tonnes[0]);
    put("stock2_tonnes", rp.sweep_stock_tonnes[1]);
    put("seed_stock1_tonnes", rp.seed_stock_tonnes[0]);
    put("seed_stock2_tonnes", rp.seed_stock_tonnes[1]);
    std::fclose(f);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : f_(std::fopen(path.c_str(), "wb")), path_(path), columns_(header.size()) {
    if (!f_) throw ValidationError("cannot write CSV: " + path);
    for (size_t i = 0; i < header.size(); ++i)
        std::fprintf(f_, "%s%s", header[i].c_str(), i + 1 < header.size() ? "," : "\n");
}

CsvWriter::~CsvWriter() {
    if (f_) std::fclose(f_);
}

void CsvWriter::field(const std::string& v) {
    std::fprintf(f_, "%s%s", v.c_str(), ++at_ < columns_ ? "," : "");
}

void CsvWriter::field(double v) { field(format_full(v)); }
void CsvWriter::field_display(double v) { field(format_display(v)); }
void CsvWriter::field(int v) { field(std::to_string(v)); }

void CsvWriter::end_row() {
    if (at_ != columns_)
        throw ValidationError("CSV row in " + path_ + " has " + std::to_string(at_) +
                              " of " + std::to_string(columns_) + " fields");
    std::fprintf(f_, "\n");
    at_ = 0;
}

void Manifest::set(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) {
    entries_.emplace_back(key, format_full(value));
}

void Manifest::add_input(const std::string& path) {
    entries_.emplace_back("input " + path, num::hex64(num::fnv1a64_file(path)));
}

void Manifest::add_output(const std::string& path) { outputs_.push_back(path); }

void Manifest::write(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ValidationError("cannot write manifest: " + path);
    for (auto& [k, v] : entries_) std::fprintf(f, "%s = %s\n", k.c_str(), v.c_str());
    for (auto& out : outputs_) {
        // record the basename so reruns into another directory stay identical
        size_t slash = out.find_last_of('/');
        std::string name = slash == std::string::npos ? out : out.substr(slash + 1);
        std::fprintf(f, "output %s = %s\n", name.c_str(),
                     num::hex64(num::fnv1a64_file(out)).c_str());
    }
    std::fclose(f);
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_display(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace flatfish
