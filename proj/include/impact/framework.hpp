#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "impact/errors.hpp"

// Generic engine for exposure / sensitivity / adaptation / total-impact
// analysis of a model that exposes a property function psi(theta, tau) and a
// behaviour response tau(theta). Absolute measures difference the property
// between driver states; marginal measures are finite-difference Jacobians.
namespace impact {

// Named exogenous drivers with their admissible exposure box. The box is
// used to validate sweeps and to fall back to one-sided differences at its
// edges. A driver that must not move has lower == upper == baseline.
struct DriverSchema {
    std::vector<std::string> names;
    std::vector<double> lower;
    std::vector<double> upper;

    int index(std::string_view name) const;
    size_t size() const { return names.size(); }
};

struct DriverVector {
    std::shared_ptr<const DriverSchema> schema;
    std::vector<double> value;
    bool baseline = false;

    double at(std::string_view name) const { return value[schema->index(name)]; }
    DriverVector with(std::string_view name, double v) const;
    void validate() const;  // finite entries, size matches schema
};

// Property and behaviour naming plus the pairs (property, behaviour) for
// which the behaviour is the maximizer of that property. Those properties
// carry the nonnegative-adaptation guarantee.
struct PropertySchema {
    std::vector<std::string> properties;
    std::vector<std::string> behaviours;
    std::vector<double> behaviour_lower;
    std::vector<double> behaviour_upper;
    std::vector<std::pair<int, int>> objective_pairs;
    int primary_property = 0;  // used for the stressor/benefactor tag

    size_t property_count() const { return properties.size(); }
    size_t behaviour_count() const { return behaviours.size(); }
    bool is_maximized(int property_index) const;
};

class ModelInterface {
  public:
    virtual ~ModelInterface() = default;
    virtual const DriverSchema& drivers() const = 0;
    virtual const PropertySchema& schema() const = 0;
    // psi(theta, tau), length P, finite on the exposure box
    virtual std::vector<double> property(const DriverVector& theta,
                                         std::span<const double> tau) const = 0;
    // closed-form tau*(theta) when the model has one
    virtual std::optional<std::vector<double>> closed_form_response(const DriverVector&) const {
        return std::nullopt;
    }
};

struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}
    double& at(int i, int j) { return v[static_cast<size_t>(i) * cols + j]; }
    double at(int i, int j) const { return v[static_cast<size_t>(i) * cols + j]; }
};

// One grid point of an exposure analysis. TI = S + aA holds elementwise
// within 1e-10; aA >= -1e-12 on every maximized property.
struct ImpactRecord {
    DriverVector theta;
    std::vector<double> exposure;       // D
    std::vector<double> S;              // P
    std::vector<double> aA;             // P
    std::vector<double> cA;             // M
    std::vector<double> TI;             // P
    Matrix s;                           // P x D marginal sensitivity
    Matrix aa;                          // P x D marginal adaptation
    Matrix ba;                          // P x D adaptation curvature
    Matrix ca;                          // M x D marginal behaviour change
    Matrix ti_marginal;                 // P x D
    std::vector<unsigned char> one_sided;  // per driver: FD fell back to one-sided
    int stressor_sign = 0;              // sign of S on the primary property
};

struct EngineOptions {
    double fd_rel_step = 1e-6;         // first derivatives
    double fd2_rel_step = 1e-4;        // second derivatives
    double argmax_rel_tol = 1e-10;
    int argmax_max_iter = 200;
    double decomposition_tol = 1e-10;
    double optimality_slack = 1e-12;
};

// --- engine operations ------------------------------------------------

std::vector<double> exposure(const DriverVector& theta, const DriverVector& theta0);

// tau(theta): the model's closed form when available, otherwise argmax.
std::vector<double> behaviour_response(const ModelInterface& model, const DriverVector& theta,
                                       const EngineOptions& opt = {});

// Derivative-free coordinate-cycled maximization of the paired properties
// over the behaviour box.
std::vector<double> argmax_adaptation(const ModelInterface& model, const DriverVector& theta,
                                      const EngineOptions& opt = {});

std::vector<double> sensitivity_abs(const ModelInterface& model, const DriverVector& theta,
                                    const DriverVector& theta0, const EngineOptions& opt = {});

Matrix sensitivity_marginal(const ModelInterface& model, const DriverVector& theta,
                            const DriverVector& theta0, const EngineOptions& opt = {},
                            std::vector<unsigned char>* one_sided = nullptr);

std::vector<double> adaptation_abs(const ModelInterface& model, const DriverVector& theta,
                                   const DriverVector& theta0, const EngineOptions& opt = {});

std::vector<double> adaptation_behaviour(const ModelInterface& model, const DriverVector& theta,
                                         const DriverVector& theta0, const EngineOptions& opt = {});

struct AdaptationMarginals {
    Matrix aa;  // d aA / d theta
    Matrix ba;  // d^2 aA / d theta^2
    Matrix ca;  // d tau / d theta
    std::vector<unsigned char> one_sided;
};

AdaptationMarginals adaptation_marginals(const ModelInterface& model, const DriverVector& theta,
                                         const DriverVector& theta0, const EngineOptions& opt = {});

struct TotalImpact {
    std::vector<double> TI;
    Matrix ti_marginal;
};

TotalImpact total_impact(const ModelInterface& model, const DriverVector& theta,
                         const DriverVector& theta0, const EngineOptions& opt = {});

// Everything above at once, sharing evaluations.
ImpactRecord evaluate_record(const ModelInterface& model, const DriverVector& theta,
                             const DriverVector& theta0, const EngineOptions& opt = {});

struct SweepOptions {
    EngineOptions engine;
    bool allow_out_of_box = false;
    bool parallel = true;
};

// n >= 3 evenly spaced records over [lo, hi] for one driver, all other
// drivers at baseline. The baseline value is included as an exact grid
// point: either it already is a node, or the grid is built as two even
// half-ranges meeting at the baseline.
std::vector<ImpactRecord> sweep(const ModelInterface& model, const DriverVector& theta0,
                                std::string_view driver, double lo, double hi, int n,
                                const SweepOptions& opt = {});

// Serial reference for the parallel sweep; results must match bitwise.
std::vector<ImpactRecord> sweep_serial(const ModelInterface& model, const DriverVector& theta0,
                                       std::string_view driver, double lo, double hi, int n,
                                       const SweepOptions& opt = {});

// The grid used by sweep(); exposed for tests and output layers.
std::vector<double> sweep_grid(double lo, double hi, double baseline, int n);

}  // namespace impact
