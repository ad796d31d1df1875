#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "impact/framework.hpp"

using namespace impact;

namespace {

std::shared_ptr<DriverSchema> two_driver_schema(double lo1 = -2, double hi1 = 2, double lo2 = -2,
                                                double hi2 = 2) {
    auto s = std::make_shared<DriverSchema>();
    s->names = {"d1", "d2"};
    s->lower = {lo1, lo2};
    s->upper = {hi1, hi2};
    return s;
}

DriverVector make_theta(std::shared_ptr<const DriverSchema> schema, std::vector<double> v,
                        bool baseline = false) {
    DriverVector t;
    t.schema = std::move(schema);
    t.value = std::move(v);
    t.baseline = baseline;
    return t;
}

// psi = sin(d1) * tau - tau^2/2 + d2^2; the optimum tau* = sin(d1) is known
// in closed form together with every marginal.
class SmoothModel : public ModelInterface {
  public:
    explicit SmoothModel(bool provide_closed_form = true)
        : closed_(provide_closed_form), schema_(two_driver_schema()) {
        ps_.properties = {"value"};
        ps_.behaviours = {"act"};
        ps_.behaviour_lower = {-2.0};
        ps_.behaviour_upper = {2.0};
        ps_.objective_pairs = {{0, 0}};
    }
    const DriverSchema& drivers() const override { return *schema_; }
    const PropertySchema& schema() const override { return ps_; }
    std::vector<double> property(const DriverVector& t, std::span<const double> tau) const override {
        double d1 = t.value[0], d2 = t.value[1];
        return {std::sin(d1) * tau[0] - 0.5 * tau[0] * tau[0] + d2 * d2};
    }
    std::optional<std::vector<double>> closed_form_response(const DriverVector& t) const override {
        if (!closed_) return std::nullopt;
        return std::vector<double>{std::sin(t.value[0])};
    }
    std::shared_ptr<const DriverSchema> schema_ptr() const { return schema_; }

  private:
    bool closed_;
    std::shared_ptr<DriverSchema> schema_;
    PropertySchema ps_;
};

// quadratic test property psi = -(tau - c)^2 with c = d1
class QuadraticModel : public ModelInterface {
  public:
    QuadraticModel() : schema_(two_driver_schema(-1, 1, -1, 1)) {
        ps_.properties = {"value"};
        ps_.behaviours = {"act"};
        ps_.behaviour_lower = {-5.0};
        ps_.behaviour_upper = {5.0};
        ps_.objective_pairs = {{0, 0}};
    }
    const DriverSchema& drivers() const override { return *schema_; }
    const PropertySchema& schema() const override { return ps_; }
    std::vector<double> property(const DriverVector& t, std::span<const double> tau) const override {
        double c = t.value[0];
        return {-(tau[0] - c) * (tau[0] - c)};
    }
    std::shared_ptr<const DriverSchema> schema_ptr() const { return schema_; }

  private:
    std::shared_ptr<DriverSchema> schema_;
    PropertySchema ps_;
};

}  // namespace

TEST_CASE("exposure differences driver vectors and validates schemas") {
    auto schema = two_driver_schema();
    DriverVector theta0 = make_theta(schema, {1.0, 0.5}, true);
    DriverVector theta = make_theta(schema, {0.65, 0.5});

    auto e = exposure(theta, theta0);
    CHECK(e[0] == doctest::Approx(-0.35));
    CHECK(e[1] == 0.0);

    auto zero = exposure(theta0, theta0);
    CHECK(zero[0] == 0.0);
    CHECK(zero[1] == 0.0);

    auto other = std::make_shared<DriverSchema>();
    other->names = {"d1", "dX"};
    other->lower = {-2, -2};
    other->upper = {2, 2};
    DriverVector mismatched = make_theta(other, {1.0, 0.5});
    CHECK_THROWS_AS((void)exposure(mismatched, theta0), SchemaError);
}

TEST_CASE("argmax_adaptation solves the quadratic and boundary cases") {
    QuadraticModel model;
    DriverVector theta = make_theta(model.schema_ptr(), {0.73, 0.0});
    auto tau = argmax_adaptation(model, theta);
    CHECK(tau[0] == doctest::Approx(0.73).epsilon(1e-8));

    // monotone objective pins the bound
    class Monotone : public QuadraticModel {
      public:
        std::vector<double> property(const DriverVector&, std::span<const double> tau) const override {
            return {tau[0]};
        }
    } mono;
    DriverVector t2 = make_theta(mono.schema_ptr(), {0.0, 0.0});
    CHECK(argmax_adaptation(mono, t2)[0] == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("argmax agrees with a provided closed form") {
    SmoothModel with_closed(true), without(false);
    DriverVector theta = make_theta(with_closed.schema_ptr(), {1.1, -0.3});
    auto closed = behaviour_response(with_closed, theta);
    auto numeric = argmax_adaptation(without, theta);
    CHECK(numeric[0] == doctest::Approx(closed[0]).epsilon(1e-8));
}

TEST_CASE("sensitivity is zero at the baseline and matches hand values") {
    SmoothModel model;
    DriverVector theta0 = make_theta(model.schema_ptr(), {0.4, 0.2}, true);
    auto S0 = sensitivity_abs(model, theta0, theta0);
    CHECK(S0[0] == 0.0);

    DriverVector theta = make_theta(model.schema_ptr(), {0.4, 0.7});
    // only d2^2 moves when tau is frozen and d1 unchanged
    auto S = sensitivity_abs(model, theta, theta0);
    CHECK(S[0] == doctest::Approx(0.7 * 0.7 - 0.2 * 0.2).epsilon(1e-12));
}

TEST_CASE("evaluation errors carry the offending driver point") {
    class NanModel : public SmoothModel {
      public:
        std::vector<double> property(const DriverVector& t, std::span<const double> tau) const override {
            if (t.value[1] > 0.5) return {std::nan("")};
            return SmoothModel::property(t, tau);
        }
    } model;
    DriverVector theta0 = make_theta(model.schema_ptr(), {0.0, 0.0}, true);
    DriverVector bad = make_theta(model.schema_ptr(), {0.0, 0.9});
    try {
        (void)sensitivity_abs(model, bad, theta0);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        REQUIRE(e.theta.size() == 2);
        CHECK(e.theta[1] == doctest::Approx(0.9));
    }
}

TEST_CASE("adaptation is nonnegative on the maximized property and throws when violated") {
    SmoothModel model;
    DriverVector theta0 = make_theta(model.schema_ptr(), {0.2, 0.0}, true);
    DriverVector theta = make_theta(model.schema_ptr(), {1.4, 0.0});
    auto aA = adaptation_abs(model, theta, theta0);
    CHECK(aA[0] >= -1e-12);
    CHECK(aA[0] > 0.0);  // tau must move, so adaptation strictly helps

    // a deliberately wrong "closed form" must trip the optimality guard
    class Suboptimal : public SmoothModel {
      public:
        std::optional<std::vector<double>> closed_form_response(const DriverVector& t) const override {
            return std::vector<double>{-std::sin(t.value[0])};  // wrong sign: worse than frozen
        }
    } bad;
    DriverVector theta0b = make_theta(bad.schema_ptr(), {0.2, 0.0}, true);
    DriverVector thetab = make_theta(bad.schema_ptr(), {1.4, 0.0});
    CHECK_THROWS_AS((void)adaptation_abs(bad, thetab, theta0b), OptimalityViolation);
}

TEST_CASE("behaviour change differences the responses") {
    SmoothModel model;
    DriverVector theta0 = make_theta(model.schema_ptr(), {0.2, 0.0}, true);
    DriverVector theta = make_theta(model.schema_ptr(), {0.9, 0.0});
    auto cA = adaptation_behaviour(model, theta, theta0);
    CHECK(cA[0] == doctest::Approx(std::sin(0.9) - std::sin(0.2)).epsilon(1e-12));
    auto zero = adaptation_behaviour(model, theta0, theta0);
    CHECK(zero[0] == 0.0);
}

TEST_CASE("closed-form marginals agree with the engine at 100 random interior points") {
    SmoothModel model;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 100; ++k) {
        DriverVector theta0 = make_theta(model.schema_ptr(), {u(rng), u(rng)}, true);
        DriverVector theta = make_theta(model.schema_ptr(), {u(rng), u(rng)});
        Matrix s = sensitivity_marginal(model, theta, theta0);
        // d psi / d d1 at frozen tau0: cos(d1) * tau0 ; d psi / d d2: 2 d2
        double tau0 = std::sin(theta0.value[0]);
        double expect1 = std::cos(theta.value[0]) * tau0;
        double expect2 = 2 * theta.value[1];
        CHECK(s.at(0, 0) == doctest::Approx(expect1).epsilon(1e-5));
        CHECK(s.at(0, 1) == doctest::Approx(expect2).epsilon(1e-5).scale(1.0));

        AdaptationMarginals am = adaptation_marginals(model, theta, theta0);
        // ca = d tau*/d d1 = cos(d1)
        CHECK(am.ca.at(0, 0) == doctest::Approx(std::cos(theta.value[0])).epsilon(1e-5));
        CHECK(am.ca.at(0, 1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
    }
}

TEST_CASE("total impact satisfies the decomposition identity on 1000 random pairs") {
    SmoothModel model;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.8, 1.8);
    for (int k = 0; k < 1000; ++k) {
        DriverVector theta0 = make_theta(model.schema_ptr(), {u(rng), u(rng)}, true);
        DriverVector theta = make_theta(model.schema_ptr(), {u(rng), u(rng)});
        auto S = sensitivity_abs(model, theta, theta0);
        auto aA = adaptation_abs(model, theta, theta0);
        TotalImpact ti = total_impact(model, theta, theta0);
        CHECK(std::abs(ti.TI[0] - (S[0] + aA[0])) <= 1e-10);
    }
}

TEST_CASE("marginal total impact collapses to marginal sensitivity at the baseline") {
    SmoothModel model;
    DriverVector theta0 = make_theta(model.schema_ptr(), {0.6, -0.4}, true);
    TotalImpact ti = total_impact(model, theta0, theta0);
    CHECK(ti.TI[0] == 0.0);
    Matrix s = sensitivity_marginal(model, theta0, theta0);
    AdaptationMarginals am = adaptation_marginals(model, theta0, theta0);
    for (int d = 0; d < 2; ++d) {
        CHECK(std::abs(ti.ti_marginal.at(0, d) - s.at(0, d)) <= 1e-8);
        CHECK(std::abs(am.aa.at(0, d)) <= 1e-8);
    }
}

TEST_CASE("marginal total impact agrees with the s + aa route off the baseline") {
    // the adapted-path jacobian and the sensitivity-plus-adaptation sum are
    // two independent numerical routes to the same derivative
    SmoothModel model;
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 50; ++k) {
        DriverVector theta0 = make_theta(model.schema_ptr(), {u(rng), u(rng)}, true);
        DriverVector theta = make_theta(model.schema_ptr(), {u(rng), u(rng)});
        TotalImpact ti = total_impact(model, theta, theta0);
        Matrix s = sensitivity_marginal(model, theta, theta0);
        AdaptationMarginals am = adaptation_marginals(model, theta, theta0);
        for (int d = 0; d < 2; ++d) {
            double sum = s.at(0, d) + am.aa.at(0, d);
            CHECK(ti.ti_marginal.at(0, d) ==
                  doctest::Approx(sum).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("first-order condition holds at interior maximizers") {
    SmoothModel model;
    DriverVector theta = make_theta(model.schema_ptr(), {0.8, 0.1}, true);
    auto tau = behaviour_response(model, theta);
    double h = 1e-6;
    std::vector<double> up{tau[0] + h}, dn{tau[0] - h};
    double dpsi = (model.property(theta, up)[0] - model.property(theta, dn)[0]) / (2 * h);
    CHECK(std::abs(dpsi) <= 1e-6);
}

TEST_CASE("adaptation curvature is symmetric for an even adaptive-capacity profile") {
    // tau* = d1^2 makes aA(theta) = d1^4 around the baseline at zero
    class EvenModel : public ModelInterface {
      public:
        EvenModel() : schema_(two_driver_schema(-1, 1, -1, 1)) {
            ps_.properties = {"value"};
            ps_.behaviours = {"act"};
            ps_.behaviour_lower = {-5.0};
            ps_.behaviour_upper = {5.0};
            ps_.objective_pairs = {{0, 0}};
        }
        const DriverSchema& drivers() const override { return *schema_; }
        const PropertySchema& schema() const override { return ps_; }
        std::vector<double> property(const DriverVector& t, std::span<const double> tau) const override {
            double c = t.value[0] * t.value[0];
            return {-(tau[0] - c) * (tau[0] - c)};
        }
        std::optional<std::vector<double>> closed_form_response(const DriverVector& t) const override {
            return std::vector<double>{t.value[0] * t.value[0]};
        }
        std::shared_ptr<const DriverSchema> schema_ptr() const { return schema_; }

      private:
        std::shared_ptr<DriverSchema> schema_;
        PropertySchema ps_;
    } model;
    DriverVector theta0 = make_theta(model.schema_ptr(), {0.0, 0.0}, true);
    DriverVector plus = make_theta(model.schema_ptr(), {0.5, 0.0});
    DriverVector minus = make_theta(model.schema_ptr(), {-0.5, 0.0});
    AdaptationMarginals mp = adaptation_marginals(model, plus, theta0);
    AdaptationMarginals mm = adaptation_marginals(model, minus, theta0);
    CHECK(mp.ba.at(0, 0) == doctest::Approx(mm.ba.at(0, 0)).epsilon(1e-4));
}

TEST_CASE("sweep grids include the baseline exactly and validate bounds") {
    auto grid = sweep_grid(0.48, 0.52, 0.50, 3);
    REQUIRE(grid.size() == 3);
    CHECK(grid[0] == 0.48);
    CHECK(grid[1] == 0.50);
    CHECK(grid[2] == 0.52);

    // baseline off the even lattice: two half-ranges meet exactly at it
    auto grid2 = sweep_grid(0.65, 1.37, 1.0, 101);
    CHECK(std::count(grid2.begin(), grid2.end(), 1.0) == 1);
    CHECK(grid2.front() == 0.65);
    CHECK(grid2.back() == 1.37);
    CHECK(std::is_sorted(grid2.begin(), grid2.end()));

    CHECK_THROWS_AS((void)sweep_grid(1, 2, 1.5, 2), ValidationError);
}

TEST_CASE("sweep produces zero records at the baseline and honors the box") {
    SmoothModel model;
    DriverVector theta0 = make_theta(model.schema_ptr(), {0.5, 0.0}, true);
    auto records = sweep_serial(model, theta0, "d1", -1.0, 1.0, 5);
    REQUIRE(records.size() == 5);
    bool saw_baseline = false;
    for (const auto& rec : records) {
        CHECK(std::abs(rec.TI[0] - (rec.S[0] + rec.aA[0])) <= 1e-10);
        if (rec.exposure[0] == 0.0) {
            saw_baseline = true;
            CHECK(rec.S[0] == 0.0);
            CHECK(rec.aA[0] == 0.0);
            CHECK(rec.TI[0] == 0.0);
            CHECK(rec.stressor_sign == 0);
        }
    }
    CHECK(saw_baseline);

    CHECK_THROWS_AS((void)sweep_serial(model, theta0, "d1", -3.0, 1.0, 5), ValidationError);
    SweepOptions allow;
    allow.allow_out_of_box = true;
    allow.parallel = false;
    CHECK_NOTHROW((void)sweep_serial(model, theta0, "d1", -3.0, 1.0, 5, allow));
}

TEST_CASE("one-sided differences are flagged at the exposure box edge") {
    SmoothModel model;
    DriverVector theta0 = make_theta(model.schema_ptr(), {0.0, 0.0}, true);
    DriverVector edge = make_theta(model.schema_ptr(), {2.0, 0.0});  // at the d1 upper bound
    std::vector<unsigned char> flags;
    (void)sensitivity_marginal(model, edge, theta0, {}, &flags);
    CHECK(flags[0] == 1);
    CHECK(flags[1] == 0);
}
