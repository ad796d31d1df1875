#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

// Small self-contained numerical kit: bracketed scalar maximization,
// damped Newton for dense systems, box-constrained BFGS, fixed-step RK4,
// Halton sequences and a few statistics helpers.
namespace num {

struct ScalarMaxResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Golden-section maximization on [lo, hi]. Stops when the bracket width is
// below rel_tol * max(|x|, 1) or after max_iter shrink steps. Ties resolve
// toward the smaller x.
ScalarMaxResult golden_max(const std::function<double(double)>& f, double lo, double hi,
                           double rel_tol = 1e-10, int max_iter = 200);

struct NewtonResult {
    std::vector<double> x;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

using VectorFn = std::function<bool(std::span<const double>, std::span<double>)>;

struct NewtonOptions {
    double tol = 1e-12;          // residual norm target
    int max_iter = 100;
    double fd_step = 1e-7;       // relative Jacobian step
    double min_lambda = 1e-10;   // backtracking floor
};

// Damped Newton with forward/central finite-difference Jacobian and
// backtracking line search on ||F||. F returns false when the point is
// outside its domain; the line search then shortens the step.
NewtonResult newton_solve(const VectorFn& F, std::vector<double> x0, const NewtonOptions& opt = {});

// Solves A x = b in place by Gaussian elimination with partial pivoting.
// Returns false for a (numerically) singular matrix. A is n*n row-major.
bool solve_dense(std::vector<double>& A, std::vector<double>& b, int n);

struct BfgsOptions {
    double grad_tol = 1e-9;      // projected-gradient infinity norm
    double f_tol = 1e-14;        // relative improvement floor
    int max_eval = 10000;
    double fd_step = 1e-7;
};

struct BfgsResult {
    std::vector<double> x;
    double fx = 0.0;
    int evaluations = 0;
    bool converged = false;
};

// Box-constrained quasi-Newton minimization with central-difference
// gradients. Steps are projected onto [lo, hi]; the inverse Hessian is
// reset whenever the active set changes.
BfgsResult bfgs_box_min(const std::function<double(std::span<const double>)>& f,
                        std::vector<double> x0, std::span<const double> lo,
                        std::span<const double> hi, const BfgsOptions& opt = {});

// Classical fixed-step RK4 for small dense states. deriv(t, x, dxdt).
// Calls observe(t, x) after every step (and once at t0) when provided; the
// observer may adjust the state in place, e.g. to impose bounds.
void rk4_integrate(const std::function<void(double, std::span<const double>, std::span<double>)>& deriv,
                   std::vector<double>& x, double t0, double t1, double dt,
                   const std::function<void(double, std::span<double>)>& observe = nullptr);

// Halton low-discrepancy point in [0,1)^dim, index >= 0.
std::vector<double> halton_point(int index, int dim);

double rms(std::span<const double> v);
double rmse(std::span<const double> a, std::span<const double> b);

// FNV-1a 64-bit hash, used for reproducibility manifests.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t value);

}  // namespace num
