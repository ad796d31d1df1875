#include "num/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace num {

ScalarMaxResult golden_max(const std::function<double(double)>& f, double lo, double hi,
                           double rel_tol, int max_iter) {
    if (!(hi >= lo)) std::swap(lo, hi);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    // tolerance follows the bracket magnitude so maximizers far below 1 keep
    // full relative precision; the floor terminates brackets pinned at zero
    const double abs_floor = rel_tol * rel_tol * std::max(b - a, 1e-300);
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    ScalarMaxResult res;
    int it = 0;
    for (; it < max_iter; ++it) {
        double scale = std::max(std::abs(a), std::abs(b));
        if (b - a <= rel_tol * scale + abs_floor) {
            res.converged = true;
            break;
        }
        if (fc >= fd) {  // ties keep the left interval
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    res.iterations = it;
    double xm = (fc >= fd) ? c : d;
    double fm = std::max(fc, fd);
    // prefer the smallest argument attaining the maximum within tolerance
    double fa = f(a);
    if (fa >= fm - std::abs(fm) * 1e-14) {
        xm = a;
        fm = fa;
    }
    res.x = xm;
    res.fx = fm;
    return res;
}

static double norm2(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

bool solve_dense(std::vector<double>& A, std::vector<double>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(A[col * n + col]);
        for (int r = col + 1; r < n; ++r) {
            double v = std::abs(A[r * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < 1e-300) return false;
        if (piv != col) {
            for (int k = col; k < n; ++k) std::swap(A[piv * n + k], A[col * n + k]);
            std::swap(b[piv], b[col]);
        }
        double inv = 1.0 / A[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            double factor = A[r * n + col] * inv;
            if (factor == 0.0) continue;
            for (int k = col; k < n; ++k) A[r * n + k] -= factor * A[col * n + k];
            b[r] -= factor * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < n; ++k) s -= A[r * n + k] * b[k];
        b[r] = s / A[r * n + r];
    }
    return true;
}

NewtonResult newton_solve(const VectorFn& F, std::vector<double> x0, const NewtonOptions& opt) {
    const int n = static_cast<int>(x0.size());
    NewtonResult res;
    std::vector<double> fx(n), ftrial(n), J(n * n), step(n), xp(n), xm(n), fp(n), fm(n);
    if (!F(x0, fx)) {
        res.x = std::move(x0);
        res.residual_norm = std::numeric_limits<double>::infinity();
        return res;
    }
    double fnorm = norm2(fx);
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        if (fnorm <= opt.tol) {
            res.converged = true;
            break;
        }
        bool jac_ok = true;
        for (int j = 0; j < n && jac_ok; ++j) {
            double h = opt.fd_step * std::max(std::abs(x0[j]), 1e-4);
            xp.assign(x0.begin(), x0.end());
            xm.assign(x0.begin(), x0.end());
            xp[j] += h;
            xm[j] -= h;
            if (F(xp, fp) && F(xm, fm)) {
                for (int i = 0; i < n; ++i) J[i * n + j] = (fp[i] - fm[i]) / (2 * h);
            } else if (F(xp, fp)) {  // one-sided near a domain edge
                for (int i = 0; i < n; ++i) J[i * n + j] = (fp[i] - fx[i]) / h;
            } else if (F(xm, fm)) {
                for (int i = 0; i < n; ++i) J[i * n + j] = (fx[i] - fm[i]) / h;
            } else {
                jac_ok = false;
            }
        }
        if (!jac_ok) break;
        std::vector<double> A = J;
        for (int i = 0; i < n; ++i) step[i] = -fx[i];
        if (!solve_dense(A, step, n)) break;
        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= opt.min_lambda) {
            for (int i = 0; i < n; ++i) xp[i] = x0[i] + lambda * step[i];
            if (F(xp, ftrial)) {
                double tnorm = norm2(ftrial);
                if (tnorm < fnorm * (1.0 - 1e-4 * lambda) || tnorm <= opt.tol) {
                    x0 = xp;
                    fx = ftrial;
                    fnorm = tnorm;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
    }
    res.x = std::move(x0);
    res.residual_norm = fnorm;
    res.iterations = it;
    if (fnorm <= opt.tol) res.converged = true;
    return res;
}

namespace {

struct BoxProblem {
    const std::function<double(std::span<const double>)>& f;
    std::span<const double> lo, hi;
    int evals = 0;
    int cap = 0;

    double eval(std::span<const double> x) {
        ++evals;
        return f(x);
    }
    bool exhausted() const { return evals >= cap; }
};

void project(std::vector<double>& x, std::span<const double> lo, std::span<const double> hi) {
    for (size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

std::vector<bool> active_set(std::span<const double> x, std::span<const double> g,
                             std::span<const double> lo, std::span<const double> hi) {
    std::vector<bool> act(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        double span = std::max(hi[i] - lo[i], 1e-300);
        bool at_lo = x[i] <= lo[i] + 1e-12 * span && g[i] > 0;
        bool at_hi = x[i] >= hi[i] - 1e-12 * span && g[i] < 0;
        act[i] = at_lo || at_hi;
    }
    return act;
}

}  // namespace

BfgsResult bfgs_box_min(const std::function<double(std::span<const double>)>& f,
                        std::vector<double> x0, std::span<const double> lo,
                        std::span<const double> hi, const BfgsOptions& opt) {
    const int n = static_cast<int>(x0.size());
    BoxProblem prob{f, lo, hi, 0, opt.max_eval};
    project(x0, lo, hi);
    double fx = prob.eval(x0);

    std::vector<double> H(n * n, 0.0);  // inverse Hessian approximation
    auto reset_H = [&] {
        std::fill(H.begin(), H.end(), 0.0);
        for (int i = 0; i < n; ++i) H[i * n + i] = 1.0;
    };
    reset_H();

    std::vector<double> g(n), gnew(n), d(n), xnew(n), s(n), y(n), Hy(n);
    auto gradient = [&](std::span<const double> x, double fref, std::vector<double>& out) {
        std::vector<double> xt(x.begin(), x.end());
        for (int i = 0; i < n; ++i) {
            double h = opt.fd_step * std::max(std::abs(x[i]), 1e-8);
            double saved = xt[i];
            double hi_room = hi[i] - saved, lo_room = saved - lo[i];
            if (hi_room >= h && lo_room >= h) {
                xt[i] = saved + h;
                double fp = prob.eval(xt);
                xt[i] = saved - h;
                double fm = prob.eval(xt);
                out[i] = (fp - fm) / (2 * h);
            } else if (hi_room >= h) {
                xt[i] = saved + h;
                out[i] = (prob.eval(xt) - fref) / h;
            } else if (lo_room >= h) {
                xt[i] = saved - h;
                out[i] = (fref - prob.eval(xt)) / h;
            } else {
                out[i] = 0.0;
            }
            xt[i] = saved;
        }
    };

    gradient(x0, fx, g);
    std::vector<bool> act = active_set(x0, g, lo, hi);

    BfgsResult res;
    while (!prob.exhausted()) {
        // projected gradient convergence check
        double pg = 0;
        for (int i = 0; i < n; ++i)
            if (!act[i]) pg = std::max(pg, std::abs(g[i]));
        if (pg <= opt.grad_tol) {
            res.converged = true;
            break;
        }
        for (int i = 0; i < n; ++i) {
            d[i] = 0;
            if (act[i]) continue;
            for (int j = 0; j < n; ++j)
                if (!act[j]) d[i] -= H[i * n + j] * g[j];
        }
        double slope = 0;
        for (int i = 0; i < n; ++i) slope += d[i] * g[i];
        if (slope > -1e-300) {  // not a descent direction: steepest descent restart
            reset_H();
            for (int i = 0; i < n; ++i) d[i] = act[i] ? 0.0 : -g[i];
            slope = 0;
            for (int i = 0; i < n; ++i) slope += d[i] * g[i];
            if (slope > -1e-300) break;
        }
        double step = 1.0, fnew = fx;
        bool accepted = false;
        while (step > 1e-14 && !prob.exhausted()) {
            for (int i = 0; i < n; ++i) xnew[i] = x0[i] + step * d[i];
            project(xnew, lo, hi);
            fnew = prob.eval(xnew);
            if (fnew <= fx + 1e-4 * step * slope || fnew < fx - std::abs(fx) * 1e-16) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        gradient(xnew, fnew, gnew);
        std::vector<bool> act_new = active_set(xnew, gnew, lo, hi);

        double rel_impr = (fx - fnew) / std::max({std::abs(fx), std::abs(fnew), 1e-30});
        if (act_new != act) {
            reset_H();
        } else {
            double sy = 0;
            for (int i = 0; i < n; ++i) {
                s[i] = xnew[i] - x0[i];
                y[i] = gnew[i] - g[i];
                sy += s[i] * y[i];
            }
            double sn = norm2(s), yn = norm2(y);
            if (sy > 1e-12 * sn * yn) {  // damped update: skip when curvature is unreliable
                for (int i = 0; i < n; ++i) {
                    Hy[i] = 0;
                    for (int j = 0; j < n; ++j) Hy[i] += H[i * n + j] * y[j];
                }
                double yHy = 0;
                for (int i = 0; i < n; ++i) yHy += y[i] * Hy[i];
                double c1 = (sy + yHy) / (sy * sy);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        H[i * n + j] += c1 * s[i] * s[j] - (Hy[i] * s[j] + s[i] * Hy[j]) / sy;
            }
        }
        x0 = xnew;
        fx = fnew;
        g = gnew;
        act = std::move(act_new);
        if (rel_impr >= 0 && rel_impr < opt.f_tol && pg < 1e3 * opt.grad_tol) {
            res.converged = true;
            break;
        }
    }
    res.x = std::move(x0);
    res.fx = fx;
    res.evaluations = prob.evals;
    return res;
}

void rk4_integrate(const std::function<void(double, std::span<const double>, std::span<double>)>& deriv,
                   std::vector<double>& x, double t0, double t1, double dt,
                   const std::function<void(double, std::span<double>)>& observe) {
    const int n = static_cast<int>(x.size());
    std::vector<double> k1(n), k2(n), k3(n), k4(n), xt(n);
    double t = t0;
    if (observe) observe(t, x);
    while (t < t1 - 1e-12 * std::max(1.0, std::abs(t1))) {
        double h = std::min(dt, t1 - t);
        deriv(t, x, k1);
        for (int i = 0; i < n; ++i) xt[i] = x[i] + 0.5 * h * k1[i];
        deriv(t + 0.5 * h, xt, k2);
        for (int i = 0; i < n; ++i) xt[i] = x[i] + 0.5 * h * k2[i];
        deriv(t + 0.5 * h, xt, k3);
        for (int i = 0; i < n; ++i) xt[i] = x[i] + h * k3[i];
        deriv(t + h, xt, k4);
        for (int i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        t += h;
        if (observe) observe(t, x);
    }
}

std::vector<double> halton_point(int index, int dim) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (dim > static_cast<int>(sizeof(primes) / sizeof(primes[0])))
        throw std::invalid_argument("halton_point: dimension too large");
    std::vector<double> p(dim);
    for (int d = 0; d < dim; ++d) {
        int base = primes[d];
        double f = 1.0, r = 0.0;
        int i = index + 1;
        while (i > 0) {
            f /= base;
            r += f * (i % base);
            i /= base;
        }
        p[d] = r;
    }
    return p;
}

double rms(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

double rmse(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("rmse: length mismatch");
    if (a.empty()) return 0.0;
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.size()));
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
    std::uint64_t h = 1469598103934665603ull;
    char buf[8192];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace num
