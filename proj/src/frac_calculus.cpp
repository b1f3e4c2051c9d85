#include "podfem/frac_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "podfem/kernels.hpp"

namespace podfem::frac {

namespace {

void check_mu(double mu) {
    if (!(mu > 0.0 && mu < 1.0)) throw ParameterError("half-order mu must lie in (0,1), got " + std::to_string(mu));
}

void check_hat(std::size_t j, const Grid1D& grid) {
    if (j < 1 || j > grid.interior()) {
        throw ParameterError("hat index " + std::to_string(j) + " outside 1.." + std::to_string(grid.interior()));
    }
}

inline double tpow(double base, double p) { return base > 0.0 ? std::pow(base, p) : 0.0; }

// Second difference of truncated powers; callers scale by 1/(h Γ(2-mu)).
inline double left_hat_core(double x, double xm, double x0, double xp, double nu) {
    return tpow(x - xm, nu) - 2.0 * tpow(x - x0, nu) + tpow(x - xp, nu);
}

inline double right_hat_core(double x, double xm, double x0, double xp, double nu) {
    return tpow(xp - x, nu) - 2.0 * tpow(x0 - x, nu) + tpow(xm - x, nu);
}

template <class F>
double gauss_panel(const F& f, double lo, double hi, const GaussRule& rule) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) s += rule.weights[q] * f(mid + half * rule.nodes[q]);
    return s * half;
}

// Geometric grading toward both ends of [a,b], where the truncated powers
// lose smoothness.
template <class F>
double graded_cell(const F& f, double a, double b, int levels, double ratio, const GaussRule& rule) {
    const double half = 0.5 * (b - a);
    double left = 0.0;
    double right = 0.0;
    double outer = half;
    for (int l = 0; l < levels; ++l) {
        const double inner = outer * ratio;
        left += gauss_panel(f, a + inner, a + outer, rule);
        right += gauss_panel(f, b - outer, b - inner, rule);
        outer = inner;
    }
    left += gauss_panel(f, a, a + outer, rule);
    right += gauss_panel(f, b - outer, b, rule);
    return left + right;
}

// Legendre P_n and its derivative at x.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

GaussRule build_gauss_legendre(int n) {
    GaussRule rule;
    if (n == 1) {
        rule.nodes = {0.0};
        rule.weights = {2.0};
        return rule;
    }
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

std::vector<double> gl_weights(double order, std::size_t count) {
    std::vector<double> w(count);
    w[0] = 1.0;
    for (std::size_t k = 1; k < count; ++k) w[k] = w[k - 1] * (1.0 - (order + 1.0) / static_cast<double>(k));
    return w;
}

}  // namespace

double riesz_constant(double order) {
    return 1.0 / (2.0 * std::cos(order * std::numbers::pi / 2.0));
}

FracOrder FracOrder::make(double alpha, double beta) {
    if (!(alpha > 1.0 && alpha < 2.0) || !(beta > 1.0 && beta < 2.0)) {
        throw ParameterError("fractional orders must lie in (1,2), got alpha=" + std::to_string(alpha) +
                             " beta=" + std::to_string(beta));
    }
    FracOrder o;
    o.alpha = alpha;
    o.beta = beta;
    o.c_alpha = riesz_constant(alpha);
    o.c_beta = riesz_constant(beta);
    o.mu_x = alpha / 2.0;
    o.mu_y = beta / 2.0;
    return o;
}

Grid1D::Grid1D(std::size_t n_cells) : n_cells_(n_cells), h_(0.0) {
    if (n_cells < 2) throw ParameterError("grid needs at least 2 cells (one interior node)");
    h_ = 1.0 / static_cast<double>(n_cells);
}

double left_rl_deriv_hat(std::size_t j, double mu, const Grid1D& grid, double x) {
    check_mu(mu);
    check_hat(j, grid);
    const double nu = 1.0 - mu;
    return left_hat_core(x, grid.node(j - 1), grid.node(j), grid.node(j + 1), nu) /
           (grid.h() * std::tgamma(2.0 - mu));
}

double right_rl_deriv_hat(std::size_t j, double mu, const Grid1D& grid, double x) {
    check_mu(mu);
    check_hat(j, grid);
    const double nu = 1.0 - mu;
    return right_hat_core(x, grid.node(j - 1), grid.node(j), grid.node(j + 1), nu) /
           (grid.h() * std::tgamma(2.0 - mu));
}

const GaussRule& gauss_legendre(int points) {
    if (points < 1) throw ParameterError("Gauss-Legendre rule needs at least one point");
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(points);
    if (it == cache.end()) it = cache.emplace(points, build_gauss_legendre(points)).first;
    return it->second;
}

double stiffness_offset_value(long offset, double mu, double c, const Grid1D& grid, int gauss_points,
                              int grading_levels, double grading_ratio) {
    check_mu(mu);
    const long n = static_cast<long>(grid.interior());
    const long k = offset < 0 ? -offset : offset;
    if (k >= n) throw ParameterError("Toeplitz offset out of range: " + std::to_string(offset));

    // Translation invariance: evaluate on the leftmost pair (i, j) = (1+k, 1).
    const std::size_t i = static_cast<std::size_t>(1 + k);
    const std::size_t j = 1;
    const double nu = 1.0 - mu;
    const double xi_m = grid.node(i - 1), xi_0 = grid.node(i), xi_p = grid.node(i + 1);
    const double xj_m = grid.node(j - 1), xj_0 = grid.node(j), xj_p = grid.node(j + 1);
    auto integrand = [&](double x) {
        const double li = left_hat_core(x, xi_m, xi_0, xi_p, nu);
        const double ri = right_hat_core(x, xi_m, xi_0, xi_p, nu);
        const double lj = left_hat_core(x, xj_m, xj_0, xj_p, nu);
        const double rj = right_hat_core(x, xj_m, xj_0, xj_p, nu);
        return li * rj + ri * lj;
    };

    const GaussRule& rule = gauss_legendre(gauss_points);
    double sum = 0.0;
    for (std::size_t cell = j - 1; cell <= i; ++cell) {
        sum += graded_cell(integrand, grid.node(cell), grid.node(cell + 1), grading_levels, grading_ratio, rule);
    }
    const double scale = grid.h() * std::tgamma(2.0 - mu);
    return c * sum / (scale * scale);
}

double FracStiffness1D::offset_value(long k) const {
    const long n = static_cast<long>(size());
    if (k <= -n || k >= n) throw ParameterError("Toeplitz offset out of range: " + std::to_string(k));
    return first_row_and_col[static_cast<std::size_t>(k + n - 1)];
}

double FracStiffness1D::entry(std::size_t i, std::size_t j) const {
    return offset_value(static_cast<long>(i) - static_cast<long>(j));
}

Matrix FracStiffness1D::dense() const {
    const std::size_t n = size();
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = entry(i, j);
    return s;
}

FracStiffness1D frac_stiffness_1d(double mu, double c, const Grid1D& grid, const StiffnessQuadrature& quad) {
    check_mu(mu);
    const long n = static_cast<long>(grid.interior());
    FracStiffness1D out;
    out.mu = mu;
    out.c = c;
    out.grid = grid;
    out.first_row_and_col.assign(static_cast<std::size_t>(2 * n - 1), 0.0);

    for (long k = 0; k < n; ++k) {
        int points = quad.gauss_points;
        int levels = quad.grading_levels;
        double value = stiffness_offset_value(k, mu, c, grid, points, levels, quad.grading_ratio);
        bool converged = false;
        for (int r = 0; r <= quad.max_refinements; ++r) {
            points += 10;
            levels += 8;
            const double finer = stiffness_offset_value(k, mu, c, grid, points, levels, quad.grading_ratio);
            const bool ok = std::abs(finer - value) <= quad.abs_tol;
            value = finer;
            if (ok) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw QuadratureError("stiffness quadrature did not reach tolerance at offset " + std::to_string(k), k);
        }
        out.first_row_and_col[static_cast<std::size_t>(n - 1 + k)] = value;
        out.first_row_and_col[static_cast<std::size_t>(n - 1 - k)] = value;
    }
    return out;
}

double Mass1D::entry(std::size_t i, std::size_t j) const {
    if (i == j) return diag();
    if (i + 1 == j || j + 1 == i) return off();
    return 0.0;
}

void Mass1D::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    if (x.size() != n || y.size() != n) throw ParameterError("Mass1D::apply: dimension mismatch");
    const double d = diag();
    const double o = off();
    for (std::size_t i = 0; i < n; ++i) {
        double v = d * x[i];
        if (i > 0) v += o * x[i - 1];
        if (i + 1 < n) v += o * x[i + 1];
        y[i] = v;
    }
}

Matrix Mass1D::dense() const {
    const std::size_t n = size();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = entry(i, j);
    return m;
}

Mass1D mass_1d(const Grid1D& grid) { return Mass1D{grid}; }

std::vector<double> gl_frac_deriv(std::span<const double> samples, double order, double step, Side side) {
    const std::size_t n = samples.size();
    if (n < 3) throw ParameterError("gl_frac_deriv needs at least 3 samples");
    if (!(order > 0.0 && order <= 2.0)) throw ParameterError("gl_frac_deriv order must lie in (0,2]");
    if (!(step > 0.0)) throw ParameterError("gl_frac_deriv step must be positive");

    const std::vector<double> w = gl_weights(order, n + 1);
    const double scale = std::pow(step, -order);
    const auto& k = kernels::active();
    std::vector<double> out(n);

    if (side == Side::left) {
        // out[i] = Σ_{s <= i+1} w_{i+1-s} u_s
        std::vector<double> rev(n + 1);
        for (std::size_t t = 0; t <= n; ++t) rev[t] = w[n - t];
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t count = std::min(i + 2, n);
            out[i] = scale * k.dot(samples.data(), rev.data() + (n - i - 1), count);
        }
    } else {
        // out[i] = Σ_{s >= i-1} w_{s-i+1} u_s
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t s0 = i == 0 ? 0 : i - 1;
            out[i] = scale * k.dot(samples.data() + s0, w.data() + (s0 + 1 - i), n - s0);
        }
    }
    return out;
}

std::vector<double> riesz_of_samples(std::span<const double> samples, double order, double step) {
    std::vector<double> left = gl_frac_deriv(samples, order, step, Side::left);
    const std::vector<double> right = gl_frac_deriv(samples, order, step, Side::right);
    const double weight = -riesz_constant(order);
    for (std::size_t i = 0; i < left.size(); ++i) left[i] = weight * (left[i] + right[i]);
    return left;
}

double trapezoid_inner(std::span<const double> a, std::span<const double> b, double step) {
    if (a.size() != b.size() || a.size() < 2) throw ParameterError("trapezoid_inner: bad sample vectors");
    double s = 0.5 * (a.front() * b.front() + a.back() * b.back());
    for (std::size_t i = 1; i + 1 < a.size(); ++i) s += a[i] * b[i];
    return s * step;
}

double adjoint_identity_residual(std::span<const double> u, std::span<const double> v, double mu, double step) {
    if (!(mu > 0.5 && mu < 1.0)) throw ParameterError("adjoint identity needs mu in (1/2,1)");
    if (u.size() != v.size()) throw ParameterError("adjoint identity: sample size mismatch");
    const auto full = gl_frac_deriv(u, 2.0 * mu, step, Side::left);
    const auto half_u = gl_frac_deriv(u, mu, step, Side::left);
    const auto half_v = gl_frac_deriv(v, mu, step, Side::right);
    return std::abs(trapezoid_inner(full, v, step) - trapezoid_inner(half_u, half_v, step));
}

}  // namespace podfem::frac
