#pragma once

// Independent reference computations for the unit and acceptance tests.
// Nothing here calls into the library's quadrature or hat-derivative code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive Simpson on [a,b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-14,
                               int max_depth = 40) {
    if (b <= a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Adaptive Simpson over consecutive breakpoints.
inline double piecewise_simpson(const std::function<double(double)>& f, std::vector<double> breaks,
                                double tol = 1e-14) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) s += adaptive_simpson(f, breaks[i], breaks[i + 1], tol);
    return s;
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton on the three-term recurrence.
inline std::pair<std::vector<double>, std::vector<double>> gauss(int n) {
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

// Composite rule on [a,b] graded geometrically toward both ends; suited to
// integrands with power-law kinks at the endpoints.
inline std::vector<std::pair<double, double>> graded_rule(double a, double b, int levels = 30, double ratio = 0.1,
                                                          int points = 12) {
    static const auto g = gauss(points);
    std::vector<double> cuts{0.5};
    double r = 0.5;
    for (int l = 0; l < levels; ++l) {
        r *= ratio;
        cuts.push_back(r);
    }
    cuts.push_back(0.0);
    std::vector<std::pair<double, double>> rule;
    auto add = [&](double lo, double hi) {
        for (int k = 0; k < points; ++k) {
            double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * g.first[k];
            rule.emplace_back(a + (b - a) * t, 0.5 * (hi - lo) * (b - a) * g.second[k]);
        }
    };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        add(cuts[i + 1], cuts[i]);
        add(1.0 - cuts[i], 1.0 - cuts[i + 1]);
    }
    return rule;
}

inline double hat(double x, double center, double h) {
    double d = std::abs(x - center) / h;
    return d < 1.0 ? 1.0 - d : 0.0;
}

// RL integral of a hat by the substitution s = (x-ξ)^{1-μ} (left) or
// s = (ξ-x)^{1-μ} (right), which removes the weak singularity, then a
// five-point derivative. Valid for x at least ~1e-2 away from grid nodes.
inline double rl_deriv_hat(int j, double mu, double h, double x, bool left) {
    const double center = j * h;
    const double p = 1.0 / (1.0 - mu);
    auto integral = [&](double xx) {
        const double reach = left ? xx : 1.0 - xx;
        const double top = std::pow(reach, 1.0 - mu);
        std::vector<double> br{0.0};
        for (int k = j - 1; k <= j + 1; ++k) {
            double dist = left ? xx - k * h : k * h - xx;
            if (dist > 0.0 && dist < reach) br.push_back(std::pow(dist, 1.0 - mu));
        }
        br.push_back(top);
        std::sort(br.begin(), br.end());
        auto f = [&](double s) {
            double xi = left ? xx - std::pow(s, p) : xx + std::pow(s, p);
            return hat(xi, center, h);
        };
        return piecewise_simpson(f, br, 1e-15) / (1.0 - mu);
    };
    const double d = 2e-4;
    double deriv = (-integral(x + 2 * d) + 8 * integral(x + d) - 8 * integral(x - d) + integral(x - 2 * d)) / (12 * d);
    double v = deriv / std::tgamma(1.0 - mu);
    return left ? v : -v;
}

// Exact value of C[(L_i,R_j) + (R_i,L_j)] for interior hats i, j (1-based)
// from ∫(x-a)₊^ν (b-x)₊^ν dx = (b-a)₊^{2ν+1} B(ν+1, ν+1).
inline double stiffness_entry_beta(int i, int j, double mu, double c, double h) {
    const double nu = 1.0 - mu;
    const double beta = std::tgamma(nu + 1) * std::tgamma(nu + 1) / std::tgamma(2 * nu + 2);
    const double coef[3] = {1.0, -2.0, 1.0};
    auto pair = [&](int a_node, int b_node) {
        double s = 0.0;
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) {
                double gap = ((b_node - 1 + q) - (a_node - 1 + p)) * h;
                if (gap > 0.0) s += coef[p] * coef[q] * std::pow(gap, 2 * nu + 1);
            }
        return s * beta;
    };
    const double g = h * std::tgamma(2.0 - mu);
    return c * (pair(i, j) + pair(j, i)) / (g * g);
}

// Truncated-power form of the left/right RL derivative of hat j.
inline double hat_deriv(int j, double mu, double h, double x, bool left) {
    const double nu = 1.0 - mu;
    const double c[3] = {1.0, -2.0, 1.0};
    double s = 0.0;
    for (int p = 0; p < 3; ++p) {
        double d = left ? x - (j - 1 + p) * h : (j - 1 + p) * h - x;
        if (d > 0.0) s += c[p] * std::pow(d, nu);
    }
    return s / (h * std::tgamma(2.0 - mu));
}

// Dense 2-D stiffness on an n x n interior grid by tensor quadrature of the
// full bilinear form over the unit square; no Kronecker factorization used.
inline std::vector<std::vector<double>> brute_force_stiffness(double alpha, double beta, int cells) {
    const double h = 1.0 / cells;
    const int n = cells - 1;
    const double mux = alpha / 2, muy = beta / 2;
    const double cx = 1.0 / (2.0 * std::cos(alpha * std::numbers::pi / 2));
    const double cy = 1.0 / (2.0 * std::cos(beta * std::numbers::pi / 2));

    std::vector<std::pair<double, double>> rule;
    for (int k = 0; k < cells; ++k) {
        auto r = graded_rule(k * h, (k + 1) * h, 36, 0.5, 10);
        rule.insert(rule.end(), r.begin(), r.end());
    }
    const std::size_t q = rule.size();
    // Per-point values: hat, left and right derivative in x and in y.
    std::vector<std::vector<double>> phi(n, std::vector<double>(q)), lx = phi, rx = phi, ly = phi, ry = phi;
    for (int j = 0; j < n; ++j)
        for (std::size_t k = 0; k < q; ++k) {
            const double z = rule[k].first;
            phi[j][k] = hat(z, (j + 1) * h, h);
            lx[j][k] = hat_deriv(j + 1, mux, h, z, true);
            rx[j][k] = hat_deriv(j + 1, mux, h, z, false);
            ly[j][k] = hat_deriv(j + 1, muy, h, z, true);
            ry[j][k] = hat_deriv(j + 1, muy, h, z, false);
        }

    const int m = n * n;
    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i)
        for (int jj = i; jj < m; ++jj) {
            const int p = i % n, qy = i / n, pp = jj % n, qq = jj / n;
            double s = 0.0;
            for (std::size_t ky = 0; ky < q; ++ky) {
                const double wy = rule[ky].second;
                const double u_y = phi[qy][ky], v_y = phi[qq][ky];
                const double uly = ly[qy][ky], ury = ry[qy][ky], vly = ly[qq][ky], vry = ry[qq][ky];
                double row = 0.0;
                for (std::size_t kx = 0; kx < q; ++kx) {
                    const double u_x = phi[p][kx], v_x = phi[pp][kx];
                    const double dx = lx[p][kx] * u_y * rx[pp][kx] * v_y + rx[p][kx] * u_y * lx[pp][kx] * v_y;
                    const double dy = u_x * uly * v_x * vry + u_x * ury * v_x * vly;
                    row += rule[kx].second * (cx * dx + cy * dy);
                }
                s += wy * row;
            }
            a[i][jj] = a[jj][i] = s;
        }
    return a;
}

// Left/right RL derivative of order 1 < order < 2 of a smooth profile on
// [0,1] (zero outside): second derivative of the fractional integral of
// order 2 - order, with the substitution w = (x-ξ)^{2-order}.
inline double rl_deriv2(const std::function<double(double)>& s, double order, double x, bool left) {
    const double q = 2.0 - order;
    auto integral = [&](double xx) {
        const double reach = left ? xx : 1.0 - xx;
        auto f = [&](double w) {
            const double off = std::pow(w, 1.0 / q);
            return s(left ? xx - off : xx + off);
        };
        return adaptive_simpson(f, 0.0, std::pow(reach, q), 1e-15) / q;
    };
    const double d = 1e-3;
    const double second = (-integral(x + 2 * d) + 16 * integral(x + d) - 30 * integral(x) + 16 * integral(x - d) -
                           integral(x - 2 * d)) /
                          (12 * d * d);
    return second / std::tgamma(q);
}

}  // namespace oracle
