#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "podfem/error.hpp"
#include "podfem/frac_calculus.hpp"

using namespace podfem;
using namespace podfem::frac;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sample(double (*f)(double), std::size_t intervals) {
    std::vector<double> s(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) s[i] = f(static_cast<double>(i) / intervals);
    return s;
}

double bump(double x) { return x * x * (1 - x) * (1 - x); }

Matrix classical_stiffness(const Grid1D& g) {
    const std::size_t n = g.interior();
    Matrix k(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        k(i, i) = 2.0 / g.h();
        if (i + 1 < n) k(i, i + 1) = k(i + 1, i) = -1.0 / g.h();
    }
    return k;
}

}  // namespace

// ---------------------------------------------------------------------------
// Orders and grids

TEST(FracOrder, RieszConstantIsNegativeOnOpenInterval) {
    for (double a : {1.01, 1.3, 1.5, 1.8, 1.99}) EXPECT_LT(riesz_constant(a), 0.0);
    EXPECT_NEAR(riesz_constant(1.5), 1.0 / (2.0 * std::cos(0.75 * kPi)), 1e-15);
}

TEST(FracOrder, MakeRejectsOutOfRange) {
    EXPECT_THROW(FracOrder::make(1.0, 1.5), ParameterError);
    EXPECT_THROW(FracOrder::make(1.5, 2.0), ParameterError);
    auto o = FracOrder::make(1.5, 1.6);
    EXPECT_DOUBLE_EQ(o.mu_x, 0.75);
    EXPECT_DOUBLE_EQ(o.mu_y, 0.8);
    EXPECT_DOUBLE_EQ(o.gamma(), 1.6);
}

TEST(Grid1D, RejectsTooFewCells) { EXPECT_THROW(Grid1D{1}, ParameterError); }

// ---------------------------------------------------------------------------
// Hat derivatives

TEST(HatDerivative, VanishesOutsideSupport) {
    Grid1D g(4);
    EXPECT_EQ(left_rl_deriv_hat(1, 0.75, g, 0.0), 0.0);
    EXPECT_EQ(right_rl_deriv_hat(3, 0.75, g, 1.0), 0.0);
    EXPECT_EQ(right_rl_deriv_hat(1, 0.6, g, 1.0), 0.0);
}

TEST(HatDerivative, NearClassicalOrderGivesSlope) {
    Grid1D g(4);
    EXPECT_NEAR(left_rl_deriv_hat(1, 0.99999, g, 0.1), 4.0, 1e-3);
    EXPECT_NEAR(right_rl_deriv_hat(1, 0.99999, g, 0.1), -4.0, 1e-3);
}

TEST(HatDerivative, LeftMatchesIntegralOracle) {
    Grid1D g(4);
    EXPECT_NEAR(left_rl_deriv_hat(1, 0.75, g, 0.6), oracle::rl_deriv_hat(1, 0.75, 0.25, 0.6, true), 1e-8);
}

TEST(HatDerivative, RightMatchesIntegralOracle) {
    Grid1D g(4);
    EXPECT_NEAR(right_rl_deriv_hat(2, 0.8, g, 0.3), oracle::rl_deriv_hat(2, 0.8, 0.25, 0.3, false), 1e-8);
}

TEST(HatDerivative, RandomTriplesMatchOracle) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> mu_dist(0.52, 0.97), x_dist(0.0, 1.0);
    int checked = 0;
    while (checked < 20) {
        const std::size_t cells = (rng() % 2) ? 4 : 8;
        Grid1D g(cells);
        const std::size_t j = 1 + rng() % g.interior();
        const double mu = mu_dist(rng);
        const double x = x_dist(rng);
        const double frac_pos = x / g.h() - std::round(x / g.h());
        if (std::abs(frac_pos) * g.h() < 0.02 || x < 0.02 || x > 0.98) continue;
        const bool left = checked % 2 == 0;
        const double got = left ? left_rl_deriv_hat(j, mu, g, x) : right_rl_deriv_hat(j, mu, g, x);
        const double want = oracle::rl_deriv_hat(static_cast<int>(j), mu, g.h(), x, left);
        EXPECT_NEAR(got, want, 1e-8) << "j=" << j << " mu=" << mu << " x=" << x << " left=" << left;
        ++checked;
    }
}

TEST(HatDerivative, ReflectionIdentity) {
    Grid1D g(8);
    const std::size_t n = g.interior();
    for (std::size_t j = 1; j <= n; ++j)
        for (double mu : {0.55, 0.75, 0.9})
            for (int s = 0; s <= 40; ++s) {
                const double x = s / 40.0;
                EXPECT_NEAR(right_rl_deriv_hat(j, mu, g, x), left_rl_deriv_hat(n + 1 - j, mu, g, 1.0 - x), 1e-12);
            }
}

TEST(HatDerivative, RejectsBadArguments) {
    Grid1D g(4);
    EXPECT_THROW(left_rl_deriv_hat(0, 0.5, g, 0.3), ParameterError);
    EXPECT_THROW(left_rl_deriv_hat(4, 0.5, g, 0.3), ParameterError);
    EXPECT_THROW(right_rl_deriv_hat(1, 1.0, g, 0.3), ParameterError);
    EXPECT_THROW(right_rl_deriv_hat(1, 0.0, g, 0.3), ParameterError);
}

// ---------------------------------------------------------------------------
// Stiffness

TEST(FracStiffness, ToeplitzAndSymmetric) {
    Grid1D g(10);
    auto s = frac_stiffness_1d(0.75, riesz_constant(1.5), g);
    const long n = static_cast<long>(s.size());
    for (long k = 1; k < n; ++k) EXPECT_EQ(s.offset_value(k), s.offset_value(-k));
    Matrix d = s.dense();
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            EXPECT_EQ(d(i, j), d(j, i));
            EXPECT_EQ(d(i, j), s.offset_value(i - j));
        }
}

TEST(FracStiffness, PositiveDefinite) {
    for (double alpha : {1.1, 1.5, 1.6, 1.9}) {
        for (std::size_t cells : {2, 3, 8, 17}) {
            Grid1D g(cells);
            auto s = frac_stiffness_1d(alpha / 2, riesz_constant(alpha), g);
            EXPECT_NO_THROW(Cholesky{s.dense()}) << alpha << " " << cells;
        }
    }
}

TEST(FracStiffness, MatchesBetaFunctionClosedForm) {
    for (double alpha : {1.2, 1.5, 1.6, 1.9}) {
        Grid1D g(8);
        const double mu = alpha / 2, c = riesz_constant(alpha);
        auto s = frac_stiffness_1d(mu, c, g);
        for (int i = 1; i <= 7; ++i)
            for (int j = 1; j <= 7; ++j)
                EXPECT_NEAR(s.entry(i - 1, j - 1), oracle::stiffness_entry_beta(i, j, mu, c, g.h()), 1e-10)
                    << alpha << " " << i << " " << j;
    }
}

TEST(FracStiffness, DiagonalAgreesWithFinerQuadrature) {
    Grid1D g(4);
    const double mu = 0.75, c = riesz_constant(1.5);
    auto s = frac_stiffness_1d(mu, c, g);
    const double fine = stiffness_offset_value(0, mu, c, g, 40, 48, 0.15);
    EXPECT_NEAR(s.offset_value(0), fine, 1e-8);
}

TEST(FracStiffness, ClassicalLimit) {
    Grid1D g(8);
    const double alpha = 1.999;
    auto s = frac_stiffness_1d(alpha / 2, riesz_constant(alpha), g);
    Matrix frac = s.dense(), classical = classical_stiffness(g);
    for (std::size_t i = 0; i < frac.rows(); ++i)
        for (std::size_t j = 0; j < frac.cols(); ++j)
            if (classical(i, j) != 0.0) EXPECT_NEAR(frac(i, j), classical(i, j), 0.01 * std::abs(classical(i, j)));
    Matrix diff = frac;
    for (std::size_t i = 0; i < diff.rows(); ++i)
        for (std::size_t j = 0; j < diff.cols(); ++j) diff(i, j) -= classical(i, j);
    EXPECT_LE(frobenius_norm(diff) / frobenius_norm(classical), 1e-2);
}

TEST(FracStiffness, TooSmallBudgetReportsOffset) {
    Grid1D g(6);
    StiffnessQuadrature q;
    q.gauss_points = 2;
    q.grading_levels = 1;
    q.max_refinements = 0;
    q.abs_tol = 1e-15;
    try {
        frac_stiffness_1d(0.95, riesz_constant(1.9), g, q);
        FAIL() << "expected QuadratureError";
    } catch (const QuadratureError& e) {
        EXPECT_GE(e.offset(), 0);
        EXPECT_LT(e.offset(), 5);
    }
}

// ---------------------------------------------------------------------------
// Mass

TEST(Mass1D, SingleInteriorNode) {
    auto m = mass_1d(Grid1D(2)).dense();
    ASSERT_EQ(m.rows(), 1u);
    EXPECT_DOUBLE_EQ(m(0, 0), 1.0 / 3.0);
}

TEST(Mass1D, QuadraticFormMatchesQuadrature) {
    Grid1D g(4);
    auto m = mass_1d(g);
    const std::vector<double> v{0.3, -1.2, 0.7};
    Vector mv(3);
    m.apply(v, mv);
    const double form = v[0] * mv[0] + v[1] * mv[1] + v[2] * mv[2];
    auto uh = [&](double x) {
        double s = 0.0;
        for (int j = 1; j <= 3; ++j) s += v[j - 1] * oracle::hat(x, j * 0.25, 0.25);
        return s * s;
    };
    EXPECT_NEAR(form, oracle::piecewise_simpson(uh, {0, 0.25, 0.5, 0.75, 1.0}), 1e-12);
    EXPECT_LT(max_abs_diff(m.dense(), m.dense().transposed()), 1e-300);
}

// ---------------------------------------------------------------------------
// Grünwald-Letnikov

TEST(GrunwaldLetnikov, ZeroInZeroOut) {
    std::vector<double> z(50, 0.0);
    for (auto side : {Side::left, Side::right})
        for (double v : gl_frac_deriv(z, 1.5, 0.02, side)) EXPECT_EQ(v, 0.0);
}

TEST(GrunwaldLetnikov, SecondOrderIsSecondDerivative) {
    const std::size_t n = 1000;
    auto s = sample([](double x) { return std::sin(kPi * x); }, n);
    auto d = gl_frac_deriv(s, 2.0, 1.0 / n, Side::left);
    for (std::size_t i = 1; i < n; i += 37) {
        const double x = static_cast<double>(i) / n;
        EXPECT_NEAR(d[i], -kPi * kPi * std::sin(kPi * x), 1e-4);
    }
}

TEST(GrunwaldLetnikov, FirstOrderSelfConvergence) {
    // Values at x = 1/4, 1/2, 3/4 for steps 1/64, 1/128, 1/256.
    std::vector<std::vector<double>> at;
    for (std::size_t n : {64, 128, 256}) {
        auto d = gl_frac_deriv(sample(bump, n), 1.5, 1.0 / n, Side::left);
        at.push_back({d[n / 4], d[n / 2], d[3 * n / 4]});
    }
    for (int k = 0; k < 3; ++k) {
        const double e1 = std::abs(at[0][k] - at[1][k]);
        const double e2 = std::abs(at[1][k] - at[2][k]);
        EXPECT_NEAR(e1 / e2, 2.0, 0.25) << k;
    }
}

TEST(GrunwaldLetnikov, RightIsMirrorOfLeft) {
    const std::size_t n = 200;
    auto s = sample([](double x) { return x * x * (1 - x) * (2 - x); }, n);
    std::vector<double> r(s.rbegin(), s.rend());
    auto left = gl_frac_deriv(s, 1.3, 1.0 / n, Side::left);
    auto right = gl_frac_deriv(r, 1.3, 1.0 / n, Side::right);
    for (std::size_t i = 0; i <= n; ++i) EXPECT_NEAR(left[i], right[n - i], 1e-9);
}

TEST(GrunwaldLetnikov, RejectsTooFewSamples) {
    std::vector<double> two{0.0, 1.0};
    EXPECT_THROW(gl_frac_deriv(two, 1.5, 0.1, Side::left), ParameterError);
    std::vector<double> three{0.0, 1.0, 0.0};
    EXPECT_THROW(gl_frac_deriv(three, 2.5, 0.1, Side::left), ParameterError);
    EXPECT_THROW(gl_frac_deriv(three, 1.5, 0.0, Side::left), ParameterError);
}

TEST(GrunwaldLetnikov, RieszCombination) {
    const std::size_t n = 100;
    auto s = sample(bump, n);
    auto l = gl_frac_deriv(s, 1.5, 0.01, Side::left), r = gl_frac_deriv(s, 1.5, 0.01, Side::right);
    auto rz = riesz_of_samples(s, 1.5, 0.01);
    const double w = -1.0 / (2.0 * std::cos(0.75 * kPi));
    for (std::size_t i = 0; i <= n; ++i) EXPECT_NEAR(rz[i], w * (l[i] + r[i]), 1e-12);
}

// ---------------------------------------------------------------------------
// Adjoint identity

TEST(AdjointIdentity, ZeroFunctions) {
    std::vector<double> z(65, 0.0);
    EXPECT_EQ(adjoint_identity_residual(z, z, 0.75, 1.0 / 64), 0.0);
}

TEST(AdjointIdentity, ResidualShrinksUnderRefinement) {
    std::vector<double> res;
    for (std::size_t n : {128, 256, 512}) {
        auto u = sample(bump, n);
        res.push_back(adjoint_identity_residual(u, u, 0.75, 1.0 / n));
    }
    EXPECT_LT(res[1], res[0]);
    EXPECT_LT(res[2], res[1]);
}

TEST(AdjointIdentity, CosineIdentityGapShrinks) {
    const double mu = 0.75;
    std::vector<double> gap;
    for (std::size_t n : {128, 256, 512}) {
        auto u = sample(bump, n);
        const double h = 1.0 / n;
        auto l = gl_frac_deriv(u, mu, h, Side::left), r = gl_frac_deriv(u, mu, h, Side::right);
        const double lhs = trapezoid_inner(l, r, h);
        const double rhs = std::cos(mu * kPi) * trapezoid_inner(l, l, h);
        gap.push_back(std::abs(lhs - rhs) / std::abs(rhs));
    }
    EXPECT_LT(gap[1], gap[0]);
    EXPECT_LT(gap[2], gap[1]);
    EXPECT_LT(gap[2], 0.05);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    for (int n : {1, 2, 5, 20}) {
        const auto& r = gauss_legendre(n);
        for (int deg = 0; deg < 2 * n; ++deg) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += r.weights[k] * std::pow(r.nodes[k], deg);
            const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            EXPECT_NEAR(s, exact, 1e-13) << n << " " << deg;
        }
    }
}
