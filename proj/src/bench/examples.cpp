#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "podfem/bench.hpp"
#include "podfem/error.hpp"

namespace podfem::bench {

namespace {

using std::numbers::pi;

const double kAmplitude = 4.0 * std::cos(1.5 * pi / 2.0) * std::cos(1.6 * pi / 2.0);
constexpr double kWidth = 0.04;

// u = amplitude(t) * shape(x, t) * shape(y, t)
double amplitude(Example ex, double t) {
    switch (ex) {
        case Example::zero: return 0.0;
        case Example::one: return kAmplitude * std::exp(-t);
        case Example::two: return 1e3 * kAmplitude;
    }
    return 0.0;
}

double shape(Example ex, double z, double t) {
    switch (ex) {
        case Example::zero: return 0.0;
        case Example::one: {
            const double s = std::sin(2.0 * pi * z);
            return s * s;
        }
        case Example::two: {
            const double p = z * (z - 1.0);
            return std::exp(-(z - t) * (z - t) / kWidth) * p * p;
        }
    }
    return 0.0;
}

}  // namespace

Example parse_example(const std::string& text) {
    if (text == "0" || text == "zero" || text == "custom") return Example::zero;
    if (text == "1") return Example::one;
    if (text == "2") return Example::two;
    throw ConfigError("unknown example '" + text + "' (expected 1, 2 or custom)");
}

double exact_solution_1(double x, double y, double t) {
    return exact_solution(Example::one, x, y, t);
}

double exact_solution_2(double x, double y, double t) {
    return exact_solution(Example::two, x, y, t);
}

double exact_solution(Example ex, double x, double y, double t) {
    return amplitude(ex, t) * shape(ex, x, t) * shape(ex, y, t);
}

double exact_time_derivative(Example ex, double x, double y, double t) {
    switch (ex) {
        case Example::zero: return 0.0;
        case Example::one: return -exact_solution(ex, x, y, t);
        case Example::two: return exact_solution(ex, x, y, t) * 2.0 * ((x - t) + (y - t)) / kWidth;
    }
    return 0.0;
}

ManufacturedSource::ManufacturedSource(Example ex, const frac::FracOrder& order, std::size_t fine_intervals)
    : ex_(ex), order_(order), fine_intervals_(fine_intervals) {
    if (fine_intervals < 2) throw ConfigError("manufactured source needs at least 2 fine intervals");
}

std::vector<double> ManufacturedSource::riesz_line(double order, double t) const {
    const std::size_t p = fine_intervals_;
    auto sample = [&](std::size_t intervals) {
        std::vector<double> s(intervals + 1);
        for (std::size_t i = 0; i <= intervals; ++i)
            s[i] = shape(ex_, static_cast<double>(i) / static_cast<double>(intervals), t);
        return s;
    };
    const std::vector<double> coarse = frac::riesz_of_samples(sample(p), order, 1.0 / static_cast<double>(p));
    const std::vector<double> fine = frac::riesz_of_samples(sample(2 * p), order, 0.5 / static_cast<double>(p));

    double gap = 0.0;
    double size = 0.0;
    std::vector<double> out(p + 1);
    for (std::size_t i = 0; i <= p; ++i) {
        const double diff = fine[2 * i] - coarse[i];
        gap += diff * diff;
        size += fine[2 * i] * fine[2 * i];
        out[i] = 2.0 * fine[2 * i] - coarse[i];
    }
    const double rel = size > 0.0 ? std::sqrt(gap / size) : 0.0;
    worst_gap_ = std::max(worst_gap_, rel);
    if (rel > 0.01) {
        throw ConfigError("manufactured source self-convergence gap " + std::to_string(rel) +
                          " exceeds 1%; increase the refinement factor");
    }
    return out;
}

ManufacturedSource::Profile ManufacturedSource::compute(double t) const {
    Profile prof;
    prof.t = t;
    if (ex_ == Example::zero) return prof;
    prof.riesz_x = riesz_line(order_.alpha, t);
    prof.riesz_y = order_.beta == order_.alpha ? prof.riesz_x : riesz_line(order_.beta, t);
    return prof;
}

double ManufacturedSource::interp(const std::vector<double>& table, double z) const {
    const double s = std::clamp(z, 0.0, 1.0) * static_cast<double>(fine_intervals_);
    const std::size_t i = std::min(static_cast<std::size_t>(s), fine_intervals_ - 1);
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * table[i] + w * table[i + 1];
}

double ManufacturedSource::operator()(double x, double y, double t) const {
    if (ex_ == Example::zero) return 0.0;
    std::lock_guard lock(mutex_);
    // Example 1 has time-independent shapes, so one profile serves every t.
    const bool reuse = cache_ && (ex_ == Example::one || cache_->t == t);
    if (!reuse) cache_ = compute(t);
    const double a = amplitude(ex_, t);
    const double riesz = a * (interp(cache_->riesz_x, x) * shape(ex_, y, t) + shape(ex_, x, t) * interp(cache_->riesz_y, y));
    return exact_time_derivative(ex_, x, y, t) - riesz;
}

fem::TimeField ManufacturedSource::field() const {
    return [this](double x, double y, double t) { return (*this)(x, y, t); };
}

double ManufacturedSource::worst_self_convergence_gap() const {
    std::lock_guard lock(mutex_);
    return worst_gap_;
}

std::shared_ptr<ManufacturedSource> manufactured_source(Example ex, const frac::FracOrder& order,
                                                        const fem::TensorMesh& mesh, std::size_t refinement_factor) {
    if (refinement_factor < kMinRefinement) {
        throw ConfigError("refinement factor must be at least " + std::to_string(kMinRefinement));
    }
    const std::size_t cells = std::max(mesh.grid_x().n_cells(), mesh.grid_y().n_cells());
    return std::make_shared<ManufacturedSource>(ex, order, cells * refinement_factor);
}

}  // namespace podfem::bench
