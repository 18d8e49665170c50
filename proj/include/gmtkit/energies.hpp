#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "gmtkit/grassmann.hpp"
#include "gmtkit/measure.hpp"
#include "gmtkit/parallel.hpp"

namespace gmtkit {

struct EnergyReport {
    double value = 0.0;
    double eps = 0.0;
    std::int64_t count = 0;  // admissible ordered pairs / triples
    double seconds = 0.0;
};

inline void to_json(json& j, const EnergyReport& r) {
    j = json{{"value", r.value}, {"eps", r.eps}, {"count", r.count}, {"seconds", r.seconds}};
}

namespace detail {

class StopWatch {
public:
    StopWatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// 1/R for the circle through three planar points: 4 Area / (|xy| |yz| |xz|).
// Collinear and coincident configurations return 0; coincident points are
// excluded upstream by the eps truncation anyway.
inline double inverse_circumradius(const Eigen::Vector2d& x, const Eigen::Vector2d& y,
                                   const Eigen::Vector2d& z) {
    const Eigen::Vector2d u = y - x, v = z - x;
    const double twice_area = std::abs(u.x() * v.y() - u.y() * v.x());
    if (twice_area < 2e-300) return 0.0;
    const double a = u.norm(), b = v.norm(), c = (z - y).norm();
    if (a == 0.0 || b == 0.0 || c == 0.0) return 0.0;
    return 2.0 * twice_area / (a * b * c);
}

// eps-truncated Menger curvature c^2_eps(mu): sum over ordered triples of
// distinct indices with all three pairwise distances > eps. Computed over
// unordered triples and scaled by 6.
inline EnergyReport curvature(const DiscreteMeasure& mu, double eps) {
    if (mu.dim != 2) throw std::invalid_argument("curvature: planar measures only");
    if (eps <= 0.0) throw std::invalid_argument("curvature: eps must be positive");
    detail::StopWatch watch;
    const std::size_t n = mu.size();
    const double eps2 = eps * eps;
    std::vector<std::int64_t> counts((n + kSumBlock - 1) / kSumBlock, 0);
    const double value = 6.0 * deterministic_sum(n, [&](std::size_t i) {
        const Eigen::Vector2d xi = mu.point(i);
        const double wi = mu.weights[i];
        double acc = 0.0;
        std::int64_t local = 0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const Eigen::Vector2d xj = mu.point(j);
            if ((xj - xi).squaredNorm() <= eps2) continue;
            const double wij = wi * mu.weights[j];
            for (std::size_t k = j + 1; k < n; ++k) {
                const Eigen::Vector2d xk = mu.point(k);
                if ((xk - xi).squaredNorm() <= eps2 || (xk - xj).squaredNorm() <= eps2) continue;
                const double inv_r = inverse_circumradius(xi, xj, xk);
                acc += wij * mu.weights[k] * inv_r * inv_r;
                ++local;
            }
        }
        counts[i / kSumBlock] += local;
        return acc;
    });
    EnergyReport rep;
    rep.value = value;
    rep.eps = eps;
    for (const auto c : counts) rep.count += c;
    rep.count *= 6;
    rep.seconds = watch.seconds();
    return rep;
}

// ||C_eps mu||^2_{L^2(mu)} with the Cauchy kernel 1/(z - w).
inline EnergyReport cauchy_energy(const DiscreteMeasure& mu, double eps) {
    if (mu.dim != 2) throw std::invalid_argument("cauchy_energy: planar measures only");
    if (eps <= 0.0) throw std::invalid_argument("cauchy_energy: eps must be positive");
    detail::StopWatch watch;
    const std::size_t n = mu.size();
    const double eps2 = eps * eps;
    std::vector<std::int64_t> counts((n + kSumBlock - 1) / kSumBlock, 0);
    const double value = deterministic_sum(n, [&](std::size_t i) {
        const std::complex<double> zi(mu.coords[2 * i], mu.coords[2 * i + 1]);
        std::complex<double> inner(0.0, 0.0);
        std::int64_t local = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const std::complex<double> zj(mu.coords[2 * j], mu.coords[2 * j + 1]);
            const std::complex<double> diff = zi - zj;
            if (std::norm(diff) <= eps2) continue;
            inner += mu.weights[j] / diff;
            ++local;
        }
        counts[i / kSumBlock] += local;
        return mu.weights[i] * std::norm(inner);
    });
    EnergyReport rep;
    rep.value = value;
    rep.eps = eps;
    for (const auto c : counts) rep.count += c;
    rep.seconds = watch.seconds();
    return rep;
}

// ||C_eps mu||^2 - c^2_eps(mu)/6, reported next to the growth constant at
// resolution eps. The comparison bound |residual| <= K c0^2 ||mu|| carries a
// suite-calibrated K; this just measures.
struct MelnikovReport {
    double residual = 0.0;
    double cauchy = 0.0;
    double curvature_sixth = 0.0;
    double growth_c0 = 0.0;
    double mass = 0.0;
    double eps = 0.0;
};

inline void to_json(json& j, const MelnikovReport& r) {
    j = json{{"residual", r.residual},       {"cauchy", r.cauchy},
             {"curvature_sixth", r.curvature_sixth}, {"growth_c0", r.growth_c0},
             {"mass", r.mass},               {"eps", r.eps}};
}

inline MelnikovReport melnikov_residual(const DiscreteMeasure& mu, double eps) {
    MelnikovReport rep;
    rep.eps = eps;
    rep.cauchy = cauchy_energy(mu, eps).value;
    rep.curvature_sixth = curvature(mu, eps).value / 6.0;
    rep.residual = rep.cauchy - rep.curvature_sixth;
    rep.mass = total_mass(mu);
    rep.growth_c0 = mu.size() > 0 ? growth_constant(mu, 1, eps) : 0.0;
    return rep;
}

// ||R^n_eps mu||^2_{L^2(mu)} with the vector kernel (x-y)/|x-y|^{n+1}.
inline EnergyReport riesz_energy(const DiscreteMeasure& mu, int n, double eps) {
    if (n <= 0 || n >= mu.dim) throw std::invalid_argument("riesz_energy: need 0 < n < d");
    if (eps <= 0.0) throw std::invalid_argument("riesz_energy: eps must be positive");
    detail::StopWatch watch;
    const std::size_t count = mu.size();
    const double eps2 = eps * eps;
    std::vector<std::int64_t> counts((count + kSumBlock - 1) / kSumBlock, 0);
    const double value = deterministic_sum(count, [&](std::size_t i) {
        const Eigen::VectorXd xi = mu.point(i);
        Eigen::VectorXd inner = Eigen::VectorXd::Zero(mu.dim);
        std::int64_t local = 0;
        for (std::size_t j = 0; j < count; ++j) {
            const Eigen::VectorXd diff = xi - mu.point(j);
            const double d2 = diff.squaredNorm();
            if (d2 <= eps2) continue;
            inner += mu.weights[j] * diff / std::pow(std::sqrt(d2), n + 1);
            ++local;
        }
        counts[i / kSumBlock] += local;
        return mu.weights[i] * inner.squaredNorm();
    });
    EnergyReport rep;
    rep.value = value;
    rep.eps = eps;
    for (const auto c : counts) rep.count += c;
    rep.seconds = watch.seconds();
    return rep;
}

// Conical Riesz energy: sum over ordered pairs i != j with x_i - x_j in the
// cone and |x_i - x_j| > eps of w_i w_j |x_i - x_j|^{-n}. The cone is linear
// (apex at the origin) and symmetric, so the sum is symmetric in (i, j).
inline EnergyReport conical_energy(const DiscreteMeasure& mu, const Cone& cone, int n, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("conical_energy: eps must be positive");
    if (cone.subspace.ambient_dim() != mu.dim)
        throw std::invalid_argument("conical_energy: cone dimension mismatch");
    detail::StopWatch watch;
    const std::size_t count = mu.size();
    const double eps2 = eps * eps;
    std::vector<std::int64_t> counts((count + kSumBlock - 1) / kSumBlock, 0);
    const double value = deterministic_sum(count, [&](std::size_t i) {
        const Eigen::VectorXd xi = mu.point(i);
        double acc = 0.0;
        std::int64_t local = 0;
        for (std::size_t j = 0; j < count; ++j) {
            if (j == i) continue;
            const Eigen::VectorXd diff = xi - mu.point(j);
            const double d2 = diff.squaredNorm();
            if (d2 <= eps2) continue;
            if (!cone_contains_vector(cone, diff)) continue;
            acc += mu.weights[j] / std::pow(std::sqrt(d2), n);
            ++local;
        }
        counts[i / kSumBlock] += local;
        return mu.weights[i] * acc;
    });
    EnergyReport rep;
    rep.value = value;
    rep.eps = eps;
    for (const auto c : counts) rep.count += c;
    rep.seconds = watch.seconds();
    return rep;
}

// Conical energy restricted to x in a window ball and lower <= |x-y| <= upper
// (the integrand of the cell energy before division by mu(Q)).
inline EnergyReport banded_conical_energy(const DiscreteMeasure& mu, const Cone& cone, int n,
                                          double lower, double upper, const Ball& window) {
    if (!(lower > 0.0) || lower > upper)
        throw std::invalid_argument("banded_conical_energy: need 0 < lower <= upper");
    detail::StopWatch watch;
    const std::size_t count = mu.size();
    const double lo2 = lower * lower, hi2 = upper * upper;
    const double win2 = window.radius * window.radius;
    std::vector<std::int64_t> counts((count + kSumBlock - 1) / kSumBlock, 0);
    const double value = deterministic_sum(count, [&](std::size_t i) {
        const Eigen::VectorXd xi = mu.point(i);
        if ((xi - window.center).squaredNorm() >= win2) return 0.0;
        double acc = 0.0;
        std::int64_t local = 0;
        for (std::size_t j = 0; j < count; ++j) {
            if (j == i) continue;
            const Eigen::VectorXd diff = xi - mu.point(j);
            const double d2 = diff.squaredNorm();
            if (d2 < lo2 || d2 > hi2) continue;
            if (!cone_contains_vector(cone, diff)) continue;
            acc += mu.weights[j] / std::pow(std::sqrt(d2), n);
            ++local;
        }
        counts[i / kSumBlock] += local;
        return mu.weights[i] * acc;
    });
    EnergyReport rep;
    rep.value = value;
    rep.eps = lower;
    for (const auto c : counts) rep.count += c;
    rep.seconds = watch.seconds();
    return rep;
}

}  // namespace gmtkit
