#pragma once

// Independent naive-loop oracles for the kernel energies. These deliberately
// take different code paths from the library (full ordered loops, serial
// accumulation, circumcenter via linear solve, projector matrices) so that
// agreement is evidence, not tautology.

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "gmtkit/grassmann.hpp"
#include "gmtkit/measure.hpp"

namespace oracles {

using gmtkit::Cone;
using gmtkit::DiscreteMeasure;

// Circumradius through the circumcenter: solve the 2x2 system for the point
// equidistant from the three vertices.
inline double inv_circumradius_by_center(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                         const Eigen::Vector2d& c) {
    Eigen::Matrix2d m;
    m.row(0) = 2.0 * (b - a).transpose();
    m.row(1) = 2.0 * (c - a).transpose();
    Eigen::Vector2d rhs(b.squaredNorm() - a.squaredNorm(), c.squaredNorm() - a.squaredNorm());
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (std::abs(det) < 1e-280) return 0.0;  // collinear
    const Eigen::Vector2d center = m.inverse() * rhs;
    const double r = (center - a).norm();
    return r > 0.0 ? 1.0 / r : 0.0;
}

inline double naive_curvature(const DiscreteMeasure& mu, double eps) {
    const std::size_t n = mu.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                if (i == j || j == k || i == k) continue;
                const Eigen::Vector2d a = mu.point(i), b = mu.point(j), c = mu.point(k);
                if ((a - b).norm() <= eps || (a - c).norm() <= eps || (b - c).norm() <= eps)
                    continue;
                const double inv_r = inv_circumradius_by_center(a, b, c);
                total += mu.weights[i] * mu.weights[j] * mu.weights[k] * inv_r * inv_r;
            }
    return total;
}

inline double naive_cauchy(const DiscreteMeasure& mu, double eps) {
    const std::size_t n = mu.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> s(0.0, 0.0);
        const std::complex<double> zi(mu.coords[2 * i], mu.coords[2 * i + 1]);
        for (std::size_t j = 0; j < n; ++j) {
            const std::complex<double> zj(mu.coords[2 * j], mu.coords[2 * j + 1]);
            if (std::abs(zi - zj) > eps) s += mu.weights[j] / (zi - zj);
        }
        total += mu.weights[i] * (s.real() * s.real() + s.imag() * s.imag());
    }
    return total;
}

inline double naive_riesz(const DiscreteMeasure& mu, int n, double eps) {
    const std::size_t count = mu.size();
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(mu.dim);
        for (std::size_t j = 0; j < count; ++j) {
            const Eigen::VectorXd diff = mu.point(i) - mu.point(j);
            const double dist = diff.norm();
            if (dist > eps) s += mu.weights[j] * diff / std::pow(dist, n + 1);
        }
        total += mu.weights[i] * s.squaredNorm();
    }
    return total;
}

// Cone membership through the full projector matrix.
inline bool naive_in_cone(const Cone& cone, const Eigen::VectorXd& v) {
    if (v.norm() == 0.0) return false;
    const Eigen::MatrixXd p = cone.subspace.projector();
    const Eigen::VectorXd residual = v - p * v;
    return residual.norm() < cone.aperture * v.norm();
}

inline double naive_conical(const DiscreteMeasure& mu, const Cone& cone, int n, double eps) {
    const std::size_t count = mu.size();
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = 0; j < count; ++j) {
            if (i == j) continue;
            const Eigen::VectorXd diff = mu.point(i) - mu.point(j);
            const double dist = diff.norm();
            if (dist <= eps || !naive_in_cone(cone, diff)) continue;
            total += mu.weights[i] * mu.weights[j] / std::pow(dist, n);
        }
    return total;
}

inline double naive_banded_conical(const DiscreteMeasure& mu, const Cone& cone, int n, double lower,
                                   double upper, const Eigen::VectorXd& window_center,
                                   double window_radius) {
    const std::size_t count = mu.size();
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        if ((mu.point(i) - window_center).norm() >= window_radius) continue;
        for (std::size_t j = 0; j < count; ++j) {
            if (i == j) continue;
            const Eigen::VectorXd diff = mu.point(i) - mu.point(j);
            const double dist = diff.norm();
            if (dist < lower || dist > upper || !naive_in_cone(cone, diff)) continue;
            total += mu.weights[i] * mu.weights[j] / std::pow(dist, n);
        }
    }
    return total;
}

}  // namespace oracles
