#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmtkit/energies.hpp"
#include "gmtkit/grassmann.hpp"
#include "gmtkit/measure.hpp"
#include "gmtkit/projection.hpp"
#include "gmtkit/quadrature.hpp"

namespace gmtkit {

// Constructive lower-bound certificate: a rescaled restriction sigma of mu
// with unit growth, its curvature (or Riesz) energy, and the bound
// mu(E)^2 / directional energy. The absolute constant of the underlying
// comparability theorems is not known explicitly; the bound is reported with
// that constant set to 1 and energy_over_mass carries what a consumer needs
// to renormalize.
struct CapacityCertificate {
    double lower_bound = 0.0;
    double lambda = 0.0;           // directional energy / mass
    double theta0 = 0.0;           // planar pipeline only
    Subspace direction;            // minimizing projection direction
    std::vector<int> f_indices;    // retained atoms
    DiscreteMeasure sigma;
    double sigma_growth = 0.0;
    double sigma_energy = 0.0;     // curvature (n = 1) or Riesz energy of sigma
    double energy_over_mass = 0.0;
    double retained_mass = 0.0;
    double sigma_mass = 0.0;
    int threshold_doublings = 0;
    double direction_measure = 0.0;  // |I| or gamma-volume estimate of the ball
    double directional_energy = 0.0;
    double mass = 0.0;
    double r_min = 0.0;
    bool growth_ok = false;
};

inline void to_json(json& j, const CapacityCertificate& c) {
    j = json{{"lower_bound", c.lower_bound},
             {"lambda", c.lambda},
             {"theta0", c.theta0},
             {"direction", c.direction},
             {"f_indices", c.f_indices},
             {"sigma_growth", c.sigma_growth},
             {"sigma_energy", c.sigma_energy},
             {"energy_over_mass", c.energy_over_mass},
             {"retained_mass", c.retained_mass},
             {"sigma_mass", c.sigma_mass},
             {"threshold_doublings", c.threshold_doublings},
             {"direction_measure", c.direction_measure},
             {"directional_energy", c.directional_energy},
             {"mass", c.mass},
             {"r_min", c.r_min},
             {"growth_ok", c.growth_ok}};
}

namespace detail {

// Chebyshev retention: keep atoms whose smoothed projected density is at or
// below the threshold, doubling the threshold until at least a quarter of
// the mass survives. Doublings compensate quadrature and mollification slack
// and are logged on the certificate.
template <class DensityAt>
std::vector<int> chebyshev_retain(const DiscreteMeasure& mu, DensityAt&& density_at,
                                  double threshold, double target_mass, int& doublings) {
    std::vector<double> dens(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) dens[i] = density_at(i);
    doublings = 0;
    for (;;) {
        std::vector<int> keep;
        double kept_mass = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            if (mu.weights[i] <= 0.0) continue;
            if (dens[i] <= threshold) {
                keep.push_back(static_cast<int>(i));
                kept_mass += mu.weights[i];
            }
        }
        if (kept_mass >= target_mass || doublings > 64) return keep;
        threshold *= 2.0;
        ++doublings;
    }
}

inline DiscreteMeasure restrict_and_scale(const DiscreteMeasure& mu, const std::vector<int>& keep,
                                          double factor) {
    DiscreteMeasure sigma(mu.dim);
    for (const int i : keep) sigma.add(mu.point(i), factor * mu.weights[i]);
    return sigma;
}

}  // namespace detail

// Planar pipeline: lambda from the interval energy, theta0 the quadrature
// minimizer (at most the average, hence admissible), Chebyshev retention on
// the smoothed projected density, sigma = (|I| / 4 lambda) mu|_F with unit
// growth, curvature of sigma compared against its mass, and the final bound
// mu(E)^2 over the interval energy.
inline CapacityCertificate theorem1_certificate(const DiscreteMeasure& mu,
                                                const AngularInterval& interval,
                                                const MollifierSpec& moll, double r_min,
                                                int num_theta_nodes = 64) {
    if (mu.dim != 2) throw std::invalid_argument("theorem1_certificate: planar measures only");
    interval.validate();
    CapacityCertificate cert;
    cert.mass = total_mass(mu);
    cert.r_min = r_min;
    cert.direction_measure = interval.length();

    const auto profile = directional_profile(mu, interval, moll, num_theta_nodes);
    std::vector<double> terms(profile.size());
    for (std::size_t a = 0; a < profile.size(); ++a) terms[a] = profile[a].weight * profile[a].energy;
    cert.directional_energy = tree_sum(terms);
    if (!(cert.directional_energy > 0.0) || !std::isfinite(cert.directional_energy))
        throw std::invalid_argument("theorem1_certificate: directional energy must be in (0, inf)");
    cert.lambda = cert.directional_energy / cert.mass;

    std::size_t best = 0;
    for (std::size_t a = 1; a < profile.size(); ++a)
        if (profile[a].energy < profile[best].energy) best = a;
    cert.theta0 = profile[best].theta;
    cert.direction = Subspace::line_at_angle(cert.theta0);

    // smoothed density of the projected measure along L_theta0
    const Eigen::Vector2d u(std::cos(cert.theta0), std::sin(cert.theta0));
    std::vector<double> proj(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) proj[i] = u.dot(mu.point(i));
    const double eps = moll.epsilon;
    const double norm_const = 1.0 / std::sqrt(2.0 * kPi * eps * eps);
    auto density_at = [&](std::size_t i) {
        double g = 0.0;
        for (std::size_t j = 0; j < mu.size(); ++j) {
            const double d = proj[i] - proj[j];
            g += mu.weights[j] * std::exp(-d * d / (2.0 * eps * eps));
        }
        return norm_const * g;
    };
    const double threshold = 2.0 * cert.lambda / interval.length();
    cert.f_indices = detail::chebyshev_retain(mu, density_at, threshold, cert.mass / 4.0,
                                              cert.threshold_doublings);
    for (const int i : cert.f_indices) cert.retained_mass += mu.weights[i];

    const double factor = interval.length() / (4.0 * cert.lambda);
    cert.sigma = detail::restrict_and_scale(mu, cert.f_indices, factor);
    cert.sigma_mass = total_mass(cert.sigma);
    cert.sigma_growth = cert.sigma.size() > 0 ? growth_constant(cert.sigma, 1, r_min) : 0.0;
    cert.growth_ok = cert.sigma_growth <= 1.0 + 1e-6;
    cert.sigma_energy = cert.sigma.size() > 0 ? curvature(cert.sigma, r_min).value : 0.0;
    cert.energy_over_mass = cert.sigma_mass > 0.0 ? cert.sigma_energy / cert.sigma_mass : 0.0;

    cert.lower_bound = cert.mass * cert.mass / cert.directional_energy;
    return cert;
}

// Higher-dimensional pipeline: identical structure with the Grassmannian
// ball in place of the interval, the sampled minimizer in place of theta0,
// the n-plane sliced density, and the Riesz energy of sigma. The acceptance
// volume of the ball plays the role of |I|.
inline CapacityCertificate theorem2_certificate(const DiscreteMeasure& mu,
                                                const GrassmannBall& ball,
                                                const MollifierSpec& moll, double r_min,
                                                long long num_samples, Rng& rng) {
    const int d = mu.dim;
    const int n = ball.center.dim();
    if (ball.center.ambient_dim() != d)
        throw std::invalid_argument("theorem2_certificate: dimension mismatch");
    CapacityCertificate cert;
    cert.mass = total_mass(mu);
    cert.r_min = r_min;

    double sum = 0.0;
    long long accepted = 0;
    double best_energy = std::numeric_limits<double>::infinity();
    Subspace best_v;
    for (long long k = 0; k < num_samples; ++k) {
        const Subspace v = sample_uniform_subspace(d, n, rng);
        if (grassmann_metric(v, ball.center) >= ball.radius) continue;
        const double e = projection_l2_energy(mu, v, moll);
        sum += e;
        ++accepted;
        if (e < best_energy) {
            best_energy = e;
            best_v = v;
        }
    }
    if (accepted == 0) throw std::runtime_error("theorem2_certificate: zero accepted samples");
    cert.directional_energy = sum / static_cast<double>(num_samples);
    if (!(cert.directional_energy > 0.0))
        throw std::invalid_argument("theorem2_certificate: directional energy must be positive");
    cert.direction_measure = static_cast<double>(accepted) / static_cast<double>(num_samples);
    cert.lambda = cert.directional_energy / cert.mass;
    cert.direction = best_v;

    const Eigen::MatrixXd bt = best_v.basis.transpose();
    std::vector<Eigen::VectorXd> proj(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) proj[i] = bt * mu.point(i);
    const double eps = moll.epsilon;
    const double norm_const = std::pow(2.0 * kPi * eps * eps, -0.5 * n);
    auto density_at = [&](std::size_t i) {
        double g = 0.0;
        for (std::size_t j = 0; j < mu.size(); ++j)
            g += mu.weights[j] *
                 std::exp(-(proj[i] - proj[j]).squaredNorm() / (2.0 * eps * eps));
        return norm_const * g;
    };
    const double threshold = 2.0 * cert.lambda / cert.direction_measure;
    cert.f_indices = detail::chebyshev_retain(mu, density_at, threshold, cert.mass / 4.0,
                                              cert.threshold_doublings);
    for (const int i : cert.f_indices) cert.retained_mass += mu.weights[i];

    const double factor = cert.direction_measure / (4.0 * cert.lambda);
    cert.sigma = detail::restrict_and_scale(mu, cert.f_indices, factor);
    cert.sigma_mass = total_mass(cert.sigma);
    cert.sigma_growth = cert.sigma.size() > 0 ? growth_constant(cert.sigma, n, r_min) : 0.0;
    cert.growth_ok = cert.sigma_growth <= 1.0 + 1e-6;
    cert.sigma_energy = cert.sigma.size() > 0 ? riesz_energy(cert.sigma, n, r_min).value : 0.0;
    cert.energy_over_mass = cert.sigma_mass > 0.0 ? cert.sigma_energy / cert.sigma_mass : 0.0;

    cert.lower_bound = cert.mass * cert.mass / cert.directional_energy;
    return cert;
}

struct FavardProfilePoint {
    double theta = 0.0;
    double weight = 0.0;
    double length = 0.0;  // total length of the delta-fattened projection
};

// Length of the projection of the delta-fattened support onto L_theta:
// project, fatten each atom to [r - delta, r + delta], merge, sum.
inline double projected_length(const DiscreteMeasure& mu, double theta, double delta) {
    const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
    std::vector<double> r;
    r.reserve(mu.size());
    for (const std::size_t i : mu.support()) r.push_back(u.dot(mu.point(i)));
    if (r.empty()) return 0.0;
    std::sort(r.begin(), r.end());
    double length = 0.0;
    double lo = r[0] - delta, hi = r[0] + delta;
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (r[i] - delta <= hi) {
            hi = r[i] + delta;
        } else {
            length += hi - lo;
            lo = r[i] - delta;
            hi = r[i] + delta;
        }
    }
    return length + (hi - lo);
}

inline std::vector<FavardProfilePoint> favard_profile(const DiscreteMeasure& mu, double delta,
                                                      int num_theta) {
    if (mu.dim != 2) throw std::invalid_argument("favard_profile: planar measures only");
    if (delta <= 0.0) throw std::invalid_argument("favard_profile: delta must be positive");
    const QuadratureRule rule = gauss_legendre(num_theta, 0.0, kPi);
    std::vector<FavardProfilePoint> profile(num_theta);
    for (int a = 0; a < num_theta; ++a) {
        profile[a].theta = rule.nodes[a];
        profile[a].weight = rule.weights[a];
        profile[a].length = projected_length(mu, rule.nodes[a], delta);
    }
    return profile;
}

// Integral over [0, pi) of the delta-fattened projection lengths. The delta
// dependence is part of the result and is never extrapolated away.
inline double favard_estimate(const DiscreteMeasure& mu, double delta, int num_theta = 256) {
    const auto profile = favard_profile(mu, delta, num_theta);
    std::vector<double> terms(profile.size());
    for (std::size_t a = 0; a < profile.size(); ++a) terms[a] = profile[a].weight * profile[a].length;
    return tree_sum(terms);
}

struct FavardCheck {
    double favard = 0.0;
    double directional_energy = 0.0;
    double rhs = 0.0;   // |I|^2 mass^2 / directional energy
    double ratio = 0.0;
};

inline void to_json(json& j, const FavardCheck& c) {
    j = json{{"favard", c.favard},
             {"directional_energy", c.directional_energy},
             {"rhs", c.rhs},
             {"ratio", c.ratio}};
}

// Cauchy-Schwarz comparison: Fav(E_delta) against |I|^2 mu(E)^2 / int_I
// ||P_theta mu_eps||^2. Exact in the continuum; fattening and mollification
// must be matched (delta a few times epsilon) for the discrete ratio to sit
// at or above 1.
inline FavardCheck favard_inequality_check(const DiscreteMeasure& mu, const AngularInterval& interval,
                                           const MollifierSpec& moll, double delta,
                                           int num_theta_nodes = 64, int favard_nodes = 256) {
    FavardCheck check;
    check.favard = favard_estimate(mu, delta, favard_nodes);
    check.directional_energy =
        directional_energy_interval(mu, interval, moll, num_theta_nodes).value;
    if (!(check.directional_energy > 0.0) || !std::isfinite(check.directional_energy))
        throw std::invalid_argument("favard_inequality_check: directional energy must be in (0, inf)");
    const double mass = total_mass(mu);
    check.rhs = interval.length() * interval.length() * mass * mass / check.directional_energy;
    check.ratio = check.favard / check.rhs;
    return check;
}

}  // namespace gmtkit
