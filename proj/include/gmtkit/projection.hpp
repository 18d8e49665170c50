#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmtkit/energies.hpp"
#include "gmtkit/grassmann.hpp"
#include "gmtkit/measure.hpp"
#include "gmtkit/parallel.hpp"
#include "gmtkit/quadrature.hpp"
#include "gmtkit/rng.hpp"

namespace gmtkit {

// Gaussian mollifier of bandwidth epsilon: phi_eps is the isotropic Gaussian
// with standard deviation epsilon, so pair kernels and Fourier transforms
// have closed forms. (A compactly supported bump would do as well but has no
// closed-form autocorrelation.)
struct MollifierSpec {
    double epsilon = 0.0;

    explicit MollifierSpec(double eps) : epsilon(eps) {
        if (eps <= 0.0) throw std::invalid_argument("MollifierSpec: epsilon must be positive");
    }
};

struct ProjectionEnergy {
    double value = 0.0;
    double epsilon = 0.0;
    std::string method;   // "pairwise", "fourier", or "mc"
    int quadrature_nodes = 0;
    double std_error = 0.0;  // Monte Carlo methods only
    long long accepted = 0;  // Monte Carlo methods only
    long long samples = 0;   // Monte Carlo methods only
};

inline void to_json(json& j, const ProjectionEnergy& p) {
    j = json{{"value", p.value},
             {"epsilon", p.epsilon},
             {"method", p.method},
             {"quadrature_nodes", p.quadrature_nodes}};
    if (p.method == "mc") {
        j["std_error"] = p.std_error;
        j["accepted"] = p.accepted;
        j["samples"] = p.samples;
    }
}

// ||P_V (mu * phi_eps)||_2^2, exactly:
//   sum_{i,j} w_i w_j (4 pi eps^2)^{-n/2} exp(-|P_V(x_i - x_j)|^2 / (4 eps^2))
inline double projection_l2_energy(const DiscreteMeasure& mu, const Subspace& v,
                                   const MollifierSpec& moll) {
    if (v.ambient_dim() != mu.dim)
        throw std::invalid_argument("projection_l2_energy: dimension mismatch");
    const int n = v.dim();
    const double eps2 = moll.epsilon * moll.epsilon;
    const double norm_const = std::pow(4.0 * kPi * eps2, -0.5 * n);
    const std::size_t count = mu.size();
    const Eigen::MatrixXd bt = v.basis.transpose();
    return norm_const * deterministic_sum(count, [&](std::size_t i) {
        const Eigen::VectorXd pi = bt * mu.point(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < count; ++j) {
            const double proj2 = (pi - bt * mu.point(j)).squaredNorm();
            acc += mu.weights[j] * std::exp(-proj2 / (4.0 * eps2));
        }
        return mu.weights[i] * acc;
    });
}

struct DirectionalProfilePoint {
    double theta = 0.0;
    double weight = 0.0;
    double energy = 0.0;
};

// Gauss-Legendre sample of theta -> ||P_theta mu_eps||_2^2 over an interval.
inline std::vector<DirectionalProfilePoint> directional_profile(const DiscreteMeasure& mu,
                                                                const AngularInterval& interval,
                                                                const MollifierSpec& moll,
                                                                int num_theta_nodes) {
    if (mu.dim != 2) throw std::invalid_argument("directional_profile: planar measures only");
    interval.validate();
    if (num_theta_nodes < 1) throw std::invalid_argument("directional_profile: nodes >= 1");
    const QuadratureRule rule = gauss_legendre(num_theta_nodes, interval.theta_lo, interval.theta_hi);
    std::vector<DirectionalProfilePoint> profile(num_theta_nodes);
    for (int a = 0; a < num_theta_nodes; ++a) {
        profile[a].theta = rule.nodes[a];
        profile[a].weight = rule.weights[a];
        profile[a].energy =
            projection_l2_energy(mu, Subspace::line_at_angle(rule.nodes[a]), moll);
    }
    return profile;
}

// int_I ||P_theta mu_eps||_2^2 dtheta by Gauss-Legendre quadrature.
inline ProjectionEnergy directional_energy_interval(const DiscreteMeasure& mu,
                                                    const AngularInterval& interval,
                                                    const MollifierSpec& moll,
                                                    int num_theta_nodes = 64) {
    const auto profile = directional_profile(mu, interval, moll, num_theta_nodes);
    std::vector<double> terms(profile.size());
    for (std::size_t a = 0; a < profile.size(); ++a) terms[a] = profile[a].weight * profile[a].energy;
    ProjectionEnergy out;
    out.value = tree_sum(terms);
    out.epsilon = moll.epsilon;
    out.method = "pairwise";
    out.quadrature_nodes = num_theta_nodes;
    return out;
}

// Unnormalized int_{B(V0,s)} ||P_V mu_eps||_2^2 dgamma by Monte Carlo:
// acceptance fraction times the conditional mean over accepted samples.
inline ProjectionEnergy grassmann_ball_energy(const DiscreteMeasure& mu, const GrassmannBall& ball,
                                              const MollifierSpec& moll, long long num_samples,
                                              Rng& rng) {
    if (num_samples <= 0) throw std::invalid_argument("grassmann_ball_energy: num_samples > 0");
    const int d = ball.center.ambient_dim(), n = ball.center.dim();
    if (d != mu.dim) throw std::invalid_argument("grassmann_ball_energy: dimension mismatch");
    double sum = 0.0, sum2 = 0.0;
    long long accepted = 0;
    for (long long k = 0; k < num_samples; ++k) {
        const Subspace v = sample_uniform_subspace(d, n, rng);
        if (grassmann_metric(v, ball.center) >= ball.radius) continue;
        const double e = projection_l2_energy(mu, v, moll);
        sum += e;
        sum2 += e * e;
        ++accepted;
    }
    if (accepted == 0) throw std::runtime_error("grassmann_ball_energy: zero accepted samples");
    ProjectionEnergy out;
    const double ns = static_cast<double>(num_samples);
    out.value = sum / ns;
    // MC variance of the indicator-weighted integrand
    out.std_error = std::sqrt(std::max(0.0, sum2 / ns - (sum / ns) * (sum / ns)) / ns);
    out.epsilon = moll.epsilon;
    out.method = "mc";
    out.accepted = accepted;
    out.samples = num_samples;
    return out;
}

namespace detail {

// Polar quadrature grid over the double cone of directions I^perp:
// xi = r (cos theta, sin theta), theta over I + pi/2, r over [0, r_cut] with
// the even-in-r doubling folded into the weights. Weights carry the Gaussian
// factor |phi^(eps xi)|^2 = exp(-4 pi^2 eps^2 r^2).
struct PolarGrid {
    std::vector<Eigen::Vector2d> xi;
    std::vector<double> weight;
};

inline PolarGrid cone_polar_grid(const AngularInterval& interval, const MollifierSpec& moll,
                                 int radial_nodes, int angular_nodes) {
    interval.validate();
    if (radial_nodes < 1 || angular_nodes < 1)
        throw std::invalid_argument("cone_polar_grid: node counts must be >= 1");
    const AngularInterval perp = interval.perp();
    const double r_cut = 6.0 / (2.0 * kPi * moll.epsilon);
    const QuadratureRule radial = gauss_legendre(radial_nodes, 0.0, r_cut);
    const QuadratureRule angular = gauss_legendre(angular_nodes, perp.theta_lo, perp.theta_hi);
    PolarGrid grid;
    grid.xi.reserve(static_cast<std::size_t>(radial_nodes) * angular_nodes);
    grid.weight.reserve(grid.xi.capacity());
    const double four_pi2_eps2 = 4.0 * kPi * kPi * moll.epsilon * moll.epsilon;
    for (int a = 0; a < angular_nodes; ++a) {
        const double c = std::cos(angular.nodes[a]), s = std::sin(angular.nodes[a]);
        for (int b = 0; b < radial_nodes; ++b) {
            const double r = radial.nodes[b];
            grid.xi.emplace_back(r * c, r * s);
            grid.weight.push_back(2.0 * angular.weights[a] * radial.weights[b] *
                                  std::exp(-four_pi2_eps2 * r * r));
        }
    }
    return grid;
}

}  // namespace detail

// int_{K_{I^perp}} |mu^(xi)|^2 |phi^(eps xi)|^2 |xi|^{-1} dxi by polar
// quadrature, with mu^ evaluated exactly. Equals the directional energy over
// I^perp up to quadrature error.
inline ProjectionEnergy fourier_cone_energy(const DiscreteMeasure& mu,
                                            const AngularInterval& interval,
                                            const MollifierSpec& moll, int radial_nodes = 256,
                                            int angular_nodes = 128) {
    if (mu.dim != 2) throw std::invalid_argument("fourier_cone_energy: planar measures only");
    const detail::PolarGrid grid = detail::cone_polar_grid(interval, moll, radial_nodes, angular_nodes);
    const std::size_t atoms = mu.size();
    const double value = deterministic_sum(grid.xi.size(), [&](std::size_t g) {
        const Eigen::Vector2d xi = grid.xi[g];
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < atoms; ++j) {
            const double phase = -2.0 * kPi * (xi.x() * mu.coords[2 * j] + xi.y() * mu.coords[2 * j + 1]);
            re += mu.weights[j] * std::cos(phase);
            im += mu.weights[j] * std::sin(phase);
        }
        return grid.weight[g] * (re * re + im * im);
    });
    ProjectionEnergy out;
    out.value = value;
    out.epsilon = moll.epsilon;
    out.method = "fourier";
    out.quadrature_nodes = radial_nodes * angular_nodes;
    return out;
}

// Same integral reorganized as a pair sum sum_{i,j} w_i w_j kappa(x_i - x_j)
// with kappa the inverse transform of the cone kernel against the same
// quadrature grid; the smoothed left-hand side of the planar identity. Uses
// identical nodes, so it matches fourier_cone_energy to rounding.
inline ProjectionEnergy cone_kernel_energy_smoothed(const DiscreteMeasure& mu,
                                                    const AngularInterval& interval,
                                                    const MollifierSpec& moll,
                                                    int radial_nodes = 256,
                                                    int angular_nodes = 128) {
    if (mu.dim != 2)
        throw std::invalid_argument("cone_kernel_energy_smoothed: planar measures only");
    const detail::PolarGrid grid = detail::cone_polar_grid(interval, moll, radial_nodes, angular_nodes);
    const std::size_t atoms = mu.size();
    auto kappa = [&](const Eigen::Vector2d& z) {
        double acc = 0.0;
        for (std::size_t g = 0; g < grid.xi.size(); ++g)
            acc += grid.weight[g] * std::cos(2.0 * kPi * grid.xi[g].dot(z));
        return acc;
    };
    const double value = deterministic_sum(atoms, [&](std::size_t i) {
        const Eigen::Vector2d xi = mu.point(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < atoms; ++j)
            acc += mu.weights[j] * kappa(xi - Eigen::Vector2d(mu.point(j)));
        return mu.weights[i] * acc;
    });
    ProjectionEnergy out;
    out.value = value;
    out.epsilon = moll.epsilon;
    out.method = "fourier";
    out.quadrature_nodes = radial_nodes * angular_nodes;
    return out;
}

// M_n mu(x) = sup_{r >= r_min} mu(closed B(x,r)) / r^n, attained on the
// candidate radii {r_min} u {|x - y| >= r_min}.
inline double maximal_function(const DiscreteMeasure& mu, const Eigen::VectorXd& x, int n,
                               double r_min) {
    if (r_min <= 0.0) throw std::invalid_argument("maximal_function: r_min must be positive");
    const auto sup = mu.support();
    std::vector<std::pair<double, double>> dw;
    dw.reserve(sup.size());
    for (const std::size_t j : sup) dw.emplace_back((mu.point(j) - x).norm(), mu.weights[j]);
    std::sort(dw.begin(), dw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double best = 0.0, acc = 0.0;
    std::size_t k = 0;
    // mass at radius r_min
    while (k < dw.size() && dw[k].first <= r_min) acc += dw[k++].second;
    best = acc / std::pow(r_min, n);
    for (; k < dw.size(); ++k) {
        acc += dw[k].second;
        // closed ball: include ties at the same radius before evaluating
        while (k + 1 < dw.size() && dw[k + 1].first == dw[k].first) acc += dw[++k].second;
        best = std::max(best, acc / std::pow(dw[k].first, n));
    }
    return best;
}

// mu(closed B(x,r)) / r^n along a decreasing scale list; the smallest-scale
// entry is the working proxy for the upper density at x (a true limit does
// not exist for atomic data).
inline std::vector<double> upper_density_profile(const DiscreteMeasure& mu,
                                                 const Eigen::VectorXd& x, int n,
                                                 const std::vector<double>& scales) {
    if (scales.empty()) throw std::invalid_argument("upper_density_profile: empty scale list");
    for (std::size_t i = 0; i + 1 < scales.size(); ++i)
        if (scales[i] <= scales[i + 1])
            throw std::invalid_argument("upper_density_profile: scales must decrease");
    std::vector<double> profile;
    profile.reserve(scales.size());
    for (const double r : scales) {
        if (r <= 0.0) throw std::invalid_argument("upper_density_profile: scales must be positive");
        profile.push_back(mass_in_ball(mu, x, r, /*closed=*/true) / std::pow(r, n));
    }
    return profile;
}

struct ReverseInequalityReport {
    double lhs = 0.0;        // ball-averaged projection energy
    double lhs_std_error = 0.0;
    double t1 = 0.0;         // conical energy at aperture lambda_guess * s
    double t2 = 0.0;         // mass-weighted smallest-scale density proxy
    double measured_c = 0.0; // lhs / (t1 + t2)
};

inline void to_json(json& j, const ReverseInequalityReport& r) {
    j = json{{"lhs", r.lhs},
             {"lhs_std_error", r.lhs_std_error},
             {"t1", r.t1},
             {"t2", r.t2},
             {"measured_c", r.measured_c}};
}

// Reverse-direction diagnostic: compares the Grassmannian ball energy with
// the conical energy at an enlarged aperture plus the density term. Report
// only; the measured constant is logged, not asserted here.
inline ReverseInequalityReport reverse_inequality_report(
    const DiscreteMeasure& mu, const Subspace& v0, double s, const MollifierSpec& moll,
    double lambda_guess, double cone_eps, const std::vector<double>& density_scales,
    long long num_samples, Rng& rng) {
    ReverseInequalityReport rep;
    if (mu.size() == 0 || total_mass(mu) == 0.0) return rep;
    GrassmannBall ball{v0, s};
    const ProjectionEnergy lhs = grassmann_ball_energy(mu, ball, moll, num_samples, rng);
    rep.lhs = lhs.value;
    rep.lhs_std_error = lhs.std_error;
    const int n = v0.dim();
    const Cone cone(v0.complement(), lambda_guess * s);
    rep.t1 = conical_energy(mu, cone, n, cone_eps).value;
    rep.t2 = deterministic_sum(mu.size(), [&](std::size_t i) {
        return mu.weights[i] *
               upper_density_profile(mu, mu.point(i), n, density_scales).back();
    });
    const double denom = rep.t1 + rep.t2;
    rep.measured_c = denom > 0.0 ? rep.lhs / denom : 0.0;
    return rep;
}

}  // namespace gmtkit
