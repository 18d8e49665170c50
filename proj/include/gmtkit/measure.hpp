#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmtkit/grassmann.hpp"
#include "gmtkit/parallel.hpp"
#include "gmtkit/rng.hpp"

namespace gmtkit {

// Weighted point cloud in R^d. Weights are nonnegative; duplicate
// coordinates are allowed and add under the measure semantics.
struct DiscreteMeasure {
    int dim = 0;
    std::vector<double> coords;   // row-major, size() * dim
    std::vector<double> weights;  // size()

    DiscreteMeasure() = default;
    explicit DiscreteMeasure(int d) : dim(d) {
        if (d < 1) throw std::invalid_argument("DiscreteMeasure: dim must be >= 1");
    }

    std::size_t size() const { return weights.size(); }

    Eigen::Map<const Eigen::VectorXd> point(std::size_t i) const {
        return Eigen::Map<const Eigen::VectorXd>(coords.data() + i * dim, dim);
    }

    void add(const Eigen::VectorXd& x, double w) {
        if (x.size() != dim) throw std::invalid_argument("DiscreteMeasure::add: wrong dimension");
        if (w < 0.0) throw std::invalid_argument("DiscreteMeasure::add: negative weight");
        coords.insert(coords.end(), x.data(), x.data() + dim);
        weights.push_back(w);
    }

    // Indices of atoms with positive weight.
    std::vector<std::size_t> support() const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < size(); ++i)
            if (weights[i] > 0.0) idx.push_back(i);
        return idx;
    }

    double diameter() const {
        double best = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            if (weights[i] <= 0.0) continue;
            for (std::size_t j = i + 1; j < size(); ++j) {
                if (weights[j] <= 0.0) continue;
                best = std::max(best, (point(i) - point(j)).norm());
            }
        }
        return best;
    }
};

struct Ball {
    Eigen::VectorXd center;
    double radius = 0.0;

    Ball() = default;
    Ball(Eigen::VectorXd c, double r) : center(std::move(c)), radius(r) {
        if (r <= 0.0) throw std::invalid_argument("Ball: radius must be positive");
    }
};

struct DensityStats {
    double theta = 0.0;
    double growth_constant = 0.0;
    double r_min = 0.0;
};

inline double total_mass(const DiscreteMeasure& mu) {
    return deterministic_sum(mu.size(), [&](std::size_t i) { return mu.weights[i]; });
}

// Mass of the open (default) or closed ball. Open balls are the convention
// everywhere except growth-type suprema, which use closed balls so the
// maximum is attained on the candidate radii.
inline double mass_in_ball(const DiscreteMeasure& mu, const Eigen::VectorXd& center, double radius,
                           bool closed = false) {
    const double r2 = radius * radius;
    return deterministic_sum(mu.size(), [&](std::size_t i) {
        const double d2 = (mu.point(i) - center).squaredNorm();
        const bool in = closed ? (d2 <= r2) : (d2 < r2);
        return in ? mu.weights[i] : 0.0;
    });
}

// n-density of a ball: mu(B) / diam(B)^n with the open ball.
inline double theta_density(const DiscreteMeasure& mu, const Ball& ball, int n) {
    if (n <= 0 || n >= mu.dim) throw std::invalid_argument("theta_density: need 0 < n < d");
    return mass_in_ball(mu, ball.center, ball.radius) / std::pow(2.0 * ball.radius, n);
}

// Best constant with mu(closed B(x, r)) <= c0 r^n over support centers and
// radii r >= r_min. Atomic measures have an infinite unfloored constant; the
// floor makes the supremum attained on the candidate set
// {r_min} u {|x - y| >= r_min}.
inline double growth_constant(const DiscreteMeasure& mu, int n, double r_min) {
    if (r_min <= 0.0) throw std::invalid_argument("growth_constant: r_min must be positive");
    const auto sup = mu.support();
    double best = 0.0;
    for (const std::size_t i : sup) {
        // prefix mass ordered by distance from x_i
        std::vector<std::pair<double, double>> dw;
        dw.reserve(sup.size());
        for (const std::size_t j : sup)
            dw.emplace_back((mu.point(i) - mu.point(j)).norm(), mu.weights[j]);
        std::sort(dw.begin(), dw.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<double> dist(dw.size());
        std::vector<double> wsorted(dw.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < dw.size(); ++k) {
            acc += dw[k].second;
            dist[k] = dw[k].first;
            wsorted[k] = acc;
        }
        auto closed_mass_at = [&](double r) {
            const std::size_t k = std::upper_bound(dist.begin(), dist.end(), r) - dist.begin();
            return k == 0 ? 0.0 : wsorted[k - 1];
        };
        best = std::max(best, closed_mass_at(r_min) / std::pow(r_min, n));
        for (const double r : dist)
            if (r >= r_min) best = std::max(best, closed_mass_at(r) / std::pow(r, n));
    }
    return best;
}

inline DensityStats density_stats(const DiscreteMeasure& mu, const Ball& ball, int n, double r_min) {
    DensityStats s;
    s.theta = theta_density(mu, ball, n);
    s.growth_constant = growth_constant(mu, n, r_min);
    s.r_min = r_min;
    return s;
}

// Generation-k four-corner Cantor iterate in [0,1]^2: 4^k atoms of weight
// 4^{-k} at the centers of the kept squares (side 4^{-k}).
inline DiscreteMeasure generate_cantor4(int k) {
    if (k < 0) throw std::invalid_argument("generate_cantor4: k must be >= 0");
    DiscreteMeasure mu(2);
    const double w = std::pow(0.25, k);
    struct Frame {
        double x, y, side;
        int depth;
    };
    std::vector<Frame> stack{{0.0, 0.0, 1.0, 0}};
    // explicit stack, children pushed in reverse so traversal order is
    // (0,0), (3/4,0), (0,3/4), (3/4,3/4)
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (f.depth == k) {
            Eigen::Vector2d p(f.x + f.side / 2.0, f.y + f.side / 2.0);
            mu.add(p, w);
            continue;
        }
        const double s = f.side / 4.0;
        const double off = 3.0 * s;
        stack.push_back({f.x + off, f.y + off, s, f.depth + 1});
        stack.push_back({f.x, f.y + off, s, f.depth + 1});
        stack.push_back({f.x + off, f.y, s, f.depth + 1});
        stack.push_back({f.x, f.y, s, f.depth + 1});
    }
    return mu;
}

// Atoms on the graph of a random function over the base subspace with
// Lipschitz constant <= slope_bound. The fiber map is a min of cones, so the
// bound holds exactly for every atom pair. Equal weights summing to 1.
inline DiscreteMeasure generate_lipschitz_graph(int num_points, const Subspace& base,
                                                double slope_bound, std::uint64_t seed) {
    if (num_points < 1) throw std::invalid_argument("generate_lipschitz_graph: num_points >= 1");
    if (slope_bound < 0.0) throw std::invalid_argument("generate_lipschitz_graph: slope_bound >= 0");
    const int d = base.ambient_dim();
    const int n = base.dim();
    const int codim = d - n;
    Rng rng(seed);
    const Subspace normal = base.complement();

    const int num_anchors = 8;
    const double comp_slope = slope_bound / std::sqrt(static_cast<double>(codim));
    Eigen::MatrixXd anchor_pos(num_anchors, n);
    Eigen::MatrixXd anchor_val(num_anchors, codim);
    for (int a = 0; a < num_anchors; ++a) {
        for (int j = 0; j < n; ++j) anchor_pos(a, j) = rng.uniform();
        for (int c = 0; c < codim; ++c) anchor_val(a, c) = rng.uniform(-0.25, 0.25);
    }
    auto fiber = [&](const Eigen::VectorXd& u) {
        Eigen::VectorXd f(codim);
        for (int c = 0; c < codim; ++c) {
            double best = std::numeric_limits<double>::infinity();
            for (int a = 0; a < num_anchors; ++a) {
                const double dist = (u - anchor_pos.row(a).transpose()).norm();
                best = std::min(best, anchor_val(a, c) + comp_slope * dist);
            }
            f(c) = best;
        }
        return f;
    };

    DiscreteMeasure mu(d);
    const double w = 1.0 / num_points;
    for (int i = 0; i < num_points; ++i) {
        Eigen::VectorXd u(n);
        for (int j = 0; j < n; ++j) u(j) = rng.uniform();
        const Eigen::VectorXd x = base.basis * u + normal.basis * fiber(u);
        mu.add(x, w);
    }
    return mu;
}

// Midpoint-rule discretization of length measure on a segment: equispaced
// atoms, total mass = segment length.
inline DiscreteMeasure generate_segment(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                        int num_atoms) {
    if (num_atoms < 1) throw std::invalid_argument("generate_segment: num_atoms >= 1");
    if (a.size() != b.size()) throw std::invalid_argument("generate_segment: endpoint mismatch");
    DiscreteMeasure mu(static_cast<int>(a.size()));
    const double len = (b - a).norm();
    const double w = len / num_atoms;
    for (int i = 0; i < num_atoms; ++i) {
        const double t = (i + 0.5) / num_atoms;
        mu.add(a + t * (b - a), w);
    }
    return mu;
}

// Uniform atoms in the unit box with total mass 1.
inline DiscreteMeasure generate_random_box(int n_atoms, int d, std::uint64_t seed) {
    if (n_atoms < 1) throw std::invalid_argument("generate_random_box: n_atoms >= 1");
    DiscreteMeasure mu(d);
    Rng rng(seed);
    const double w = 1.0 / n_atoms;
    for (int i = 0; i < n_atoms; ++i) {
        Eigen::VectorXd x(d);
        for (int j = 0; j < d; ++j) x(j) = rng.uniform();
        mu.add(x, w);
    }
    return mu;
}

// Atoms sampled from a mixture of isotropic Gaussians with centers in the
// unit box; equal weights summing to 1.
inline DiscreteMeasure generate_gaussian_mixture(int n_atoms, int n_components, int d,
                                                 double component_sigma, std::uint64_t seed) {
    if (n_atoms < 1 || n_components < 1)
        throw std::invalid_argument("generate_gaussian_mixture: counts must be >= 1");
    Rng rng(seed);
    Eigen::MatrixXd centers(n_components, d);
    for (int c = 0; c < n_components; ++c)
        for (int j = 0; j < d; ++j) centers(c, j) = rng.uniform();
    DiscreteMeasure mu(d);
    const double w = 1.0 / n_atoms;
    for (int i = 0; i < n_atoms; ++i) {
        const int c = static_cast<int>(rng.uniform() * n_components) % n_components;
        Eigen::VectorXd x(d);
        for (int j = 0; j < d; ++j) x(j) = centers(c, j) + component_sigma * rng.normal();
        mu.add(x, w);
    }
    return mu;
}

// Smallest positive pairwise distance among support atoms (0 if fewer than
// two distinct locations).
inline double min_pairwise_distance(const DiscreteMeasure& mu) {
    const auto sup = mu.support();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < sup.size(); ++a)
        for (std::size_t b = a + 1; b < sup.size(); ++b) {
            const double d = (mu.point(sup[a]) - mu.point(sup[b])).norm();
            if (d > 0.0) best = std::min(best, d);
        }
    return std::isfinite(best) ? best : 0.0;
}

// CSV with header x1,...,xd,w, one atom per row.
inline void write_measure_csv(const DiscreteMeasure& mu, std::ostream& os) {
    for (int j = 0; j < mu.dim; ++j) os << "x" << (j + 1) << ",";
    os << "w\n";
    os.precision(17);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (int j = 0; j < mu.dim; ++j) os << mu.coords[i * mu.dim + j] << ",";
        os << mu.weights[i] << "\n";
    }
}

inline void write_measure_csv(const DiscreteMeasure& mu, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_measure_csv: cannot open " + path);
    write_measure_csv(mu, os);
}

inline DiscreteMeasure read_measure_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_measure_csv: empty file");
    int d = 0;
    {
        std::stringstream header(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(header, field, ',')) fields.push_back(field);
        if (fields.size() < 2 || fields.back() != "w")
            throw std::runtime_error("read_measure_csv: header must be x1,...,xd,w");
        d = static_cast<int>(fields.size()) - 1;
    }
    DiscreteMeasure mu(d);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string field;
        Eigen::VectorXd x(d);
        for (int j = 0; j < d; ++j) {
            if (!std::getline(row, field, ','))
                throw std::runtime_error("read_measure_csv: short row");
            x(j) = std::stod(field);
        }
        if (!std::getline(row, field, ','))
            throw std::runtime_error("read_measure_csv: missing weight");
        mu.add(x, std::stod(field));
    }
    return mu;
}

inline DiscreteMeasure read_measure_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_measure_csv: cannot open " + path);
    return read_measure_csv(is);
}

}  // namespace gmtkit
