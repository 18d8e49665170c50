#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmtkit/measure.hpp"

namespace gmtkit {

// One cell of the hierarchy. B(Q) = B(x_Q, r); B_Q = 28 B(Q); side length
// l(Q) = 56 C0 r. Members of the children partition the members of the
// parent; every member lies within 28 r of the center; centers of equal
// level are > 10 r apart (monitored, see CubeLattice::forced_center_adds).
struct Cube {
    int id = -1;
    int level = 0;
    int center_atom = -1;
    double r = 0.0;
    double mass = 0.0;
    bool doubling = false;
    int parent = -1;
    std::vector<int> children;
    std::vector<int> members;  // atom indices, ascending
};

// Hierarchy of cells adapted to the support of a discrete measure.
//
// Scale convention: the base length at level k is unit * A0^{-k} with
// unit = diam(supp)/10, so that level 0 is the single root cell and the
// levels below resolve the support. The root ball is enlarged to contain the
// whole support (the root is the support by definition). The classical
// regime A0 > 5000 C0 would collapse finite data to singletons immediately;
// small defaults give usable multiscale trees and the lemma-level
// consequences become measured diagnostics instead of guarantees.
struct CubeLattice {
    DiscreteMeasure mu;  // snapshot of the input
    double a0 = 8.0;
    double c0 = 2.0;
    int k_max = 0;
    double unit = 0.0;
    std::vector<Cube> cubes;
    std::vector<std::vector<int>> levels;    // cube ids per level
    std::vector<std::vector<int>> atom_cube; // per level, atom index -> cube id (-1 off support)
    int forced_center_adds = 0;              // separation fallbacks; 0 on corpus builds

    const Cube& cube(int id) const { return cubes[id]; }
    int root() const { return levels[0][0]; }

    Eigen::Map<const Eigen::VectorXd> center(int id) const {
        return mu.point(cubes[id].center_atom);
    }

    double side_length(int id) const { return 56.0 * c0 * cubes[id].r; }

    double mass_in(int id, double radius_multiple) const {
        return mass_in_ball(mu, center(id), radius_multiple * cubes[id].r);
    }

    // n-density of lambda * B_Q, i.e. the ball of radius lambda * 28 r.
    double theta_ball(int id, double lambda, int n) const {
        const double radius = lambda * 28.0 * cubes[id].r;
        return mass_in(id, lambda * 28.0) / std::pow(2.0 * radius, n);
    }

    // n-density of 100 B(Q).
    double theta_100b(int id, int n) const {
        return mass_in(id, 100.0) / std::pow(200.0 * cubes[id].r, n);
    }

    bool is_ancestor_or_self(int anc, int id) const {
        while (id != -1) {
            if (id == anc) return true;
            id = cubes[id].parent;
        }
        return false;
    }

    std::vector<int> descendants(int id) const {
        std::vector<int> out, stack{id};
        while (!stack.empty()) {
            const int q = stack.back();
            stack.pop_back();
            out.push_back(q);
            for (const int c : cubes[q].children) stack.push_back(c);
        }
        return out;
    }
};

// Builds the lattice: per level, a greedy 11 r-separated net of the support
// scanned in fixed atom order, then nearest-center assignment restricted to
// the parent cell. Points whose neighborhood is claimed by foreign-parent
// centers are deferred; a deferred point becomes a center only if its parent
// offers no center within 28 r, which keeps the 28-ball containment exact.
// Such forced adds may sit closer than 10 r to a foreign center and are
// counted in forced_center_adds.
inline CubeLattice build_lattice(const DiscreteMeasure& mu, double a0 = 8.0, double c0 = 2.0,
                                 int k_max = 8) {
    if (k_max < 0) throw std::invalid_argument("build_lattice: k_max must be >= 0");
    if (a0 < 4.0) throw std::invalid_argument("build_lattice: A0 must be >= 4");
    if (c0 < 1.0) throw std::invalid_argument("build_lattice: C0 must be >= 1");
    CubeLattice lat;
    lat.mu = mu;
    lat.a0 = a0;
    lat.c0 = c0;
    lat.k_max = k_max;

    const auto sup = mu.support();
    if (sup.empty()) throw std::invalid_argument("build_lattice: empty support");
    const double diam = mu.diameter();
    lat.unit = diam > 0.0 ? diam / 10.0 : 1.0;

    // Level 0: the root is the whole support; its ball is enlarged to
    // contain every support point.
    {
        Cube root;
        root.id = 0;
        root.level = 0;
        root.center_atom = static_cast<int>(sup[0]);
        double max_dist = 0.0;
        for (const std::size_t j : sup)
            max_dist = std::max(max_dist, (mu.point(j) - mu.point(sup[0])).norm());
        root.r = std::max(lat.unit, max_dist * (1.0 + 1e-9));
        if (root.r <= 0.0) root.r = 1.0;
        for (const std::size_t j : sup) {
            root.members.push_back(static_cast<int>(j));
            root.mass += mu.weights[j];
        }
        lat.cubes.push_back(root);
        lat.levels.push_back({0});
        std::vector<int> map(mu.size(), -1);
        for (const std::size_t j : sup) map[j] = 0;
        lat.atom_cube.push_back(std::move(map));
    }

    for (int k = 1; k <= k_max; ++k) {
        // stop once everything is resolved
        bool all_singletons = true;
        for (const int q : lat.levels[k - 1])
            if (lat.cubes[q].members.size() > 1) all_singletons = false;
        if (all_singletons) break;

        const double r = lat.unit * std::pow(a0, -k);
        const double sep = 11.0 * r;
        const std::vector<int>& parent_of_atom = lat.atom_cube[k - 1];

        struct Center {
            int atom;
            int parent;
        };
        std::vector<Center> centers;
        std::vector<std::size_t> deferred;

        auto nearest_in_parent = [&](const Eigen::VectorXd& x, int parent) {
            double best = std::numeric_limits<double>::infinity();
            for (const Center& c : centers)
                if (c.parent == parent) best = std::min(best, (mu.point(c.atom) - x).norm());
            return best;
        };
        auto nearest_any = [&](const Eigen::VectorXd& x) {
            double best = std::numeric_limits<double>::infinity();
            for (const Center& c : centers) best = std::min(best, (mu.point(c.atom) - x).norm());
            return best;
        };

        for (const std::size_t p : sup) {
            const int parent = parent_of_atom[p];
            const Eigen::VectorXd x = mu.point(p);
            if (nearest_in_parent(x, parent) < sep) continue;
            if (nearest_any(x) > 10.0 * r) {
                centers.push_back({static_cast<int>(p), parent});
            } else {
                deferred.push_back(p);
            }
        }
        for (const std::size_t p : deferred) {
            const int parent = parent_of_atom[p];
            const Eigen::VectorXd x = mu.point(p);
            if (nearest_in_parent(x, parent) < 28.0 * r) continue;
            if (nearest_any(x) <= 10.0 * r) ++lat.forced_center_adds;
            centers.push_back({static_cast<int>(p), parent});
        }

        // materialize cubes and assign members to the nearest in-parent
        // center (ties by creation order)
        const int first_id = static_cast<int>(lat.cubes.size());
        std::vector<int> level_ids;
        for (const Center& c : centers) {
            Cube q;
            q.id = static_cast<int>(lat.cubes.size());
            q.level = k;
            q.center_atom = c.atom;
            q.r = r;
            q.parent = c.parent;
            lat.cubes.push_back(q);
            lat.cubes[c.parent].children.push_back(q.id);
            level_ids.push_back(q.id);
        }
        std::vector<int> map(mu.size(), -1);
        for (const std::size_t p : sup) {
            const int parent = parent_of_atom[p];
            const Eigen::VectorXd x = mu.point(p);
            int best_id = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int id = first_id; id < static_cast<int>(lat.cubes.size()); ++id) {
                if (lat.cubes[id].parent != parent) continue;
                const double d = (lat.center(id) - x).norm();
                if (d < best) {
                    best = d;
                    best_id = id;
                }
            }
            map[p] = best_id;
            lat.cubes[best_id].members.push_back(static_cast<int>(p));
            lat.cubes[best_id].mass += mu.weights[p];
        }
        lat.levels.push_back(std::move(level_ids));
        lat.atom_cube.push_back(std::move(map));
    }

    // doubling classification: mu(100 B(Q)) <= C0 mu(B(Q))
    for (Cube& q : lat.cubes) {
        const double inner = mass_in_ball(lat.mu, lat.mu.point(q.center_atom), q.r);
        const double outer = mass_in_ball(lat.mu, lat.mu.point(q.center_atom), 100.0 * q.r);
        q.doubling = outer <= lat.c0 * inner;
    }
    return lat;
}

inline bool doubling_flag(const CubeLattice& lat, int id) { return lat.cube(id).doubling; }

// delta_mu(Q, S) = sum over atoms y in 2B_S \ 2B_Q of w(y) / |y - x_Q|^n,
// for nested cubes Q inside S.
inline double delta_mu(const CubeLattice& lat, int q_id, int s_id, int n) {
    if (!lat.is_ancestor_or_self(s_id, q_id))
        throw std::invalid_argument("delta_mu: Q must be contained in S");
    const Cube& q = lat.cube(q_id);
    const Cube& s = lat.cube(s_id);
    const Eigen::VectorXd xq = lat.center(q_id);
    const Eigen::VectorXd xs = lat.center(s_id);
    const double rq = 56.0 * q.r, rs = 56.0 * s.r;
    return deterministic_sum(lat.mu.size(), [&](std::size_t y) {
        if (lat.mu.weights[y] <= 0.0) return 0.0;
        const Eigen::VectorXd p = lat.mu.point(y);
        if ((p - xs).norm() >= rs) return 0.0;  // outside 2B_S
        if ((p - xq).norm() < rq) return 0.0;   // inside 2B_Q
        return lat.mu.weights[y] / std::pow((p - xq).norm(), n);
    });
}

// Maximal doubling cubes strictly below Q, and the fraction of mu(Q) their
// union carries (mu-almost all of Q in the continuum; finite data reports
// what it achieves).
struct DoublingCover {
    std::vector<int> cubes;
    double mass = 0.0;
    double fraction = 0.0;
};

inline DoublingCover maximal_doubling_descendants(const CubeLattice& lat, int q_id) {
    DoublingCover cover;
    std::vector<int> stack(lat.cube(q_id).children.begin(), lat.cube(q_id).children.end());
    while (!stack.empty()) {
        const int c = stack.back();
        stack.pop_back();
        if (lat.cube(c).doubling) {
            cover.cubes.push_back(c);
            cover.mass += lat.cube(c).mass;
        } else {
            for (const int g : lat.cube(c).children) stack.push_back(g);
        }
    }
    std::sort(cover.cubes.begin(), cover.cubes.end());
    const double qmass = lat.cube(q_id).mass;
    cover.fraction = qmass > 0.0 ? cover.mass / qmass : 0.0;
    return cover;
}

// For a chain Q c S c R whose strictly intermediate cubes are all
// non-doubling, returns (sum over the chain of Theta(100 B(S))) /
// Theta(100 B(R)). Diagnostic for the density-sum lemma.
inline double doubling_ancestor_density_check(const CubeLattice& lat, int q_id, int r_id, int n) {
    if (!lat.is_ancestor_or_self(r_id, q_id))
        throw std::invalid_argument("doubling_ancestor_density_check: Q must be inside R");
    double sum = 0.0;
    for (int id = q_id;; id = lat.cube(id).parent) {
        if (id != q_id && id != r_id && lat.cube(id).doubling)
            throw std::invalid_argument(
                "doubling_ancestor_density_check: intermediate cube is doubling");
        sum += lat.theta_100b(id, n);
        if (id == r_id) break;
    }
    const double denom = lat.theta_100b(r_id, n);
    return denom > 0.0 ? sum / denom : 0.0;
}

struct LatticeInvariantReport {
    bool partition_ok = true;
    bool nesting_ok = true;
    bool ball28_ok = true;
    bool separation_ok = true;
    int containment_violations = 0;  // points inside B(Q) of a foreign same-level cube
    int points = 0;
    double containment_violation_fraction = 0.0;
};

inline LatticeInvariantReport verify_lattice_invariants(const CubeLattice& lat) {
    LatticeInvariantReport rep;
    const auto sup = lat.mu.support();
    rep.points = static_cast<int>(sup.size());

    for (std::size_t k = 0; k < lat.levels.size(); ++k) {
        // each support atom appears in exactly one cube per level
        std::vector<int> seen(lat.mu.size(), 0);
        for (const int q : lat.levels[k])
            for (const int a : lat.cube(q).members) ++seen[a];
        for (const std::size_t a : sup)
            if (seen[a] != 1) rep.partition_ok = false;

        for (const int q : lat.levels[k]) {
            const Cube& cube = lat.cube(q);
            // members within 28 r of the center
            for (const int a : cube.members)
                if ((lat.mu.point(a) - lat.center(q)).norm() > 28.0 * cube.r)
                    rep.ball28_ok = false;
            // children members nest inside the parent
            if (cube.parent != -1) {
                const auto& pm = lat.cube(cube.parent).members;
                for (const int a : cube.members)
                    if (!std::binary_search(pm.begin(), pm.end(), a)) rep.nesting_ok = false;
            }
        }
        // same-level centers are > 10 max(r, r') apart
        for (std::size_t i = 0; i < lat.levels[k].size(); ++i)
            for (std::size_t j = i + 1; j < lat.levels[k].size(); ++j) {
                const Cube& a = lat.cube(lat.levels[k][i]);
                const Cube& b = lat.cube(lat.levels[k][j]);
                const double d = (lat.mu.point(a.center_atom) - lat.mu.point(b.center_atom)).norm();
                if (d <= 10.0 * std::max(a.r, b.r)) rep.separation_ok = false;
            }
    }

    // W cap B(Q) subset Q is only statistical: count support points caught
    // inside the defining ball of a same-level cube they do not belong to
    std::vector<char> violated(lat.mu.size(), 0);
    for (std::size_t k = 0; k < lat.levels.size(); ++k) {
        for (const int q : lat.levels[k]) {
            const Cube& cube = lat.cube(q);
            for (const std::size_t a : sup) {
                if (lat.atom_cube[k][a] == q) continue;
                if ((lat.mu.point(a) - lat.center(q)).norm() < cube.r) violated[a] = 1;
            }
        }
    }
    for (const std::size_t a : sup) rep.containment_violations += violated[a];
    rep.containment_violation_fraction =
        rep.points > 0 ? static_cast<double>(rep.containment_violations) / rep.points : 0.0;
    return rep;
}

// Fraction of mass within lambda * l(Q) of a cell boundary, per level: the
// interior part (atoms of Q near atoms outside Q) plus the collar part
// (atoms of 3.5 B_Q outside Q near Q), normalized by the mass of 3.5 B_Q.
struct BoundaryProfile {
    std::vector<double> lambdas;
    std::vector<std::vector<double>> fraction_by_level;
};

inline BoundaryProfile boundary_mass_profile(const CubeLattice& lat,
                                             const std::vector<double>& lambdas) {
    BoundaryProfile prof;
    prof.lambdas = lambdas;
    const auto sup = lat.mu.support();
    for (std::size_t k = 0; k < lat.levels.size(); ++k) {
        // per atom: distance to the nearest atom in another cell of this level
        std::vector<double> wall(lat.mu.size(), std::numeric_limits<double>::infinity());
        for (std::size_t a = 0; a < sup.size(); ++a)
            for (std::size_t b = a + 1; b < sup.size(); ++b) {
                if (lat.atom_cube[k][sup[a]] == lat.atom_cube[k][sup[b]]) continue;
                const double d = (lat.mu.point(sup[a]) - lat.mu.point(sup[b])).norm();
                wall[sup[a]] = std::min(wall[sup[a]], d);
                wall[sup[b]] = std::min(wall[sup[b]], d);
            }

        std::vector<double> near(lambdas.size(), 0.0);
        double total = 0.0;
        for (const int q : lat.levels[k]) {
            const Cube& cube = lat.cube(q);
            const double collar = 3.5 * 28.0 * cube.r;
            for (const std::size_t a : sup) {
                if ((lat.mu.point(a) - lat.center(q)).norm() >= collar) continue;
                total += lat.mu.weights[a];
                double dist;
                if (lat.atom_cube[k][a] == q) {
                    dist = wall[a];
                } else {
                    dist = std::numeric_limits<double>::infinity();
                    for (const int m : cube.members)
                        dist = std::min(dist, (lat.mu.point(a) - lat.mu.point(m)).norm());
                }
                for (std::size_t l = 0; l < lambdas.size(); ++l)
                    if (dist <= lambdas[l] * lat.side_length(q)) near[l] += lat.mu.weights[a];
            }
        }
        std::vector<double> fractions(lambdas.size(), 0.0);
        for (std::size_t l = 0; l < lambdas.size(); ++l)
            fractions[l] = total > 0.0 ? near[l] / total : 0.0;
        prof.fraction_by_level.push_back(std::move(fractions));
    }
    return prof;
}

inline void to_json(json& j, const Cube& q) {
    j = json{{"id", q.id},           {"level", q.level},   {"center_atom", q.center_atom},
             {"r", q.r},             {"mass", q.mass},     {"doubling", q.doubling},
             {"parent", q.parent},   {"children", q.children}, {"members", q.members}};
}

inline void to_json(json& j, const CubeLattice& lat) {
    j = json{{"a0", lat.a0},
             {"c0", lat.c0},
             {"k_max", lat.k_max},
             {"unit", lat.unit},
             {"num_levels", lat.levels.size()},
             {"forced_center_adds", lat.forced_center_adds},
             {"cubes", lat.cubes}};
}

}  // namespace gmtkit
