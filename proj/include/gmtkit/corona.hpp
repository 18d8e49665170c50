#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmtkit/energies.hpp"
#include "gmtkit/grassmann.hpp"
#include "gmtkit/lattice.hpp"

namespace gmtkit {

// Stopping-time parameters. The working regime is 0 < eps_stop << tau << 1
// << A and t > M > 1; only the ordering is enforced, the magnitudes are
// configuration.
struct CoronaParams {
    double A = 20.0;
    double tau = 0.05;
    double eps_stop = 0.002;
    double eta = 0.05;
    double M = 8.0;
    double t = 40.0;
    double lambda0 = 60.0;
    Cone cone;  // K(V0, s) with V0 in G(d, d-n)

    void validate(int ambient_dim) const {
        if (!(0.0 < eps_stop && eps_stop < tau && tau < 1.0 && 1.0 < A))
            throw std::invalid_argument("CoronaParams: need 0 < eps_stop < tau < 1 < A");
        if (!(t > M && M > 1.0)) throw std::invalid_argument("CoronaParams: need t > M > 1");
        if (cone.subspace.ambient_dim() != ambient_dim)
            throw std::invalid_argument("CoronaParams: cone dimension mismatch");
        if (!(cone.aperture > 0.0 && cone.aperture < 2.0))
            throw std::invalid_argument("CoronaParams: cone aperture must be in (0, 2)");
    }

    // codimension of the cone axis = dimension of the graphs built
    int n(int ambient_dim) const { return ambient_dim - cone.subspace.dim(); }

    double graph_slope() const {
        const double half = cone.aperture / 2.0;
        return std::sqrt(1.0 - half * half) / half;
    }
};

inline void to_json(json& j, const CoronaParams& p) {
    j = json{{"A", p.A},     {"tau", p.tau}, {"eps_stop", p.eps_stop}, {"eta", p.eta},
             {"M", p.M},     {"t", p.t},     {"lambda0", p.lambda0},   {"cone", p.cone}};
}

inline void from_json(const json& j, CoronaParams& p) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        static const std::vector<std::string> known{"A",       "tau", "eps_stop", "eta",
                                                    "M",       "t",   "lambda0",  "cone"};
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("CoronaParams: unknown field " + key);
    }
    if (j.contains("A")) p.A = j.at("A").get<double>();
    if (j.contains("tau")) p.tau = j.at("tau").get<double>();
    if (j.contains("eps_stop")) p.eps_stop = j.at("eps_stop").get<double>();
    if (j.contains("eta")) p.eta = j.at("eta").get<double>();
    if (j.contains("M")) p.M = j.at("M").get<double>();
    if (j.contains("t")) p.t = j.at("t").get<double>();
    if (j.contains("lambda0")) p.lambda0 = j.at("lambda0").get<double>();
    if (j.contains("cone")) p.cone = j.at("cone").get<Cone>();
}

// Cell energy E_mu(Q): the banded conical pair sum with x in 2B_Q and
// eta l(Q) <= |x - y| <= l(Q)/eta, divided by mu(Q). Scales like the density
// of 2B_Q.
inline double cell_energy(const CubeLattice& lat, int q_id, const Cone& cone, double eta, int n) {
    const Cube& q = lat.cube(q_id);
    if (q.mass <= 0.0) throw std::invalid_argument("cell_energy: cube carries no mass");
    const double ell = lat.side_length(q_id);
    const Ball window(lat.center(q_id), 56.0 * q.r);
    const EnergyReport band =
        banded_conical_energy(lat.mu, cone, n, eta * ell, ell / eta, window);
    return band.value / q.mass;
}

enum class StopReason { HD, LD, BCE };

inline const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::HD: return "HD";
        case StopReason::LD: return "LD";
        default: return "BCE";
    }
}

struct StopCube {
    int cube = -1;
    StopReason reason = StopReason::HD;
};

// Lipschitz graph over the base V0^perp fitted to anchor atoms by McShane
// extension, one inf-cone per fiber component. Retained anchor pairs satisfy
// the slope bound exactly; the model interpolates anchors exactly.
struct LipschitzGraphModel {
    Subspace base;    // V0^perp, dimension n
    Subspace normal;  // V0
    Eigen::MatrixXd anchor_base;   // n x m
    Eigen::MatrixXd anchor_fiber;  // (d-n) x m
    double slope = 0.0;
    std::vector<int> anchor_atoms;
    std::vector<int> excluded_atoms;

    int anchors() const { return static_cast<int>(anchor_base.cols()); }

    Eigen::VectorXd fiber_at(const Eigen::VectorXd& u) const {
        const int codim = static_cast<int>(anchor_fiber.rows());
        Eigen::VectorXd f(codim);
        for (int c = 0; c < codim; ++c) {
            double best = std::numeric_limits<double>::infinity();
            for (int a = 0; a < anchors(); ++a)
                best = std::min(best,
                                anchor_fiber(c, a) + slope * (u - anchor_base.col(a)).norm());
            f(c) = best;
        }
        return f;
    }

    Eigen::VectorXd graph_point(const Eigen::VectorXd& u) const {
        return base.basis * u + normal.basis * fiber_at(u);
    }

    // Upper bound on dist(z, graph): evaluate above the base projection of z.
    double distance_estimate(const Eigen::VectorXd& z) const {
        if (anchors() == 0) return std::numeric_limits<double>::infinity();
        const Eigen::VectorXd u = base.basis.transpose() * z;
        return (z - graph_point(u)).norm();
    }
};

struct TreeDecomposition {
    int root = -1;
    double theta_root = 0.0;  // Theta(2B_R)
    std::vector<StopCube> stop;
    std::vector<int> tree;                 // Tree(R), DFS order
    std::vector<int> next;                 // union of MD over stop cubes
    std::vector<int> good_atoms;           // atoms of R in no stop cube
    double good_mass = 0.0;
    std::map<int, double> cell_energies;   // E_mu(S) for S in Tree(R)
    std::optional<LipschitzGraphModel> graph;
};

// Depth-first stopping scan from a doubling root: a cube stops as HD if
// doubling with density >= A * Theta(2B_R), as LD if density <= tau *
// Theta(2B_R), as BCE if neither and the accumulated cell energy along its
// ancestor path reaches eps_stop * Theta(2B_R). First hit wins on each
// branch, so the stop family is maximal and disjoint.
inline TreeDecomposition stopping_decomposition(const CubeLattice& lat, int root,
                                                const CoronaParams& params) {
    params.validate(lat.mu.dim);
    if (!lat.cube(root).doubling)
        throw std::invalid_argument("stopping_decomposition: root must be doubling");
    const int n = params.n(lat.mu.dim);
    TreeDecomposition dec;
    dec.root = root;
    dec.theta_root = lat.theta_ball(root, 2.0, n);
    const double hd_threshold = params.A * dec.theta_root;
    const double ld_threshold = params.tau * dec.theta_root;
    const double bce_threshold = params.eps_stop * dec.theta_root;

    struct Frame {
        int cube;
        double path_energy;
    };
    std::vector<Frame> stack{{root, 0.0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const Cube& q = lat.cube(f.cube);
        const double theta_q = lat.theta_ball(f.cube, 2.0, n);
        const double e_q = cell_energy(lat, f.cube, params.cone, params.eta, n);
        const double path = f.path_energy + e_q;
        dec.tree.push_back(f.cube);
        dec.cell_energies[f.cube] = e_q;

        std::optional<StopReason> reason;
        if (f.cube != root) {
            if (q.doubling && theta_q >= hd_threshold) reason = StopReason::HD;
            else if (theta_q <= ld_threshold) reason = StopReason::LD;
        }
        if (!reason && path >= bce_threshold) reason = StopReason::BCE;

        if (reason) {
            dec.stop.push_back({f.cube, *reason});
            continue;
        }
        // push children in reverse so DFS visits them in id order
        for (auto it = q.children.rbegin(); it != q.children.rend(); ++it)
            stack.push_back({*it, path});
    }

    // Next(R) and the good set
    std::vector<char> in_stop_closure(lat.mu.size(), 0);
    for (const StopCube& s : dec.stop) {
        const DoublingCover md = maximal_doubling_descendants(lat, s.cube);
        dec.next.insert(dec.next.end(), md.cubes.begin(), md.cubes.end());
        for (const int a : lat.cube(s.cube).members) in_stop_closure[a] = 1;
    }
    std::sort(dec.next.begin(), dec.next.end());
    for (const int a : lat.cube(root).members) {
        if (in_stop_closure[a]) continue;
        dec.good_atoms.push_back(a);
        dec.good_mass += lat.mu.weights[a];
    }
    return dec;
}

namespace detail {

inline double cube_distance(const CubeLattice& lat, int a, int b) {
    double best = std::numeric_limits<double>::infinity();
    for (const int i : lat.cube(a).members)
        for (const int j : lat.cube(b).members)
            best = std::min(best, (lat.mu.point(i) - lat.mu.point(j)).norm());
    return best;
}

inline bool t_neighbors(const CubeLattice& lat, int a, int b, double t) {
    const double la = lat.side_length(a), lb = lat.side_length(b);
    if (la > t * lb || lb > t * la) return false;
    return cube_distance(lat, a, b) <= t * (la + lb);
}

}  // namespace detail

// Is y inside the half-aperture cone shadow of Q: K_Q^{1/2} = union of
// K(x, V0, s/2) over x in 2B_Q, tested against the atoms of 2B_Q with early
// exit.
inline bool in_cone_shadow(const CubeLattice& lat, int q_id, const Eigen::VectorXd& y,
                           const CoronaParams& params) {
    const Cone half(params.cone.subspace, params.cone.aperture / 2.0);
    const Eigen::VectorXd xq = lat.center(q_id);
    const double radius = 56.0 * lat.cube(q_id).r;
    for (const std::size_t a : lat.mu.support()) {
        const Eigen::VectorXd x = lat.mu.point(a);
        if ((x - xq).norm() >= radius) continue;
        if (cone_contains_vector(half, y - x)) return true;
    }
    return false;
}

// mu of the union over Q in J of K_Q^{1/2} cap (R \ M B_Q), for a disjoint
// family J of tree cubes.
inline double key_cone_mass(const CubeLattice& lat, const TreeDecomposition& dec,
                            const std::vector<int>& j_cubes, const CoronaParams& params) {
    for (std::size_t a = 0; a < j_cubes.size(); ++a)
        for (std::size_t b = a + 1; b < j_cubes.size(); ++b)
            if (lat.is_ancestor_or_self(j_cubes[a], j_cubes[b]) ||
                lat.is_ancestor_or_self(j_cubes[b], j_cubes[a]))
                throw std::invalid_argument("key_cone_mass: J must be pairwise disjoint");
    double mass = 0.0;
    for (const int atom : lat.cube(dec.root).members) {
        const Eigen::VectorXd y = lat.mu.point(atom);
        for (const int q : j_cubes) {
            if ((y - lat.center(q)).norm() < params.M * 28.0 * lat.cube(q).r) continue;
            if (in_cone_shadow(lat, q, y, params)) {
                mass += lat.mu.weights[atom];
                break;
            }
        }
    }
    return mass;
}

// Anchor collection and McShane fit. Anchors are the good atoms plus one
// point per cube of the filtered t-separated stop family; anchors whose
// difference with an earlier kept anchor lands in K(V0, s/2) are excluded
// (lowest index kept) and reported on the model.
inline LipschitzGraphModel fit_lipschitz_graph(const CubeLattice& lat,
                                               const TreeDecomposition& dec,
                                               const CoronaParams& params) {
    const Cone half(params.cone.subspace, params.cone.aperture / 2.0);

    // Sep(R): greedy maximal t-separated subfamily of Stop(R)
    std::vector<int> sep;
    for (const StopCube& s : dec.stop) {
        bool ok = true;
        for (const int q : sep)
            if (detail::t_neighbors(lat, s.cube, q, params.t)) {
                ok = false;
                break;
            }
        if (ok) sep.push_back(s.cube);
    }

    // filtered family: 2M B_Q misses the good set and contains no other
    // 2M B_{Q'}
    std::vector<int> sep_filtered;
    for (const int q : sep) {
        const double rq = 2.0 * params.M * 28.0 * lat.cube(q).r;
        bool keep = true;
        for (const int a : dec.good_atoms)
            if ((lat.mu.point(a) - lat.center(q)).norm() < rq) {
                keep = false;
                break;
            }
        if (keep)
            for (const int p : sep) {
                if (p == q) continue;
                const double rp = 2.0 * params.M * 28.0 * lat.cube(p).r;
                if ((lat.center(p) - lat.center(q)).norm() + rp <= rq) {
                    keep = false;
                    break;
                }
            }
        if (keep) sep_filtered.push_back(q);
    }

    std::vector<int> candidates = dec.good_atoms;
    for (const int q : sep_filtered) candidates.push_back(lat.cube(q).center_atom);

    LipschitzGraphModel model;
    model.normal = params.cone.subspace;
    model.base = params.cone.subspace.complement();
    model.slope = params.graph_slope();

    std::vector<int> kept;
    for (const int a : candidates) {
        bool ok = true;
        for (const int b : kept)
            if (cone_contains_vector(half, lat.mu.point(a) - Eigen::VectorXd(lat.mu.point(b)))) {
                ok = false;
                break;
            }
        if (ok) kept.push_back(a);
        else model.excluded_atoms.push_back(a);
    }
    if (kept.empty()) throw std::runtime_error("fit_lipschitz_graph: no anchors");

    const int n = model.base.dim();
    const int codim = model.normal.dim();
    model.anchor_base.resize(n, kept.size());
    model.anchor_fiber.resize(codim, kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const Eigen::VectorXd x = lat.mu.point(kept[i]);
        model.anchor_base.col(i) = model.base.basis.transpose() * x;
        model.anchor_fiber.col(i) = model.normal.basis.transpose() * x;
    }
    model.anchor_atoms = kept;
    return model;
}

struct CoronaForest {
    std::vector<std::vector<int>> layers;  // root cube ids per layer
    std::vector<TreeDecomposition> trees;  // one per root, layer by layer
    std::vector<char> id_flag;             // increasing-density roots
    double packing_numerator = 0.0;        // sum of Theta(2B_R) mu(R)

    const TreeDecomposition& tree_of(int root) const {
        for (const auto& t : trees)
            if (t.root == root) return t;
        throw std::out_of_range("CoronaForest: unknown root");
    }
};

// Iterates the stopping decomposition from the root cell: layer k+1 roots
// are the union of Next over layer-k roots. Roots are doubling by
// construction of Next (and the lattice root by normalization). The ID flag
// marks roots whose HD cubes carry at least half the mass.
inline CoronaForest build_forest(const CubeLattice& lat, const CoronaParams& params,
                                 bool fit_graphs = true) {
    params.validate(lat.mu.dim);
    const int n = params.n(lat.mu.dim);
    CoronaForest forest;
    std::vector<int> layer{lat.root()};
    while (!layer.empty()) {
        forest.layers.push_back(layer);
        std::vector<int> next_layer;
        for (const int root : layer) {
            TreeDecomposition dec = stopping_decomposition(lat, root, params);
            if (fit_graphs) dec.graph = fit_lipschitz_graph(lat, dec, params);
            double hd_mass = 0.0;
            for (const StopCube& s : dec.stop)
                if (s.reason == StopReason::HD) hd_mass += lat.cube(s.cube).mass;
            forest.id_flag.push_back(hd_mass >= 0.5 * lat.cube(root).mass ? 1 : 0);
            forest.packing_numerator +=
                lat.theta_ball(root, 2.0, n) * lat.cube(root).mass;
            next_layer.insert(next_layer.end(), dec.next.begin(), dec.next.end());
            forest.trees.push_back(std::move(dec));
        }
        std::sort(next_layer.begin(), next_layer.end());
        layer = std::move(next_layer);
    }
    return forest;
}

struct PackingReport {
    double numerator = 0.0;    // sum over Top of Theta(2B_R) mu(R)
    double mass = 0.0;         // mu(R_0)
    double conical = 0.0;      // conical energy of the whole measure
    double denominator = 0.0;  // mass + conical
    double ratio = 0.0;
};

inline void to_json(json& j, const PackingReport& r) {
    j = json{{"numerator", r.numerator},
             {"mass", r.mass},
             {"conical", r.conical},
             {"denominator", r.denominator},
             {"ratio", r.ratio}};
}

inline PackingReport packing_report(const CubeLattice& lat, const CoronaForest& forest,
                                    const CoronaParams& params, double eps) {
    PackingReport rep;
    rep.numerator = forest.packing_numerator;
    rep.mass = total_mass(lat.mu);
    rep.conical = conical_energy(lat.mu, params.cone, params.n(lat.mu.dim), eps).value;
    rep.denominator = rep.mass + rep.conical;
    rep.ratio = rep.denominator > 0.0 ? rep.numerator / rep.denominator : 0.0;
    return rep;
}

struct RootVerification {
    int root = -1;
    double good_mass = 0.0;
    double good_fraction_on_graph = 0.0;   // (a)
    double max_delta_ratio = 0.0;          // (b): max over Next of delta(Q, ~Q)/Theta_R
    double max_theta_ratio = 0.0;          // (c): max over Tr(R) of Theta(2B_Q)/Theta_R
    double ld_mass_ratio = 0.0;            // vs tau^{1/2}
    double bce_mass = 0.0;                 // lhs of the BCE bound
    double bce_bound = 0.0;                // rhs of the BCE bound
    bool bce_ok = true;
    bool id_root = false;
    double id_lhs = 0.0;                   // Theta_R mu(R)
    double id_rhs = 0.0;                   // half the Next density sum
};

// Post-pass over a fitted forest: per root, (a) how much good mass lands on
// the graph, (b) the density-ratio cost of routing Next cubes to the graph,
// (c) the tree density bound, plus the LD/BCE mass bounds and the ID
// recursion inequality.
inline std::vector<RootVerification> verify_corona_properties(const CubeLattice& lat,
                                                              const CoronaForest& forest,
                                                              const CoronaParams& params,
                                                              double tol) {
    const int n = params.n(lat.mu.dim);
    std::vector<RootVerification> out;
    const int deepest = static_cast<int>(lat.levels.size()) - 1;
    for (std::size_t tree_idx = 0; tree_idx < forest.trees.size(); ++tree_idx) {
        const TreeDecomposition& dec = forest.trees[tree_idx];
        RootVerification v;
        v.root = dec.root;
        v.good_mass = dec.good_mass;
        v.id_root = forest.id_flag[tree_idx] != 0;

        // (a) good atoms close to the graph at their finest resolved scale
        if (dec.graph && dec.good_mass > 0.0) {
            double on_graph = 0.0;
            for (const int a : dec.good_atoms) {
                const int cell = lat.atom_cube[deepest][a];
                const double scale = lat.side_length(cell);
                if (dec.graph->distance_estimate(lat.mu.point(a)) <= tol * scale)
                    on_graph += lat.mu.weights[a];
            }
            v.good_fraction_on_graph = on_graph / dec.good_mass;
        } else if (dec.good_mass == 0.0) {
            v.good_fraction_on_graph = 1.0;
        }

        // (b) for each Next cube, first ancestor whose doubled ball meets the
        // graph
        for (const int q : dec.next) {
            int probe = q;
            int found = dec.root;
            while (true) {
                if (dec.graph &&
                    dec.graph->distance_estimate(lat.center(probe)) < 56.0 * lat.cube(probe).r) {
                    found = probe;
                    break;
                }
                if (probe == dec.root) break;
                probe = lat.cube(probe).parent;
            }
            const double ratio =
                dec.theta_root > 0.0 ? delta_mu(lat, q, found, n) / dec.theta_root : 0.0;
            v.max_delta_ratio = std::max(v.max_delta_ratio, ratio);
        }

        // (c) over Tr(R): descendants of R not inside any Next cube
        for (const int q : lat.descendants(dec.root)) {
            bool inside_next = false;
            for (const int p : dec.next)
                if (lat.is_ancestor_or_self(p, q)) {
                    inside_next = true;
                    break;
                }
            if (inside_next) continue;
            const double ratio =
                dec.theta_root > 0.0 ? lat.theta_ball(q, 2.0, n) / dec.theta_root : 0.0;
            v.max_theta_ratio = std::max(v.max_theta_ratio, ratio);
        }

        // LD and BCE mass bounds
        double ld_mass = 0.0;
        for (const StopCube& s : dec.stop) {
            if (s.reason == StopReason::LD) ld_mass += lat.cube(s.cube).mass;
            if (s.reason == StopReason::BCE) v.bce_mass += lat.cube(s.cube).mass;
        }
        const double root_mass = lat.cube(dec.root).mass;
        v.ld_mass_ratio = root_mass > 0.0 ? ld_mass / root_mass : 0.0;
        double tree_energy_mass = 0.0;
        for (const int s : dec.tree) tree_energy_mass += dec.cell_energies.at(s) * lat.cube(s).mass;
        v.bce_bound = dec.theta_root > 0.0
                          ? tree_energy_mass / (params.eps_stop * dec.theta_root)
                          : 0.0;
        v.bce_ok = v.bce_mass <= v.bce_bound * (1.0 + 1e-12) + 1e-300;

        // ID recursion inequality
        v.id_lhs = dec.theta_root * root_mass;
        double next_sum = 0.0;
        for (const int q : dec.next) next_sum += lat.theta_ball(q, 2.0, n) * lat.cube(q).mass;
        v.id_rhs = 0.5 * next_sum;

        out.push_back(std::move(v));
    }
    return out;
}

inline void to_json(json& j, const RootVerification& v) {
    j = json{{"root", v.root},
             {"good_mass", v.good_mass},
             {"good_fraction_on_graph", v.good_fraction_on_graph},
             {"max_delta_ratio", v.max_delta_ratio},
             {"max_theta_ratio", v.max_theta_ratio},
             {"ld_mass_ratio", v.ld_mass_ratio},
             {"bce_mass", v.bce_mass},
             {"bce_bound", v.bce_bound},
             {"bce_ok", v.bce_ok},
             {"id_root", v.id_root},
             {"id_lhs", v.id_lhs},
             {"id_rhs", v.id_rhs}};
}

inline void to_json(json& j, const TreeDecomposition& dec) {
    json stop = json::array();
    for (const StopCube& s : dec.stop)
        stop.push_back(json{{"cube", s.cube}, {"reason", stop_reason_name(s.reason)}});
    j = json{{"root", dec.root},
             {"theta_root", dec.theta_root},
             {"stop", stop},
             {"tree", dec.tree},
             {"next", dec.next},
             {"good_mass", dec.good_mass},
             {"good_atoms", dec.good_atoms}};
    if (dec.graph) {
        j["graph"] = json{{"slope", dec.graph->slope},
                          {"anchors", dec.graph->anchors()},
                          {"excluded", dec.graph->excluded_atoms.size()}};
    }
}

inline void to_json(json& j, const CoronaForest& forest) {
    j = json{{"layers", forest.layers},
             {"packing_numerator", forest.packing_numerator},
             {"trees", forest.trees}};
    json flags = json::array();
    for (const char f : forest.id_flag) flags.push_back(f != 0);
    j["id_flags"] = flags;
}

}  // namespace gmtkit
