#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmtkit/rng.hpp"

namespace gmtkit {

using json = nlohmann::json;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Linear n-dimensional subspace of R^d, held as an orthonormal basis in the
// columns of a d x n matrix.
struct Subspace {
    Eigen::MatrixXd basis;  // d x n, orthonormal columns

    Subspace() = default;
    explicit Subspace(Eigen::MatrixXd b) : basis(std::move(b)) {
        if (basis.cols() < 1 || basis.cols() >= basis.rows())
            throw std::invalid_argument("Subspace: need 0 < n < d");
        if ((basis.transpose() * basis - Eigen::MatrixXd::Identity(basis.cols(), basis.cols()))
                .cwiseAbs()
                .maxCoeff() > 1e-10)
            throw std::invalid_argument("Subspace: basis columns not orthonormal");
    }

    int ambient_dim() const { return static_cast<int>(basis.rows()); }
    int dim() const { return static_cast<int>(basis.cols()); }

    Eigen::MatrixXd projector() const { return basis * basis.transpose(); }

    // Orthonormal basis of the orthogonal complement, deterministic.
    Subspace complement() const {
        const int d = ambient_dim(), n = dim();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
        Subspace out;
        out.basis = q.rightCols(d - n);
        return out;
    }

    // Line in the plane at angle theta from the positive x-axis.
    static Subspace line_at_angle(double theta) {
        Eigen::MatrixXd b(2, 1);
        b << std::cos(theta), std::sin(theta);
        Subspace s;
        s.basis = b;
        return s;
    }

    // Coordinate axis e_i in R^d.
    static Subspace axis(int d, int i) {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, 1);
        b(i, 0) = 1.0;
        Subspace s;
        s.basis = b;
        return s;
    }
};

inline Eigen::VectorXd project_point(const Subspace& v, const Eigen::VectorXd& x) {
    if (x.size() != v.ambient_dim())
        throw std::invalid_argument("project_point: dimension mismatch");
    return v.basis * (v.basis.transpose() * x);
}

// Operator-norm distance ||P_V - P_W||, in [0, 1].
inline double grassmann_metric(const Subspace& v, const Subspace& w) {
    if (v.ambient_dim() != w.ambient_dim() || v.dim() != w.dim())
        throw std::invalid_argument("grassmann_metric: shape mismatch");
    const Eigen::MatrixXd diff = v.projector() - w.projector();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Open cone K(apex, V, s) = { z : dist(z - apex, V) < s * |z - apex| }.
// The apex itself is excluded.
struct Cone {
    Eigen::VectorXd apex;
    Subspace subspace;
    double aperture = 0.0;

    Cone() = default;
    Cone(Subspace v, double s)
        : apex(Eigen::VectorXd::Zero(v.ambient_dim())), subspace(std::move(v)), aperture(s) {
        if (s <= 0.0) throw std::invalid_argument("Cone: aperture must be positive");
    }
    Cone(Eigen::VectorXd z, Subspace v, double s)
        : apex(std::move(z)), subspace(std::move(v)), aperture(s) {
        if (s <= 0.0) throw std::invalid_argument("Cone: aperture must be positive");
        if (apex.size() != subspace.ambient_dim())
            throw std::invalid_argument("Cone: apex dimension mismatch");
    }
};

// Membership test by squared distances: |w - P_V w|^2 < s^2 |w|^2.
inline bool cone_contains_vector(const Cone& k, const Eigen::VectorXd& w) {
    const double norm2 = w.squaredNorm();
    if (norm2 == 0.0) return false;
    const Eigen::VectorXd pw = k.subspace.basis * (k.subspace.basis.transpose() * w);
    return (w - pw).squaredNorm() < k.aperture * k.aperture * norm2;
}

inline bool cone_contains(const Cone& k, const Eigen::VectorXd& z) {
    return cone_contains_vector(k, z - k.apex);
}

// Angular interval [theta_lo, theta_hi) of line directions in the plane,
// angles mod pi.
struct AngularInterval {
    double theta_lo = 0.0;
    double theta_hi = 0.0;

    double length() const { return theta_hi - theta_lo; }
    double midpoint() const { return 0.5 * (theta_lo + theta_hi); }

    AngularInterval perp() const {
        return AngularInterval{theta_lo + kPi / 2.0, theta_hi + kPi / 2.0};
    }

    void validate() const {
        if (!(theta_hi > theta_lo) || theta_hi - theta_lo > kPi)
            throw std::invalid_argument("AngularInterval: need 0 < length <= pi");
    }
};

// Metric ball of subspaces around a center.
struct GrassmannBall {
    Subspace center;
    double radius = 0.0;
};

using DirectionSet = std::variant<AngularInterval, GrassmannBall>;

// The planar cone over an angle set, K_I = { r e^{i theta} : theta in I },
// stored through its bisector line and aperture sin(|I|/2); membership then
// coincides with "angle mod pi lies in the open interval".
inline Cone planar_cone(const AngularInterval& interval) {
    interval.validate();
    return Cone(Subspace::line_at_angle(interval.midpoint()), std::sin(interval.length() / 2.0));
}

// Haar-uniform subspace: orthonormalized standard normal d x n matrix.
inline Subspace sample_uniform_subspace(int d, int n, Rng& rng) {
    if (n <= 0 || n >= d) throw std::invalid_argument("sample_uniform_subspace: need 0 < n < d");
    Eigen::MatrixXd g(d, n);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, n);
    Subspace s;
    s.basis = q;
    return s;
}

struct BallVolumeEstimate {
    double fraction = 0.0;
    double std_error = 0.0;
    long long hits = 0;
    long long samples = 0;
};

// Monte Carlo mass of the metric ball B(center, delta) under the uniform law.
inline BallVolumeEstimate grassmann_ball_volume_mc(const Subspace& center, double delta,
                                                   long long num_samples, Rng& rng) {
    if (num_samples <= 0) throw std::invalid_argument("grassmann_ball_volume_mc: num_samples > 0");
    if (delta <= 0.0 || delta > 1.0)
        throw std::invalid_argument("grassmann_ball_volume_mc: need 0 < delta <= 1");
    const int d = center.ambient_dim(), n = center.dim();
    long long hits = 0;
    for (long long i = 0; i < num_samples; ++i) {
        const Subspace s = sample_uniform_subspace(d, n, rng);
        if (grassmann_metric(s, center) < delta) ++hits;
    }
    BallVolumeEstimate est;
    est.hits = hits;
    est.samples = num_samples;
    est.fraction = static_cast<double>(hits) / static_cast<double>(num_samples);
    est.std_error = std::sqrt(est.fraction * (1.0 - est.fraction) / static_cast<double>(num_samples));
    return est;
}

// Fixed isometric embedding of R^{d-1} onto the hyperplane orthogonal to x:
// Gram-Schmidt of the standard basis against x/|x|, keeping the first d-1
// survivors. Coordinate axes orthogonal to x map to themselves.
inline Eigen::MatrixXd orthogonal_complement_frame(const Eigen::VectorXd& x) {
    const int d = static_cast<int>(x.size());
    if (x.norm() == 0.0) throw std::invalid_argument("orthogonal_complement_frame: x must be nonzero");
    Eigen::MatrixXd frame(d, d - 1);
    Eigen::VectorXd u = x / x.norm();
    int col = 0;
    for (int i = 0; i < d && col < d - 1; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e(i) = 1.0;
        e -= u * u.dot(e);
        for (int j = 0; j < col; ++j) e -= frame.col(j) * frame.col(j).dot(e);
        const double norm = e.norm();
        if (norm > 1e-12) frame.col(col++) = e / norm;
    }
    if (col != d - 1) throw std::runtime_error("orthogonal_complement_frame: degenerate frame");
    return frame;
}

// Lift of an (n-1)-dimensional subspace of R^{d-1} to the n-dimensional
// subspace span(A V, x) of R^d; a metric isometry onto the subspaces
// containing x.
inline Subspace lift_isometry(const Eigen::VectorXd& x, const Subspace& v_small) {
    const int d = static_cast<int>(x.size());
    if (v_small.ambient_dim() != d - 1)
        throw std::invalid_argument("lift_isometry: v_small must live in R^{d-1}");
    const Eigen::MatrixXd a = orthogonal_complement_frame(x);
    Eigen::MatrixXd b(d, v_small.dim() + 1);
    b.leftCols(v_small.dim()) = a * v_small.basis;
    b.col(v_small.dim()) = x / x.norm();
    Subspace out;
    out.basis = b;
    return out;
}

inline void to_json(json& j, const Subspace& s) {
    std::vector<std::vector<double>> cols;
    for (int c = 0; c < s.dim(); ++c) {
        std::vector<double> col(s.ambient_dim());
        for (int r = 0; r < s.ambient_dim(); ++r) col[r] = s.basis(r, c);
        cols.push_back(std::move(col));
    }
    j = json{{"columns", cols}};
}

inline void from_json(const json& j, Subspace& s) {
    const auto cols = j.at("columns").get<std::vector<std::vector<double>>>();
    if (cols.empty()) throw std::invalid_argument("Subspace: empty basis");
    Eigen::MatrixXd b(cols[0].size(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < cols[c].size(); ++r) b(r, c) = cols[c][r];
    s = Subspace(b);
}

inline void to_json(json& j, const Cone& k) {
    j = json{{"apex", std::vector<double>(k.apex.data(), k.apex.data() + k.apex.size())},
             {"subspace", k.subspace},
             {"aperture", k.aperture}};
}

inline void from_json(const json& j, Cone& k) {
    Subspace s = j.at("subspace").get<Subspace>();
    const double aperture = j.at("aperture").get<double>();
    Eigen::VectorXd apex = Eigen::VectorXd::Zero(s.ambient_dim());
    if (j.contains("apex")) {
        const auto v = j.at("apex").get<std::vector<double>>();
        apex = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
    }
    k = Cone(apex, std::move(s), aperture);
}

inline void to_json(json& j, const DirectionSet& ds) {
    if (const auto* iv = std::get_if<AngularInterval>(&ds)) {
        j = json{{"type", "interval"}, {"theta_lo", iv->theta_lo}, {"theta_hi", iv->theta_hi}};
    } else {
        const auto& ball = std::get<GrassmannBall>(ds);
        j = json{{"type", "ball"}, {"center", ball.center}, {"radius", ball.radius}};
    }
}

inline void from_json(const json& j, DirectionSet& ds) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "interval") {
        AngularInterval iv{j.at("theta_lo").get<double>(), j.at("theta_hi").get<double>()};
        iv.validate();
        ds = iv;
    } else if (type == "ball") {
        GrassmannBall ball;
        ball.center = j.at("center").get<Subspace>();
        ball.radius = j.at("radius").get<double>();
        if (ball.radius <= 0.0) throw std::invalid_argument("GrassmannBall: radius must be positive");
        ds = ball;
    } else {
        throw std::invalid_argument("DirectionSet: unknown type " + type);
    }
}

}  // namespace gmtkit
