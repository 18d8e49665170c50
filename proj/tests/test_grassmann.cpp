#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "gmtkit/grassmann.hpp"

using namespace gmtkit;

TEST_CASE("project point") {
    const auto x_axis = Subspace::axis(2, 0);
    CHECK(project_point(x_axis, Eigen::Vector2d(3, 4)).isApprox(Eigen::Vector2d(3, 0)));

    // idempotence on a member
    const Eigen::Vector2d inside(2.5, 0.0);
    CHECK(project_point(x_axis, inside).isApprox(inside));

    const auto diag = Subspace::line_at_angle(kPi / 4.0);
    CHECK(project_point(diag, Eigen::Vector2d(1, 0)).isApprox(Eigen::Vector2d(0.5, 0.5), 1e-12));
}

TEST_CASE("projector idempotence and symmetry") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + static_cast<int>(rng.uniform() * 6);
        const int n = 1 + static_cast<int>(rng.uniform() * (d - 1));
        const Subspace v = sample_uniform_subspace(d, n, rng);
        const Eigen::MatrixXd p = v.projector();
        CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("grassmann metric") {
    const auto x_axis = Subspace::axis(2, 0);
    const auto y_axis = Subspace::axis(2, 1);
    CHECK(grassmann_metric(x_axis, x_axis) == 0.0);
    CHECK_THAT(grassmann_metric(x_axis, y_axis), Catch::Matchers::WithinAbs(1.0, 1e-12));

    for (double theta : {0.1, 0.4, 1.0, 1.5}) {
        CHECK_THAT(grassmann_metric(x_axis, Subspace::line_at_angle(theta)),
                   Catch::Matchers::WithinAbs(std::abs(std::sin(theta)), 1e-12));
    }

    Eigen::MatrixXd b(3, 1);
    b << 1, 0, 0;
    CHECK_THROWS_AS(grassmann_metric(x_axis, Subspace(b)), std::invalid_argument);
}

TEST_CASE("grassmann metric triangle inequality") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const Subspace a = sample_uniform_subspace(4, 2, rng);
        const Subspace b = sample_uniform_subspace(4, 2, rng);
        const Subspace c = sample_uniform_subspace(4, 2, rng);
        CHECK(grassmann_metric(a, c) <= grassmann_metric(a, b) + grassmann_metric(b, c) + 1e-10);
    }
}

TEST_CASE("cone membership") {
    const Cone k_x(Subspace::axis(2, 0), 0.1);
    CHECK(cone_contains(k_x, Eigen::Vector2d(1, 0)));
    CHECK_FALSE(cone_contains(Cone(Subspace::axis(2, 1), 0.1), Eigen::Vector2d(1, 0)));
    CHECK_FALSE(cone_contains(k_x, Eigen::Vector2d(0, 0)));  // apex excluded

    // symmetric and scale invariant
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::Vector2d z(rng.normal(), rng.normal());
        const bool in = cone_contains(k_x, z);
        CHECK(cone_contains(k_x, Eigen::Vector2d(-z)) == in);
        CHECK(cone_contains(k_x, Eigen::Vector2d(2 * z)) == in);
    }

    // shifted apex
    const Cone shifted(Eigen::Vector2d(1, 1), Subspace::axis(2, 0), 0.5);
    CHECK(cone_contains(shifted, Eigen::Vector2d(3, 1)));
    CHECK_FALSE(cone_contains(shifted, Eigen::Vector2d(1, 3)));
}

TEST_CASE("planar cone matches angle-interval membership") {
    const AngularInterval interval{0.3, 1.1};
    const Cone cone = planar_cone(interval);
    Rng rng(13);
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Vector2d z(rng.normal(), rng.normal());
        if (z.norm() == 0.0) continue;
        double angle = std::atan2(z.y(), z.x());
        if (angle < 0.0) angle += kPi;
        if (angle >= kPi) angle -= kPi;
        const bool in_angles = angle > interval.theta_lo && angle < interval.theta_hi;
        CHECK(cone_contains(cone, z) == in_angles);
    }
}

TEST_CASE("uniform subspace sampling") {
    Rng rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        const Subspace v = sample_uniform_subspace(5, 2, rng);
        CHECK((v.basis.transpose() * v.basis - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <
              1e-10);
    }

    // determinism
    Rng a(9), b(9);
    CHECK(sample_uniform_subspace(3, 1, a).basis == sample_uniform_subspace(3, 1, b).basis);

    // d=2, n=1: the line angle is uniform on [0, pi)
    Rng ks_rng(4711);
    const int n_samples = 10000;
    std::vector<double> angles(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const Subspace v = sample_uniform_subspace(2, 1, ks_rng);
        double angle = std::atan2(v.basis(1, 0), v.basis(0, 0));
        if (angle < 0.0) angle += kPi;
        if (angle >= kPi) angle -= kPi;
        angles[i] = angle / kPi;
    }
    std::sort(angles.begin(), angles.end());
    double ks = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        ks = std::max(ks, std::abs(angles[i] - (i + 1.0) / n_samples));
        ks = std::max(ks, std::abs(angles[i] - static_cast<double>(i) / n_samples));
    }
    CHECK(ks < 0.02);
}

TEST_CASE("ball volume monte carlo") {
    Rng rng(321);
    const auto center = Subspace::line_at_angle(0.7);
    CHECK(grassmann_ball_volume_mc(center, 1.0, 500, rng).fraction == 1.0);

    // planar arc fraction: ball of radius sin(0.3) is the arc of half-width
    // 0.3, so the mass is 0.6 / pi
    Rng rng2(654);
    const auto est = grassmann_ball_volume_mc(center, std::sin(0.3), 20000, rng2);
    const double exact = 0.6 / kPi;
    CHECK(std::abs(est.fraction - exact) < 3.0 * est.std_error + 1e-12);

    CHECK_THROWS_AS(grassmann_ball_volume_mc(center, 0.5, 0, rng), std::invalid_argument);
}

TEST_CASE("lift isometry") {
    // explicit construction in R^3
    const Eigen::Vector3d e3(0, 0, 1);
    const auto v_small = Subspace::axis(2, 0);
    const Subspace lifted = lift_isometry(e3, v_small);
    REQUIRE(lifted.dim() == 2);
    const Eigen::MatrixXd p = lifted.projector();
    CHECK(p.isApprox((Eigen::Matrix3d() << 1, 0, 0, 0, 0, 0, 0, 0, 1).finished(), 1e-12));

    Rng rng(88);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x(i) = rng.normal();
        const Subspace a = sample_uniform_subspace(3, 2, rng);
        const Subspace b = sample_uniform_subspace(3, 2, rng);
        const Subspace la = lift_isometry(x, a);
        const Subspace lb = lift_isometry(x, b);
        // metric preserved
        CHECK(std::abs(grassmann_metric(la, lb) - grassmann_metric(a, b)) < 1e-10);
        // contains x
        CHECK((project_point(la, x) - x).norm() < 1e-10);
        CHECK((project_point(lb, x) - x).norm() < 1e-10);
    }

    CHECK_THROWS_AS(lift_isometry(Eigen::Vector3d::Zero(), v_small), std::invalid_argument);
}

TEST_CASE("direction set json round trip") {
    DirectionSet iv = AngularInterval{0.25, 1.5};
    json j = iv;
    auto iv2 = j.get<DirectionSet>();
    CHECK(std::get<AngularInterval>(iv2).theta_lo == 0.25);
    CHECK(std::get<AngularInterval>(iv2).theta_hi == 1.5);

    Rng rng(3);
    DirectionSet ball = GrassmannBall{sample_uniform_subspace(4, 2, rng), 0.3};
    json jb = ball;
    auto ball2 = std::get<GrassmannBall>(jb.get<DirectionSet>());
    CHECK(ball2.radius == 0.3);
    CHECK(ball2.center.basis.isApprox(std::get<GrassmannBall>(ball).center.basis));

    json bad = {{"type", "wedge"}};
    CHECK_THROWS(bad.get<DirectionSet>());
}

TEST_CASE("subspace json round trip") {
    Rng rng(17);
    const Subspace v = sample_uniform_subspace(5, 3, rng);
    json j = v;
    const Subspace back = j.get<Subspace>();
    CHECK(back.basis.isApprox(v.basis, 1e-14));
}
