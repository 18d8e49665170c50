#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gmtkit/capacity.hpp"

using namespace gmtkit;

namespace {

DiscreteMeasure tilted_segment(double theta, int atoms) {
    return generate_segment(Eigen::Vector2d(0, 0),
                            Eigen::Vector2d(std::cos(theta), std::sin(theta)), atoms);
}

DiscreteMeasure dilate(const DiscreteMeasure& mu, double lambda) {
    DiscreteMeasure out(mu.dim);
    for (std::size_t i = 0; i < mu.size(); ++i) out.add(lambda * mu.point(i), mu.weights[i]);
    return out;
}

}  // namespace

TEST_CASE("theorem 1 certificate on the segment fixture") {
    const double theta0 = 1.0;
    const auto mu = tilted_segment(theta0, 200);
    const AngularInterval interval{theta0 - 0.15, theta0 + 0.15};
    const auto cert = theorem1_certificate(mu, interval, MollifierSpec(5e-3), 1e-3);

    CHECK(cert.retained_mass >= 0.25);
    CHECK(cert.sigma_growth <= 1.0 + 1e-6);
    CHECK(cert.lower_bound > 0.0);
    CHECK(cert.growth_ok);

    // sigma is a single rescaling of a restriction of mu
    REQUIRE(!cert.f_indices.empty());
    const double factor = cert.sigma.weights[0] / mu.weights[cert.f_indices[0]];
    for (std::size_t i = 0; i < cert.f_indices.size(); ++i) {
        CHECK(cert.sigma.point(i).isApprox(mu.point(cert.f_indices[i])));
        CHECK_THAT(cert.sigma.weights[i],
                   Catch::Matchers::WithinRel(factor * mu.weights[cert.f_indices[i]], 1e-12));
    }

    // the projected density of the aligned segment sits below the threshold:
    // no doublings needed on well-resolved data
    CHECK(cert.threshold_doublings == 0);
}

TEST_CASE("certificate degenerates gracefully on a single atom") {
    DiscreteMeasure mu(2);
    mu.add(Eigen::Vector2d(0.3, 0.4), 1.0);
    const auto cert = theorem1_certificate(mu, {0.5, 1.0}, MollifierSpec(0.01), 0.5);
    CHECK(cert.f_indices == std::vector<int>{0});
    CHECK(cert.lower_bound > 0.0);
    CHECK(std::isfinite(cert.lower_bound));
}

TEST_CASE("certificate rejects zero directional energy") {
    DiscreteMeasure zero(2);
    zero.add(Eigen::Vector2d(0, 0), 0.0);
    CHECK_THROWS_AS(theorem1_certificate(zero, {0.5, 1.0}, MollifierSpec(0.01), 0.1),
                    std::invalid_argument);
}

TEST_CASE("certificate dilation covariance is exact") {
    const double theta0 = 0.7, lambda = 3.25;
    const auto mu = tilted_segment(theta0, 120);
    const AngularInterval interval{theta0 - 0.2, theta0 + 0.2};
    const auto cert = theorem1_certificate(mu, interval, MollifierSpec(5e-3), 1e-3);
    const auto cert_dil = theorem1_certificate(dilate(mu, lambda), interval,
                                               MollifierSpec(lambda * 5e-3), lambda * 1e-3);
    CHECK_THAT(cert_dil.lower_bound, Catch::Matchers::WithinRel(lambda * cert.lower_bound, 1e-10));
    CHECK(cert_dil.f_indices == cert.f_indices);
    CHECK_THAT(cert_dil.sigma_growth, Catch::Matchers::WithinRel(cert.sigma_growth, 1e-10));
}

TEST_CASE("theorem 2 matches theorem 1 in the planar reduction") {
    const double theta0 = 1.0;
    const auto mu = tilted_segment(theta0, 150);
    const double half_width = 0.15;
    const auto cert1 =
        theorem1_certificate(mu, {theta0 - half_width, theta0 + half_width}, MollifierSpec(5e-3),
                             1e-3);
    Rng rng(2718);
    const GrassmannBall ball{Subspace::line_at_angle(theta0), std::sin(half_width)};
    const auto cert2 = theorem2_certificate(mu, ball, MollifierSpec(5e-3), 1e-3, 4000, rng);

    // gamma_{2,1} is a probability measure: ball energy = interval energy/pi
    Rng rng2(2719);
    const auto ball_energy = grassmann_ball_energy(mu, ball, MollifierSpec(5e-3), 4000, rng2);
    const double se_lower =
        cert1.mass * cert1.mass * ball_energy.std_error / (ball_energy.value * ball_energy.value);
    CHECK(std::abs(cert2.lower_bound / kPi - cert1.lower_bound) <= 3.0 * se_lower);
    CHECK(cert2.sigma_growth <= 1.0 + 1e-6);
    CHECK(cert2.retained_mass >= 0.25);
}

TEST_CASE("theorem 2 on a flat plane sample in R^3") {
    Eigen::MatrixXd b(3, 2);
    b << 1, 0, 0, 1, 0, 0;
    const Subspace plane(b);
    const auto mu = generate_lipschitz_graph(150, plane, 0.0, 4);
    Rng rng(55);
    const GrassmannBall ball{plane, 0.3};
    const auto cert = theorem2_certificate(mu, ball, MollifierSpec(0.02), 5e-3, 1500, rng);
    CHECK(cert.lower_bound > 0.0);
    CHECK(cert.sigma_growth <= 1.0 + 1e-6);
    CHECK(cert.retained_mass >= 0.25 * cert.mass);
}

TEST_CASE("favard estimate") {
    // single atom: pure fattening artifact 2 delta pi
    DiscreteMeasure one(2);
    one.add(Eigen::Vector2d(0.2, 0.8), 1.0);
    CHECK_THAT(favard_estimate(one, 1e-3, 128),
               Catch::Matchers::WithinRel(2e-3 * kPi, 1e-9));

    // unit segment resolved at delta ~ atom spacing: integral of |cos|
    const auto seg = generate_segment(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 200);
    CHECK_THAT(favard_estimate(seg, 5e-3, 512), Catch::Matchers::WithinRel(2.0, 0.02));

    // cantor iterates: decreasing in k at the matching resolution
    double last = std::numeric_limits<double>::infinity();
    for (int k = 2; k <= 4; ++k) {
        const double fav = favard_estimate(generate_cantor4(k), std::pow(4.0, -k), 128);
        CHECK(fav < last);
        last = fav;
    }
}

TEST_CASE("favard inequality check") {
    // aligned segment: ratio comfortably above 1
    const double theta0 = 1.0;
    const auto seg = tilted_segment(theta0, 200);
    const auto check = favard_inequality_check(seg, {theta0 - 0.15, theta0 + 0.15},
                                               MollifierSpec(2e-3), 8e-3, 96);
    CHECK(check.ratio >= 0.95);

    // rotation of configuration and interval leaves the ratio unchanged
    const double rot = 0.45;
    const auto seg_rot = tilted_segment(theta0 + rot, 200);
    const auto check_rot = favard_inequality_check(
        seg_rot, {theta0 + rot - 0.15, theta0 + rot + 0.15}, MollifierSpec(2e-3), 8e-3, 96);
    CHECK_THAT(check_rot.ratio, Catch::Matchers::WithinRel(check.ratio, 1e-9));
}

TEST_CASE("certificate json serialization") {
    const auto mu = tilted_segment(1.0, 60);
    const auto cert = theorem1_certificate(mu, {0.85, 1.15}, MollifierSpec(5e-3), 1e-2);
    const json j = cert;
    CHECK(j.at("lower_bound").get<double>() == cert.lower_bound);
    CHECK(j.at("f_indices").size() == cert.f_indices.size());
    CHECK(j.at("growth_ok").get<bool>() == cert.growth_ok);
}
