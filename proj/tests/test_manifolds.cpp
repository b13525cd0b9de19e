#include <doctest.h>

#include <cmath>
#include <random>

#include "pwl/connection.hpp"
#include "pwl/local_flow.hpp"
#include "pwl/manifolds.hpp"
#include "pwl/models.hpp"

using namespace pwl;

TEST_CASE("two-region boundary points and manifold gap") {
    const double m = 1.0, k = 0.1, eps = 0.25;
    const PwlSystem sys = build_two_region({m, k, eps});
    const SlowManifolds sm = canonical_slow_manifolds(sys);
    CHECK(norm(sm.p_attract - Vec3{0.0, -eps, m * eps}) < 1e-12);
    CHECK(norm(sm.p_repel - Vec3{0.0, -eps, -k * eps}) < 1e-12);
    CHECK(sm.attracting().attracting);
    CHECK_FALSE(sm.repelling().attracting);
    // the rays pierce {x = 0} at distance (m+k) eps from each other
    CHECK(norm(sm.p_attract - sm.p_repel) == doctest::Approx((m + k) * eps).epsilon(1e-12));
}

TEST_CASE("rays at eps = 0 lie on the critical manifold") {
    const PwlSystem sys = build_two_region({1.0, 0.1, 0.0});
    const SlowManifolds sm = canonical_slow_manifolds(sys);
    for (double z : {-1.0, -0.4, -0.05}) {
        const FastSubsystem layer = fast_subsystem(sys, z);
        const Vec3 q = sm.attracting().point_at_z(z);
        CHECK(norm(q - Vec3{layer.eq_x, layer.eq_y, z}) < 1e-12);
    }
}

TEST_CASE("ray invariance under the exact flow") {
    std::vector<PwlSystem> systems;
    systems.push_back(build_two_region({1.0, 0.1, 0.25}));
    {
        const ConnectionSolution cs = solve_three_region(-0.085, 0.15, 0.05);
        systems.push_back(build_three_region(
            ThreeRegionParams::from_boundaries(cs.rho, cs.mu, cs.m, cs.k, cs.epsilon)));
    }
    {
        const ConnectionSolution cs = solve_buffer_connection(0.2, 0.05);
        systems.push_back(build_buffer({0.2, cs.m, cs.k, 0.05}));
    }
    {
        DkModel dk;
        dk.I = 2.0;
        dk.epsilon = 1e-3;
        systems.push_back(build_dk(dk));
    }
    for (const PwlSystem& sys : systems) {
        const SlowManifolds sm = canonical_slow_manifolds(sys);
        for (const SlowManifoldRay* ray : {&sm.attracting(), &sm.repelling()}) {
            // start a bit inside the region so a short flow stays there
            const RegionSpec& r = sys.regions[ray->region_index];
            double x0;
            if (std::isfinite(r.lower_x) && std::isfinite(r.upper_x))
                x0 = 0.5 * (r.lower_x + r.upper_x);
            else if (std::isfinite(r.upper_x))
                x0 = r.upper_x - 0.2;
            else
                x0 = r.lower_x + 0.2;
            const Vec3 q = ray->point_at_x(x0);
            const Vec3 moved = local_flow(r, sys.epsilon, q, 0.1);
            CHECK(ray_distance(*ray, moved) < 1e-10);
        }
    }
}

TEST_CASE("distance at t = 0 is the in-plane distance") {
    const PwlSystem sys = build_two_region({1.0, 0.1, 0.25});
    const SlowManifolds sm = canonical_slow_manifolds(sys);
    const SlowManifoldRay& ray = sm.repelling();
    const Vec3 q = ray.point_at_z(0.2);
    const Vec3 p = q + Vec3{0.003, -0.004, 0.0};
    const TubularCoords tc = distance_along_plane(sys, ray, p, 0.0);
    CHECK(tc.distance == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(tc.z_at == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("theta amplitude vanishes exactly on the repelling point") {
    const double k = 0.1, eps = 0.25;
    CHECK(theta_amplitude({0.0, -eps, -k * eps}, k, eps) == doctest::Approx(0.0));
    CHECK(theta_amplitude({0.0, -eps + 1e-3, -k * eps}, k, eps) > 0.0);
}

TEST_CASE("repelling-side envelope stays inside the C(t) bounds") {
    const double m = 1.0, k = 0.1, eps = 0.25;
    const PwlSystem sys = build_two_region({m, k, eps});
    const SlowManifolds sm = canonical_slow_manifolds(sys);
    const SlowManifoldRay& ray = sm.repelling();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uy(1e-4, 2e-3), ut(0.5, 18.0);
    const auto [c_lo, c_hi] = focus_envelope_bounds();
    for (int it = 0; it < 100; ++it) {
        // seed on {x = 0} level with the repelling point, pure y-offset
        const Vec3 p{0.0, -eps + uy(rng) * (it % 2 ? 1.0 : -1.0), -k * eps};
        const double theta = theta_amplitude(p, k, eps);
        if (theta < 1e-8) continue;
        const double t = ut(rng);
        const TubularCoords tc = distance_along_plane(sys, ray, p, t);
        const double ratio = tc.distance / (theta * std::exp(0.5 * k * t));
        CHECK(ratio > std::sqrt(c_lo) - 1e-9);
        CHECK(ratio < std::sqrt(c_hi) + 1e-9);
    }
}
