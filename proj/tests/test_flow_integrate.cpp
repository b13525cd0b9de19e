#include <doctest.h>

#include <cmath>
#include <random>

#include "pwl/connection.hpp"
#include "pwl/integrate.hpp"
#include "pwl/local_flow.hpp"
#include "pwl/manifolds.hpp"
#include "pwl/models.hpp"
#include "support/rk_oracle.hpp"

using namespace pwl;

namespace {

PwlSystem fig5_system() {
    const ConnectionSolution cs = solve_three_region(-0.085, 0.15, 0.05);
    return build_three_region(
        ThreeRegionParams::from_boundaries(cs.rho, cs.mu, cs.m, cs.k, cs.epsilon));
}

}  // namespace

TEST_CASE("local flow at t = 0 is the identity") {
    const PwlSystem sys = build_two_region({1.0, 0.1, 0.25});
    const Vec3 p{-0.3, 0.2, -0.1};
    CHECK(norm(local_flow(sys.regions[0], sys.epsilon, p, 0.0) - p) < 1e-14);
}

TEST_CASE("left-region contraction rate is m/2") {
    // eps = 0, m = 1: the fast focus decays like e^{-t/2}
    const PwlSystem sys = build_two_region({1.0, 0.1, 0.0});
    const RegionSpec& left = sys.regions[0];
    const double z0 = -1.0;
    const Vec3 eq{z0, -1.0 * z0, z0};  // layer equilibrium (z, f(z), z)
    const Vec3 p = eq + Vec3{0.0, 1e-3, 0.0};
    double prev = norm(local_flow(left, 0.0, p, 0.0) - eq);
    // envelope oscillates, so compare over whole periods
    const double period = 2.0 * M_PI / (std::sqrt(3.0) / 2.0);
    for (int i = 1; i <= 3; ++i) {
        const double d = norm(local_flow(left, 0.0, p, i * period) - eq);
        CHECK(d / prev == doctest::Approx(std::exp(-period / 2.0)).epsilon(1e-6));
        prev = d;
    }
}

TEST_CASE("stationary at the layer equilibrium when eps = 0") {
    const PwlSystem sys = build_two_region({1.0, 0.1, 0.0});
    const Vec3 p{-0.5, 0.5, -0.5};
    CHECK(norm(local_flow(sys.regions[0], 0.0, p, 7.3) - p) < 1e-12);
}

TEST_CASE("semigroup and ODE residual of the local flow") {
    const PwlSystem sys = fig5_system();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (const RegionSpec& r : sys.regions) {
        const double xm = std::isfinite(r.lower_x) ? r.lower_x : r.upper_x - 0.1;
        const Vec3 p{xm + 0.02, u(rng), u(rng)};
        const double s = 0.013, t = 0.021;
        const Vec3 two_step = local_flow(r, sys.epsilon, local_flow(r, sys.epsilon, p, s), t);
        CHECK(norm(two_step - local_flow(r, sys.epsilon, p, s + t)) < 1e-10);
        // central-difference residual of u' = A u + b
        const double h = 1e-6;
        const Vec3 mid = local_flow(r, sys.epsilon, p, t);
        const Vec3 du =
            (local_flow(r, sys.epsilon, p, t + h) - local_flow(r, sys.epsilon, p, t - h)) /
            (2.0 * h);
        CHECK(norm(du - (r.A * mid + r.b)) < 1e-9);
    }
}

TEST_CASE("z is exactly the affine clock in the two-region system") {
    const PwlSystem sys = build_two_region({1.0, 0.1, 0.25});
    const Vec3 p{-0.4, 0.1, -0.2};
    for (double t : {0.1, 1.0, 7.5})
        CHECK(local_flow(sys.regions[0], sys.epsilon, p, t).z ==
              doctest::Approx(p.z + sys.epsilon * t).epsilon(1e-15));
}

TEST_CASE("trajectory arcs are contiguous and end on boundaries") {
    const PwlSystem sys = fig5_system();
    const Trajectory traj = integrate(sys, {-0.3, 0.05, -0.4}, 40.0);
    REQUIRE(traj.arcs.size() > 1);
    for (size_t i = 0; i + 1 < traj.arcs.size(); ++i) {
        const TrajectoryArc& a = traj.arcs[i];
        CHECK(norm(a.state_exit - traj.arcs[i + 1].state_entry) < 1e-10);
        const RegionSpec& r = sys.regions[a.region_index];
        const double d = std::min(std::abs(a.state_exit.x - r.lower_x),
                                  std::abs(a.state_exit.x - r.upper_x));
        CHECK(d < 1e-9);
    }
}

TEST_CASE("attracting-ray orbit reaches the boundary point of the clock system") {
    const double m = 1.0, k = 0.1, eps = 0.25;
    const PwlSystem sys = build_two_region({m, k, eps});
    const SlowManifolds sm = canonical_slow_manifolds(sys);
    const Vec3 start = sm.attracting().point_at_z(-1.0);
    bool crossed = false;
    integrate_arcs(sys, start, 20.0, {}, [&](const TrajectoryArc& arc) {
        if (arc.region_index == 0) {
            CHECK(ray_distance(sm.attracting(), arc.state_exit) < 2.0 * eps);
            return true;
        }
        // first arc on the right of {x = 0}: entry is p^a = (0, -eps, m eps)
        CHECK(norm(arc.state_entry - Vec3{0.0, -eps, m * eps}) < 1e-9);
        crossed = true;
        return false;
    });
    CHECK(crossed);
}

TEST_CASE("integrate matches the RK reference on random initial conditions") {
    const PwlSystem sys = fig5_system();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ux(-0.3, 0.3), uz(-0.5, 0.1);
    for (int it = 0; it < 20; ++it) {
        const Vec3 p0{ux(rng), ux(rng), uz(rng)};
        const double T = 50.0;
        const Trajectory traj = integrate(sys, p0, T);
        const Vec3 exact = traj.state_at(T);
        const Vec3 ref = pwl_test::rk_flow(sys, p0, T, 1e-13);
        CHECK(norm(exact - ref) / (1.0 + norm(ref)) < 1e-8);
    }
}

TEST_CASE("central connection flight lands on the repelling boundary point") {
    const ConnectionSolution cs = solve_three_region(-0.085, 0.15, 0.05);
    const PwlSystem sys = build_three_region(
        ThreeRegionParams::from_boundaries(cs.rho, cs.mu, cs.m, cs.k, cs.epsilon));
    const double eps = cs.epsilon;
    const Vec3 pa{cs.rho, -cs.m * cs.rho - eps, cs.rho + cs.m * eps};
    const Vec3 pr{cs.mu, cs.k * cs.mu - eps, cs.mu - cs.k * eps};
    const Vec3 hit = local_flow(sys.regions[1], eps, pa, cs.t_hat);
    CHECK(norm(hit - pr) < 1e-9);
}
