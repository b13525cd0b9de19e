#pragma once

#include <utility>
#include <vector>

#include "pwl/eigen3.hpp"
#include "pwl/system.hpp"

namespace pwl {

// Invariant line that perturbs from a normally hyperbolic branch of the
// critical manifold. Clock rays are parameterized so that point_at_z is the
// comparison point on the plane {z = const}; affine rays carry the complex
// pair's plane basis instead.
struct SlowManifoldRay {
    std::string region_id;
    int region_index{};
    Vec3 base;
    Vec3 dir;
    double param_min{-kInf};
    double param_max{kInf};
    bool attracting{};
    double alpha{};   // fast contraction/expansion rate
    double lambda{};  // slow eigenvalue (0 on the clock rays)
    bool clock{};
    Vec3 plane_u{}, plane_v{};

    Vec3 at(double r) const { return base + dir * r; }
    Vec3 point_at_z(double z) const;
    Vec3 point_at_x(double x) const;
};

struct SlowManifolds {
    std::vector<SlowManifoldRay> rays;  // one per region, ordered
    int attracting_index{};
    int repelling_index{};
    Vec3 p_attract;  // boundary intersection of the attracting ray
    Vec3 p_repel;    // boundary intersection of the repelling ray

    const SlowManifoldRay& attracting() const { return rays[attracting_index]; }
    const SlowManifoldRay& repelling() const { return rays[repelling_index]; }
};

SlowManifolds canonical_slow_manifolds(const PwlSystem& sys);

struct TubularCoords {
    double distance;
    double z_at;  // z of the comparison point on the ray
    double t;
};

// Flows p for time t inside the ray's region and measures the in-plane
// distance to the ray (same z for clock systems, complex-pair plane
// otherwise).
TubularCoords distance_along_plane(const PwlSystem& sys, const SlowManifoldRay& ray,
                                   const Vec3& p, double t);

// Euclidean distance from p to the ray's supporting line.
double ray_distance(const SlowManifoldRay& ray, const Vec3& p);

// Oscillation amplitude of the repelling-side distance in the two-region
// system, theta^2 = (4/(4-k^2)) ((y+eps)^2 + (z+k eps)(z - k y)) on {x=0}.
double theta_amplitude(const Vec3& p, double k, double eps);

// bounds on the periodic factor C(t) of Lemma-type envelopes
inline std::pair<double, double> focus_envelope_bounds() { return {1.0 / 16.0, 2.0}; }

}  // namespace pwl
