#include "pwl/manifolds.hpp"

#include <cmath>

#include "pwl/local_flow.hpp"

namespace pwl {

Vec3 SlowManifoldRay::point_at_z(double z) const {
    if (std::abs(dir.z) < 1e-300) throw Error("ray is parallel to the z planes");
    return at((z - base.z) / dir.z);
}

Vec3 SlowManifoldRay::point_at_x(double x) const {
    if (std::abs(dir.x) < 1e-300) throw Error("ray is parallel to the x planes");
    return at((x - base.x) / dir.x);
}

namespace {

SlowManifoldRay clock_ray(const RegionSpec& r, int index, double eps) {
    SlowManifoldRay ray;
    ray.region_id = r.id;
    ray.region_index = index;
    ray.clock = true;
    const double c = r.slope;
    // invariant line x = z + c*eps, y = c*x + n - eps, parameterized by z
    ray.base = Vec3{c * eps, c * c * eps + r.offset - eps, 0.0};
    ray.dir = Vec3{1.0, c, 1.0};
    ray.alpha = c / 2.0;
    ray.lambda = 0.0;
    ray.attracting = c < 0.0;
    ray.param_min = r.lower_x - ray.base.x;
    ray.param_max = r.upper_x - ray.base.x;
    return ray;
}

SlowManifoldRay affine_ray(const RegionSpec& r, int index) {
    const EigenStructure es = eigenstructure(r.A);
    SlowManifoldRay ray;
    ray.region_id = r.id;
    ray.region_index = index;
    ray.clock = false;
    ray.base = -(r.A.inverse() * r.b);
    Vec3 d = es.v_slow;
    if (d.z < 0.0) d = d * -1.0;  // orient toward growing z
    ray.dir = d;
    ray.alpha = es.alpha;
    ray.lambda = es.lambda_slow;
    ray.attracting = es.alpha < 0.0;
    ray.plane_u = es.plane_u;
    ray.plane_v = es.plane_v;
    if (std::abs(d.x) > 1e-300) {
        const double r0 = (r.lower_x - ray.base.x) / d.x;
        const double r1 = (r.upper_x - ray.base.x) / d.x;
        ray.param_min = std::min(r0, r1);
        ray.param_max = std::max(r0, r1);
    }
    return ray;
}

}  // namespace

SlowManifolds canonical_slow_manifolds(const PwlSystem& sys) {
    SlowManifolds sm;
    const double eps = sys.epsilon;
    for (int i = 0; i < static_cast<int>(sys.regions.size()); ++i) {
        const RegionSpec& r = sys.regions[i];
        sm.rays.push_back(r.clock ? clock_ray(r, i, eps) : affine_ray(r, i));
    }
    switch (sys.kind) {
        case SystemKind::TwoRegion:
            sm.attracting_index = 0;
            sm.repelling_index = 1;
            break;
        case SystemKind::ThreeRegion:
        case SystemKind::Buffer:
            sm.attracting_index = 0;
            sm.repelling_index = 2;
            break;
        case SystemKind::Dk:
            sm.attracting_index = 0;
            sm.repelling_index = 1;
            break;
        case SystemKind::ModifiedDk:
            sm.attracting_index = 0;
            sm.repelling_index = 2;
            break;
    }
    if (!sm.attracting().attracting || sm.repelling().attracting)
        throw Error("wrong spectral configuration for canonical manifolds");
    // boundary intersection points: attracting ray at its right edge,
    // repelling ray at its left edge
    sm.p_attract =
        sm.attracting().point_at_x(sys.regions[sm.attracting_index].upper_x);
    sm.p_repel = sm.repelling().point_at_x(sys.regions[sm.repelling_index].lower_x);
    return sm;
}

double ray_distance(const SlowManifoldRay& ray, const Vec3& p) {
    const Vec3 d = ray.dir * (1.0 / norm(ray.dir));
    const Vec3 w = p - ray.base;
    return norm(w - d * dot(w, d));
}

TubularCoords distance_along_plane(const PwlSystem& sys, const SlowManifoldRay& ray,
                                   const Vec3& p, double t) {
    const RegionSpec& r = sys.regions[ray.region_index];
    const Vec3 q = t == 0.0 ? p : local_flow(r, sys.epsilon, p, t);
    if (!r.contains_x(q.x, 1e-9)) throw Error("out of region");
    if (ray.clock) {
        const Vec3 mp = ray.point_at_z(q.z);
        return {std::hypot(q.x - mp.x, q.y - mp.y), q.z, t};
    }
    const Mat3 B = from_columns(ray.dir, ray.plane_u, ray.plane_v);
    const Vec3 c = solve3(B, q - ray.base);
    const Vec3 mp = ray.base + ray.dir * c.x;
    return {norm(q - mp), mp.z, t};
}

double theta_amplitude(const Vec3& p, double k, double eps) {
    if (std::abs(p.x) > 1e-9) throw Error("point not on the switching plane");
    if (!(k > 0.0 && k < 2.0)) throw Error("slopes out of admissible range");
    const double rad = (4.0 / (4.0 - k * k)) *
                       ((p.y + eps) * (p.y + eps) + (p.z + k * eps) * (p.z - k * p.y));
    if (rad < -1e-14) throw Error("negative amplitude radicand");
    return std::sqrt(std::max(rad, 0.0));
}

}  // namespace pwl
