#pragma once

#include "pwl/eigen3.hpp"
#include "pwl/system.hpp"

namespace pwl {

// Exact solution of one region's affine ODE through p at t = 0, with the
// coefficients precomputed so that repeated evaluation is cheap.
//
// Clock regions (z' = eps) use the planar focus form around the invariant
// ray, so z is exactly z0 + eps*t. Other regions use the eigen-decomposed
// affine exponential u(t) = u_eq + P e^{Jt} P^{-1}(p - u_eq).
class LocalSolution {
public:
    LocalSolution(const RegionSpec& region, double eps, const Vec3& p,
                  const EigenStructure* cached_es = nullptr);

    Vec3 at(double t) const;
    double x_at(double t) const;

    // in-plane angular frequency (xi for clock regions, beta otherwise)
    double angular_freq() const { return omega_; }

    const Vec3& initial() const { return p0_; }

private:
    Vec3 p0_;
    bool clock_;
    double omega_;

    // clock form
    double eps_{}, c_{}, n_{}, z0_{};
    double w1_{}, w2_{};  // deviation from the invariant ray at t = 0

    // affine form
    Vec3 u_eq_{};
    Mat3 P_{};
    Vec3 w_{};  // P^{-1} (p - u_eq)
    double lam_{}, alpha_{}, beta_{};
};

// One-shot evaluation of the region's exact local flow.
Vec3 local_flow(const RegionSpec& region, double eps, const Vec3& p, double t);

}  // namespace pwl
