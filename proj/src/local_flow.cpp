#include "pwl/local_flow.hpp"

#include <cmath>

namespace pwl {

LocalSolution::LocalSolution(const RegionSpec& region, double eps, const Vec3& p,
                             const EigenStructure* cached_es)
    : p0_(p), clock_(region.clock) {
    if (!p.finite()) throw Error("non-finite initial state");
    if (clock_) {
        eps_ = eps;
        c_ = region.slope;
        n_ = region.offset;
        z0_ = p.z;
        const double disc = 4.0 - c_ * c_;
        if (std::abs(disc) < 1e-12) throw Error("slope at stability boundary");
        if (disc < 0.0) throw Error("slope outside focus range");
        omega_ = std::sqrt(disc) / 2.0;
        // deviation from the invariant ray x_hat = z + c*eps, y_hat = c*x_hat + n - eps
        const double xh = z0_ + c_ * eps_;
        w1_ = p.x - xh;
        w2_ = p.y - (c_ * xh + n_ - eps_);
    } else {
        EigenStructure es = cached_es ? *cached_es : eigenstructure(region.A);
        lam_ = es.lambda_slow;
        alpha_ = es.alpha;
        beta_ = es.beta;
        omega_ = es.beta;
        u_eq_ = -(region.A.inverse() * region.b);
        P_ = es.P;
        w_ = es.P_inv * (p - u_eq_);
    }
}

Vec3 LocalSolution::at(double t) const {
    if (clock_) {
        const double z = z0_ + eps_ * t;
        const double xh = z + c_ * eps_;
        const double yh = c_ * xh + n_ - eps_;
        const double e = std::exp(c_ * t / 2.0);
        const double cs = std::cos(omega_ * t), sn = std::sin(omega_ * t);
        const double w1 = e * (w1_ * cs + ((c_ / 2.0) * w1_ - w2_) / omega_ * sn);
        const double w2 = e * (w2_ * cs + (w1_ - (c_ / 2.0) * w2_) / omega_ * sn);
        return {xh + w1, yh + w2, z};
    }
    const double es = std::exp(lam_ * t);
    const double ef = std::exp(alpha_ * t);
    const double cs = std::cos(beta_ * t), sn = std::sin(beta_ * t);
    const Vec3 v{es * w_.x, ef * (cs * w_.y + sn * w_.z), ef * (-sn * w_.y + cs * w_.z)};
    return u_eq_ + P_ * v;
}

double LocalSolution::x_at(double t) const {
    if (clock_) {
        const double z = z0_ + eps_ * t;
        const double xh = z + c_ * eps_;
        const double e = std::exp(c_ * t / 2.0);
        return xh + e * (w1_ * std::cos(omega_ * t)
                         + ((c_ / 2.0) * w1_ - w2_) / omega_ * std::sin(omega_ * t));
    }
    const double es = std::exp(lam_ * t);
    const double ef = std::exp(alpha_ * t);
    const double cs = std::cos(beta_ * t), sn = std::sin(beta_ * t);
    return u_eq_.x + P_.m[0][0] * es * w_.x
         + P_.m[0][1] * ef * (cs * w_.y + sn * w_.z)
         + P_.m[0][2] * ef * (-sn * w_.y + cs * w_.z);
}

Vec3 local_flow(const RegionSpec& region, double eps, const Vec3& p, double t) {
    return LocalSolution(region, eps, p).at(t);
}

}  // namespace pwl
