#include "pwl/eigen3.hpp"

#include <algorithm>
#include <cmath>

namespace pwl {

namespace {

// Largest-norm cross product of two rows of M gives a robust null vector.
Vec3 null_vector(const Mat3& M) {
    Vec3 r0 = M.row(0), r1 = M.row(1), r2 = M.row(2);
    Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
    Vec3 best = c01;
    if (norm(c02) > norm(best)) best = c02;
    if (norm(c12) > norm(best)) best = c12;
    if (norm(best) < 1e-14) throw Error("degenerate spectrum");
    return normalized(best);
}

}  // namespace

EigenStructure eigenstructure(const Mat3& A) {
    // char poly: lambda^3 - tr*lambda^2 + m2*lambda - det = 0
    const double tr = A.trace();
    const double m2 = A.minor_sum();
    const double dt = A.det();

    // depressed cubic s^3 + p*s + q with lambda = s + tr/3
    const double p = m2 - tr * tr / 3.0;
    const double q = -dt + tr * m2 / 3.0 - 2.0 * tr * tr * tr / 27.0;

    const double disc = q * q / 4.0 + p * p * p / 27.0;
    const double scale = std::max({1.0, std::abs(p), std::abs(q)});
    if (disc <= 0.0) {
        // three real roots (disc < 0) or a repeated root (disc == 0)
        if (disc > -1e-14 * scale * scale) throw Error("degenerate spectrum");
        throw Error("no focus block");
    }

    // single real root, stable Cardano
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 - (q >= 0.0 ? sq : -sq));
    double s = (u != 0.0) ? u - p / (3.0 * u) : std::cbrt(-q);
    double lambda = s + tr / 3.0;

    // two Newton polishing steps on the original cubic
    for (int i = 0; i < 2; ++i) {
        double f = ((lambda - tr) * lambda + m2) * lambda - dt;
        double fp = (3.0 * lambda - 2.0 * tr) * lambda + m2;
        if (fp != 0.0) lambda -= f / fp;
    }

    // deflate: lambda^2 + b1*lambda + b0
    const double b1 = lambda - tr;
    const double b0 = m2 + lambda * b1;
    const double alpha = -b1 / 2.0;
    const double rad = b0 - alpha * alpha;
    if (rad <= 0.0) throw Error("no focus block");
    const double beta = std::sqrt(rad);

    if (std::abs(lambda - alpha) < 1e-10 * std::max(1.0, std::abs(lambda)) && beta < 1e-10)
        throw Error("degenerate spectrum");

    EigenStructure es;
    es.lambda_slow = lambda;
    es.alpha = alpha;
    es.beta = beta;

    Mat3 I = Mat3::identity();
    es.v_slow = null_vector(A - I * lambda);

    // invariant plane of the complex pair = image of (A - lambda I)
    Mat3 B = A - I * lambda;
    Vec3 c0 = B.col(0), c1 = B.col(1), c2 = B.col(2);
    Vec3 u1 = c0;
    if (norm(c1) > norm(u1)) u1 = c1;
    if (norm(c2) > norm(u1)) u1 = c2;
    u1 = normalized(u1);
    // with A u = alpha*u - beta*v: v = -(A - alpha I) u / beta
    Vec3 v1 = ((A - I * alpha) * u1) / (-beta);
    es.plane_u = u1;
    es.plane_v = v1;

    if (std::abs(alpha) <= 1e-9)
        es.tag = SpectralTag::SaddleCenter;
    else if (std::abs(lambda) <= 1e-12)
        es.tag = SpectralTag::Neutral;
    else
        es.tag = (lambda * alpha < 0.0) ? SpectralTag::SaddleFocus : SpectralTag::NodeFocus;

    es.P = from_columns(es.v_slow, es.plane_u, es.plane_v);
    es.P_inv = es.P.inverse();
    return es;
}

const char* spectral_tag_name(SpectralTag t) {
    switch (t) {
        case SpectralTag::SaddleFocus: return "saddle-focus";
        case SpectralTag::NodeFocus: return "node-focus";
        case SpectralTag::SaddleCenter: return "saddle-center";
        case SpectralTag::Neutral: return "neutral";
    }
    return "?";
}

}  // namespace pwl
