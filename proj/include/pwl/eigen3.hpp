#pragma once

#include "pwl/linalg.hpp"

namespace pwl {

enum class SpectralTag { SaddleFocus, NodeFocus, SaddleCenter, Neutral };

// Spectrum of a 3x3 real matrix with one real eigenvalue and one complex
// conjugate pair alpha +/- beta*i (beta > 0).
struct EigenStructure {
    double lambda_slow;
    double alpha;
    double beta;
    Vec3 v_slow;    // eigenvector of lambda_slow
    Vec3 plane_u;   // invariant-plane basis: A u = alpha*u - beta*v
    Vec3 plane_v;   //                        A v = beta*u  + alpha*v
    SpectralTag tag;

    // e^{At} p decomposed in the eigenbasis; P = [v_slow, plane_u, plane_v].
    Mat3 P;
    Mat3 P_inv;
};

// Closed-form (Cardano) cubic eigensolver, polished with Newton steps.
// Throws "no focus block" for three real eigenvalues, "degenerate spectrum"
// for (near-)repeated roots.
EigenStructure eigenstructure(const Mat3& A);

const char* spectral_tag_name(SpectralTag t);

}  // namespace pwl
