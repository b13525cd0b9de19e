#pragma once

#include <limits>
#include <string>
#include <vector>

#include "pwl/linalg.hpp"

namespace pwl {

using StateVec = Vec3;

enum class SystemKind { TwoRegion, ThreeRegion, Buffer, Dk, ModifiedDk };

const char* system_kind_name(SystemKind k);
SystemKind system_kind_from_name(const std::string& s);

constexpr double kInf = std::numeric_limits<double>::infinity();

// One affine subsystem u' = A u + b on the slab lower_x <= x <= upper_x.
struct RegionSpec {
    std::string id;
    Mat3 A;
    Vec3 b;
    double lower_x{-kInf};
    double upper_x{kInf};

    // Regions of the z' = eps clock systems carry the x-nullcline slope and
    // offset, enabling the specialized planar closed form with exact z.
    bool clock{false};
    double slope{0.0};   // f'(x) in this region
    double offset{0.0};  // f(x) - slope*x

    bool contains_x(double x, double tol = 0.0) const {
        return x >= lower_x - tol && x <= upper_x + tol;
    }
};

struct PwlSystem {
    std::vector<RegionSpec> regions;  // ordered left to right
    double epsilon{0.0};
    SystemKind kind{SystemKind::TwoRegion};

    int region_index_at(double x) const;
    const RegionSpec& region_at(double x) const { return regions[region_index_at(x)]; }

    // Adjacent slabs must share their boundary plane and the two affine
    // fields must agree on it (checked at three non-collinear points).
    void certify_continuity(double tol = 1e-12) const;
};

}  // namespace pwl
