#include "pwl/system.hpp"

#include <cmath>

namespace pwl {

const char* system_kind_name(SystemKind k) {
    switch (k) {
        case SystemKind::TwoRegion: return "two-region";
        case SystemKind::ThreeRegion: return "three-region";
        case SystemKind::Buffer: return "buffer";
        case SystemKind::Dk: return "dk";
        case SystemKind::ModifiedDk: return "modified-dk";
    }
    return "?";
}

SystemKind system_kind_from_name(const std::string& s) {
    if (s == "two-region") return SystemKind::TwoRegion;
    if (s == "three-region") return SystemKind::ThreeRegion;
    if (s == "buffer") return SystemKind::Buffer;
    if (s == "dk") return SystemKind::Dk;
    if (s == "modified-dk") return SystemKind::ModifiedDk;
    throw Error("unknown model kind: " + s);
}

int PwlSystem::region_index_at(double x) const {
    if (regions.empty()) throw Error("empty system");
    for (int i = 0; i < static_cast<int>(regions.size()); ++i)
        if (x < regions[i].upper_x) return i;
    return static_cast<int>(regions.size()) - 1;
}

void PwlSystem::certify_continuity(double tol) const {
    for (size_t i = 0; i < regions.size(); ++i) {
        const RegionSpec& r = regions[i];
        if (!(r.lower_x < r.upper_x))
            throw Error("region " + r.id + ": lower_x must be below upper_x");
        if (i + 1 == regions.size()) continue;
        const RegionSpec& s = regions[i + 1];
        if (r.upper_x != s.lower_x)
            throw Error("regions " + r.id + "/" + s.id + " do not share a boundary plane");
        const double B = r.upper_x;
        const Vec3 probes[3] = {{B, 0.0, 0.0}, {B, 1.0, 0.0}, {B, 0.0, 1.0}};
        for (const Vec3& p : probes) {
            Vec3 fl = r.A * p + r.b;
            Vec3 fr = s.A * p + s.b;
            if (norm(fl - fr) > tol)
                throw Error("vector field discontinuous across x = " + std::to_string(B));
        }
    }
}

}  // namespace pwl
