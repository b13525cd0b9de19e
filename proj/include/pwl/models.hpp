#pragma once

#include <optional>
#include <vector>

#include "pwl/system.hpp"

namespace pwl {

struct TwoRegionModel {
    double m{1.0};
    double k{0.1};
    double epsilon{0.25};
};

// Central slope l and offset n are the continuity-constrained values
// l = (m*rho + k*mu)/(mu - rho), n = -rho*mu*(k + m)/(mu - rho).
struct ThreeRegionParams {
    double rho;   // left boundary, < 0
    double mu;    // right boundary, > 0
    double m, k;  // lateral slopes in (0, 2)
    double l, n;
    double epsilon;

    static ThreeRegionParams from_boundaries(double rho, double mu, double m, double k,
                                             double epsilon);
};

struct BufferModel {
    double a;
    double m, k;
    double epsilon;

    double rho() const { return -k * epsilon - epsilon * epsilon; }
    double mu() const { return m * epsilon - epsilon * epsilon; }
};

struct DkModel {
    double a{0.8};
    double eta{0.5};
    double b{0.5};
    double I{0.0};
    double epsilon{1e-3};

    // unique equilibrium e = -I/(1 - 1/a - 1/b) * (1, 1/a, 1/b)
    Vec3 equilibrium() const;
};

struct ModifiedDkModel {
    double a{0.8};
    double eta{0.5};  // ignored when eta1 is set
    double b{0.5};
    double I{0.0};
    double epsilon{1e-3};
    double s;    // slope of the x-nullcline in the inserted region
    double rho;  // left boundary of the inserted region
    std::optional<double> eta1;  // eta = 1/a + eta1*epsilon, eta1 < 0

    double mu() const { return (rho * (s + 1.0) + 2.0) / (s - 1.0); }
    double effective_eta() const { return eta1 ? 1.0 / a + *eta1 * epsilon : eta; }
};

PwlSystem build_two_region(const TwoRegionModel& m);
PwlSystem build_three_region(const ThreeRegionParams& p);
PwlSystem build_buffer(const BufferModel& m);
PwlSystem build_dk(const DkModel& m);
PwlSystem build_modified_dk(const ModifiedDkModel& m);

// Parameters recovered from a built system; fields not meaningful for the
// kind are left at 0.
struct ModelInfo {
    SystemKind kind;
    double epsilon{};
    double m{}, k{}, l{}, n{};
    double rho{}, mu{};
    double a{}, eta{}, b{}, I{}, s{};
    double z_hopf{};  // z at which the fast subsystem loses stability
};

ModelInfo extract_info(const PwlSystem& sys);

// Layer problem at frozen z (two- and three-region systems).
enum class LayerStability { StableFocus, UnstableFocus, NonHyperbolic };
struct FastSubsystem {
    double z;
    double eq_x, eq_y;  // equilibrium (z, f(z))
    double slope;       // f'(z)
    LayerStability stability;
};
FastSubsystem fast_subsystem(const PwlSystem& sys, double z);

struct DkEigenOrdersRow {
    double epsilon;
    double lambda_m;  // real (slow) eigenvalue of the middle region
    double alpha_m;   // real part of the complex pair
};
struct DkEigenOrders {
    std::vector<DkEigenOrdersRow> rows;
    double lambda_over_eps;  // fitted leading coefficient of lambda_m
    double alpha_limit;      // fitted constant term of alpha_m
    double alpha_over_eps;   // fitted linear term of alpha_m
    bool same_order;         // both leading terms are O(eps)
};
DkEigenOrders dk_eigen_orders(const DkModel& m, const std::vector<double>& eps_ladder);

}  // namespace pwl
