#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "pwl/integrate.hpp"
#include "pwl/manifolds.hpp"
#include "pwl/models.hpp"

namespace pwl {

struct WayInOutOptions {
    double delta{1.0};
    double work_precision{0.0};  // 0 keeps the connection residual untouched
    double t_budget_factor{10.0};
    double march_dt{0.01};
    double plateau_frac{1e-3};  // flatness threshold relative to curve range
};

struct WayInOutPair {
    double z_in;
    double z_out;     // z of the manifold comparison point at exit
    double t_exit;    // time from the mu-crossing to the exit
    double residual;  // distance to the repelling ray at the mu-crossing
};

struct CurveMeta {
    SystemKind kind;
    double epsilon{}, delta{};
    double m{}, k{};
    double rho{}, mu{};
    double a{}, z_hopf{};
    double z_rho_star{};  // z of the attracting ray on its exit boundary
    double z_mu_star{};   // z of the repelling ray on its entry boundary
};

struct WayInWayOutCurve {
    std::vector<WayInOutPair> pairs;  // sorted by z_in
    double delta{};
    CurveMeta meta;
    int dropped{0};  // orbits that never produced an exit within budget
};

// Entry point on the attracting delta-tube over z = z_i (exact distance
// delta, same x as the ray point).
Vec3 entry_point(const PwlSystem& sys, const SlowManifolds& sm, double z_i,
                 double delta);

WayInWayOutCurve way_in_way_out(const PwlSystem& sys, double delta,
                                const std::vector<double>& z_grid,
                                double work_precision = 0.0,
                                const WayInOutOptions& opt = {});

struct DelayEstimate {
    double z_d;      // delay value (z_exit, shifted by z_hopf for DK)
    double z_exit;   // raw exit comparison z
    double t_exit;   // time from the mu-crossing to the exit
    bool has_bounds{false};
    double lower{}, upper{};
};

DelayEstimate maximal_delay(const PwlSystem& sys, double delta,
                            const WayInOutOptions& opt = {});

struct AsymptoteFit {
    bool has_line{false};
    double slope{}, intercept{};  // in boundary-relative coordinates
    bool has_plateau{false};
    double plateau{};  // relative to z_mu_star
    double slope_theory{}, intercept_theory{};
};

AsymptoteFit asymptote_fit(const WayInWayOutCurve& curve,
                           double plateau_frac = 1e-3);

struct DelaySweepRow {
    double epsilon;
    double z_d;
    bool has_bounds;
    double lower, upper;
};
struct DelaySweep {
    std::vector<DelaySweepRow> rows;
    double u1{}, u2{};  // z_d ~ u1*eps + u2*eps*ln(eps)
    double rel_residual{};
};

DelaySweep delay_vs_epsilon(const std::function<PwlSystem(double)>& family,
                            const std::vector<double>& eps_grid, double delta,
                            const WayInOutOptions& opt = {});

// bracket on the oscillation amplitude from the measured exit time,
// sqrt(1/(2 e^{kt})) < theta < sqrt(16/e^{kt})
std::pair<double, double> theta_exit_bracket(double k, double t);

struct PrecisionRow {
    double precision;
    double theta_min, theta_max;
    double plateau;  // relative to z_mu_star
    double t_exit;   // mean exit time over the plateau orbits
};

std::vector<PrecisionRow> precision_diagnosis(const PwlSystem& sys,
                                              const std::vector<double>& precisions,
                                              const std::vector<double>& z_grid,
                                              const WayInOutOptions& opt = {});

}  // namespace pwl
