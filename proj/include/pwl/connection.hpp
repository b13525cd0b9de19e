#pragma once

#include <string>

#include "pwl/models.hpp"

namespace pwl {

struct ConnectionSolution {
    double m{}, k{};
    double t_hat{};     // flight time through the central region
    double residual{};  // boundary-condition residual norm
    double l{}, n{};
    double rho{}, mu{};
    double epsilon{};
};

// Closed-form connection of the lateral slow manifolds through the central
// region, verified by flowing the attracting boundary point.
ConnectionSolution solve_three_region(double rho, double mu, double epsilon);

struct SignRelations {
    char case_label;  // 'a' (mu < -rho), 'b' (mu > -rho), 'c' (mu = -rho)
    double l, m, k;
    bool holds;  // the case's inequality on (l, k - m) is satisfied
};
SignRelations sign_relations(double rho, double mu, double epsilon);

struct HopfClassification {
    double location;          // rho or mu
    std::string at;           // "rho" or "mu"
    std::string criticality;  // "supercritical" | "subcritical" | "none"
    double sign_datum;        // l - m (at rho) or l + k (at mu)
    std::string rationale;
};
HopfClassification classify_hopf_like(const ThreeRegionParams& p);

// Residual of the buffer-system boundary equations for unknowns (m, k, tau)
// with rho = -k*eps - eps^2 and mu = m*eps - eps^2 imposed.
Vec3 buffer_connection_residual(double a, double epsilon, double m, double k,
                                double tau);

// Newton continuation in epsilon from the eps -> 0 seed
// (m, k, tau) = (a*pi/(2(1-a)), a*pi/(2(1-a)), pi).
ConnectionSolution solve_buffer_connection(double a, double epsilon);

struct DkConnectionReport {
    Vec3 equilibrium;
    bool connect;
    double gap;  // in-plane gap between the rays on {x = -1}
};
DkConnectionReport dk_connection_test(const DkModel& m, double tol = 1e-9);

struct ModifiedDkShootResult {
    ModifiedDkModel model;  // with converged s, rho
    double t;               // flight time through the inserted region
    double residual;
};
// Newton shooting on (t, s, rho) at fixed epsilon; the guess enters through
// the model's s and rho fields.
ModifiedDkShootResult modified_dk_shoot(const ModifiedDkModel& guess);

}  // namespace pwl
