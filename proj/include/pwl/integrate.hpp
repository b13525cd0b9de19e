#pragma once

#include <functional>
#include <vector>

#include "pwl/local_flow.hpp"
#include "pwl/system.hpp"

namespace pwl {

// One maximal stay inside a single region, with its exact local solution.
struct TrajectoryArc {
    int region_index;
    std::string region_id;
    double t_entry;
    double t_exit;  // equals t_max for the final open arc
    Vec3 state_entry;
    Vec3 state_exit;
    LocalSolution solution;
};

struct TrajectorySample {
    double t;
    Vec3 u;
    int region_index;
};

struct Trajectory {
    std::vector<TrajectoryArc> arcs;
    std::vector<TrajectorySample> samples;

    Vec3 state_at(double t) const;
    const Vec3& final_state() const { return arcs.back().state_exit; }
    double final_time() const { return arcs.back().t_exit; }
};

struct IntegrateOptions {
    double dt_sample{0.0};  // 0 disables dense sampling
    long max_events{1000000};
    double event_tol{1e-12};  // bisection window on the crossing time
};

// Exact hybrid integration: closed-form flow inside each region, switching
// events located by dense scan plus bisection on x(t) - boundary.
Trajectory integrate(const PwlSystem& sys, const Vec3& p0, double t_max,
                     const IntegrateOptions& opt = {});

// Streaming variant: arcs are handed to the visitor as they are produced;
// returning false stops the integration after that arc.
using ArcVisitor = std::function<bool(const TrajectoryArc&)>;
void integrate_arcs(const PwlSystem& sys, const Vec3& p0, double t_max,
                    const IntegrateOptions& opt, const ArcVisitor& visit);

}  // namespace pwl
