#include "pwl/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace pwl {

namespace {

// earliest root of x(t) - B in (ta, tb], refined by bisection; signs of g
// at the endpoints must differ
double bisect_crossing(const LocalSolution& sol, double B, double ta, double tb,
                       double tol) {
    double ga = sol.x_at(ta) - B;
    for (int it = 0; it < 200 && tb - ta > tol; ++it) {
        const double tm = 0.5 * (ta + tb);
        const double gm = sol.x_at(tm) - B;
        if ((ga <= 0.0) == (gm <= 0.0)) {
            ta = tm;
            ga = gm;
        } else {
            tb = tm;
        }
    }
    return tb;
}

}  // namespace

Vec3 Trajectory::state_at(double t) const {
    if (arcs.empty()) throw Error("empty trajectory");
    size_t lo = 0, hi = arcs.size() - 1;
    while (lo < hi) {
        const size_t mid = (lo + hi + 1) / 2;
        if (arcs[mid].t_entry <= t)
            lo = mid;
        else
            hi = mid - 1;
    }
    const TrajectoryArc& a = arcs[lo];
    if (t < a.t_entry - 1e-12 || t > a.t_exit + 1e-12)
        throw Error("time outside trajectory range");
    return a.solution.at(t - a.t_entry);
}

void integrate_arcs(const PwlSystem& sys, const Vec3& p0, double t_max,
                    const IntegrateOptions& opt, const ArcVisitor& visit) {
    if (!(t_max > 0.0)) throw Error("t_max must be positive");
    if (!p0.finite()) throw Error("non-finite initial state");

    double t = 0.0;
    Vec3 p = p0;
    int idx = sys.region_index_at(p.x);
    long events = 0;
    // anti-chatter window: after a micro-arc (near-tangent crossing) the
    // immediate re-crossing is ignored for a doubling interval so a sliding
    // segment advances instead of pinning to the plane
    double guard = 0.0;

    while (t < t_max) {
        if (++events > opt.max_events) throw Error("event budget exceeded");

        LocalSolution sol(sys.regions[idx], sys.epsilon, p);
        const double t_rem = t_max - t;

        // when the arc starts on a boundary plane, pick the region the flow
        // actually enters by probing a short time ahead
        {
            const double hp = std::min(1e-8, 0.5 * t_rem);
            const double xp = sol.x_at(hp);
            int shift = 0;
            if (xp < sys.regions[idx].lower_x && idx > 0)
                shift = -1;
            else if (xp > sys.regions[idx].upper_x &&
                     idx + 1 < static_cast<int>(sys.regions.size()))
                shift = 1;
            if (shift != 0) {
                idx += shift;
                sol = LocalSolution(sys.regions[idx], sys.epsilon, p);
            }
        }

        const RegionSpec& r = sys.regions[idx];
        const double omega = sol.angular_freq();
        double h = 0.01;
        if (omega > 0.0) h = std::min(h, 0.25 * M_PI / omega);

        // dense scan for the first boundary crossing; the sign right after
        // entry stands in for the sign at t = 0 so that starting on the
        // plane does not fire a spurious event
        const double t0_probe = std::min(std::max(1e-10, guard), 0.5 * t_rem);
        double ta = 0.0;
        double ga_lo = std::isfinite(r.lower_x) ? sol.x_at(t0_probe) - r.lower_x : 1.0;
        double ga_hi = std::isfinite(r.upper_x) ? sol.x_at(t0_probe) - r.upper_x : -1.0;
        double t_ev = -1.0;
        double B_ev = 0.0;
        bool hit_upper = false;
        while (ta < t_rem) {
            const double tb = std::min(ta + h, t_rem);
            const double xb = sol.x_at(tb);
            double best = kInf;
            if (std::isfinite(r.lower_x)) {
                const double gb = xb - r.lower_x;
                if ((ga_lo <= 0.0) != (gb <= 0.0)) {
                    const double tc =
                        bisect_crossing(sol, r.lower_x, ta, tb, opt.event_tol);
                    if (tc < best) {
                        best = tc;
                        B_ev = r.lower_x;
                        hit_upper = false;
                    }
                }
                ga_lo = gb;
            }
            if (std::isfinite(r.upper_x)) {
                const double gb = xb - r.upper_x;
                if ((ga_hi <= 0.0) != (gb <= 0.0)) {
                    const double tc =
                        bisect_crossing(sol, r.upper_x, ta, tb, opt.event_tol);
                    if (tc < best) {
                        best = tc;
                        B_ev = r.upper_x;
                        hit_upper = true;
                    }
                }
                ga_hi = gb;
            }
            if (std::isfinite(best) && best > t0_probe) {
                t_ev = best;
                break;
            }
            ta = tb;
        }

        const bool open_arc = t_ev < 0.0;
        const double dt_arc = open_arc ? t_rem : t_ev;
        guard = (!open_arc && dt_arc < 1e-7)
                    ? std::min(std::max(2.0 * guard, 2e-10), 1e-4)
                    : 0.0;

        TrajectoryArc arc{idx, r.id, t, t + dt_arc, p, sol.at(dt_arc), sol};
        if (!open_arc) arc.state_exit.x = B_ev;  // snap onto the plane

        p = arc.state_exit;
        t = arc.t_exit;
        if (!visit(arc)) return;
        if (open_arc) return;

        idx += hit_upper ? 1 : -1;
        if (idx < 0 || idx >= static_cast<int>(sys.regions.size()))
            throw Error("trajectory left the region complex");
    }
}

Trajectory integrate(const PwlSystem& sys, const Vec3& p0, double t_max,
                     const IntegrateOptions& opt) {
    Trajectory traj;
    double next_sample = 0.0;
    integrate_arcs(sys, p0, t_max, opt, [&](const TrajectoryArc& arc) {
        if (opt.dt_sample > 0.0) {
            while (next_sample <= arc.t_exit + 1e-15) {
                traj.samples.push_back({next_sample,
                                        arc.solution.at(next_sample - arc.t_entry),
                                        arc.region_index});
                next_sample += opt.dt_sample;
            }
        }
        traj.arcs.push_back(arc);
        return true;
    });
    if (opt.dt_sample > 0.0 &&
        (traj.samples.empty() || traj.samples.back().t < t_max - 1e-12))
        traj.samples.push_back(
            {traj.final_time(), traj.final_state(), traj.arcs.back().region_index});
    return traj;
}

}  // namespace pwl
