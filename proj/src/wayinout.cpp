#include "pwl/wayinout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pwl {

namespace {

struct OrbitOutcome {
    bool ok{false};
    double z_out{}, t_exit{}, residual{};
};

double exit_bisect(const PwlSystem& sys, const SlowManifoldRay& ray,
                   const LocalSolution& sol, double delta, double ta, double tb) {
    for (int it = 0; it < 100 && tb - ta > 1e-12; ++it) {
        const double tm = 0.5 * (ta + tb);
        double d;
        try {
            d = distance_along_plane(sys, ray, sol.at(tm), 0.0).distance;
        } catch (const Error&) {
            d = 2.0 * delta;
        }
        (d > delta ? tb : ta) = tm;
    }
    return tb;
}

// integrate from p and march the tubular distance to the repelling ray,
// starting at the first crossing into its region
OrbitOutcome run_orbit(const PwlSystem& sys, const SlowManifolds& sm, Vec3 p,
                       double budget, double delta, double work_precision,
                       const WayInOutOptions& opt) {
    IntegrateOptions iopt;
    const int rep = sm.repelling_index;
    const SlowManifoldRay& ray = sm.repelling();
    const RegionSpec& rep_region = sys.regions[rep];

    // controlled connection perturbation: nudge the state where the orbit
    // first enters the central band
    if (work_precision > 0.0 && rep > 0) {
        const int central = rep - 1;
        Vec3 q{};
        double t_used = -1.0;
        integrate_arcs(sys, p, budget, iopt, [&](const TrajectoryArc& arc) {
            if (arc.region_index == central) {
                q = arc.state_entry;
                t_used = arc.t_entry;
                return false;
            }
            return true;
        });
        if (t_used < 0.0) return {};
        p = q + Vec3{0.0, work_precision, 0.0};
        budget -= t_used;
        if (budget <= 0.0) return {};
    }

    OrbitOutcome out;
    OrbitOutcome shallow;  // first crossing before any contraction happened
    bool entered = false;
    // hysteresis: phase swings can push the distance past delta while the
    // amplitude is still contracting, so the exit detector arms only once
    // the orbit has come well inside the tube
    bool armed = false;
    double t_enter = 0.0;
    double t_shallow = 0.0;
    integrate_arcs(sys, p, budget, iopt, [&](const TrajectoryArc& arc) {
        // an orbit that crossed delta without ever contracting and has not
        // engaged the manifold since is gone for good, keep its first crossing
        if (!armed && shallow.ok && arc.t_entry > t_shallow + 0.1 * budget)
            return false;
        if (arc.region_index != rep) return true;
        if (!entered) {
            entered = true;
            t_enter = arc.t_entry;
            out.residual =
                distance_along_plane(sys, ray, arc.state_entry, 0.0).distance;
            if (out.residual < delta / 3.0) armed = true;
        }
        const double T = arc.t_exit - arc.t_entry;
        double prev_t = 0.0;
        double tau = 0.0;
        while (true) {
            TubularCoords tc;
            try {
                tc = distance_along_plane(sys, ray, arc.solution.at(tau), 0.0);
            } catch (const Error&) {
                // grazing excursion past the boundary between events
                if (tau >= T) break;
                prev_t = tau;
                tau = std::min(tau + opt.march_dt, T);
                continue;
            }
            if (tc.distance < delta / 3.0) armed = true;
            if (tc.distance > delta && (armed || !shallow.ok)) {
                const double te =
                    tau == 0.0 ? 0.0
                               : exit_bisect(sys, ray, arc.solution, delta, prev_t, tau);
                const TubularCoords at_exit =
                    distance_along_plane(sys, ray, arc.solution.at(te), 0.0);
                OrbitOutcome& slot = armed ? out : shallow;
                slot.ok = true;
                slot.residual = out.residual;
                slot.z_out = at_exit.z_at;
                slot.t_exit = arc.t_entry + te - t_enter;
                if (armed) return false;
                t_shallow = arc.t_entry + te;
            }
            // a shallow orbit that has drifted far outside will not return
            if (!armed && shallow.ok && tc.distance > 10.0 * delta) return false;
            if (tau >= T) break;
            prev_t = tau;
            tau = std::min(tau + opt.march_dt, T);
        }
        // departed through the far boundary while still inside the tube:
        // record the last valid comparison point
        if (armed && std::isfinite(rep_region.upper_x) &&
            std::abs(arc.state_exit.x - rep_region.upper_x) < 1e-9) {
            out.ok = true;
            out.z_out = distance_along_plane(sys, ray, arc.state_exit, 0.0).z_at;
            out.t_exit = arc.t_exit - t_enter;
            return false;
        }
        return true;
    });
    if (!out.ok && shallow.ok) return shallow;
    return out;
}

double default_budget(const PwlSystem& sys, const SlowManifolds& sm, double z_start,
                      double z_hopf, const WayInOutOptions& opt) {
    const double k_rep = 2.0 * sm.repelling().alpha;
    const double tail = (2.0 / k_rep) * 45.0;  // enough to grow from 1e-17 to 1
    const double travel = (std::abs(z_start - z_hopf) + 1.0) / sys.epsilon;
    return opt.t_budget_factor * (travel + tail);
}

CurveMeta make_meta(const PwlSystem& sys, const SlowManifolds& sm, double delta) {
    const ModelInfo info = extract_info(sys);
    CurveMeta meta;
    meta.kind = sys.kind;
    meta.epsilon = sys.epsilon;
    meta.delta = delta;
    meta.m = -2.0 * sm.attracting().alpha;
    meta.k = 2.0 * sm.repelling().alpha;
    meta.rho = info.rho;
    meta.mu = info.mu;
    meta.a = info.a;
    meta.z_hopf = info.z_hopf;
    meta.z_rho_star = sm.p_attract.z;
    meta.z_mu_star = sm.p_repel.z;
    return meta;
}

// length of the flat leading segment (deep entries saturate first)
int plateau_prefix(const std::vector<double>& zo, double frac) {
    if (zo.size() < 3) return 0;
    const auto [mn, mx] = std::minmax_element(zo.begin(), zo.end());
    const double range = *mx - *mn;
    if (range <= 0.0) return static_cast<int>(zo.size());
    const double thr = frac * range;
    int j = 1;
    while (j < static_cast<int>(zo.size()) && std::abs(zo[j] - zo[j - 1]) < thr) ++j;
    return j;
}

void fit_line2(const std::vector<double>& x, const std::vector<double>& y, double& c0,
               double& c1) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (std::abs(den) < 1e-300) throw Error("degenerate fit");
    c1 = (n * sxy - sx * sy) / den;
    c0 = (sy - c1 * sx) / n;
}

}  // namespace

Vec3 entry_point(const PwlSystem& sys, const SlowManifolds& sm, double z_i,
                 double delta) {
    const SlowManifoldRay& ray = sm.attracting();
    const Vec3 q = ray.point_at_z(z_i);
    if (!sys.regions[ray.region_index].contains_x(q.x, 1e-12))
        throw Error("entry point off the attracting branch");
    if (ray.clock) {
        // seed at the spiral phase where the in-plane distance coincides with
        // the envelope amplitude; a pure y-offset would carry a phase factor
        // of 2/sqrt(4-c^2) that biases the way-in/way-out intercept
        const double phi = 0.5 * M_PI - 0.5 * std::asin(ray.alpha);
        return q + Vec3{delta * std::cos(phi), delta * std::sin(phi), 0.0};
    }
    // in-plane offset with zero x-component, so the seed stays on the same
    // switching slab cross-section
    Vec3 u = ray.plane_u, v = ray.plane_v;
    Vec3 w = v * u.x - u * v.x;
    double nw = norm(w);
    if (nw < 1e-12) {
        w = u;
        nw = norm(w);
    }
    return q + w * (delta / nw);
}

WayInWayOutCurve way_in_way_out(const PwlSystem& sys, double delta,
                                const std::vector<double>& z_grid,
                                double work_precision, const WayInOutOptions& opt) {
    if (!(delta > 0.0)) throw Error("delta must be positive");
    if (z_grid.empty()) throw Error("empty z grid");
    const SlowManifolds sm = canonical_slow_manifolds(sys);
    WayInWayOutCurve curve;
    curve.delta = delta;
    curve.meta = make_meta(sys, sm, delta);
    std::vector<double> grid = z_grid;
    std::sort(grid.begin(), grid.end());
    for (double z_i : grid) {
        const Vec3 p = entry_point(sys, sm, z_i, delta);
        const double budget = default_budget(sys, sm, z_i, curve.meta.z_hopf, opt);
        const OrbitOutcome oc =
            run_orbit(sys, sm, p, budget, delta, work_precision, opt);
        if (!oc.ok) {
            ++curve.dropped;
            continue;
        }
        curve.pairs.push_back({z_i, oc.z_out, oc.t_exit, oc.residual});
    }
    return curve;
}

DelayEstimate maximal_delay(const PwlSystem& sys, double delta,
                            const WayInOutOptions& opt) {
    const SlowManifolds sm = canonical_slow_manifolds(sys);
    const CurveMeta meta = make_meta(sys, sm, delta);
    const double budget =
        default_budget(sys, sm, sm.p_attract.z, meta.z_hopf, opt);
    const OrbitOutcome oc =
        run_orbit(sys, sm, sm.p_attract, budget, delta, opt.work_precision, opt);
    if (!oc.ok) throw Error("maximal-delay orbit produced no exit within budget");
    DelayEstimate de;
    de.z_exit = oc.z_out;
    de.t_exit = oc.t_exit;
    de.z_d = oc.z_out;
    // the DK slow drift carries z downward through the bifurcation value, so
    // the delay is the distance travelled past it
    if (sys.kind == SystemKind::Dk || sys.kind == SystemKind::ModifiedDk)
        de.z_d = std::abs(oc.z_out - meta.z_hopf);
    if (sys.kind == SystemKind::TwoRegion) {
        const ModelInfo info = extract_info(sys);
        const double m = info.m, k = info.k, eps = sys.epsilon;
        const double root = std::sqrt(4.0 - k * k);
        de.lower = -(2.0 * eps / k) * std::log(2.0 * std::sqrt(2.0) * (m + k) * eps / root) +
                   m * eps;
        de.upper = -(2.0 * eps / k) * std::log((m + k) * eps / (2.0 * root)) + m * eps;
        de.has_bounds = true;
    }
    return de;
}

AsymptoteFit asymptote_fit(const WayInWayOutCurve& curve,
                           double plateau_frac) {
    AsymptoteFit fit;
    const CurveMeta& meta = curve.meta;
    if (meta.k != 0.0) {
        fit.slope_theory = meta.m / meta.k;
        if (meta.rho != 0.0 && meta.mu != 0.0)
            fit.intercept_theory =
                -(2.0 * meta.epsilon / meta.k) * std::log(std::abs(meta.rho / meta.mu));
    }
    // abscissa is the entry depth z_rho - z_in, so the asymptote slope is m/k
    std::vector<double> zi, zo;
    for (const WayInOutPair& p : curve.pairs) {
        zi.push_back(meta.z_rho_star - p.z_in);
        zo.push_back(p.z_out - meta.z_mu_star);
    }
    if (zo.size() < 3) {
        if (!zo.empty()) {
            fit.has_plateau = true;
            double s = 0.0;
            for (double v : zo) s += v;
            fit.plateau = s / zo.size();
        }
        return fit;
    }
    const int j = plateau_prefix(zo, plateau_frac);
    if (j >= 3) {
        double s = 0.0;
        for (int i = 0; i < j; ++i) s += zo[i];
        fit.has_plateau = true;
        fit.plateau = s / j;
    }
    std::vector<double> lx(zi.begin() + (fit.has_plateau ? j : 0), zi.end());
    std::vector<double> ly(zo.begin() + (fit.has_plateau ? j : 0), zo.end());
    if (lx.size() >= 3) {
        fit_line2(lx, ly, fit.intercept, fit.slope);
        fit.has_line = true;
    } else if (!fit.has_plateau) {
        fit.has_plateau = true;
        double s = 0.0;
        for (double v : zo) s += v;
        fit.plateau = s / zo.size();
    }
    return fit;
}

DelaySweep delay_vs_epsilon(const std::function<PwlSystem(double)>& family,
                            const std::vector<double>& eps_grid, double delta,
                            const WayInOutOptions& opt) {
    if (eps_grid.size() < 3) throw Error("need at least three epsilon values");
    DelaySweep sweep;
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (double eps : eps_grid) {
        const PwlSystem sys = family(eps);
        const DelayEstimate de = maximal_delay(sys, delta, opt);
        sweep.rows.push_back({eps, de.z_d, de.has_bounds, de.lower, de.upper});
        const double f1 = eps, f2 = eps * std::log(eps);
        a11 += f1 * f1;
        a12 += f1 * f2;
        a22 += f2 * f2;
        b1 += f1 * de.z_d;
        b2 += f2 * de.z_d;
    }
    const double det = a11 * a22 - a12 * a12;
    if (std::abs(det) < 1e-300) throw Error("degenerate fit");
    sweep.u1 = (b1 * a22 - b2 * a12) / det;
    sweep.u2 = (a11 * b2 - a12 * b1) / det;
    double ss_r = 0.0, ss_z = 0.0;
    for (const DelaySweepRow& r : sweep.rows) {
        const double fit = sweep.u1 * r.epsilon + sweep.u2 * r.epsilon * std::log(r.epsilon);
        ss_r += (fit - r.z_d) * (fit - r.z_d);
        ss_z += r.z_d * r.z_d;
    }
    sweep.rel_residual = std::sqrt(ss_r / std::max(ss_z, 1e-300));
    return sweep;
}

std::pair<double, double> theta_exit_bracket(double k, double t) {
    const double e = std::exp(-k * t);
    return {std::sqrt(0.5 * e), std::sqrt(16.0 * e)};
}

std::vector<PrecisionRow> precision_diagnosis(const PwlSystem& sys,
                                              const std::vector<double>& precisions,
                                              const std::vector<double>& z_grid,
                                              const WayInOutOptions& opt) {
    if (sys.kind != SystemKind::ThreeRegion)
        throw Error("precision diagnosis needs a connected three-region system");
    std::vector<PrecisionRow> rows;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double w : precisions) {
        const WayInWayOutCurve curve = way_in_way_out(sys, opt.delta, z_grid, w, opt);
        PrecisionRow row{w, nan, nan, nan, nan};
        std::vector<double> zo;
        for (const WayInOutPair& p : curve.pairs)
            zo.push_back(p.z_out - curve.meta.z_mu_star);
        const int j = plateau_prefix(zo, opt.plateau_frac);
        if (j >= 3) {
            double sz = 0.0, st = 0.0;
            for (int i = 0; i < j; ++i) {
                sz += zo[i];
                st += curve.pairs[i].t_exit;
            }
            row.plateau = sz / j;
            row.t_exit = st / j;
            const auto br = theta_exit_bracket(curve.meta.k, row.t_exit);
            row.theta_min = br.first;
            row.theta_max = br.second;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace pwl
