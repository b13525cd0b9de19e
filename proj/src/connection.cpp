#include "pwl/connection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pwl/local_flow.hpp"
#include "pwl/manifolds.hpp"

namespace pwl {

namespace {

using ResidualFn = std::function<Vec3(const Vec3&)>;

double& comp(Vec3& v, int j) { return j == 0 ? v.x : j == 1 ? v.y : v.z; }

Mat3 fd_jacobian(const ResidualFn& F, const Vec3& x) {
    Mat3 J;
    const double xs[3] = {x.x, x.y, x.z};
    for (int j = 0; j < 3; ++j) {
        const double h = 1e-7 * std::max(1.0, std::abs(xs[j]));
        Vec3 xp = x, xm = x;
        comp(xp, j) += h;
        comp(xm, j) -= h;
        const Vec3 d = (F(xp) - F(xm)) * (1.0 / (2.0 * h));
        J.m[0][j] = d.x;
        J.m[1][j] = d.y;
        J.m[2][j] = d.z;
    }
    return J;
}

// damped Newton on a 3-vector of unknowns; throws stall_msg on failure;
// cap (if finite) keeps the iterates inside the seed's basin
Vec3 newton3(const ResidualFn& F, Vec3 x, double tol, int max_iter,
             const char* stall_msg, const char* singular_msg,
             const Vec3& cap = {kInf, kInf, kInf}) {
    Vec3 f = F(x);
    for (int it = 0; it < max_iter; ++it) {
        const double r = norm(f);
        if (r < tol) return x;
        const Mat3 J = fd_jacobian(F, x);
        const double colscale =
            norm(J.col(0)) * norm(J.col(1)) * norm(J.col(2));
        if (std::abs(J.det()) < 1e-10 * std::max(colscale, 1e-300))
            throw Error(singular_msg);
        Vec3 dx = solve3(J, f * -1.0);
        dx.x = std::clamp(dx.x, -cap.x, cap.x);
        dx.y = std::clamp(dx.y, -cap.y, cap.y);
        dx.z = std::clamp(dx.z, -cap.z, cap.z);
        double step = 1.0;
        for (int h = 0; h < 12; ++h) {
            const Vec3 xn = x + dx * step;
            try {
                const Vec3 fn = F(xn);
                if (norm(fn) < r || norm(fn) < tol) {
                    x = xn;
                    f = fn;
                    break;
                }
            } catch (const Error&) {
                // iterate left the admissible set, shorten the step
            }
            step *= 0.5;
            if (h == 11) throw Error(stall_msg);
        }
    }
    if (norm(f) < tol) return x;
    throw Error(stall_msg);
}

// Levenberg-Marquardt fallback for stiff shooting problems where the plain
// Newton direction overshoots; damping is adapted until the residual drops
Vec3 levmar3(const ResidualFn& F, Vec3 x, double tol, int max_iter,
             const char* stall_msg) {
    Vec3 f = F(x);
    double lambda = 1e-3;
    for (int it = 0; it < max_iter; ++it) {
        const double r = norm(f);
        if (r < tol) return x;
        const Mat3 J = fd_jacobian(F, x);
        Mat3 JtJ;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) JtJ.m[i][j] = dot(J.col(i), J.col(j));
        const Vec3 Jtf{dot(J.col(0), f), dot(J.col(1), f), dot(J.col(2), f)};
        bool accepted = false;
        for (int k = 0; k < 30; ++k) {
            Mat3 Ak = JtJ;
            for (int i = 0; i < 3; ++i) Ak.m[i][i] *= (1.0 + lambda);
            Vec3 dx;
            try {
                dx = solve3(Ak, Jtf * -1.0);
            } catch (const Error&) {
                lambda *= 10.0;
                continue;
            }
            const Vec3 xn = x + dx;
            try {
                const Vec3 fn = F(xn);
                if (norm(fn) < r) {
                    x = xn;
                    f = fn;
                    lambda = std::max(lambda * 0.25, 1e-12);
                    accepted = true;
                    break;
                }
            } catch (const Error&) {
                // inadmissible iterate, raise damping
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            if (norm(f) < tol) return x;
            throw Error(stall_msg);
        }
    }
    if (norm(f) < tol) return x;
    throw Error(stall_msg);
}

}  // namespace

ConnectionSolution solve_three_region(double rho, double mu, double epsilon) {
    if (!(rho < 0.0 && mu > 0.0)) throw Error("boundaries must satisfy rho < 0 < mu");
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
    const double L = std::log(std::abs(rho / mu));
    const double A = L * L + M_PI * M_PI;
    const double sA = std::sqrt(A);
    const double k = (-1.0 / (mu - rho)) *
                     (2.0 * L * (rho - mu) / sA + (rho / epsilon) * (mu - rho - epsilon * sA));
    const double m = (mu - rho) / epsilon - k - sA;
    const double t_hat = (mu - rho) / epsilon - (k + m);

    const ThreeRegionParams p = ThreeRegionParams::from_boundaries(rho, mu, m, k, epsilon);
    const PwlSystem sys = build_three_region(p);

    const Vec3 pa{rho, -m * rho - epsilon, rho + m * epsilon};
    const Vec3 pr{mu, k * mu - epsilon, mu - k * epsilon};
    LocalSolution sol(sys.regions[1], epsilon, pa);
    const double residual = norm(sol.at(t_hat) - pr);
    if (residual > 1e-8) throw Error("connection verification failed");

    // the crossing must traverse the central band monotonically (q = 0)
    double x_prev = sol.x_at(0.0);
    for (int i = 1; i <= 256; ++i) {
        const double x_cur = sol.x_at(t_hat * i / 256.0);
        if (x_cur < x_prev - 1e-10) throw Error("connection verification failed");
        x_prev = x_cur;
    }

    ConnectionSolution cs;
    cs.m = m;
    cs.k = k;
    cs.t_hat = t_hat;
    cs.residual = residual;
    cs.l = p.l;
    cs.n = p.n;
    cs.rho = rho;
    cs.mu = mu;
    cs.epsilon = epsilon;
    return cs;
}

SignRelations sign_relations(double rho, double mu, double epsilon) {
    const ConnectionSolution cs = solve_three_region(rho, mu, epsilon);
    SignRelations sr;
    sr.l = cs.l;
    sr.m = cs.m;
    sr.k = cs.k;
    const double tol = 1e-10;
    if (mu < -rho - tol) {
        sr.case_label = 'a';
        sr.holds = cs.l > 0.0 && cs.k > cs.m;
    } else if (mu > -rho + tol) {
        sr.case_label = 'b';
        sr.holds = cs.l < 0.0 && cs.k < cs.m;
    } else {
        sr.case_label = 'c';
        sr.holds = std::abs(cs.l) < 1e-9 && std::abs(cs.k - cs.m) < 1e-9;
    }
    return sr;
}

HopfClassification classify_hopf_like(const ThreeRegionParams& p) {
    HopfClassification h;
    if (std::abs(p.l) < 1e-12) {
        h.location = p.mu;
        h.at = "mu";
        h.criticality = "none";
        h.sign_datum = 0.0;
        h.rationale = "central slope vanishes, no stability change inside the band";
        return h;
    }
    if (p.l > 0.0) {
        if (p.l == p.m) throw Error("no criterion");
        h.location = p.rho;
        h.at = "rho";
        h.sign_datum = p.l - p.m;
        h.criticality = h.sign_datum > 0.0 ? "subcritical" : "supercritical";
        h.rationale = "stability lost at z = rho; sign of l - m decides criticality";
    } else {
        h.location = p.mu;
        h.at = "mu";
        h.sign_datum = p.l + p.k;
        h.criticality = h.sign_datum > 0.0 ? "subcritical" : "supercritical";
        h.rationale = "stability lost at z = mu; sign of l + k decides criticality";
    }
    return h;
}

Vec3 buffer_connection_residual(double a, double epsilon, double m, double k,
                                double tau) {
    BufferModel bm{a, m, k, epsilon};
    const PwlSystem sys = build_buffer(bm);
    const SlowManifolds sm = canonical_slow_manifolds(sys);
    LocalSolution sol(sys.regions[1], epsilon, sm.p_attract);
    return sol.at(tau) - sm.p_repel;
}

ConnectionSolution solve_buffer_connection(double a, double epsilon) {
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
    if (!(a > 0.0 && a < 1.0)) throw Error("a must lie in (0, 1)");
    const double seed_mk = a * M_PI / (2.0 * (1.0 - a));
    Vec3 x{seed_mk, seed_mk, M_PI};  // (m, k, tau)
    const int steps = 10;  // continuation steps of size eps/10
    for (int j = 1; j <= steps; ++j) {
        const double ej = epsilon * j / steps;
        const ResidualFn F = [a, ej](const Vec3& v) {
            return buffer_connection_residual(a, ej, v.x, v.y, v.z);
        };
        x = newton3(F, x, 1e-12, 50, "continuation stalled",
                    "near-singular Jacobian; det should stay near -a^2*pi*(a-1)");
    }
    ConnectionSolution cs;
    cs.m = x.x;
    cs.k = x.y;
    cs.t_hat = x.z;
    cs.residual = norm(buffer_connection_residual(a, epsilon, x.x, x.y, x.z));
    if (cs.residual > 1e-10) throw Error("continuation stalled");
    BufferModel bm{a, cs.m, cs.k, epsilon};
    cs.rho = bm.rho();
    cs.mu = bm.mu();
    cs.l = -epsilon;
    cs.n = -cs.rho * cs.mu / epsilon;
    cs.epsilon = epsilon;
    return cs;
}

DkConnectionReport dk_connection_test(const DkModel& m, double tol) {
    DkConnectionReport rep;
    rep.equilibrium = m.equilibrium();
    const PwlSystem sys = build_dk(m);
    const SlowManifolds sm = canonical_slow_manifolds(sys);
    const Vec3 qa = sm.attracting().point_at_x(-1.0);
    const Vec3 qr = sm.repelling().point_at_x(-1.0);
    rep.gap = norm(qa - qr);
    rep.connect = std::abs(rep.equilibrium.x + 1.0) < tol;
    return rep;
}

ModifiedDkShootResult modified_dk_shoot(const ModifiedDkModel& guess) {
    // residual of flowing the attracting boundary point across the inserted
    // region for time t; unknowns v = (t, s, rho)
    const ResidualFn F = [&guess](const Vec3& v) {
        ModifiedDkModel mm = guess;
        mm.s = v.y;
        mm.rho = v.z;
        const PwlSystem sys = build_modified_dk(mm);
        const SlowManifolds sm = canonical_slow_manifolds(sys);
        LocalSolution sol(sys.regions[1], sys.epsilon, sm.p_attract);
        return sol.at(v.x) - sm.p_repel;
    };
    // seed the flight time from the slow coordinates: the crossing drifts
    // along the inserted region's slow direction, so matching the slow
    // components fixes the loop count; a local scan then picks the phase
    const PwlSystem sys0 = build_modified_dk(guess);
    const RegionSpec& nreg = sys0.regions[1];
    const EigenStructure es0 = eigenstructure(nreg.A);
    const SlowManifolds sm0 = canonical_slow_manifolds(sys0);
    const Vec3 u_eq = -(nreg.A.inverse() * nreg.b);
    const double wa = (es0.P_inv * (sm0.p_attract - u_eq)).x;
    const double wr = (es0.P_inv * (sm0.p_repel - u_eq)).x;
    const double period = 2.0 * M_PI / es0.beta;
    double t_slow = period;
    if (wa * wr > 0.0 && es0.lambda_slow != 0.0)
        t_slow = std::log(wr / wa) / es0.lambda_slow;
    if (!(t_slow > 0.0)) t_slow = period;
    double t0 = t_slow;
    double best = kInf;
    const double t_lo = 0.05 * period;
    const double t_hi = t_slow + period;
    const int nscan =
        std::max(400, static_cast<int>((t_hi - t_lo) / (period / 60.0)));
    for (int i = 0; i <= nscan; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / nscan;
        const double r = norm(F({t, guess.s, guess.rho}));
        if (r < best) {
            best = r;
            t0 = t;
        }
    }
    Vec3 x{t0, guess.s, guess.rho};
    try {
        x = newton3(F, x, 1e-12, 80, "shooting diverged",
                    "singular shooting Jacobian", {0.25 * period, 0.05, 0.02});
    } catch (const Error&) {
        // stiff cases need damping in the normal equations
        x = levmar3(F, {t0, guess.s, guess.rho}, 1e-12, 200, "shooting diverged");
    }
    ModifiedDkShootResult res;
    res.model = guess;
    res.model.s = x.y;
    res.model.rho = x.z;
    res.t = x.x;
    res.residual = norm(F(x));
    if (res.residual > 1e-9) throw Error("shooting diverged");
    return res;
}

}  // namespace pwl
