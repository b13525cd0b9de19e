// End-to-end acceptance checks against the published reference numbers.
// Each criterion prints exactly one PASS/FAIL line; the process exits
// nonzero when any of them fail.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pwl/connection.hpp"
#include "pwl/integrate.hpp"
#include "pwl/local_flow.hpp"
#include "pwl/manifolds.hpp"
#include "pwl/models.hpp"
#include "pwl/wayinout.hpp"
#include "support/rk_oracle.hpp"

using namespace pwl;

namespace {

int g_failures = 0;

void report(int idx, bool ok, const std::string& detail) {
    std::printf("criterion %d: %s  (%s)\n", idx, ok ? "PASS" : "FAIL", detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

PwlSystem fig5_system(ConnectionSolution* out = nullptr) {
    const ConnectionSolution cs = solve_three_region(-0.085, 0.15, 0.05);
    if (out) *out = cs;
    return build_three_region(
        ThreeRegionParams::from_boundaries(cs.rho, cs.mu, cs.m, cs.k, cs.epsilon));
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1.0));
    return v;
}

bool close3(double v, double ref) { return std::abs(v - ref) < 5e-4; }

// agreement to 4 significant figures
bool sig4(double v, double ref) {
    return std::abs(v - ref) <= 0.5e-3 * std::abs(ref) + 1e-12;
}

void criterion1() {
    ConnectionSolution cs;
    fig5_system(&cs);
    const bool ok = close3(cs.m, 1.318) && close3(cs.k, 0.189) &&
                    close3(cs.l, -0.356) && cs.residual < 1e-9;
    report(1, ok, fmt("m=%.4f k=%.4f l=%.4f residual=%.2e", cs.m, cs.k, cs.l,
                      cs.residual));
}

void criterion2() {
    bool ok = true;
    double prev = 1e300;
    std::string detail;
    for (double eps : {0.25, 0.1, 0.05, 0.01}) {
        const DelayEstimate d = maximal_delay(build_two_region({1.0, 0.1, eps}), 1.0);
        const bool in = d.has_bounds && d.z_d > d.lower && d.z_d < d.upper;
        ok = ok && in && d.z_d < prev;
        prev = d.z_d;
        detail += fmt("%szd(%g)=%.3f%s", detail.empty() ? "" : " ", eps, d.z_d,
                      in ? "" : "!");
    }
    report(2, ok, detail);
}

void criterion3() {
    const PwlSystem sys = fig5_system();
    const WayInWayOutCurve c = way_in_way_out(sys, 1.0, linspace(-1.0, -0.2, 50));
    const AsymptoteFit f = asymptote_fit(c);
    const double ds = std::abs(f.slope - f.slope_theory) / std::abs(f.slope_theory);
    const double di =
        std::abs(f.intercept - f.intercept_theory) / std::abs(f.intercept_theory);
    const bool ok = f.has_line && ds < 0.05 && di < 0.10;
    report(3, ok,
           fmt("slope=%.4f vs %.4f (%.1f%%), intercept=%.4f vs %.4f (%.1f%%)",
               f.slope, f.slope_theory, 100 * ds, f.intercept, f.intercept_theory,
               100 * di));
}

void criterion4() {
    const double a = 0.2, eps = 0.05;
    const ConnectionSolution cs = solve_buffer_connection(a, eps);
    const double seed = a * M_PI / (2.0 * (1.0 - a));
    bool ok = cs.residual < 1e-10 && std::abs(cs.m - seed) < 2e-2 &&
              std::abs(cs.k - seed) < 2e-2 && std::abs(cs.m - 0.3990) < 5e-3 &&
              std::abs(cs.k - 0.3915) < 5e-3;
    const PwlSystem sys = build_buffer({a, cs.m, cs.k, eps});
    const WayInWayOutCurve c = way_in_way_out(sys, 1.0, linspace(-3.0, -1.5, 20));
    double plat = 0.0;
    for (const WayInOutPair& p : c.pairs) plat += p.z_out;
    plat /= c.pairs.empty() ? 1 : c.pairs.size();
    const double cap = a - cs.mu;
    ok = ok && !c.pairs.empty() && plat <= cap && std::abs(plat - cap) / cap < 0.05;
    report(4, ok,
           fmt("m=%.5f k=%.5f residual=%.1e plateau=%.4f vs a-mu=%.4f (%.1f%%)",
               cs.m, cs.k, cs.residual, plat, cap, 100 * std::abs(plat - cap) / cap));
}

void criterion5() {
    const PwlSystem sys = fig5_system();
    WayInOutOptions opt;
    opt.plateau_frac = 0.05;  // the saturated branch carries per-loop jitter
    const std::vector<PrecisionRow> rows =
        precision_diagnosis(sys, {1e-12, 1e-9, 1e-6}, linspace(-3.5, -0.3, 40), opt);
    const double table[3][2] = {{2.78e-12, 1.57e-11},
                                {1.43e-10, 8.09e-10},
                                {1.24e-6, 7.03e-6}};
    bool ok = rows.size() == 3;
    std::string detail;
    for (size_t i = 0; i < rows.size() && i < 3; ++i) {
        const auto within3 = [](double v, double ref) {
            return v > ref / 3.0 && v < ref * 3.0;
        };
        const bool row_ok = std::isfinite(rows[i].theta_min) &&
                            within3(rows[i].theta_min, table[i][0]) &&
                            within3(rows[i].theta_max, table[i][1]);
        ok = ok && row_ok;
        detail += fmt("%s%g:[%.2e,%.2e]%s", i ? " " : "", rows[i].precision,
                      rows[i].theta_min, rows[i].theta_max, row_ok ? "" : "!");
    }
    report(5, ok, detail);
}

void criterion6() {
    std::vector<double> eg;
    for (double e = 1e-5; e < 1.05e-2; e *= std::pow(10.0, 0.25)) eg.push_back(e);
    const DelaySweep sw = delay_vs_epsilon(
        [](double e) {
            DkModel m;
            m.I = 2.0;
            m.epsilon = e;
            return build_dk(m);
        },
        eg, 1.0);
    double z3 = 0.0, z5 = 0.0;
    for (const DelaySweepRow& r : sw.rows) {
        if (std::abs(r.epsilon - 1e-3) < 1e-12) z3 = r.z_d;
        if (std::abs(r.epsilon - 1e-5) < 1e-14) z5 = r.z_d;
    }
    const double ratio = z3 != 0.0 ? z5 / z3 : -1.0;
    const bool ok = ratio > 0.005 && ratio < 0.05 && sw.rel_residual < 0.10;
    report(6, ok,
           fmt("zd ratio=%.4f, fit u1=%.3f u2=%.3f rel_residual=%.4f", ratio,
               sw.u1, sw.u2, sw.rel_residual));
}

void criterion7() {
    struct Case {
        double eps, s0, rho0, s_ref, rho_ref;
        bool stiff;
    };
    const Case cases[] = {
        {1e-3, 0.4552, -1.0067, 0.4552, -1.0067, false},
        {1e-5, 0.461129, -1.000068, 0.461129, -1.000068, false},
        {1e-3, 0.6165, -1.0018, 0.6165, -1.0018, true},
        {1e-5, 0.625649, -1.000018, 0.625649, -1.000018, true},
    };
    bool ok = true;
    std::string detail;
    for (const Case& c : cases) {
        ModifiedDkModel m;
        m.I = -1.4;
        m.epsilon = c.eps;
        m.s = c.s0;
        m.rho = c.rho0;
        if (c.stiff) m.eta1 = -10.0;
        std::string one;
        try {
            const ModifiedDkShootResult r = modified_dk_shoot(m);
            const bool good = r.residual < 1e-9 && sig4(r.model.s, c.s_ref) &&
                              sig4(r.model.rho, c.rho_ref);
            ok = ok && good;
            one = fmt("s=%.6f rho=%.6f%s", r.model.s, r.model.rho, good ? "" : "!");
        } catch (const Error& e) {
            ok = false;
            one = fmt("error: %s", e.what());
        }
        detail += (detail.empty() ? "" : " | ") + one;
    }
    report(7, ok, detail);
}

bool run_cli(const std::string& args) {
    const std::string cmd = std::string(PWL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion8() {
    bool ok = true;
    std::string detail;

    // closed-form flow vs independent RK reference
    {
        const PwlSystem sys = fig5_system();
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> u(-0.3, 0.3);
        double worst = 0.0;
        for (int it = 0; it < 10; ++it) {
            const Vec3 p0{u(rng), u(rng), u(rng) - 0.2};
            const Vec3 exact = integrate(sys, p0, 40.0).state_at(40.0);
            const Vec3 ref = pwl_test::rk_flow(sys, p0, 40.0, 1e-13);
            worst = std::max(worst, norm(exact - ref) / (1.0 + norm(ref)));
        }
        ok = ok && worst < 1e-8;
        detail += fmt("rk err=%.1e", worst);
    }

    // ray invariance
    {
        const PwlSystem sys = build_two_region({1.0, 0.1, 0.25});
        const SlowManifolds sm = canonical_slow_manifolds(sys);
        const Vec3 q = sm.attracting().point_at_z(-1.0);
        const Vec3 moved = local_flow(sys.regions[0], sys.epsilon, q, 0.5);
        const double d = ray_distance(sm.attracting(), moved);
        ok = ok && d < 1e-10;
        detail += fmt(", ray inv=%.1e", d);
    }

    // C(t) envelope on 100 random orbits
    {
        const double k = 0.1, eps = 0.25;
        const PwlSystem sys = build_two_region({1.0, k, eps});
        const SlowManifolds sm = canonical_slow_manifolds(sys);
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> uy(1e-4, 2e-3), ut(0.5, 18.0);
        bool env = true;
        for (int it = 0; it < 100; ++it) {
            const Vec3 p{0.0, -eps + uy(rng) * (it % 2 ? 1.0 : -1.0), -k * eps};
            const double theta = theta_amplitude(p, k, eps);
            const double t = ut(rng);
            const double d = distance_along_plane(sys, sm.repelling(), p, t).distance;
            const double ratio = d / (theta * std::exp(0.5 * k * t));
            env = env && ratio > 0.25 - 1e-9 && ratio < std::sqrt(2.0) + 1e-9;
        }
        ok = ok && env;
        detail += fmt(", envelope=%s", env ? "ok" : "violated");
    }

    // continuity certification across all builders
    {
        bool cont = true;
        try {
            build_two_region({1.0, 0.1, 0.25}).certify_continuity();
            fig5_system().certify_continuity();
            const ConnectionSolution cs = solve_buffer_connection(0.2, 0.05);
            build_buffer({0.2, cs.m, cs.k, 0.05}).certify_continuity();
            DkModel dk;
            dk.I = -1.5;
            dk.epsilon = 1e-3;
            build_dk(dk).certify_continuity();
            ModifiedDkModel mm;
            mm.I = -1.4;
            mm.epsilon = 1e-3;
            mm.s = 0.4552;
            mm.rho = -1.0067;
            build_modified_dk(mm).certify_continuity();
        } catch (const Error&) {
            cont = false;
        }
        ok = ok && cont;
        detail += fmt(", continuity=%s", cont ? "ok" : "failed");
    }

    // byte-identical CLI outputs on repeated runs
    {
        bool det = true;
        std::string runs[2];
        for (int i = 0; i < 2; ++i) {
            const std::string dir = fmt("/tmp/pwl_accept_%d", i);
            if (std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str()) != 0) {
                det = false;
                break;
            }
            det = det && run_cli("--out " + dir +
                                 " connect --model three-region --rho -0.085 "
                                 "--mu 0.15 --eps 0.05");
            det = det && run_cli("--out " + dir +
                                 " wayinout --model two-region --m 1 --k 0.1 "
                                 "--eps 0.25 --delta 1 --zmin -2 --zmax -0.5 --n 8");
            runs[i] = slurp(dir + "/connection.json") + slurp(dir + "/wayinout.csv") +
                      slurp(dir + "/report.json");
        }
        det = det && !runs[0].empty() && runs[0] == runs[1];
        ok = ok && det;
        detail += fmt(", determinism=%s", det ? "ok" : "failed");
    }

    report(8, ok, detail);
}

void bursting_footnote() {
    DkModel m;
    m.I = -1.5;
    m.epsilon = 1e-3;
    const PwlSystem sys = build_dk(m);
    IntegrateOptions io;
    io.dt_sample = 0.5;
    const Trajectory tr = integrate(sys, {0.1, 0.0, 0.0}, 3.0 / m.epsilon, io);
    std::vector<double> spikes;
    for (size_t i = 1; i < tr.samples.size(); ++i)
        if (tr.samples[i - 1].u.x < 1.0 && tr.samples[i].u.x >= 1.0)
            spikes.push_back(tr.samples[i].t);
    int bursts = spikes.empty() ? 0 : 1;
    int quiet = 0;
    for (size_t i = 1; i < spikes.size(); ++i)
        if (spikes[i] - spikes[i - 1] > 50.0) {
            ++quiet;
            ++bursts;
        }
    const int alternations = std::min(bursts - 1, quiet);
    const bool ok = alternations >= 2;
    std::printf("bursting alternation: %s  (%zu spikes, %d bursts, %d quiescent gaps)\n",
                ok ? "PASS" : "FAIL", spikes.size(), bursts, quiet);
    if (!ok) ++g_failures;
}

}  // namespace

int main() {
    std::setbuf(stdout, nullptr);
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    bursting_footnote();
    if (g_failures) std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
