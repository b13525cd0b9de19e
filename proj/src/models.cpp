#include "pwl/models.hpp"

#include <cmath>

#include "pwl/eigen3.hpp"

namespace pwl {
namespace {

RegionSpec clock_region(const std::string& id, double slope, double offset, double eps,
                        double lo, double hi) {
    RegionSpec r;
    r.id = id;
    r.slope = slope;
    r.offset = offset;
    r.lower_x = lo;
    r.upper_x = hi;
    r.clock = true;
    r.A = Mat3(slope, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0);
    r.b = Vec3{offset, 0.0, eps};
    return r;
}

RegionSpec buffer_region(const std::string& id, double slope, double offset, double eps,
                         double a, double lo, double hi) {
    RegionSpec r;
    r.id = id;
    r.slope = slope;
    r.offset = offset;
    r.lower_x = lo;
    r.upper_x = hi;
    r.A = Mat3(slope, -1.0, 0.0, 1.0, 0.0, -1.0, -eps, 0.0, 0.0);
    r.b = Vec3{offset, 0.0, eps * a};
    return r;
}

RegionSpec dk_region(const std::string& id, double slope, double offset, double eta,
                     double a, double b, double I, double eps, double lo, double hi) {
    RegionSpec r;
    r.id = id;
    r.slope = slope;
    r.offset = offset;
    r.lower_x = lo;
    r.upper_x = hi;
    r.A = Mat3(slope, -1.0, -1.0, eta, -eta * a, 0.0, eps, 0.0, -eps * b);
    r.b = Vec3{offset + I, 0.0, 0.0};
    return r;
}

void require(bool cond, const char* msg) {
    if (!cond) throw Error(msg);
}

// least squares line y = c0 + c1*x
void fit_line(const std::vector<double>& x, const std::vector<double>& y, double& c0,
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

ThreeRegionParams ThreeRegionParams::from_boundaries(double rho, double mu, double m,
                                                     double k, double epsilon) {
    require(rho < 0.0 && mu > 0.0, "boundaries must satisfy rho < 0 < mu");
    require(m > 0.0 && m < 2.0 && k > 0.0 && k < 2.0, "slopes out of admissible range");
    require(epsilon > 0.0, "epsilon must be positive");
    ThreeRegionParams p;
    p.rho = rho;
    p.mu = mu;
    p.m = m;
    p.k = k;
    p.l = (m * rho + k * mu) / (mu - rho);
    p.n = -rho * mu * (k + m) / (mu - rho);
    p.epsilon = epsilon;
    return p;
}

Vec3 DkModel::equilibrium() const {
    const double d = 1.0 - 1.0 / a - 1.0 / b;
    if (std::abs(d) < 1e-12) throw Error("no isolated equilibrium");
    const double e = -I / d;
    return {e, e / a, e / b};
}

PwlSystem build_two_region(const TwoRegionModel& m) {
    require(m.m > 0.0 && m.m < 2.0 && m.k > 0.0 && m.k < 2.0,
            "slopes out of admissible range");
    require(m.epsilon >= 0.0, "epsilon must be non-negative");
    PwlSystem sys;
    sys.kind = SystemKind::TwoRegion;
    sys.epsilon = m.epsilon;
    sys.regions.push_back(clock_region("L", -m.m, 0.0, m.epsilon, -kInf, 0.0));
    sys.regions.push_back(clock_region("R", m.k, 0.0, m.epsilon, 0.0, kInf));
    sys.certify_continuity();
    return sys;
}

PwlSystem build_three_region(const ThreeRegionParams& p) {
    require(p.rho < 0.0 && p.mu > 0.0, "boundaries must satisfy rho < 0 < mu");
    require(p.m > 0.0 && p.m < 2.0 && p.k > 0.0 && p.k < 2.0 && std::abs(p.l) < 2.0,
            "slopes out of admissible range");
    require(p.epsilon >= 0.0, "epsilon must be non-negative");
    PwlSystem sys;
    sys.kind = SystemKind::ThreeRegion;
    sys.epsilon = p.epsilon;
    // lateral offsets keep f continuous at rho and mu
    const double off_l = (p.l + p.m) * p.rho + p.n;
    const double off_r = (p.l - p.k) * p.mu + p.n;
    sys.regions.push_back(clock_region("L", -p.m, off_l, p.epsilon, -kInf, p.rho));
    sys.regions.push_back(clock_region("C", p.l, p.n, p.epsilon, p.rho, p.mu));
    sys.regions.push_back(clock_region("R", p.k, off_r, p.epsilon, p.mu, kInf));
    sys.certify_continuity();
    return sys;
}

PwlSystem build_buffer(const BufferModel& m) {
    require(m.m > 0.0 && m.m < 2.0 && m.k > 0.0 && m.k < 2.0,
            "slopes out of admissible range");
    require(m.epsilon > 0.0, "epsilon must be positive");
    require(m.a > 0.0 && m.a < 1.0, "a must lie in (0, 1)");
    const double rho = m.rho(), mu = m.mu();
    require(rho < 0.0 && mu > 0.0, "epsilon too large for the buffer geometry");
    const double l = -m.epsilon;
    const double n = -rho * mu / m.epsilon;
    const double off_l = (l + m.m) * rho + n;
    const double off_r = (l - m.k) * mu + n;
    PwlSystem sys;
    sys.kind = SystemKind::Buffer;
    sys.epsilon = m.epsilon;
    sys.regions.push_back(buffer_region("L", -m.m, off_l, m.epsilon, m.a, -kInf, rho));
    sys.regions.push_back(buffer_region("C", l, n, m.epsilon, m.a, rho, mu));
    sys.regions.push_back(buffer_region("R", m.k, off_r, m.epsilon, m.a, mu, kInf));
    sys.certify_continuity();
    // sign structure of the spectra: lateral slow eigenvalues negative,
    // focal parts contracting on the left, center in the middle, expanding
    // on the right
    const EigenStructure eL = eigenstructure(sys.regions[0].A);
    const EigenStructure eC = eigenstructure(sys.regions[1].A);
    const EigenStructure eR = eigenstructure(sys.regions[2].A);
    require(eL.lambda_slow < 0.0 && eL.alpha < 0.0, "left spectrum has wrong signs");
    require(std::abs(eC.alpha) < 1e-9 && eC.lambda_slow < 0.0,
            "central spectrum is not of center type");
    require(eR.lambda_slow < 0.0 && eR.alpha > 0.0, "right spectrum has wrong signs");
    return sys;
}

PwlSystem build_dk(const DkModel& m) {
    require(m.epsilon > 0.0, "epsilon must be positive");
    require(m.eta > 0.0, "eta must be positive");
    require(m.a > 0.0 && m.b > 0.0, "a and b must be positive");
    m.equilibrium();  // throws when the nullcline planes are parallel
    PwlSystem sys;
    sys.kind = SystemKind::Dk;
    sys.epsilon = m.epsilon;
    sys.regions.push_back(
        dk_region("L", -1.0, -2.0, m.eta, m.a, m.b, m.I, m.epsilon, -kInf, -1.0));
    sys.regions.push_back(
        dk_region("M", 1.0, 0.0, m.eta, m.a, m.b, m.I, m.epsilon, -1.0, 1.0));
    sys.regions.push_back(
        dk_region("R", -1.0, 2.0, m.eta, m.a, m.b, m.I, m.epsilon, 1.0, kInf));
    sys.certify_continuity();
    return sys;
}

PwlSystem build_modified_dk(const ModifiedDkModel& m) {
    require(m.epsilon > 0.0, "epsilon must be positive");
    require(m.s > 0.0 && m.s < 1.0, "s must lie in (0, 1)");
    const double mu = m.mu();
    require(m.rho < mu && mu < 1.0, "region ordering violated");
    const double eta = m.effective_eta();
    require(eta > 0.0, "eta must be positive");
    // offsets keep f continuous: N picks up the kink moved from x = -1
    const double off_n = -2.0 - (1.0 + m.s) * m.rho;
    PwlSystem sys;
    sys.kind = SystemKind::ModifiedDk;
    sys.epsilon = m.epsilon;
    sys.regions.push_back(
        dk_region("L", -1.0, -2.0, eta, m.a, m.b, m.I, m.epsilon, -kInf, m.rho));
    sys.regions.push_back(
        dk_region("N", m.s, off_n, eta, m.a, m.b, m.I, m.epsilon, m.rho, mu));
    sys.regions.push_back(
        dk_region("M", 1.0, 0.0, eta, m.a, m.b, m.I, m.epsilon, mu, 1.0));
    sys.regions.push_back(
        dk_region("R", -1.0, 2.0, eta, m.a, m.b, m.I, m.epsilon, 1.0, kInf));
    sys.certify_continuity();
    return sys;
}

ModelInfo extract_info(const PwlSystem& sys) {
    ModelInfo info;
    info.kind = sys.kind;
    info.epsilon = sys.epsilon;
    const auto& r = sys.regions;
    switch (sys.kind) {
        case SystemKind::TwoRegion:
            info.m = -r[0].slope;
            info.k = r[1].slope;
            info.z_hopf = 0.0;
            break;
        case SystemKind::ThreeRegion:
        case SystemKind::Buffer:
            info.m = -r[0].slope;
            info.l = r[1].slope;
            info.n = r[1].offset;
            info.k = r[2].slope;
            info.rho = r[0].upper_x;
            info.mu = r[1].upper_x;
            if (sys.kind == SystemKind::Buffer) {
                info.a = r[0].b.z / sys.epsilon;
                info.z_hopf = info.a;
            } else {
                info.z_hopf = info.l > 0.0 ? info.rho : info.mu;
            }
            break;
        case SystemKind::Dk:
        case SystemKind::ModifiedDk: {
            const int mi = sys.kind == SystemKind::Dk ? 1 : 2;
            info.eta = r[mi].A.m[1][0];
            info.a = -r[mi].A.m[1][1] / info.eta;
            info.b = -r[mi].A.m[2][2] / sys.epsilon;
            info.I = r[mi].b.x;
            info.z_hopf = -1.0 + 1.0 / info.a + info.I;
            if (sys.kind == SystemKind::ModifiedDk) {
                info.s = r[1].slope;
                info.rho = r[0].upper_x;
                info.mu = r[1].upper_x;
            }
            break;
        }
    }
    return info;
}

FastSubsystem fast_subsystem(const PwlSystem& sys, double z) {
    if (sys.kind != SystemKind::TwoRegion && sys.kind != SystemKind::ThreeRegion)
        throw Error("fast subsystem is defined for the clock systems only");
    const RegionSpec& r = sys.region_at(z);
    FastSubsystem fs;
    fs.z = z;
    fs.slope = r.slope;
    fs.eq_x = z;
    fs.eq_y = r.slope * z + r.offset;
    bool on_kink = false;
    for (const RegionSpec& q : sys.regions) {
        if (std::isfinite(q.upper_x) && std::abs(z - q.upper_x) <= 1e-12) on_kink = true;
    }
    if (on_kink || std::abs(fs.slope) <= 1e-12)
        fs.stability = LayerStability::NonHyperbolic;
    else
        fs.stability = fs.slope < 0.0 ? LayerStability::StableFocus
                                      : LayerStability::UnstableFocus;
    return fs;
}

DkEigenOrders dk_eigen_orders(const DkModel& m, const std::vector<double>& eps_ladder) {
    if (eps_ladder.size() < 2) throw Error("need at least two epsilon values");
    DkEigenOrders out;
    std::vector<double> xs, lam_over_eps, alphas;
    for (double eps : eps_ladder) {
        DkModel mm = m;
        mm.epsilon = eps;
        PwlSystem sys = build_dk(mm);
        const EigenStructure es = eigenstructure(sys.regions[1].A);
        out.rows.push_back({eps, es.lambda_slow, es.alpha});
        xs.push_back(eps);
        lam_over_eps.push_back(es.lambda_slow / eps);
        alphas.push_back(es.alpha);
    }
    double c0, c1;
    fit_line(xs, lam_over_eps, c0, c1);
    out.lambda_over_eps = c0;
    fit_line(xs, alphas, c0, c1);
    out.alpha_limit = c0;
    out.alpha_over_eps = c1;
    out.same_order = std::abs(out.alpha_limit) < 1e-6;
    return out;
}

}  // namespace pwl
