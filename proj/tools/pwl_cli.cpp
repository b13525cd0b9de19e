#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "pwl/connection.hpp"
#include "pwl/integrate.hpp"
#include "pwl/models_json.hpp"
#include "pwl/wayinout.hpp"

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(std::stod(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

struct ModelFlags {
    std::string kind;
    std::string config;
    double m = 1.0, k = 0.1, eps = 0.25;
    double rho = -0.085, mu = 0.15;
    double a = 0.8, I = 0.0, eta = 0.5, b = 0.5, s = 0.5;
    double eta1 = 0.0;
    bool has_eta1 = false;

    json descriptor() const {
        if (!config.empty()) {
            std::ifstream in(config);
            if (!in) throw pwl::Error("cannot open config file: " + config);
            json j;
            in >> j;
            return j;
        }
        json j;
        j["kind"] = kind;
        j["epsilon"] = eps;
        if (kind == "two-region") {
            j["m"] = m;
            j["k"] = k;
        } else if (kind == "three-region") {
            j["rho"] = rho;
            j["mu"] = mu;
            j["m"] = m;
            j["k"] = k;
        } else if (kind == "buffer") {
            j["a"] = a;
            j["m"] = m;
            j["k"] = k;
        } else if (kind == "dk" || kind == "modified-dk") {
            j["a"] = a;
            j["eta"] = eta;
            j["b"] = b;
            j["I"] = I;
            if (kind == "modified-dk") {
                j["s"] = s;
                j["rho"] = rho;
                if (has_eta1) j["eta1"] = eta1;
            }
        } else {
            throw pwl::Error("unknown model kind: " + kind);
        }
        return j;
    }
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("--model", f.kind, "model kind");
    cmd->add_option("--config", f.config, "JSON model descriptor file");
    cmd->add_option("--m", f.m);
    cmd->add_option("--k", f.k);
    cmd->add_option("--eps", f.eps);
    cmd->add_option("--rho", f.rho);
    cmd->add_option("--mu", f.mu);
    cmd->add_option("--a", f.a);
    cmd->add_option("--I", f.I);
    cmd->add_option("--eta", f.eta);
    cmd->add_option("--b", f.b);
    cmd->add_option("--s", f.s);
    cmd->add_option("--eta1", f.eta1)->each([&f](const std::string&) {
        f.has_eta1 = true;
    });
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw pwl::Error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact simulation of PWL slow-fast systems"};
    app.require_subcommand(1);
    std::string out_dir = ".";
    app.add_option("--out", out_dir, "output directory");

    ModelFlags mf;

    auto* c_sim = app.add_subcommand("simulate", "integrate one orbit, emit trajectory.csv");
    add_model_flags(c_sim, mf);
    double x0 = 0.0, y0 = 0.0, z0 = 0.0, tmax = 10.0, dt = 0.01;
    c_sim->add_option("--x0", x0);
    c_sim->add_option("--y0", y0);
    c_sim->add_option("--z0", z0);
    c_sim->add_option("--tmax", tmax);
    c_sim->add_option("--dt", dt);

    auto* c_way = app.add_subcommand("wayinout", "way-in/way-out curve, emit wayinout.csv");
    add_model_flags(c_way, mf);
    double delta = 1.0, zmin = 0.0, zmax = 0.0, precision = 0.0;
    double plateau_frac = 1e-3;
    int npoints = 50;
    c_way->add_option("--delta", delta);
    c_way->add_option("--zmin", zmin)->required();
    c_way->add_option("--zmax", zmax)->required();
    c_way->add_option("--n", npoints);
    c_way->add_option("--precision", precision);
    c_way->add_option("--plateau-frac", plateau_frac, "plateau flatness threshold");

    auto* c_sweep = app.add_subcommand("delay-sweep", "maximal delay over an epsilon grid");
    add_model_flags(c_sweep, mf);
    std::string eps_list;
    double sweep_delta = 1.0;
    c_sweep->add_option("--eps-list", eps_list, "comma-separated epsilons")->required();
    c_sweep->add_option("--delta", sweep_delta);

    auto* c_conn = app.add_subcommand("connect", "solve connection conditions");
    add_model_flags(c_conn, mf);

    auto* c_cls = app.add_subcommand("classify", "Hopf-like classification (three-region)");
    add_model_flags(c_cls, mf);

    auto* c_prec = app.add_subcommand("precision-table", "plateau vs working precision");
    add_model_flags(c_prec, mf);
    std::string prec_list = "1e-12,1e-9,1e-6";
    double p_delta = 1.0, p_zmin = 0.0, p_zmax = 0.0, p_plateau_frac = 1e-3;
    int p_n = 40;
    c_prec->add_option("--precisions", prec_list);
    c_prec->add_option("--delta", p_delta);
    c_prec->add_option("--zmin", p_zmin)->required();
    c_prec->add_option("--zmax", p_zmax)->required();
    c_prec->add_option("--n", p_n);
    c_prec->add_option("--plateau-frac", p_plateau_frac, "plateau flatness threshold");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_sim->parsed()) {
            const pwl::PwlSystem sys = pwl::system_from_json(mf.descriptor());
            pwl::IntegrateOptions iopt;
            iopt.dt_sample = dt;
            const pwl::Trajectory traj =
                pwl::integrate(sys, {x0, y0, z0}, tmax, iopt);
            std::ofstream csv(out_dir + "/trajectory.csv");
            csv << "t,x,y,z,region\n";
            for (const auto& s : traj.samples)
                csv << fmt17(s.t) << ',' << fmt17(s.u.x) << ',' << fmt17(s.u.y) << ','
                    << fmt17(s.u.z) << ',' << sys.regions[s.region_index].id << "\n";
        } else if (c_way->parsed()) {
            const pwl::PwlSystem sys = pwl::system_from_json(mf.descriptor());
            if (npoints < 1) throw pwl::Error("grid must be non-empty");
            std::vector<double> grid;
            for (int i = 0; i < npoints; ++i)
                grid.push_back(npoints == 1
                                   ? zmin
                                   : zmin + (zmax - zmin) * i / (npoints - 1.0));
            pwl::WayInOutOptions opt;
            opt.delta = delta;
            opt.plateau_frac = plateau_frac;
            const pwl::WayInWayOutCurve curve =
                pwl::way_in_way_out(sys, delta, grid, precision, opt);
            std::ofstream csv(out_dir + "/wayinout.csv");
            csv << "z_in,z_out,t_exit,residual\n";
            for (const auto& p : curve.pairs)
                csv << fmt17(p.z_in) << ',' << fmt17(p.z_out) << ','
                    << fmt17(p.t_exit) << ',' << fmt17(p.residual) << "\n";
            const pwl::AsymptoteFit fit = pwl::asymptote_fit(curve, plateau_frac);
            json rep;
            rep["dropped"] = curve.dropped;
            rep["z_rho_star"] = curve.meta.z_rho_star;
            rep["z_mu_star"] = curve.meta.z_mu_star;
            if (fit.has_line) {
                rep["slope"] = fit.slope;
                rep["intercept"] = fit.intercept;
                rep["slope_theory"] = fit.slope_theory;
                rep["intercept_theory"] = fit.intercept_theory;
            }
            if (fit.has_plateau) rep["plateau"] = fit.plateau;
            write_json(out_dir + "/report.json", rep);
        } else if (c_sweep->parsed()) {
            const json desc = mf.descriptor();
            const auto family = [&desc](double eps) {
                json j = desc;
                j["epsilon"] = eps;
                return pwl::system_from_json(j);
            };
            std::vector<double> grid = parse_list(eps_list);
            pwl::WayInOutOptions opt;
            opt.delta = sweep_delta;
            const pwl::DelaySweep sweep =
                pwl::delay_vs_epsilon(family, grid, sweep_delta, opt);
            std::ofstream csv(out_dir + "/delay_sweep.csv");
            csv << "epsilon,z_d,lower,upper,fit\n";
            for (const auto& r : sweep.rows) {
                const double fitted =
                    sweep.u1 * r.epsilon + sweep.u2 * r.epsilon * std::log(r.epsilon);
                csv << fmt17(r.epsilon) << ',' << fmt17(r.z_d) << ','
                    << (r.has_bounds ? fmt17(r.lower) : "") << ','
                    << (r.has_bounds ? fmt17(r.upper) : "") << ',' << fmt17(fitted)
                    << "\n";
            }
            json rep;
            rep["u1"] = sweep.u1;
            rep["u2"] = sweep.u2;
            rep["rel_residual"] = sweep.rel_residual;
            write_json(out_dir + "/report.json", rep);
        } else if (c_conn->parsed()) {
            const json desc = mf.descriptor();
            const std::string kind = desc.at("kind").get<std::string>();
            json rep;
            if (kind == "three-region") {
                const pwl::ConnectionSolution cs = pwl::solve_three_region(
                    desc.at("rho").get<double>(), desc.at("mu").get<double>(),
                    desc.at("epsilon").get<double>());
                rep = {{"m", cs.m},       {"k", cs.k},   {"l", cs.l},
                       {"n", cs.n},       {"t_hat", cs.t_hat},
                       {"residual", cs.residual}};
            } else if (kind == "buffer") {
                const pwl::ConnectionSolution cs = pwl::solve_buffer_connection(
                    desc.at("a").get<double>(), desc.at("epsilon").get<double>());
                rep = {{"m", cs.m},     {"k", cs.k},   {"tau", cs.t_hat},
                       {"rho", cs.rho}, {"mu", cs.mu}, {"residual", cs.residual}};
            } else if (kind == "dk") {
                pwl::DkModel m;
                m.a = desc.value("a", 0.8);
                m.eta = desc.value("eta", 0.5);
                m.b = desc.value("b", 0.5);
                m.I = desc.at("I").get<double>();
                m.epsilon = desc.at("epsilon").get<double>();
                const pwl::DkConnectionReport r = pwl::dk_connection_test(m);
                rep = {{"e_x", r.equilibrium.x},
                       {"e_y", r.equilibrium.y},
                       {"e_z", r.equilibrium.z},
                       {"connect", r.connect},
                       {"gap", r.gap}};
            } else if (kind == "modified-dk") {
                pwl::ModifiedDkModel m;
                m.a = desc.value("a", 0.8);
                m.eta = desc.value("eta", 0.5);
                m.b = desc.value("b", 0.5);
                m.I = desc.at("I").get<double>();
                m.epsilon = desc.at("epsilon").get<double>();
                m.s = desc.at("s").get<double>();
                m.rho = desc.at("rho").get<double>();
                if (desc.contains("eta1")) m.eta1 = desc.at("eta1").get<double>();
                const pwl::ModifiedDkShootResult r = pwl::modified_dk_shoot(m);
                rep = {{"s", r.model.s},
                       {"rho", r.model.rho},
                       {"mu", r.model.mu()},
                       {"t", r.t},
                       {"residual", r.residual}};
            } else {
                throw pwl::Error("connect does not apply to model kind " + kind);
            }
            write_json(out_dir + "/connection.json", rep);
        } else if (c_cls->parsed()) {
            const json desc = mf.descriptor();
            const pwl::ConnectionSolution cs = pwl::solve_three_region(
                desc.at("rho").get<double>(), desc.at("mu").get<double>(),
                desc.at("epsilon").get<double>());
            const pwl::ThreeRegionParams p = pwl::ThreeRegionParams::from_boundaries(
                cs.rho, cs.mu, cs.m, cs.k, cs.epsilon);
            const pwl::HopfClassification h = pwl::classify_hopf_like(p);
            const pwl::SignRelations sr =
                pwl::sign_relations(cs.rho, cs.mu, cs.epsilon);
            json rep;
            rep["location"] = h.location;
            rep["at"] = h.at;
            rep["criticality"] = h.criticality;
            rep["sign_datum"] = h.sign_datum;
            rep["rationale"] = h.rationale;
            rep["sign_case"] = std::string(1, sr.case_label);
            rep["sign_case_holds"] = sr.holds;
            write_json(out_dir + "/report.json", rep);
        } else if (c_prec->parsed()) {
            const pwl::PwlSystem sys = pwl::system_from_json(mf.descriptor());
            std::vector<double> grid;
            for (int i = 0; i < p_n; ++i)
                grid.push_back(p_n == 1 ? p_zmin
                                        : p_zmin + (p_zmax - p_zmin) * i / (p_n - 1.0));
            pwl::WayInOutOptions opt;
            opt.delta = p_delta;
            opt.plateau_frac = p_plateau_frac;
            const std::vector<pwl::PrecisionRow> rows =
                pwl::precision_diagnosis(sys, parse_list(prec_list), grid, opt);
            json rep = json::array();
            for (const auto& r : rows)
                rep.push_back({{"precision", r.precision},
                               {"theta_min", r.theta_min},
                               {"theta_max", r.theta_max},
                               {"plateau", r.plateau},
                               {"t_exit", r.t_exit}});
            write_json(out_dir + "/report.json", rep);
        }
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
