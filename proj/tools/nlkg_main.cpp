#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "nlkg/experiments.hpp"
#include "nlkg/serialize.hpp"

using nlkg::State;

namespace {

using json = nlohmann::ordered_json;

void print_warnings(const std::vector<std::string>& warnings) {
    if (warnings.empty()) return;
    std::cout << "=== smallness-condition warnings ===\n";
    for (const auto& w : warnings) std::cout << "  ! " << w << "\n";
    std::cout << "====================================\n";
}

nlkg::Config load_config(const std::string& path) {
    if (path.empty()) return nlkg::Config{};
    return nlkg::parse_config_file(path);
}

void write_json(const json& j, const std::string& out_dir, const std::string& name) {
    std::filesystem::create_directories(out_dir);
    std::ofstream f(out_dir + "/" + name);
    f << j.dump(2) << "\n";
    std::cout << j.dump(2) << "\n";
}

json graph_to_json(const nlkg::GraphTable& table, const std::vector<std::string>& refs) {
    json j;
    j["ell"] = table.ell;
    j["delta"] = table.delta;
    j["tag"] = table.tag;
    j["samples"] = json::array();
    for (std::size_t i = 0; i < table.psi.size(); ++i) {
        json s;
        s["psi_ref"] = refs[i];
        s["value"] = std::vector<double>(table.value[i].data(),
                                         table.value[i].data() + table.value[i].size());
        j["samples"].push_back(s);
    }
    return j;
}

std::pair<nlkg::GraphTable, std::vector<std::string>> graph_from_json(const nlkg::Grid& g,
                                                                      const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nlkg::ConfigError("cannot open graph file " + path);
    json j = json::parse(in);
    nlkg::GraphTable table;
    table.ell = j.at("ell").get<double>();
    table.delta = j.at("delta").get<double>();
    if (j.contains("tag")) table.tag = j.at("tag").get<std::string>();
    std::vector<std::string> refs;
    for (const auto& s : j.at("samples")) {
        const std::string ref = s.at("psi_ref").get<std::string>();
        refs.push_back(ref);
        table.psi.push_back(nlkg::read_state(g, ref));
        const auto vals = s.at("value").get<std::vector<double>>();
        Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
        for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
        table.value.push_back(v);
    }
    return {table, refs};
}

int run(int argc, char** argv) {
    CLI::App app{"numerical laboratory for invariant manifolds around Klein-Gordon solitons"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    app.add_option("--config", config_path, "key=value configuration file")->expected(1);
    app.add_option("--out", out_dir, "output directory");

    auto* cmd_solitons = app.add_subcommand("solitons", "ground state report");
    auto* cmd_spectrum = app.add_subcommand("spectrum", "linearized spectrum report");

    auto* cmd_evolve = app.add_subcommand("evolve", "integrate a trajectory");
    std::string initial_path;
    double evolve_t = 1.0, evolve_dt = 0.0;
    bool localized = false, full = false;
    cmd_evolve->add_option("--initial", initial_path, "state file (binary or csv)")->required();
    cmd_evolve->add_option("--t", evolve_t, "final time");
    cmd_evolve->add_option("--dt", evolve_dt, "time step (default from config)");
    cmd_evolve->add_flag("--localized", localized, "localized modulated flow (input is v)");
    cmd_evolve->add_flag("--full", full, "full flow (input is u)");

    auto* cmd_mobile = app.add_subcommand("mobile-dist", "mobile quasi-distance of two states");
    std::vector<std::string> mobile_files;
    cmd_mobile->add_option("files", mobile_files, "two state files")->expected(2);

    auto* cmd_manifold = app.add_subcommand("manifold", "graph evaluations and experiments");
    cmd_manifold->require_subcommand(1);
    auto* man_eval = cmd_manifold->add_subcommand("eval", "center-unstable graph value at psi");
    std::string psi_file;
    man_eval->add_option("--psi-file", psi_file)->required();
    auto* man_transform = cmd_manifold->add_subcommand("transform", "one graph-transform step");
    std::string graph_file;
    double transform_T = 1.0;
    man_transform->add_option("--graph-file", graph_file)->required();
    man_transform->add_option("--T", transform_T);
    auto* man_unstable = cmd_manifold->add_subcommand("unstable", "unstable graph point");
    double lambda_plus = 0.002;
    man_unstable->add_option("--lambda", lambda_plus);
    auto* man_trap = cmd_manifold->add_subcommand("trap", "trapping/ejection experiment");
    double trap_eta = 1e-4, trap_tmax = 50.0;
    int trap_sign = 1;
    bool trap_modulated = false;
    man_trap->add_option("--eta", trap_eta);
    man_trap->add_option("--sign", trap_sign);
    man_trap->add_option("--tmax", trap_tmax);
    man_trap->add_flag("--modulated", trap_modulated, "integrate in modulated variables");

    auto* cmd_suite = app.add_subcommand("suite", "run the configured experiment suite");

    CLI11_PARSE(app, argc, argv);

    nlkg::Config cfg = load_config(config_path);

    if (cmd_solitons->parsed()) {
        const nlkg::SolitonFamily fam = nlkg::ground_state(cfg.nonlin, cfg.grid);
        std::filesystem::create_directories(out_dir);
        nlkg::write_field_csv(fam.Q, out_dir + "/Q_profile.csv");
        json j;
        j["residual_inf"] = fam.residual_inf();
        j["HQ"] = fam.HQ;
        j["energy"] = fam.static_energy;
        j["Q_at_origin"] = fam.Q[fam.Q.grid.N / 2];
        j["profile_csv"] = out_dir + "/Q_profile.csv";
        write_json(j, out_dir, "solitons.json");
        return 0;
    }

    nlkg::Lab lab = nlkg::build_lab(cfg);
    print_warnings(lab.warnings);

    if (cmd_spectrum->parsed()) {
        json j;
        j["k_list"] = lab.frame.klist();
        j["kernel_eigenvalue"] = lab.frame.kernel_eigenvalue();
        j["kernel_angle"] = lab.frame.kernel_angle();
        j["omega_pairings"] = json::object();
        j["omega_pairings"]["g_plus_g_minus"] = nlkg::omega(lab.frame.g_plus(0), lab.frame.g_minus(0));
        j["omega_pairings"]["g_plus_JgradQ"] = nlkg::omega(lab.frame.g_plus(0), lab.frame.J_grad_Q());
        nlkg::SplitMix64 rng(cfg.seed);
        double cmin = 1e300, cmax = 0.0;
        for (int rep = 0; rep < 64; ++rep) {
            const State v = nlkg::random_localized_state(cfg.grid, rng, 1.0);
            const double r = lab.frame.energy_norm(v) / nlkg::norm_h(v);
            cmin = std::min(cmin, r);
            cmax = std::max(cmax, r);
        }
        j["equivalence_ratio_range"] = {cmin, cmax};
        write_json(j, out_dir, "spectrum.json");
        return 0;
    }

    if (cmd_evolve->parsed()) {
        if (localized == full) throw nlkg::ConfigError("evolve: pass exactly one of --localized/--full");
        const double dt = evolve_dt > 0 ? evolve_dt : cfg.flow.dt;
        State input = nlkg::read_state(cfg.grid, initial_path);
        std::filesystem::create_directories(out_dir);
        std::ofstream csv(out_dir + "/trajectory.csv");
        csv << "t,v_h,lambda_plus,lambda_minus,mu,nu,gamma_E,E,P,c\n";
        const auto& fam = lab.family();
        auto report = [&](double t, const State& v, double c) {
            nlkg::Coords co = lab.frame.decompose(v);
            const State u = nlkg::translate(fam.vec_Q() + v, c);
            char line[512];
            std::snprintf(line, sizeof line,
                          "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t,
                          nlkg::norm_h(v), co.lambda_plus(0), co.lambda_minus(0), co.mu, co.nu,
                          std::sqrt(std::max(0.0, lab.frame.quad_L(co.gamma))),
                          nlkg::energy(u, cfg.nonlin), nlkg::momentum(u), c);
            csv << line;
        };
        const double sample = std::max(dt, evolve_t / 200.0);
        if (localized) {
            nlkg::FlowParams p = cfg.flow;
            p.dt = dt;
            nlkg::ModFlow flow(input, 0.0, p, lab.frame);
            report(0.0, flow.v(), flow.c());
            double t = 0.0, next = sample;
            const double dir = evolve_t >= 0 ? 1.0 : -1.0;
            while (std::abs(t) < std::abs(evolve_t) - 1e-12) {
                flow.step(dir * std::min(dt, std::abs(evolve_t) - std::abs(t)));
                t = flow.time();
                if (std::abs(t) >= next - 1e-12) {
                    next += sample;
                    report(t, flow.v(), flow.c());
                }
            }
            report(t, flow.v(), flow.c());
        } else {
            nlkg::FullFlow flow(input, cfg.nonlin);
            double c = 0.0, t = 0.0, next = sample;
            auto v_of = [&](const State& u) {
                State v = nlkg::translate(u, -c);
                for (int i = 0; i < cfg.grid.N; ++i) v.first[i] -= fam.Q[i];
                return v;
            };
            report(0.0, v_of(input), c);
            while (t < evolve_t - 1e-12) {
                const double step = std::min(dt, evolve_t - t);
                const double a1 = nlkg::A_of_v(lab.frame, v_of(flow.state()));
                flow.step(step, cfg.flow.method);
                t += step;
                c += step * a1;
                if (t >= next - 1e-12) {
                    next += sample;
                    report(t, v_of(flow.state()), c);
                }
            }
            report(t, v_of(flow.state()), c);
        }
        std::cout << "wrote " << out_dir << "/trajectory.csv\n";
        return 0;
    }

    if (cmd_mobile->parsed()) {
        const State a = nlkg::read_state(cfg.grid, mobile_files[0]);
        const State b = nlkg::read_state(cfg.grid, mobile_files[1]);
        const nlkg::MobileResult r = nlkg::mobile_dist(cfg.mobile, lab.frame, a, b);
        json j;
        j["value"] = r.value;
        j["q"] = r.q;
        j["j"] = r.j;
        j["value_min_norm_variant"] = r.value_min_norm_variant;
        j["tilde_m"] = nlkg::tilde_m(cfg.mobile, lab.frame, a, b);
        write_json(j, out_dir, "mobile_dist.json");
        return 0;
    }

    if (man_eval->parsed()) {
        const State psi = nlkg::read_state(cfg.grid, psi_file);
        const Eigen::VectorXd a = nlkg::eval_Gstar(psi, cfg.flow, lab.frame);
        json j;
        j["value"] = std::vector<double>(a.data(), a.data() + a.size());
        write_json(j, out_dir, "manifold_eval.json");
        return 0;
    }
    if (man_transform->parsed()) {
        auto [table, refs] = graph_from_json(cfg.grid, graph_file);
        const nlkg::GraphFn G = nlkg::interpolate_graph(table, lab.frame, cfg.mobile);
        table.value = nlkg::graph_transform_step(G, table.psi, transform_T, cfg.flow, lab.frame);
        write_json(graph_to_json(table, refs), out_dir, "graph_transformed.json");
        return 0;
    }
    if (man_unstable->parsed()) {
        Eigen::VectorXd lam(lab.frame.K());
        lam.setZero();
        lam(0) = lambda_plus;
        const State v0 = nlkg::eval_unstable_graph(lam, cfg.flow, lab.frame);
        std::filesystem::create_directories(out_dir);
        nlkg::write_state_binary(v0, out_dir + "/unstable_point.bin");
        json j;
        j["lambda_plus"] = lambda_plus;
        j["h_norm"] = nlkg::norm_h(v0);
        j["state_file"] = out_dir + "/unstable_point.bin";
        write_json(j, out_dir, "unstable.json");
        return 0;
    }
    if (man_trap->parsed()) {
        nlkg::TrapOptions opt;
        opt.Tmax = trap_tmax;
        opt.use_modulated = trap_modulated;
        const nlkg::ExitRecord r =
            nlkg::trapping_experiment(State(cfg.grid), trap_eta, trap_sign, cfg.flow, lab.frame, opt);
        json j;
        j["eta"] = r.eta;
        j["sign"] = r.sign;
        j["trapped"] = r.trapped;
        j["t_exit"] = r.t_exit;
        j["sup_v"] = r.sup_v;
        write_json(j, out_dir, "trap.json");
        return 0;
    }

    if (cmd_suite->parsed()) {
        nlkg::ExperimentRecord rec = nlkg::run_suite(lab);
        nlkg::write_record(rec, out_dir);
        nlkg::emit_plotdata(rec, out_dir);
        std::cout << rec.to_json();
        std::cout << "wrote " << out_dir << "/record.json and " << rec.series.size()
                  << " plot series\n";
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const nlkg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nlkg::NumericalError& e) {
        std::cerr << "numerical invariant failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
