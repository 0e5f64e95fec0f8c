// Command-line front end: meshing, solves, energies, shape gradients, the
// volume-preserving descent flow, ball stability tables, and rough-domain
// diagnostics, all as reproducible file-backed runs. Every command writes a
// run manifest with the resolved configuration, input hashes, and seed.

#include <CLI11.hpp>

#include "insul/insul.hpp"

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace insul;
using nlohmann::ordered_json;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 1;
    int threads = 1;
    bool json = false;
};

int map_exception(const std::exception& e, const char* what) {
    std::cerr << what << ": " << e.what() << "\n";
    if (dynamic_cast<const ParseError*>(&e)) return 2;
    if (dynamic_cast<const MeshQualityFailure*>(&e)) return 3;
    if (dynamic_cast<const NegativeTrace*>(&e)) return 4;
    if (dynamic_cast<const NoConvergence*>(&e) || dynamic_cast<const NonDescent*>(&e)) return 5;
    if (dynamic_cast<const StallDetected*>(&e)) return 6;
    return 1;
}

void freeze_config(RunManifest& man, const CLI::App& cmd) {
    for (const CLI::Option* opt : cmd.get_options()) {
        if (opt->get_name().empty() || opt->get_name() == "--help") continue;
        if (!opt->results().empty())
            man.config[opt->get_name()] = opt->results().front();
        else if (!opt->get_default_str().empty())
            man.config[opt->get_name()] = opt->get_default_str();
    }
}

void write_manifest(RunManifest& man, const std::string& anchor_path) {
    man.write(anchor_path + ".manifest.json");
}

void emit(const GlobalOpts& g, const ordered_json& j, const std::string& path) {
    if (!path.empty()) {
        std::ofstream f(path);
        if (!f) throw Error("cannot write " + path);
        f << j.dump(2) << "\n";
    }
    if (g.json) std::cout << j.dump(2) << "\n";
}

SourceSpec parse_source(const std::string& spec, const Mesh& mesh, RunManifest& man) {
    if (spec.rfind("const:", 0) == 0) return SourceSpec::Constant(std::stod(spec.substr(6)));
    if (spec.rfind("nodal:", 0) == 0) {
        const std::string path = spec.substr(6);
        std::ifstream f(path);
        if (!f) throw ParseError("cannot open nodal source file: " + path);
        std::vector<double> vals;
        double v;
        while (f >> v) vals.push_back(v);
        if (static_cast<int>(vals.size()) != mesh.num_vertices())
            throw ParseError("nodal source has " + std::to_string(vals.size()) + " values, mesh has " +
                             std::to_string(mesh.num_vertices()));
        man.input_hashes[path] = file_hash_hex(path);
        return SourceSpec::Nodal(std::move(vals));
    }
    throw ParseError("source spec must be const:<v> or nodal:<file>, got '" + spec + "'");
}

ordered_json energy_json(const EnergyBreakdown& e, double m, const std::string& mesh_hash) {
    ordered_json j;
    j["dirichlet"] = e.dirichlet;
    j["boundary"] = e.boundary;
    j["load"] = e.load;
    j["total"] = e.total;
    j["m"] = m;
    j["mesh_hash"] = mesh_hash;
    return j;
}

ordered_json solution_json(const std::string& mesh_path, const std::string& mesh_hash, double m,
                           const std::string& fspec, const FemSolution& sol, double boundary_integral) {
    ordered_json j;
    j["mesh"] = {{"path", mesh_path}, {"hash", mesh_hash}};
    j["m"] = m;
    j["f"] = fspec;
    j["nodal"] = sol.nodal;
    j["residual"] = sol.residual;
    j["iterations"] = sol.iterations;
    j["boundary_integral"] = boundary_integral;
    return j;
}

// Star shapes are meshed on demand by diagnose/gradient/flow; grids load
// directly.
GridDomain load_grid_arg(const std::string& path, double hg, RunManifest& man) {
    man.input_hashes[path] = file_hash_hex(path);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".star") {
        return rasterize(read_star_file(path), hg);
    }
    return read_grid_file(path);
}

int cmd_mesh(const GlobalOpts& g, const std::string& shape_path, double h, const std::string& out,
             CLI::App& cmd) {
    RunManifest man;
    man.command = "mesh";
    man.seed = g.seed;
    freeze_config(man, cmd);
    man.input_hashes[shape_path] = file_hash_hex(shape_path);
    Mesh mesh;
    {
        PhaseTimer t(man, "mesh");
        mesh = triangulate(read_star_file(shape_path), h);
    }
    write_mesh_file(out, mesh);
    man.outputs.push_back(out);
    write_manifest(man, out);
    if (g.json) {
        ordered_json j;
        j["vertices"] = mesh.num_vertices();
        j["triangles"] = mesh.triangles.size();
        j["boundary"] = mesh.num_boundary();
        j["min_angle_deg"] = min_triangle_angle_deg(mesh);
        std::cout << j.dump(2) << "\n";
    }
    return 0;
}

int cmd_solve(const GlobalOpts& g, const std::string& mesh_path, double m, const std::string& fspec,
              const std::string& path_kind, double tol, const std::string& out, CLI::App& cmd) {
    RunManifest man;
    man.command = "solve";
    man.seed = g.seed;
    freeze_config(man, cmd);
    man.input_hashes[mesh_path] = file_hash_hex(mesh_path);
    const std::string mesh_hash = man.input_hashes[mesh_path];
    Mesh mesh = read_mesh_file(mesh_path);
    SourceSpec f = parse_source(fspec, mesh, man);

    FemSolution sol;
    {
        PhaseTimer t(man, "solve");
        if (path_kind == "linear") {
            RankOneSystem sys = assemble(mesh, m, f);
            sol = solve_insulation_linear(mesh, sys, tol);
            double tmin = 1e300;
            for (double v : sol.trace.values) tmin = std::min(tmin, v);
            if (tmin < -1e-8)
                throw NegativeTrace("linear path: trace reaches " + std::to_string(tmin) +
                                    "; re-run with --path eps");
        } else if (path_kind == "eps") {
            sol = solve_insulation_eps(mesh, m, f, default_eps_schedule(), tol).sol;
        } else {
            throw ParseError("--path must be linear or eps");
        }
    }
    EnergyBreakdown en = energy(mesh, sol.nodal, m, f);
    double bU = 0.0;
    {
        const std::vector<double> b = assemble_boundary_vector(mesh);
        for (int i = 0; i < mesh.num_vertices(); ++i) bU += b[i] * sol.nodal[i];
    }
    emit(g, solution_json(mesh_path, mesh_hash, m, fspec, sol, bU), out);
    man.outputs.push_back(out);
    const std::string energy_path = out + ".energy.json";
    {
        std::ofstream fe(energy_path);
        fe << energy_json(en, m, mesh_hash).dump(2) << "\n";
    }
    man.outputs.push_back(energy_path);
    write_manifest(man, out);
    return 0;
}

int cmd_energy(const GlobalOpts& g, const std::string& mesh_path, const std::string& solution_path,
               double m, const std::string& fspec, const std::string& out, CLI::App& cmd) {
    RunManifest man;
    man.command = "energy";
    man.seed = g.seed;
    freeze_config(man, cmd);
    man.input_hashes[mesh_path] = file_hash_hex(mesh_path);
    man.input_hashes[solution_path] = file_hash_hex(solution_path);
    Mesh mesh = read_mesh_file(mesh_path);
    SourceSpec f = parse_source(fspec, mesh, man);
    std::ifstream fs_(solution_path);
    if (!fs_) throw ParseError("cannot open solution file: " + solution_path);
    ordered_json sj = ordered_json::parse(fs_, nullptr, true);
    std::vector<double> U = sj.at("nodal").get<std::vector<double>>();
    EnergyBreakdown en;
    {
        PhaseTimer t(man, "energy");
        en = energy(mesh, U, m, f);
    }
    emit(g, energy_json(en, m, man.input_hashes[mesh_path]), out);
    man.outputs.push_back(out);
    write_manifest(man, out);
    return 0;
}

int cmd_gradient(const GlobalOpts& g, const std::string& shape_path, double m, double h, int fd_check,
                 double dt, const std::string& out, CLI::App& cmd) {
    RunManifest man;
    man.command = "gradient";
    man.seed = g.seed;
    freeze_config(man, cmd);
    man.input_hashes[shape_path] = file_hash_hex(shape_path);
    StarBoundary sb = read_star_file(shape_path);
    ordered_json j;
    {
        PhaseTimer t(man, "gradient");
        ShapeEvaluation ev = evaluate_shape(sb, m, h);
        ShapeGradient sg = shape_gradient(ev.mesh, ev.sol, sb, m);
        j["defect"] = sg.defect;
        j["mean"] = sg.mean;
        j["density"] = sg.density.values;
        j["velocity"] = sg.velocity.values;
        j["theta"] = ev.mesh.boundary_theta;
        j["energy"] = energy_json(ev.en, m, "");
        if (fd_check > 0) {
            std::vector<double> zc(ev.mesh.boundary_theta.size());
            for (std::size_t i = 0; i < zc.size(); ++i)
                zc[i] = std::cos(fd_check * ev.mesh.boundary_theta[i]);
            const double pairing = gradient_pairing(sg, zc);
            const FdDerivative fd = fd_shape_derivative(sb, ModalVelocity::cosine(fd_check), m, dt, h);
            j["fd_check"] = {{"k", fd_check},
                             {"pairing", pairing},
                             {"fd", fd.value},
                             {"fd_coarse", fd.coarse},
                             {"fd_richardson", fd.richardson}};
        }
    }
    emit(g, j, out);
    man.outputs.push_back(out);
    write_manifest(man, out);
    return 0;
}

int cmd_flow(const GlobalOpts& g, const std::string& shape_path, double m, double V0, int steps,
             double defect_tol, double h, double tau0, const std::string& out_dir, CLI::App& cmd) {
    if (V0 <= 0.0) throw ParseError("--V0 must be positive");
    RunManifest man;
    man.command = "flow";
    man.seed = g.seed;
    freeze_config(man, cmd);
    man.input_hashes[shape_path] = file_hash_hex(shape_path);
    StarBoundary sb = read_star_file(shape_path);
    fs::create_directories(out_dir);

    FlowConfig cfg;
    cfg.h = h;
    cfg.tau0 = tau0;
    cfg.defect_tol = defect_tol;
    cfg.max_steps = steps;
    FlowResult res;
    {
        PhaseTimer t(man, "flow");
        res = run_flow(sb, m, V0, cfg);
    }

    const std::string csv_path = out_dir + "/trajectory.csv";
    {
        std::ofstream f(csv_path);
        f << "step,tau,J_total,J_dirichlet,J_boundary,J_load,defect,area,perimeter,dist_to_ball\n";
        for (const FlowState& s : res.states) {
            f << s.step << "," << format_g17(s.tau) << "," << format_g17(s.energy.total) << ","
              << format_g17(s.energy.dirichlet) << "," << format_g17(s.energy.boundary) << ","
              << format_g17(s.energy.load) << "," << format_g17(s.defect) << ","
              << format_g17(s.area) << "," << format_g17(s.perimeter) << ","
              << format_g17(s.dist_to_ball) << "\n";
        }
    }
    const std::string shape_out = out_dir + "/final.star";
    write_star_file(shape_out, res.states.back().shape);
    man.outputs.push_back(csv_path);
    man.outputs.push_back(shape_out);
    write_manifest(man, out_dir + "/run");
    if (g.json) {
        ordered_json j;
        j["status"] = res.status == FlowStatus::Converged ? "converged"
                      : res.status == FlowStatus::MaxSteps ? "max_steps"
                                                           : "stalled";
        j["steps"] = res.states.back().step;
        j["final_energy"] = res.states.back().energy.total;
        j["final_defect"] = res.states.back().defect;
        j["dist_to_ball"] = res.states.back().dist_to_ball;
        std::cout << j.dump(2) << "\n";
    }
    return res.status == FlowStatus::Stalled ? 6 : 0;
}

int cmd_stability(const GlobalOpts& g, int n, double R, double m, int modes, int fd_check, double h,
                  const std::string& out, CLI::App& cmd) {
    if (modes < 1 || modes > 64) throw ParseError("--modes must lie in 1..64");
    RunManifest man;
    man.command = "stability";
    man.seed = g.seed;
    freeze_config(man, cmd);
    std::vector<std::pair<int, double>> ms;
    for (int k = 1; k <= modes; ++k) ms.push_back({k, 1.0});
    ModalStability table;
    {
        PhaseTimer t(man, "stability");
        table = second_variation_ball(n, R, m, ms, /*with_quadrature=*/true, h);
    }
    ordered_json j;
    j["n"] = table.n;
    j["R"] = table.R;
    j["m"] = table.m;
    ordered_json marr = ordered_json::array();
    for (const auto& pm : table.per_mode) {
        ordered_json mj;
        mj["k"] = pm.k;
        mj["Q_closed"] = pm.Q_closed;
        mj["Q_quadrature"] = pm.Q_quadrature;
        if (pm.k == fd_check) {
            PhaseTimer t(man, "fd_check");
            mj["Q_fd"] = second_variation_fd(R, m, ModalVelocity::cosine(pm.k), 0.01, h);
        }
        marr.push_back(mj);
    }
    j["modes"] = marr;
    j["all_nonnegative"] = table.all_nonnegative;
    emit(g, j, out);
    man.outputs.push_back(out);
    write_manifest(man, out);
    return 0;
}

int cmd_diagnose(const GlobalOpts& g, const std::string& input, const std::string& check, double M,
                 double s, std::uint64_t samples, double hg, double h, const std::string& out,
                 CLI::App& cmd) {
    RunManifest man;
    man.command = "diagnose";
    man.seed = g.seed;
    freeze_config(man, cmd);
    ordered_json j;
    j["check"] = check;
    j["seed"] = g.seed;
    try {
        PhaseTimer t(man, "diagnose");
        if (check == "m-uniform") {
            GridDomain gd = load_grid_arg(input, hg, man);
            UniformityReport rep = m_uniform_check(gd, M, static_cast<int>(samples), g.seed);
            j["resolution"] = gd.spacing;
            j["M"] = rep.M;
            j["pairs_tested"] = rep.pairs_tested;
            j["pass_fraction"] = rep.pass_fraction;
            j["worst_pair"] = {{"x1", {rep.worst_pair.x1.x, rep.worst_pair.x1.y}},
                               {"x2", {rep.worst_pair.x2.x, rep.worst_pair.x2.y}},
                               {"best_length", rep.worst_pair.best_length},
                               {"clearance_ratio", rep.worst_pair.clearance_ratio},
                               {"passed", rep.worst_pair.passed}};
            j["certificates"] = rep.certificates.size();
        } else if (check == "porosity") {
            GridDomain gd = load_grid_arg(input, hg, man);
            const double diam = gd.occupied_diagonal();
            ScalingFit fit = porosity_exponent(gd, 4.0 * gd.spacing, diam / 4.0);
            j["resolution"] = gd.spacing;
            j["radii"] = fit.radii;
            j["tube_volumes"] = fit.tube_volumes;
            j["delta_fit"] = fit.delta_fit;
            j["C_fit"] = fit.C_fit;
            j["r_squared"] = fit.r_squared;
        } else if (check == "frac-perimeter") {
            GridDomain gd = load_grid_arg(input, hg, man);
            FractionalPerimeterResult fp = fractional_perimeter(gd, s, samples, g.seed, g.threads);
            j["resolution"] = gd.spacing;
            j["s"] = s;
            j["n_samples"] = fp.n_samples;
            j["estimate"] = fp.estimate;
            j["stderr"] = fp.stderr_;
            j["bias_bound"] = fp.bias_bound;
        } else if (check == "poincare") {
            Mesh mesh = triangulate(read_star_file(input), h);
            man.input_hashes[input] = file_hash_hex(input);
            EigenResult neu = neumann_poincare_min_eigenvalue(mesh);
            EigenResult rob = robust_poincare_min_eigenvalue(mesh);
            j["neumann_constant"] = 1.0 / neu.value;
            j["neumann_eigenvalue"] = neu.value;
            j["robust_constant"] = 1.0 / rob.value;
            j["robust_eigenvalue"] = rob.value;
            j["signed_surrogate"] = true;
            j["residuals"] = {neu.residual, rob.residual};
        } else if (check == "stekloff") {
            Mesh mesh = triangulate(read_star_file(input), h);
            man.input_hashes[input] = file_hash_hex(input);
            EigenResult st = stekloff_min(mesh);
            j["stekloff_min"] = st.value;
            j["residual"] = st.residual;
        } else {
            throw ParseError("unknown --check '" + check + "'");
        }
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        std::cerr << "diagnose: " << e.what() << "\n";
        return 7;
    }
    emit(g, j, out);
    if (!out.empty()) man.outputs.push_back(out);
    write_manifest(man, out.empty() ? check : out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D insulation-energy toolkit: meshes, nonlocal Robin solves, shape flow, "
                 "stability tables, rough-domain diagnostics"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--seed", g.seed, "base seed for all randomized work")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads for partitioned work")
        ->capture_default_str();
    app.add_flag("--json", g.json, "print machine-readable output on stdout");
    app.set_config("--config", "", "configuration file (key = value lines, # comments)");

    // mesh
    auto* mesh_cmd = app.add_subcommand("mesh", "triangulate a star shape");
    std::string mesh_shape, mesh_out = "out.mesh";
    double mesh_h = 0.02;
    mesh_cmd->add_option("shape", mesh_shape, "star shape file")->required();
    mesh_cmd->add_option("--h", mesh_h, "target spacing")->capture_default_str();
    mesh_cmd->add_option("--out", mesh_out, "output mesh file")->capture_default_str();

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "solve the insulation problem on a mesh");
    std::string solve_mesh, solve_f = "const:1", solve_path = "linear", solve_out = "solution.json";
    double solve_m = 1.0, solve_tol = 1e-10;
    solve_cmd->add_option("mesh", solve_mesh, "mesh file")->required();
    solve_cmd->add_option("--m", solve_m, "insulation mass")->capture_default_str();
    solve_cmd->add_option("--f", solve_f, "source: const:<v> or nodal:<file>")->capture_default_str();
    solve_cmd->add_option("--path", solve_path, "linear | eps")->capture_default_str();
    solve_cmd->add_option("--tol", solve_tol, "relative residual tolerance")->capture_default_str();
    solve_cmd->add_option("--out", solve_out, "output solution JSON")->capture_default_str();

    // energy
    auto* energy_cmd = app.add_subcommand("energy", "energy breakdown of a stored solution");
    std::string en_mesh, en_sol, en_f = "const:1", en_out = "energy.json";
    double en_m = 1.0;
    energy_cmd->add_option("mesh", en_mesh, "mesh file")->required();
    energy_cmd->add_option("solution", en_sol, "solution JSON")->required();
    energy_cmd->add_option("--m", en_m, "insulation mass")->capture_default_str();
    energy_cmd->add_option("--f", en_f, "source spec")->capture_default_str();
    energy_cmd->add_option("--out", en_out, "output energy JSON")->capture_default_str();

    // gradient
    auto* grad_cmd = app.add_subcommand("gradient", "shape-gradient density and defect");
    std::string gr_shape, gr_out = "gradient.json";
    double gr_m = 1.0, gr_h = 0.02, gr_dt = 1e-3;
    int gr_fd = 0;
    grad_cmd->add_option("shape", gr_shape, "star shape file")->required();
    grad_cmd->add_option("--m", gr_m, "insulation mass")->capture_default_str();
    grad_cmd->add_option("--h", gr_h, "mesh spacing")->capture_default_str();
    grad_cmd->add_option("--fd-check", gr_fd, "verify against a cos(k theta) finite difference");
    grad_cmd->add_option("--dt", gr_dt, "finite-difference step")->capture_default_str();
    grad_cmd->add_option("--out", gr_out, "output JSON")->capture_default_str();

    // flow
    auto* flow_cmd = app.add_subcommand("flow", "volume-preserving shape-gradient descent");
    std::string fl_shape, fl_dir = "flow_out";
    double fl_m = 1.0, fl_V0 = kPi, fl_tol = 2.5e-3, fl_h = 0.015, fl_tau = 0.0;
    int fl_steps = 200;
    flow_cmd->add_option("shape", fl_shape, "star shape file")->required();
    flow_cmd->add_option("--m", fl_m, "insulation mass")->capture_default_str();
    flow_cmd->add_option("--V0", fl_V0, "prescribed area")->capture_default_str();
    flow_cmd->add_option("--steps", fl_steps, "step budget")->capture_default_str();
    flow_cmd->add_option("--defect-tol", fl_tol, "stationarity defect tolerance")->capture_default_str();
    flow_cmd->add_option("--h", fl_h, "mesh spacing per step")->capture_default_str();
    flow_cmd->add_option("--tau0", fl_tau, "trial step (0 = stability default)")->capture_default_str();
    flow_cmd->add_option("--out-dir", fl_dir, "output directory")->capture_default_str();

    // stability
    auto* stab_cmd = app.add_subcommand("stability", "modal second variation at the ball");
    int st_n = 2, st_modes = 16, st_fd = 0;
    double st_R = 1.0, st_m = 1.0, st_h = 0.02;
    std::string st_out = "stability.json";
    stab_cmd->add_option("--n", st_n, "dimension")->capture_default_str();
    stab_cmd->add_option("--R", st_R, "ball radius")->capture_default_str();
    stab_cmd->add_option("--m", st_m, "insulation mass")->capture_default_str();
    stab_cmd->add_option("--modes", st_modes, "mode count (<= 64)")->capture_default_str();
    stab_cmd->add_option("--fd-check", st_fd, "add a finite-difference column for this mode");
    stab_cmd->add_option("--h", st_h, "mesh spacing for the quadrature path")->capture_default_str();
    stab_cmd->add_option("--out", st_out, "output JSON")->capture_default_str();

    // diagnose
    auto* diag_cmd = app.add_subcommand("diagnose", "rough-domain and spectral diagnostics");
    std::string dg_input, dg_check, dg_out;
    double dg_M = 3.0, dg_s = 0.5, dg_hg = 1.0 / 128, dg_h = 0.02;
    std::uint64_t dg_samples = 200;
    diag_cmd->add_option("input", dg_input, "grid file or star shape")->required();
    diag_cmd->add_option("--check", dg_check, "m-uniform | porosity | frac-perimeter | poincare | stekloff")
        ->required();
    diag_cmd->add_option("--M", dg_M, "uniformity constant")->capture_default_str();
    diag_cmd->add_option("--s", dg_s, "fractional exponent in (0,1)")->capture_default_str();
    diag_cmd->add_option("--samples", dg_samples, "pair or Monte Carlo sample count")
        ->capture_default_str();
    diag_cmd->add_option("--hg", dg_hg, "grid spacing for rasterized shapes")->capture_default_str();
    diag_cmd->add_option("--h", dg_h, "mesh spacing for spectral checks")->capture_default_str();
    diag_cmd->add_option("--out", dg_out, "output JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (mesh_cmd->parsed()) return cmd_mesh(g, mesh_shape, mesh_h, mesh_out, *mesh_cmd);
        if (solve_cmd->parsed())
            return cmd_solve(g, solve_mesh, solve_m, solve_f, solve_path, solve_tol, solve_out,
                             *solve_cmd);
        if (energy_cmd->parsed()) return cmd_energy(g, en_mesh, en_sol, en_m, en_f, en_out, *energy_cmd);
        if (grad_cmd->parsed())
            return cmd_gradient(g, gr_shape, gr_m, gr_h, gr_fd, gr_dt, gr_out, *grad_cmd);
        if (flow_cmd->parsed())
            return cmd_flow(g, fl_shape, fl_m, fl_V0, fl_steps, fl_tol, fl_h, fl_tau, fl_dir, *flow_cmd);
        if (stab_cmd->parsed())
            return cmd_stability(g, st_n, st_R, st_m, st_modes, st_fd, st_h, st_out, *stab_cmd);
        if (diag_cmd->parsed())
            return cmd_diagnose(g, dg_input, dg_check, dg_M, dg_s, dg_samples, dg_hg, dg_h, dg_out,
                                *diag_cmd);
    } catch (const std::exception& e) {
        return map_exception(e, app.get_subcommands().empty() ? "insul"
                                                              : app.get_subcommands()[0]->get_name().c_str());
    }
    return 2;
}
