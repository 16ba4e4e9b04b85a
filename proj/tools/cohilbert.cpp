// Batch driver: determinant scans along a Bromwich line and full
// downwash-to-potential solves, serialized as deterministic CSV/JSON for
// external plotting.  Per-lambda work runs on the shared worker pool
// (COHILBERT_THREADS overrides the size); serialization is single-writer
// and ordered by frequency, so identical configurations produce
// byte-identical files.
//
// Exit codes: 0 success, 2 configuration error, 3 characteristic value on
// the requested line, 4 Bromwich tail not decayed, 5 I/O failure.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <cohilbert/config.hpp>
#include <cohilbert/io.hpp>
#include <cohilbert/pipeline.hpp>

using namespace cohilbert;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::vector<Cplx> line_samples(const RunConfig& cfg) {
    std::vector<Cplx> out;
    const int nl = cfg.eta_samples;
    for (int l = 0; l < nl; ++l) {
        const double eta =
            nl == 1 ? 0.0 : -cfg.eta_max + 2.0 * cfg.eta_max * l / (nl - 1);
        out.emplace_back(cfg.sigma_line, eta);
    }
    return out;
}

std::string scan_csv(const std::vector<ScanSample>& samples) {
    std::string csv = "sigma,eta,re_det,im_det,abs_det,hs_norm,zero_candidate\n";
    for (const ScanSample& s : samples) {
        csv += fmt17(s.lambda.real()) + "," + fmt17(s.lambda.imag()) + "," +
               fmt17(s.determinant.real()) + "," +
               fmt17(s.determinant.imag()) + "," +
               fmt17(std::abs(s.determinant)) + "," + fmt17(s.hs_norm) + "," +
               (s.zero_candidate ? "1" : "0") + "\n";
    }
    return csv;
}

std::vector<ScanSample> run_line_scan(const RunConfig& cfg) {
    const FlowParams p = cfg.flow();
    const CofiniteGrid grid =
        make_cofinite(FiniteGrid::chebyshev(cfg.grid_size));
    if (cfg.eta_samples == 1)
        return characteristic_scan(p, grid, cfg.sigma_line, 0.0, 0.0, 1,
                                   cfg.det_floor);
    return characteristic_scan(p, grid, cfg.sigma_line, -cfg.eta_max,
                               cfg.eta_max, cfg.eta_samples, cfg.det_floor);
}

Json config_echo(const RunConfig& cfg) {
    Json j;
    j["a_inf"] = cfg.a_inf;
    j["mach"] = cfg.mach;
    j["kutta_extent"] = cfg.kutta_extent;
    j["sigma_a"] = cfg.sigma_a;
    j["sigma1"] = cfg.sigma1;
    j["sigma2"] = cfg.sigma2;
    j["downwash_form"] = cfg.downwash_form;
    j["downwash_amplitude"] = cfg.downwash_amplitude;
    j["downwash_frequency"] = cfg.downwash_frequency;
    j["envelope_decay"] = cfg.envelope_decay;
    j["envelope_kappa"] = cfg.envelope_kappa;
    j["grid_size"] = cfg.grid_size;
    j["sigma_line"] = cfg.sigma_line;
    j["eta_max"] = cfg.eta_max;
    j["eta_samples"] = cfg.eta_samples;
    j["det_floor"] = cfg.det_floor;
    j["resolvent_tol"] = cfg.resolvent_tol;
    j["im_tol"] = cfg.im_tol;
    j["tail_tol"] = cfg.tail_tol;
    j["phi_x"] = cfg.phi_x;
    j["phi_z"] = cfg.phi_z;
    j["phi_t"] = cfg.phi_t;
    j["output_dir"] = cfg.output_dir;
    return j;
}

int cmd_scan(const RunConfig& cfg) {
    require_directory(cfg.output_dir);
    const std::vector<ScanSample> samples = run_line_scan(cfg);
    write_file(cfg.output_dir + "/scan.csv", scan_csv(samples));
    int zeros = 0;
    for (const ScanSample& s : samples) zeros += s.zero_candidate ? 1 : 0;
    std::printf("scan: %zu samples on sigma = %s, %d zero candidate(s)\n",
                samples.size(), fmt17(cfg.sigma_line).c_str(), zeros);
    return 0;
}

struct SolveRun {
    std::vector<LambdaSolve> solves;
    SolutionField field;
};

SolveRun run_solve_line(const RunConfig& cfg, double sigma) {
    const FlowParams p = cfg.flow();
    const DownwashSpec w = cfg.downwash();
    const CofiniteGrid grid =
        make_cofinite(FiniteGrid::chebyshev(cfg.grid_size));
    RunConfig line = cfg;
    line.sigma_line = sigma;
    SolveRun run;
    run.solves.reserve(cfg.eta_samples);
    for (const Cplx& lam : line_samples(line))
        run.solves.push_back(solve_lambda(p, w, grid, lam, cfg.det_floor));
    run.field = inverse_laplace_phi(p, run.solves, cfg.phi_x, cfg.phi_z,
                                    cfg.phi_t, cfg.im_tol, cfg.tail_tol);
    return run;
}

int cmd_solve(const RunConfig& cfg, bool force, bool sigma_check) {
    require_directory(cfg.output_dir);

    // hypothesis check: the configured line must be free of zero candidates
    const std::vector<ScanSample> samples = run_line_scan(cfg);
    std::vector<Cplx> zeros;
    for (const ScanSample& s : samples)
        if (s.zero_candidate) zeros.push_back(s.lambda);
    if (!zeros.empty() && !force) {
        std::fprintf(stderr,
                     "solve: %zu zero candidate(s) on the line, e.g. lambda = "
                     "%s + %si (use --force to override)\n",
                     zeros.size(), fmt17(zeros.front().real()).c_str(),
                     fmt17(zeros.front().imag()).c_str());
        return 3;
    }

    const SolveRun run = run_solve_line(cfg, cfg.sigma_line);

    std::string diag =
        "sigma,eta,re_det,im_det,abs_det,hs_norm,kutta_residual,"
        "tangency_residual,norm_p1.2,norm_p1.3,resolvent_residual\n";
    double worst_resolvent = 0.0, worst_kutta = 0.0, worst_tangency = 0.0;
    for (const LambdaSolve& s : run.solves) {
        diag += fmt17(s.lambda.real()) + "," + fmt17(s.lambda.imag()) + "," +
                fmt17(s.determinant.real()) + "," +
                fmt17(s.determinant.imag()) + "," +
                fmt17(std::abs(s.determinant)) + "," + fmt17(s.hs_norm) +
                "," + fmt17(s.kutta_residual) + "," +
                fmt17(s.tangency_residual) + "," +
                fmt17(s.weighted_norms.at(1.2)) + "," +
                fmt17(s.weighted_norms.at(1.3)) + "," +
                fmt17(s.resolvent_residual) + "\n";
        worst_resolvent = std::max(worst_resolvent, s.resolvent_residual);
        worst_kutta = std::max(worst_kutta, s.kutta_residual);
        worst_tangency = std::max(worst_tangency, s.tangency_residual);
    }

    std::string phi_csv = "x,z,t,phi\n";
    const SolutionField& f = run.field;
    for (size_t ix = 0; ix < f.x_grid.size(); ++ix)
        for (size_t iz = 0; iz < f.z_grid.size(); ++iz)
            for (size_t it = 0; it < f.t_grid.size(); ++it)
                phi_csv += fmt17(f.x_grid[ix]) + "," + fmt17(f.z_grid[iz]) +
                           "," + fmt17(f.t_grid[it]) + "," +
                           fmt17(f.at(int(ix), int(iz), int(it))) + "\n";

    Json tensor;
    tensor["axes"]["x"] = f.x_grid;
    tensor["axes"]["z"] = f.z_grid;
    tensor["axes"]["t"] = f.t_grid;
    tensor["layout"] = "values[(ix * len(z) + iz) * len(t) + it]";
    tensor["values"] = f.phi;
    tensor["sigma_used"] = f.sigma_used;
    tensor["eta_truncation"] = f.eta_truncation;

    Json manifest;
    manifest["tool"] = "cohilbert";
    manifest["version"] = kVersion;
    manifest["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                                std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION);
    manifest["config"] = config_echo(cfg);
    Json& tol = manifest["tolerances"];
    tol["det_floor"] = {{"limit", cfg.det_floor},
                        {"zero_candidates", zeros.size()},
                        {"forced", !zeros.empty()},
                        {"pass", zeros.empty()}};
    tol["resolvent_tol"] = {{"limit", cfg.resolvent_tol},
                            {"measured", worst_resolvent},
                            {"pass", worst_resolvent <= cfg.resolvent_tol}};
    tol["im_tol"] = {{"limit", cfg.im_tol},
                     {"measured", f.im_residual},
                     {"pass", f.im_residual <= cfg.im_tol}};
    tol["tail_tol"] = {{"limit", cfg.tail_tol},
                       {"measured", f.tail_ratio},
                       {"pass", f.tail_ratio <= cfg.tail_tol}};
    manifest["diagnostics"] = {{"worst_kutta_residual", worst_kutta},
                               {"worst_tangency_residual", worst_tangency}};

    if (sigma_check) {
        // rerun on a second admissible abscissa; phi must not move
        const double span = cfg.sigma2 - cfg.sigma1;
        double sigma_b = cfg.sigma_line + 0.25 * span;
        if (sigma_b > cfg.sigma2) sigma_b = cfg.sigma_line - 0.25 * span;
        const SolveRun alt = run_solve_line(cfg, sigma_b);
        double worst = 0.0;
        for (size_t i = 0; i < f.phi.size(); ++i)
            worst = std::max(worst,
                             std::fabs(f.phi[i] - alt.field.phi[i]));
        manifest["sigma_check"] = {{"sigma_a", cfg.sigma_line},
                                   {"sigma_b", sigma_b},
                                   {"max_field_discrepancy", worst}};
        std::printf("sigma-check: max |phi(%s) - phi(%s)| = %s\n",
                    fmt17(cfg.sigma_line).c_str(), fmt17(sigma_b).c_str(),
                    fmt17(worst).c_str());
    }

    bool pass = true;
    for (const auto& [key, entry] : tol.items())
        if (entry.contains("pass") && !entry["pass"].get<bool>()) pass = false;
    manifest["result"] = pass ? "PASS" : "FAIL";

    write_file(cfg.output_dir + "/diagnostics.csv", diag);
    write_file(cfg.output_dir + "/phi.csv", phi_csv);
    write_file(cfg.output_dir + "/phi.json", tensor.dump(2) + "\n");
    write_file(cfg.output_dir + "/manifest.json", manifest.dump(2) + "\n");
    std::printf("solve: %d lambda samples, result %s\n", cfg.eta_samples,
                pass ? "PASS" : "FAIL");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cofinite-Hilbert subsonic panel solver"};
    app.require_subcommand(1);
    std::string config_path;
    double sigma_override = 0.0, eta_override = 0.0;
    int grid_override = 0;
    bool have_sigma = false, have_eta = false, force = false,
         sigma_check = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file")
            ->required();
        cmd->add_option("--sigma", sigma_override, "override sigma_line")
            ->each([&](const std::string&) { have_sigma = true; });
        cmd->add_option("--eta-max", eta_override, "override eta_max")
            ->each([&](const std::string&) { have_eta = true; });
        cmd->add_option("--grid", grid_override, "override grid_size");
    };
    CLI::App* scan = app.add_subcommand("scan", "determinant scan on a line");
    add_common(scan);
    CLI::App* solve = app.add_subcommand("solve", "full downwash solve");
    add_common(solve);
    solve->add_flag("--force", force, "solve despite zero candidates");
    solve->add_flag("--sigma-check", sigma_check,
                    "repeat at a second abscissa and compare phi");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (have_sigma) cfg.sigma_line = sigma_override;
        if (have_eta) cfg.eta_max = eta_override;
        if (grid_override > 0) cfg.grid_size = grid_override;
        cfg.validate();
        if (scan->parsed()) return cmd_scan(cfg);
        return cmd_solve(cfg, force, sigma_check);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const CharacteristicValueError& e) {
        std::fprintf(stderr, "characteristic value: %s\n", e.what());
        return 3;
    } catch (const TailDecayError& e) {
        std::fprintf(stderr, "tail decay: %s\n", e.what());
        return 4;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 5;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
