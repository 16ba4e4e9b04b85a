// Acceptance runner: one self-contained check per shipped guarantee,
// printing exactly one "criterion N: PASS/FAIL" line each and exiting with
// the number of failures.  The checks mirror the unit suite but run at the
// advertised production scales (grid 256, 201 frequency samples for the
// end-to-end solve).
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include <cohilbert/config.hpp>
#include <cohilbert/pipeline.hpp>

#include "oracles.hpp"

using namespace cohilbert;
namespace fs = std::filesystem;

static const FlowParams kP = FlowParams::make(4.0, 0.5, 2.0, 0.25, 0.5, 1.5);

namespace {

struct Reporter {
    int failures = 0;
    void run(int number, const std::function<bool()>& check) {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = check();
        } catch (const std::exception& e) {
            std::fprintf(stderr, "criterion %d raised: %s\n", number,
                         e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        std::printf("criterion %d: %s (%.1f s)\n", number,
                    ok ? "PASS" : "FAIL", secs);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

bool check_bessel_oracle() {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> ure(std::log(1e-3),
                                               std::log(100.0));
    std::uniform_real_distribution<double> uim(-50.0, 50.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Cplx z(std::exp(ure(rng)), uim(rng));
        const Cplx r0 = oracles::k0_integral(z, 0);
        const Cplx r1 = oracles::k0_integral(z, 1);
        worst = std::max(worst, std::abs(k0(z) - r0) / std::abs(r0));
        worst = std::max(worst, std::abs(k0_prime(z) - r1) / std::abs(r1));
    }
    return worst < 1e-10;
}

bool check_transform_calculus() {
    const FiniteGrid g = FiniteGrid::chebyshev(128);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    // conjugation round trip
    FiniteFn r{g, {}};
    for (int i = 0; i < g.size(); ++i)
        r.values.push_back(Cplx(uc(rng), uc(rng)));
    const FiniteFn back = theta_star(theta(r));
    for (int i = 0; i < g.size(); ++i)
        if (std::abs(back.values[i] - r.values[i]) > 1e-13) return false;
    // weighted-norm isometry
    const FiniteGrid g256 = FiniteGrid::chebyshev(256);
    const FiniteFn fi =
        sample(g256, [](double t) { return std::sqrt(1 - t * t); });
    const CofiniteFn hi = theta(fi);
    for (double pe : {1.32, 2.0}) {
        double ln = 0.0;
        for (int i = 0; i < g256.size(); ++i)
            ln += g256.dy_weight(i) * std::pow(std::abs(fi.values[i]), pe);
        if (std::fabs(weighted_lp_norm(hi, pe) - std::pow(ln, 1.0 / pe)) >
            1e-9)
            return false;
    }
    // diagram commutativity on 50 random smooth data
    for (int k = 0; k < 50; ++k) {
        const double a = uc(rng), b = uc(rng);
        const FiniteFn f = sample(
            g, [=](double t) { return Cplx(a * std::sin(2 * t) + b * t * t); });
        const CofiniteFn h = theta(f);
        for (double x : {1.5, -2.2, 3.7, -1.05, 12.0})
            if (std::abs(cofinite_hilbert(h, x) +
                         finite_hilbert(f, 1.0 / x) / x) > 1e-8)
                return false;
    }
    // finite inversion round trip at 128 nodes
    const FiniteFn gf = sample(g, [](double y) { return std::cos(M_PI * y); });
    FiniteFn inv{g, {}};
    for (double t : g.nodes) inv.values.push_back(finite_hilbert_inverse(gf, t));
    for (int i = 0; i < g.size(); i += 7)
        if (std::abs(finite_hilbert(inv, g.nodes[i]) - gf.values[i]) > 1e-6)
            return false;
    // cofinite inversion round trip
    const FiniteFn f0 = sample(
        g256, [](double t) { return Cplx(std::cos(M_PI * t) * (1 - t * t)); });
    const CofiniteFn fc = theta(f0);
    CofiniteFn pinv{fc.grid, {}};
    for (double x : fc.grid.nodes)
        pinv.values.push_back(cofinite_hilbert_inverse(fc, x));
    for (int i = 0; i < fc.grid.size(); i += 5)
        if (std::abs(cofinite_hilbert(pinv, fc.grid.nodes[i]) -
                     fc.values[i]) > 1e-6)
            return false;
    // annihilated direction
    const CofiniteFn hom =
        sample(fc.grid, [](double x) { return homogeneous_solution(x); });
    for (int i = 1; i <= 32; ++i) {
        const double x = 1.0 + 0.15 * i;
        if (std::abs(cofinite_hilbert(hom, x)) > 1e-6) return false;
        if (std::abs(cofinite_hilbert(hom, -x)) > 1e-6) return false;
    }
    return true;
}

bool check_fourier_identity() {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> ux(-2.0, 2.0), uz(0.2, 2.0),
        us(0.5, 2.5), ue(-3.0, 3.0);
    for (int i = 0; i < 10; ++i) {
        const double x = ux(rng), z = uz(rng);
        const Cplx lam(us(rng), ue(rng));
        const double cut = std::max(200.0, 50.0 / z);
        const Cplx rhs = oracles::cgk(
            [&](double om) {
                const Cplx q = sqrt_D(kP, om, lam);
                return std::exp(Cplx(0.0, x * om)) * std::exp(-z * q) /
                       (2.0 * q);
            },
            -cut, cut, 12, 1e-12);
        const Cplx lhs = -s_kernel(kP, x, z, lam);
        if (std::abs(lhs - rhs) / std::abs(lhs) > 1e-6) return false;
    }
    return true;
}

bool check_pde_residuals() {
    // Laplace-domain source kernel
    const Cplx lam(1.2, 0.7);
    const double a2 = kP.a_inf * kP.a_inf;
    {
        const double x = 0.3, z = 0.7;
        auto resid = [&](double h) {
            auto S = [&](double xx, double zz) {
                return s_kernel(kP, xx, zz, lam);
            };
            const Cplx sxx =
                (S(x + h, z) - 2.0 * S(x, z) + S(x - h, z)) / (h * h);
            const Cplx szz =
                (S(x, z + h) - 2.0 * S(x, z) + S(x, z - h)) / (h * h);
            const Cplx sx = (S(x + h, z) - S(x - h, z)) / (2.0 * h);
            return std::abs(a2 * (1.0 - kP.mach * kP.mach) * sxx + a2 * szz -
                            lam * lam * S(x, z) -
                            2.0 * kP.mach * lam * kP.a_inf * sx);
        };
        if (std::log2(resid(1e-2) / resid(5e-3)) < 1.9) return false;
    }
    // assembled Laplace-domain potential
    const DownwashSpec w = make_harmonic_plunge(kP, 1.0, 1.0);
    const LambdaSolve s =
        solve_lambda(kP, w, make_cofinite(FiniteGrid::chebyshev(128)), lam);
    for (auto [x, z] : std::vector<std::pair<double, double>>{
             {0.3, 0.7}, {2.5, 1.2}, {-1.0, 0.4}}) {
        auto resid = [&](double h) {
            auto S = [&](double xx, double zz) {
                return xi_eval(kP, s, xx, zz);
            };
            const Cplx sxx =
                (S(x + h, z) - 2.0 * S(x, z) + S(x - h, z)) / (h * h);
            const Cplx szz =
                (S(x, z + h) - 2.0 * S(x, z) + S(x, z - h)) / (h * h);
            const Cplx sx = (S(x + h, z) - S(x - h, z)) / (2.0 * h);
            return std::abs(a2 * (1.0 - kP.mach * kP.mach) * sxx + a2 * szz -
                            lam * lam * S(x, z) -
                            2.0 * kP.mach * lam * kP.a_inf * sx);
        };
        if (std::log2(resid(1e-2) / resid(5e-3)) < 1.9) return false;
    }
    // time-domain potential at 3 probe points
    const CofiniteGrid grid = make_cofinite(FiniteGrid::chebyshev(64));
    const int nl = 81;
    const double eta_max = 8.0;
    std::vector<LambdaSolve> solves;
    solves.reserve(nl);
    for (int l = 0; l < nl; ++l) {
        const double eta = -eta_max + 2.0 * eta_max * l / (nl - 1);
        solves.push_back(solve_lambda(kP, w, grid, Cplx(1.0, eta)));
    }
    for (auto [x0, z0, t0] : std::vector<std::array<double, 3>>{
             {0.8, 0.6, 0.9}, {0.3, 0.5, 0.7}, {1.6, 1.1, 1.3}}) {
        auto pde = [&](double step) {
            const std::vector<double> xs = {x0 - step, x0, x0 + step};
            const std::vector<double> zs = {z0 - step, z0, z0 + step};
            const std::vector<double> ts = {t0 - step, t0, t0 + step};
            const SolutionField f = inverse_laplace_phi(kP, solves, xs, zs, ts);
            auto v = [&](int ix, int iz, int it) { return f.at(ix, iz, it); };
            const double h2 = step * step;
            const double pxx = (v(2, 1, 1) - 2 * v(1, 1, 1) + v(0, 1, 1)) / h2;
            const double pzz = (v(1, 2, 1) - 2 * v(1, 1, 1) + v(1, 0, 1)) / h2;
            const double ptt = (v(1, 1, 2) - 2 * v(1, 1, 1) + v(1, 1, 0)) / h2;
            const double pxt = (v(2, 1, 2) - v(2, 1, 0) - v(0, 1, 2) +
                                v(0, 1, 0)) /
                               (4 * h2);
            return std::fabs(a2 * (1.0 - kP.mach * kP.mach) * pxx + a2 * pzz -
                             ptt - 2.0 * kP.mach * kP.a_inf * pxt);
        };
        if (std::log2(pde(2e-2) / pde(1e-2)) < 1.9) return false;
    }
    return true;
}

bool check_fredholm_engine() {
    // constant kernel on the unit square: det2 = 2/e
    const int n = 400;
    Eigen::MatrixXcd K(n, n);
    std::vector<double> tw(n, 1.0 / (n - 1));
    tw[0] = tw[n - 1] = 0.5 / (n - 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K(i, j) = tw[j];
    if (std::abs(determinant_matrix_core(K) - 2.0 / std::exp(1.0)) > 1e-6)
        return false;
    // random small kernel: series within bound, resolvent identities, Neumann
    std::mt19937 rng(23);
    std::normal_distribution<double> gd(0.0, 1.0);
    const int m = 40;
    Eigen::MatrixXcd T(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) T(i, j) = Cplx(gd(rng), gd(rng));
    T *= 0.25 / T.norm();
    const double hs = T.norm();
    const DeterminantSeries s = determinant_series_core(T, hs, 8);
    if (std::abs(s.value - determinant_matrix_core(T)) >
        s.truncation_bound + 1e-12)
        return false;
    KernelMatrix km;
    km.entries = T;
    km.lambda = Cplx(1.0, 0.0);
    km.hs_norm = hs;
    km.grid = make_cofinite(FiniteGrid::chebyshev(m));
    const FredholmSolve fsv = resolvent(km);
    if (fsv.residual_left > 1e-8 || fsv.residual_right > 1e-8) return false;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m, m), P = T;
    for (int k = 1; k <= 30; ++k) {
        H += (k % 2 ? 1.0 : -1.0) * P;
        P = P * T;
    }
    return (H - fsv.resolvent).cwiseAbs().maxCoeff() < 1e-12;
}

bool check_end_to_end() {
    const DownwashSpec w = make_harmonic_plunge(kP, 1.0, 1.0);
    const CofiniteGrid grid = make_cofinite(FiniteGrid::chebyshev(256));
    const int nl = 201;
    // the envelope has already decayed to ~1e-7 of its peak at |eta| = 4, so
    // this window keeps the truncation tail below the 1e-6 ratio while the
    // grid-256 discretization still resolves the oscillation
    const double eta_max = 4.0;
    const double sigma_a = 0.75, sigma_b = 1.25;
    // the configured line must sit in a scanned zero-free region
    const std::vector<ScanSample> scan =
        characteristic_scan(kP, grid, sigma_a, -eta_max, eta_max, nl);
    for (const ScanSample& sm : scan)
        if (sm.zero_candidate) return false;
    const std::vector<double> xg = {0.3, 1.6}, zg = {0.5, 1.1},
                              tg = {0.2, 0.7, 1.3};
    double worst_kutta = 0.0, worst_tangency = 0.0;
    auto run = [&](double sigma) {
        std::vector<LambdaSolve> solves;
        solves.reserve(nl);
        for (int l = 0; l < nl; ++l) {
            const double eta = -eta_max + 2.0 * eta_max * l / (nl - 1);
            solves.push_back(solve_lambda(kP, w, grid, Cplx(sigma, eta)));
            worst_kutta = std::max(worst_kutta, solves.back().kutta_residual);
            worst_tangency =
                std::max(worst_tangency, solves.back().tangency_residual);
        }
        return inverse_laplace_phi(kP, solves, xg, zg, tg);
    };
    const SolutionField fa = run(sigma_a);
    const SolutionField fb = run(sigma_b);
    if (worst_kutta > 1e-3) return false;
    if (worst_tangency > 5e-3) return false;
    double diff = 0.0, scale = 0.0;
    for (size_t i = 0; i < fa.phi.size(); ++i) {
        diff = std::max(diff, std::fabs(fa.phi[i] - fb.phi[i]));
        scale = std::max(scale, std::fabs(fa.phi[i]));
    }
    if (!(scale > 0.0) || diff / scale > 1e-3) return false;
    // weighted norms finite and decreasing in |eta|
    const CofiniteGrid g64 = make_cofinite(FiniteGrid::chebyshev(64));
    double prev = 1e300;
    for (double eta : {1.0, 2.0, 4.0, 8.0}) {
        const LambdaSolve s = solve_lambda(kP, w, g64, Cplx(1.0, eta));
        const double norm = s.weighted_norms.at(1.3);
        if (!std::isfinite(norm) || !(norm < prev)) return false;
        prev = norm;
    }
    return true;
}

bool check_bound_shapes() {
    // determinant bound on every sample of a short scan
    const CofiniteGrid grid = make_cofinite(FiniteGrid::chebyshev(64));
    const std::vector<ScanSample> scan =
        characteristic_scan(kP, grid, 1.0, -4.0, 4.0, 9);
    for (const ScanSample& s : scan)
        if (std::abs(s.determinant) >
            std::exp(0.5 * s.hs_norm * s.hs_norm) * 1.01)
            return false;
    // first-minor bound shape at 10 random entries:
    //   |D * H(x,y)| <= e^{||T||^2/2} (|T(x,y)| + sqrt(e) alpha(x) beta(y))
    const KernelMatrix K = assemble_n_matrix(kP, grid, Cplx(1.0, 0.5));
    const FredholmSolve fsv = resolvent(K);
    const int n = grid.size();
    Eigen::MatrixXcd T(n, n);  // pointwise kernel values
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            T(i, j) = K.entries(i, j) / grid.weights[j];
    Eigen::VectorXd alpha(n), beta(n);
    for (int i = 0; i < n; ++i) {
        double a = 0.0, b = 0.0;
        for (int j = 0; j < n; ++j) {
            a += std::norm(T(i, j)) * grid.weights[j];
            b += std::norm(T(j, i)) * grid.weights[j];
        }
        alpha[i] = std::sqrt(a);
        beta[i] = std::sqrt(b);
    }
    const double env = std::exp(0.5 * K.hs_norm * K.hs_norm);
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> ui(0, n - 1);
    for (int k = 0; k < 10; ++k) {
        const int i = ui(rng), j = ui(rng);
        const Cplx minor =
            fsv.determinant * fsv.resolvent(i, j) / grid.weights[j];
        const double rhs =
            env * (std::abs(T(i, j)) +
                   std::sqrt(std::exp(1.0)) * alpha[i] * beta[j]);
        if (std::abs(minor) > rhs * 1.05) return false;
    }
    // Hilbert-Schmidt growth follows the |lambda log lambda| shape
    double prev = 0.0;
    for (double lr : {0.1, 0.2, 0.4}) {
        const KernelMatrix Ks = assemble_n_matrix(kP, grid, Cplx(lr, 0.0));
        if (!(Ks.hs_norm > prev)) return false;
        if (Ks.hs_norm >
            10.0 * std::abs(Cplx(lr, 0.0) * std::log(Cplx(lr, 0.0))))
            return false;
        prev = Ks.hs_norm;
    }
    return true;
}

int run_cli(const std::string& cli, const std::string& args,
            const fs::path& log) {
    const std::string cmd = cli + " " + args + " > " + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool check_cli_contract() {
    const char* cli = std::getenv("COHILBERT_CLI");
    if (!cli) {
        std::fprintf(stderr, "COHILBERT_CLI not set\n");
        return false;
    }
    const fs::path tmp =
        fs::temp_directory_path() /
        ("cohilbert_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(tmp);
    const fs::path out1 = tmp / "a", out2 = tmp / "b";
    fs::create_directories(out1);
    fs::create_directories(out2);
    auto config = [&](const fs::path& out, const std::string& extra) {
        return "grid_size = 64\nsigma_line = 0.75\neta_max = 6\n"
               "eta_samples = 5\nphi_x = 0.3\nphi_z = 0.5\nphi_t = 0.5\n"
               "output_dir = " +
               out.string() + "\n" + extra;
    };
    auto write = [&](const fs::path& p, const std::string& s) {
        std::ofstream f(p, std::ios::binary);
        f << s;
    };
    bool ok = true;
    write(tmp / "run1.cfg", config(out1, ""));
    write(tmp / "run2.cfg", config(out2, ""));
    write(tmp / "bad.cfg", "not_a_key = 1\n");
    write(tmp / "zeros.cfg", config(out1, "det_floor = 10\n"));
    ok &= run_cli(cli, "solve --config " + (tmp / "run1.cfg").string(),
                  tmp / "log1") == 0;
    ok &= run_cli(cli, "solve --config " + (tmp / "run2.cfg").string(),
                  tmp / "log2") == 0;
    for (const char* name : {"diagnostics.csv", "phi.csv", "phi.json"})
        ok &= !slurp(out1 / name).empty() &&
              slurp(out1 / name) == slurp(out2 / name);
    ok &= run_cli(cli, "scan --config " + (tmp / "bad.cfg").string(),
                  tmp / "log3") == 2;
    ok &= run_cli(cli, "solve --config " + (tmp / "zeros.cfg").string(),
                  tmp / "log4") == 3;
    fs::remove_all(tmp);
    return ok;
}

}  // namespace

int main() {
    Reporter rep;
    rep.run(1, check_bessel_oracle);
    rep.run(2, check_transform_calculus);
    rep.run(3, check_fourier_identity);
    rep.run(4, check_pde_residuals);
    rep.run(5, check_fredholm_engine);
    rep.run(6, check_end_to_end);
    rep.run(7, check_bound_shapes);
    rep.run(8, check_cli_contract);
    return rep.failures;
}
