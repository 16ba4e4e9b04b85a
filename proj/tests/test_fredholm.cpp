// Fredholm engine on the cofinite strip kernel: the log/pole closed form,
// the N-kernel against a brute-force principal-value oracle, Nystrom
// convergence, regularized determinants (matrix and Plemelj series),
// resolvent identities, and the characteristic scan.
#include <catch_amalgamated.hpp>
#include <cohilbert/fredholm.hpp>
#include <random>

#include "oracles.hpp"

using namespace cohilbert;
using oracles::gauss_kronrod;

static const FlowParams kP = FlowParams::make(4.0, 0.5, 2.0, 0.25, 0.5, 1.5);

static CofiniteGrid grid_of(int n) {
    return make_cofinite(FiniteGrid::chebyshev(n));
}

// Brute-force oracle for PV int_{-1}^{1} log|s-a| / ((s-b) sqrt(1-s^2)) ds.
static double log_pole_brute(double a, double b) {
    auto g = [&](double s) {
        return std::log(std::fabs(s - a)) / std::sqrt(1.0 - s * s);
    };
    const double lo = -1.0 + 1e-13, hi = 1.0 - 1e-13;
    const double w = std::min(b - lo, hi - b) * 0.999;
    double v = gauss_kronrod<double, 61>::integrate(
        [&](double s) { return (g(b + s) - g(b - s)) / s; }, 1e-15, w, 15,
        1e-10);
    if (b + w < hi)
        v += gauss_kronrod<double, 61>::integrate(
            [&](double s) { return g(s) / (s - b); }, b + w, hi, 15, 1e-10);
    if (b - w > lo)
        v += gauss_kronrod<double, 61>::integrate(
            [&](double s) { return g(s) / (s - b); }, lo, b - w, 15, 1e-10);
    return v;
}

// Brute-force PV oracle for the continuum N kernel (y on the right branch).
static Cplx n_oracle(const FlowParams& p, double x, double y, Cplx lam) {
    auto f = [&](double u) {
        return m_kernel(p, x - u, lam) * std::fabs(u) /
               (std::sqrt(u * u - 1.0) * (u - y));
    };
    Cplx total{};
    const double v1 = std::sqrt(y - 1.0 - 0.25);
    total += oracles::cgk(
        [&](double v) {
            const double u = 1.0 + v * v;
            return m_kernel(p, x - u, lam) * u /
                   (std::sqrt(u + 1.0) * (u - y)) * 2.0;
        },
        1e-14, v1, 15, 1e-12);
    total += oracles::cgk(
        [&](double s) { return f(y + s) + f(y - s); }, 1e-14, 0.25, 15, 1e-12);
    total += oracles::cgk(
        [&](double t) {
            const double u = 1.0 / t;
            return f(u) / (t * t);
        },
        1e-12, 1.0 / (y + 0.25), 15, 1e-12);
    total += oracles::cgk(
        [&](double v) {
            const double u = -(1.0 + v * v);
            return m_kernel(p, x - u, lam) * (-u) /
                   (std::sqrt(-u + 1.0) * (u - y)) * 2.0;
        },
        1e-14, 2.0, 15, 1e-12);
    total += oracles::cgk(
        [&](double t) {
            const double u = -1.0 / t;
            return f(u) / (t * t);
        },
        1e-12, 0.2, 15, 1e-12);
    return total * std::sqrt(y * y - 1.0) /
           (std::fabs(y) * M_PI * M_PI * p.u_free);
}

TEST_CASE("log/pole closed form on the Chebyshev measure") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> un(-0.95, 0.95);
    double worst = 0.0;
    for (int k = 0; k < 30; ++k) {
        const double a = un(rng), b = un(rng);
        worst = std::max(worst, std::fabs(log_pole_brute(a, b) -
                                          detail::cheb_log_pole_integral(a, b)));
    }
    CHECK(worst < 1e-4);  // oracle-limited
    // diagonal case
    for (double a : {0.0, 0.3, -0.7})
        CHECK(std::fabs(log_pole_brute(a, a) -
                        detail::cheb_log_pole_integral(a, a)) < 1e-4);
}

TEST_CASE("N kernel matches the brute PV oracle") {
    const Cplx lam(1.0, 1.0);
    for (auto [x, y] : std::vector<std::pair<double, double>>{
             {1.5, 2.0}, {1.2, 3.0}, {1.9, 1.4}}) {
        const Cplx mine = build_n_kernel(kP, x, y, lam);
        const Cplx ref = n_oracle(kP, x, y, lam);
        CHECK(std::abs(mine - ref) / std::abs(ref) < 5e-5);  // oracle-limited
    }
    // chi_A support in x, domain guards
    CHECK(build_n_kernel(kP, 2.5, 2.0, lam) == Cplx(0.0, 0.0));
    CHECK_THROWS_AS(build_n_kernel(kP, 0.5, 2.0, lam), std::domain_error);
    CHECK_THROWS_AS(build_n_kernel(kP, 1.5, 0.9, lam), std::domain_error);
    // inner-rule self convergence toward the m = 4096 reference
    const Cplx ref = build_n_kernel(kP, 1.5, 2.0, lam, 4096);
    const double e256 = std::abs(build_n_kernel(kP, 1.5, 2.0, lam, 256) - ref);
    const double e1024 =
        std::abs(build_n_kernel(kP, 1.5, 2.0, lam, 1024) - ref);
    CHECK(e1024 < 0.25 * e256);
    // prefactor wiring: N = sqrt(1-s0^2)/(pi^2 U) * inner integral
    const int m = detail::clear_inner_order(512, {1.0 / 1.5, 1.0 / 2.0});
    const detail::NKernelRow row = detail::make_n_kernel_row(kP, 1.5, lam, m);
    const double s0 = 1.0 / 2.0;
    const Cplx inner = detail::n_kernel_inner_integral(kP, row, 2.0);
    CHECK(std::abs(std::sqrt(1.0 - s0 * s0) / (M_PI * M_PI * kP.u_free) *
                       inner -
                   build_n_kernel(kP, 1.5, 2.0, lam, 512)) < 1e-14);
}

TEST_CASE("diagonal is the average of the one-sided limits") {
    const Cplx lam(1.0, 1.0);
    const Cplx diag = build_n_kernel(kP, 1.5, 1.5, lam);
    const Cplx above = build_n_kernel(kP, 1.5, 1.5 + 1e-5, lam);
    const Cplx below = build_n_kernel(kP, 1.5, 1.5 - 1e-5, lam);
    CHECK(std::abs(0.5 * (above + below) - diag) < 1e-3);
    // the jump across y = x is -2 kappa s0, kappa = -x c_L / (2U)
    const Cplx kappa = -1.5 * m_log_coeff(kP, lam) / (2.0 * kP.u_free);
    CHECK(std::abs((above - below) + 2.0 * kappa / 1.5) < 1e-4);
}

TEST_CASE("constant kernel determinant: det2 = 2/e") {
    const int n = 400;
    Eigen::MatrixXcd K(n, n);
    std::vector<double> w(n, 1.0 / (n - 1));
    w[0] = w[n - 1] = 0.5 / (n - 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K(i, j) = w[j];
    CHECK_THAT(determinant_matrix_core(K).real(),
               Catch::Matchers::WithinAbs(2.0 / std::exp(1.0), 1e-6));
    const DeterminantSeries s = determinant_series_core(K, 1.0, 12);
    CHECK(std::abs(s.value - determinant_matrix_core(K)) <
          s.truncation_bound + 1e-10);
}

TEST_CASE("series vs matrix determinant and resolvent identities") {
    std::mt19937 rng(23);
    std::normal_distribution<double> g(0.0, 1.0);
    const int n = 40;
    Eigen::MatrixXcd K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K(i, j) = Cplx(g(rng), g(rng));
    K *= 0.25 / K.norm();
    const double hs = K.norm();
    REQUIRE(hs <= 0.3);
    const DeterminantSeries s = determinant_series_core(K, hs, 8);
    const Cplx d = determinant_matrix_core(K);
    CHECK(std::abs(s.value - d) < s.truncation_bound + 1e-12);

    KernelMatrix km;
    km.entries = K;
    km.lambda = Cplx(1.0, 0.0);
    km.hs_norm = hs;
    km.grid = grid_of(n);
    const FredholmSolve fs = resolvent(km);
    CHECK(fs.residual_left < 1e-8);
    CHECK(fs.residual_right < 1e-8);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    CHECK(((I - fs.resolvent) * (I + K) - I).cwiseAbs().maxCoeff() < 1e-12);
    // Neumann series cross-check for the small kernel
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n), P = K;
    for (int k = 1; k <= 30; ++k) {
        H += (k % 2 ? 1.0 : -1.0) * P;
        P = P * K;
    }
    CHECK((H - fs.resolvent).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("determinant truncation guard throws when the tail is too fat") {
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Identity(8, 8) * Cplx(0.9, 0.0);
    KernelMatrix km;
    km.entries = K;
    km.lambda = Cplx(1.0, 0.0);
    km.hs_norm = K.norm();
    km.grid = grid_of(8);
    CHECK_THROWS_AS(determinant_series(km, 3, 1e-10), std::runtime_error);
}

TEST_CASE("assembled kernel: convergence, symmetry, scaling trend") {
    const Cplx lam(1.0, 0.5);
    const Cplx d64 = determinant_matrix(assemble_n_matrix(kP, grid_of(64), lam));
    const Cplx d128 =
        determinant_matrix(assemble_n_matrix(kP, grid_of(128), lam));
    const Cplx d256 =
        determinant_matrix(assemble_n_matrix(kP, grid_of(256), lam));
    const double order = std::log2(std::abs(d64 - d128) / std::abs(d128 - d256));
    CHECK(order > 2.0);
    // conjugate symmetry of the determinant
    const Cplx dp = determinant_matrix(assemble_n_matrix(kP, grid_of(64), Cplx(1.0, 0.8)));
    const Cplx dm = determinant_matrix(assemble_n_matrix(kP, grid_of(64), Cplx(1.0, -0.8)));
    CHECK(std::abs(dp - std::conj(dm)) < 1e-12);
    // Hilbert-Schmidt trend: grows with the paper's |lambda log lambda| scale
    double prev = 0.0;
    for (double s : {0.1, 0.2, 0.4}) {
        const KernelMatrix K = assemble_n_matrix(kP, grid_of(64), Cplx(s, 0.0));
        CHECK(K.hs_norm > prev);
        CHECK(K.hs_norm < 10.0 * std::abs(Cplx(s, 0.0) * std::log(Cplx(s, 0.0))));
        prev = K.hs_norm;
    }
}

TEST_CASE("collocation assembly agrees with the weighted assembly") {
    const Cplx lam(1.0, 0.5);
    // the two discretizations are diagonal rescalings of each other away
    // from the strip boundary, so the determinants must converge together
    const Cplx da =
        determinant_matrix(assemble_n_matrix(kP, grid_of(128), lam));
    const Cplx db = determinant_matrix(
        assemble_n_matrix_collocation(kP, grid_of(128), lam));
    CHECK(std::abs(da - db) < 5e-3);
    // the column restriction to the strip removes Hilbert-Schmidt mass, so
    // the collocation estimate is smaller but of the same order
    const double hsa = assemble_n_matrix(kP, grid_of(64), lam).hs_norm;
    const double hsb = assemble_n_matrix_collocation(kP, grid_of(64), lam).hs_norm;
    CHECK(hsb > 0.2 * hsa);
    CHECK(hsb < hsa);
}

TEST_CASE("strip cumulative weights integrate smooth data") {
    const FiniteGrid src = FiniteGrid::chebyshev(128);
    const Eigen::MatrixXd W =
        detail::strip_cumulative_weights(src, kP.kutta_extent);
    auto u = [](double s) { return std::exp(s) * std::cos(2.0 * s); };
    Eigen::VectorXd uv(src.size());
    for (int j = 0; j < src.size(); ++j) uv[j] = u(src.nodes[j]);
    const double edge = 1.0 / kP.kutta_extent;
    auto exact_below = [&](double sstar) {
        double v = 0.0;
        if (sstar > -1.0)
            v += gauss_kronrod<double, 61>::integrate(
                u, -1.0, std::min(sstar, -edge), 10, 1e-12);
        if (sstar > edge)
            v += gauss_kronrod<double, 61>::integrate(
                u, edge, std::min(sstar, 1.0), 10, 1e-12);
        return v;
    };
    for (int i : {3, 10, 120, 125})
        CHECK(std::fabs(W.row(i).dot(uv) - exact_below(src.nodes[i])) < 1e-3);
    CHECK(std::fabs(W.row(src.size()).dot(uv) - exact_below(1.0)) < 1e-3);
}

TEST_CASE("characteristic scan along an admissible line") {
    const std::vector<ScanSample> scan =
        characteristic_scan(kP, grid_of(64), 1.0, -4.0, 4.0, 9);
    REQUIRE(scan.size() == 9);
    CHECK(scan[4].lambda == Cplx(1.0, 0.0));
    for (const ScanSample& s : scan) {
        CHECK_FALSE(s.zero_candidate);
        // determinant bound |D| <= exp(hs^2 / 2) with a 1% discrete slack
        CHECK(std::abs(s.determinant) <=
              std::exp(0.5 * s.hs_norm * s.hs_norm) * 1.01);
    }
    // mirrored samples carry conjugate determinants
    CHECK(std::abs(scan[1].determinant - std::conj(scan[7].determinant)) <
          1e-12);
    // line outside the admissible strip is rejected
    CHECK_THROWS_AS(characteristic_scan(kP, grid_of(64), 0.3, -1.0, 1.0, 3),
                    std::invalid_argument);
    // a huge detection floor flags everything; resolvent then refuses
    const KernelMatrix K = assemble_n_matrix(kP, grid_of(64), Cplx(1.0, 0.0));
    CHECK_THROWS_AS(resolvent(K, 10.0), CharacteristicValueError);
    try {
        resolvent(K, 10.0);
    } catch (const CharacteristicValueError& e) {
        CHECK(e.lambda() == Cplx(1.0, 0.0));
    }
}
