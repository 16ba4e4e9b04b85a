// Nystrom discretization of the compact operator with kernel
//   N(x,y,lambda) = chi_A(x)/(pi^2 U) * PV int_{|u|>1} M(x-u,lambda)
//                   * |u| sqrt(y^2-1) / (|y| sqrt(u^2-1)) * du/(u-y),
// trace-compensated Fredholm determinant, minor series, and resolvent.
//
// The inner u-integral is pulled back by u = 1/s onto (-1,1), where the
// sqrt(u^2-1) endpoint factor becomes the Chebyshev weight:
//   J(x,y) = PV int_{-1}^{1} g(s)/(s - s0) ds/sqrt(1-s^2),
//   g(s) = -s0 * M(x - 1/s)/s,  s0 = 1/y,
// and N = sqrt(1-s0^2)/(pi^2 U) * J on the Kutta strip.  g is bounded at
// s = 0 (the Cauchy tail of M cancels the 1/s) but carries the logarithmic
// singularity of M at s* = 1/x.  Both singular structures are removed by
// subtraction with exact added-back integrals for the Chebyshev measure:
//   PV int 1/((s-b) w(s)) ds            = 0,
//   int   log|s-a| / w(s) ds            = -pi log 2,
//   PV int log|s-a| / ((s-b) w(s)) ds   = closed form via the Chebyshev
//                                         expansion of log|s-a|,
// with w(s) = sqrt(1-s^2).  On the diagonal y = x the pole and the log
// coincide; the entry is the singularity-subtracted finite part, using the
// analytic split M = A + B log|.| to evaluate the limiting values.
#ifndef COHILBERT_FREDHOLM_HPP
#define COHILBERT_FREDHOLM_HPP

#include <Eigen/Dense>
#include <Eigen/LU>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "flow.hpp"
#include "quadrature.hpp"
#include "util.hpp"

namespace cohilbert {

struct KernelMatrix {
    CofiniteGrid grid;
    Eigen::MatrixXcd entries;  // K[i][j] = N(x_i, y_j, lambda) * w_j
    Cplx lambda;
    double hs_norm = 0.0;  // discrete Hilbert-Schmidt norm of N
};

struct FredholmSolve {
    Cplx determinant;
    Eigen::MatrixXcd resolvent;  // H(x_i, y_j, lambda) * w_j
    double residual_left = 0.0;
    double residual_right = 0.0;
    double hs_norm = 0.0;
};

struct DeterminantSeries {
    Cplx value;
    double truncation_bound;
};

struct ScanSample {
    Cplx lambda;
    Cplx determinant;
    double hs_norm;
    bool zero_candidate;
};

class CharacteristicValueError : public std::runtime_error {
  public:
    CharacteristicValueError(const Cplx& lambda, const Cplx& det)
        : std::runtime_error("lambda is a characteristic value: |det| = " +
                             std::to_string(std::abs(det))),
          lambda_(lambda),
          determinant_(det) {}
    const Cplx& lambda() const { return lambda_; }
    const Cplx& determinant() const { return determinant_; }

  private:
    Cplx lambda_;
    Cplx determinant_;
};

namespace detail {

// PV int_{-1}^{1} log|s-a| / ((s-b) sqrt(1-s^2)) ds for a, b in (-1,1).
// From log|s-a| = -log 2 - 2 sum_k T_k(s) T_k(a)/k and
// PV int T_k(s)/((s-b) sqrt(1-s^2)) ds = pi U_{k-1}(b):
//   P = -(pi/sin beta) [S(beta+alpha) + S(beta-alpha)],
// S(t) = sum_k sin(kt)/k = (pi - t)/2 on (0, 2pi), odd and 2pi-periodic.
// The S(beta-alpha) term jumps by pi as b crosses a: the transform of the
// log factor is a step function, so the kernel itself has a bounded jump
// across the diagonal.  The "smooth" variant replaces that term by its
// continuous part -(beta-alpha)/2 (equal to the symmetric average at b = a);
// the jump is reinstated analytically by the assembly's product-integration
// correction.
inline double cheb_log_pole_integral(double a, double b, bool smooth = false) {
    const double alpha = std::acos(a), beta = std::acos(b);
    auto S = [](double t) {
        if (t > 0.0) return 0.5 * (M_PI - t);
        if (t < 0.0) return 0.5 * (-M_PI - t);
        return 0.0;
    };
    const double near = smooth ? -0.5 * (beta - alpha) : S(beta - alpha);
    return -(M_PI / std::sin(beta)) * (S(beta + alpha) + near);
}

// Per-row data for the inner rule: inner Chebyshev nodes, M(x - 1/s_k), and
// log|s_k - s*| with s* = 1/x.  The inner order is kept off the outer node
// set so neither s* nor any s0 = 1/y ever lands on an inner node.
struct NKernelRow {
    double x;
    double s_star;
    Cplx lambda;
    Cplx c_log;       // coefficient of log|x-u| in M near u = x
    Cplx phi_star;    // finite part of M(x - 1/s) - c_log log|s - s*| at s*
    std::vector<double> s;       // inner nodes
    std::vector<Cplx> m_hat;     // M(x - 1/s_k)
    std::vector<double> log_d;   // log|s_k - s*|
};

inline NKernelRow make_n_kernel_row(const FlowParams& p, double x,
                                    const Cplx& lambda, int inner_order) {
    NKernelRow row;
    row.x = x;
    row.s_star = 1.0 / x;
    row.lambda = lambda;
    row.c_log = m_log_coeff(p, lambda);
    // M(x - 1/s) = c_log log|s - s*| + Phi(s) with
    // Phi(s*) = 2 c_log log|x| + (finite part of M at the origin).
    row.phi_star = 2.0 * row.c_log * std::log(std::fabs(x)) +
                   m_kernel_origin(p, lambda).finite_part;
    FiniteGrid inner = FiniteGrid::chebyshev(inner_order);
    row.s = inner.nodes;
    row.m_hat.reserve(row.s.size());
    row.log_d.reserve(row.s.size());
    for (double sk : row.s) {
        row.m_hat.push_back(m_kernel(p, x - 1.0 / sk, lambda));
        row.log_d.push_back(std::log(std::fabs(sk - row.s_star)));
    }
    return row;
}

// The pulled-back PV integral J(x,y); see the header comment.  With
// smooth_p set, the diagonal jump of the log/pole integral is dropped
// (continuous part only) for use in the corrected Nystrom assembly.
inline Cplx n_kernel_inner_integral(const FlowParams& p, const NKernelRow& row,
                                    double y, bool smooth_p = false) {
    const double s0 = 1.0 / y;
    const double s_star = row.s_star;
    const int m = int(row.s.size());
    const double wq = M_PI / m;  // Chebyshev weight for ds/sqrt(1-s^2)
    const Cplx c_g = -s0 * row.x * row.c_log;  // log coefficient of g at s*

    if (std::fabs(s0 - s_star) > 1e-12) {
        // Off-diagonal: subtract the pole value of psi = g - c_g log|s-s*|,
        // then add back the exact pole and log integrals.
        const Cplx psi0 = -m_kernel(p, row.x - y, row.lambda) -
                          c_g * std::log(std::fabs(s0 - s_star));
        Cplx sum(0.0, 0.0);
        for (int k = 0; k < m; ++k) {
            const Cplx psi = (-s0 / row.s[k]) * row.m_hat[k] -
                             c_g * row.log_d[k];
            sum += (psi - psi0) / (row.s[k] - s0);
        }
        return wq * sum + c_g * cheb_log_pole_integral(s_star, s0, smooth_p);
    }

    // Diagonal finite part: the difference quotient of psi keeps a residual
    // log|s - s*| with coefficient gamma_d = x c_log + U c^2 x^2 / 2 (from the
    // first-order term of the analytic log factor of M); subtract it and add
    // back int log|s-a| dmu = -pi log 2.
    const Cplx c = c_lambda(p, row.lambda);
    const Cplx gamma_d =
        row.x * row.c_log + 0.5 * p.u_free * c * c * row.x * row.x;
    const Cplx psi_star = -row.phi_star;  // limit of g - c_g log|s-s*| at s*
    Cplx sum(0.0, 0.0);
    for (int k = 0; k < m; ++k) {
        const Cplx psi = (-s0 / row.s[k]) * row.m_hat[k] - c_g * row.log_d[k];
        sum += (psi - psi_star) / (row.s[k] - s_star) -
               gamma_d * row.log_d[k];
    }
    return wq * sum + gamma_d * (-M_PI * std::log(2.0)) +
           c_g * cheb_log_pole_integral(s_star, s_star);
}

// Picks an inner order whose nodes stay clear of the given pulled-back
// abscissae (needed only for off-grid evaluation points).
inline int clear_inner_order(int requested, std::initializer_list<double> pts) {
    for (int m = requested; m < requested + 16; ++m) {
        FiniteGrid g = FiniteGrid::chebyshev(m);
        bool clear = true;
        for (double p : pts)
            for (double s : g.nodes)
                if (std::fabs(s - p) < 1e-9) clear = false;
        if (clear) return m;
    }
    throw std::logic_error("n_kernel: could not separate inner nodes");
}

}  // namespace detail

// Single kernel entry N(x, y, lambda); |x|, |y| > 1 required, zero outside
// the Kutta strip |x| <= A.
inline Cplx build_n_kernel(const FlowParams& p, double x, double y,
                           const Cplx& lambda, int inner_order = 512) {
    require_spectral(lambda);
    if (!(std::fabs(x) > 1.0) || !(std::fabs(y) > 1.0))
        throw std::domain_error("build_n_kernel: need |x| > 1 and |y| > 1");
    if (std::fabs(x) > p.kutta_extent) return Cplx(0.0, 0.0);
    const int m = detail::clear_inner_order(inner_order, {1.0 / x, 1.0 / y});
    const detail::NKernelRow row = detail::make_n_kernel_row(p, x, lambda, m);
    const double s0 = 1.0 / y;
    const double pre = std::sqrt(1.0 - s0 * s0) / (M_PI * M_PI * p.u_free);
    return pre * detail::n_kernel_inner_integral(p, row, y);
}

namespace detail {

// Cell-fraction weights for the Kutta indicator chi_A on the pulled-back
// theta-grid: node i owns the theta-cell [i pi/n, (i+1) pi/n]; each cell
// contributes the measure of its overlap with {|x| <= A} = {theta <= theta_b
// or theta >= pi - theta_b}, theta_b = acos(1/A).  Overlap under a node that
// itself lies outside the strip is donated to the nearest inside node, so
// rows of outside nodes stay identically zero while the sharp cutoff is
// integrated to second order instead of first.
inline std::vector<double> kutta_cell_fractions(int n, double kutta_extent) {
    const double h = M_PI / n;
    const double tb = std::acos(1.0 / kutta_extent);
    std::vector<double> rho(n, 0.0);
    // Each side of theta-space: all inside nodes keep weight 1 (covering
    // [0, m_in h]); the signed remainder [m_in h, tb] is integrated on the
    // linear interpolant through the two outermost inside nodes (third-order
    // local error), so no weight ever lands on an outside node.
    auto handle = [&](bool left) {
        const int m_in = std::min(n, int(std::floor(tb / h + 0.5)));
        for (int k = 0; k < m_in; ++k) rho[left ? k : n - 1 - k] += 1.0;
        const double L = tb - m_in * h;  // signed, in (-h/2, h/2]
        if (L == 0.0 || m_in < 2) return;
        const double tp = m_in * h + 0.5 * L;
        const double t1 = (m_in - 0.5) * h;  // outermost inside node
        const double t2 = (m_in - 1.5) * h;
        const int i1 = left ? m_in - 1 : n - m_in;
        const int i2 = left ? m_in - 2 : n - m_in + 1;
        rho[i1] += (L / h) * (tp - t2) / (t1 - t2);
        rho[i2] += (L / h) * (tp - t1) / (t2 - t1);
    };
    handle(true);
    handle(false);
    return rho;
}

// Exact integrals int_{-1}^{1} sgn(s - a) T_k(s) ds (plain measure), used as
// product-integration weights for the diagonal jump of the kernel.
inline double sgn_chebyshev_integral(int k, double a) {
    if (k == 0) return -2.0 * a;
    if (k == 1) return 1.0 - a * a;
    // antiderivative F_k = T_{k+1}/(2(k+1)) - T_{k-1}/(2(k-1));
    // F(1) + F(-1) vanishes for even k and equals -2/(k^2-1) for odd k
    const double ends = (k % 2 == 1) ? -2.0 / (double(k) * k - 1.0) : 0.0;
    const double th = std::acos(a);
    const double Fa = std::cos((k + 1) * th) / (k + 1.0) -
                      std::cos((k - 1) * th) / (k - 1.0);
    return ends - Fa;
}

}  // namespace detail

// Dense Nystrom matrix on the cofinite grid: K ~= quadrature of the operator
// applied to grid data.  The inner rule uses the doubled-order grid of the
// same Chebyshev family, whose nodes interleave the outer nodes, so no pole
// or log point ever collides with an inner node.
//
// The kernel splits as N = N_cont + kappa(x) * s * sgn(s - s*) with
// kappa = -x * c_log / (2U), s = 1/y, s* = 1/x: the transform of the log
// factor of M is a step across the diagonal.  N_cont is integrated with the
// plain grid weights; the sgn part is integrated exactly against the
// Chebyshev interpolant of u(s) = g(1/s)/s (smooth for admissible g), which
// yields a rank-structured correction matrix and restores second-order grid
// convergence.  hs_norm uses the pointwise kernel values (jump included).
inline KernelMatrix assemble_n_matrix(const FlowParams& p,
                                      const CofiniteGrid& grid,
                                      const Cplx& lambda) {
    require_spectral(lambda);
    const int n = grid.size();
    if (n == 0) throw std::invalid_argument("assemble_n_matrix: empty grid");
    KernelMatrix K;
    K.grid = grid;
    K.lambda = lambda;
    K.entries = Eigen::MatrixXcd::Zero(n, n);
    const Cplx c_log = m_log_coeff(p, lambda);
    const FiniteGrid& src = grid.source;

    // T_k(t_j) table and per-column interpolation factor for u_j = g(y_j)/t_j.
    Eigen::MatrixXd cheb_tab(n, n);
    for (int j = 0; j < n; ++j) {
        const double th = std::acos(src.nodes[j]);
        for (int k = 0; k < n; ++k) cheb_tab(k, j) = std::cos(k * th);
    }

    const std::vector<double> rho =
        detail::kutta_cell_fractions(n, p.kutta_extent);
    std::vector<double> hs_rows(n, 0.0);  // summed in index order afterwards
    parallel_for(n, [&](int i) {
        const double x = grid.nodes[i];
        if (rho[i] == 0.0) return;  // chi_A row of zeros
        const detail::NKernelRow row =
            detail::make_n_kernel_row(p, x, lambda, 2 * n);
        const double s_star = 1.0 / x;
        const Cplx kappa = -x * c_log / (2.0 * p.u_free);
        double hs_row = 0.0;
        // continuous part with plain weights
        for (int j = 0; j < n; ++j) {
            const double y = grid.nodes[j];
            const double s0 = 1.0 / y;
            const double pre =
                std::sqrt(1.0 - s0 * s0) / (M_PI * M_PI * p.u_free);
            const Cplx n_cont =
                pre * detail::n_kernel_inner_integral(p, row, y, true);
            K.entries(i, j) = rho[i] * n_cont * grid.weights[j];
            const double sg = s0 > s_star ? 1.0 : (s0 < s_star ? -1.0 : 0.0);
            const Cplx n_full = n_cont + kappa * s0 * sg;
            hs_row += rho[i] * std::norm(n_full) * grid.weights[i] *
                      grid.weights[j];
        }
        // sgn part: exact integration against the Chebyshev interpolant
        std::vector<double> gk(n);
        for (int k = 0; k < n; ++k)
            gk[k] = detail::sgn_chebyshev_integral(k, s_star) *
                    (k == 0 ? 1.0 : 2.0) / n;
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += gk[k] * cheb_tab(k, j);
            K.entries(i, j) += rho[i] * kappa * acc / src.nodes[j];
        }
        hs_rows[i] = hs_row;
    });
    double hs2 = 0.0;
    for (double h : hs_rows) hs2 += h;
    K.hs_norm = std::sqrt(hs2);
    return K;
}

namespace detail {

// Cumulative strip integrals W_i = int_{strip, s < t_i} u(s) ds as a weight
// matrix over the node data u_j, by composite trapezoid between strip nodes
// with linearly extrapolated values at the interior strip edges s = +-1/A
// (the slivers at s = +-1 use the one-sided constant; the data there is the
// mildly singular inner edge and the sliver is O(1/n^2)).  Row n holds the
// total strip integral.  Used for the sgn-part of the collocation assembly.
inline Eigen::MatrixXd strip_cumulative_weights(const FiniteGrid& src,
                                                double kutta_extent) {
    const int n = src.size();
    const double edge = 1.0 / kutta_extent;
    // Sample points in ascending s: each carries the node index whose W row
    // should snapshot the running total (or -1 for a strip-boundary sample),
    // plus its value as a linear combination of the node data.
    struct Sample {
        double s;
        int node;                              // -1 for boundary samples
        std::vector<std::pair<int, double>> c; // value = sum c_k * u_{j_k}
    };
    std::vector<int> left, right;
    for (int j = 0; j < n; ++j) {
        if (src.nodes[j] <= -edge) left.push_back(j);
        if (src.nodes[j] >= edge) right.push_back(j);
    }
    auto extrap = [&](int ja, int jb, double s) {
        // linear extrapolation through nodes ja, jb evaluated at s
        const double sa = src.nodes[ja], sb = src.nodes[jb];
        const double a = (s - sb) / (sa - sb);
        return std::vector<std::pair<int, double>>{{ja, a}, {jb, 1.0 - a}};
    };
    std::vector<std::vector<Sample>> intervals;
    if (!left.empty()) {
        std::vector<Sample> iv;
        iv.push_back({-1.0, -1, {{left.front(), 1.0}}});
        for (int j : left) iv.push_back({src.nodes[j], j, {{j, 1.0}}});
        if (left.size() >= 2)
            iv.push_back({-edge, -1,
                          extrap(left[left.size() - 2], left.back(), -edge)});
        else
            iv.push_back({-edge, -1, {{left.back(), 1.0}}});
        intervals.push_back(std::move(iv));
    }
    if (!right.empty()) {
        std::vector<Sample> iv;
        if (right.size() >= 2)
            iv.push_back({edge, -1, extrap(right[0], right[1], edge)});
        else
            iv.push_back({edge, -1, {{right.front(), 1.0}}});
        for (int j : right) iv.push_back({src.nodes[j], j, {{j, 1.0}}});
        iv.push_back({1.0, -1, {{right.back(), 1.0}}});
        intervals.push_back(std::move(iv));
    }
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n + 1, n);
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(n);
    for (const auto& iv : intervals) {
        for (size_t k = 0; k < iv.size(); ++k) {
            if (iv[k].node >= 0) W.row(iv[k].node) = acc;
            if (k + 1 < iv.size()) {
                const double h2 = 0.5 * (iv[k + 1].s - iv[k].s);
                for (const auto& [j, c] : iv[k].c) acc[j] += h2 * c;
                for (const auto& [j, c] : iv[k + 1].c) acc[j] += h2 * c;
            }
        }
    }
    W.row(n) = acc;
    return W;
}

}  // namespace detail

// Collocation variant for the strip-supported solve (I + N)g = f/(pi U):
// the data class is supported exactly on 1 < |x| <= A (both f_a and Ng carry
// chi_A), so rows are pointwise at strip nodes and the y-integration runs
// over the strip only: plain columns get the cell-fraction weights, and the
// diagonal sgn-jump is integrated as kappa_i [T - 2 W(s*_i)] with cumulative
// trapezoid antiderivative weights (local; no interpolation across the
// support jump at |y| = A).
inline KernelMatrix assemble_n_matrix_collocation(const FlowParams& p,
                                                  const CofiniteGrid& grid,
                                                  const Cplx& lambda) {
    require_spectral(lambda);
    const int n = grid.size();
    if (n == 0)
        throw std::invalid_argument("assemble_n_matrix_collocation: empty grid");
    KernelMatrix K;
    K.grid = grid;
    K.lambda = lambda;
    K.entries = Eigen::MatrixXcd::Zero(n, n);
    const Cplx c_log = m_log_coeff(p, lambda);
    const FiniteGrid& src = grid.source;
    const std::vector<double> rho =
        detail::kutta_cell_fractions(n, p.kutta_extent);
    const Eigen::MatrixXd W =
        detail::strip_cumulative_weights(src, p.kutta_extent);
    std::vector<double> hs_rows(n, 0.0);
    parallel_for(n, [&](int i) {
        const double x = grid.nodes[i];
        if (std::fabs(x) > p.kutta_extent) return;  // row outside the strip
        const detail::NKernelRow row =
            detail::make_n_kernel_row(p, x, lambda, 2 * n);
        const double s_star = 1.0 / x;
        const Cplx kappa = -x * c_log / (2.0 * p.u_free);
        double hs_row = 0.0;
        for (int j = 0; j < n; ++j) {
            const double y = grid.nodes[j];
            const double s0 = 1.0 / y;
            const double pre =
                std::sqrt(1.0 - s0 * s0) / (M_PI * M_PI * p.u_free);
            const Cplx n_cont =
                pre * detail::n_kernel_inner_integral(p, row, y, true);
            K.entries(i, j) = rho[j] * n_cont * grid.weights[j];
            // sgn part on u_j = g_j * y_j: kappa (T_j - 2 W_{i,j}) u_j
            K.entries(i, j) += kappa * (W(n, j) - 2.0 * W(i, j)) * y;
            const double sg = s0 > s_star ? 1.0 : (s0 < s_star ? -1.0 : 0.0);
            const Cplx n_full = n_cont + kappa * s0 * sg;
            hs_row += rho[i] * std::norm(n_full) * grid.weights[i] *
                      grid.weights[j] * rho[j];
        }
        hs_rows[i] = hs_row;
    });
    double hs2 = 0.0;
    for (double h : hs_rows) hs2 += h;
    K.hs_norm = std::sqrt(hs2);
    return K;
}

// det(I + K) * exp(-trace K) with log-determinant accumulation (no
// intermediate product can overflow).
inline Cplx determinant_matrix_core(const Eigen::MatrixXcd& K) {
    const int n = int(K.rows());
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(
        Eigen::MatrixXcd::Identity(n, n) + K);
    Cplx log_sum(0.0, 0.0);
    for (int i = 0; i < n; ++i) log_sum += std::log(lu.matrixLU()(i, i));
    const double sign = lu.permutationP().determinant();
    return sign * std::exp(log_sum - K.trace());
}

inline Cplx determinant_matrix(const KernelMatrix& K) {
    return determinant_matrix_core(K.entries);
}

// Minor series for the trace-compensated determinant:
//   det2(I + K) = 1 + sum_m delta_m,
//   delta_m = (1/m) sum_{k=1}^{m} (-1)^{k+1} sigma_k delta_{m-k},
// with sigma_1 = 0 (the zero-diagonal modification) and sigma_k = tr(K^k).
// For m <= 3 the recursion reproduces the explicit zero-diagonal minors
// (delta_2 = -tr(K^2)/2, delta_3 = tr(K^3)/3); the truncation bound is
// (e/m)^{m/2} ||T||^m at the first omitted order.
inline DeterminantSeries determinant_series_core(const Eigen::MatrixXcd& K,
                                                 double hs_norm, int m_max) {
    if (m_max < 1)
        throw std::invalid_argument("determinant_series: m_max >= 1 required");
    std::vector<Cplx> sigma(m_max + 1, Cplx(0.0, 0.0));  // sigma[1] = 0
    Eigen::MatrixXcd P = K;
    for (int k = 2; k <= m_max; ++k) {
        P = P * K;
        sigma[k] = P.trace();
    }
    std::vector<Cplx> delta(m_max + 1, Cplx(0.0, 0.0));
    delta[0] = Cplx(1.0, 0.0);
    Cplx value = delta[0];
    for (int m = 1; m <= m_max; ++m) {
        Cplx acc(0.0, 0.0);
        for (int k = 1; k <= m; ++k) {
            const double sgn = (k % 2 == 1) ? 1.0 : -1.0;
            acc += sgn * sigma[k] * delta[m - k];
        }
        delta[m] = acc / double(m);
        value += delta[m];
    }
    const double mb = m_max + 1;
    const double bound =
        std::pow(std::exp(1.0) / mb, 0.5 * mb) * std::pow(hs_norm, mb);
    return {value, bound};
}

inline Cplx determinant_series(const KernelMatrix& K, int m_max,
                               double tol = 1e-6) {
    const DeterminantSeries r =
        determinant_series_core(K.entries, K.hs_norm, m_max);
    if (!(r.truncation_bound <= tol))
        throw std::runtime_error(
            "determinant_series: truncation bound " +
            std::to_string(r.truncation_bound) + " exceeds tolerance");
    return r.value;
}

// Resolvent H = (I + K)^{-1} K; (I - H) is the two-sided inverse of (I + K).
// Residuals are the sup-norm defects of H + KH = K and H + HK = K.
inline FredholmSolve resolvent(const KernelMatrix& K,
                               double det_floor = 1e-10) {
    const Cplx det = determinant_matrix(K);
    if (!(std::abs(det) > det_floor))
        throw CharacteristicValueError(K.lambda, det);
    const int n = int(K.entries.rows());
    const Eigen::MatrixXcd A =
        Eigen::MatrixXcd::Identity(n, n) + K.entries;
    FredholmSolve out;
    out.determinant = det;
    out.hs_norm = K.hs_norm;
    out.resolvent = A.partialPivLu().solve(K.entries);
    const Eigen::MatrixXcd& H = out.resolvent;
    out.residual_left =
        (H + K.entries * H - K.entries).cwiseAbs().maxCoeff();
    out.residual_right =
        (H + H * K.entries - K.entries).cwiseAbs().maxCoeff();
    return out;
}

// Samples the determinant along the vertical line Re lambda = sigma;
// zero candidates are modulus dips below det_floor (advisory only).
inline std::vector<ScanSample> characteristic_scan(
    const FlowParams& p, const CofiniteGrid& grid, double sigma,
    double eta_min, double eta_max, int n_samples,
    double det_floor = 1e-10) {
    if (n_samples < 1)
        throw std::invalid_argument("characteristic_scan: need n_samples >= 1");
    if (!(sigma >= p.sigma1 && sigma <= p.sigma2))
        throw std::invalid_argument(
            "characteristic_scan: sigma outside [sigma1, sigma2]");
    std::vector<ScanSample> out(n_samples);
    parallel_for(n_samples, [&](int i) {
        const double eta =
            n_samples == 1
                ? eta_min
                : eta_min + (eta_max - eta_min) * i / double(n_samples - 1);
        const Cplx lambda(sigma, eta);
        const KernelMatrix K = assemble_n_matrix(p, grid, lambda);
        const Cplx det = determinant_matrix(K);
        out[i] = {lambda, det, K.hs_norm, std::abs(det) <= det_floor};
    }, 1);  // each sample already parallelizes its assembly over rows
    return out;
}

}  // namespace cohilbert

#endif  // COHILBERT_FREDHOLM_HPP
