// End-to-end subsonic panel solve: prescribed downwash data to velocity
// potential.  For each Laplace parameter lambda on the Bromwich line the
// chain is
//   f_a  =  -(chi_A/pi) int_{-1}^{1} e^{-d y} R(x-y) w_hat(y) dy
//   (I + N) g = f_a / (pi U)           (strip-collocation Fredholm solve)
//   h_outer = Pinv[g],   h_inner = (1/pi) e^{-d x} w_hat(x)
//   xi(x,z) = -e^{d x}/sqrt(beta2) int K0(r sqrt((x-y)^2/beta2 + z^2)) h(y) dy
// and the time-domain potential is the Bromwich integral
//   phi(x,z,t) = (1/2 pi) int e^{(sigma + i eta) t} xi(x,z) d eta.
#ifndef COHILBERT_PIPELINE_HPP
#define COHILBERT_PIPELINE_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <cohilbert/flow.hpp>
#include <cohilbert/fredholm.hpp>
#include <cohilbert/transforms.hpp>

namespace cohilbert {

// Prescribed downwash in the Laplace domain: w_hat(x, lambda) for |x| <= 1.
// The built-in harmonic forms multiply a spectral envelope
//   E(lambda) = exp(decay - decay * cos(kappa (lambda - center)))
// whose modulus decays double-exponentially in |Im lambda| as long as
// kappa * |Re lambda - center| < pi/2, which keeps the Bromwich integrand
// integrable along every admissible line.
struct DownwashSpec {
    std::string form;  // "harmonic-plunge", "harmonic-pitch", "custom"
    double amplitude = 1.0;
    double frequency = 1.0;
    double envelope_decay = 2.0;
    double envelope_kappa = 0.7;
    double envelope_center = 1.0;
    std::function<Cplx(double, const Cplx&)> laplace_transform;

    Cplx envelope(const Cplx& lambda) const {
        const Cplx arg = envelope_kappa * (lambda - envelope_center);
        return std::exp(envelope_decay * (1.0 - std::cos(arg)));
    }
    void validate() const {
        if (!laplace_transform)
            throw std::invalid_argument("DownwashSpec: no laplace_transform");
        if (!(envelope_decay >= 0.0) || !(envelope_kappa >= 0.0))
            throw std::invalid_argument("DownwashSpec: negative envelope");
    }
};

inline DownwashSpec make_harmonic_plunge(const FlowParams& p, double amplitude,
                                         double frequency) {
    DownwashSpec w;
    w.form = "harmonic-plunge";
    w.amplitude = amplitude;
    w.frequency = frequency;
    w.envelope_center = 0.5 * (p.sigma1 + p.sigma2);
    w.laplace_transform = [w, amplitude, frequency](double,
                                                    const Cplx& lambda) {
        return amplitude * frequency /
               (lambda * lambda + frequency * frequency) * w.envelope(lambda);
    };
    return w;
}

inline DownwashSpec make_harmonic_pitch(const FlowParams& p, double amplitude,
                                        double frequency) {
    DownwashSpec w = make_harmonic_plunge(p, amplitude, frequency);
    w.form = "harmonic-pitch";
    auto base = w.laplace_transform;
    w.laplace_transform = [base](double x, const Cplx& lambda) {
        return x * base(x, lambda);
    };
    return w;
}

// Thrown by the Bromwich quadrature when the integrand has not decayed below
// the tail tolerance at the truncation frequency.
class TailDecayError : public std::runtime_error {
  public:
    TailDecayError(double measured, double tol)
        : std::runtime_error("Bromwich integrand tail " +
                             std::to_string(measured) +
                             " exceeds tolerance " + std::to_string(tol)),
          measured_(measured) {}
    double measured() const { return measured_; }

  private:
    double measured_;
};

// Forcing term f_a at a single point |x| > 1.  The y-integral has a Cauchy
// pole -U/(x-y) and a log layer from the kernel as x approaches the panel
// edge, so for small gaps the endpoint value and slope of the smooth factor
// q(y) = e^{-d y} w_hat(y) are subtracted and integrated in closed form.
inline Cplx f_a_point(const FlowParams& p, const DownwashSpec& w, double x,
                      const Cplx& lambda, int quad_order = 96) {
    require_spectral(lambda);
    w.validate();
    if (std::fabs(x) <= 1.0)
        throw std::domain_error("f_a_point: x inside the panel");
    if (std::fabs(x) > p.kutta_extent) return Cplx(0.0, 0.0);
    const Cplx d = d_lambda(p, lambda);
    const Cplx c_log = m_log_coeff(p, lambda);
    auto q = [&](double y) {
        return std::exp(-d * y) * w.laplace_transform(y, lambda);
    };
    const FiniteGrid gl = FiniteGrid::legendre(quad_order);
    const double e = x > 0.0 ? 1.0 : -1.0;  // nearest panel edge
    const double eps = 1e-6;
    const Cplx q_e = q(e);
    const Cplx q1_e = (q(e) - q(e - eps * e)) / (eps * e);  // one-sided
    // closed forms over [-1, 1]
    const double L0 = std::log((x + 1.0) / (x - 1.0));
    const double L1v = -2.0 + (x - e) * L0;
    const double G0 = (x + 1.0) * std::log(std::fabs(x + 1.0)) -
                      (x - 1.0) * std::log(std::fabs(x - 1.0)) - 2.0;
    Cplx pole = q_e * L0 + q1_e * L1v;
    Cplx logp = q_e * G0;
    Cplx smooth = 0.0;
    for (int i = 0; i < gl.size(); ++i) {
        const double y = gl.nodes[i];
        const double wgt = gl.weights[i];
        const Cplx qy = q(y);
        const double lg = std::log(std::fabs(x - y));
        pole += wgt * (qy - q_e - q1_e * (y - e)) / (x - y);
        logp += wgt * (qy - q_e) * lg;
        smooth += wgt * qy * (m_kernel(p, x - y, lambda) - c_log * lg);
    }
    return -(1.0 / M_PI) * (-p.u_free * pole + c_log * logp + smooth);
}

// f_a sampled on a cofinite grid (zero outside the Kutta strip).  Sets
// *near_singular_warning when a grid node sits within 1e-6 of a panel edge,
// where the forcing evaluation loses accuracy.
inline std::vector<Cplx> assemble_f_a(const FlowParams& p,
                                      const DownwashSpec& w,
                                      const CofiniteGrid& grid,
                                      const Cplx& lambda,
                                      bool* near_singular_warning = nullptr) {
    require_spectral(lambda);
    w.validate();
    if (near_singular_warning) *near_singular_warning = false;
    std::vector<Cplx> vals(grid.size(), Cplx(0.0, 0.0));
    parallel_for(grid.size(), [&](int i) {
        const double x = grid.nodes[i];
        if (std::fabs(x) > p.kutta_extent) return;
        vals[i] = f_a_point(p, w, x, lambda);
    });
    if (near_singular_warning)
        for (int i = 0; i < grid.size(); ++i)
            if (std::fabs(std::fabs(grid.nodes[i]) - 1.0) < 1e-6)
                *near_singular_warning = true;
    return vals;
}

// M-operator applied to a cofinite function, evaluated at one point |x| > 1:
//   (M h)(x) = int_{|y|>1} m(x - y) h(y) dy
// pulled back to s = 1/y with the diagonal log of m subtracted and added
// back in closed form (int log|s - s*| dmu = -pi log 2).  Works at grid
// nodes too: the coinciding term takes its finite limit.
inline Cplx m_operator_point(const FlowParams& p, const CofiniteFn& h,
                             double x, const Cplx& lambda) {
    if (std::fabs(x) <= 1.0)
        throw std::domain_error("m_operator_point: x inside the panel");
    const CofiniteGrid& g = h.grid;
    const FiniteGrid& src = g.source;
    const int n = g.size();
    const double s_star = 1.0 / x;
    const Cplx c_log = m_log_coeff(p, lambda);
    // v_j = h(1/t_j) / t_j (the smooth pullback); the weighted data is
    // V_j = v_j sin(theta_j) and the subtraction coefficient is V(s*)/s*.
    std::vector<Cplx> v(n);
    for (int j = 0; j < n; ++j) v[j] = h.values[j] / src.nodes[j];
    const Cplx coef = interpolate(src, v, s_star) *
                      std::sqrt((1.0 - s_star) * (1.0 + s_star)) / s_star;
    const MKernelOrigin origin = m_kernel_origin(p, lambda);
    const Cplx phi_star =
        origin.finite_part + 2.0 * c_log * std::log(std::fabs(x));
    Cplx sum = 0.0;
    for (int j = 0; j < n; ++j) {
        const double t = src.nodes[j];
        const double gap = t - s_star;
        if (std::fabs(gap) < 1e-13) {
            // coinciding node: the log-subtracted integrand has the finite
            // limit coef * (m-origin finite part + 2 c_log log|x|)
            sum += coef * phi_star;
            continue;
        }
        const Cplx m_hat = m_kernel(p, x - 1.0 / t, lambda);
        sum += m_hat * v[j] * src.sin_theta[j] / t -
               c_log * coef * std::log(std::fabs(gap));
    }
    return (M_PI / n) * sum + c_log * coef * (-M_PI * std::log(2.0));
}

// Pinv applied to the indicator of the right strip branch (1, A], in closed
// form.  With u = 1/x, a = 1/A the pullback is q(t) = (1/t) on [a, 1) and
// the Tricomi inverse reduces to elementary integrals by partial fractions:
//   T^{-1}[q](u) = -(I1(u) - I2) / (pi u sqrt(1-u^2))
//   I1 = (1-u^2) G(u) - sqrt(1-a^2) - u (pi/2 - asin a)
//   G  = log((1 - u a + sqrt(1-u^2) sqrt(1-a^2)) / |a - u|) / sqrt(1-u^2)
//   I2 = log((1 + sqrt(1-a^2)) / a) - sqrt(1-a^2).
// The formula holds on both branches (u of either sign); the left-branch
// indicator [-A, -1) maps to -f(-x) by oddness of the transform pair.  The
// result is lambda-independent and carries the x = A log singularity and
// the panel edge 1/sqrt(x^2-1) behaviour of the solution class.
inline double strip_inverse_indicator(double x, double kutta_extent) {
    const double A = kutta_extent;
    if (!(A > 1.0))
        throw std::invalid_argument("strip_inverse_indicator: need A > 1");
    if (!(std::fabs(x) > 1.0))
        throw std::domain_error("strip_inverse_indicator: need |x| > 1");
    const double a = 1.0 / A;
    const double u = 1.0 / x;
    const double w = std::sqrt((1.0 - u) * (1.0 + u));
    const double sa = std::sqrt((1.0 - a) * (1.0 + a));
    const double G =
        std::log((1.0 - u * a + w * sa) / std::fabs(a - u)) / w;
    const double I1 =
        (1.0 - u * u) * G - sa - u * (0.5 * M_PI - std::asin(a));
    const double I2 = std::log((1.0 + sa) / a) - sa;
    const double tinv = -(I1 - I2) / (M_PI * u * w);
    return -u * tinv;
}

// Result of one Laplace-parameter solve.
struct LambdaSolve {
    Cplx lambda;
    DownwashSpec downwash;
    CofiniteFn f_a;        // forcing on the grid (zero off the strip)
    CofiniteFn g;          // solution of the Fredholm system
    CofiniteFn h_a_outer;  // Pinv[g] on the grid
    // g jumps to zero across |x| = A; the jump is split off and inverted in
    // closed form, leaving a continuous remainder for the grid transform:
    //   h_a_outer = Pinv[g - jumps * indicators] + jumps * closed form.
    CofiniteFn h_a_smooth;    // grid-transform part of h_a_outer
    Cplx edge_jump_plus = 0.0;   // interior limit of g at x = +A
    Cplx edge_jump_minus = 0.0;  // interior limit of g at x = -A
    FiniteGrid inner_grid;
    std::vector<Cplx> h_a_inner;  // (1/pi) e^{-d x} w_hat on inner_grid
    Cplx determinant = 0.0;
    double hs_norm = 0.0;
    double resolvent_residual = 0.0;  // worse of the two identity residuals
    double kutta_residual = 0.0;     // relative, at off-node control points
    double tangency_residual = 0.0;  // relative sup over the default probes
    std::map<double, double> weighted_norms;  // p -> (1+|x|)^{p-2} norm of h
};

// (1 + |x|)^{p-2}-weighted L^p norm of a cofinite grid function.
inline double decay_weighted_norm(const CofiniteFn& f, double p_exp) {
    if (!(p_exp > 1.0))
        throw std::invalid_argument("decay_weighted_norm: need p > 1");
    double acc = 0.0;
    for (int j = 0; j < f.grid.size(); ++j) {
        const double ax = std::fabs(f.grid.nodes[j]);
        acc += f.grid.weights[j] * std::pow(1.0 + ax, p_exp - 2.0) *
               std::pow(std::abs(f.values[j]), p_exp);
    }
    return std::pow(acc, 1.0 / p_exp);
}

// Downwash recovery at height z via the vertical derivative of xi; declared
// ahead of solve_lambda which records the default-probe residual.
inline Cplx xi_eval(const FlowParams& p, const LambdaSolve& s, double x,
                    double z);
inline double tangency_check(const FlowParams& p, const LambdaSolve& s,
                             const std::vector<double>& x_points);

inline LambdaSolve solve_lambda(const FlowParams& p, const DownwashSpec& w,
                                const CofiniteGrid& grid, const Cplx& lambda,
                                double det_floor = 1e-10,
                                int inner_size = 128) {
    require_spectral(lambda);
    w.validate();
    LambdaSolve out;
    out.lambda = lambda;
    out.downwash = w;
    const int n = grid.size();
    const double piU = M_PI * p.u_free;

    std::vector<Cplx> f_vals = assemble_f_a(p, w, grid, lambda);
    out.f_a = CofiniteFn{grid, f_vals};

    KernelMatrix K = assemble_n_matrix_collocation(p, grid, lambda);
    FredholmSolve fs = resolvent(K, det_floor);
    out.determinant = fs.determinant;
    out.hs_norm = fs.hs_norm;
    out.resolvent_residual = std::max(fs.residual_left, fs.residual_right);

    Eigen::VectorXcd fv(n);
    for (int j = 0; j < n; ++j) fv[j] = f_vals[j];
    Eigen::VectorXcd gv = (fv - fs.resolvent * fv) / piU;
    std::vector<Cplx> g_vals(n);
    for (int j = 0; j < n; ++j) g_vals[j] = gv[j];
    out.g = CofiniteFn{grid, g_vals};

    // interior limits of g at the strip edges +-A by linear extrapolation in
    // the pullback coordinate s = 1/y from the two nearest strip nodes
    const double edge_s = 1.0 / p.kutta_extent;
    const FiniteGrid& src = grid.source;
    auto edge_limit = [&](bool right) {
        std::vector<int> near;  // strip nodes ordered by distance from edge
        if (right) {
            for (int j = 0; j < n && int(near.size()) < 2; ++j)
                if (src.nodes[j] >= edge_s) near.push_back(j);
        } else {
            for (int j = n - 1; j >= 0 && int(near.size()) < 2; --j)
                if (src.nodes[j] <= -edge_s) near.push_back(j);
        }
        const double se = right ? edge_s : -edge_s;
        if (near.size() < 2) return near.empty() ? Cplx(0.0) : g_vals[near[0]];
        const double s0 = src.nodes[near[0]], s1 = src.nodes[near[1]];
        const double c = (se - s1) / (s0 - s1);
        return c * g_vals[near[0]] + (1.0 - c) * g_vals[near[1]];
    };
    out.edge_jump_plus = edge_limit(true);
    out.edge_jump_minus = edge_limit(false);
    std::vector<Cplx> gc_vals = g_vals;
    for (int j = 0; j < n; ++j) {
        const double y = grid.nodes[j];
        if (y > 1.0 && y <= p.kutta_extent) gc_vals[j] -= out.edge_jump_plus;
        if (y < -1.0 && y >= -p.kutta_extent) gc_vals[j] -= out.edge_jump_minus;
    }
    CofiniteFn g_c{grid, gc_vals};
    std::vector<Cplx> hs_vals(n), h_vals(n);
    parallel_for(n, [&](int j) {
        hs_vals[j] = cofinite_hilbert_inverse(g_c, grid.nodes[j]);
        const double y = grid.nodes[j];
        h_vals[j] =
            hs_vals[j] +
            out.edge_jump_plus * strip_inverse_indicator(y, p.kutta_extent) -
            out.edge_jump_minus *
                strip_inverse_indicator(-y, p.kutta_extent);
    });
    out.h_a_smooth = CofiniteFn{grid, hs_vals};
    out.h_a_outer = CofiniteFn{grid, h_vals};

    out.inner_grid = FiniteGrid::chebyshev(inner_size);
    out.h_a_inner.resize(inner_size);
    const Cplx d = d_lambda(p, lambda);
    for (int j = 0; j < inner_size; ++j) {
        const double y = out.inner_grid.nodes[j];
        out.h_a_inner[j] =
            std::exp(-d * y) * w.laplace_transform(y, lambda) / M_PI;
    }

    // Kutta residual: |pi U P[h] + M[h] - f_a| at off-node control points in
    // the strip, relative to the forcing sup-norm.
    double f_sup = 0.0;
    for (const Cplx& f : f_vals) f_sup = std::max(f_sup, std::abs(f));
    const double A = p.kutta_extent;
    std::vector<double> controls;
    for (double frac : {0.2, 0.5, 0.8, 0.95}) {
        controls.push_back(1.0 + frac * (A - 1.0));
        controls.push_back(-1.0 - frac * (A - 1.0));
    }
    double worst = 0.0;
    for (double xc : controls) {
        // P applied to the step part reproduces the indicators exactly
        Cplx p_part = cofinite_hilbert(out.h_a_smooth, xc);
        if (xc > 1.0 && xc <= A) p_part += out.edge_jump_plus;
        if (xc < -1.0 && xc >= -A) p_part += out.edge_jump_minus;
        const Cplx lhs = piU * p_part +
                         m_operator_point(p, out.h_a_outer, xc, lambda);
        const Cplx rhs = f_a_point(p, w, xc, lambda);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    out.kutta_residual = f_sup > 0.0 ? worst / f_sup : worst;

    // Tangency at the default interior probes, relative to the downwash sup.
    std::vector<double> probes;
    for (int k = -4; k <= 4; ++k) probes.push_back(0.2 * k);
    const double tang = tangency_check(p, out, probes);
    double w_sup = 0.0;
    for (double xp : probes)
        w_sup = std::max(w_sup, std::abs(w.laplace_transform(xp, lambda)));
    out.tangency_residual = w_sup > 0.0 ? tang / w_sup : tang;

    for (double pe : {1.2, 1.3})
        out.weighted_norms[pe] = decay_weighted_norm(out.h_a_outer, pe);
    return out;
}

// Laplace-domain potential xi(x, z) for z > 0.  The panel part substitutes
// y = x + z sqrt(beta2) sinh(tau), under which the kernel argument becomes
// r z cosh(tau) and the integrand is smooth; the outer part uses the grid's
// cofinite rule directly (the kernel decays exponentially in |y|).
inline Cplx xi_eval(const FlowParams& p, const LambdaSolve& s, double x,
                    double z) {
    if (!(z > 0.0)) throw std::domain_error("xi_eval: need z > 0");
    const Cplx lambda = s.lambda;
    const Cplx d = d_lambda(p, lambda);
    const Cplx r = r_lambda(p, lambda);
    const double sb = std::sqrt(p.beta2());
    auto kern = [&](double y) {
        const double dx = x - y;
        return k0(r * std::sqrt(dx * dx / p.beta2() + z * z));
    };
    // panel part in tau
    const double tau_lo = std::asinh((-1.0 - x) / (z * sb));
    const double tau_hi = std::asinh((1.0 - x) / (z * sb));
    const FiniteGrid gl = FiniteGrid::legendre(96);
    Cplx inner = 0.0;
    for (int i = 0; i < gl.size(); ++i) {
        const double tau =
            0.5 * (tau_hi + tau_lo) + 0.5 * (tau_hi - tau_lo) * gl.nodes[i];
        const double y = x + z * sb * std::sinh(tau);
        const Cplx h = interpolate(s.inner_grid, s.h_a_inner, y);
        inner += 0.5 * (tau_hi - tau_lo) * gl.weights[i] *
                 k0(r * z * std::cosh(tau)) * h * z * sb *
                 std::cosh(tau);
    }
    Cplx outer = 0.0;
    for (int j = 0; j < s.h_a_outer.grid.size(); ++j)
        outer += s.h_a_outer.grid.weights[j] *
                 kern(s.h_a_outer.grid.nodes[j]) * s.h_a_outer.values[j];
    return -std::exp(d * x) / sb * (inner + outer);
}

// Max absolute deviation of the recovered downwash lim_{z->0} d(xi)/dz from
// the prescribed w_hat over the given panel points, using central first
// differences at two heights with Richardson extrapolation in z.
inline double tangency_check(const FlowParams& p, const LambdaSolve& s,
                             const std::vector<double>& x_points) {
    auto dz = [&](double x, double z) {
        const double delta = 0.5 * z;
        return (xi_eval(p, s, x, z + delta) - xi_eval(p, s, x, z - delta)) /
               (2.0 * delta);
    };
    double worst = 0.0;
    for (double x : x_points) {
        if (std::fabs(x) >= 1.0)
            throw std::domain_error("tangency_check: point off the panel");
        const Cplx d1 = dz(x, 1e-2);
        const Cplx d2 = dz(x, 5e-3);
        const Cplx target = s.downwash.laplace_transform(x, s.lambda);
        worst = std::max(worst, std::abs(2.0 * d2 - d1 - target));
    }
    return worst;
}

// Time-domain potential on a tensor grid via the truncated Bromwich
// integral.  The solves must sample a symmetric, uniformly spaced frequency
// window on a single admissible line Re lambda = sigma.
struct SolutionField {
    std::vector<double> x_grid, z_grid, t_grid;
    std::vector<double> phi;  // [ix * nz * nt + iz * nt + it]
    double sigma_used = 0.0;
    double eta_truncation = 0.0;
    double im_residual = 0.0;  // worst imaginary part left by the quadrature
    double tail_ratio = 0.0;   // worst end-sample to peak integrand ratio

    double at(int ix, int iz, int it) const {
        return phi[(size_t(ix) * z_grid.size() + iz) * t_grid.size() + it];
    }
};

inline SolutionField inverse_laplace_phi(
    const FlowParams& p, const std::vector<LambdaSolve>& solves,
    const std::vector<double>& x_grid, const std::vector<double>& z_grid,
    const std::vector<double>& t_grid, double im_tol = 1e-6,
    double tail_tol = 1e-6) {
    const int nl = int(solves.size());
    if (nl < 3)
        throw std::invalid_argument("inverse_laplace_phi: need >= 3 samples");
    const double sigma = solves.front().lambda.real();
    const double eta0 = solves.front().lambda.imag();
    const double step =
        (solves.back().lambda.imag() - eta0) / double(nl - 1);
    for (int l = 0; l < nl; ++l) {
        const Cplx lam = solves[l].lambda;
        if (std::fabs(lam.real() - sigma) > 1e-12 ||
            std::fabs(lam.imag() - (eta0 + l * step)) > 1e-9)
            throw std::invalid_argument(
                "inverse_laplace_phi: solves must sample one vertical line "
                "uniformly");
    }
    if (std::fabs(eta0 + solves.back().lambda.imag()) > 1e-9)
        throw std::invalid_argument(
            "inverse_laplace_phi: frequency window must be symmetric");
    SolutionField out;
    out.x_grid = x_grid;
    out.z_grid = z_grid;
    out.t_grid = t_grid;
    out.sigma_used = sigma;
    out.eta_truncation = std::fabs(solves.back().lambda.imag());
    const size_t nx = x_grid.size(), nz = z_grid.size(), nt = t_grid.size();
    out.phi.assign(nx * nz * nt, 0.0);
    std::vector<double> im_worst(nx * nz, 0.0), tail_worst(nx * nz, 0.0);
    parallel_for(int(nx * nz), [&](int iw) {
        const size_t ix = size_t(iw) / nz, iz = size_t(iw) % nz;
        std::vector<Cplx> xi(nl);
        double peak = 0.0;
        for (int l = 0; l < nl; ++l) {
            xi[l] = xi_eval(p, solves[l], x_grid[ix], z_grid[iz]);
            peak = std::max(peak, std::abs(xi[l]));
        }
        const double ends =
            std::max(std::abs(xi.front()), std::abs(xi.back()));
        tail_worst[iw] = peak > 0.0 ? ends / peak : 0.0;
        for (size_t it = 0; it < nt; ++it) {
            const double t = t_grid[it];
            Cplx acc = 0.0;
            for (int l = 0; l < nl; ++l) {
                const double trap = (l == 0 || l == nl - 1) ? 0.5 : 1.0;
                acc += trap * std::exp(solves[l].lambda * t) * xi[l];
            }
            acc *= step / (2.0 * M_PI);
            out.phi[(ix * nz + iz) * nt + it] = acc.real();
            im_worst[iw] = std::max(im_worst[iw], std::abs(acc.imag()));
        }
    });
    for (double v : tail_worst) out.tail_ratio = std::max(out.tail_ratio, v);
    for (double v : im_worst) out.im_residual = std::max(out.im_residual, v);
    if (out.tail_ratio > tail_tol)
        throw TailDecayError(out.tail_ratio, tail_tol);
    if (out.im_residual > im_tol)
        throw TailDecayError(out.im_residual, im_tol);
    return out;
}

}  // namespace cohilbert

#endif  // COHILBERT_PIPELINE_HPP
