// Lambda-parameterized kernels of the subsonic flow problem: the exponents
// d(lambda), r(lambda), the dispersion root sqrt(D), the layer kernel S, the
// boundary kernel R, and its regular part M = R + U/x.
//
// M is defined operationally through K1m(w) = K1(w) - 1/w:
//   R(x) = (lambda + U d) K0(c|x|) - U c sign(x) K1(c|x|),   c = r/sqrt(1-M^2)
//   M(x) = (lambda + U d) K0(c|x|) - U c sign(x) K1m(c|x|)
// so the Cauchy pole -U/x is removed analytically, never by numerical
// cancellation.  In the Bessel series regime the K0/K1m log terms are kept in
// split form, giving M(x) = A(x) + B(x) log|x| with analytic A, B; the
// Fredholm assembly uses that split to subtract the logarithmic singularity
// with its closed-form integrals.
#ifndef COHILBERT_FLOW_HPP
#define COHILBERT_FLOW_HPP

#include <cmath>
#include <stdexcept>

#include "bessel.hpp"

namespace cohilbert {

struct FlowParams {
    double a_inf;         // speed of sound (m/s)
    double mach;          // M in (0,1)
    double u_free;        // U = M * a_inf (m/s)
    double kutta_extent;  // A > 1, half-chords
    double sigma_a;       // minimal Laplace abscissa (1/s)
    double sigma1;        // strip bounds, sigma_a < sigma1 < sigma2 (1/s)
    double sigma2;

    void validate() const {
        if (!(a_inf > 0.0)) throw std::invalid_argument("flow: a_inf must be > 0");
        if (!(mach > 0.0 && mach < 1.0))
            throw std::invalid_argument("flow: need 0 < M < 1");
        if (std::fabs(u_free - mach * a_inf) > 1e-12 * std::fabs(u_free))
            throw std::invalid_argument("flow: U must equal M * a_inf");
        if (!(kutta_extent > 1.0))
            throw std::invalid_argument("flow: need A > 1");
        if (!(sigma_a > 0.0 && sigma_a < sigma1 && sigma1 < sigma2))
            throw std::invalid_argument("flow: need 0 < sigma_a < sigma1 < sigma2");
    }

    static FlowParams make(double a_inf, double mach, double kutta_extent,
                           double sigma_a, double sigma1, double sigma2) {
        FlowParams p{a_inf, mach, mach * a_inf, kutta_extent, sigma_a, sigma1,
                     sigma2};
        p.validate();
        return p;
    }

    double beta2() const { return 1.0 - mach * mach; }  // 1 - M^2
};

inline void require_spectral(const Cplx& lambda) {
    if (!(lambda.real() > 0.0))
        throw std::domain_error("spectral parameter needs Re lambda > 0");
}

inline Cplx d_lambda(const FlowParams& p, const Cplx& lambda) {
    return lambda * (p.mach * p.mach) / (p.u_free * p.beta2());
}

inline Cplx r_lambda(const FlowParams& p, const Cplx& lambda) {
    return lambda * p.mach / (p.u_free * std::sqrt(p.beta2()));
}

// Bessel-argument scale of R and M: c = r / sqrt(1-M^2) = lambda M / (U(1-M^2)).
inline Cplx c_lambda(const FlowParams& p, const Cplx& lambda) {
    return lambda * p.mach / (p.u_free * p.beta2());
}

// Branch of sqrt(D), D = M^2 (lambda/U + i omega)^2 + omega^2, with Re > 0.
// For Re lambda > 0 the value D avoids the negative real axis, so the
// principal square root already has positive real part; we assert it.
inline Cplx sqrt_D(const FlowParams& p, double omega, const Cplx& lambda) {
    require_spectral(lambda);
    const Cplx a = p.mach * (lambda / p.u_free + Cplx(0.0, omega));
    const Cplx D = a * a + omega * omega;
    const Cplx root = std::sqrt(D);
    if (!(root.real() > 0.0))
        throw std::logic_error("sqrt_D: branch with Re > 0 unavailable");
    return root;
}

// Layer kernel S(x,z,lambda) = -e^{d x}/sqrt(1-M^2) *
//                              K0(r * sqrt(x^2/(1-M^2) + z^2)).
inline Cplx s_kernel(const FlowParams& p, double x, double z,
                     const Cplx& lambda) {
    require_spectral(lambda);
    const double rho2 = x * x / p.beta2() + z * z;
    if (rho2 == 0.0)
        throw std::domain_error("s_kernel: singular at (x,z) = (0,0)");
    const Cplx arg = r_lambda(p, lambda) * std::sqrt(rho2);
    const BesselValue k = k0_checked(arg);
    if (k.underflowed) return Cplx(0.0, 0.0);
    return -std::exp(d_lambda(p, lambda) * x) / std::sqrt(p.beta2()) * k.value;
}

// Boundary kernel R(x,lambda); the |x| in the K0 argument makes the
// U d/dx K0 term carry sign(x).
inline Cplx r_kernel(const FlowParams& p, double x, const Cplx& lambda) {
    require_spectral(lambda);
    if (x == 0.0) throw std::domain_error("r_kernel: singular at x = 0");
    const Cplx c = c_lambda(p, lambda);
    const Cplx w = c * std::fabs(x);
    const double sgn = x > 0 ? 1.0 : -1.0;
    const Cplx coef = lambda + p.u_free * d_lambda(p, lambda);
    return coef * k0(w) - p.u_free * c * sgn * k1(w);
}

// Coefficient of log|x| in M near the origin (and of the log-subtraction
// used by the Fredholm assembly): -(lambda + U d(lambda)).
inline Cplx m_log_coeff(const FlowParams& p, const Cplx& lambda) {
    return -(lambda + p.u_free * d_lambda(p, lambda));
}

// Split M(x) = entire + log_factor * log|x| (series regime only).
struct MKernelSplit {
    Cplx entire;
    Cplx log_factor;
};

inline MKernelSplit m_kernel_split(const FlowParams& p, double x,
                                   const Cplx& lambda) {
    const Cplx c = c_lambda(p, lambda);
    const Cplx coef = lambda + p.u_free * d_lambda(p, lambda);
    const double ax = std::fabs(x), sgn = x >= 0 ? 1.0 : -1.0;
    const Cplx w = c * ax;
    const Cplx lc2 = std::log(0.5 * c);
    if (x == 0.0)  // limit of the entire part; log_factor is the x->0 limit
        return {coef * (-euler_gamma - lc2), -coef};
    const LogSplit s0 = k0_split(w);   // K0  = entire - log(w/2) I0
    const LogSplit s1 = k1m_split(w);  // K1m = entire + log(w/2) I1
    const Cplx B = -(coef * s0.log_factor + p.u_free * c * sgn * s1.log_factor);
    const Cplx A = coef * s0.entire - p.u_free * c * sgn * s1.entire + B * lc2;
    return {A, B};
}

// Regular part M(x,lambda) = R(x,lambda) + U/x, cancellation-free.
// At x = 0 the value is logarithmically singular; m_kernel_origin exposes the
// finite part together with a flag.
inline Cplx m_kernel(const FlowParams& p, double x, const Cplx& lambda) {
    require_spectral(lambda);
    if (x == 0.0)
        throw std::domain_error("m_kernel: log-singular at x = 0; "
                                "use m_kernel_origin for the finite part");
    const Cplx c = c_lambda(p, lambda);
    const Cplx w = c * std::fabs(x);
    if (std::abs(w) <= bessel_series_radius) {
        const MKernelSplit s = m_kernel_split(p, x, lambda);
        return s.entire + s.log_factor * std::log(std::fabs(x));
    }
    const double sgn = x > 0 ? 1.0 : -1.0;
    const Cplx coef = lambda + p.u_free * d_lambda(p, lambda);
    return coef * k0(w) - p.u_free * c * sgn * k1m(w);
}

struct MKernelOrigin {
    Cplx finite_part;
    bool log_singular = true;
};

inline MKernelOrigin m_kernel_origin(const FlowParams& p, const Cplx& lambda) {
    require_spectral(lambda);
    return {m_kernel_split(p, 0.0, lambda).entire, true};
}

}  // namespace cohilbert

#endif  // COHILBERT_FLOW_HPP
