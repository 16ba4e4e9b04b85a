// The singular-transform calculus: finite Hilbert transform T, its Tricomi
// inverse, the inversion maps Theta / Theta*, and the cofinite Hilbert
// transform P with its explicit inverse.
//
// Principal values are discretized by singularity subtraction with the exact
// subtracted integral added back:
//   - Chebyshev grids: subtract with the sqrt(1-y^2)-weighted numerator, whose
//     closed-form principal value PV int dy/((y-x) sqrt(1-y^2)) is zero.  This
//     stays accurate even when the data carries the Tricomi endpoint
//     singularity (the weighted numerator is then smooth).
//   - Legendre grids: subtract f(x) and add back (1/pi) ln((1-x)/(1+x)).
//
// The cofinite operators are evaluated through the conjugation identities
//   P(Theta f) = Theta(-T f)      and      P^{-1} f = -Theta T^{-1} Theta* f,
// so all principal values live on [-1,1]; a direct cofinite-rule path exists
// as a low-accuracy cross check.
#ifndef COHILBERT_TRANSFORMS_HPP
#define COHILBERT_TRANSFORMS_HPP

#include <cmath>
#include <stdexcept>

#include "quadrature.hpp"

namespace cohilbert {

namespace detail {

// PV sum  (1/n) * sum_j (V_j - Vx)/(t_j - x)  with the coincident-node term
// replaced by the interpolant derivative.  V is the weighted numerator on a
// Chebyshev grid; (pi/n)/pi = 1/n folds the transform's 1/pi prefactor.
inline Cplx chebyshev_pv_sum(const FiniteGrid& g, const std::vector<Cplx>& V,
                             Cplx Vx, double x) {
    const int n = g.size();
    Cplx s{};
    int hit = -1;
    for (int j = 0; j < n; ++j) {
        const double d = g.nodes[j] - x;
        if (std::fabs(d) < 1e-13) {
            hit = j;
            continue;
        }
        s += (V[j] - Vx) / d;
    }
    if (hit >= 0) {
        const auto bw = barycentric_weights(g);
        s += node_derivative(g, V, hit, bw);
    }
    return s / double(n);
}

}  // namespace detail

// (1/pi) PV int_{-1}^{1} f(y)/(y-x) dy
inline Cplx finite_hilbert(const FiniteFn& f, double x) {
    if (!(std::fabs(x) < 1.0))
        throw std::domain_error("finite_hilbert: need |x| < 1");
    const FiniteGrid& g = f.grid;
    const int n = g.size();
    if (g.kind == RuleKind::ChebyshevFirst) {
        std::vector<Cplx> V(n);
        for (int j = 0; j < n; ++j) V[j] = f.values[j] * g.sin_theta[j];
        const Cplx Vx = interpolate(g, V, x);
        return detail::chebyshev_pv_sum(g, V, Vx, x);
    }
    const Cplx fx = interpolate(g, f.values, x);
    Cplx s{};
    for (int j = 0; j < n; ++j) {
        const double d = g.nodes[j] - x;
        if (std::fabs(d) < 1e-13) continue;  // subtracted numerator vanishes
        s += g.dy_weight(j) * (f.values[j] - fx) / d;
    }
    return s / M_PI + fx * std::log((1.0 - x) / (1.0 + x)) / M_PI;
}

// Tricomi inverse: -(1/pi) int sqrt((1-y^2)/(1-x^2)) g(y)/(y-x) dy.
// Requires a Chebyshev grid (the weight is absorbed by the rule).
inline Cplx finite_hilbert_inverse(const FiniteFn& f, double x) {
    if (!(std::fabs(x) < 1.0))
        throw std::domain_error("finite_hilbert_inverse: need |x| < 1");
    if (f.grid.kind != RuleKind::ChebyshevFirst)
        throw std::invalid_argument(
            "finite_hilbert_inverse: Chebyshev grid required");
    const FiniteGrid& g = f.grid;
    const int n = g.size();
    std::vector<Cplx> W(n);
    for (int j = 0; j < n; ++j)
        W[j] = f.values[j] * (g.sin_theta[j] * g.sin_theta[j]);
    const Cplx Wx = interpolate(g, W, x);
    const Cplx pv = detail::chebyshev_pv_sum(g, W, Wx, x);
    return -M_PI * pv / (M_PI * std::sqrt((1.0 - x) * (1.0 + x)));
}

// Theta[f](x) = (1/x) f(1/x): transport values to the inverted grid.
inline CofiniteFn theta(const FiniteFn& f) {
    CofiniteFn r{make_cofinite(f.grid), {}};
    const int n = f.grid.size();
    r.values.resize(n);
    for (int i = 0; i < n; ++i) r.values[i] = f.grid.nodes[i] * f.values[i];
    return r;
}

// Theta*[h](t) = (1/t) h(1/t): exact inverse of theta, back onto the source.
inline FiniteFn theta_star(const CofiniteFn& h) {
    if (h.grid.source.size() != h.grid.size())
        throw std::invalid_argument("theta_star: cofinite grid has no source");
    FiniteFn r{h.grid.source, {}};
    const int n = h.grid.size();
    r.values.resize(n);
    for (int i = 0; i < n; ++i)
        r.values[i] = h.values[i] / h.grid.source.nodes[i];
    return r;
}

// Heuristic decay check: values at the outermost nodes of each branch should
// fall at least as fast as 1/|y|.
inline bool cofinite_decay_slow(const CofiniteFn& h) {
    const int n = h.grid.size();
    if (n < 4) return false;
    // index 0 pairs with the most negative t, so node 0 is the x just
    // below -1 and node n-1 just above +1; the extreme |x| sit at the
    // middle indices (t near 0).
    int lo = -1, hi = -1;  // outermost node of each branch
    for (int i = 0; i < n; ++i) {
        const double x = h.grid.nodes[i];
        if (x < 0 && (lo < 0 || x < h.grid.nodes[lo])) lo = i;
        if (x > 0 && (hi < 0 || x > h.grid.nodes[hi])) hi = i;
    }
    // step toward the branch interior: t more negative (index-1) on the left
    // branch, t more positive (index+1) on the right branch
    auto slow = [&](int outer, int dir) {
        const int next = outer + dir;
        if (next < 0 || next >= n) return false;
        const double a = std::abs(h.values[outer]) * std::fabs(h.grid.nodes[outer]);
        const double b = std::abs(h.values[next]) * std::fabs(h.grid.nodes[next]);
        return a > b * (1.0 + 1e-9) && a > 1e-13;
    };
    return slow(lo, -1) || slow(hi, +1);
}

// (1/pi) PV int_{|y|>1} h(y)/(y-x) dy, via the conjugation diagram.
inline Cplx cofinite_hilbert(const CofiniteFn& h, double x,
                             bool* slow_decay_warning = nullptr) {
    if (!(std::fabs(x) > 1.0))
        throw std::domain_error("cofinite_hilbert: need |x| > 1");
    if (slow_decay_warning) *slow_decay_warning = cofinite_decay_slow(h);
    const FiniteFn pre = theta_star(h);
    return -finite_hilbert(pre, 1.0 / x) / x;
}

// Direct cofinite rule (no subtraction; x must sit between nodes).  Low
// accuracy by design; cross-check path only.
inline Cplx cofinite_hilbert_direct(const CofiniteFn& h, double x) {
    if (!(std::fabs(x) > 1.0))
        throw std::domain_error("cofinite_hilbert_direct: need |x| > 1");
    Cplx s{};
    for (int i = 0; i < h.grid.size(); ++i) {
        const double d = h.grid.nodes[i] - x;
        if (std::fabs(d) < 1e-12)
            throw std::invalid_argument(
                "cofinite_hilbert_direct: x collides with a node");
        s += h.grid.weights[i] * h.values[i] / d;
    }
    return s / M_PI;
}

// P^{-1}[f](x) = -Theta T^{-1} Theta*[f](x) (+ optional multiple of the
// homogeneous solution).  The annihilated function is sign(x)/sqrt(x^2-1):
// it is the Theta-image of the classical 1/sqrt(1-t^2) kernel of T, and a
// direct principal-value quadrature confirms P maps it to zero while the
// unsigned 1/sqrt(x^2-1) is not annihilated.
inline double homogeneous_solution(double x) {
    return (x > 0 ? 1.0 : -1.0) / std::sqrt(x * x - 1.0);
}

inline Cplx cofinite_hilbert_inverse(const CofiniteFn& f, double x,
                                     double homogeneous_c = 0.0) {
    if (!(std::fabs(x) > 1.0))
        throw std::domain_error("cofinite_hilbert_inverse: need |x| > 1");
    const FiniteFn q = theta_star(f);
    Cplx v = -finite_hilbert_inverse(q, 1.0 / x) / x;
    if (homogeneous_c != 0.0) v += homogeneous_c * homogeneous_solution(x);
    return v;
}

// Weighted norm (int |x|^{p-2} |f|^p dx)^{1/p} over |x| > 1, computed by the
// change of variables that makes it an ordinary L^p norm on [-1,1].
inline double weighted_lp_norm(const CofiniteFn& f, double p) {
    if (!(p > 1.0 && p <= 2.0))
        throw std::domain_error("weighted_lp_norm: need p in (1,2]");
    const FiniteGrid& src = f.grid.source;
    double s = 0.0;
    for (int i = 0; i < f.grid.size(); ++i) {
        const double q = std::abs(f.values[i] / src.nodes[i]);  // |Theta* f|
        s += src.dy_weight(i) * std::pow(q, p);
    }
    return std::pow(s, 1.0 / p);
}

}  // namespace cohilbert

#endif  // COHILBERT_TRANSFORMS_HPP
