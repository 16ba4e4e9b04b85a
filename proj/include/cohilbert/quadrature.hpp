// Quadrature grids on [-1,1] and their images under the inversion x = 1/t,
// plus grid functions and barycentric interpolation.
//
// Two rules are supported:
//   - Gauss-Chebyshev (first kind): natural measure dy/sqrt(1-y^2), weight pi/n
//     at every node.  This is the workhorse grid: it absorbs the Tricomi weight
//     and, pushed through x = 1/t, the sqrt(x^2-1) weight on |x| > 1.
//   - Gauss-Legendre: natural measure dy, used where integrands are smooth.
//
// Grid weights stored here are the natural weights of the rule's own measure;
// integrate_dy() converts to a plain dy-integral.
#ifndef COHILBERT_QUADRATURE_HPP
#define COHILBERT_QUADRATURE_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace cohilbert {

using Cplx = std::complex<double>;

enum class RuleKind { ChebyshevFirst, GaussLegendre };

struct FiniteGrid {
    RuleKind kind = RuleKind::ChebyshevFirst;
    std::vector<double> nodes;      // strictly increasing, inside (-1,1)
    std::vector<double> weights;    // natural weights w.r.t. the rule's measure
    std::vector<double> sin_theta;  // sqrt(1 - node^2), computed stably

    int size() const { return int(nodes.size()); }

    // weight for integrating against plain dy
    double dy_weight(int i) const {
        return kind == RuleKind::ChebyshevFirst ? weights[i] * sin_theta[i]
                                                : weights[i];
    }

    template <class T>
    T integrate_dy(const std::vector<T>& vals) const {
        T s{};
        for (int i = 0; i < size(); ++i) s += dy_weight(i) * vals[i];
        return s;
    }

    static FiniteGrid chebyshev(int n);
    static FiniteGrid legendre(int n);
};

inline FiniteGrid FiniteGrid::chebyshev(int n) {
    if (n < 2) throw std::invalid_argument("chebyshev grid needs n >= 2");
    FiniteGrid g;
    g.kind = RuleKind::ChebyshevFirst;
    g.nodes.resize(n);
    g.weights.assign(n, M_PI / n);
    g.sin_theta.resize(n);
    for (int i = 0; i < n; ++i) {
        const double th = (2.0 * i + 1.0) * M_PI / (2.0 * n);
        g.nodes[i] = -std::cos(th);  // ascending order
        g.sin_theta[i] = std::sin(th);
    }
    return g;
}

inline FiniteGrid FiniteGrid::legendre(int n) {
    if (n < 2) throw std::invalid_argument("legendre grid needs n >= 2");
    FiniteGrid g;
    g.kind = RuleKind::GaussLegendre;
    g.nodes.resize(n);
    g.weights.resize(n);
    g.sin_theta.resize(n);
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        g.nodes[i] = -x;
        g.nodes[n - 1 - i] = x;
        g.weights[i] = g.weights[n - 1 - i] = w;
    }
    if (n % 2) g.nodes[n / 2] = 0.0;  // exact symmetry
    for (int i = 0; i < n; ++i)
        g.sin_theta[i] = std::sqrt((1.0 - g.nodes[i]) * (1.0 + g.nodes[i]));
    return g;
}

// Image of a FiniteGrid under x = 1/t.  Node order stays index-aligned with
// the source grid (so values transported through Theta keep their index); the
// nodes therefore form two branches, x < -1 for t < 0 and x > 1 for t > 0.
struct CofiniteGrid {
    FiniteGrid source;
    std::vector<double> nodes;    // 1 / source.nodes[i]
    std::vector<double> weights;  // plain dy-weights on |x| > 1

    int size() const { return int(nodes.size()); }

    template <class T>
    T integrate_dy(const std::vector<T>& vals) const {
        T s{};
        for (int i = 0; i < size(); ++i) s += weights[i] * vals[i];
        return s;
    }
};

inline CofiniteGrid make_cofinite(FiniteGrid src) {
    CofiniteGrid g;
    const int n = src.size();
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double t = src.nodes[i];
        if (t == 0.0)
            throw std::invalid_argument("cofinite grid: source node at 0");
        g.nodes[i] = 1.0 / t;
        g.weights[i] = src.dy_weight(i) / (t * t);
    }
    g.source = std::move(src);
    return g;
}

// Function values sampled on a grid.
struct FiniteFn {
    FiniteGrid grid;
    std::vector<Cplx> values;
};

struct CofiniteFn {
    CofiniteGrid grid;
    std::vector<Cplx> values;
};

template <class F>
FiniteFn sample(const FiniteGrid& g, F&& f) {
    FiniteFn r{g, {}};
    r.values.reserve(g.size());
    for (double t : g.nodes) r.values.push_back(Cplx(f(t)));
    return r;
}

template <class F>
CofiniteFn sample(const CofiniteGrid& g, F&& f) {
    CofiniteFn r{g, {}};
    r.values.reserve(g.size());
    for (double x : g.nodes) r.values.push_back(Cplx(f(x)));
    return r;
}

// Barycentric weights: closed form for Chebyshev-1 nodes, log-scaled products
// for anything else (avoids underflow at large n).
inline std::vector<double> barycentric_weights(const FiniteGrid& g) {
    const int n = g.size();
    std::vector<double> w(n);
    if (g.kind == RuleKind::ChebyshevFirst) {
        for (int i = 0; i < n; ++i)
            w[i] = (i % 2 ? -1.0 : 1.0) * g.sin_theta[i];
        return w;
    }
    std::vector<double> lw(n, 0.0);
    double lmax = -1e300;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (j != i) lw[i] -= std::log(std::fabs(g.nodes[i] - g.nodes[j]));
        lmax = std::max(lmax, lw[i]);
    }
    for (int i = 0; i < n; ++i)
        w[i] = ((n - 1 - i) % 2 ? -1.0 : 1.0) * std::exp(lw[i] - lmax);
    return w;
}

// Barycentric interpolation of arbitrary nodal data; exact at the nodes.
inline Cplx interpolate(const FiniteGrid& g, const std::vector<Cplx>& vals,
                        double x) {
    const int n = g.size();
    const auto bw = barycentric_weights(g);
    Cplx num{}, den{};
    for (int i = 0; i < n; ++i) {
        const double d = x - g.nodes[i];
        if (std::fabs(d) < 1e-14) return vals[i];
        const double c = bw[i] / d;
        num += c * vals[i];
        den += c;
    }
    return num / den;
}

// Derivative of the interpolant at node i (differentiation-matrix row).
inline Cplx node_derivative(const FiniteGrid& g, const std::vector<Cplx>& vals,
                            int i, const std::vector<double>& bw) {
    Cplx s{};
    for (int j = 0; j < g.size(); ++j)
        if (j != i)
            s += (bw[j] / bw[i]) * (vals[j] - vals[i]) /
                 (g.nodes[i] - g.nodes[j]);
    return s;
}

}  // namespace cohilbert

#endif  // COHILBERT_QUADRATURE_HPP
