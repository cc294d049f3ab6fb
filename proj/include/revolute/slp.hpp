#pragma once

// Weighted Sturm-Liouville eigenproblems on meridian curves. For angular
// mode k the quotient is
//
//     ( int |w'|^2 F/|psi'| + k^2 w^2 |psi'|/F ) / ( int w^2 F |psi'| )
//
// over trial functions vanishing at the left endpoint. Discretization: P1
// finite elements on the curve grid, exact integration of the linear-in-t
// weight for the F/|psi'| and F|psi'| terms, element-midpoint quadrature
// for the k^2/F potential except on the final element, where F vanishes
// linearly and int 1/F is integrated analytically.
//
// Axis condition: k = 0 keeps the last node active (natural), k >= 1 removes
// it (finite energy forces decay). The eigensolver brackets each eigenvalue
// of the tridiagonal pencil by Sturm-sequence inertia counts, so none in the
// requested range can be missed, then runs inverse iteration.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "revolute/errors.hpp"
#include "revolute/meridian.hpp"
#include "revolute/numeric.hpp"

namespace revolute {

enum class RightBc {
    axis,            // curve closes on the axis; natural for k = 0, essential for k >= 1
    neumann_interior // mixed problem: natural condition at an interior point, F > 0 there
};

struct ModeProblem {
    MeridianCurve curve;
    int k = 0;
    RightBc bc_right = RightBc::axis;

    // per-element coefficients at midpoints (diagnostic view of p, q, w)
    std::vector<double> p_elem; // F/|psi'|
    std::vector<double> q_elem; // k^2 |psi'| / F
    std::vector<double> w_elem; // F |psi'|

    // assembled symmetric tridiagonal forms on the active nodes
    std::vector<double> stiff_diag, stiff_off;
    std::vector<double> mass_diag, mass_off;
    std::size_t first_active = 1;   // node 0 carries the Dirichlet condition
    std::size_t active_count = 0;   // nodes first_active .. first_active+active_count-1

    bool last_node_active() const { return first_active + active_count == curve.samples(); }
};

struct Eigenpair {
    double lambda = 0.0;
    std::vector<double> phi; // full-grid node values, inactive nodes zero
    int n = 0;               // 1-based index
    int root_count = 0;      // strict sign changes in (a, b)
    double residual = 0.0;   // scaled ||S x - lambda M x||
};

/// Strict sign changes between consecutive nodes; values below
/// 1e-12 * max|phi| count as zero and are skipped.
inline int count_roots(const std::vector<double>& phi) {
    double amax = 0.0;
    for (double v : phi) amax = std::max(amax, std::abs(v));
    if (amax == 0.0) return 0;
    const double tol = 1e-12 * amax;
    int sign = 0, changes = 0;
    for (double v : phi) {
        if (std::abs(v) <= tol) continue;
        const int s = v > 0.0 ? 1 : -1;
        if (sign != 0 && s != sign) ++changes;
        sign = s;
    }
    return changes;
}

namespace detail {

struct Tridiag {
    std::vector<double> diag, off; // off[i] couples i and i+1
    std::size_t size() const { return diag.size(); }
};

// Number of eigenvalues of (S, M) strictly below sigma, by the inertia of
// S - sigma M via the LDL^T recurrence.
inline std::size_t inertia_below(const Tridiag& S, const Tridiag& M, double sigma) {
    const std::size_t n = S.size();
    std::size_t count = 0;
    const double pivmin = 1e-290;
    double d = S.diag[0] - sigma * M.diag[0];
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        const double e = S.off[i - 1] - sigma * M.off[i - 1];
        d = (S.diag[i] - sigma * M.diag[i]) - e * e / d;
        if (std::abs(d) < pivmin) d = -pivmin;
        if (d < 0.0) ++count;
    }
    return count;
}

// Tridiagonal LU with partial pivoting (one fill-in superdiagonal),
// following the classic dgttrf elimination order.
struct TriLU {
    std::vector<double> dl, d, du, du2;
    std::vector<int> piv; // 1 where rows i, i+1 were interchanged
    bool singular = false;
};

inline TriLU tri_factor(std::vector<double> dl, std::vector<double> d, std::vector<double> du) {
    const std::size_t n = d.size();
    TriLU lu;
    lu.du2.assign(n > 2 ? n - 2 : 0, 0.0);
    lu.piv.assign(n, 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) {
                lu.singular = true;
                d[i] = 1e-300;
            }
            const double fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            lu.piv[i] = 1;
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            const double tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - fact * d[i + 1];
            if (i + 2 < n) {
                lu.du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
        }
    }
    if (d[n - 1] == 0.0) {
        lu.singular = true;
        d[n - 1] = 1e-300;
    }
    lu.dl = std::move(dl);
    lu.d = std::move(d);
    lu.du = std::move(du);
    return lu;
}

inline void tri_solve(const TriLU& lu, std::vector<double>& x) {
    const std::size_t n = lu.d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (lu.piv[i] == 0) {
            x[i + 1] -= lu.dl[i] * x[i];
        } else {
            std::swap(x[i], x[i + 1]);
            x[i + 1] -= lu.dl[i] * x[i];
        }
    }
    x[n - 1] /= lu.d[n - 1];
    if (n >= 2) x[n - 2] = (x[n - 2] - lu.du[n - 2] * x[n - 1]) / lu.d[n - 2];
    for (std::size_t ii = n; ii >= 3; --ii) {
        const std::size_t i = ii - 3;
        double v = x[i] - lu.du[i] * x[i + 1];
        if (i < lu.du2.size()) v -= lu.du2[i] * x[i + 2];
        x[i] = v / lu.d[i];
    }
}

inline double mass_dot(const Tridiag& M, const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = M.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = M.diag[i] * y[i];
        if (i > 0) r += M.off[i - 1] * y[i - 1];
        if (i + 1 < n) r += M.off[i] * y[i + 1];
        s += x[i] * r;
    }
    return s;
}

inline void pencil_apply(const Tridiag& A, const std::vector<double>& x, std::vector<double>& out) {
    const std::size_t n = A.size();
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double r = A.diag[i] * x[i];
        if (i > 0) r += A.off[i - 1] * x[i - 1];
        if (i + 1 < n) r += A.off[i] * x[i + 1];
        out[i] = r;
    }
}

struct PencilEigen {
    double lambda = 0.0;
    std::vector<double> vec;
    double residual = 0.0;
};

// Bisection on inertia counts for eigenvalue #index (1-based), then inverse
// iteration; `previous` holds already-converged (lambda, vector) pairs, and
// vectors whose eigenvalue lands within the cluster tolerance are
// M-orthogonalized against.
inline PencilEigen pencil_eigen(const Tridiag& S, const Tridiag& M, std::size_t index,
                                double lo, double hi,
                                const std::vector<std::pair<double, const std::vector<double>*>>& previous) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (inertia_below(S, M, mid) >= index) hi = mid;
        else lo = mid;
        if (hi - lo <= 1e-14 * std::max(1.0, std::abs(hi))) break;
    }
    PencilEigen out;
    out.lambda = 0.5 * (lo + hi);

    std::vector<const std::vector<double>*> cluster;
    for (const auto& [lam, vec] : previous)
        if (std::abs(lam - out.lambda) <= 1e-8 * (std::abs(out.lambda) + 1.0))
            cluster.push_back(vec);

    const std::size_t n = S.size();
    std::vector<double> dl(n > 1 ? n - 1 : 0), dg(n), du(n > 1 ? n - 1 : 0);
    double shift = out.lambda;
    // a hair off the converged value keeps the factorization comfortably regular
    shift += 1e-13 * std::max(1.0, std::abs(shift));
    for (std::size_t i = 0; i < n; ++i) dg[i] = S.diag[i] - shift * M.diag[i];
    for (std::size_t i = 0; i + 1 < n; ++i) dl[i] = du[i] = S.off[i] - shift * M.off[i];
    TriLU lu = tri_factor(dl, dg, du);

    std::vector<double> x(n), mx(n);
    SplitMix64 rng(0x5eedull + 131ull * index);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
    for (int it = 0; it < 8; ++it) {
        for (const auto* prev : cluster) {
            const double c = mass_dot(M, *prev, x);
            for (std::size_t i = 0; i < n; ++i) x[i] -= c * (*prev)[i];
        }
        pencil_apply(M, x, mx);
        tri_solve(lu, mx);
        x.swap(mx);
        const double nrm = std::sqrt(std::max(mass_dot(M, x, x), 1e-300));
        for (double& v : x) v /= nrm;
        // converged when the residual is at rounding level
        pencil_apply(S, x, mx);
        std::vector<double> tmp;
        pencil_apply(M, x, tmp);
        double rnorm = 0.0, snorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = mx[i] - out.lambda * tmp[i];
            rnorm += r * r;
            snorm += mx[i] * mx[i] + out.lambda * out.lambda * tmp[i] * tmp[i];
        }
        out.residual = std::sqrt(rnorm) / std::sqrt(std::max(snorm, 1e-300));
        if (out.residual < 1e-13 && it >= 1) break;
    }
    // Rayleigh-quotient polish of the eigenvalue with the converged vector
    pencil_apply(S, x, mx);
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num += x[i] * mx[i];
    const double den = mass_dot(M, x, x);
    if (den > 0.0) {
        const double rq = num / den;
        if (std::abs(rq - out.lambda) <= 1e-8 * std::max(1.0, std::abs(out.lambda))) out.lambda = rq;
    }
    // deterministic sign: largest-magnitude entry positive
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(x[i]) > std::abs(x[imax])) imax = i;
    if (x[imax] < 0.0)
        for (double& v : x) v = -v;
    out.vec = std::move(x);
    return out;
}

} // namespace detail

/// Assemble the discrete forms for mode k on a curve. Throws SizeError on
/// tiny grids, GeometryError when F fails positivity/closure requirements,
/// and ConditioningError on zero-speed elements (collapse them with
/// resample_arclength first).
inline ModeProblem assemble(const MeridianCurve& curve, int k, RightBc bc_right = RightBc::axis) {
    if (k < 0) throw ParameterError("assemble: mode k must be >= 0");
    if (curve.samples() < 3) throw SizeError("assemble: grid needs at least 3 nodes");
    const std::size_t M = curve.elements();
    const double scale = std::max(std::abs(curve.boundary_radius()), 1e-300);
    for (std::size_t i = 0; i < M; ++i) {
        if (!(curve.F[i] > 0.0))
            throw GeometryError("assemble: F must be positive away from the axis endpoint");
        if (curve.speed(i) <= 1e-14)
            throw ConditioningError(
                "assemble: zero-speed element makes the mass form singular; "
                "apply resample_arclength first");
    }
    if (bc_right == RightBc::axis) {
        if (std::abs(curve.F.back()) > 1e-9 * scale)
            throw GeometryError("assemble: axis problem requires F(b) = 0");
    } else {
        if (!(curve.F.back() > 0.0))
            throw GeometryError("assemble: interior Neumann endpoint requires F > 0");
    }

    ModeProblem prob;
    prob.curve = curve;
    prob.k = k;
    prob.bc_right = bc_right;

    const std::size_t nn = curve.samples();
    std::vector<double> Sd(nn, 0.0), So(nn - 1, 0.0), Md(nn, 0.0), Mo(nn - 1, 0.0);
    prob.p_elem.resize(M);
    prob.q_elem.resize(M);
    prob.w_elem.resize(M);

    const double k2 = static_cast<double>(k) * static_cast<double>(k);
    for (std::size_t i = 0; i < M; ++i) {
        const double F0 = curve.F[i], F1 = curve.F[i + 1];
        const double s = curve.speed(i);
        const double hi = curve.h(i);
        const double Fmid = 0.5 * (F0 + F1);

        prob.p_elem[i] = Fmid / s;
        prob.w_elem[i] = Fmid * s;
        prob.q_elem[i] = (k > 0 && Fmid > 0.0) ? k2 * s / Fmid : 0.0;

        const double kst = Fmid / (hi * s);
        Sd[i] += kst;
        Sd[i + 1] += kst;
        So[i] -= kst;

        Md[i] += s * hi * (3.0 * F0 + F1) / 12.0;
        Md[i + 1] += s * hi * (F0 + 3.0 * F1) / 12.0;
        Mo[i] += s * hi * (F0 + F1) / 12.0;

        if (k > 0) {
            const bool final_axis_element = (i + 1 == M) && bc_right == RightBc::axis;
            if (final_axis_element) {
                // F vanishes linearly: int (hat_i)^2 / F dt = h / (2 F0), exact
                Sd[i] += k2 * s * hi / (2.0 * F0);
            } else {
                const double q = k2 * s / Fmid;
                Sd[i] += q * hi / 3.0;
                Sd[i + 1] += q * hi / 3.0;
                So[i] += q * hi / 6.0;
            }
        }
    }

    const bool drop_last = (k >= 1) && bc_right == RightBc::axis;
    prob.first_active = 1;
    prob.active_count = nn - 1 - (drop_last ? 1 : 0);
    const std::size_t lo = prob.first_active;
    const std::size_t cnt = prob.active_count;
    prob.stiff_diag.assign(Sd.begin() + lo, Sd.begin() + lo + cnt);
    prob.mass_diag.assign(Md.begin() + lo, Md.begin() + lo + cnt);
    prob.stiff_off.assign(So.begin() + lo, So.begin() + lo + cnt - 1);
    prob.mass_off.assign(Mo.begin() + lo, Mo.begin() + lo + cnt - 1);
    return prob;
}

/// First n_max eigenpairs, ascending; bracketing by inertia counts
/// guarantees none are skipped.
inline std::vector<Eigenpair> solve_modes(const ModeProblem& prob, int n_max) {
    if (n_max < 1) throw ParameterError("solve_modes: n_max must be >= 1");
    if (static_cast<std::size_t>(n_max) > prob.active_count - 1)
        throw SizeError("solve_modes: n_max exceeds active node count - 1");

    detail::Tridiag S{prob.stiff_diag, prob.stiff_off};
    detail::Tridiag M{prob.mass_diag, prob.mass_off};
    for (double m : prob.mass_diag)
        if (!(m > 0.0))
            throw ConditioningError("solve_modes: mass form not positive definite; "
                                    "collapse zero-speed intervals with resample_arclength");

    // expand an upper bracket until it holds n_max eigenvalues
    double hi = 1.0;
    for (int it = 0; it < 400 && detail::inertia_below(S, M, hi) < static_cast<std::size_t>(n_max); ++it)
        hi *= 8.0;

    std::vector<Eigenpair> out;
    std::vector<std::vector<double>> vectors;
    for (int n = 1; n <= n_max; ++n) {
        std::vector<std::pair<double, const std::vector<double>*>> previous;
        for (std::size_t j = 0; j < vectors.size(); ++j)
            previous.emplace_back(out[j].lambda, &vectors[j]);
        detail::PencilEigen pe =
            detail::pencil_eigen(S, M, static_cast<std::size_t>(n), 0.0, hi, previous);
        Eigenpair ep;
        ep.lambda = pe.lambda;
        ep.n = n;
        ep.residual = pe.residual;
        ep.phi.assign(prob.curve.samples(), 0.0);
        for (std::size_t i = 0; i < pe.vec.size(); ++i) ep.phi[prob.first_active + i] = pe.vec[i];
        ep.root_count = count_roots(ep.phi);
        if (ep.residual > 1e-8)
            throw ConditioningError("solve_modes: inverse iteration residual exceeds 1e-8");
        vectors.push_back(std::move(pe.vec));
        out.push_back(std::move(ep));
    }
    return out;
}

/// Rayleigh quotient of a trial vector (node values on the curve grid,
/// vanishing at a; also at b when k >= 1) with the assembly quadrature.
inline double rayleigh_quotient(const MeridianCurve& curve, int k, const std::vector<double>& trial) {
    if (trial.size() != curve.samples())
        throw ParameterError("rayleigh_quotient: trial must have one value per node");
    if (trial.front() != 0.0)
        throw ParameterError("rayleigh_quotient: trial must vanish at the left endpoint");
    if (k >= 1 && trial.back() != 0.0)
        throw ParameterError("rayleigh_quotient: finite energy requires trial(b) = 0 for k >= 1");
    const ModeProblem prob = assemble(curve, k);
    const std::size_t lo = prob.first_active, cnt = prob.active_count;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < cnt; ++i) {
        const double xi = trial[lo + i];
        num += prob.stiff_diag[i] * xi * xi;
        den += prob.mass_diag[i] * xi * xi;
        if (i + 1 < cnt) {
            num += 2.0 * prob.stiff_off[i] * xi * trial[lo + i + 1];
            den += 2.0 * prob.mass_off[i] * xi * trial[lo + i + 1];
        }
    }
    if (!(den > 1e-300)) throw DegenerateTrialError("rayleigh_quotient: trial has zero weighted norm");
    return num / den;
}

struct MixedResult {
    double Lambda = 0.0;
    Eigenpair pair;
};

/// Disc segment omega restricted to [z0, P] as a curve (F = R - t, G = 0).
inline MeridianCurve make_disc_segment(double R, double z0, double P, std::size_t samples) {
    if (!(z0 < P)) throw ParameterError("make_disc_segment: requires z0 < P");
    if (!(P < R)) throw ParameterError("make_disc_segment: requires P < R");
    std::vector<double> grid = make_grid(P - z0, samples);
    std::vector<double> t(grid.size()), F(grid.size()), G(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        t[i] = z0 + grid[i];
        F[i] = R - t[i];
    }
    CurveMeta meta;
    meta.family = "disc_segment";
    meta.params = {{"R", R}, {"z0", z0}, {"P", P}};
    return MeridianCurve::from_samples(std::move(t), std::move(F), std::move(G), meta);
}

/// Smallest eigenvalue Lambda of (omega u')' + (Lambda omega - K^2/omega) u = 0
/// on [z0, P] with u(z0) = 0 and u'(P) = 0; the curve must be the disc
/// segment.
inline MixedResult solve_mixed(const MeridianCurve& segment, int K) {
    if (K < 1) throw ParameterError("solve_mixed: requires K >= 1");
    if (!(segment.a() < segment.b())) throw ParameterError("solve_mixed: empty interval");
    const double R = segment.F.front() + segment.t.front();
    for (std::size_t i = 0; i < segment.samples(); ++i) {
        if (std::abs(segment.F[i] - (R - segment.t[i])) > 1e-9 * std::max(1.0, R) ||
            std::abs(segment.G[i]) > 1e-9 * std::max(1.0, R))
            throw GeometryError("solve_mixed: curve is not the disc segment");
    }
    const ModeProblem prob = assemble(segment, K, RightBc::neumann_interior);
    std::vector<Eigenpair> modes = solve_modes(prob, 1);
    MixedResult res;
    res.Lambda = modes[0].lambda;
    res.pair = std::move(modes[0]);
    return res;
}

} // namespace revolute
