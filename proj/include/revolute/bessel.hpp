#pragma once

// Bessel functions of the first kind for real order nu >= 0, their positive
// zeros, and the flat-disc reference spectrum derived from them.
//
// Evaluation strategy (long double internally):
//   - ascending power series while its terms cannot grow (x small, or
//     x^2 <= 4(nu+1) so the term ratio stays below one),
//   - Hankel asymptotic expansion once it bottoms out below 1e-15
//     (x >= max(18, nu^2/2 + 2)),
//   - Miller backward recurrence with the normalization
//     (x/2)^s = sum_k (s+2k) Gamma(s+k)/k! J_{s+2k}(x) in between.
// Declared range: nu <= 50, zeros up to n = 100.

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <vector>

#include "revolute/errors.hpp"
#include "revolute/numeric.hpp"

namespace revolute {

namespace detail {

inline long double bessel_series(long double nu, long double x) {
    const long double half = 0.5L * x;
    long double term = std::pow(half, nu) / std::tgamma(nu + 1.0L);
    long double sum = term;
    for (int m = 1; m < 500; ++m) {
        term *= -half * half / (static_cast<long double>(m) * (nu + m));
        sum += term;
        if (std::fabs(term) < 1e-22L * std::fabs(sum) + 1e-4000L) break;
    }
    return sum;
}

inline long double bessel_hankel(long double nu, long double x) {
    const long double mu = 4.0L * nu * nu;
    const long double eightx = 8.0L * x;
    // a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! (8x)^k); stop at the smallest term
    long double a = 1.0L;
    long double P = 1.0L, Q = 0.0L;
    long double prev = 1.0L;
    for (int k = 1; k < 64; ++k) {
        const long double odd = 2.0L * k - 1.0L;
        a *= (mu - odd * odd) / (static_cast<long double>(k) * eightx);
        if (std::fabs(a) > std::fabs(prev) && k > 4) break;
        prev = a;
        const int r = k % 4;
        if (r == 1) Q += a;
        else if (r == 2) P -= a;
        else if (r == 3) Q -= a;
        else P += a;
        if (std::fabs(a) < 1e-24L * (std::fabs(P) + std::fabs(Q))) break;
    }
    const long double chi = x - (0.5L * nu + 0.25L) * static_cast<long double>(kPi);
    return std::sqrt(2.0L / (static_cast<long double>(kPi) * x)) *
           (P * std::cos(chi) - Q * std::sin(chi));
}

inline long double bessel_miller(long double nu, long double x) {
    const long double nu0 = nu - std::floor(nu);
    const int offset = static_cast<int>(std::llround(static_cast<double>(nu - nu0)));
    const int start = static_cast<int>(std::ceil(std::max(1.15L * x + 25.0L, nu + 25.0L)));
    std::vector<long double> ladder(static_cast<std::size_t>(start) + 1, 0.0L);
    long double jp1 = 0.0L, j = 1e-290L;
    for (int m = start; m >= 0; --m) {
        const long double order = nu0 + m + 1.0L;
        const long double jm1 = (2.0L * order / x) * j - jp1;
        jp1 = j;
        j = jm1;
        ladder[static_cast<std::size_t>(m)] = j;
        if (std::fabs(j) > 1e280L) {
            for (int q = m; q <= start; ++q) ladder[static_cast<std::size_t>(q)] *= 1e-280L;
            j *= 1e-280L;
            jp1 *= 1e-280L;
        }
    }
    long double sum;
    long double target;
    if (nu0 < 1e-13L) {
        sum = ladder[0];
        for (int k = 1; 2 * k <= start; ++k) sum += 2.0L * ladder[static_cast<std::size_t>(2 * k)];
        target = 1.0L;
    } else {
        long double c = std::tgamma(nu0 + 1.0L);
        sum = c * ladder[0];
        for (int k = 1; 2 * k <= start; ++k) {
            c *= (nu0 + 2.0L * k) * (nu0 + k - 1.0L) / ((nu0 + 2.0L * k - 2.0L) * k);
            sum += c * ladder[static_cast<std::size_t>(2 * k)];
        }
        target = std::pow(0.5L * x, nu0);
    }
    return ladder[static_cast<std::size_t>(offset)] * target / sum;
}

} // namespace detail

/// J_nu(x) for nu >= 0, x >= 0.
inline double bessel_j(double nu, double x) {
    if (nu < 0.0 || x < 0.0) throw ParameterError("bessel_j: requires nu >= 0 and x >= 0");
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const long double lnu = nu, lx = x;
    if (lx <= 16.0L || lx * lx <= 4.0L * (lnu + 1.0L))
        return static_cast<double>(detail::bessel_series(lnu, lx));
    if (lx >= std::max(18.0L, 0.5L * lnu * lnu + 2.0L))
        return static_cast<double>(detail::bessel_hankel(lnu, lx));
    return static_cast<double>(detail::bessel_miller(lnu, lx));
}

/// dJ_nu/dx, via J_nu' = J_{nu-1} - (nu/x) J_nu (and -J_1 for nu = 0).
inline double bessel_j_derivative(double nu, double x) {
    if (nu == 0.0) return -bessel_j(1.0, x);
    if (x == 0.0) return nu == 1.0 ? 0.5 : 0.0;
    return bessel_j(nu - 1.0, x) - (nu / x) * bessel_j(nu, x);
}

namespace detail {

// McMahon expansion for j_{nu,n}; reliable once n is moderately larger than
// nu, used only as a cross-check and for scan-step sizing.
inline double mcmahon_zero(double nu, int n) {
    const double beta = (n + 0.5 * nu - 0.25) * kPi;
    const double mu = 4.0 * nu * nu;
    const double b8 = 8.0 * beta;
    return beta - (mu - 1.0) / b8 -
           4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 * b8 * b8);
}

// Zeros are found by a sign-change scan from the previous zero (gap between
// consecutive zeros exceeds 2.9 for every nu >= 0, so a step of pi/4 cannot
// skip one), then bisection and Newton polish. Scanning from below makes the
// index bookkeeping exact; the McMahon bracket alone loses the first zeros
// for large nu.
inline std::vector<double>& zero_cache(double nu, std::unique_lock<std::mutex>&) {
    static std::map<double, std::vector<double>> cache;
    return cache[nu];
}

inline std::mutex& zero_mutex() {
    static std::mutex m;
    return m;
}

inline double refine_zero(double nu, double lo, double hi) {
    double flo = bessel_j(nu, lo);
    for (int it = 0; it < 80 && (hi - lo) > 1e-14 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = bessel_j(nu, mid);
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double f = bessel_j(nu, x);
        const double fp = bessel_j_derivative(nu, x);
        if (fp == 0.0) break;
        const double step = f / fp;
        const double xn = x - step;
        if (xn <= lo - 1.0 || xn >= hi + 1.0) break;
        x = xn;
        if (std::abs(step) < 1e-15 * std::max(1.0, x)) break;
    }
    return x;
}

} // namespace detail

/// n-th positive zero j_{nu,n}, memoized per order; thread-safe.
inline double bessel_zero(double nu, int n) {
    if (nu < 0.0) throw ParameterError("bessel_zero: requires nu >= 0");
    if (n < 1) throw ParameterError("bessel_zero: requires n >= 1");
    std::unique_lock<std::mutex> lock(detail::zero_mutex());
    std::vector<double>& zeros = detail::zero_cache(nu, lock);
    if (static_cast<int>(zeros.size()) >= n) return zeros[static_cast<std::size_t>(n - 1)];

    const double step = 0.25 * kPi;
    double x = zeros.empty() ? std::max(nu, 1e-8) + 1e-6 : zeros.back() + 1e-6;
    double fx = bessel_j(nu, x);
    while (static_cast<int>(zeros.size()) < n) {
        double xn = x + step;
        double fn = bessel_j(nu, xn);
        if ((fx < 0.0) != (fn < 0.0)) {
            const double z = detail::refine_zero(nu, x, xn);
            zeros.push_back(z);
            // postcondition from the series: every positive zero exceeds nu
            if (z <= nu) throw ConditioningError("bessel_zero: zero below order, internal inconsistency");
            xn = z + 1e-6;
            fn = bessel_j(nu, xn);
        }
        x = xn;
        fx = fn;
    }
    return zeros[static_cast<std::size_t>(n - 1)];
}

/// lambda_{k,n} of the flat disc of radius R: (j_{k,n}/R)^2.
inline double disc_eigenvalue(double R, int k, int n) {
    if (R <= 0.0) throw ParameterError("disc_eigenvalue: requires R > 0");
    const double j = bessel_zero(static_cast<double>(k), n);
    return (j / R) * (j / R);
}

struct MuResult {
    double mu = 0.0; // K / sqrt(lambda_{K,N}(omega))
    double P = 0.0;  // R - mu
};

/// mu = K R / j_{K,N} and P = R - mu; mu < R always since j_{K,N} > K.
inline MuResult compute_mu(int K, int N, double R) {
    if (K < 0 || N < 1 || R <= 0.0) throw ParameterError("compute_mu: bad (K, N, R)");
    MuResult r;
    if (K == 0) {
        r.mu = 0.0;
        r.P = R;
        return r;
    }
    const double j = bessel_zero(static_cast<double>(K), N);
    r.mu = K * R / j;
    if (!(r.mu < R)) throw ConditioningError("compute_mu: mu < R violated, zero table inconsistent");
    r.P = R - r.mu;
    return r;
}

/// Largest root z0 of Phi_{K,N}(t) = J_K(j_{K,N} (R-t)/R) in (0, R);
/// z0 = R (1 - j_{K,N-1}/j_{K,N}) for N >= 2, and 0 for N = 1.
inline double largest_disc_root(int K, int N, double R) {
    if (K < 0 || N < 1 || R <= 0.0) throw ParameterError("largest_disc_root: bad (K, N, R)");
    if (N == 1) return 0.0;
    const double jN = bessel_zero(static_cast<double>(K), N);
    const double jNm1 = bessel_zero(static_cast<double>(K), N - 1);
    const double z0 = R * (1.0 - jNm1 / jN);
    if (K >= 1) {
        const double P = compute_mu(K, N, R).P;
        if (!(z0 < P)) throw ConditioningError("largest_disc_root: z0 < P violated");
    }
    return z0;
}

// Tabulated reference spectrum of the disc.
struct DiscReference {
    double R = 1.0;
    int k_max = 0;
    int n_max = 0;
    std::vector<std::vector<double>> zeros;  // zeros[k][n-1] = j_{k,n}
    std::vector<std::vector<double>> lambda; // lambda[k][n-1] = (j_{k,n}/R)^2

    double zero(int k, int n) const { return zeros[static_cast<std::size_t>(k)][static_cast<std::size_t>(n - 1)]; }
    double eigenvalue(int k, int n) const { return lambda[static_cast<std::size_t>(k)][static_cast<std::size_t>(n - 1)]; }
};

inline DiscReference build_disc_reference(double R, int k_max, int n_max) {
    if (R <= 0.0 || k_max < 0 || n_max < 1) throw ParameterError("build_disc_reference: bad arguments");
    DiscReference ref;
    ref.R = R;
    ref.k_max = k_max;
    ref.n_max = n_max;
    ref.zeros.resize(static_cast<std::size_t>(k_max) + 1);
    ref.lambda.resize(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) {
        for (int n = 1; n <= n_max; ++n) {
            const double j = bessel_zero(static_cast<double>(k), n);
            ref.zeros[static_cast<std::size_t>(k)].push_back(j);
            ref.lambda[static_cast<std::size_t>(k)].push_back((j / R) * (j / R));
        }
    }
    return ref;
}

} // namespace revolute
