#pragma once

// Meridian curves psi = (F, G) : [a,b] -> closed half-plane, stored as
// piecewise-linear samples. F is the distance to the axis of revolution,
// G the axial coordinate. A valid meridian starts at (R, 0), keeps F > 0
// on the interior and closes on the axis with F(b) = 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "revolute/errors.hpp"
#include "revolute/numeric.hpp"

namespace revolute {

struct CurveMeta {
    std::string family = "sampled";
    std::map<std::string, double> params;
    std::string note;
};

class MeridianCurve {
  public:
    std::vector<double> t; // strictly increasing parameter samples
    std::vector<double> F; // radial coordinate per sample
    std::vector<double> G; // axial coordinate per sample
    CurveMeta meta;

    MeridianCurve() = default;

    static MeridianCurve from_samples(std::vector<double> t, std::vector<double> F,
                                      std::vector<double> G, CurveMeta meta = {}) {
        MeridianCurve c;
        c.t = std::move(t);
        c.F = std::move(F);
        c.G = std::move(G);
        c.meta = std::move(meta);
        c.check_structure();
        c.rebuild_speed();
        return c;
    }

    std::size_t samples() const { return t.size(); }
    std::size_t elements() const { return t.empty() ? 0 : t.size() - 1; }

    double a() const { return t.front(); }
    double b() const { return t.back(); }
    double boundary_radius() const { return F.front(); }

    double h(std::size_t i) const { return t[i + 1] - t[i]; }

    // |psi'| on element i (piecewise-linear reconstruction has constant
    // speed per element).
    double speed(std::size_t i) const { return speed_[i]; }
    const std::vector<double>& element_speeds() const { return speed_; }

    double total_length() const { return length_; }

    // cumulative arclength at node i
    double arclength(std::size_t i) const { return cumlen_[i]; }
    const std::vector<double>& cumulative_length() const { return cumlen_; }

    bool has_zero_speed_element(double tol = 0.0) const {
        for (double s : speed_)
            if (s <= tol) return true;
        return false;
    }

    // Point on the polyline at cumulative arclength s (clamped to range).
    std::pair<double, double> point_at_arclength(double s) const {
        if (s <= cumlen_.front()) return {F.front(), G.front()};
        if (s >= cumlen_.back()) return {F.back(), G.back()};
        auto it = std::upper_bound(cumlen_.begin(), cumlen_.end(), s);
        std::size_t i = static_cast<std::size_t>(it - cumlen_.begin()) - 1;
        const double seg = cumlen_[i + 1] - cumlen_[i];
        if (seg <= 0.0) return {F[i], G[i]};
        const double w = (s - cumlen_[i]) / seg;
        return {F[i] + w * (F[i + 1] - F[i]), G[i] + w * (G[i + 1] - G[i])};
    }

    // Linear interpolation of F in the parameter t.
    double F_at(double tq) const { return interp(F, tq); }
    double G_at(double tq) const { return interp(G, tq); }

    // Curve with one extra node at tq (no-op if a node is already within tol).
    MeridianCurve with_node(double tq, double tol = 1e-12) const {
        const double scale = std::max(1.0, std::abs(b() - a()));
        for (double tv : t)
            if (std::abs(tv - tq) <= tol * scale) return *this;
        if (tq < a() || tq > b()) throw ParameterError("with_node: parameter outside curve domain");
        MeridianCurve c;
        c.meta = meta;
        c.t.reserve(t.size() + 1);
        c.F.reserve(t.size() + 1);
        c.G.reserve(t.size() + 1);
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i > 0 && t[i - 1] < tq && tq < t[i]) {
                c.t.push_back(tq);
                c.F.push_back(F_at(tq));
                c.G.push_back(G_at(tq));
            }
            c.t.push_back(t[i]);
            c.F.push_back(F[i]);
            c.G.push_back(G[i]);
        }
        c.check_structure();
        c.rebuild_speed();
        return c;
    }

    // Midpoint refinement (every element bisected); spaces nest, which the
    // Rayleigh-Ritz monotonicity tests rely on.
    MeridianCurve refined() const {
        MeridianCurve c;
        c.meta = meta;
        c.t.reserve(2 * t.size());
        c.F.reserve(2 * t.size());
        c.G.reserve(2 * t.size());
        for (std::size_t i = 0; i + 1 < t.size(); ++i) {
            c.t.push_back(t[i]);
            c.F.push_back(F[i]);
            c.G.push_back(G[i]);
            c.t.push_back(0.5 * (t[i] + t[i + 1]));
            c.F.push_back(0.5 * (F[i] + F[i + 1]));
            c.G.push_back(0.5 * (G[i] + G[i + 1]));
        }
        c.t.push_back(t.back());
        c.F.push_back(F.back());
        c.G.push_back(G.back());
        c.check_structure();
        c.rebuild_speed();
        return c;
    }

    void rebuild_speed() {
        speed_.assign(elements(), 0.0);
        cumlen_.assign(samples(), 0.0);
        for (std::size_t i = 0; i + 1 < samples(); ++i) {
            const double len = std::hypot(F[i + 1] - F[i], G[i + 1] - G[i]);
            speed_[i] = len / (t[i + 1] - t[i]);
            cumlen_[i + 1] = cumlen_[i] + len;
        }
        length_ = cumlen_.empty() ? 0.0 : cumlen_.back();
    }

  private:
    std::vector<double> speed_;
    std::vector<double> cumlen_;
    double length_ = 0.0;

    void check_structure() const {
        if (t.size() < 2) throw SizeError("MeridianCurve: needs at least 2 samples");
        if (F.size() != t.size() || G.size() != t.size())
            throw SizeError("MeridianCurve: t, F, G must have equal length");
        for (std::size_t i = 0; i + 1 < t.size(); ++i)
            if (!(t[i] < t[i + 1])) throw GeometryError("MeridianCurve: parameter samples must be strictly increasing");
        for (std::size_t i = 0; i < t.size(); ++i)
            if (!std::isfinite(t[i]) || !std::isfinite(F[i]) || !std::isfinite(G[i]))
                throw GeometryError("MeridianCurve: non-finite sample");
    }

    double interp(const std::vector<double>& v, double tq) const {
        if (tq <= t.front()) return v.front();
        if (tq >= t.back()) return v.back();
        auto it = std::upper_bound(t.begin(), t.end(), tq);
        std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
        const double w = (tq - t[i]) / (t[i + 1] - t[i]);
        return v[i] + w * (v[i + 1] - v[i]);
    }
};

// ---------------------------------------------------------------------------
// grids

// Parameter grid on [0, L] with M = samples-1 elements. Small grids stay
// uniform; larger ones protect the axis endpoint, where the k^2/F potential
// blows up, with ceil(0.1 M) elements on the last 1% of the interval whose
// sizes decay at ratio 0.9 down to a floor of 0.9^22 of the entry size.
inline std::vector<double> make_grid(double L, std::size_t samples) {
    if (samples < 2) throw SizeError("make_grid: needs at least 2 samples");
    if (!(L > 0.0)) throw GeometryError("make_grid: needs positive length");
    const std::size_t M = samples - 1;
    std::vector<double> g(samples);
    if (M < 64) {
        for (std::size_t i = 0; i < samples; ++i)
            g[i] = L * static_cast<double>(i) / static_cast<double>(M);
        g.back() = L;
        return g;
    }
    const std::size_t m = (M + 9) / 10; // ceil(0.1 M) tail elements
    const std::size_t Mc = M - m;
    const double T = 0.01 * L;
    double decay_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) decay_sum += std::pow(0.9, static_cast<double>(std::min<std::size_t>(j, 22)));
    const double u = T / decay_sum;
    for (std::size_t i = 0; i <= Mc; ++i)
        g[i] = (L - T) * static_cast<double>(i) / static_cast<double>(Mc);
    double pos = L - T;
    for (std::size_t j = 0; j < m; ++j) {
        pos += u * std::pow(0.9, static_cast<double>(std::min<std::size_t>(j, 22)));
        g[Mc + 1 + j] = pos;
    }
    g.back() = L;
    return g;
}

// ---------------------------------------------------------------------------
// families

enum class FamilyKind { disc, spherical_cap, cone, bumped_disc, sampled };

struct CurveFamily {
    FamilyKind kind = FamilyKind::disc;
    std::map<std::string, double> params;

    double param(const std::string& name, double fallback) const {
        auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    }
    bool has(const std::string& name) const { return params.count(name) > 0; }
};

inline const char* family_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::disc: return "disc";
        case FamilyKind::spherical_cap: return "spherical_cap";
        case FamilyKind::cone: return "cone";
        case FamilyKind::bumped_disc: return "bumped_disc";
        case FamilyKind::sampled: return "sampled";
    }
    return "?";
}

inline FamilyKind family_from_name(const std::string& name) {
    if (name == "disc") return FamilyKind::disc;
    if (name == "spherical_cap") return FamilyKind::spherical_cap;
    if (name == "cone") return FamilyKind::cone;
    if (name == "bumped_disc") return FamilyKind::bumped_disc;
    if (name == "sampled") return FamilyKind::sampled;
    throw ParameterError("unknown curve family: " + name);
}

MeridianCurve resample_arclength(const MeridianCurve& curve, std::size_t samples);

namespace detail {

// C-infinity bump, 1 at the center, support |y| < 1.
inline double smooth_bump(double y) {
    const double y2 = y * y;
    if (y2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - y2));
}

} // namespace detail

/// Generate a family member as an arclength-parametrized sampled curve.
inline MeridianCurve build_family(const CurveFamily& family, std::size_t samples) {
    if (samples < 2) throw SizeError("build_family: needs at least 2 samples");
    const double R = family.param("R", 1.0);
    if (!(R > 0.0)) throw ParameterError("build_family: requires R > 0");

    CurveMeta meta;
    meta.family = family_name(family.kind);
    meta.params = family.params;
    meta.params["R"] = R;

    switch (family.kind) {
        case FamilyKind::disc: {
            std::vector<double> t = make_grid(R, samples);
            std::vector<double> F(samples), G(samples, 0.0);
            for (std::size_t i = 0; i < samples; ++i) F[i] = R - t[i];
            F.back() = 0.0;
            return MeridianCurve::from_samples(std::move(t), std::move(F), std::move(G), meta);
        }
        case FamilyKind::spherical_cap: {
            const double angle = family.param("angle", 0.5 * kPi);
            if (!(angle > 0.0 && angle < kPi))
                throw ParameterError("build_family: cap angle must lie in (0, pi)");
            meta.params["angle"] = angle;
            const double rs = R / std::sin(angle); // sphere radius
            const double L = rs * angle;
            std::vector<double> t = make_grid(L, samples);
            std::vector<double> F(samples), G(samples);
            for (std::size_t i = 0; i < samples; ++i) {
                const double phi = angle - t[i] / rs;
                F[i] = rs * std::sin(phi);
                G[i] = rs * (std::cos(phi) - std::cos(angle));
            }
            F.back() = 0.0;
            G.front() = 0.0;
            return MeridianCurve::from_samples(std::move(t), std::move(F), std::move(G), meta);
        }
        case FamilyKind::cone: {
            const double L = family.param("L", 2.0 * R);
            if (!(L >= R)) throw ParameterError("build_family: cone slant must satisfy L >= R");
            meta.params["L"] = L;
            const double slope = R / L;
            const double rise = std::sqrt(std::max(0.0, 1.0 - slope * slope));
            std::vector<double> t = make_grid(L, samples);
            std::vector<double> F(samples), G(samples);
            for (std::size_t i = 0; i < samples; ++i) {
                F[i] = R - slope * t[i];
                G[i] = rise * t[i];
            }
            F.back() = 0.0;
            return MeridianCurve::from_samples(std::move(t), std::move(F), std::move(G), meta);
        }
        case FamilyKind::bumped_disc: {
            double amplitude = family.param("amplitude", 0.3);
            double position = family.param("position", 0.4 * R);
            double width = family.param("width", 0.15 * R);
            if (family.has("seed")) {
                detail::SplitMix64 rng(static_cast<std::uint64_t>(family.param("seed", 0.0)) * 0x9e37u + 11u);
                amplitude = rng.uniform(0.15, 0.9);
                position = rng.uniform(0.15, 0.65) * R;
                width = rng.uniform(0.08, 0.2) * R;
            }
            if (!(amplitude >= 0.0)) throw ParameterError("build_family: bump amplitude must be >= 0");
            if (!(width > 0.0)) throw ParameterError("build_family: bump width must be > 0");
            if (!(position - width > 0.0 && position + width < R))
                throw ParameterError("build_family: bump support must lie inside (0, R)");
            meta.params["amplitude"] = amplitude;
            meta.params["position"] = position;
            meta.params["width"] = width;
            // G' = amplitude * bump((t - position)/width) on the flat profile
            // F = R - t, then renormalize to arclength.
            const std::size_t dense = std::max<std::size_t>(4 * samples, 4096) + 1;
            std::vector<double> td(dense), Fd(dense), Gd(dense);
            const double ht = R / static_cast<double>(dense - 1);
            double acc = 0.0;
            double gprev = amplitude * detail::smooth_bump((0.0 - position) / width);
            for (std::size_t i = 0; i < dense; ++i) {
                td[i] = ht * static_cast<double>(i);
                Fd[i] = R - td[i];
                const double g = amplitude * detail::smooth_bump((td[i] - position) / width);
                if (i > 0) acc += 0.5 * (gprev + g) * ht;
                gprev = g;
                Gd[i] = acc;
            }
            Fd.back() = 0.0;
            for (std::size_t i = 1; i < dense; ++i)
                if (!(Fd[i - 1] > 0.0) && i + 1 < dense)
                    throw GeometryError("build_family: bump drives F <= 0 in the interior");
            MeridianCurve raw = MeridianCurve::from_samples(std::move(td), std::move(Fd), std::move(Gd), meta);
            MeridianCurve out = resample_arclength(raw, samples);
            out.meta = meta;
            return out;
        }
        case FamilyKind::sampled:
            throw ParameterError("build_family: 'sampled' curves come from data, not a generator");
    }
    throw ParameterError("build_family: unknown family");
}

// ---------------------------------------------------------------------------
// validation

struct ValidationCheck {
    std::string name;
    bool pass = false;
    std::ptrdiff_t witness = -1; // sample or element index; -1 when not applicable
    double value = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass = false;
    bool lipschitz_ok = false;        // everything except regularity/transversality
    double regularity_constant = 0.0; // min element speed
    double endpoint_slope = 0.0;      // one-sided F'(b)
};

// Transversality needs strict negativity; this numeric threshold makes it
// testable on a grid.
inline constexpr double kTransversalitySlopeTol = -1e-6;

/// Diagnostic invariant report; never throws.
inline ValidationReport validate(const MeridianCurve& curve) {
    ValidationReport rep;
    const std::size_t M = curve.samples() - 1;
    const double R = curve.boundary_radius();
    const double scale = std::max(std::abs(R), 1e-300);

    auto add = [&rep](ValidationCheck c) { rep.checks.push_back(std::move(c)); };

    {
        ValidationCheck c{"grid_strictly_increasing", true, -1, 0.0, ""};
        for (std::size_t i = 0; i + 1 <= M; ++i)
            if (!(curve.t[i] < curve.t[i + 1])) {
                c.pass = false;
                c.witness = static_cast<std::ptrdiff_t>(i);
                break;
            }
        add(c);
    }
    {
        ValidationCheck c{"starts_at_boundary", true, 0, curve.G.front(), ""};
        if (std::abs(curve.G.front()) > 1e-12 * scale) {
            c.pass = false;
            c.detail = "G(a) must vanish";
        }
        add(c);
    }
    {
        ValidationCheck c{"F_positive_interior", true, -1, 0.0, ""};
        for (std::size_t i = 0; i < M; ++i)
            if (!(curve.F[i] > 0.0)) {
                c.pass = false;
                c.witness = static_cast<std::ptrdiff_t>(i);
                c.value = curve.F[i];
                break;
            }
        add(c);
    }
    {
        ValidationCheck c{"axis_closure", std::abs(curve.F.back()) <= 1e-9 * scale,
                          static_cast<std::ptrdiff_t>(M), curve.F.back(), ""};
        if (!c.pass) c.detail = "F(b) must vanish";
        add(c);
    }
    {
        ValidationCheck c{"regularity", true, -1, 0.0, ""};
        double cmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < M; ++i) {
            if (curve.speed(i) < cmin) cmin = curve.speed(i);
            if (curve.speed(i) <= 1e-12 && c.pass) {
                c.pass = false;
                c.witness = static_cast<std::ptrdiff_t>(i);
                c.detail = "zero-speed element";
            }
        }
        c.value = cmin;
        rep.regularity_constant = cmin;
        add(c);
    }
    {
        const double slope = (curve.F[M] - curve.F[M - 1]) / (curve.t[M] - curve.t[M - 1]);
        rep.endpoint_slope = slope;
        ValidationCheck c{"transversality", slope < kTransversalitySlopeTol,
                          static_cast<std::ptrdiff_t>(M - 1), slope, ""};
        if (!c.pass) c.detail = "one-sided F'(b) not negative enough";
        add(c);
    }

    rep.all_pass = true;
    rep.lipschitz_ok = true;
    for (const auto& c : rep.checks) {
        if (!c.pass) rep.all_pass = false;
        if (!c.pass && c.name != "regularity" && c.name != "transversality") rep.lipschitz_ok = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// arclength reparametrization

namespace detail {

// Resample at given cumulative-arclength positions, always keeping the
// original vertices; the output polyline is geometrically identical to the
// input, so total length is preserved exactly and zero-speed parameter
// intervals collapse to single points.
inline MeridianCurve resample_at(const MeridianCurve& curve, std::vector<double> targets) {
    const double L = curve.total_length();
    if (!(L > 0.0)) throw GeometryError("resample: curve has zero length");
    const auto& cum = curve.cumulative_length();
    targets.insert(targets.end(), cum.begin(), cum.end());
    std::sort(targets.begin(), targets.end());
    const double tol = 1e-13 * L;
    std::vector<double> s;
    s.reserve(targets.size());
    for (double v : targets) {
        v = std::clamp(v, 0.0, L);
        if (s.empty() || v - s.back() > tol) s.push_back(v);
    }
    if (L - s.back() <= tol) s.back() = L;
    else s.push_back(L);
    s.front() = 0.0;

    MeridianCurve out;
    out.meta = curve.meta;
    out.t = s;
    out.F.resize(s.size());
    out.G.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        auto [f, g] = curve.point_at_arclength(s[i]);
        out.F[i] = f;
        out.G[i] = g;
    }
    out.F.back() = curve.F.back();
    out.G.back() = curve.G.back();
    out.F.front() = curve.F.front();
    out.G.front() = curve.G.front();
    out.rebuild_speed();
    return out;
}

} // namespace detail

/// Reparametrize by arclength on a fresh grid of the requested size
/// (original vertices are kept, so length is preserved bit-for-bit).
inline MeridianCurve resample_arclength(const MeridianCurve& curve, std::size_t samples) {
    if (samples < 2) throw SizeError("resample_arclength: needs at least 2 samples");
    const double L = curve.total_length();
    if (!(L > 0.0)) throw GeometryError("resample_arclength: curve has zero length");
    MeridianCurve out = detail::resample_at(curve, make_grid(L, samples));
    out.meta.note = "arclength";
    return out;
}

} // namespace revolute
