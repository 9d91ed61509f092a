#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tarski/cert.hpp"
#include "tarski/core.hpp"
#include "tarski/ring.hpp"
#include "tarski/setview.hpp"

namespace tarski {

// Exact rational point on the unit circle.
struct CirclePoint {
    Rat x, y;

    CirclePoint(Rat px, Rat py) : x(std::move(px)), y(std::move(py)) {
        if (x * x + y * y != 1)
            throw precondition_error("CirclePoint: (" + x.str() + "," + y.str() +
                                     ") is off the unit circle");
    }

    friend bool operator==(const CirclePoint& u, const CirclePoint& v) {
        return u.x == v.x && u.y == v.y;
    }
    friend bool operator!=(const CirclePoint& u, const CirclePoint& v) { return !(u == v); }

    std::string str() const { return "(" + x.str() + "," + y.str() + ")"; }
    nlohmann::json to_json() const { return nlohmann::json::array({x.str(), y.str()}); }
};

inline bool point_less(const CirclePoint& u, const CirclePoint& v) {
    if (u.x != v.x) return u.x < v.x;
    return u.y < v.y;
}
inline std::string describe(const CirclePoint& p) { return p.str(); }

// Rotation of the plane by the matrix [[c,-s],[s,c]] with exact rational
// entries on the unit circle; closed under composition and inverse.
struct PlaneRotation {
    Rat c, s;

    PlaneRotation(Rat pc, Rat ps) : c(std::move(pc)), s(std::move(ps)) {
        if (c * c + s * s != 1)
            throw precondition_error("PlaneRotation: (" + c.str() + "," + s.str() +
                                     ") is not orthogonal");
    }

    static PlaneRotation identity() { return {1, 0}; }

    CirclePoint apply(const CirclePoint& p) const {
        return {c * p.x - s * p.y, s * p.x + c * p.y};
    }
    PlaneRotation inverse() const { return {c, -s}; }

    friend PlaneRotation operator*(const PlaneRotation& g, const PlaneRotation& h) {
        return {g.c * h.c - g.s * h.s, g.s * h.c + g.c * h.s};
    }
    friend bool operator==(const PlaneRotation& g, const PlaneRotation& h) {
        return g.c == h.c && g.s == h.s;
    }
    friend bool operator!=(const PlaneRotation& g, const PlaneRotation& h) { return !(g == h); }

    std::string str() const { return "(" + c.str() + "," + s.str() + ")"; }
};

inline CirclePoint motion_apply(const PlaneRotation& g, const CirclePoint& p) {
    return g.apply(p);
}
inline PlaneRotation motion_compose(const PlaneRotation& g, const PlaneRotation& h) {
    return g * h;
}
inline PlaneRotation motion_invert(const PlaneRotation& g) { return g.inverse(); }
inline nlohmann::json motion_to_json(const PlaneRotation& g) {
    return nlohmann::json::array({g.c.str(), g.s.str()});
}

// Candidate rotations (a/h, b/h) from primitive Pythagorean triples.
inline const std::vector<PlaneRotation>& pythagorean_pool() {
    static const std::vector<PlaneRotation> pool = [] {
        const int t[][3] = {{3, 4, 5},   {5, 12, 13},  {8, 15, 17},  {7, 24, 25},
                            {20, 21, 29}, {9, 40, 41}, {12, 35, 37}, {28, 45, 53}};
        std::vector<PlaneRotation> out;
        for (const auto& [a, b, h] : t) out.emplace_back(Rat(a, h), Rat(b, h));
        return out;
    }();
    return pool;
}

// Axis rotation candidate (cos, sin) = (p/3^e, q*sqrt2/3^e). Each is the
// square of a Z[sqrt2 i] integer of norm 3^e, so p^2 + 2q^2 = 9^e and the
// matrix entries stay in the ring.
struct AxisCandidate {
    std::int64_t p;
    std::int64_t q;
    std::uint32_t e;

    std::string str() const {
        return "(" + std::to_string(p) + "+" + std::to_string(q) + "r2)/3^" + std::to_string(e);
    }
};

inline const std::vector<AxisCandidate>& axis_candidate_pool() {
    static const std::vector<AxisCandidate> pool = {{-1, 2, 1},   {-7, 4, 2},   {23, 10, 3},
                                                    {17, 56, 4},  {-241, 22, 5}, {329, 460, 6}};
    return pool;
}

// Block-diagonal rotation by the candidate angle about a coordinate axis.
inline Mat3E axis_rotation(int axis, const AxisCandidate& cand) {
    if (axis < 0 || axis > 2) throw precondition_error("axis_rotation: axis must be 0, 1 or 2");
    RingScalar c(Int(cand.p), 0, 0, cand.e);
    RingScalar s(0, Int(cand.q), 0, cand.e);
    const int i = (axis + 1) % 3, j = (axis + 2) % 3;
    Mat3E r;
    r.at(axis, axis) = 1;
    r.at(i, i) = c;
    r.at(i, j) = -s;
    r.at(j, i) = s;
    r.at(j, j) = c;
    return r;
}

namespace detail {

// Low 64 bits in two's complement. A ring homomorphism Z -> Z/2^64: distinct
// shadows certify distinct integers, so equality tests can be screened in
// machine words and only shadow matches need the exact comparison.
inline std::uint64_t shadow64(const Int& v) {
    static const Int two64 = Int(1) << 64;
    Int m = v % two64;
    if (m < 0) m += two64;
    return m.convert_to<std::uint64_t>();
}

// Orbit state (X, Y)/D on the circle, unreduced exact integers plus shadows.
struct CircleTrack {
    Int x, y, d;
    std::uint64_t sx, sy, sd;

    static CircleTrack of(const CirclePoint& p) {
        const Int xn = boost::multiprecision::numerator(p.x);
        const Int xd = boost::multiprecision::denominator(p.x);
        const Int yn = boost::multiprecision::numerator(p.y);
        const Int yd = boost::multiprecision::denominator(p.y);
        CircleTrack t{xn * yd, yn * xd, xd * yd, 0, 0, 0};
        t.reshadow();
        return t;
    }

    void reshadow() {
        sx = shadow64(x);
        sy = shadow64(y);
        sd = shadow64(d);
    }

    void step(const Int& cn, const Int& sn, const Int& h, std::uint64_t scn, std::uint64_t ssn,
              std::uint64_t sh) {
        Int nx = cn * x - sn * y;
        Int ny = sn * x + cn * y;
        x = std::move(nx);
        y = std::move(ny);
        d *= h;
        std::uint64_t tx = scn * sx - ssn * sy;
        std::uint64_t ty = ssn * sx + scn * sy;
        sx = tx;
        sy = ty;
        sd *= sh;
    }

    bool shadow_equal(const CircleTrack& t) const {
        return sx * t.sd == t.sx * sd && sy * t.sd == t.sy * sd;
    }
    bool exact_equal(const CircleTrack& t) const {
        return x * t.d == t.x * d && y * t.d == t.y * d;
    }
};

// First step 1 <= n <= horizon with tau^n(p) back in pts for some p, else 0.
inline int circle_collision_step(const PlaneRotation& tau, const std::vector<CirclePoint>& pts,
                                 int horizon, std::string* where) {
    const Int cd = boost::multiprecision::denominator(tau.c);
    const Int sd = boost::multiprecision::denominator(tau.s);
    Int h = boost::multiprecision::lcm(cd, sd);
    Int cn = boost::multiprecision::numerator(tau.c) * (h / cd);
    Int sn = boost::multiprecision::numerator(tau.s) * (h / sd);
    const std::uint64_t scn = shadow64(cn), ssn = shadow64(sn), sh = shadow64(h);

    std::vector<CircleTrack> targets;
    targets.reserve(pts.size());
    for (const CirclePoint& p : pts) targets.push_back(CircleTrack::of(p));

    for (std::size_t i = 0; i < pts.size(); ++i) {
        CircleTrack orbit = targets[i];
        for (int n = 1; n <= horizon; ++n) {
            orbit.step(cn, sn, h, scn, ssn, sh);
            for (std::size_t j = 0; j < targets.size(); ++j) {
                if (!orbit.shadow_equal(targets[j])) continue;
                if (!orbit.exact_equal(targets[j])) continue;
                if (where) *where = describe(pts[j]) + " = tau^" + std::to_string(n) + "(" +
                                    describe(pts[i]) + ")";
                return n;
            }
        }
    }
    return 0;
}

// Orbit state ((P_i + Q_i sqrt2))/D on the sphere, unreduced plus shadows.
struct SphereTrack {
    std::array<Int, 3> p, q;
    Int d;
    std::array<std::uint64_t, 3> sp, sq;
    std::uint64_t sd;

    static SphereTrack of(const Vec3E& v) {
        const std::array<const RingScalar*, 3> c = {&v.x, &v.y, &v.z};
        std::uint32_t a = 0, b = 0;
        for (const auto* r : c) {
            a = std::max(a, r->a());
            b = std::max(b, r->b());
        }
        SphereTrack t;
        for (int i = 0; i < 3; ++i) {
            const Int scale = pow2(a - c[i]->a()) * pow3(b - c[i]->b());
            t.p[i] = c[i]->p() * scale;
            t.q[i] = c[i]->q() * scale;
        }
        t.d = pow2(a) * pow3(b);
        t.reshadow();
        return t;
    }

    void reshadow() {
        for (int i = 0; i < 3; ++i) {
            sp[i] = shadow64(p[i]);
            sq[i] = shadow64(q[i]);
        }
        sd = shadow64(d);
    }

    // One application of the axis rotation (cp/3^e, cq*sqrt2/3^e): the plane
    // pair (i, j) turns, the axis coordinate and denominator pick up 3^e.
    void step(int axis, const Int& cp, const Int& cq, const Int& m, std::uint64_t scp,
              std::uint64_t scq, std::uint64_t sm) {
        const int i = (axis + 1) % 3, j = (axis + 2) % 3;
        Int pi = cp * p[i] - 2 * cq * q[j];
        Int qi = cp * q[i] - cq * p[j];
        Int pj = 2 * cq * q[i] + cp * p[j];
        Int qj = cq * p[i] + cp * q[j];
        p[i] = std::move(pi);
        q[i] = std::move(qi);
        p[j] = std::move(pj);
        q[j] = std::move(qj);
        p[axis] *= m;
        q[axis] *= m;
        d *= m;
        std::uint64_t tpi = scp * sp[i] - 2 * scq * sq[j];
        std::uint64_t tqi = scp * sq[i] - scq * sp[j];
        std::uint64_t tpj = 2 * scq * sq[i] + scp * sp[j];
        std::uint64_t tqj = scq * sp[i] + scp * sq[j];
        sp[i] = tpi;
        sq[i] = tqi;
        sp[j] = tpj;
        sq[j] = tqj;
        sp[axis] *= sm;
        sq[axis] *= sm;
        sd *= sm;
    }

    bool shadow_equal(const SphereTrack& t) const {
        for (int i = 0; i < 3; ++i) {
            if (sp[i] * t.sd != t.sp[i] * sd) return false;
            if (sq[i] * t.sd != t.sq[i] * sd) return false;
        }
        return true;
    }
    bool exact_equal(const SphereTrack& t) const {
        for (int i = 0; i < 3; ++i) {
            if (p[i] * t.d != t.p[i] * d) return false;
            if (q[i] * t.d != t.q[i] * d) return false;
        }
        return true;
    }
};

inline int sphere_collision_step(int axis, const AxisCandidate& cand,
                                 const std::vector<Vec3E>& pts, int horizon,
                                 std::string* where) {
    const Int cp(cand.p), cq(cand.q), m = pow3(cand.e);
    const std::uint64_t scp = shadow64(cp), scq = shadow64(cq), sm = shadow64(m);

    std::vector<SphereTrack> targets;
    targets.reserve(pts.size());
    for (const Vec3E& p : pts) targets.push_back(SphereTrack::of(p));

    for (std::size_t i = 0; i < pts.size(); ++i) {
        SphereTrack orbit = targets[i];
        for (int n = 1; n <= horizon; ++n) {
            orbit.step(axis, cp, cq, m, scp, scq, sm);
            for (std::size_t j = 0; j < targets.size(); ++j) {
                if (!orbit.shadow_equal(targets[j])) continue;
                if (!orbit.exact_equal(targets[j])) continue;
                if (where) *where = describe(pts[j]) + " = omega^" + std::to_string(n) + "(" +
                                    describe(pts[i]) + ")";
                return n;
            }
        }
    }
    return 0;
}

}  // namespace detail

// First candidate rotation whose orbit keeps P off itself for 1 <= n <= N,
// verified exactly. pool_limit restricts how many candidates are tried
// (0 means the whole pool).
inline PlaneRotation find_avoiding_rotation(const std::vector<CirclePoint>& pts, int horizon,
                                            std::size_t pool_limit = 0) {
    if (horizon < 0) throw precondition_error("find_avoiding_rotation: negative horizon");
    const auto& pool = pythagorean_pool();
    const std::size_t tried = pool_limit == 0 ? pool.size() : std::min(pool_limit, pool.size());
    std::string failures;
    for (std::size_t i = 0; i < tried; ++i) {
        std::string where;
        const int hit = detail::circle_collision_step(pool[i], pts, horizon, &where);
        if (hit == 0) return pool[i];
        if (!failures.empty()) failures += "; ";
        failures += pool[i].str() + " fails at n=" + std::to_string(hit) + " with " + where;
    }
    throw precondition_error("find_avoiding_rotation: candidate pool exhausted: " + failures);
}

// Exact rotation about the first coordinate axis whose poles avoid P, taken
// from the candidate pool, with omega^n(P) disjoint from P for 1 <= n <= N.
inline Mat3E find_avoiding_axis_rotation(const std::vector<Vec3E>& pts, int horizon,
                                         std::size_t pool_limit = 0) {
    if (horizon < 0) throw precondition_error("find_avoiding_axis_rotation: negative horizon");
    for (const Vec3E& p : pts)
        if (norm_sq(p) != RingScalar(1))
            throw precondition_error("find_avoiding_axis_rotation: point off the unit sphere: " +
                                     describe(p));

    int axis = -1;
    for (int k : {2, 0, 1}) {
        Vec3E pole = Vec3E::zero();
        (k == 0 ? pole.x : k == 1 ? pole.y : pole.z) = 1;
        const Vec3E neg = -pole;
        bool hit = false;
        for (const Vec3E& p : pts)
            if (p == pole || p == neg) {
                hit = true;
                break;
            }
        if (!hit) {
            axis = k;
            break;
        }
    }
    if (axis < 0)
        throw precondition_error("find_avoiding_axis_rotation: every coordinate axis meets P");

    const auto& pool = axis_candidate_pool();
    const std::size_t tried = pool_limit == 0 ? pool.size() : std::min(pool_limit, pool.size());
    std::string failures;
    for (std::size_t i = 0; i < tried; ++i) {
        std::string where;
        const int hit = detail::sphere_collision_step(axis, pool[i], pts, horizon, &where);
        if (hit == 0) return axis_rotation(axis, pool[i]);
        if (!failures.empty()) failures += "; ";
        failures += pool[i].str() + " fails at n=" + std::to_string(hit) + " with " + where;
    }
    throw precondition_error("find_avoiding_axis_rotation: candidate pool exhausted: " +
                             failures);
}

// Truncated absorber Q_N = union of motion^n(P) for 0 <= n <= N. Generations
// are pairwise disjoint, so motion(Q_{N-1}) = Q_N \ P and |Q_N| = (N+1)|P|.
template <class P, class M>
struct AbsorberTrunc {
    std::vector<P> seed;
    M motion;
    int depth = 0;
    std::vector<std::vector<P>> generations;
    std::vector<P> points;

    bool member(const P& x) const {
        return std::binary_search(points.begin(), points.end(), x, detail::pt_less<P>);
    }

    // Generations 0..m flattened and sorted; empty for m < 0.
    std::vector<P> up_to(int m) const {
        std::vector<P> out;
        for (int i = 0; i <= std::min(m, depth); ++i)
            out.insert(out.end(), generations[i].begin(), generations[i].end());
        detail::sort_unique(out);
        return out;
    }

    std::size_t size() const { return points.size(); }
};

template <class P, class M>
AbsorberTrunc<P, M> build_absorber(std::vector<P> pts, const M& motion, int n) {
    if (n < 0) throw precondition_error("build_absorber: negative truncation depth");
    detail::sort_unique(pts);
    AbsorberTrunc<P, M> out{std::move(pts), motion, n, {}, {}};
    out.generations.reserve(static_cast<std::size_t>(n) + 1);
    out.generations.push_back(out.seed);
    for (int i = 1; i <= n; ++i) {
        std::vector<P> gen;
        gen.reserve(out.seed.size());
        for (const P& x : out.generations.back()) gen.push_back(motion_apply(motion, x));
        out.generations.push_back(std::move(gen));
    }

    std::vector<std::pair<P, int>> tagged;
    tagged.reserve(out.seed.size() * (static_cast<std::size_t>(n) + 1));
    for (int i = 0; i <= n; ++i)
        for (const P& x : out.generations[i]) tagged.emplace_back(x, i);
    std::sort(tagged.begin(), tagged.end(), [](const auto& a, const auto& b) {
        if (detail::pt_less<P>(a.first, b.first)) return true;
        if (detail::pt_less<P>(b.first, a.first)) return false;
        return a.second < b.second;
    });
    for (std::size_t i = 1; i < tagged.size(); ++i)
        if (!detail::pt_less<P>(tagged[i - 1].first, tagged[i].first))
            throw precondition_error(
                "build_absorber: generations " + std::to_string(tagged[i - 1].second) + " and " +
                std::to_string(tagged[i].second) + " collide at " +
                detail::pt_describe(tagged[i].first));

    out.points.reserve(tagged.size());
    for (auto& tp : tagged) out.points.push_back(std::move(tp.first));
    return out;
}

// Conjugate of the sphere absorber shifting the ball's origin: with u the
// absorbed seed, r = T(-u/2) . rho . T(u/2) moves N = Q/2 - u/2 onto N \ {0}.
struct BallOriginAbsorber {
    IsometryE r;
    AbsorberTrunc<Vec3E, IsometryE> n_trunc;
};

inline BallOriginAbsorber ball_absorb_origin(const AbsorberTrunc<Vec3E, Mat3E>& q,
                                             const Mat3E& rho) {
    const Vec3E u{1, 0, 0};
    if (!is_rotation(rho)) throw precondition_error("ball_absorb_origin: rho is not a rotation");
    if (q.seed.size() != 1 || !(q.seed.front() == u))
        throw precondition_error("ball_absorb_origin: absorber seed must be {(1,0,0)}");

    std::vector<Vec3E> shifted;
    for (const Vec3E& x : q.up_to(q.depth - 1)) shifted.push_back(rho * x);
    detail::sort_unique(shifted);
    std::vector<Vec3E> rest;
    for (const Vec3E& x : q.points)
        if (!(x == u)) rest.push_back(x);
    if (shifted != rest)
        throw precondition_error(
            "ball_absorb_origin: rho does not shift the absorber onto Q\\{u}");

    const Vec3E hu = RingScalar::half() * u;
    const IsometryE r = compose(IsometryE::translate(-hu),
                                compose(IsometryE::rotation(rho), IsometryE::translate(hu)));

    BallOriginAbsorber out;
    out.r = r;
    out.n_trunc.motion = r;
    out.n_trunc.depth = q.depth;
    for (const auto& gen : q.generations) {
        std::vector<Vec3E> row;
        row.reserve(gen.size());
        for (const Vec3E& x : gen) row.push_back(RingScalar::half() * x - hu);
        out.n_trunc.generations.push_back(std::move(row));
    }
    out.n_trunc.seed = out.n_trunc.generations.front();
    std::vector<Vec3E> all;
    for (const auto& gen : out.n_trunc.generations) all.insert(all.end(), gen.begin(), gen.end());
    detail::sort_unique(all);
    out.n_trunc.points = std::move(all);
    return out;
}

inline SetView<Vec3E> unit_sphere_view() {
    return SetView<Vec3E>::lazy_membership(
        "unit-sphere", [](const Vec3E& v) { return norm_sq(v) == RingScalar(1); });
}

// Lazy view of a truncated absorber; enumeration by generation index.
template <class M>
SetView<Vec3E> absorber_view(std::shared_ptr<const AbsorberTrunc<Vec3E, M>> trunc) {
    return SetView<Vec3E>::lazy(
        "absorber", [trunc](const Vec3E& x) { return trunc->member(x); },
        [trunc](int d) { return trunc->up_to(std::min(d, trunc->depth)); },
        nlohmann::json{{"seed", trunc->seed.size()}, {"depth", trunc->depth}});
}

// Equidecomposition of the sphere with a finite set removed: the absorber
// piece turns by omega, the complement stays put. Verification is relative
// to the truncation depth.
inline EquidecompositionCert<Vec3E, Mat3E> sphere_minus_countable_cert(
    const std::vector<Vec3E>& pts, int depth) {
    if (depth < 0) throw precondition_error("sphere_minus_countable_cert: negative depth");
    for (const Vec3E& p : pts)
        if (norm_sq(p) != RingScalar(1))
            throw precondition_error("sphere_minus_countable_cert: point off the unit sphere: " +
                                     describe(p));
    if (pts.empty()) return identity_cert(unit_sphere_view(), Mat3E::identity());

    const Mat3E omega = find_avoiding_axis_rotation(pts, depth);
    auto trunc = std::make_shared<const AbsorberTrunc<Vec3E, Mat3E>>(
        build_absorber(pts, omega, depth));
    return absorb(SetView<Vec3E>::explicit_set(pts), absorber_view(trunc), omega,
                  unit_sphere_view(), depth);
}

}  // namespace tarski
