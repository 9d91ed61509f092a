#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tarski/rotation.hpp"
#include "tarski/setview.hpp"

namespace tarski {

// Point ((p0+q0*sqrt2), (p1+q1*sqrt2), (p2+q2*sqrt2)) / 3^k on the unit
// sphere. This widens SphereTriple: triples embed with q = (0, b, 0), and
// rational points like (1,2,2)/3 exist here but not among triples. That
// matters for orbits: every triple lies a few letters away from a rotation
// axis (so no triple base is relation-free much beyond its own k), while
// rational bases certify to useful depths.
struct SpherePoint {
    std::array<Int, 3> p{};
    std::array<Int, 3> q{};
    std::uint32_t k = 0;

    static SpherePoint default_base() { return {{1, 2, 2}, {0, 0, 0}, 1}; }

    static SpherePoint from_triple(const SphereTriple& t) {
        return {{t.a, 0, t.c}, {0, t.b, 0}, t.k};
    }

    bool on_sphere() const {
        Int norm = 0, cross = 0;
        for (int i = 0; i < 3; ++i) {
            norm += p[i] * p[i] + 2 * q[i] * q[i];
            cross += p[i] * q[i];
        }
        return norm == pow_int(9, k) && cross == 0;
    }

    Vec3E to_vec() const {
        return {RingScalar(p[0], q[0], 0, k), RingScalar(p[1], q[1], 0, k),
                RingScalar(p[2], q[2], 0, k)};
    }

    // Same point, smallest k; point equality is equality of canonical forms.
    SpherePoint canonical() const {
        auto div3 = [](const std::array<Int, 3>& v) {
            return v[0] % 3 == 0 && v[1] % 3 == 0 && v[2] % 3 == 0;
        };
        SpherePoint t = *this;
        while (t.k > 0 && div3(t.p) && div3(t.q)) {
            for (int i = 0; i < 3; ++i) {
                t.p[i] /= 3;
                t.q[i] /= 3;
            }
            --t.k;
        }
        return t;
    }

    friend bool operator==(const SpherePoint& u, const SpherePoint& v) {
        SpherePoint cu = u.canonical(), cv = v.canonical();
        return cu.p == cv.p && cu.q == cv.q && cu.k == cv.k;
    }
    friend bool operator!=(const SpherePoint& u, const SpherePoint& v) { return !(u == v); }

    std::string str() const {
        auto coord = [](const Int& pc, const Int& qc) { return pc.str() + "+" + qc.str() + "r2"; };
        return "(" + coord(p[0], q[0]) + "," + coord(p[1], q[1]) + "," + coord(p[2], q[2]) +
               ")/3^" + std::to_string(k);
    }

    nlohmann::json to_json() const {
        return {{"p", {p[0].str(), p[1].str(), p[2].str()}},
                {"q", {q[0].str(), q[1].str(), q[2].str()}},
                {"k", k}};
    }
};

inline bool point_less(const SpherePoint& u, const SpherePoint& v) {
    SpherePoint cu = u.canonical(), cv = v.canonical();
    for (int i = 0; i < 3; ++i) {
        if (cu.p[i] != cv.p[i]) return cu.p[i] < cv.p[i];
        if (cu.q[i] != cv.q[i]) return cu.q[i] < cv.q[i];
    }
    return cu.k < cv.k;
}
inline std::string describe(const SpherePoint& t) { return t.str(); }

// Integer form of one rotation step; k goes up by one. Coordinates i, j turn
// by the same (1/3, +-2*sqrt2/3) rotation as in letter_matrix; with q = (0,b,0)
// this reduces to the SphereTriple recurrences.
inline SpherePoint apply_letter(Letter l, const SpherePoint& t) {
    SpherePoint r = t;
    r.k = t.k + 1;
    const int i = l.gen == Gen::sigma ? 0 : 1;
    const int j = i + 1;
    const int o = l.gen == Gen::sigma ? 2 : 0;
    const Int s = l.inverse ? -1 : 1;
    r.p[i] = t.p[i] - s * 4 * t.q[j];
    r.q[i] = t.q[i] - s * 2 * t.p[j];
    r.p[j] = t.p[j] + s * 4 * t.q[i];
    r.q[j] = t.q[j] + s * 2 * t.p[i];
    r.p[o] = 3 * t.p[o];
    r.q[o] = 3 * t.q[o];
    return r;
}

// Rotation action of a word, canonicalized. This is the motion interface for
// certificates over orbit point sets; letters act right to left.
inline SpherePoint motion_apply(const Word& w, const SpherePoint& x) {
    SpherePoint t = x;
    for (std::size_t i = w.length(); i-- > 0;) t = apply_letter(w.at(i), t);
    return t.canonical();
}

// True iff no nonempty reduced word of length <= depth fixes the base point.
// A word of length l scales the raw denominator by 3^l, so fixing the base
// means the raw coordinates equal 3^l times the base, exactly.
inline bool stabilizer_certify(const SpherePoint& base, int depth) {
    if (!base.on_sphere()) throw precondition_error("stabilizer_certify: base is off the sphere");
    if (depth <= 0) return true;
    check_word_budget(ball_size(static_cast<std::uint32_t>(depth)), "stabilizer_certify");

    std::vector<SpherePoint> scaled(static_cast<std::size_t>(depth) + 1);
    scaled[0] = base;
    for (int l = 1; l <= depth; ++l) {
        scaled[static_cast<std::size_t>(l)] = scaled[static_cast<std::size_t>(l - 1)];
        SpherePoint& t = scaled[static_cast<std::size_t>(l)];
        for (int i = 0; i < 3; ++i) {
            t.p[i] *= 3;
            t.q[i] *= 3;
        }
        ++t.k;
    }

    bool free_so_far = true;
    auto visit = [&](auto&& self, const SpherePoint& t, int len, char last) -> void {
        if (!free_so_far) return;
        if (len > 0) {
            const SpherePoint& want = scaled[static_cast<std::size_t>(len)];
            if (t.p == want.p && t.q == want.q) {
                free_so_far = false;
                return;
            }
        }
        if (len == depth) return;
        for (char code : kLetterCodes) {
            if (len > 0 && cancels(last, code)) continue;
            self(self, apply_letter(Letter::from_code(code), t), len + 1, code);
        }
    };
    visit(visit, base, 0, '\0');
    return free_so_far;
}

inline bool stabilizer_certify(const SphereTriple& base, int depth) {
    return stabilizer_certify(SpherePoint::from_triple(base), depth);
}

struct OrbitEntry {
    Word word;
    SpherePoint point;  // canonical
    PieceLabel label;
};

// The orbit of a base point to a fixed word depth. Entries follow enumeration
// order; by_point supports exact point lookup. Distinctness of all points is
// checked on construction and holds whenever the base is stabilizer-certified
// to twice the depth.
struct OrbitCloud {
    SpherePoint base;  // canonical
    int depth = 0;
    std::vector<OrbitEntry> entries;
    std::vector<std::uint32_t> by_point;

    const OrbitEntry* find(const SpherePoint& p) const {
        auto it = std::lower_bound(by_point.begin(), by_point.end(), p,
                                   [this](std::uint32_t i, const SpherePoint& x) {
                                       return point_less(entries[i].point, x);
                                   });
        if (it == by_point.end()) return nullptr;
        const OrbitEntry& e = entries[*it];
        return e.point == p ? &e : nullptr;
    }
};

inline OrbitCloud build_orbit_cloud(const SpherePoint& base, int depth) {
    if (!base.on_sphere()) throw precondition_error("build_orbit_cloud: base is off the sphere");
    if (depth < 0) throw precondition_error("build_orbit_cloud: negative depth");
    OrbitCloud oc;
    oc.base = base.canonical();
    oc.depth = depth;
    for (Word& w : enumerate_ball(static_cast<std::uint32_t>(depth))) {
        SpherePoint p = motion_apply(w, oc.base);
        PieceLabel l = classify(w);
        oc.entries.push_back({std::move(w), std::move(p), l});
    }
    oc.by_point.resize(oc.entries.size());
    for (std::uint32_t i = 0; i < oc.by_point.size(); ++i) oc.by_point[i] = i;
    std::sort(oc.by_point.begin(), oc.by_point.end(), [&oc](std::uint32_t i, std::uint32_t j) {
        return point_less(oc.entries[i].point, oc.entries[j].point);
    });
    for (std::size_t i = 1; i < oc.by_point.size(); ++i) {
        const OrbitEntry& prev = oc.entries[oc.by_point[i - 1]];
        const OrbitEntry& cur = oc.entries[oc.by_point[i]];
        if (prev.point == cur.point)
            throw precondition_error("build_orbit_cloud: words " + prev.word.str() + " and " +
                                     cur.word.str() + " collide at " + cur.point.str());
    }
    return oc;
}

// Orbit points whose words belong to a word-level view. Enumeration depth is
// the generating word's length, which matches the word view's own horizon.
inline SetView<SpherePoint> orbit_restrict_view(std::shared_ptr<const OrbitCloud> oc,
                                                SetView<Word> words) {
    auto member = [oc, words](const SpherePoint& p) {
        const OrbitEntry* e = oc->find(p);
        return e != nullptr && words.member(e->word);
    };
    auto enumerate = [oc, words](int d) {
        std::vector<SpherePoint> out;
        for (const OrbitEntry& e : oc->entries)
            if (static_cast<int>(e.word.length()) <= d && words.member(e.word))
                out.push_back(e.point);
        return out;
    };
    return SetView<SpherePoint>::lazy("orbit-" + words.name(), member, enumerate,
                                      nlohmann::json{{"base", oc->base.str()},
                                                     {"depth", oc->depth},
                                                     {"words", words.name()}});
}

}  // namespace tarski
