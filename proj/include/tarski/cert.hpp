#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tarski/report.hpp"
#include "tarski/setview.hpp"

namespace tarski {

namespace detail {

// Extra word length (or analogous depth shift) a motion can add to a point.
template <class M>
int motion_slack_of(const M& m) {
    if constexpr (requires { motion_slack(m); })
        return motion_slack(m);
    else
        return 0;
}

template <class M>
nlohmann::json motion_json(const M& m) {
    if constexpr (requires { motion_to_json(m); })
        return motion_to_json(m);
    else
        return nullptr;
}

}  // namespace detail

template <class P, class M>
struct Piece {
    SetView<P> set;
    M motion;
};

// Witness that source ~ target: pieces partition the source and their images
// under the piece motions partition the target. For lazy views all claims are
// relative to a checked depth; `margin` is the horizon trim applied wherever a
// fixed-depth enumeration could clip a motion image (compose adds margins).
template <class P, class M>
struct EquidecompositionCert {
    SetView<P> source;
    SetView<P> target;
    std::vector<Piece<P, M>> pieces;
    int margin = 0;

    bool all_explicit() const {
        if (!source.is_explicit() || !target.is_explicit()) return false;
        for (const auto& pc : pieces)
            if (!pc.set.is_explicit()) return false;
        return true;
    }

    int max_slack() const {
        int s = 0;
        for (const auto& pc : pieces) s = std::max(s, detail::motion_slack_of(pc.motion));
        return s;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema"] = kSchema;
        j["kind"] = "equidecomposition-cert";
        j["margin"] = margin;
        j["source"] = source.to_json();
        j["target"] = target.to_json();
        auto arr = nlohmann::json::array();
        for (const auto& pc : pieces)
            arr.push_back(nlohmann::json{{"set", pc.set.to_json()},
                                         {"motion", detail::motion_json(pc.motion)}});
        j["pieces"] = arr;
        return j;
    }
};

template <class M>
M identity_motion_like(const M& m) {
    return motion_compose(m, motion_invert(m));
}

// Image of a set under a motion. Lazy images test membership through the
// inverse motion; their enumerator over-scans by the motion's slack so that
// every image point up to the requested depth is produced.
template <class P, class M>
SetView<P> image_view(const SetView<P>& A, const M& g) {
    if (A.is_explicit()) {
        std::vector<P> out;
        out.reserve(A.points().size());
        for (const P& x : A.points()) out.push_back(motion_apply(g, x));
        return SetView<P>::explicit_set(std::move(out));
    }
    M ginv = motion_invert(g);
    int slack = detail::motion_slack_of(g);
    return SetView<P>::lazy(
        "image", [A, ginv](const P& y) { return A.member(motion_apply(ginv, y)); },
        [A, g, slack](int d) {
            std::vector<P> out;
            for (const P& x : A.enumerate(d + slack)) {
                P y = motion_apply(g, x);
                if (detail::depth_of(y) <= d) out.push_back(std::move(y));
            }
            return out;
        },
        nlohmann::json{{"of", A.name()}});
}

// Piecewise map induced by a certificate.
template <class P, class M>
std::optional<P> induced_apply(const EquidecompositionCert<P, M>& c, const P& x) {
    for (const auto& pc : c.pieces)
        if (pc.set.member(x)) return motion_apply(pc.motion, x);
    return std::nullopt;
}

// Both partition invariants, checked exactly at `depth`. Where a view cannot
// enumerate (membership-only), the corresponding point loop is vacuous and the
// membership-based checks from the other side still apply.
template <class P, class M>
VerificationReport verify(const EquidecompositionCert<P, M>& c, int depth) {
    VerificationReport rep;
    rep.kind = "equidecomposition";
    rep.depth = depth;
    const std::size_t n = c.pieces.size();
    rep.counts["pieces"] = static_cast<std::int64_t>(n);

    std::vector<M> inv;
    inv.reserve(n);
    for (const auto& pc : c.pieces) inv.push_back(motion_invert(pc.motion));

    // Pieces partition the source.
    std::int64_t piece_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto pts = c.pieces[i].set.enumerate(depth);
        rep.counts["piece_" + std::to_string(i)] = static_cast<std::int64_t>(pts.size());
        piece_total += static_cast<std::int64_t>(pts.size());
        for (const P& x : pts) {
            if (!c.source.member(x)) {
                rep.fail("piece " + std::to_string(i) + " point outside source: " +
                         detail::pt_describe(x));
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                if (c.pieces[j].set.member(x))
                    rep.fail("pieces " + std::to_string(i) + " and " + std::to_string(j) +
                             " overlap at " + detail::pt_describe(x));
            }
        }
    }
    rep.counts["piece_points"] = piece_total;
    {
        auto src = c.source.enumerate(depth);
        rep.counts["source_points"] = static_cast<std::int64_t>(src.size());
        for (const P& x : src) {
            bool covered = false;
            for (const auto& pc : c.pieces)
                if (pc.set.member(x)) {
                    covered = true;
                    break;
                }
            if (!covered) rep.fail("source point in no piece: " + detail::pt_describe(x));
        }
    }

    // Moved pieces land in the target and are pairwise disjoint. Image points
    // are generated from margin-trimmed piece enumerations so that truncated
    // views are never asked about points beyond their horizon.
    const int trimmed = depth - c.margin;
    std::int64_t image_total = 0;
    if (trimmed >= 0) {
        for (std::size_t i = 0; i < n; ++i) {
            for (const P& x : c.pieces[i].set.enumerate(trimmed)) {
                P y = motion_apply(c.pieces[i].motion, x);
                ++image_total;
                if (!c.target.member(y))
                    rep.fail("piece " + std::to_string(i) + " image outside target: " +
                             detail::pt_describe(y));
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) continue;
                    if (c.pieces[j].set.member(motion_apply(inv[j], y)))
                        rep.fail("images of pieces " + std::to_string(i) + " and " +
                                 std::to_string(j) + " overlap at " + detail::pt_describe(y));
                }
            }
        }
        rep.counts["image_points"] = image_total;

        auto tgt = c.target.enumerate(trimmed);
        rep.counts["target_points"] = static_cast<std::int64_t>(tgt.size());
        for (const P& t : tgt) {
            bool covered = false;
            for (std::size_t i = 0; i < n; ++i)
                if (c.pieces[i].set.member(motion_apply(inv[i], t))) {
                    covered = true;
                    break;
                }
            if (!covered) rep.fail("target point in no moved piece: " + detail::pt_describe(t));
        }
    } else {
        rep.note("margin exceeds depth; image checks skipped");
    }
    return rep;
}

namespace detail {

template <class P>
void check_subset(const SetView<P>& X, const SetView<P>& Y, int depth, const std::string& what) {
    for (const P& x : X.enumerate(depth))
        if (!Y.member(x))
            throw precondition_error(what + ": point " + pt_describe(x) + " not contained");
}

template <class P>
bool same_set(const SetView<P>& X, const SetView<P>& Y, int depth) {
    for (const P& x : X.enumerate(depth))
        if (!Y.member(x)) return false;
    for (const P& y : Y.enumerate(depth))
        if (!X.member(y)) return false;
    return true;
}

}  // namespace detail

template <class P, class M>
EquidecompositionCert<P, M> identity_cert(const SetView<P>& A, const M& id) {
    return {A, A, {{A, id}}, 0};
}

// Transitivity: pieces are the nonempty pairwise intersections A_k ∩ g_k^{-1}(B_j),
// each moved by the composed motion.
template <class P, class M>
EquidecompositionCert<P, M> compose(const EquidecompositionCert<P, M>& c1,
                                    const EquidecompositionCert<P, M>& c2, int depth) {
    if (!detail::same_set(c1.target, c2.source, depth))
        throw precondition_error("compose: interface sets disagree at depth " +
                                 std::to_string(depth));
    EquidecompositionCert<P, M> out;
    out.source = c1.source;
    out.target = c2.target;
    out.margin = c1.margin + c2.margin;
    for (const auto& [ak, g] : c1.pieces) {
        for (const auto& [bj, f] : c2.pieces) {
            M composed = motion_compose(f, g);
            if (ak.is_explicit()) {
                std::vector<P> pts;
                for (const P& x : ak.points())
                    if (bj.member(motion_apply(g, x))) pts.push_back(x);
                if (pts.empty()) continue;
                out.pieces.push_back({SetView<P>::explicit_set(std::move(pts)), composed});
            } else {
                auto member = [ak, bj, g](const P& x) {
                    return ak.member(x) && bj.member(motion_apply(g, x));
                };
                auto enumerate = [ak, bj, g](int d) {
                    std::vector<P> pts;
                    for (P& x : ak.enumerate(d))
                        if (bj.member(motion_apply(g, x))) pts.push_back(std::move(x));
                    return pts;
                };
                out.pieces.push_back({SetView<P>::lazy("compose-piece", member, enumerate,
                                                       nlohmann::json{{"left", ak.name()},
                                                                      {"right", bj.name()}}),
                                      composed});
            }
        }
    }
    return out;
}

template <class P, class M>
EquidecompositionCert<P, M> invert_cert(const EquidecompositionCert<P, M>& c) {
    EquidecompositionCert<P, M> out;
    out.source = c.target;
    out.target = c.source;
    out.margin = std::max(c.margin, c.max_slack());
    for (const auto& [set, g] : c.pieces) out.pieces.push_back({image_view(set, g), motion_invert(g)});
    return out;
}

// Restriction of a certificate to a subset S of its source.
template <class P, class M>
EquidecompositionCert<P, M> restrict(const EquidecompositionCert<P, M>& c, const SetView<P>& S,
                                     int depth) {
    detail::check_subset(S, c.source, depth, "restrict: S not inside source");
    EquidecompositionCert<P, M> out;
    out.source = S;
    out.margin = c.margin;
    std::vector<SetView<P>> images;
    for (const auto& [set, g] : c.pieces) {
        SetView<P> cut = set_intersection(set, S);
        if (cut.is_explicit() && cut.points().empty()) continue;
        images.push_back(image_view(cut, g));
        out.pieces.push_back({std::move(cut), g});
    }
    out.target = set_union(std::move(images));
    return out;
}

// Absorption schema: P ⊆ Q ⊆ A with g shifting Q onto Q∖P gives A ∼ A∖P
// through pieces {(Q, g), (A∖Q, identity)}.
template <class P, class M>
EquidecompositionCert<P, M> absorb(const SetView<P>& p, const SetView<P>& q, const M& g,
                                   const SetView<P>& a, int depth) {
    detail::check_subset(p, q, depth, "absorb: P not inside Q");
    detail::check_subset(q, a, depth, "absorb: Q not inside A");
    const bool finite = p.is_explicit() && q.is_explicit() && a.is_explicit();
    const int slack = finite ? 0 : std::max(1, detail::motion_slack_of(g));
    const M ginv = motion_invert(g);
    for (const P& x : q.enumerate(depth - slack)) {
        P y = motion_apply(g, x);
        if (!q.member(y) || p.member(y))
            throw precondition_error("absorb: image of Q leaves Q\\P at " +
                                     detail::pt_describe(y));
    }
    SetView<P> qmp = set_difference(q, p);
    for (const P& y : qmp.enumerate(depth - slack)) {
        if (!q.member(motion_apply(ginv, y)))
            throw precondition_error("absorb: Q\\P point not reached from Q: " +
                                     detail::pt_describe(y));
    }
    EquidecompositionCert<P, M> out;
    out.source = a;
    out.target = set_difference(a, p);
    out.pieces.push_back({q, g});
    out.pieces.push_back({set_difference(a, q), identity_motion_like(g)});
    out.margin = slack;
    return out;
}

// Constructive Banach–Schröder–Bernstein. Inputs witness A ∼ B′ ⊆ B and
// B ∼ A′ ⊆ A; the greatest fixed point D of Φ(D) = A∖f(B∖g(D)) is reached by
// downward iteration from A, and the output maps D by g and A∖D by f^{-1}.
template <class P, class M>
EquidecompositionCert<P, M> bsb_combine(const EquidecompositionCert<P, M>& gc,
                                        const EquidecompositionCert<P, M>& fc, int depth) {
    detail::check_subset(gc.target, fc.source, depth, "bsb_combine: B' not inside B");
    detail::check_subset(fc.target, gc.source, depth, "bsb_combine: A' not inside A");

    const bool finite = gc.all_explicit() && fc.all_explicit();
    int shift = std::max(gc.max_slack(), fc.max_slack());
    const int bdepth = depth + shift;

    const std::vector<P> a_pts = gc.source.enumerate(depth);
    const std::vector<P> b_pts = fc.source.enumerate(bdepth);
    const std::size_t na = a_pts.size();

    auto index_of = [](const std::vector<P>& sorted, const P& x) -> std::ptrdiff_t {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), x, detail::pt_less<P>);
        if (it != sorted.end() && detail::pt_eq(*it, x)) return it - sorted.begin();
        return -1;
    };

    auto map_through = [](const EquidecompositionCert<P, M>& c, const std::vector<P>& pts,
                          const char* who) {
        std::vector<P> out;
        out.reserve(pts.size());
        for (const P& x : pts) {
            auto y = induced_apply(c, x);
            if (!y)
                throw precondition_error(std::string(who) + ": point in no piece: " +
                                         detail::pt_describe(x));
            out.push_back(std::move(*y));
        }
        std::vector<P> check = out;
        detail::sort_unique(check);
        if (check.size() != out.size())
            throw precondition_error(std::string(who) + ": induced map is not injective");
        return out;
    };

    const std::vector<P> g_of = map_through(gc, a_pts, "bsb_combine: g");
    const std::vector<P> f_of = map_through(fc, b_pts, "bsb_combine: f");

    std::vector<char> in_d(na, 1);
    std::vector<P> g_d;
    for (std::size_t round = 0; round <= na + 1; ++round) {
        g_d.clear();
        for (std::size_t i = 0; i < na; ++i)
            if (in_d[i]) g_d.push_back(g_of[i]);
        detail::sort_unique(g_d);

        std::vector<char> next(na, 1);
        for (std::size_t k = 0; k < b_pts.size(); ++k) {
            if (std::binary_search(g_d.begin(), g_d.end(), b_pts[k], detail::pt_less<P>))
                continue;
            std::ptrdiff_t idx = index_of(a_pts, f_of[k]);
            if (idx >= 0) next[static_cast<std::size_t>(idx)] = 0;
        }
        if (next == in_d) break;
        if (round == na + 1)
            throw error("bsb_combine: fixed-point iteration failed to stabilize");
        in_d = std::move(next);
    }

    EquidecompositionCert<P, M> out;
    out.source = gc.source;
    out.target = fc.source;
    out.margin = finite ? 0 : std::max(gc.margin, fc.margin) + std::max(1, shift);
    for (const auto& [ai, gi] : gc.pieces) {
        std::vector<P> pts;
        for (std::size_t i = 0; i < na; ++i)
            if (in_d[i] && ai.member(a_pts[i])) pts.push_back(a_pts[i]);
        if (pts.empty()) continue;
        out.pieces.push_back({SetView<P>::explicit_set(std::move(pts)), gi});
    }
    for (const auto& [bj, fj] : fc.pieces) {
        std::vector<P> pts;
        for (std::size_t k = 0; k < b_pts.size(); ++k) {
            if (std::binary_search(g_d.begin(), g_d.end(), b_pts[k], detail::pt_less<P>))
                continue;
            if (!bj.member(b_pts[k])) continue;
            if (index_of(a_pts, f_of[k]) < 0) continue;  // beyond horizon, margin covers it
            pts.push_back(f_of[k]);
        }
        if (pts.empty()) continue;
        out.pieces.push_back({SetView<P>::explicit_set(std::move(pts)), motion_invert(fj)});
    }
    return out;
}

// C ⊆ Q ⊆ A and C ∼ A imply Q ∼ A: squeeze Q between the inclusion Q ⪯ A and
// A ∼ C ⪯ Q, then combine.
template <class P, class M>
EquidecompositionCert<P, M> sandwich(const SetView<P>& c_set, const SetView<P>& q,
                                     const SetView<P>& a,
                                     const EquidecompositionCert<P, M>& c, int depth) {
    detail::check_subset(c_set, q, depth, "sandwich: C not inside Q");
    detail::check_subset(q, a, depth, "sandwich: Q not inside A");
    if (!detail::same_set(c.source, c_set, depth) || !detail::same_set(c.target, a, depth))
        throw precondition_error("sandwich: certificate endpoints are not C and A");
    if (c.pieces.empty()) {
        if (!q.enumerate(depth).empty())
            throw precondition_error("sandwich: empty certificate with nonempty Q");
        return EquidecompositionCert<P, M>{q, a, {}, 0};
    }
    const M id = identity_motion_like(c.pieces.front().motion);
    EquidecompositionCert<P, M> inclusion = identity_cert(q, id);
    return bsb_combine(inclusion, invert_cert(c), depth);
}

// Partition form of a paradoxical pair: enlarge C to A∖B so the two claimed
// subsets tile A while each stays equidecomposable with A.
template <class P, class M>
std::pair<EquidecompositionCert<P, M>, EquidecompositionCert<P, M>> paradox_partition(
    const EquidecompositionCert<P, M>& bc, const EquidecompositionCert<P, M>& cc,
    const SetView<P>& a, int depth) {
    const SetView<P>& b_set = bc.source;
    const SetView<P>& c_set = cc.source;
    for (const P& x : b_set.enumerate(depth))
        if (c_set.member(x))
            throw precondition_error("paradox_partition: B and C overlap at " +
                                     detail::pt_describe(x));
    detail::check_subset(b_set, a, depth, "paradox_partition: B not inside A");
    detail::check_subset(c_set, a, depth, "paradox_partition: C not inside A");
    if (!detail::same_set(bc.target, a, depth) || !detail::same_set(cc.target, a, depth))
        throw precondition_error("paradox_partition: certificates do not target A");

    SetView<P> rest = set_difference(a, b_set);
    if (detail::same_set(c_set, rest, depth)) return {bc, cc};
    return {bc, sandwich(c_set, rest, a, cc, depth)};
}

// Move a paradoxical pair across A ∼ A′: B′ = image of B through the moving
// certificate, with B′ ∼ B ∼ A ∼ A′ by composition (same for C).
template <class P, class M>
std::pair<EquidecompositionCert<P, M>, EquidecompositionCert<P, M>> transfer(
    const EquidecompositionCert<P, M>& bc, const EquidecompositionCert<P, M>& cc,
    const EquidecompositionCert<P, M>& move, int depth) {
    auto insist = [&](const EquidecompositionCert<P, M>& c, const char* who) {
        VerificationReport r = verify(c, depth);
        if (!r.pass)
            throw precondition_error(std::string("transfer: input certificate ") + who +
                                     " fails verification: " + r.summary());
    };
    insist(bc, "B~A");
    insist(cc, "C~A");
    insist(move, "A~A'");
    auto shuttle = [&](const EquidecompositionCert<P, M>& part) {
        EquidecompositionCert<P, M> r = restrict(move, part.source, depth);
        return compose(compose(invert_cert(r), part, depth), move, depth);
    };
    return {shuttle(bc), shuttle(cc)};
}

}  // namespace tarski
