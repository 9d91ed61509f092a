#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tarski/absorb.hpp"
#include "tarski/cert.hpp"
#include "tarski/core.hpp"
#include "tarski/orbit.hpp"
#include "tarski/report.hpp"
#include "tarski/ring.hpp"
#include "tarski/rotation.hpp"
#include "tarski/setview.hpp"
#include "tarski/word.hpp"

namespace tarski {

namespace detail {

// Rebuild by_point and reject exact point collisions, as build_orbit_cloud does.
inline void index_cloud(OrbitCloud& oc, const char* who) {
    oc.by_point.resize(oc.entries.size());
    for (std::uint32_t i = 0; i < oc.by_point.size(); ++i) oc.by_point[i] = i;
    std::sort(oc.by_point.begin(), oc.by_point.end(), [&oc](std::uint32_t i, std::uint32_t j) {
        return point_less(oc.entries[i].point, oc.entries[j].point);
    });
    for (std::size_t i = 1; i < oc.by_point.size(); ++i) {
        const OrbitEntry& prev = oc.entries[oc.by_point[i - 1]];
        const OrbitEntry& cur = oc.entries[oc.by_point[i]];
        if (prev.point == cur.point)
            throw precondition_error(std::string(who) + ": words " + prev.word.str() + " and " +
                                     cur.word.str() + " collide at " + cur.point.str());
    }
}

}  // namespace detail

// A truncated orbit together with two shifted copies of it. Each copy is
// assembled from two of the five label pieces, one of them moved by a
// generator; trimmed one level, either copy reproduces the whole orbit.
struct OrbitDouble {
    OrbitCloud orbit;
    OrbitCloud copy1;
    OrbitCloud copy2;
    VerificationReport report;
};

inline OrbitDouble orbit_double(const SpherePoint& base, int depth) {
    if (depth < 0) throw precondition_error("orbit_double: negative depth");
    if (!stabilizer_certify(base, 2 * depth))
        throw precondition_error("orbit_double: base " + base.str() +
                                 " admits a relation within depth " + std::to_string(2 * depth));

    OrbitDouble od;
    od.orbit = build_orbit_cloud(base, depth);

    // Moving the w_g piece by g^-1 strips the leading letter, so the moved
    // words are exactly the ball one level down; the kept piece fills the
    // rest of the copy.
    auto shifted_copy = [&](const Word& shift, PieceLabel moved, PieceLabel kept) {
        OrbitCloud c;
        c.base = od.orbit.base;
        c.depth = depth;
        for (const OrbitEntry& e : od.orbit.entries) {
            if (e.label == moved) {
                Word w = concat_reduce(shift, e.word);
                SpherePoint p = motion_apply(shift, e.point);
                PieceLabel l = classify(w);
                c.entries.push_back({std::move(w), std::move(p), l});
            } else if (e.label == kept) {
                c.entries.push_back(e);
            }
        }
        detail::index_cloud(c, "orbit_double");
        return c;
    };
    od.copy1 = shifted_copy(Word::sigma_inv(), PieceLabel::w_sigma, PieceLabel::w_sigma_inv);
    od.copy2 = shifted_copy(Word::tau_inv(), PieceLabel::w_tau, PieceLabel::w_tau_inv);

    VerificationReport& rep = od.report;
    rep.kind = "orbit-double";
    rep.depth = depth;
    rep.counts["points"] = static_cast<std::int64_t>(od.orbit.entries.size());
    for (PieceLabel l : {PieceLabel::w_sigma, PieceLabel::w_sigma_inv, PieceLabel::w_tau,
                         PieceLabel::w_tau_inv, PieceLabel::identity})
        rep.counts[std::string("piece_") + piece_label_name(l)] = 0;
    for (const OrbitEntry& e : od.orbit.entries)
        ++rep.counts[std::string("piece_") + piece_label_name(e.label)];
    rep.counts["copy1_points"] = static_cast<std::int64_t>(od.copy1.entries.size());
    rep.counts["copy2_points"] = static_cast<std::int64_t>(od.copy2.entries.size());

    // Entries whose words fit one level down, ordered by point.
    auto trimmed = [depth](const OrbitCloud& c) {
        std::vector<const OrbitEntry*> out;
        for (const OrbitEntry& e : c.entries)
            if (static_cast<int>(e.word.length()) <= depth - 1) out.push_back(&e);
        std::sort(out.begin(), out.end(),
                  [](const OrbitEntry* a, const OrbitEntry* b) { return point_less(a->point, b->point); });
        return out;
    };
    const std::vector<const OrbitEntry*> base_trim = trimmed(od.orbit);
    rep.counts["orbit_trimmed"] = static_cast<std::int64_t>(base_trim.size());

    auto compare_trimmed = [&](const OrbitCloud& copy, const std::string& name) {
        const std::vector<const OrbitEntry*> copy_trim = trimmed(copy);
        rep.counts[name + "_trimmed"] = static_cast<std::int64_t>(copy_trim.size());
        std::size_t i = 0, j = 0;
        while (i < base_trim.size() || j < copy_trim.size()) {
            if (j == copy_trim.size() ||
                (i < base_trim.size() && point_less(base_trim[i]->point, copy_trim[j]->point))) {
                rep.fail(name + " misses " + base_trim[i]->point.str() + " reached by " +
                         base_trim[i]->word.str());
                ++i;
            } else if (i == base_trim.size() || point_less(copy_trim[j]->point, base_trim[i]->point)) {
                rep.fail(name + " has an extra point " + copy_trim[j]->point.str() + " of word " +
                         copy_trim[j]->word.str());
                ++j;
            } else {
                ++i;
                ++j;
            }
        }
    };
    compare_trimmed(od.copy1, "copy1");
    compare_trimmed(od.copy2, "copy2");
    return od;
}

namespace detail {

// Primitive integer direction of a nonzero exact vector. Antipodal vectors
// share a key; callers separate them with a dot-product sign.
struct DirKey {
    std::array<Int, 6> c{};

    friend bool operator==(const DirKey& u, const DirKey& v) { return u.c == v.c; }
    friend bool operator<(const DirKey& u, const DirKey& v) { return u.c < v.c; }
};

inline DirKey direction_key(const Vec3E& x) {
    const RingScalar* s[3] = {&x.x, &x.y, &x.z};
    std::uint32_t a = 0, b = 0;
    for (const RingScalar* c : s) {
        a = std::max(a, c->a());
        b = std::max(b, c->b());
    }
    DirKey k;
    for (int i = 0; i < 3; ++i) {
        const Int scale = pow2(a - s[i]->a()) * pow3(b - s[i]->b());
        k.c[2 * i] = s[i]->p() * scale;
        k.c[2 * i + 1] = s[i]->q() * scale;
    }
    Int g = 0;
    for (const Int& c : k.c) g = boost::multiprecision::gcd(g, boost::multiprecision::abs(c));
    if (g == 0) throw precondition_error("direction_key: zero vector");
    for (Int& c : k.c) c /= g;
    for (const Int& c : k.c) {
        if (c == 0) continue;
        if (c < 0)
            for (Int& d : k.c) d = -d;
        break;
    }
    return k;
}

}  // namespace detail

// Orbit entries indexed by ray direction, for exact cone membership.
struct ConeIndex {
    std::shared_ptr<const OrbitCloud> cloud;
    std::vector<std::pair<detail::DirKey, std::uint32_t>> order;

    // Entry whose ray from the origin passes through x, if any.
    const OrbitEntry* find_direction(const Vec3E& x) const {
        if (x == Vec3E::zero()) return nullptr;
        const detail::DirKey k = detail::direction_key(x);
        auto it = std::lower_bound(
            order.begin(), order.end(), k,
            [](const std::pair<detail::DirKey, std::uint32_t>& e, const detail::DirKey& key) {
                return e.first < key;
            });
        for (; it != order.end() && it->first == k; ++it) {
            const OrbitEntry& e = cloud->entries[it->second];
            if (dot(x, e.point.to_vec()).sign() > 0) return &e;
        }
        return nullptr;
    }
};

inline ConeIndex build_cone_index(std::shared_ptr<const OrbitCloud> cloud) {
    ConeIndex ix;
    ix.cloud = std::move(cloud);
    for (std::uint32_t i = 0; i < ix.cloud->entries.size(); ++i)
        ix.order.emplace_back(detail::direction_key(ix.cloud->entries[i].point.to_vec()), i);
    std::sort(ix.order.begin(), ix.order.end());
    return ix;
}

// Radial cone of the orbit directions carrying the given labels: all x with
// 0 < |x| <= 1 whose ray meets a matching orbit point. Enumeration samples
// two radii per direction and stops one level inside the orbit so that
// one-letter motions stay within the index.
inline SetView<Vec3E> cone_view(std::shared_ptr<const ConeIndex> ix, std::vector<PieceLabel> labels,
                                std::string name) {
    nlohmann::json params;
    params["depth"] = ix->cloud->depth;
    params["base"] = ix->cloud->base.str();
    params["labels"] = nlohmann::json::array();
    for (PieceLabel l : labels) params["labels"].push_back(piece_label_name(l));

    auto has_label = [labels](PieceLabel l) {
        return std::find(labels.begin(), labels.end(), l) != labels.end();
    };
    auto member = [ix, has_label](const Vec3E& x) {
        if (x == Vec3E::zero()) return false;
        if ((norm_sq(x) - RingScalar(1)).sign() > 0) return false;
        const OrbitEntry* e = ix->find_direction(x);
        return e != nullptr && has_label(e->label);
    };
    auto enumerate = [ix, has_label](int d) {
        const int cap = std::min(d, ix->cloud->depth - 1);
        std::vector<Vec3E> out;
        const RingScalar h = RingScalar::half();
        for (const OrbitEntry& e : ix->cloud->entries) {
            if (static_cast<int>(e.word.length()) > cap || !has_label(e.label)) continue;
            const Vec3E v = e.point.to_vec();
            out.push_back(v);
            out.push_back(h * v);
        }
        return out;
    };
    return SetView<Vec3E>::lazy(std::move(name), member, enumerate, params);
}

inline SetView<Vec3E> closed_ball_view() {
    return SetView<Vec3E>::lazy_membership(
        "unit-ball", [](const Vec3E& v) { return (norm_sq(v) - RingScalar(1)).sign() <= 0; });
}

// Doubling of the radial cones over a free orbit, plus absorption of the
// origin into the closed ball. first and second each rebuild the full cone
// set from disjoint target pieces; origin matches the ball with the ball
// minus its center.
struct BallParadox {
    EquidecompositionCert<Vec3E, IsometryE> first;
    EquidecompositionCert<Vec3E, IsometryE> second;
    EquidecompositionCert<Vec3E, IsometryE> origin;
    int depth = 0;
    int absorb_depth = 0;
};

inline BallParadox ball_paradox_cert(int depth, int absorb_depth = 50) {
    if (depth < 0) throw precondition_error("ball_paradox_cert: negative depth");
    if (absorb_depth < 0) throw precondition_error("ball_paradox_cert: negative absorber depth");
    const SpherePoint base = SpherePoint::default_base();
    if (!stabilizer_certify(base, 2 * depth))
        throw precondition_error("ball_paradox_cert: base " + base.str() +
                                 " admits a relation within depth " + std::to_string(2 * depth));

    auto cloud = std::make_shared<const OrbitCloud>(build_orbit_cloud(base, depth));
    auto ix = std::make_shared<const ConeIndex>(build_cone_index(cloud));

    using L = PieceLabel;
    SetView<Vec3E> whole =
        cone_view(ix, {L::w_sigma, L::w_sigma_inv, L::w_tau, L::w_tau_inv, L::identity}, "cone-orbit");
    SetView<Vec3E> sigma_pair = cone_view(ix, {L::w_sigma, L::w_sigma_inv}, "cone-sigma-pair");
    SetView<Vec3E> tau_pair = cone_view(ix, {L::w_tau, L::w_tau_inv}, "cone-tau-pair");
    SetView<Vec3E> q_sigma =
        cone_view(ix, {L::identity, L::w_tau, L::w_tau_inv, L::w_sigma}, "cone-q-sigma");
    SetView<Vec3E> q_tau =
        cone_view(ix, {L::identity, L::w_sigma, L::w_sigma_inv, L::w_tau}, "cone-q-tau");
    SetView<Vec3E> ws_inv = cone_view(ix, {L::w_sigma_inv}, "cone-w-sigma-inv");
    SetView<Vec3E> wt_inv = cone_view(ix, {L::w_tau_inv}, "cone-w-tau-inv");

    const IsometryE rot_sigma = IsometryE::rotation(word_matrix(Word::sigma()));
    const IsometryE rot_tau = IsometryE::rotation(word_matrix(Word::tau()));
    const IsometryE id = IsometryE::identity();

    BallParadox bp;
    bp.depth = depth;
    bp.absorb_depth = absorb_depth;
    bp.first = {whole, sigma_pair, {{q_sigma, rot_sigma}, {ws_inv, id}}, 1};
    bp.second = {whole, tau_pair, {{q_tau, rot_tau}, {wt_inv, id}}, 1};

    const Vec3E u{RingScalar(1), RingScalar(0), RingScalar(0)};
    const Mat3E omega = find_avoiding_axis_rotation({u}, absorb_depth);
    const BallOriginAbsorber ball = ball_absorb_origin(build_absorber<Vec3E>({u}, omega, absorb_depth), omega);
    auto basin = std::make_shared<const AbsorberTrunc<Vec3E, IsometryE>>(ball.n_trunc);
    bp.origin = absorb(SetView<Vec3E>::explicit_set({Vec3E::zero()}), absorber_view(basin), ball.r,
                       closed_ball_view(), absorb_depth);
    return bp;
}

inline VerificationReport verify_ball_paradox(const BallParadox& bp, int depth) {
    VerificationReport rep;
    rep.kind = "ball-paradox";
    rep.depth = depth;

    const VerificationReport r1 = verify(bp.first, depth);
    const VerificationReport r2 = verify(bp.second, depth);
    const VerificationReport r0 = verify(bp.origin, bp.absorb_depth);
    for (const auto& [k, v] : r1.counts) rep.counts["first_" + k] = v;
    for (const auto& [k, v] : r2.counts) rep.counts["second_" + k] = v;
    for (const auto& [k, v] : r0.counts) rep.counts["origin_" + k] = v;
    for (const auto& w : r1.witnesses) rep.fail("first copy: " + w);
    for (const auto& w : r2.witnesses) rep.fail("second copy: " + w);
    for (const auto& w : r0.witnesses) rep.fail("origin: " + w);
    rep.pass = rep.pass && r1.pass && r2.pass && r0.pass;

    std::int64_t checked = 0;
    for (const Vec3E& x : bp.first.target.enumerate(depth)) {
        ++checked;
        if (bp.second.target.member(x)) rep.fail("copy targets overlap at " + describe(x));
    }
    rep.counts["copy_overlap_checked"] = checked;
    return rep;
}

// Piece-count ledger for chaining equivalences. Leaves cite facts
// established by the certificates above; internal nodes combine bounds:
// compositions multiply, injection-pair and gluing steps add.
enum class DerivationKind : std::uint8_t {
    weak_form_axiom,
    inclusion,
    compose,
    bsb,
    n_fold,
    disjoint_double
};

inline const char* derivation_kind_name(DerivationKind k) {
    switch (k) {
        case DerivationKind::weak_form_axiom: return "weak_form_axiom";
        case DerivationKind::inclusion: return "inclusion";
        case DerivationKind::compose: return "compose";
        case DerivationKind::bsb: return "bsb";
        case DerivationKind::n_fold: return "n_fold";
        default: return "disjoint_double";
    }
}

inline bool derivation_is_leaf(DerivationKind k) {
    return k == DerivationKind::weak_form_axiom || k == DerivationKind::inclusion;
}

struct DerivationCert {
    DerivationKind kind = DerivationKind::inclusion;
    std::string claim;
    Int bound = 1;
    std::vector<DerivationCert> children;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["kind"] = derivation_kind_name(kind);
        j["claim"] = claim;
        j["bound"] = bound.str();
        j["children"] = nlohmann::json::array();
        for (const DerivationCert& c : children) j["children"].push_back(c.to_json());
        return j;
    }
};

namespace detail {

inline Int validate_derivation_node(const DerivationCert& c, int level, VerificationReport& rep,
                                    std::int64_t& nodes, std::int64_t& leaves, int& height) {
    ++nodes;
    height = std::max(height, level);
    if (derivation_is_leaf(c.kind)) {
        ++leaves;
        if (!c.children.empty()) rep.fail("leaf \"" + c.claim + "\" has children");
        if (c.bound < 1) rep.fail("leaf \"" + c.claim + "\" has non-positive bound " + c.bound.str());
        return c.bound;
    }
    if (c.children.size() < 2)
        rep.fail("node \"" + c.claim + "\" needs at least two children");
    if (c.kind == DerivationKind::disjoint_double && c.children.size() != 2)
        rep.fail("disjoint_double node \"" + c.claim + "\" needs exactly two children");
    Int expect = c.kind == DerivationKind::compose ? 1 : 0;
    for (const DerivationCert& ch : c.children) {
        const Int b = validate_derivation_node(ch, level + 1, rep, nodes, leaves, height);
        if (c.kind == DerivationKind::compose)
            expect *= b;
        else
            expect += b;
    }
    if (c.bound != expect)
        rep.fail("node \"" + c.claim + "\" declares bound " + c.bound.str() +
                 " but its children give " + expect.str());
    return c.bound;
}

}  // namespace detail

inline VerificationReport validate_derivation(const DerivationCert& root) {
    VerificationReport rep;
    rep.kind = "derivation";
    std::int64_t nodes = 0, leaves = 0;
    int height = 0;
    detail::validate_derivation_node(root, 0, rep, nodes, leaves, height);
    rep.counts["nodes"] = nodes;
    rep.counts["leaves"] = leaves;
    rep.counts["height"] = height;
    rep.note("bound = " + root.bound.str());
    return rep;
}

// A doubled ball realizes each copy with an absorber/remainder split of a
// moved and a kept cone block, four pieces per copy.
inline DerivationCert weak_form_leaf(std::string claim) {
    return {DerivationKind::weak_form_axiom, std::move(claim), Int(4), {}};
}

inline DerivationCert inclusion_leaf(std::string claim) {
    return {DerivationKind::inclusion, std::move(claim), Int(1), {}};
}

inline DerivationCert disjoint_double_plan() {
    DerivationCert first = weak_form_leaf("the ball rebuilds the first disjoint copy");
    DerivationCert second = weak_form_leaf("the ball rebuilds the second disjoint copy");
    return {DerivationKind::disjoint_double,
            "the ball matches two disjoint translates of itself",
            Int(8),
            {std::move(first), std::move(second)}};
}

// Flat inductive plan: the first translate is the set itself, each further
// translate costs one embedding plus one disjoint doubling. The bound grows
// by nine per extra translate.
inline DerivationCert n_fold_plan(int n) {
    if (n < 1) throw precondition_error("n_fold_plan: need at least one translate");
    if (n > 100000)
        throw resource_error("n_fold_plan: " + std::to_string(n) + " translates exceeds the plan cap");
    DerivationCert seed = inclusion_leaf("the set covers its own translate");
    if (n == 1) return seed;
    DerivationCert plan{DerivationKind::n_fold,
                        "the set matches a union of " + std::to_string(n) + " translates",
                        Int(1),
                        {std::move(seed)}};
    for (int i = 2; i <= n; ++i) {
        DerivationCert step{DerivationKind::bsb,
                            "absorb translate " + std::to_string(i),
                            Int(9),
                            {inclusion_leaf("the uncovered part of the next translate embeds"),
                             disjoint_double_plan()}};
        plan.bound += step.bound;
        plan.children.push_back(std::move(step));
    }
    return plan;
}

namespace detail {

// Least m with m >= 2*sqrt(3)*ratio, exactly: least m with m^2 d^2 >= 12 n^2.
inline Int covering_per_axis(const Rat& ratio) {
    const Int n = boost::multiprecision::numerator(ratio);
    const Int d = boost::multiprecision::denominator(ratio);
    const Int t = 12 * n * n;
    const Int dd = d * d;
    Int m = isqrt(t / dd);
    while (m * m * dd < t) ++m;
    return m;
}

}  // namespace detail

// Plan matching two ball-like bodies, each with an inner and an outer
// radius, through the smaller inner ball. A body that is not already that
// ball is covered by cube cells of side r/sqrt(3), each inside a translate
// of it, and pulled back with one inclusion on the other side.
inline DerivationCert strong_form_plan(const Rat& r_q, const Rat& big_r_q, const Rat& r_t,
                                       const Rat& big_r_t) {
    auto check = [](const Rat& r, const Rat& big_r, const char* who) {
        if (r <= 0 || big_r <= 0)
            throw precondition_error(std::string("strong_form_plan: ") + who +
                                     " radii must be positive");
        if (big_r < r)
            throw precondition_error(std::string("strong_form_plan: ") + who +
                                     " inner radius exceeds the outer radius");
    };
    check(r_q, big_r_q, "Q");
    check(r_t, big_r_t, "T");
    const Rat r_min = std::min(r_q, r_t);

    auto side = [&r_min](const Rat& r, const Rat& big_r, const std::string& who) {
        if (r == r_min && big_r == r_min) return inclusion_leaf(who + " is the common ball");
        const Int m = detail::covering_per_axis(big_r / r_min);
        const Int cells = m * m * m;
        if (cells > 100000)
            throw resource_error("strong_form_plan: covering " + who + " needs " + cells.str() +
                                 " cells");
        DerivationCert fold = n_fold_plan(cells.convert_to<int>());
        DerivationCert grow{DerivationKind::compose,
                            who + " embeds in " + cells.str() + " translates of the common ball",
                            fold.bound,
                            {inclusion_leaf(who + " lies in its outer ball"), std::move(fold)}};
        Int total = grow.bound + 1;
        return DerivationCert{DerivationKind::bsb,
                              who + " matches the common ball",
                              std::move(total),
                              {std::move(grow), inclusion_leaf("the common ball lies inside " + who)}};
    };
    DerivationCert left = side(r_q, big_r_q, "Q");
    DerivationCert right = side(r_t, big_r_t, "T");
    Int total = left.bound * right.bound;
    return {DerivationKind::compose,
            "Q matches T through the common ball",
            std::move(total),
            {std::move(left), std::move(right)}};
}

inline nlohmann::json cloud_to_json(const OrbitCloud& c) {
    nlohmann::json j;
    j["schema"] = kSchema;
    j["kind"] = "orbit-cloud";
    j["base"] = c.base.to_json();
    j["depth"] = c.depth;
    j["entries"] = nlohmann::json::array();
    for (const OrbitEntry& e : c.entries)
        j["entries"].push_back({{"word", e.word.str()},
                                {"label", piece_label_name(e.label)},
                                {"point", e.point.to_json()}});
    return j;
}

namespace detail {

inline SpherePoint sphere_point_from_json(const nlohmann::json& j) {
    SpherePoint t;
    try {
        for (int i = 0; i < 3; ++i) {
            t.p[i] = Int(j.at("p").at(i).get<std::string>());
            t.q[i] = Int(j.at("q").at(i).get<std::string>());
        }
        t.k = j.at("k").get<std::uint32_t>();
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("sphere point: ") + e.what());
    } catch (const std::runtime_error& e) {
        throw parse_error(std::string("sphere point: ") + e.what());
    }
    return t;
}

}  // namespace detail

// Serialize a cloud. csv and ply carry exact integer data plus 12-digit
// decimal coordinates; json round-trips exactly through import_cloud.
inline std::string export_cloud(const OrbitCloud& c, const std::string& format) {
    if (format == "json") return cloud_to_json(c).dump();
    if (format == "csv") {
        std::string out = "word,label,p0,q0,p1,q1,p2,q2,k,x,y,z\n";
        for (const OrbitEntry& e : c.entries) {
            const Vec3E v = e.point.to_vec();
            out += e.word.str();
            out += ',';
            out += piece_label_name(e.label);
            for (int i = 0; i < 3; ++i)
                out += ',' + e.point.p[i].str() + ',' + e.point.q[i].str();
            out += ',' + std::to_string(e.point.k);
            for (const RingScalar* s : {&v.x, &v.y, &v.z}) out += ',' + to_decimal(*s, 12);
            out += '\n';
        }
        return out;
    }
    if (format == "ply") {
        std::string out = "ply\nformat ascii 1.0\nelement vertex " +
                          std::to_string(c.entries.size()) +
                          "\nproperty float x\nproperty float y\nproperty float z\nproperty uchar "
                          "label\nend_header\n";
        for (const OrbitEntry& e : c.entries) {
            const Vec3E v = e.point.to_vec();
            out += to_decimal(v.x, 12) + ' ' + to_decimal(v.y, 12) + ' ' + to_decimal(v.z, 12) +
                   ' ' + std::to_string(static_cast<unsigned>(e.label)) + '\n';
        }
        return out;
    }
    throw parse_error("export_cloud: unsupported format: " + format);
}

// Rebuild a cloud from its json form. Every stored point and label is
// re-derived from the word and must match exactly.
inline OrbitCloud import_cloud(const nlohmann::json& doc) {
    OrbitCloud c;
    try {
        if (doc.at("kind").get<std::string>() != "orbit-cloud")
            throw parse_error("import_cloud: kind is not orbit-cloud");
        c.base = detail::sphere_point_from_json(doc.at("base")).canonical();
        c.depth = doc.at("depth").get<int>();
        if (!c.base.on_sphere()) throw parse_error("import_cloud: base is off the sphere");
        for (const nlohmann::json& je : doc.at("entries")) {
            Word w = Word::parse(je.at("word").get<std::string>());
            const SpherePoint stored = detail::sphere_point_from_json(je.at("point"));
            SpherePoint p = motion_apply(w, c.base);
            if (p != stored)
                throw parse_error("import_cloud: stored point of word " + w.str() +
                                  " does not match the orbit");
            const PieceLabel l = classify(w);
            if (je.at("label").get<std::string>() != piece_label_name(l))
                throw parse_error("import_cloud: stored label of word " + w.str() +
                                  " does not match");
            c.entries.push_back({std::move(w), std::move(p), l});
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("import_cloud: ") + e.what());
    }
    detail::index_cloud(c, "import_cloud");
    return c;
}

}  // namespace tarski
