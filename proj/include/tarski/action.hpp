#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tarski/group_doubling.hpp"
#include "tarski/orbit.hpp"
#include "tarski/report.hpp"

namespace tarski {

// A finite group acting on a finite point set. Both the multiplication and
// action tables are validated exhaustively on construction: identity behavior,
// compatibility act(gh, x) = act(g, act(h, x)), and bijectivity of every
// act(g, .); violations throw with a concrete witness.
class FiniteAction {
public:
    template <class MulFn, class ActFn>
    FiniteAction(std::vector<std::string> elements, const std::string& identity, MulFn mul,
                 std::vector<std::string> points, ActFn act)
        : elems_(std::move(elements)), pts_(std::move(points)) {
        build_indices();
        id_ = elem_index(identity);
        mul_.resize(elems_.size() * elems_.size());
        for (std::size_t i = 0; i < elems_.size(); ++i)
            for (std::size_t j = 0; j < elems_.size(); ++j)
                mul_[i * elems_.size() + j] = static_cast<std::uint32_t>(
                    elem_index(mul(elems_[i], elems_[j])));
        act_.resize(elems_.size() * pts_.size());
        for (std::size_t i = 0; i < elems_.size(); ++i)
            for (std::size_t x = 0; x < pts_.size(); ++x)
                act_[i * pts_.size() + x] = static_cast<std::uint32_t>(
                    point_index(act(elems_[i], pts_[x])));
        validate();
    }

    static FiniteAction from_json(const nlohmann::json& doc) {
        if (!doc.is_object()) throw parse_error("action document: not a JSON object");
        for (const char* key : {"elements", "identity", "mul_table", "points", "act_table"})
            if (!doc.contains(key))
                throw parse_error(std::string("action document: missing key '") + key + "'");
        auto names = [](const nlohmann::json& arr, const char* what) {
            if (!arr.is_array()) throw parse_error(std::string(what) + ": not an array");
            std::vector<std::string> out;
            for (const auto& v : arr) {
                if (!v.is_string()) throw parse_error(std::string(what) + ": non-string entry");
                out.push_back(v.get<std::string>());
            }
            return out;
        };
        auto lookup = [](const nlohmann::json& table, const std::string& a,
                         const std::string& b, const char* what) {
            if (!table.contains(a) || !table.at(a).contains(b) || !table.at(a).at(b).is_string())
                throw parse_error(std::string(what) + ": missing entry (" + a + ", " + b + ")");
            return table.at(a).at(b).get<std::string>();
        };
        const nlohmann::json& mt = doc.at("mul_table");
        const nlohmann::json& at = doc.at("act_table");
        if (!doc.at("identity").is_string()) throw parse_error("action document: identity not a string");
        return FiniteAction(
            names(doc.at("elements"), "elements"), doc.at("identity").get<std::string>(),
            [&](const std::string& g, const std::string& h) { return lookup(mt, g, h, "mul_table"); },
            names(doc.at("points"), "points"),
            [&](const std::string& g, const std::string& x) { return lookup(at, g, x, "act_table"); });
    }

    const std::vector<std::string>& elements() const { return elems_; }
    const std::vector<std::string>& points() const { return pts_; }
    const std::string& identity() const { return elems_[id_]; }

    const std::string& mul(const std::string& g, const std::string& h) const {
        return elems_[mul_[elem_index(g) * elems_.size() + elem_index(h)]];
    }
    const std::string& act(const std::string& g, const std::string& x) const {
        return pts_[act_[elem_index(g) * pts_.size() + point_index(x)]];
    }

private:
    std::vector<std::string> elems_, pts_;
    std::size_t id_ = 0;
    std::vector<std::uint32_t> mul_, act_;
    std::map<std::string, std::size_t> eidx_, pidx_;

    void build_indices() {
        if (elems_.empty()) throw precondition_error("action: no group elements");
        for (std::size_t i = 0; i < elems_.size(); ++i)
            if (!eidx_.emplace(elems_[i], i).second)
                throw precondition_error("action: duplicate element '" + elems_[i] + "'");
        for (std::size_t i = 0; i < pts_.size(); ++i)
            if (!pidx_.emplace(pts_[i], i).second)
                throw precondition_error("action: duplicate point '" + pts_[i] + "'");
    }

    std::size_t elem_index(const std::string& g) const {
        auto it = eidx_.find(g);
        if (it == eidx_.end()) throw precondition_error("action: unknown element '" + g + "'");
        return it->second;
    }
    std::size_t point_index(const std::string& x) const {
        auto it = pidx_.find(x);
        if (it == pidx_.end()) throw precondition_error("action: unknown point '" + x + "'");
        return it->second;
    }

    void validate() const {
        const std::size_t n = elems_.size(), m = pts_.size();
        for (std::size_t x = 0; x < m; ++x)
            if (act_[id_ * m + x] != x)
                throw precondition_error("action: identity moves point '" + pts_[x] + "'");
        std::vector<char> seen(m);
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(seen.begin(), seen.end(), 0);
            for (std::size_t x = 0; x < m; ++x) {
                std::uint32_t y = act_[i * m + x];
                if (seen[y])
                    throw precondition_error("action: '" + elems_[i] +
                                             "' is not a bijection, hits '" + pts_[y] + "' twice");
                seen[y] = 1;
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                std::size_t ij = mul_[i * n + j];
                for (std::size_t x = 0; x < m; ++x) {
                    std::uint32_t lhs = act_[ij * m + x];
                    std::uint32_t rhs = act_[i * m + act_[j * m + x]];
                    if (lhs != rhs)
                        throw precondition_error("action: axiom fails at (" + elems_[i] + ", " +
                                                 elems_[j] + ", " + pts_[x] + ")");
                }
            }
    }
};

struct OrbitPartition {
    std::vector<std::vector<std::string>> blocks;  // each sorted; ordered by first point
    std::map<std::string, std::size_t> index;
};

inline OrbitPartition orbits(const FiniteAction& a) {
    OrbitPartition part;
    std::vector<std::string> order = a.points();
    std::sort(order.begin(), order.end());
    for (const std::string& x : order) {
        if (part.index.count(x)) continue;
        std::vector<std::string> block;
        for (const std::string& g : a.elements()) block.push_back(a.act(g, x));
        std::sort(block.begin(), block.end());
        block.erase(std::unique(block.begin(), block.end()), block.end());
        for (const std::string& y : block) part.index[y] = part.blocks.size();
        part.blocks.push_back(std::move(block));
    }
    return part;
}

inline bool is_free(const FiniteAction& a) {
    for (const std::string& g : a.elements()) {
        if (g == a.identity()) continue;
        for (const std::string& x : a.points())
            if (a.act(g, x) == x) return false;
    }
    return true;
}

struct RepresentativeSet {
    std::vector<std::string> reps;  // one per block, in block order
};

// Deterministic choice: the minimum point of each orbit block.
inline RepresentativeSet choose_representatives(const OrbitPartition& p) {
    RepresentativeSet m;
    for (const auto& block : p.blocks) m.reps.push_back(block.front());
    return m;
}

// Checks that the translates g(M) are pairwise disjoint and cover the carrier.
// Free actions always pass; a fixed point makes two translates meet.
inline VerificationReport translates_partition(const FiniteAction& a,
                                               const RepresentativeSet& m) {
    VerificationReport rep;
    rep.kind = "translates-partition";
    rep.depth = 0;
    rep.counts["group"] = static_cast<std::int64_t>(a.elements().size());
    rep.counts["points"] = static_cast<std::int64_t>(a.points().size());
    rep.counts["representatives"] = static_cast<std::int64_t>(m.reps.size());

    std::map<std::string, std::string> owner;  // point -> first translate owning it
    for (const std::string& g : a.elements()) {
        for (const std::string& x : m.reps) {
            std::string y = a.act(g, x);
            auto [it, fresh] = owner.emplace(y, g);
            if (!fresh)
                rep.fail("translates of '" + it->second + "' and '" + g + "' overlap at '" +
                         y + "'");
        }
    }
    for (const std::string& x : a.points())
        if (!owner.count(x)) rep.fail("point '" + x + "' is in no translate");
    rep.counts["covered"] = static_cast<std::int64_t>(owner.size());
    return rep;
}

// The star transform B* = union of g(M) over g in B.
inline std::vector<std::string> star(const std::vector<std::string>& b,
                                     const RepresentativeSet& m, const FiniteAction& a) {
    std::vector<std::string> out;
    for (const std::string& g : b)
        for (const std::string& x : m.reps) out.push_back(a.act(g, x));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Lifts a partition of the group to the partition {B_i*} of the carrier.
inline std::vector<std::vector<std::string>> lift_partition(
    const std::vector<std::vector<std::string>>& blocks, const RepresentativeSet& m,
    const FiniteAction& a) {
    std::vector<std::string> all;
    for (const auto& b : blocks) {
        if (b.empty()) throw precondition_error("lift_partition: empty block");
        all.insert(all.end(), b.begin(), b.end());
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        throw precondition_error("lift_partition: blocks overlap");
    std::vector<std::string> want = a.elements();
    std::sort(want.begin(), want.end());
    if (all != want) throw precondition_error("lift_partition: blocks do not cover the group");
    if (!is_free(a)) throw precondition_error("lift_partition: action is not free");

    std::vector<std::vector<std::string>> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) out.push_back(star(b, m, a));
    return out;
}

using SphereCert = EquidecompositionCert<SpherePoint, Word>;

// Moves the word-level doubling pair onto the orbit of a base point: word
// pieces become exact orbit point sets, the motions act as rotations. The
// base must be free of relations to twice the working depth so that words
// and points correspond one to one.
inline std::pair<SphereCert, SphereCert> transfer_paradox(const WordCert& first,
                                                          const WordCert& second,
                                                          const SpherePoint& base, int depth) {
    if (depth < 0) throw precondition_error("transfer_paradox: negative depth");
    if (!stabilizer_certify(base, 2 * depth))
        throw precondition_error("transfer_paradox: base point " + base.str() +
                                 " has a relation within depth " + std::to_string(2 * depth));
    auto oc = std::make_shared<const OrbitCloud>(build_orbit_cloud(base, depth));
    auto project = [&](const WordCert& wc) {
        SphereCert c;
        c.source = orbit_restrict_view(oc, wc.source);
        c.target = orbit_restrict_view(oc, wc.target);
        for (const auto& pc : wc.pieces)
            c.pieces.push_back({orbit_restrict_view(oc, pc.set), pc.motion});
        c.margin = std::max({wc.margin, wc.max_slack(), 1});
        return c;
    };
    return {project(first), project(second)};
}

inline std::pair<SphereCert, SphereCert> transfer_paradox(const WordCert& first,
                                                          const WordCert& second,
                                                          const SphereTriple& base, int depth) {
    return transfer_paradox(first, second, SpherePoint::from_triple(base), depth);
}

}  // namespace tarski
