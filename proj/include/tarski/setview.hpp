#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tarski/core.hpp"

namespace tarski {

namespace detail {

// Customization points resolved by ADL with generic fallbacks.
template <class P>
int depth_of(const P& x) {
    if constexpr (requires { point_depth(x); })
        return point_depth(x);
    else
        return 0;
}

template <class P>
bool pt_less(const P& a, const P& b) {
    if constexpr (requires { point_less(a, b); })
        return point_less(a, b);
    else
        return a < b;
}

template <class P>
bool pt_eq(const P& a, const P& b) {
    return !pt_less(a, b) && !pt_less(b, a);
}

template <class P>
std::string pt_describe(const P& x) {
    if constexpr (requires { describe(x); })
        return describe(x);
    else if constexpr (requires { std::to_string(x); })
        return std::to_string(x);
    else
        return "<point>";
}

template <class P>
nlohmann::json pt_json(const P& x) {
    if constexpr (requires { x.to_json(); })
        return x.to_json();
    else if constexpr (std::is_integral_v<P>)
        return x;
    else
        return pt_describe(x);
}

template <class P>
void sort_unique(std::vector<P>& pts) {
    std::sort(pts.begin(), pts.end(), pt_less<P>);
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const P& a, const P& b) { return pt_eq(a, b); }),
              pts.end());
}

}  // namespace detail

// View of a point set: either an explicit sorted finite set, or a lazy set
// given by a membership test plus a bounded enumerator. A lazy enumerator may
// return nothing (membership-only view of a set with no finite description);
// verification then relies on the membership side alone.
template <class P>
class SetView {
public:
    using MemberFn = std::function<bool(const P&)>;
    using EnumFn = std::function<std::vector<P>(int)>;

    SetView() : pts_(std::make_shared<const std::vector<P>>()), name_("explicit") {}

    static SetView explicit_set(std::vector<P> pts) {
        detail::sort_unique(pts);
        SetView v;
        v.pts_ = std::make_shared<const std::vector<P>>(std::move(pts));
        v.name_ = "explicit";
        return v;
    }

    static SetView lazy(std::string name, MemberFn member, EnumFn enumerate,
                        nlohmann::json params = nlohmann::json::object()) {
        SetView v;
        v.pts_ = nullptr;
        v.member_ = std::move(member);
        v.enum_ = std::move(enumerate);
        v.name_ = std::move(name);
        v.params_ = std::move(params);
        return v;
    }

    // Membership-only view; enumerates to nothing at every depth.
    static SetView lazy_membership(std::string name, MemberFn member,
                                   nlohmann::json params = nlohmann::json::object()) {
        return lazy(std::move(name), std::move(member),
                    [](int) { return std::vector<P>{}; }, std::move(params));
    }

    bool is_explicit() const { return pts_ != nullptr; }
    const std::string& name() const { return name_; }

    bool member(const P& x) const {
        if (pts_)
            return std::binary_search(pts_->begin(), pts_->end(), x, detail::pt_less<P>);
        return member_(x);
    }

    // All members of depth <= depth. For explicit sets this filters by the
    // point's own depth (0 for finite-model points, so the full set).
    std::vector<P> enumerate(int depth) const {
        if (pts_) {
            std::vector<P> out;
            out.reserve(pts_->size());
            for (const P& x : *pts_)
                if (detail::depth_of(x) <= depth) out.push_back(x);
            return out;
        }
        auto out = enum_(depth);
        detail::sort_unique(out);
        return out;
    }

    const std::vector<P>& points() const {
        if (!pts_) throw precondition_error("SetView::points: not an explicit set");
        return *pts_;
    }

    std::size_t size_hint() const { return pts_ ? pts_->size() : 0; }

    nlohmann::json to_json() const {
        nlohmann::json j;
        if (pts_) {
            j["kind"] = "explicit";
            auto arr = nlohmann::json::array();
            for (const P& x : *pts_) arr.push_back(detail::pt_json(x));
            j["points"] = arr;
        } else {
            j["kind"] = "lazy";
            j["name"] = name_;
            j["params"] = params_;
        }
        return j;
    }

private:
    std::shared_ptr<const std::vector<P>> pts_;
    MemberFn member_;
    EnumFn enum_;
    std::string name_;
    nlohmann::json params_;
};

template <class P>
SetView<P> set_difference(const SetView<P>& A, const SetView<P>& B) {
    if (A.is_explicit()) {
        std::vector<P> out;
        for (const P& x : A.points())
            if (!B.member(x)) out.push_back(x);
        return SetView<P>::explicit_set(std::move(out));
    }
    return SetView<P>::lazy(
        "difference", [A, B](const P& x) { return A.member(x) && !B.member(x); },
        [A, B](int d) {
            std::vector<P> out;
            for (P& x : A.enumerate(d))
                if (!B.member(x)) out.push_back(std::move(x));
            return out;
        },
        nlohmann::json{{"left", A.name()}, {"right", B.name()}});
}

template <class P>
SetView<P> set_intersection(const SetView<P>& A, const SetView<P>& B) {
    if (A.is_explicit()) {
        std::vector<P> out;
        for (const P& x : A.points())
            if (B.member(x)) out.push_back(x);
        return SetView<P>::explicit_set(std::move(out));
    }
    if (B.is_explicit()) return set_intersection(B, A);
    return SetView<P>::lazy(
        "intersection", [A, B](const P& x) { return A.member(x) && B.member(x); },
        [A, B](int d) {
            std::vector<P> out;
            for (P& x : A.enumerate(d))
                if (B.member(x)) out.push_back(std::move(x));
            return out;
        },
        nlohmann::json{{"left", A.name()}, {"right", B.name()}});
}

template <class P>
SetView<P> set_union(std::vector<SetView<P>> parts) {
    bool all_explicit = std::all_of(parts.begin(), parts.end(),
                                    [](const SetView<P>& v) { return v.is_explicit(); });
    if (all_explicit) {
        std::vector<P> out;
        for (const auto& v : parts) out.insert(out.end(), v.points().begin(), v.points().end());
        return SetView<P>::explicit_set(std::move(out));
    }
    auto shared = std::make_shared<const std::vector<SetView<P>>>(std::move(parts));
    return SetView<P>::lazy(
        "union",
        [shared](const P& x) {
            for (const auto& v : *shared)
                if (v.member(x)) return true;
            return false;
        },
        [shared](int d) {
            std::vector<P> out;
            for (const auto& v : *shared) {
                auto part = v.enumerate(d);
                out.insert(out.end(), part.begin(), part.end());
            }
            return out;
        },
        nlohmann::json{{"parts", shared->size()}});
}

}  // namespace tarski
