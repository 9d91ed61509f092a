#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tarski/report.hpp"
#include "tarski/ring.hpp"
#include "tarski/word.hpp"

namespace tarski {

// Point [a, b*sqrt2, c] / 3^k. Evaluation keeps k equal to the number of
// letters applied, without reducing common factors of 3; the divisibility
// claim below is about this raw representation.
struct SphereTriple {
    Int a = 1, b = 0, c = 0;
    std::uint32_t k = 0;

    static SphereTriple base_point() { return {}; }

    bool on_sphere() const { return a * a + 2 * b * b + c * c == pow_int(9, k); }

    Vec3E to_vec() const {
        return {RingScalar(a, 0, 0, k), RingScalar(0, b, 0, k), RingScalar(c, 0, 0, k)};
    }

    // Same point of S^2, smallest k. Equality of points is equality of
    // canonical forms.
    SphereTriple canonical() const {
        SphereTriple t = *this;
        while (t.k > 0 && t.a % 3 == 0 && t.b % 3 == 0 && t.c % 3 == 0) {
            t.a /= 3;
            t.b /= 3;
            t.c /= 3;
            --t.k;
        }
        return t;
    }

    friend bool operator==(const SphereTriple& u, const SphereTriple& v) {
        SphereTriple cu = u.canonical(), cv = v.canonical();
        return cu.a == cv.a && cu.b == cv.b && cu.c == cv.c && cu.k == cv.k;
    }
    friend bool operator!=(const SphereTriple& u, const SphereTriple& v) { return !(u == v); }

    std::string str() const {
        return "[" + a.str() + "," + b.str() + "r2," + c.str() + "]/3^" + std::to_string(k);
    }
};

inline bool point_less(const SphereTriple& u, const SphereTriple& v) {
    SphereTriple cu = u.canonical(), cv = v.canonical();
    if (cu.a != cv.a) return cu.a < cv.a;
    if (cu.b != cv.b) return cu.b < cv.b;
    if (cu.c != cv.c) return cu.c < cv.c;
    return cu.k < cv.k;
}
inline std::string describe(const SphereTriple& t) { return t.str(); }

// sigma acts as phi (angle arccos(1/3) about z), tau as rho (same angle about x).
inline Mat3E letter_matrix(Letter l) {
    const RingScalar third = RingScalar::third();
    const RingScalar pos(0, 2, 0, 1);  // 2*sqrt2/3
    const RingScalar neg(0, -2, 0, 1);
    Mat3E m;
    if (l.gen == Gen::sigma) {
        m.at(0, 0) = third;
        m.at(0, 1) = l.inverse ? pos : neg;
        m.at(1, 0) = l.inverse ? neg : pos;
        m.at(1, 1) = third;
        m.at(2, 2) = 1;
    } else {
        m.at(0, 0) = 1;
        m.at(1, 1) = third;
        m.at(1, 2) = l.inverse ? pos : neg;
        m.at(2, 1) = l.inverse ? neg : pos;
        m.at(2, 2) = third;
    }
    return m;
}

inline Mat3E word_matrix(const Word& w) {
    Mat3E m = Mat3E::identity();
    for (std::size_t i = 0; i < w.length(); ++i) m = m * letter_matrix(w.at(i));
    return m;
}

// One step of the integer recurrences; k goes up by one.
inline SphereTriple apply_letter(Letter l, const SphereTriple& t) {
    SphereTriple r;
    r.k = t.k + 1;
    if (l.gen == Gen::sigma) {
        if (!l.inverse) {
            r.a = t.a - 4 * t.b;
            r.b = t.b + 2 * t.a;
        } else {
            r.a = t.a + 4 * t.b;
            r.b = t.b - 2 * t.a;
        }
        r.c = 3 * t.c;
    } else {
        r.a = 3 * t.a;
        if (!l.inverse) {
            r.b = t.b - 2 * t.c;
            r.c = t.c + 4 * t.b;
        } else {
            r.b = t.b + 2 * t.c;
            r.c = t.c - 4 * t.b;
        }
    }
    return r;
}

// w[1,0,0] as a triple with k = |w|; letters act right to left.
inline SphereTriple evaluate(const Word& w) {
    SphereTriple t = SphereTriple::base_point();
    for (std::size_t i = w.length(); i-- > 0;) t = apply_letter(w.at(i), t);
    return t;
}

// Rotation action of a word on any sphere point, canonicalized. This is the
// motion interface for certificates over orbit point sets.
inline SphereTriple motion_apply(const Word& w, const SphereTriple& x) {
    SphereTriple t = x;
    for (std::size_t i = w.length(); i-- > 0;) t = apply_letter(w.at(i), t);
    return t.canonical();
}

// For words ending in the sigma generator, 3 never divides b.
inline bool check_divisibility(const Word& w) {
    if (w.empty() || w.codes().back() != 's')
        throw precondition_error("check_divisibility: word must end in the sigma generator");
    return evaluate(w).b % 3 != 0;
}

// Conjugate (or invert a conjugate of) w into a word ending in sigma:
// cyclically reduce, then rotate to the nearest sigma from the right; if only
// inverse sigmas occur, invert first; a pure tau power is conjugated once.
inline Word phi_ending_conjugate(const Word& w) {
    if (w.empty()) throw precondition_error("phi_ending_conjugate: empty word");

    std::string u = w.codes();
    while (u.size() >= 2 && cancels(u.back(), u.front())) u = u.substr(1, u.size() - 2);

    auto rotate_to_sigma = [](const std::string& s) {
        std::size_t cut = s.rfind('s');
        // ... s[cut] | tail ...  becomes  tail ... head ... s[cut]
        return Word::from_codes(s.substr(cut + 1) + s.substr(0, cut + 1));
    };

    if (u.find('s') != std::string::npos) return rotate_to_sigma(u);
    if (u.find('S') != std::string::npos) {
        std::string inv(u.rbegin(), u.rend());
        for (char& ch : inv) ch = inverse_code(ch);
        return rotate_to_sigma(inv);
    }
    return Word::from_codes("S" + u + "s");
}

struct FreenessReport {
    std::uint32_t depth = 0;
    std::uint64_t words_checked = 0;
    std::vector<Word> divisibility_violations;
    std::vector<std::pair<Word, Word>> identity_collisions;

    bool pass() const { return divisibility_violations.empty() && identity_collisions.empty(); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema"] = kSchema;
        j["depth"] = depth;
        j["words_checked"] = words_checked;
        auto viol = nlohmann::json::array();
        for (const Word& w : divisibility_violations) viol.push_back(w.str());
        j["violations"] = viol;
        auto coll = nlohmann::json::array();
        for (const auto& [u, v] : identity_collisions)
            coll.push_back(nlohmann::json::array({u.str(), v.str()}));
        j["collisions"] = coll;
        j["pass"] = pass();
        return j;
    }
};

struct FreenessOptions {
    // Predicate deciding whether a word evaluates to the identity matrix.
    // Defaults to exact evaluation; replaceable to exercise the failure paths.
    std::function<bool(const Word&, const Mat3E&)> is_identity;
    std::size_t max_recorded = 16;
};

// Every nonempty reduced word of length <= L is certified nontrivial twice
// over: its sigma-ending conjugate has 3 ∤ b, and its exact matrix differs
// from the identity.
inline FreenessReport certify_freeness(std::uint32_t L, const FreenessOptions& opt = {}) {
    if (L < 1) throw precondition_error("certify_freeness: depth must be at least 1");
    check_word_budget(ball_size(L), "certify_freeness");

    const Mat3E ident = Mat3E::identity();
    auto is_identity = opt.is_identity
                           ? opt.is_identity
                           : [&ident](const Word&, const Mat3E& m) { return m == ident; };

    FreenessReport rep;
    rep.depth = L;

    std::string codes;
    std::vector<Mat3E> stack{ident};

    auto visit = [&](auto&& self) -> void {
        if (!codes.empty()) {
            ++rep.words_checked;
            Word w = Word::from_codes(codes);
            if (!check_divisibility(phi_ending_conjugate(w)) &&
                rep.divisibility_violations.size() < opt.max_recorded)
                rep.divisibility_violations.push_back(w);
            if (is_identity(w, stack.back()) &&
                rep.identity_collisions.size() < opt.max_recorded)
                rep.identity_collisions.emplace_back(w, Word());
        }
        if (codes.size() == L) return;
        for (char c : kLetterCodes) {
            if (!codes.empty() && cancels(codes.back(), c)) continue;
            codes.push_back(c);
            stack.push_back(stack[stack.size() - 1] * letter_matrix(Letter::from_code(c)));
            self(self);
            stack.pop_back();
            codes.pop_back();
        }
    };
    visit(visit);
    return rep;
}

}  // namespace tarski
