#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>

#include <json.hpp>

#include "tarski/core.hpp"

namespace tarski {

// Element of Z[sqrt2] localized at {2,3}: (p + q*sqrt2) / (2^a * 3^b).
// Canonical form: if a > 0 then p,q not both even; if b > 0 then p,q not both
// divisible by 3. Irrationality of sqrt2 makes the canonical form unique, so
// structural equality is value equality.
class RingScalar {
public:
    RingScalar() = default;
    RingScalar(Int p, Int q, std::uint32_t a = 0, std::uint32_t b = 0)
        : p_(std::move(p)), q_(std::move(q)), a_(a), b_(b) {
        canonicalize();
    }
    RingScalar(int v) : p_(v) {}  // NOLINT: implicit on purpose, integers embed

    static RingScalar sqrt2() { return RingScalar(0, 1); }
    static RingScalar half() { return RingScalar(1, 0, 1, 0); }
    static RingScalar third() { return RingScalar(1, 0, 0, 1); }

    const Int& p() const { return p_; }
    const Int& q() const { return q_; }
    std::uint32_t a() const { return a_; }
    std::uint32_t b() const { return b_; }

    bool is_zero() const { return p_ == 0 && q_ == 0; }
    bool is_one() const { return p_ == 1 && q_ == 0 && a_ == 0 && b_ == 0; }

    friend RingScalar operator+(const RingScalar& u, const RingScalar& v) {
        std::uint32_t a = std::max(u.a_, v.a_), b = std::max(u.b_, v.b_);
        Int su = pow2(a - u.a_) * pow3(b - u.b_);
        Int sv = pow2(a - v.a_) * pow3(b - v.b_);
        return RingScalar(u.p_ * su + v.p_ * sv, u.q_ * su + v.q_ * sv, a, b);
    }
    friend RingScalar operator-(const RingScalar& u) { return RingScalar(-u.p_, -u.q_, u.a_, u.b_); }
    friend RingScalar operator-(const RingScalar& u, const RingScalar& v) { return u + (-v); }
    friend RingScalar operator*(const RingScalar& u, const RingScalar& v) {
        return RingScalar(u.p_ * v.p_ + 2 * u.q_ * v.q_, u.p_ * v.q_ + u.q_ * v.p_, u.a_ + v.a_,
                          u.b_ + v.b_);
    }
    friend bool operator==(const RingScalar& u, const RingScalar& v) {
        return u.p_ == v.p_ && u.q_ == v.q_ && u.a_ == v.a_ && u.b_ == v.b_;
    }
    friend bool operator!=(const RingScalar& u, const RingScalar& v) { return !(u == v); }

    // Exact sign of the real value p + q*sqrt2 (denominator is positive).
    int sign() const {
        int sp = p_.sign(), sq = q_.sign();
        if (sq == 0) return sp;
        if (sp == 0) return sq;
        if (sp == sq) return sp;
        // Mixed signs: compare p^2 with 2 q^2; equality would force p = q = 0.
        Int d = p_ * p_ - 2 * q_ * q_;
        return sp > 0 ? d.sign() : -d.sign();
    }

    friend bool operator<(const RingScalar& u, const RingScalar& v) { return (u - v).sign() < 0; }
    friend bool operator<=(const RingScalar& u, const RingScalar& v) { return (u - v).sign() <= 0; }
    friend bool operator>(const RingScalar& u, const RingScalar& v) { return (u - v).sign() > 0; }
    friend bool operator>=(const RingScalar& u, const RingScalar& v) { return (u - v).sign() >= 0; }

    RingScalar abs() const { return sign() < 0 ? -*this : *this; }

    // Structural key order, cheaper than numeric comparison; used for sorted containers.
    static bool key_less(const RingScalar& u, const RingScalar& v) {
        if (u.p_ != v.p_) return u.p_ < v.p_;
        if (u.q_ != v.q_) return u.q_ < v.q_;
        if (u.a_ != v.a_) return u.a_ < v.a_;
        return u.b_ < v.b_;
    }

    std::string str() const {
        std::string s = "(" + p_.str();
        if (q_ != 0) s += (q_ > 0 ? "+" : "") + q_.str() + "r2";
        s += ")";
        if (a_ || b_) {
            s += "/(";
            if (a_) s += "2^" + std::to_string(a_);
            if (a_ && b_) s += "*";
            if (b_) s += "3^" + std::to_string(b_);
            s += ")";
        }
        return s;
    }

    nlohmann::json to_json() const {
        return nlohmann::json::array(
            {p_.str(), q_.str(), std::to_string(a_), std::to_string(b_)});
    }
    static RingScalar from_json(const nlohmann::json& j) {
        if (!j.is_array() || j.size() != 4) throw parse_error("RingScalar: expected 4-tuple");
        auto field = [&](int i) -> std::string {
            if (!j[i].is_string()) throw parse_error("RingScalar: tuple entries must be strings");
            return j[i].get<std::string>();
        };
        try {
            return RingScalar(Int(field(0)), Int(field(1)),
                              static_cast<std::uint32_t>(std::stoul(field(2))),
                              static_cast<std::uint32_t>(std::stoul(field(3))));
        } catch (const std::exception& e) {
            throw parse_error(std::string("RingScalar: bad tuple: ") + e.what());
        }
    }

private:
    void canonicalize() {
        while (a_ > 0 && p_ % 2 == 0 && q_ % 2 == 0) {
            p_ >>= 1;
            q_ >>= 1;
            --a_;
        }
        while (b_ > 0 && p_ % 3 == 0 && q_ % 3 == 0) {
            p_ /= 3;
            q_ /= 3;
            --b_;
        }
        if (p_ == 0 && q_ == 0) {
            a_ = 0;
            b_ = 0;
        }
    }

    Int p_ = 0;
    Int q_ = 0;
    std::uint32_t a_ = 0;
    std::uint32_t b_ = 0;
};

// Decimal rendering with `digits` fraction digits, round half away from zero.
// Bounds q*sqrt2 by consecutive integers via integer square root and widens
// the guard scale until both bounds round identically; irrationality of sqrt2
// guarantees termination for q != 0, and q = 0 is exact rational rounding.
inline std::string to_decimal(const RingScalar& s, unsigned digits) {
    const Int den = pow2(s.a()) * pow3(s.b());
    const Int scale = pow_int(10, digits);

    Int units;  // round(value * 10^digits), computed below
    if (s.q() == 0) {
        Int num = s.p() * scale;
        Int twice = 2 * num;
        // round half away from zero: sign * floor((2|num| + den) / (2 den))
        Int mag = (twice < 0 ? -twice : twice) + den;
        units = mag / (2 * den);
        if (twice < 0) units = -units;
    } else {
        for (unsigned guard = 24;; guard *= 2) {
            const Int g = pow_int(10, guard);
            const Int d = den * g;
            const Int base = s.p() * scale * g;
            // lo <= q*sqrt2 * scale * g < lo + 1
            Int qs = s.q() * scale * g;
            Int lo = qs >= 0 ? isqrt(2 * qs * qs) : -(isqrt(2 * qs * qs) + 1);
            Int nlo = base + lo, nhi = base + lo + 1;
            auto round_div = [&](const Int& n) {
                Int twice = 2 * n;
                Int mag = (twice < 0 ? -twice : twice) + d;
                Int r = mag / (2 * d);
                return twice < 0 ? Int(-r) : r;
            };
            Int rlo = round_div(nlo), rhi = round_div(nhi);
            if (rlo == rhi) {
                units = rlo;
                break;
            }
        }
    }

    bool neg = units < 0;
    Int mag = neg ? Int(-units) : units;
    Int ip = mag / scale, fp = mag % scale;
    std::string out = (neg && (ip != 0 || fp != 0)) ? "-" : "";
    out += ip.str();
    if (digits > 0) {
        std::string frac = fp.str();
        out += "." + std::string(digits - frac.size(), '0') + frac;
    }
    return out;
}

struct Vec3E {
    RingScalar x, y, z;

    friend Vec3E operator+(const Vec3E& u, const Vec3E& v) {
        return {u.x + v.x, u.y + v.y, u.z + v.z};
    }
    friend Vec3E operator-(const Vec3E& u, const Vec3E& v) {
        return {u.x - v.x, u.y - v.y, u.z - v.z};
    }
    friend Vec3E operator-(const Vec3E& u) { return {-u.x, -u.y, -u.z}; }
    friend Vec3E operator*(const RingScalar& c, const Vec3E& v) {
        return {c * v.x, c * v.y, c * v.z};
    }
    friend bool operator==(const Vec3E& u, const Vec3E& v) {
        return u.x == v.x && u.y == v.y && u.z == v.z;
    }
    friend bool operator!=(const Vec3E& u, const Vec3E& v) { return !(u == v); }

    static Vec3E zero() { return {0, 0, 0}; }

    nlohmann::json to_json() const {
        return nlohmann::json::array({x.to_json(), y.to_json(), z.to_json()});
    }
    static Vec3E from_json(const nlohmann::json& j) {
        if (!j.is_array() || j.size() != 3) throw parse_error("Vec3E: expected 3 tuples");
        return {RingScalar::from_json(j[0]), RingScalar::from_json(j[1]),
                RingScalar::from_json(j[2])};
    }
};

inline RingScalar dot(const Vec3E& u, const Vec3E& v) {
    return u.x * v.x + u.y * v.y + u.z * v.z;
}
inline Vec3E cross(const Vec3E& u, const Vec3E& v) {
    return {u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
}
inline RingScalar norm_sq(const Vec3E& v) { return dot(v, v); }

// Structural order for sorted point sets; not the numeric order.
inline bool vec_key_less(const Vec3E& u, const Vec3E& v) {
    if (u.x != v.x) return RingScalar::key_less(u.x, v.x);
    if (u.y != v.y) return RingScalar::key_less(u.y, v.y);
    return RingScalar::key_less(u.z, v.z);
}
inline bool point_less(const Vec3E& u, const Vec3E& v) { return vec_key_less(u, v); }

struct Mat3E {
    std::array<RingScalar, 9> m;  // row-major

    const RingScalar& at(int r, int c) const { return m[3 * r + c]; }
    RingScalar& at(int r, int c) { return m[3 * r + c]; }

    static Mat3E identity() {
        Mat3E I;
        I.at(0, 0) = 1;
        I.at(1, 1) = 1;
        I.at(2, 2) = 1;
        return I;
    }

    friend Mat3E operator*(const Mat3E& A, const Mat3E& B) {
        Mat3E C;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                C.at(r, c) =
                    A.at(r, 0) * B.at(0, c) + A.at(r, 1) * B.at(1, c) + A.at(r, 2) * B.at(2, c);
        return C;
    }
    friend Vec3E operator*(const Mat3E& A, const Vec3E& v) {
        return {A.at(0, 0) * v.x + A.at(0, 1) * v.y + A.at(0, 2) * v.z,
                A.at(1, 0) * v.x + A.at(1, 1) * v.y + A.at(1, 2) * v.z,
                A.at(2, 0) * v.x + A.at(2, 1) * v.y + A.at(2, 2) * v.z};
    }
    friend bool operator==(const Mat3E& A, const Mat3E& B) { return A.m == B.m; }
    friend bool operator!=(const Mat3E& A, const Mat3E& B) { return !(A == B); }

    Mat3E transpose() const {
        Mat3E T;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) T.at(r, c) = at(c, r);
        return T;
    }

    nlohmann::json to_json() const {
        auto j = nlohmann::json::array();
        for (const auto& e : m) j.push_back(e.to_json());
        return j;
    }
};

inline RingScalar det(const Mat3E& A) {
    return A.at(0, 0) * (A.at(1, 1) * A.at(2, 2) - A.at(1, 2) * A.at(2, 1)) -
           A.at(0, 1) * (A.at(1, 0) * A.at(2, 2) - A.at(1, 2) * A.at(2, 0)) +
           A.at(0, 2) * (A.at(1, 0) * A.at(2, 1) - A.at(1, 1) * A.at(2, 0));
}

inline bool is_rotation(const Mat3E& A) {
    return A * A.transpose() == Mat3E::identity() && det(A) == RingScalar(1);
}

// Rigid motion x -> linear*x + translation with a rotation linear part.
struct IsometryE {
    Mat3E linear = Mat3E::identity();
    Vec3E translation = Vec3E::zero();

    static IsometryE identity() { return {}; }
    static IsometryE rotation(const Mat3E& R) { return {R, Vec3E::zero()}; }
    static IsometryE translate(const Vec3E& t) { return {Mat3E::identity(), t}; }

    Vec3E apply(const Vec3E& x) const { return linear * x + translation; }

    friend bool operator==(const IsometryE& g, const IsometryE& h) {
        return g.linear == h.linear && g.translation == h.translation;
    }
    friend bool operator!=(const IsometryE& g, const IsometryE& h) { return !(g == h); }
};

inline IsometryE compose(const IsometryE& g, const IsometryE& h) {
    return {g.linear * h.linear, g.linear * h.translation + g.translation};
}

inline IsometryE invert(const IsometryE& g) {
    if (!is_rotation(g.linear)) throw precondition_error("invert: linear part is not a rotation");
    Mat3E rt = g.linear.transpose();
    return {rt, -(rt * g.translation)};
}

// Motion interface used by the certificate machinery.
inline Vec3E motion_apply(const Mat3E& g, const Vec3E& x) { return g * x; }
inline Mat3E motion_compose(const Mat3E& g, const Mat3E& h) { return g * h; }
inline Mat3E motion_invert(const Mat3E& g) {
    if (!is_rotation(g)) throw precondition_error("motion_invert: matrix is not a rotation");
    return g.transpose();
}
inline nlohmann::json motion_to_json(const Mat3E& g) { return g.to_json(); }

inline Vec3E motion_apply(const IsometryE& g, const Vec3E& x) { return g.apply(x); }
inline IsometryE motion_compose(const IsometryE& g, const IsometryE& h) { return compose(g, h); }
inline IsometryE motion_invert(const IsometryE& g) { return invert(g); }
inline nlohmann::json motion_to_json(const IsometryE& g) {
    return {{"linear", g.linear.to_json()}, {"translation", g.translation.to_json()}};
}

inline std::string describe(const Vec3E& v) {
    return "[" + v.x.str() + "," + v.y.str() + "," + v.z.str() + "]";
}

}  // namespace tarski
