#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace tarski {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Base of the library's exception family. Verification outcomes are reported
// via VerificationReport values; exceptions are reserved for contract breaches.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// A caller violated a documented precondition (unreduced word, point off the
// sphere, malformed certificate wiring, ...).
struct precondition_error : error {
    explicit precondition_error(const std::string& what) : error(what) {}
};

// An enumeration or search would exceed the configured budget.
struct resource_error : error {
    explicit resource_error(const std::string& what) : error(what) {}
};

// Malformed external input (JSON documents, point files, CLI values).
struct parse_error : error {
    explicit parse_error(const std::string& what) : error(what) {}
};

inline Int pow2(std::uint32_t e) { return Int(1) << e; }

inline Int pow3(std::uint32_t e) {
    Int r = 1;
    Int base = 3;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

inline Int pow_int(Int base, std::uint64_t e) {
    Int r = 1;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

// Floor square root of a nonnegative integer.
inline Int isqrt(const Int& n) {
    if (n < 0) throw precondition_error("isqrt: negative argument");
    return boost::multiprecision::sqrt(n);
}

// Word-count budget for ball enumerations and exhaustive searches.
// Overridable via the TARSKIKIT_MAX_WORDS environment variable.
inline std::uint64_t word_budget() {
    static const std::uint64_t cached = [] {
        if (const char* env = std::getenv("TARSKIKIT_MAX_WORDS")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end && *end == '\0' && v > 0) return static_cast<std::uint64_t>(v);
        }
        return std::uint64_t{20'000'000};
    }();
    return cached;
}

// Number of reduced words of length <= n: 2*3^n - 1.
inline Int ball_size(std::uint32_t n) { return 2 * pow3(n) - 1; }

inline void check_word_budget(const Int& requested, const char* who) {
    if (requested > Int(word_budget()))
        throw resource_error(std::string(who) + ": enumeration of " + requested.str() +
                             " words exceeds budget of " + std::to_string(word_budget()));
}

}  // namespace tarski
