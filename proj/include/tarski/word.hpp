#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tarski/core.hpp"

namespace tarski {

enum class Gen : std::uint8_t { sigma, tau };

struct Letter {
    Gen gen;
    bool inverse;

    char code() const {
        return gen == Gen::sigma ? (inverse ? 'S' : 's') : (inverse ? 'T' : 't');
    }
    static Letter from_code(char c) {
        switch (c) {
            case 's': return {Gen::sigma, false};
            case 'S': return {Gen::sigma, true};
            case 't': return {Gen::tau, false};
            case 'T': return {Gen::tau, true};
        }
        throw parse_error(std::string("Letter: bad code '") + c + "'");
    }
    Letter inverted() const { return {gen, !inverse}; }

    friend bool operator==(const Letter& a, const Letter& b) {
        return a.gen == b.gen && a.inverse == b.inverse;
    }
};

inline bool is_letter_code(char c) { return c == 's' || c == 'S' || c == 't' || c == 'T'; }
inline char inverse_code(char c) {
    return static_cast<char>(c >= 'a' ? c - ('a' - 'A') : c + ('a' - 'A'));
}
inline bool cancels(char a, char b) { return a != b && inverse_code(a) == b; }

inline bool is_reduced(std::string_view codes) {
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (!is_letter_code(codes[i])) return false;
        if (i > 0 && cancels(codes[i - 1], codes[i])) return false;
    }
    return true;
}

// Letter codes in enumeration-rank order.
inline constexpr char kLetterCodes[4] = {'s', 'S', 't', 'T'};

// Enumeration rank: sigma < sigma^-1 < tau < tau^-1. Distinct from ASCII order.
inline int letter_rank(char c) {
    switch (c) {
        case 's': return 0;
        case 'S': return 1;
        case 't': return 2;
        case 'T': return 3;
    }
    throw precondition_error("letter_rank: bad code");
}

// Reduced word over {sigma, tau}; empty word is the identity.
class Word {
public:
    Word() = default;

    static Word from_codes(std::string codes) {
        if (!is_reduced(codes)) throw precondition_error("Word: codes not reduced: " + codes);
        Word w;
        w.s_ = std::move(codes);
        return w;
    }
    static Word parse(std::string_view text) {
        if (text == "e") return {};
        if (text.empty() || !is_reduced(text))
            throw parse_error("Word: expected \"e\" or a reduced {s,S,t,T} string, got \"" +
                              std::string(text) + "\"");
        Word w;
        w.s_ = std::string(text);
        return w;
    }

    static Word sigma() { return from_codes("s"); }
    static Word sigma_inv() { return from_codes("S"); }
    static Word tau() { return from_codes("t"); }
    static Word tau_inv() { return from_codes("T"); }

    bool empty() const { return s_.empty(); }
    std::size_t length() const { return s_.size(); }
    Letter at(std::size_t i) const { return Letter::from_code(s_[i]); }
    const std::string& codes() const { return s_; }
    std::string str() const { return s_.empty() ? "e" : s_; }

    friend bool operator==(const Word& u, const Word& v) { return u.s_ == v.s_; }
    friend bool operator!=(const Word& u, const Word& v) { return u.s_ != v.s_; }

    // Length-lexicographic order under letter_rank; the enumeration order.
    static bool order_less(const Word& u, const Word& v) {
        if (u.s_.size() != v.s_.size()) return u.s_.size() < v.s_.size();
        for (std::size_t i = 0; i < u.s_.size(); ++i)
            if (u.s_[i] != v.s_[i]) return letter_rank(u.s_[i]) < letter_rank(v.s_[i]);
        return false;
    }
    // Cheap structural order for containers where enumeration order is irrelevant.
    friend bool operator<(const Word& u, const Word& v) { return u.s_ < v.s_; }

private:
    std::string s_;
};

inline Word concat_reduce(const Word& u, const Word& v) {
    const std::string& a = u.codes();
    const std::string& b = v.codes();
    std::size_t i = a.size(), j = 0;
    while (i > 0 && j < b.size() && cancels(a[i - 1], b[j])) {
        --i;
        ++j;
    }
    std::string out;
    out.reserve(i + b.size() - j);
    out.append(a, 0, i);
    out.append(b, j, std::string::npos);
    return Word::from_codes(std::move(out));
}

inline Word invert(const Word& w) {
    std::string out(w.codes().rbegin(), w.codes().rend());
    for (char& c : out) c = inverse_code(c);
    return Word::from_codes(std::move(out));
}

enum class PieceLabel : std::uint8_t { w_sigma, w_sigma_inv, w_tau, w_tau_inv, identity };

inline PieceLabel classify(const Word& w) {
    if (w.empty()) return PieceLabel::identity;
    switch (w.codes().front()) {
        case 's': return PieceLabel::w_sigma;
        case 'S': return PieceLabel::w_sigma_inv;
        case 't': return PieceLabel::w_tau;
        default: return PieceLabel::w_tau_inv;
    }
}

inline const char* piece_label_name(PieceLabel l) {
    switch (l) {
        case PieceLabel::w_sigma: return "w_sigma";
        case PieceLabel::w_sigma_inv: return "w_sigma_inv";
        case PieceLabel::w_tau: return "w_tau";
        case PieceLabel::w_tau_inv: return "w_tau_inv";
        default: return "identity";
    }
}

// All reduced words of length <= n in length-lex order; 2*3^n - 1 of them.
inline std::vector<Word> enumerate_ball(std::uint32_t n) {
    check_word_budget(ball_size(n), "enumerate_ball");

    std::vector<Word> out;
    out.reserve(static_cast<std::size_t>(ball_size(n).convert_to<std::uint64_t>()));
    out.push_back(Word());
    std::size_t level_begin = 0;
    for (std::uint32_t len = 1; len <= n; ++len) {
        std::size_t level_end = out.size();
        for (std::size_t k = level_begin; k < level_end; ++k) {
            const std::string base = out[k].codes();
            for (char c : kLetterCodes) {
                if (!base.empty() && cancels(base.back(), c)) continue;
                out.push_back(Word::from_codes(base + c));
            }
        }
        level_begin = level_end;
    }
    return out;
}

// Certificate-machinery hooks: motions are left multiplications.
inline Word motion_apply(const Word& g, const Word& x) { return concat_reduce(g, x); }
inline Word motion_compose(const Word& g, const Word& h) { return concat_reduce(g, h); }
inline Word motion_invert(const Word& g) { return invert(g); }
inline nlohmann::json motion_to_json(const Word& g) { return g.str(); }

inline int point_depth(const Word& w) { return static_cast<int>(w.length()); }
inline int motion_slack(const Word& w) { return static_cast<int>(w.length()); }
inline std::string describe(const Word& w) { return w.str(); }

}  // namespace tarski
