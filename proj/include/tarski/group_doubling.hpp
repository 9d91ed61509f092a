#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "tarski/cert.hpp"
#include "tarski/word.hpp"

namespace tarski {

using WordCert = EquidecompositionCert<Word, Word>;

inline SetView<Word> whole_group_view() {
    return SetView<Word>::lazy(
        "group", [](const Word&) { return true; },
        [](int d) { return d < 0 ? std::vector<Word>{} : enumerate_ball(static_cast<std::uint32_t>(d)); });
}

inline SetView<Word> classes_view(std::initializer_list<PieceLabel> labels) {
    std::vector<PieceLabel> ls(labels);
    std::string name;
    for (PieceLabel l : ls) name += (name.empty() ? "" : "+") + std::string(piece_label_name(l));
    auto member = [ls](const Word& w) {
        PieceLabel c = classify(w);
        return std::find(ls.begin(), ls.end(), c) != ls.end();
    };
    return SetView<Word>::lazy(
        name, member,
        [member](int d) {
            std::vector<Word> out;
            if (d < 0) return out;
            for (Word& w : enumerate_ball(static_cast<std::uint32_t>(d)))
                if (member(w)) out.push_back(std::move(w));
            return out;
        });
}

inline SetView<Word> class_view(PieceLabel l) { return classes_view({l}); }

// The two halves of the paradoxical decomposition: the whole group is
// equidecomposable with the sigma classes alone and with the tau classes
// alone, each via one left multiplication and one identity piece.
inline std::pair<WordCert, WordCert> group_doubling_certs() {
    constexpr int kBuildCheckDepth = 4;
    SetView<Word> g = whole_group_view();

    SetView<Word> p_sigma =
        classes_view({PieceLabel::identity, PieceLabel::w_tau, PieceLabel::w_tau_inv});
    SetView<Word> q_sigma = classes_view(
        {PieceLabel::identity, PieceLabel::w_tau, PieceLabel::w_tau_inv, PieceLabel::w_sigma});
    WordCert sigma_cert = absorb(p_sigma, q_sigma, Word::sigma(), g, kBuildCheckDepth);

    SetView<Word> p_tau =
        classes_view({PieceLabel::identity, PieceLabel::w_sigma, PieceLabel::w_sigma_inv});
    SetView<Word> q_tau = classes_view(
        {PieceLabel::identity, PieceLabel::w_sigma, PieceLabel::w_sigma_inv, PieceLabel::w_tau});
    WordCert tau_cert = absorb(p_tau, q_tau, Word::tau(), g, kBuildCheckDepth);

    return {std::move(sigma_cert), std::move(tau_cert)};
}

// Checks both doubling certificates inside ball(n), plus disjointness of the
// two targets; counts are prefixed per half.
inline VerificationReport verify_group_doubling(int n) {
    if (n < 2) throw precondition_error("verify_group_doubling: depth must be at least 2");
    auto [sigma_cert, tau_cert] = group_doubling_certs();

    VerificationReport rep;
    rep.kind = "group-doubling";
    rep.depth = n;

    VerificationReport rs = verify(sigma_cert, n);
    VerificationReport rt = verify(tau_cert, n);
    for (const auto& [k, v] : rs.counts) rep.counts["sigma_" + k] = v;
    for (const auto& [k, v] : rt.counts) rep.counts["tau_" + k] = v;
    for (const auto& w : rs.witnesses) rep.fail("sigma half: " + w);
    for (const auto& w : rt.witnesses) rep.fail("tau half: " + w);
    rep.pass = rep.pass && rs.pass && rt.pass;

    for (const Word& w : sigma_cert.target.enumerate(n))
        if (tau_cert.target.member(w)) rep.fail("targets overlap at " + w.str());

    rep.counts["ball"] = static_cast<std::int64_t>(ball_size(static_cast<std::uint32_t>(n))
                                                       .convert_to<std::int64_t>());
    return rep;
}

}  // namespace tarski
