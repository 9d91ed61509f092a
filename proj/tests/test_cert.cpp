#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "tarski/cert.hpp"
#include "tarski/group_doubling.hpp"

namespace fin {

// Permutations of {0..n-1} as motions over int points.
struct Perm {
    std::vector<int> fwd;

    static Perm identity(int n) {
        Perm p;
        p.fwd.resize(static_cast<std::size_t>(n));
        std::iota(p.fwd.begin(), p.fwd.end(), 0);
        return p;
    }
};

inline int motion_apply(const Perm& g, int x) { return g.fwd.at(static_cast<std::size_t>(x)); }
inline Perm motion_compose(const Perm& g, const Perm& h) {
    Perm r;
    r.fwd.reserve(h.fwd.size());
    for (int x : h.fwd) r.fwd.push_back(g.fwd.at(static_cast<std::size_t>(x)));
    return r;
}
inline Perm motion_invert(const Perm& g) {
    Perm r;
    r.fwd.assign(g.fwd.size(), 0);
    for (std::size_t i = 0; i < g.fwd.size(); ++i)
        r.fwd[static_cast<std::size_t>(g.fwd[i])] = static_cast<int>(i);
    return r;
}
inline bool operator==(const Perm& a, const Perm& b) { return a.fwd == b.fwd; }

// Integer shifts over lazy views of the naturals; enumeration depth = value,
// so a shift's slack is its magnitude.
struct Shift {
    int d = 0;
};
inline int motion_apply(const Shift& s, int x) { return x + s.d; }
inline Shift motion_compose(const Shift& a, const Shift& b) { return {a.d + b.d}; }
inline Shift motion_invert(const Shift& s) { return {-s.d}; }
inline int motion_slack(const Shift& s) { return s.d < 0 ? -s.d : s.d; }

}  // namespace fin

using namespace tarski;
using fin::Perm;
using fin::Shift;

namespace {

using IntCert = EquidecompositionCert<int, Perm>;
using ShiftCert = EquidecompositionCert<int, Shift>;

SetView<int> ints(std::vector<int> v) { return SetView<int>::explicit_set(std::move(v)); }

std::vector<int> iota_vec(int lo, int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), lo);
    return v;
}

template <class Pred>
SetView<int> pred_view(std::string name, Pred pred) {
    return SetView<int>::lazy(
        std::move(name), [pred](const int& x) { return pred(x); },
        [pred](int d) {
            std::vector<int> out;
            for (int x = 0; x <= d; ++x)
                if (pred(x)) out.push_back(x);
            return out;
        });
}

// Permutation moving each point of `pts` to the next one, fixing the rest of
// the universe.
Perm cycle_perm(int universe, const std::vector<int>& pts) {
    Perm p = Perm::identity(universe);
    for (std::size_t i = 0; i < pts.size(); ++i)
        p.fwd[static_cast<std::size_t>(pts[i])] = pts[(i + 1) % pts.size()];
    return p;
}

// Random permutation of the whole universe restricted to permute `dom` among
// itself (identity elsewhere).
Perm random_perm_on(std::mt19937& rng, int universe, const std::vector<int>& dom) {
    std::vector<int> img = dom;
    std::shuffle(img.begin(), img.end(), rng);
    Perm p = Perm::identity(universe);
    for (std::size_t i = 0; i < dom.size(); ++i) p.fwd[static_cast<std::size_t>(dom[i])] = img[i];
    return p;
}

// Bijection cert moving `dom` by the permutation q, split into `chunks` pieces.
IntCert perm_cert(const std::vector<int>& dom, const Perm& q, int chunks) {
    IntCert c;
    c.source = ints(dom);
    std::vector<int> img;
    for (int x : dom) img.push_back(motion_apply(q, x));
    c.target = ints(img);
    std::size_t per = (dom.size() + static_cast<std::size_t>(chunks) - 1) /
                      static_cast<std::size_t>(chunks);
    for (std::size_t at = 0; at < dom.size(); at += per) {
        std::vector<int> part(dom.begin() + static_cast<std::ptrdiff_t>(at),
                              dom.begin() + static_cast<std::ptrdiff_t>(
                                                std::min(at + per, dom.size())));
        c.pieces.push_back({ints(std::move(part)), q});
    }
    return c;
}

}  // namespace

TEST_CASE("identity certificate verifies") {
    SetView<int> a = ints(iota_vec(0, 8));
    IntCert c = identity_cert(a, Perm::identity(8));
    VerificationReport rep = verify(c, 0);
    CHECK(rep.pass);
    CHECK(rep.counts.at("pieces") == 1);
    CHECK(rep.counts.at("piece_0") == 8);
    CHECK(rep.counts.at("source_points") == 8);
    CHECK(rep.counts.at("image_points") == 8);
    CHECK(rep.counts.at("target_points") == 8);

    auto j = c.to_json();
    CHECK(j.at("kind") == "equidecomposition-cert");
    CHECK(j.at("pieces").size() == 1);
    CHECK(j.at("margin") == 0);
}

TEST_CASE("defective certificates fail with witnesses") {
    SetView<int> a = ints(iota_vec(0, 4));
    Perm id4 = Perm::identity(5);

    SECTION("overlapping pieces") {
        IntCert c{a, a, {{ints({0, 1, 2}), id4}, {ints({2, 3}), id4}}, 0};
        VerificationReport rep = verify(c, 0);
        CHECK_FALSE(rep.pass);
        REQUIRE_FALSE(rep.witnesses.empty());
        CHECK(rep.witnesses.front().find("overlap") != std::string::npos);
    }
    SECTION("uncovered source point") {
        IntCert c{a, a, {{ints({0, 1}), id4}, {ints({2}), id4}}, 0};
        VerificationReport rep = verify(c, 0);
        CHECK_FALSE(rep.pass);
        bool mentions = false;
        for (const auto& w : rep.witnesses)
            if (w.find("no piece") != std::string::npos) mentions = true;
        CHECK(mentions);
    }
    SECTION("image escapes the target") {
        Perm swap34 = cycle_perm(5, {3, 4});
        IntCert c{a, a, {{a, swap34}}, 0};
        VerificationReport rep = verify(c, 0);
        CHECK_FALSE(rep.pass);
        bool outside = false, uncovered = false;
        for (const auto& w : rep.witnesses) {
            if (w.find("outside target") != std::string::npos) outside = true;
            if (w.find("no moved piece") != std::string::npos) uncovered = true;
        }
        CHECK(outside);
        CHECK(uncovered);
    }
}

TEST_CASE("compose matches pointwise composition") {
    std::mt19937 rng(77);
    const std::vector<int> dom = iota_vec(0, 8);

    for (int round = 0; round < 30; ++round) {
        Perm q1 = random_perm_on(rng, 8, dom);
        IntCert c1 = perm_cert(dom, q1, 2);
        std::vector<int> mid;
        for (int x : dom) mid.push_back(motion_apply(q1, x));
        std::sort(mid.begin(), mid.end());
        Perm q2 = random_perm_on(rng, 8, mid);
        IntCert c2 = perm_cert(mid, q2, 3);
        REQUIRE(verify(c1, 0).pass);
        REQUIRE(verify(c2, 0).pass);

        IntCert cc = compose(c1, c2, 0);
        CHECK(cc.pieces.size() <= c1.pieces.size() * c2.pieces.size());
        CHECK(verify(cc, 0).pass);
        for (int x : dom) {
            auto direct = induced_apply(cc, x);
            REQUIRE(direct);
            CHECK(*direct == motion_apply(q2, motion_apply(q1, x)));
        }
    }

    SECTION("identity composes to the same map") {
        Perm q = random_perm_on(rng, 8, dom);
        IntCert c = perm_cert(dom, q, 2);
        IntCert cc = compose(identity_cert(c.source, Perm::identity(8)), c, 0);
        for (int x : dom) CHECK(*induced_apply(cc, x) == *induced_apply(c, x));
    }
    SECTION("mismatched interface throws") {
        Perm q = random_perm_on(rng, 8, dom);
        IntCert c1 = perm_cert(dom, q, 2);
        IntCert shifted = perm_cert({1, 2, 3}, Perm::identity(8), 1);
        CHECK_THROWS_AS(compose(c1, shifted, 0), precondition_error);
    }
}

TEST_CASE("invert and restrict") {
    std::mt19937 rng(101);
    const std::vector<int> dom = iota_vec(0, 8);
    Perm q = random_perm_on(rng, 8, dom);
    IntCert c = perm_cert(dom, q, 3);

    IntCert inv = invert_cert(c);
    CHECK(verify(inv, 0).pass);
    for (int x : dom) {
        auto y = induced_apply(c, x);
        REQUIRE(y);
        auto back = induced_apply(inv, *y);
        REQUIRE(back);
        CHECK(*back == x);
    }

    IntCert cut = restrict(c, ints({1, 2, 5}), 0);
    CHECK(verify(cut, 0).pass);
    std::vector<int> want;
    for (int x : {1, 2, 5}) {
        CHECK(*induced_apply(cut, x) == motion_apply(q, x));
        want.push_back(motion_apply(q, x));
    }
    std::sort(want.begin(), want.end());
    for (int y : want) CHECK(cut.target.member(y));
    CHECK_THROWS_AS(restrict(c, ints({7, 8}), 0), precondition_error);
}

TEST_CASE("absorption on explicit finite sets") {
    SetView<int> a = ints(iota_vec(0, 6));
    SetView<int> q = ints({0, 1, 2});
    Perm rot = cycle_perm(6, {0, 1, 2});

    SECTION("empty P gives an identity-like certificate") {
        IntCert c = absorb(SetView<int>{}, q, rot, a, 0);
        CHECK(c.margin == 0);
        CHECK(verify(c, 0).pass);
        for (int x : {0, 1, 2}) CHECK(*induced_apply(c, x) == motion_apply(rot, x));
        for (int x : {3, 4, 5}) CHECK(*induced_apply(c, x) == x);
        // Target is all of A again.
        for (int x : iota_vec(0, 6)) CHECK(c.target.member(x));
    }
    SECTION("precondition violations throw with a witness") {
        CHECK_THROWS_AS(absorb(ints({5}), q, rot, a, 0), precondition_error);
        Perm leak = cycle_perm(6, {2, 3});
        CHECK_THROWS_AS(absorb(SetView<int>{}, q, leak, a, 0), precondition_error);
        // A nonempty P needs an infinite Q: on finite sets the shifted image
        // always wraps back onto P.
        CHECK_THROWS_AS(absorb(ints({0}), q, rot, a, 0), precondition_error);
    }
}

TEST_CASE("absorption on a truncated integer model") {
    SetView<int> nat = pred_view("naturals", [](int x) { return x >= 0; });
    SetView<int> p0 = ints({0});

    ShiftCert c = absorb(p0, nat, Shift{1}, nat, 60);
    CHECK(c.margin == 1);
    VerificationReport rep = verify(c, 60);
    CHECK(rep.pass);
    CHECK(rep.counts.at("piece_0") == 61);
    CHECK(rep.counts.at("image_points") == 60);
    CHECK(c.target.member(1));
    CHECK_FALSE(c.target.member(0));

    // Shifting by 2 misses the odd numbers, so the reach check must fail.
    CHECK_THROWS_AS(absorb(p0, nat, Shift{2}, nat, 60), precondition_error);
}

TEST_CASE("bsb on finite bijections returns the g certificate") {
    std::mt19937 rng(4242);
    const std::vector<int> a_dom = iota_vec(0, 6);
    const std::vector<int> b_dom = iota_vec(6, 6);

    for (int round = 0; round < 25; ++round) {
        // Random bijections A->B and B->A: pair each side with a shuffled
        // copy of the other.
        std::vector<int> img = b_dom;
        std::shuffle(img.begin(), img.end(), rng);
        Perm gq = Perm::identity(12);
        for (std::size_t i = 0; i < a_dom.size(); ++i) {
            gq.fwd[static_cast<std::size_t>(a_dom[i])] = img[i];
            gq.fwd[static_cast<std::size_t>(img[i])] = a_dom[i];
        }
        std::vector<int> img2 = a_dom;
        std::shuffle(img2.begin(), img2.end(), rng);
        Perm fq = Perm::identity(12);
        for (std::size_t i = 0; i < b_dom.size(); ++i) {
            fq.fwd[static_cast<std::size_t>(b_dom[i])] = img2[i];
            fq.fwd[static_cast<std::size_t>(img2[i])] = b_dom[i];
        }

        IntCert gc = perm_cert(a_dom, gq, 2);
        IntCert fc = perm_cert(b_dom, fq, 2);
        REQUIRE(verify(gc, 0).pass);
        REQUIRE(verify(fc, 0).pass);

        IntCert out = bsb_combine(gc, fc, 0);
        CHECK(verify(out, 0).pass);
        CHECK(out.pieces.size() <= gc.pieces.size() + fc.pieces.size());
        // g is onto B, so D = A and the whole map is g. Every chain in the
        // decomposition is a cycle here, which is exactly the g branch.
        for (int x : a_dom) CHECK(*induced_apply(out, x) == *induced_apply(gc, x));
    }
}

TEST_CASE("bsb chain decomposition on a truncated shift model") {
    SetView<int> nat = pred_view("naturals", [](int x) { return x >= 0; });
    SetView<int> ge1 = pred_view("from-1", [](int x) { return x >= 1; });
    SetView<int> ge2 = pred_view("from-2", [](int x) { return x >= 2; });

    ShiftCert gc{nat, ge1, {{nat, Shift{1}}}, 1};
    ShiftCert fc{nat, ge2, {{nat, Shift{2}}}, 2};
    REQUIRE(verify(gc, 40).pass);
    REQUIRE(verify(fc, 40).pass);

    ShiftCert out = bsb_combine(gc, fc, 40);
    CHECK(verify(out, 40).pass);

    // The only chain root is 0 (the point of B missed by g); its chain walks
    // 0 ->f 2 ->g 3 ->f 5 ->g 6 ->f 8..., so A-points congruent to 2 mod 3
    // take the f-inverse branch and everything else shifts up by one.
    for (int x = 0; x <= 30; ++x) {
        auto y = induced_apply(out, x);
        REQUIRE(y);
        CHECK(*y == (x % 3 == 2 ? x - 2 : x + 1));
    }
}

TEST_CASE("bsb piece bound and monotone iteration map") {
    std::mt19937 rng(900);

    for (int round = 0; round < 500; ++round) {
        int n = 1 + static_cast<int>(rng() % 8);
        std::vector<int> a_dom = iota_vec(0, n);
        std::vector<int> b_dom = iota_vec(n, n);
        int universe = 2 * n;

        std::vector<int> img = b_dom;
        std::shuffle(img.begin(), img.end(), rng);
        Perm gq = Perm::identity(universe);
        for (std::size_t i = 0; i < a_dom.size(); ++i) {
            gq.fwd[static_cast<std::size_t>(a_dom[i])] = img[i];
            gq.fwd[static_cast<std::size_t>(img[i])] = a_dom[i];
        }
        std::vector<int> img2 = a_dom;
        std::shuffle(img2.begin(), img2.end(), rng);
        Perm fq = Perm::identity(universe);
        for (std::size_t i = 0; i < b_dom.size(); ++i) {
            fq.fwd[static_cast<std::size_t>(b_dom[i])] = img2[i];
            fq.fwd[static_cast<std::size_t>(img2[i])] = b_dom[i];
        }

        int p = 1 + static_cast<int>(rng() % 3);
        int q = 1 + static_cast<int>(rng() % 3);
        IntCert gc = perm_cert(a_dom, gq, p);
        IntCert fc = perm_cert(b_dom, fq, q);

        IntCert out = bsb_combine(gc, fc, 0);
        CHECK(out.pieces.size() <= gc.pieces.size() + fc.pieces.size());
        CHECK(verify(out, 0).pass);
        for (int x : a_dom) CHECK(*induced_apply(out, x) == motion_apply(gq, x));

        // The iteration map D |-> A \ f(B \ g(D)) is monotone, and the
        // returned D (all of A here) is an exact fixed point.
        auto phi = [&](const std::vector<int>& d) {
            std::vector<int> gd;
            for (int x : d) gd.push_back(motion_apply(gq, x));
            std::sort(gd.begin(), gd.end());
            std::vector<int> knocked;
            for (int b : b_dom)
                if (!std::binary_search(gd.begin(), gd.end(), b))
                    knocked.push_back(motion_apply(fq, b));
            std::sort(knocked.begin(), knocked.end());
            std::vector<int> res;
            for (int x : a_dom)
                if (!std::binary_search(knocked.begin(), knocked.end(), x)) res.push_back(x);
            return res;
        };
        std::vector<int> d2, d1;
        for (int x : a_dom)
            if (rng() % 2) d2.push_back(x);
        for (int x : d2)
            if (rng() % 2) d1.push_back(x);
        std::vector<int> p1 = phi(d1), p2 = phi(d2);
        CHECK(std::includes(p2.begin(), p2.end(), p1.begin(), p1.end()));
        CHECK(phi(a_dom) == a_dom);
    }
}

TEST_CASE("sandwich squeezes a set between C and A") {
    SetView<int> nat = pred_view("naturals", [](int x) { return x >= 0; });
    SetView<int> q = pred_view("no-one", [](int x) { return x == 0 || x >= 2; });
    SetView<int> c_set = pred_view("from-2", [](int x) { return x >= 2; });
    SetView<int> evens2 = pred_view("evens-from-2", [](int x) { return x >= 2 && x % 2 == 0; });
    SetView<int> odds3 = pred_view("odds-from-3", [](int x) { return x >= 3 && x % 2 == 1; });

    ShiftCert c{c_set, nat, {{evens2, Shift{-2}}, {odds3, Shift{-2}}}, 2};
    REQUIRE(verify(c, 40).pass);

    SECTION("proper squeeze") {
        ShiftCert out = sandwich(c_set, q, nat, c, 40);
        CHECK(verify(out, 40).pass);
        // Chains root at 1 = A \ Q and walk 1 ->f 3 ->g 3 ->f 5..., so odd
        // points of Q step down while the evens stay put.
        for (int x = 0; x <= 30; ++x) {
            if (x == 1) continue;
            auto y = induced_apply(out, x);
            REQUIRE(y);
            CHECK(*y == (x % 2 == 1 ? x - 2 : x));
        }
    }
    SECTION("Q equal to A") {
        ShiftCert out = sandwich(c_set, nat, nat, c, 40);
        CHECK(verify(out, 40).pass);
    }
    SECTION("Q equal to C reproduces the certificate") {
        ShiftCert out = sandwich(c_set, c_set, nat, c, 40);
        CHECK(verify(out, 40).pass);
        for (int x = 2; x <= 30; ++x) CHECK(*induced_apply(out, x) == x - 2);
    }
    SECTION("inclusion violations throw") {
        SetView<int> high = pred_view("from-5", [](int x) { return x >= 5; });
        CHECK_THROWS_AS(sandwich(c_set, high, nat, c, 40), precondition_error);
    }
}

TEST_CASE("group level paradox partition") {
    auto [sigma_cert, tau_cert] = group_doubling_certs();
    SetView<Word> g = whole_group_view();
    WordCert bc = invert_cert(sigma_cert);
    WordCert cc = invert_cert(tau_cert);
    REQUIRE(verify(bc, 6).pass);
    REQUIRE(verify(cc, 6).pass);

    auto [b_part, c_part] = paradox_partition(bc, cc, g, 6);
    CHECK(verify(b_part, 6).pass);
    CHECK(verify(c_part, 6).pass);

    // The two sources tile the group: every word lies in exactly one.
    SetView<Word> rest = set_difference(g, bc.source);
    for (const Word& w : enumerate_ball(5)) {
        bool in_b = b_part.source.member(w);
        bool in_c = c_part.source.member(w);
        CHECK(in_b != in_c);
        if (in_c) CHECK(rest.member(w));
    }

    SECTION("already partitioning inputs are returned") {
        WordCert widened = sandwich(cc.source, rest, g, cc, 6);
        auto [b2, c2] = paradox_partition(bc, widened, g, 6);
        CHECK(b2.pieces.size() == bc.pieces.size());
        CHECK(c2.pieces.size() == widened.pieces.size());
        for (const Word& w : enumerate_ball(3)) {
            if (rest.member(w))
                CHECK(*induced_apply(c2, w) == *induced_apply(widened, w));
        }
    }
    SECTION("overlapping halves are rejected") {
        CHECK_THROWS_AS(paradox_partition(bc, bc, g, 6), precondition_error);
    }
}

TEST_CASE("transfer of a paradoxical pair") {
    auto [sigma_cert, tau_cert] = group_doubling_certs();
    SetView<Word> g = whole_group_view();
    WordCert bc = invert_cert(sigma_cert);
    WordCert cc = invert_cert(tau_cert);

    SECTION("identity move returns the inputs") {
        WordCert move = identity_cert(g, Word());
        auto [b2, c2] = transfer(bc, cc, move, 6);
        for (const Word& w : enumerate_ball(3)) {
            if (bc.source.member(w)) CHECK(*induced_apply(b2, w) == *induced_apply(bc, w));
            if (cc.source.member(w)) CHECK(*induced_apply(c2, w) == *induced_apply(cc, w));
        }
    }
    SECTION("word ball instance at depth 6") {
        auto [b2, c2] = transfer(bc, cc, sigma_cert, 6);
        CHECK(b2.pieces.size() <= 8);
        CHECK(c2.pieces.size() <= 8);
        CHECK(verify(b2, 6).pass);
        CHECK(verify(c2, 6).pass);
        // Both images land inside the moved copy and stay disjoint.
        for (const Word& w : b2.source.enumerate(4)) {
            CHECK(sigma_cert.target.member(w));
            CHECK_FALSE(c2.source.member(w));
        }
        for (const Word& w : c2.source.enumerate(4)) CHECK(sigma_cert.target.member(w));
    }
    SECTION("defective input is rejected") {
        WordCert bad = bc;
        bad.pieces.back().motion = Word::sigma();
        CHECK_THROWS_AS(transfer(bad, cc, identity_cert(g, Word()), 6), precondition_error);
    }
}

TEST_CASE("finite permuted copy transfer") {
    std::mt19937 rng(31337);
    const std::vector<int> a_dom = iota_vec(0, 8);
    const std::vector<int> a2_dom = iota_vec(8, 8);
    Perm shuttle = Perm::identity(16);
    for (int x = 0; x < 16; ++x) shuttle.fwd[static_cast<std::size_t>(x)] = (x + 8) % 16;
    IntCert move = perm_cert(a_dom, shuttle, 1);

    for (int round = 0; round < 10; ++round) {
        Perm rb = random_perm_on(rng, 16, a_dom);
        Perm rc = random_perm_on(rng, 16, a_dom);
        IntCert bc = perm_cert(a_dom, rb, 2);
        IntCert cc = perm_cert(a_dom, rc, 2);

        auto [b2, c2] = transfer(bc, cc, move, 0);
        CHECK(verify(b2, 0).pass);
        CHECK(verify(c2, 0).pass);
        // Brute force: the moved pair acts as the original conjugated by the
        // shuttle map.
        Perm back = motion_invert(shuttle);
        for (int y : a2_dom) {
            auto got = induced_apply(b2, y);
            REQUIRE(got);
            CHECK(*got == motion_apply(shuttle, motion_apply(rb, motion_apply(back, y))));
            auto got2 = induced_apply(c2, y);
            REQUIRE(got2);
            CHECK(*got2 == motion_apply(shuttle, motion_apply(rc, motion_apply(back, y))));
        }
    }
}

TEST_CASE("certificate json carries word motions") {
    auto [sigma_cert, tau_cert] = group_doubling_certs();
    auto j = sigma_cert.to_json();
    CHECK(j.at("schema") == kSchema);
    CHECK(j.at("pieces").size() == 2);
    CHECK(j.at("pieces")[0].at("motion") == "s");
    CHECK(j.at("source").at("kind") == "lazy");

    IntCert fc = identity_cert(ints({0, 1}), Perm::identity(2));
    CHECK(fc.to_json().at("pieces")[0].at("motion").is_null());
}
