#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tarski/action.hpp"

using namespace tarski;

namespace {

FiniteAction cyclic_self_action(int n) {
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    auto add = [n](const std::string& g, const std::string& h) {
        return std::to_string((std::stoi(g) + std::stoi(h)) % n);
    };
    return FiniteAction(ids, "0", add, ids, add);
}

// Z2 = {1, g} with g acting as the double swap (a b)(c d).
FiniteAction double_swap_action() {
    auto mul = [](const std::string& x, const std::string& y) {
        return x == y ? std::string("1") : std::string("g");
    };
    std::map<std::string, std::string> swap{{"a", "b"}, {"b", "a"}, {"c", "d"}, {"d", "c"}};
    auto act = [swap](const std::string& g, const std::string& x) {
        return g == "1" ? x : swap.at(x);
    };
    return FiniteAction({"1", "g"}, "1", mul, {"a", "b", "c", "d"}, act);
}

FiniteAction trivial_z2_action() {
    auto mul = [](const std::string& x, const std::string& y) {
        return x == y ? std::string("1") : std::string("g");
    };
    auto act = [](const std::string&, const std::string& x) { return x; };
    return FiniteAction({"1", "g"}, "1", mul, {"a", "b"}, act);
}

// Z4 rotating two disjoint 4-cycles p0..p3 and q0..q3 in step.
FiniteAction two_cycle_z4_action() {
    std::vector<std::string> ids{"0", "1", "2", "3"};
    auto add = [](const std::string& g, const std::string& h) {
        return std::to_string((std::stoi(g) + std::stoi(h)) % 4);
    };
    std::vector<std::string> pts;
    for (char side : {'p', 'q'})
        for (int i = 0; i < 4; ++i) pts.push_back(std::string(1, side) + std::to_string(i));
    auto act = [](const std::string& g, const std::string& x) {
        int k = (x[1] - '0' + std::stoi(g)) % 4;
        return std::string(1, x[0]) + std::to_string(k);
    };
    return FiniteAction(ids, "0", add, pts, act);
}

std::vector<std::string> sorted(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("orbit partitions") {
    SECTION("cyclic group on itself is one orbit") {
        FiniteAction a = cyclic_self_action(3);
        OrbitPartition p = orbits(a);
        REQUIRE(p.blocks.size() == 1);
        REQUIRE(p.blocks[0] == std::vector<std::string>{"0", "1", "2"});
        REQUIRE(p.index.at("2") == 0);
    }
    SECTION("double swap splits the carrier in two") {
        FiniteAction a = double_swap_action();
        OrbitPartition p = orbits(a);
        REQUIRE(p.blocks.size() == 2);
        REQUIRE(p.blocks[0] == std::vector<std::string>{"a", "b"});
        REQUIRE(p.blocks[1] == std::vector<std::string>{"c", "d"});
        REQUIRE(p.index.at("a") == 0);
        REQUIRE(p.index.at("d") == 1);
    }
    SECTION("trivial action gives singleton blocks") {
        OrbitPartition p = orbits(trivial_z2_action());
        REQUIRE(p.blocks.size() == 2);
        REQUIRE(p.blocks[0] == std::vector<std::string>{"a"});
        REQUIRE(p.blocks[1] == std::vector<std::string>{"b"});
    }
    SECTION("blocks are invariant under every element") {
        for (const FiniteAction& a : {cyclic_self_action(4), double_swap_action(),
                                      trivial_z2_action(), two_cycle_z4_action()}) {
            OrbitPartition p = orbits(a);
            for (const auto& block : p.blocks)
                for (const std::string& g : a.elements()) {
                    std::vector<std::string> moved;
                    for (const std::string& x : block) moved.push_back(a.act(g, x));
                    REQUIRE(sorted(std::move(moved)) == block);
                }
        }
    }
}

TEST_CASE("freeness detection") {
    REQUIRE(is_free(cyclic_self_action(5)));
    REQUIRE(is_free(double_swap_action()));
    REQUIRE(is_free(two_cycle_z4_action()));
    REQUIRE_FALSE(is_free(trivial_z2_action()));

    SECTION("a single fixed point of a nonidentity element breaks freeness") {
        auto mul = [](const std::string& x, const std::string& y) {
            return x == y ? std::string("1") : std::string("g");
        };
        std::map<std::string, std::string> table{{"a", "a"}, {"b", "c"}, {"c", "b"}};
        auto act = [table](const std::string& g, const std::string& x) {
            return g == "1" ? x : table.at(x);
        };
        FiniteAction a({"1", "g"}, "1", mul, {"a", "b", "c"}, act);
        REQUIRE_FALSE(is_free(a));
    }
}

TEST_CASE("representative choice") {
    FiniteAction a = double_swap_action();
    OrbitPartition p = orbits(a);
    RepresentativeSet m = choose_representatives(p);
    REQUIRE(m.reps == std::vector<std::string>{"a", "c"});

    SECTION("deterministic across repeated runs") {
        for (int run = 0; run < 3; ++run)
            REQUIRE(choose_representatives(orbits(double_swap_action())).reps == m.reps);
    }
    SECTION("single block gives a singleton") {
        RepresentativeSet one = choose_representatives(orbits(cyclic_self_action(3)));
        REQUIRE(one.reps == std::vector<std::string>{"0"});
    }
    SECTION("each representative lies in its own block") {
        for (std::size_t i = 0; i < m.reps.size(); ++i) REQUIRE(p.index.at(m.reps[i]) == i);
    }
}

TEST_CASE("translates of a representative set") {
    SECTION("left multiplication: singleton translates partition the group") {
        FiniteAction a = cyclic_self_action(4);
        RepresentativeSet m = choose_representatives(orbits(a));
        REQUIRE(m.reps == std::vector<std::string>{"0"});
        VerificationReport r = translates_partition(a, m);
        REQUIRE(r.pass);
        REQUIRE(r.counts.at("covered") == 4);
        REQUIRE(r.counts.at("representatives") == 1);
    }
    SECTION("double swap passes with translates {a,c} and {b,d}") {
        FiniteAction a = double_swap_action();
        RepresentativeSet m = choose_representatives(orbits(a));
        VerificationReport r = translates_partition(a, m);
        REQUIRE(r.pass);
        REQUIRE(star({"1"}, m, a) == std::vector<std::string>{"a", "c"});
        REQUIRE(star({"g"}, m, a) == std::vector<std::string>{"b", "d"});
    }
    SECTION("a fixed point forces overlapping translates") {
        FiniteAction a = trivial_z2_action();
        RepresentativeSet m = choose_representatives(orbits(a));
        VerificationReport r = translates_partition(a, m);
        REQUIRE_FALSE(r.pass);
        REQUIRE_FALSE(r.witnesses.empty());
        REQUIRE(r.witnesses.front().find("overlap") != std::string::npos);
    }
    SECTION("pass agrees with freeness across the corpus") {
        for (const FiniteAction& a : {cyclic_self_action(2), cyclic_self_action(5),
                                      double_swap_action(), trivial_z2_action(),
                                      two_cycle_z4_action()}) {
            RepresentativeSet m = choose_representatives(orbits(a));
            REQUIRE(translates_partition(a, m).pass == is_free(a));
        }
    }
}

TEST_CASE("star transform") {
    FiniteAction a = double_swap_action();
    RepresentativeSet m = choose_representatives(orbits(a));

    SECTION("identity block gives the representatives themselves") {
        REQUIRE(star({"1"}, m, a) == m.reps);
    }
    SECTION("whole group gives the whole carrier") {
        REQUIRE(star({"1", "g"}, m, a) == sorted(a.points()));
    }
    SECTION("equivariance over every element and subset") {
        std::vector<std::vector<std::string>> subsets{{}, {"1"}, {"g"}, {"1", "g"}};
        for (const std::string& g : a.elements())
            for (const auto& b : subsets) {
                std::vector<std::string> gb;
                for (const std::string& h : b) gb.push_back(a.mul(g, h));
                std::vector<std::string> lhs = star(gb, m, a);
                std::vector<std::string> rhs;
                for (const std::string& x : star(b, m, a)) rhs.push_back(a.act(g, x));
                REQUIRE(lhs == sorted(std::move(rhs)));
            }
    }
}

TEST_CASE("partition lifting") {
    SECTION("trivial partition lifts to the whole carrier") {
        FiniteAction a = cyclic_self_action(3);
        RepresentativeSet m = choose_representatives(orbits(a));
        auto lifted = lift_partition({{"0", "1", "2"}}, m, a);
        REQUIRE(lifted.size() == 1);
        REQUIRE(lifted[0] == sorted(a.points()));
    }
    SECTION("singleton blocks lift to the translates") {
        FiniteAction a = double_swap_action();
        RepresentativeSet m = choose_representatives(orbits(a));
        auto lifted = lift_partition({{"1"}, {"g"}}, m, a);
        REQUIRE(lifted == std::vector<std::vector<std::string>>{{"a", "c"}, {"b", "d"}});
    }
    SECTION("lifted block sizes scale by the number of representatives") {
        FiniteAction a = two_cycle_z4_action();
        RepresentativeSet m = choose_representatives(orbits(a));
        REQUIRE(m.reps.size() == 2);
        std::vector<std::vector<std::vector<std::string>>> partitions{
            {{"0"}, {"1", "2"}, {"3"}},
            {{"0", "2"}, {"1", "3"}},
            {{"0", "1", "2", "3"}},
        };
        for (const auto& blocks : partitions) {
            auto lifted = lift_partition(blocks, m, a);
            REQUIRE(lifted.size() == blocks.size());
            std::vector<std::string> all;
            for (std::size_t i = 0; i < blocks.size(); ++i) {
                REQUIRE(lifted[i].size() == blocks[i].size() * m.reps.size());
                all.insert(all.end(), lifted[i].begin(), lifted[i].end());
            }
            REQUIRE(sorted(std::move(all)) == sorted(a.points()));
        }
    }
    SECTION("defective inputs are rejected") {
        FiniteAction a = double_swap_action();
        RepresentativeSet m = choose_representatives(orbits(a));
        REQUIRE_THROWS_AS(lift_partition({{"1", "g"}, {"g"}}, m, a), precondition_error);
        REQUIRE_THROWS_AS(lift_partition({{"1"}}, m, a), precondition_error);
        REQUIRE_THROWS_AS(lift_partition({{}, {"1", "g"}}, m, a), precondition_error);

        FiniteAction t = trivial_z2_action();
        RepresentativeSet mt = choose_representatives(orbits(t));
        REQUIRE_THROWS_AS(lift_partition({{"1"}, {"g"}}, mt, t), precondition_error);
    }
}

TEST_CASE("action validation") {
    auto z2mul = [](const std::string& x, const std::string& y) {
        return x == y ? std::string("1") : std::string("g");
    };
    SECTION("identity must fix every point") {
        auto act = [](const std::string& g, const std::string& x) {
            if (g == "1") return x == "a" ? std::string("b") : std::string("a");
            return x;
        };
        REQUIRE_THROWS_MATCHES(FiniteAction({"1", "g"}, "1", z2mul, {"a", "b"}, act),
                               precondition_error,
                               Catch::Matchers::MessageMatches(
                                   Catch::Matchers::ContainsSubstring("identity moves point")));
    }
    SECTION("compatibility failures name a witness triple") {
        std::map<std::string, std::string> cycle{{"a", "b"}, {"b", "c"}, {"c", "a"}};
        auto act = [cycle](const std::string& g, const std::string& x) {
            return g == "1" ? x : cycle.at(x);
        };
        REQUIRE_THROWS_MATCHES(
            FiniteAction({"1", "g"}, "1", z2mul, {"a", "b", "c"}, act), precondition_error,
            Catch::Matchers::MessageMatches(
                Catch::Matchers::ContainsSubstring("axiom fails at (g, g, a)")));
    }
    SECTION("per-element bijectivity is enforced") {
        auto act = [](const std::string& g, const std::string& x) {
            return g == "1" ? x : std::string("a");
        };
        REQUIRE_THROWS_MATCHES(FiniteAction({"1", "g"}, "1", z2mul, {"a", "b"}, act),
                               precondition_error,
                               Catch::Matchers::MessageMatches(
                                   Catch::Matchers::ContainsSubstring("not a bijection")));
    }
    SECTION("duplicate names and unknown products are rejected") {
        auto act = [](const std::string&, const std::string& x) { return x; };
        REQUIRE_THROWS_AS(FiniteAction({"1", "1"}, "1", z2mul, {"a"}, act), precondition_error);
        auto badmul = [](const std::string&, const std::string&) { return std::string("h"); };
        REQUIRE_THROWS_AS(FiniteAction({"1", "g"}, "1", badmul, {"a"}, act), precondition_error);
    }
}

TEST_CASE("action JSON loading") {
    nlohmann::json doc{
        {"elements", {"1", "g"}},
        {"identity", "1"},
        {"mul_table",
         {{"1", {{"1", "1"}, {"g", "g"}}}, {"g", {{"1", "g"}, {"g", "1"}}}}},
        {"points", {"a", "b", "c", "d"}},
        {"act_table",
         {{"1", {{"a", "a"}, {"b", "b"}, {"c", "c"}, {"d", "d"}}},
          {"g", {{"a", "b"}, {"b", "a"}, {"c", "d"}, {"d", "c"}}}}},
    };

    SECTION("well-formed document round-trips the tables") {
        FiniteAction a = FiniteAction::from_json(doc);
        REQUIRE(a.identity() == "1");
        REQUIRE(a.mul("g", "g") == "1");
        REQUIRE(a.act("g", "c") == "d");
        REQUIRE(is_free(a));
        REQUIRE(orbits(a).blocks.size() == 2);
    }
    SECTION("missing keys and malformed shapes are parse errors") {
        nlohmann::json no_pts = doc;
        no_pts.erase("points");
        REQUIRE_THROWS_AS(FiniteAction::from_json(no_pts), parse_error);

        nlohmann::json bad_elems = doc;
        bad_elems["elements"] = "1,g";
        REQUIRE_THROWS_AS(FiniteAction::from_json(bad_elems), parse_error);

        nlohmann::json bad_id = doc;
        bad_id["identity"] = 7;
        REQUIRE_THROWS_AS(FiniteAction::from_json(bad_id), parse_error);

        nlohmann::json gap = doc;
        gap["act_table"]["g"].erase("c");
        REQUIRE_THROWS_AS(FiniteAction::from_json(gap), parse_error);

        REQUIRE_THROWS_AS(FiniteAction::from_json(nlohmann::json::array()), parse_error);
    }
    SECTION("structurally sound but lawless documents are precondition errors") {
        nlohmann::json lawless = doc;
        lawless["act_table"]["g"] = {{"a", "b"}, {"b", "c"}, {"c", "a"}, {"d", "d"}};
        REQUIRE_THROWS_AS(FiniteAction::from_json(lawless), precondition_error);
    }
}

TEST_CASE("sphere point arithmetic") {
    const SpherePoint base = SpherePoint::default_base();

    SECTION("the default base is an exact unit vector") {
        REQUIRE(base.on_sphere());
        REQUIRE(base == base.canonical());
        REQUIRE(dot(base.to_vec(), base.to_vec()) == RingScalar(1));
    }
    SECTION("letter steps agree with exact matrix application") {
        for (Word w : enumerate_ball(4)) {
            SpherePoint moved = motion_apply(w, base);
            REQUIRE(moved.on_sphere());
            REQUIRE(moved.to_vec() == word_matrix(w) * base.to_vec());
        }
    }
    SECTION("triples embed compatibly") {
        SphereTriple t{0, 2, 1, 1};
        SpherePoint e = SpherePoint::from_triple(t);
        REQUIRE(e.on_sphere());
        REQUIRE(e.to_vec() == t.to_vec());
        for (Word w : enumerate_ball(3))
            REQUIRE(motion_apply(w, e) == SpherePoint::from_triple(motion_apply(w, t)));
    }
    SECTION("canonical form strips common powers of three") {
        SpherePoint raw{{3, 6, 6}, {0, 0, 0}, 2};
        REQUIRE(raw.on_sphere());
        REQUIRE(raw.canonical().k == 1);
        REQUIRE(raw == SpherePoint::default_base());
        REQUIRE_FALSE(point_less(raw, SpherePoint::default_base()));
        REQUIRE_FALSE(point_less(SpherePoint::default_base(), raw));
    }
    SECTION("off-sphere bases are rejected") {
        REQUIRE_THROWS_AS(stabilizer_certify(SpherePoint{{1, 1, 1}, {0, 0, 0}, 0}, 2),
                          precondition_error);
        REQUIRE_THROWS_AS(build_orbit_cloud(SpherePoint{{1, 1, 1}, {0, 0, 0}, 0}, 2),
                          precondition_error);
    }
}

TEST_CASE("paradox transfer to an orbit") {
    const SpherePoint base = SpherePoint::default_base();  // (1,2,2)/3
    auto [sigma_words, tau_words] = group_doubling_certs();

    SECTION("both halves verify on the depth-4 orbit") {
        auto [first, second] = transfer_paradox(sigma_words, tau_words, base, 4);
        REQUIRE(first.margin == 1);
        REQUIRE(second.margin == 1);

        VerificationReport r1 = verify(first, 4);
        VerificationReport r2 = verify(second, 4);
        REQUIRE(r1.pass);
        REQUIRE(r2.pass);
        REQUIRE(r1.counts.at("source_points") == 161);  // 2*3^4 - 1 distinct points
        REQUIRE(r2.counts.at("source_points") == 161);
    }
    SECTION("the identity-and-tau class hits three exact points at depth 1") {
        auto oc = std::make_shared<const OrbitCloud>(build_orbit_cloud(base, 2));
        SetView<SpherePoint> view = orbit_restrict_view(
            oc, classes_view({PieceLabel::identity, PieceLabel::w_tau, PieceLabel::w_tau_inv}));
        auto pts = view.enumerate(1);
        REQUIRE(pts.size() == 3);
        REQUIRE(std::find(pts.begin(), pts.end(), base) != pts.end());

        SpherePoint up = motion_apply(Word::tau(), base);
        SpherePoint down = motion_apply(invert(Word::tau()), base);
        REQUIRE(std::find(pts.begin(), pts.end(), up) != pts.end());
        REQUIRE(std::find(pts.begin(), pts.end(), down) != pts.end());
        REQUIRE(up == SpherePoint{{3, 2, 2}, {0, -4, 4}, 2});

        // The certificate's moving piece also contains the whole sigma class.
        auto [first, second] = transfer_paradox(sigma_words, tau_words, base, 2);
        REQUIRE(first.pieces[0].set.enumerate(1).size() == 4);
        for (const SpherePoint& x : pts) REQUIRE(first.pieces[0].set.member(x));
    }
    SECTION("pieces move points by the rotation of their word") {
        auto [first, second] = transfer_paradox(sigma_words, tau_words, base, 3);
        auto moved = induced_apply(first, base);
        REQUIRE(moved.has_value());
        REQUIRE(*moved == motion_apply(Word::sigma(), base));
        REQUIRE(first.source.member(base));
        REQUIRE_FALSE(first.source.member(SpherePoint::from_triple({1, 0, 0, 0})));
    }
    SECTION("targets of the two halves are disjoint on the orbit") {
        auto [first, second] = transfer_paradox(sigma_words, tau_words, base, 3);
        for (const SpherePoint& p : first.target.enumerate(3))
            REQUIRE_FALSE(second.target.member(p));
    }
    SECTION("a tampered motion is caught by verification") {
        auto [first, second] = transfer_paradox(sigma_words, tau_words, base, 3);
        first.pieces[0].motion = invert(Word::sigma());
        VerificationReport r = verify(first, 3);
        REQUIRE_FALSE(r.pass);
        REQUIRE_FALSE(r.witnesses.empty());
    }
    SECTION("a base fixed by a generator is rejected") {
        REQUIRE_THROWS_MATCHES(
            transfer_paradox(sigma_words, tau_words, SphereTriple{1, 0, 0, 0}, 3),
            precondition_error,
            Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("relation")));
    }
    SECTION("triple bases attach to short axis orbits and are rejected") {
        REQUIRE_FALSE(stabilizer_certify(SphereTriple{0, 2, 1, 1}, 3));
        REQUIRE_FALSE(stabilizer_certify(SphereTriple{3, 2, 8, 2}, 5));
        REQUIRE(stabilizer_certify(base, 8));
        REQUIRE_THROWS_AS(transfer_paradox(sigma_words, tau_words, SphereTriple{0, 2, 1, 1}, 2),
                          precondition_error);
    }
}
