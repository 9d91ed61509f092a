#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tarski/absorb.hpp"
#include "tarski/cert.hpp"
#include "tarski/core.hpp"
#include "tarski/doubling.hpp"
#include "tarski/group_doubling.hpp"
#include "tarski/orbit.hpp"
#include "tarski/report.hpp"
#include "tarski/ring.hpp"
#include "tarski/rotation.hpp"
#include "tarski/setview.hpp"
#include "tarski/word.hpp"

namespace {

using namespace tarski;

// Integer shift motion for the finite combiner demo.
struct Shift {
    int d = 0;
};
int motion_apply(const Shift& s, int x) { return x + s.d; }
Shift motion_invert(const Shift& s) { return {-s.d}; }

struct RunConfig {
    int depth = 0;
    int horizon = 0;
    int size = 0;
    std::uint64_t seed = 0;
    std::string base;
    std::string out;
    std::string format;
    std::string points;
    std::string rq, big_rq, rt, big_rt;
};

int emit(const VerificationReport& rep) {
    std::cout << rep.to_json().dump(2) << "\n";
    return rep.pass ? 0 : 1;
}

void emit_error(const char* kind, const std::string& message) {
    std::cerr << "error: " << message << "\n";
    nlohmann::json j;
    j["schema"] = kSchema;
    j["kind"] = "error";
    j["error"] = kind;
    j["message"] = message;
    std::cout << j.dump(2) << "\n";
}

Rat parse_rat(const std::string& text) {
    try {
        return Rat(text);
    } catch (const std::exception&) {
        throw parse_error("not a rational number: " + text);
    }
}

SpherePoint parse_base(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4) throw parse_error("base must be four comma-separated integers a,b,c,k");
    try {
        SphereTriple t;
        t.a = Int(parts[0]);
        t.b = Int(parts[1]);
        t.c = Int(parts[2]);
        const long kk = std::stol(parts[3]);
        if (kk < 0) throw parse_error("base exponent k must be non-negative");
        t.k = static_cast<std::uint32_t>(kk);
        return SpherePoint::from_triple(t);
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception&) {
        throw parse_error("base must be four comma-separated integers a,b,c,k");
    }
}

int run_certify_freeness(const RunConfig& cfg) {
    if (cfg.depth < 1) throw precondition_error("certify-freeness: depth must be at least 1");
    const FreenessReport fr = certify_freeness(static_cast<std::uint32_t>(cfg.depth));
    std::cout << fr.to_json().dump(2) << "\n";
    return fr.pass() ? 0 : 1;
}

int run_double_group(const RunConfig& cfg) { return emit(verify_group_doubling(cfg.depth)); }

int run_double_orbit(const RunConfig& cfg, bool has_format, bool has_out) {
    const SpherePoint base = cfg.base.empty() ? SpherePoint::default_base() : parse_base(cfg.base);
    const OrbitDouble od = orbit_double(base, cfg.depth);
    const std::string format = has_format ? cfg.format : "csv";
    if (has_out) {
        std::ofstream out(cfg.out, std::ios::binary);
        if (!out) throw resource_error("double-orbit: cannot open " + cfg.out + " for writing");
        out << export_cloud(od.orbit, format);
        if (!out.flush()) throw resource_error("double-orbit: failed writing " + cfg.out);
        return emit(od.report);
    }
    if (has_format) {
        std::cout << export_cloud(od.orbit, format);
        return od.report.pass ? 0 : 1;
    }
    return emit(od.report);
}

// Random bijection of {0..n-1} onto itself from at most max_pieces shifted
// blocks: cut the range into blocks and lay them out in shuffled order.
EquidecompositionCert<int, Shift> random_block_bijection(int n, int max_pieces,
                                                         std::mt19937_64& rng) {
    std::vector<int> cuts{0, n};
    const int pieces = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_pieces));
    for (int i = 1; i < pieces && n > 1; ++i)
        cuts.push_back(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1)));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<std::pair<int, int>> blocks;
    for (std::size_t i = 1; i < cuts.size(); ++i) blocks.emplace_back(cuts[i - 1], cuts[i]);
    for (std::size_t i = blocks.size(); i > 1; --i)
        std::swap(blocks[i - 1], blocks[rng() % i]);

    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    const SetView<int> carrier = SetView<int>::explicit_set(all);

    EquidecompositionCert<int, Shift> cert{carrier, carrier, {}, 0};
    int at = 0;
    for (const auto& [lo, hi] : blocks) {
        std::vector<int> pts;
        for (int x = lo; x < hi; ++x) pts.push_back(x);
        cert.pieces.push_back({SetView<int>::explicit_set(pts), Shift{at - lo}});
        at += hi - lo;
    }
    return cert;
}

int run_bsb_demo(const RunConfig& cfg) {
    if (cfg.size < 1) throw precondition_error("bsb-demo: size must be at least 1");
    if (cfg.size > 10000) throw resource_error("bsb-demo: size capped at 10000");
    std::mt19937_64 rng(cfg.seed);
    const auto gc = random_block_bijection(cfg.size, 6, rng);
    const auto fc = random_block_bijection(cfg.size, 6, rng);
    const auto combined = bsb_combine(gc, fc, 0);

    VerificationReport rep = verify(combined, 0);
    rep.kind = "bsb-demo";
    rep.counts["size"] = cfg.size;
    rep.counts["pieces_first"] = static_cast<std::int64_t>(gc.pieces.size());
    rep.counts["pieces_second"] = static_cast<std::int64_t>(fc.pieces.size());
    rep.counts["pieces_combined"] = static_cast<std::int64_t>(combined.pieces.size());
    if (combined.pieces.size() > gc.pieces.size() + fc.pieces.size())
        rep.fail("combined certificate uses more pieces than the two inputs together");
    rep.note("seed = " + std::to_string(cfg.seed));
    return emit(rep);
}

std::vector<CirclePoint> read_circle_points(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw resource_error("absorb-circle: cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
        std::vector<CirclePoint> pts;
        for (const nlohmann::json& row : doc)
            pts.push_back({parse_rat(row.at(0).get<std::string>()),
                           parse_rat(row.at(1).get<std::string>())});
        return pts;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("absorb-circle: " + path +
                          " must hold a JSON array of [x, y] rational string pairs: " + e.what());
    }
}

int run_absorb_circle(const RunConfig& cfg) {
    const std::vector<CirclePoint> pts = read_circle_points(cfg.points);
    if (pts.empty()) throw precondition_error("absorb-circle: no points given");
    const PlaneRotation tau = find_avoiding_rotation(pts, cfg.horizon);
    auto trunc = std::make_shared<const AbsorberTrunc<CirclePoint, PlaneRotation>>(
        build_absorber(pts, tau, cfg.horizon));
    const SetView<CirclePoint> circle = SetView<CirclePoint>::lazy_membership(
        "unit-circle", [](const CirclePoint& p) { return p.x * p.x + p.y * p.y == 1; });
    const SetView<CirclePoint> basin = SetView<CirclePoint>::lazy(
        "absorber", [trunc](const CirclePoint& p) { return trunc->member(p); },
        [trunc](int d) { return trunc->up_to(std::min(d, trunc->depth)); },
        {{"depth", trunc->depth}});
    const auto cert =
        absorb(SetView<CirclePoint>::explicit_set(pts), basin, tau, circle, cfg.horizon);

    VerificationReport rep = verify(cert, cfg.horizon);
    rep.kind = "absorb-circle";
    rep.counts["points"] = static_cast<std::int64_t>(pts.size());
    rep.note("rotation = " + tau.str());
    return emit(rep);
}

int run_absorb_ball(const RunConfig& cfg) {
    const Vec3E u{1, 0, 0};
    const Mat3E omega = find_avoiding_axis_rotation({u}, cfg.horizon);
    const BallOriginAbsorber ball =
        ball_absorb_origin(build_absorber<Vec3E>({u}, omega, cfg.horizon), omega);
    auto basin = std::make_shared<const AbsorberTrunc<Vec3E, IsometryE>>(ball.n_trunc);
    const auto cert = absorb(SetView<Vec3E>::explicit_set({Vec3E::zero()}), absorber_view(basin),
                             ball.r, closed_ball_view(), cfg.horizon);

    VerificationReport rep = verify(cert, cfg.horizon);
    rep.kind = "absorb-ball";
    rep.note("motion = " + motion_to_json(ball.r).dump());
    return emit(rep);
}

int run_plan_strong_form(const RunConfig& cfg) {
    const DerivationCert plan = strong_form_plan(parse_rat(cfg.rq), parse_rat(cfg.big_rq),
                                                 parse_rat(cfg.rt), parse_rat(cfg.big_rt));
    const VerificationReport rep = validate_derivation(plan);
    nlohmann::json j;
    j["schema"] = kSchema;
    j["kind"] = "strong-form-plan";
    j["bound"] = plan.bound.str();
    j["plan"] = plan.to_json();
    j["report"] = rep.to_json();
    std::cout << j.dump(2) << "\n";
    return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact equidecomposition toolkit"};
    app.require_subcommand(1);
    RunConfig cfg;

    CLI::App* certify = app.add_subcommand("certify-freeness", "check the rotation group is free");
    certify->add_option("--depth", cfg.depth, "word length bound")->required();

    CLI::App* dgroup = app.add_subcommand("double-group", "doubling of the free group ball");
    dgroup->add_option("--depth", cfg.depth, "word length bound")->required();

    CLI::App* dorbit = app.add_subcommand("double-orbit", "doubling of a sphere orbit");
    dorbit->add_option("--depth", cfg.depth, "orbit word length bound")->required();
    dorbit->add_option("--base", cfg.base, "base point a,b,c,k meaning (a+b*sqrt2+c)/3^k");
    CLI::Option* out_opt = dorbit->add_option("--out", cfg.out, "write the cloud to this file");
    CLI::Option* fmt_opt =
        dorbit->add_option("--format", cfg.format, "cloud format: csv, json, or ply")
            ->check(CLI::IsMember({"csv", "json", "ply"}));

    CLI::App* bsb = app.add_subcommand("bsb-demo", "random finite injection-pair combiner");
    bsb->add_option("--size", cfg.size, "carrier size")->required();
    bsb->add_option("--seed", cfg.seed, "random seed");

    CLI::App* acircle = app.add_subcommand("absorb-circle", "absorb points into the circle");
    acircle->add_option("--points", cfg.points, "JSON file of [x, y] rational pairs")->required();
    acircle->add_option("--horizon", cfg.horizon, "orbit collision horizon")->required();

    CLI::App* aball = app.add_subcommand("absorb-ball", "absorb the origin into the unit ball");
    aball->add_option("--horizon", cfg.horizon, "absorber truncation depth")->required();

    CLI::App* plan = app.add_subcommand("plan-strong-form", "piece-count plan for two bodies");
    plan->add_option("--rq", cfg.rq, "inner radius of Q")->required();
    plan->add_option("--RQ", cfg.big_rq, "outer radius of Q")->required();
    plan->add_option("--rt", cfg.rt, "inner radius of T")->required();
    plan->add_option("--RT", cfg.big_rt, "outer radius of T")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*certify) return run_certify_freeness(cfg);
        if (*dgroup) return run_double_group(cfg);
        if (*dorbit) return run_double_orbit(cfg, fmt_opt->count() > 0, out_opt->count() > 0);
        if (*bsb) return run_bsb_demo(cfg);
        if (*acircle) return run_absorb_circle(cfg);
        if (*aball) return run_absorb_ball(cfg);
        if (*plan) return run_plan_strong_form(cfg);
    } catch (const parse_error& e) {
        emit_error("parse", e.what());
        return 2;
    } catch (const resource_error& e) {
        emit_error("resource", e.what());
        return 2;
    } catch (const precondition_error& e) {
        emit_error("precondition", e.what());
        return 2;
    } catch (const error& e) {
        emit_error("error", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return 2;
    }
    return 2;
}
