#include <catch_amalgamated.hpp>

#include "aisim/config.hpp"
#include "aisim/error.hpp"
#include "aisim/harness.hpp"
#include "aisim/simd/kernels.hpp"
#include "aisim/synthetic.hpp"
#include "support.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

using namespace aisim;
using namespace aisim::harness;
using namespace aisim::test;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// Four-node grid with its native VSG turned back into a generator.
Scenario four_node_scenario() {
    Scenario s;
    s.id = "four";
    s.grid = std::make_shared<const Grid>(synthetic::four_node());
    s.constant_inertia = true;
    s.fault = Fault{1, -1.0, 0.0};
    s.integration.t_end = 60.0;
    return s;
}

Scenario barbell_scenario() {
    Scenario s;
    s.id = "barbell";
    s.grid = std::make_shared<const Grid>(load_grid(data_path("grids/barbell.json")));
    s.alpha = 10.0;
    s.beta = 10.0;
    s.fault = Fault{6, -1.0, 0.0};
    s.integration.t_end = 60.0;
    return s;
}

}  // namespace

TEST_CASE("VSG selection modes", "[harness]") {
    const Grid g = synthetic::rts96_like(42);
    std::size_t gens = 0;
    for (const Node& n : g.nodes()) gens += n.kind == NodeKind::Generator ? 1 : 0;
    REQUIRE(gens == 30);

    CHECK(resolve_vsgs(g, VsgSelection::none(), 1).empty());
    CHECK(resolve_vsgs(g, VsgSelection::of({21, 6}), 1) == std::vector<std::size_t>{6, 21});
    CHECK_THROWS_AS(resolve_vsgs(g, VsgSelection::of({6, 6}), 1), ConfigError);

    const auto a = resolve_vsgs(g, VsgSelection::random_fraction(0.25), 7);
    const auto b = resolve_vsgs(g, VsgSelection::random_fraction(0.25), 7);
    const auto c = resolve_vsgs(g, VsgSelection::random_fraction(0.25), 8);
    CHECK(a.size() == 8);  // round(0.25 * 30)
    CHECK(a == b);
    CHECK(a != c);
    for (std::size_t id : a) CHECK(g.node(id).kind == NodeKind::Generator);
    CHECK_THROWS_AS(resolve_vsgs(g, VsgSelection::random_fraction(1.5), 7), ConfigError);

    const auto area_b = resolve_vsgs(g, VsgSelection::in_areas({"B"}), 0);
    CHECK(area_b.size() == 10);
    for (std::size_t id : area_b) CHECK(g.node(id).area == "B");
}

TEST_CASE("scenario resolution", "[harness]") {
    Scenario s = four_node_scenario();
    s.vsgs = VsgSelection::of({0, 1});
    s.alpha = 3.0;
    s.beta = 4.0;
    s.per_vsg[1] = {7.0, 8.0};
    s.per_vsg[2] = {9.0, 9.0};  // a load: ignored
    const ResolvedScenario r = resolve(s);
    CHECK(r.grid.vsg_count() == 2);
    CHECK(r.grid.node(0).alpha == 3.0);
    CHECK(r.grid.node(1).alpha == 7.0);
    CHECK(r.grid.node(1).beta == 8.0);
    CHECK_THAT(r.grid.node(0).m_min, WithinRel(r.grid.node(0).m / 3.0, 1e-15));
    CHECK(r.policy.mode == VsgMode::Plain);

    s.policy.mode = VsgMode::Rearm;
    s.policy.m_reset[1] = 1.0;
    const ResolvedScenario rr = resolve(s);
    REQUIRE(rr.policy.m_reset.size() == 2);
    CHECK(rr.policy.m_reset[0] == rr.grid.node(0).m);
    CHECK(rr.policy.m_reset[1] == 1.0);

    const Scenario base = constant_baseline(s);
    CHECK(base.id == "four:constant");
    CHECK(resolve(base).grid.vsg_count() == 0);
    // Native VSGs are demoted in the baseline too.
    Scenario native = four_node_scenario();
    native.constant_inertia = false;
    CHECK(resolve(native).grid.vsg_count() == 1);
    const Grid demoted = resolve(constant_baseline(native)).grid;
    CHECK(demoted.vsg_count() == 0);
    CHECK(demoted.node(1).m == synthetic::four_node().node(1).m);
}

TEST_CASE("scenario without VSGs equals the constant baseline", "[harness]") {
    Scenario s = four_node_scenario();
    s.alpha = 123.0;  // ignored without VSGs
    const RunResult a = run_scenario(s);
    const RunResult b = run_scenario(constant_baseline(s));
    CHECK(metrics_csv_row("x", a.metrics) == metrics_csv_row("x", b.metrics));
}

TEST_CASE("runs are reproducible", "[harness]") {
    Scenario s = four_node_scenario();
    s.vsgs = VsgSelection::of({0});
    const RunResult a = run_scenario(s);
    const RunResult b = run_scenario(s);
    CHECK(metrics_csv_row(a.id, a.metrics) == metrics_csv_row(b.id, b.metrics));
}

TEST_CASE("errors carry the scenario id", "[harness]") {
    Scenario s = four_node_scenario();
    s.fault.node = 99;
    try {
        (void)run_scenario(s);
        FAIL("expected ScenarioFailed");
    } catch (const ScenarioFailed& e) {
        CHECK(e.scenario == "four");
    }
}

TEST_CASE("trajectory is kept or streamed on request", "[harness]") {
    Scenario s = four_node_scenario();
    s.integration.t_end = 2.0;
    s.integration.sample_dt = 0.5;
    std::ostringstream csv;
    RunOptions opt;
    opt.keep_trajectory = true;
    opt.trajectory_csv = &csv;
    const RunResult r = run_scenario(s, opt);
    REQUIRE(r.trajectory.has_value());
    CHECK(r.trajectory->sample_count() == 5);
    std::ostringstream again;
    write_trajectory_csv(again, *r.trajectory);
    CHECK(csv.str() == again.str());
}

TEST_CASE("parallel_for visits every index once", "[harness]") {
    std::vector<std::atomic<int>> hits(101);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 7) throw ConfigError("boom");
                    }),
                    ConfigError);
}

TEST_CASE("sweep axes", "[harness][sweep]") {
    const auto axis = default_axis();
    CHECK(axis.size() == 12);
    CHECK(axis.front() == 0.1);
    CHECK(axis.back() == 50.0);
    CHECK(std::count(axis.begin(), axis.end(), 5.0) == 1);
    CHECK(std::count(axis.begin(), axis.end(), 10.0) == 1);
    CHECK(std::is_sorted(axis.begin(), axis.end()));
    CHECK(log_axis(1.0, 100.0, 3, {10.0}).size() == 3);
    CHECK_THROWS_AS(log_axis(0.0, 1.0, 3), ConfigError);
}

TEST_CASE("sweep with an empty VSG set gives unit ratios", "[harness][sweep]") {
    SweepSpec spec;
    spec.scenario = four_node_scenario();
    spec.alphas = {1.0, 10.0};
    spec.betas = {2.0};
    const SweepResult r = sweep_alpha_beta(spec, 2);
    REQUIRE(r.cells.size() == 2);
    for (const SweepCell& c : r.cells) {
        REQUIRE(c.report);
        for (Metric m : kAllMetrics) CHECK(c.ratios[m] == 1.0);
    }
    std::ostringstream csv;
    write_sweep_csv(csv, r);
    CHECK(csv.str().rfind("alpha,beta,metric,ratio\n1,2,l2_freq,1\n", 0) == 0);
}

TEST_CASE("vanishing alpha matches constant inertia at m_min", "[harness][sweep]") {
    SweepSpec spec;
    spec.scenario = four_node_scenario();
    spec.scenario.vsgs = VsgSelection::of({1});
    spec.alphas = {1e-6};
    spec.betas = {5.0};
    const SweepResult r = sweep_alpha_beta(spec, 1);
    REQUIRE(r.cells.at(0).report);

    // The same grid with node 1 a plain generator of inertia m_min.
    GridSpec floor_spec = synthetic::four_node().spec();
    floor_spec.nodes[1].kind = NodeKind::Generator;
    floor_spec.nodes[1].m = floor_spec.nodes[1].m / 3.0;
    floor_spec.nodes[1].m_min = floor_spec.nodes[1].alpha = floor_spec.nodes[1].beta = 0.0;
    Scenario floor = four_node_scenario();
    floor.grid = std::make_shared<const Grid>(Grid::build(std::move(floor_spec)));
    const RatioReport expect = ratio_report(run_scenario(floor).metrics, r.baseline);
    for (Metric m : kPerformanceMetrics) {
        CAPTURE(to_string(m));
        CHECK_THAT(r.cells[0].ratios[m], WithinRel(expect[m], 1e-4));
    }
}

TEST_CASE("centrality ordering", "[harness][centrality]") {
    const auto star_order = centrality_order(star(5));
    CHECK(star_order.front().node == 0);
    CHECK(star_order.front().score == 5.0);
    CHECK(star_order[1].node == 1);  // ties keep id order

    GridSpec path;
    path.nodes = {gen(0, 0.0, 1.0, 0.3), gen(1, 0.0, 1.0, 0.3), gen(2, 0.0, 1.0, 0.3)};
    path.lines = {{0, 1, 1.0}, {1, 2, 1.0}};
    CHECK(centrality_order(Grid::build(std::move(path))).front().node == 1);

    const synthetic::BarbellLayout layout;
    const auto order = centrality_order(synthetic::barbell(42, layout));
    for (std::size_t r = 0; r < order.size(); ++r) {
        CAPTURE(r);
        CHECK((order[r].node < layout.core) == (r < layout.core));
    }
}

TEST_CASE("campaign preconditions", "[harness][campaign]") {
    CampaignSpec spec;
    spec.scenario = barbell_scenario();
    spec.threshold_mw = 1e6;
    CHECK_THROWS_AS(fault_campaign(spec), NoQualifyingFaults);

    spec.threshold_mw = 50.0;
    spec.candidate = Variant{"x", VsgSelection::of({8, 12})};
    spec.reference = Variant{"y", VsgSelection::of({8})};
    CHECK_THROWS_AS(placement_compare(spec), InertiaBudgetMismatch);
}

TEST_CASE("identical variants give unit ratios", "[harness][campaign]") {
    CampaignSpec spec;
    spec.scenario = barbell_scenario();
    spec.threshold_mw = 50.0;
    spec.candidate = Variant{"constant", VsgSelection::none()};
    spec.reference = Variant{"constant", VsgSelection::none()};
    const CampaignResult all_constant = fault_campaign(spec, 2);
    CHECK(all_constant.rows.size() == 11);  // every generator
    for (const CampaignRow& row : all_constant.rows) {
        for (Metric m : kAllMetrics) CHECK(row.ratios[m] == 1.0);
    }

    spec.candidate = Variant{"a", VsgSelection::of({8, 16})};
    spec.reference = Variant{"b", VsgSelection::of({8, 16})};
    const CampaignResult same = placement_compare(spec, 2);
    CHECK(same.rows.size() == 9);
    for (const CampaignRow& row : same.rows) {
        CHECK(row.error.empty());
        for (Metric m : kAllMetrics) CHECK(row.ratios[m] == 1.0);
    }
    for (std::size_t i = 0; i + 1 < same.rows.size(); ++i) CHECK(same.rows[i].rank < same.rows[i + 1].rank);
}

TEST_CASE("campaign output does not depend on worker count", "[harness][campaign]") {
    CampaignSpec spec;
    spec.scenario = barbell_scenario();
    spec.scenario.integration.t_end = 40.0;
    spec.threshold_mw = 50.0;
    spec.candidate = Variant{"adaptive", VsgSelection::of({8, 12, 16, 20})};
    std::ostringstream one, many;
    write_campaign_csv(one, fault_campaign(spec, 1));
    write_campaign_csv(many, fault_campaign(spec, 5));
    CHECK(one.str() == many.str());
    CHECK(one.str().rfind("rank,node,centrality,region,candidate,reference,l2_freq,", 0) == 0);
}

TEST_CASE("config parsing", "[harness][config]") {
    const std::string dir = data_path("configs");
    const Config cfg = parse_config(R"({
        "id": "t", "grid": "../grids/four_node.json", "seed": 9,
        "vsgs": {"ids": [0]}, "alpha": 2, "beta": 3,
        "per_vsg": [{"id": 0, "alpha": 4}],
        "policy": {"mode": "rearm", "m_reset": {"0": 1.5}, "hold": 30},
        "fault": {"node": 1, "delta_P": -0.5, "time": 1.0},
        "integration": {"t_end": 50, "sample_dt": 0.01},
        "sweep": {"alpha": [1, 2], "beta": {"log": [1, 100, 3], "anchors": [5]}},
        "campaign": {"threshold_mw": 80, "reference": {"name": "r", "vsgs": {"areas": ["A"]}}},
        "placement": {"peripheral": {"ids": [0]}, "homogeneous": {"ids": [0]}}
    })", dir);
    const Scenario& s = cfg.scenario;
    CHECK(s.id == "t");
    CHECK(s.seed == 9);
    CHECK(s.grid->size() == 4);
    CHECK(s.vsgs.ids == std::vector<std::size_t>{0});
    CHECK(s.per_vsg.at(0) == std::pair<double, double>{4.0, 3.0});
    CHECK(s.policy.mode == VsgMode::Rearm);
    CHECK(s.policy.m_reset.at(0) == 1.5);
    CHECK(s.policy.hold == 30.0);
    CHECK(s.fault.delta_P == -0.5);
    CHECK(s.fault.time == 1.0);
    CHECK(s.integration.t_end == 50.0);
    CHECK(cfg.alphas == std::vector<double>{1.0, 2.0});
    CHECK(cfg.betas.size() == 4);
    CHECK(cfg.campaign.threshold_mw == 80.0);
    CHECK(cfg.campaign.candidate.vsgs.ids == std::vector<std::size_t>{0});
    CHECK(cfg.campaign.reference.name == "r");
    CHECK(cfg.has_placement);
    CHECK(cfg.placement.candidate.name == "peripheral");

    CHECK_THROWS_AS(parse_config("{", dir), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"id": "x"})", dir), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"grid": "../grids/four_node.json", "policy": {"mode": "fast"}})", dir),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"grid": "../grids/four_node.json", "alpha": "big"})", dir), ConfigError);
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("shipped configs load", "[harness][config]") {
    for (const char* name : {"four_node", "rts96", "rts96_rearm", "synthetic40", "barbell"}) {
        CAPTURE(name);
        const Config cfg = load_config(data_path(std::string("configs/") + name + ".json"));
        CHECK_NOTHROW(resolve(cfg.scenario));
    }
}

TEST_CASE("adaptive inertia resynchronizes faster on the RTS-like grid", "[harness][slow]") {
    const Config cfg = load_config(data_path("configs/rts96.json"));
    const RunResult a = run_scenario(cfg.scenario);
    const RunResult c = run_scenario(constant_baseline(cfg.scenario));
    CHECK(a.metrics.converged);
    CHECK(c.metrics.converged);
    CHECK(a.metrics.t_sync < c.metrics.t_sync);
    CHECK(a.metrics.e_rot < c.metrics.e_rot);
    CHECK(a.metrics.coherency < c.metrics.coherency);
    const RatioReport r = ratio_report(a.metrics, c.metrics);
    CHECK(r.better_on_all_four());
}

TEST_CASE("scalar and avx2 kernels give the same scenario metrics", "[harness][simd]") {
    if (!simd::supported(simd::Isa::Avx2)) SKIP("no AVX2 on this machine");
    Scenario s = load_config(data_path("configs/rts96.json")).scenario;
    s.integration.t_end = 60.0;
    const simd::Isa before = simd::active().isa;
    simd::select(simd::Isa::Scalar);
    const RunResult a = run_scenario(s);
    simd::select(simd::Isa::Avx2);
    const RunResult b = run_scenario(s);
    simd::select(before);
    // Kernels differ only in rounding; the adaptive step sequence may shift but
    // the metrics stay within the integration tolerance.
    for (Metric m : kAllMetrics) {
        CAPTURE(to_string(m));
        CHECK_THAT(value(b.metrics, m), Catch::Matchers::WithinRel(value(a.metrics, m), 1e-6));
    }
}
