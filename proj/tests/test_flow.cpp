#include <catch2/catch_amalgamated.hpp>

#include "insul/flow.hpp"

using namespace insul;

namespace {
FlowConfig acceptance_config() {
    FlowConfig cfg;
    cfg.h = 0.015;
    cfg.defect_tol = 2.5e-3;
    cfg.max_steps = 100;
    return cfg;
}
}  // namespace

TEST_CASE("single flow step") {
    FlowConfig cfg = acceptance_config();
    SECTION("descends from a non-disk star") {
        StarBoundary sb = StarBoundary({0, 0}, 1.0, {{2, 0.1, 0.0}}).rescaled_to_area(kPi);
        ShapeEvaluation ev = evaluate_shape(sb, 1.0, cfg.h);
        ShapeGradient sg = shape_gradient(ev.mesh, ev.sol, sb, 1.0);
        FlowState st;
        st.shape = sb;
        st.energy = ev.en;
        st.defect = sg.defect;
        FlowState next = flow_step(st, 1.0, 0.0, cfg);
        CHECK(next.energy.total < st.energy.total);
        CHECK(next.tau > 0.0);
        CHECK_THAT(next.shape.analytic_area(), Catch::Matchers::WithinRel(kPi, 1e-10));
    }
    SECTION("no-op at the disk") {
        StarBoundary disk = StarBoundary::circle(1.0);
        ShapeEvaluation ev = evaluate_shape(disk, 1.0, cfg.h);
        ShapeGradient sg = shape_gradient(ev.mesh, ev.sol, disk, 1.0);
        FlowState st;
        st.shape = disk;
        st.energy = ev.en;
        st.defect = sg.defect;
        FlowState next = flow_step(st, 1.0, 0.0, cfg);
        CHECK(next.tau == 0.0);
        CHECK(next.step == st.step);
        CHECK(next.shape.a0 == disk.a0);
    }
}

TEST_CASE("flow converges to the disk") {
    FlowConfig cfg = acceptance_config();
    const double J_disk = -kPi / 16.0 - 0.125;
    for (auto [label, sb] :
         {std::pair{"a2", StarBoundary({0, 0}, 1.0, {{2, 0.1, 0.0}})},
          std::pair{"a3", StarBoundary({0, 0}, 1.0, {{3, 0.08, 0.0}})}}) {
        FlowResult res = run_flow(sb, 1.0, kPi, cfg);
        INFO(label << ": " << res.states.size() - 1 << " steps");
        CHECK(res.status == FlowStatus::Converged);
        const FlowState& last = res.states.back();
        CHECK(last.dist_to_ball <= 1e-2);
        CHECK(std::abs(last.energy.total - J_disk) <= 1e-4);
        for (std::size_t i = 1; i < res.states.size(); ++i)
            CHECK(res.states[i].energy.total < res.states[i - 1].energy.total);
        for (const FlowState& s : res.states)
            CHECK_THAT(s.shape.analytic_area(), Catch::Matchers::WithinRel(kPi, 1e-10));
    }
}

TEST_CASE("flow terminates immediately at the disk") {
    FlowResult res = run_flow(StarBoundary::circle(1.0), 1.0, kPi, acceptance_config());
    CHECK(res.status == FlowStatus::Converged);
    CHECK(res.states.size() == 1);
    CHECK(res.states.back().step == 0);
}

TEST_CASE("basin of attraction for random small perturbations") {
    FlowConfig cfg;
    cfg.h = 0.04;
    cfg.defect_tol = 2.5e-3;
    cfg.max_steps = 150;
    CounterRng rng(20240817, 0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<FourierMode> modes;
        for (int k = 1; k <= 5; ++k)
            modes.push_back({k, rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)});
        StarBoundary sb({0, 0}, 1.0, modes);
        FlowResult res = run_flow(sb, 1.0, kPi, cfg);
        INFO("trial " << trial << " steps " << res.states.size() - 1
                      << " dist " << res.states.back().dist_to_ball);
        CHECK(res.status == FlowStatus::Converged);
        CHECK(res.states.back().dist_to_ball <= 1e-2);
    }
}

TEST_CASE("hausdorff distance to the equal-area disk") {
    CHECK_THAT(distance_to_equal_area_disk(StarBoundary::circle(2.0)),
               Catch::Matchers::WithinAbs(0.0, 1e-6));
    // a pure translation keeps the distance zero (the disk recenters)
    CHECK_THAT(distance_to_equal_area_disk(StarBoundary::circle(1.0, {0.4, -0.2})),
               Catch::Matchers::WithinAbs(0.0, 1e-6));
    // a small mode-2 perturbation sits at its amplitude
    StarBoundary sb({0, 0}, 1.0, {{2, 0.05, 0.0}});
    const double d = distance_to_equal_area_disk(sb);
    CHECK(d > 0.03);
    CHECK(d < 0.07);
}
