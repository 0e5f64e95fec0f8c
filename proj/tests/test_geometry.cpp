#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "insul/geometry.hpp"
#include "insul/mesh.hpp"

using namespace insul;

TEST_CASE("radius jet evaluation") {
    SECTION("constant radius circle") {
        StarBoundary c = StarBoundary::circle(1.0);
        RadiusJet j = c.eval_radius(0.7);
        CHECK(j.r == 1.0);
        CHECK(j.rp == 0.0);
        CHECK(j.rpp == 0.0);
    }
    SECTION("single cosine mode") {
        StarBoundary sb({0, 0}, 1.0, {{2, 0.1, 0.0}});
        RadiusJet j = sb.eval_radius(0.0);
        CHECK_THAT(j.r, Catch::Matchers::WithinAbs(1.1, 1e-15));
        CHECK_THAT(j.rp, Catch::Matchers::WithinAbs(0.0, 1e-15));
        CHECK_THAT(j.rpp, Catch::Matchers::WithinAbs(-0.4, 1e-15));
    }
    SECTION("single sine mode at the crest") {
        StarBoundary sb({0, 0}, 1.0, {{3, 0.0, 0.05}});
        RadiusJet j = sb.eval_radius(kPi / 6.0);
        CHECK_THAT(j.r, Catch::Matchers::WithinAbs(1.05, 1e-14));
        CHECK_THAT(j.rp, Catch::Matchers::WithinAbs(0.0, 1e-14));
        CHECK_THAT(j.rpp, Catch::Matchers::WithinAbs(-0.45, 1e-14));
    }
}

TEST_CASE("polar curvature") {
    CHECK_THAT(StarBoundary::circle(1.0).curvature(0.3), Catch::Matchers::WithinAbs(1.0, 1e-14));
    CHECK_THAT(StarBoundary::circle(2.0).curvature(1.1), Catch::Matchers::WithinAbs(0.5, 1e-14));
    StarBoundary sb({0, 0}, 1.0, {{2, 0.1, 0.0}});
    // (r^2 + 2 r'^2 - r r'') / (r^2 + r'^2)^{3/2} at theta = 0
    const double expected = (1.21 + 0.44) / std::pow(1.21, 1.5);
    CHECK_THAT(sb.curvature(0.0), Catch::Matchers::WithinRel(expected, 1e-12));
    CHECK_THAT(expected, Catch::Matchers::WithinAbs(1.239669, 1e-6));
}

TEST_CASE("mode bookkeeping") {
    CHECK_THROWS_AS(StarBoundary({0, 0}, 1.0, {{2, 0.1, 0.0}, {2, 0.0, 0.1}}), Error);
    CHECK_THROWS_AS(StarBoundary({0, 0}, 1.0, {{0, 0.1, 0.0}}), Error);
    StarBoundary sb({0, 0}, 1.0, {{5, 0.1, 0.0}, {2, 0.05, 0.0}});
    CHECK(sb.modes[0].k == 2);  // sorted ascending
    CHECK(sb.modes[1].k == 5);
    CHECK_FALSE(StarBoundary({0, 0}, 0.05, {{2, 0.1, 0.0}}).is_positive());
}

TEST_CASE("triangulation of the disk") {
    StarBoundary disk = StarBoundary::circle(1.0);
    SECTION("boundary count and area at h = 0.1") {
        Mesh mesh = triangulate(disk, 0.1);
        CHECK(std::abs(mesh.num_boundary() - 63) <= 3);
        DomainMetrics dm = metrics(mesh, &disk);
        CHECK_THAT(dm.area, Catch::Matchers::WithinRel(kPi, 0.01));
    }
    SECTION("area at h = 0.02") {
        Mesh mesh = triangulate(disk, 0.02);
        DomainMetrics dm = metrics(mesh, &disk);
        CHECK_THAT(dm.area, Catch::Matchers::WithinRel(kPi, 5e-4));
        CHECK_THAT(dm.perimeter, Catch::Matchers::WithinAbs(2.0 * kPi, 2e-3));
        for (double H : dm.curvature.values) CHECK_THAT(H, Catch::Matchers::WithinAbs(1.0, 0.01));
        CHECK(min_triangle_angle_deg(mesh) >= 20.0);
    }
    SECTION("degenerate spacing either fails or yields a valid coarse mesh") {
        try {
            Mesh mesh = triangulate(disk, 0.5);
            validate_mesh(mesh);  // no silent invariant violation
        } catch (const MeshQualityFailure&) {
            SUCCEED("quality failure is an accepted outcome");
        }
    }
}

TEST_CASE("metrics on templates") {
    SECTION("annulus") {
        Mesh mesh = mesh_annulus(1.0, 2.0, 0.02);
        DomainMetrics dm = metrics(mesh);
        CHECK_THAT(dm.area, Catch::Matchers::WithinAbs(3.0 * kPi, 0.01));
        CHECK_THAT(dm.perimeter, Catch::Matchers::WithinAbs(6.0 * kPi, 0.01));
    }
    SECTION("star area matches the polar integral") {
        StarBoundary sb({0, 0}, 1.0, {{2, 0.1, 0.0}});
        Mesh mesh = triangulate(sb, 0.02);
        CHECK_THAT(metrics(mesh, &sb).area, Catch::Matchers::WithinAbs(kPi * 1.005, 1e-3));
        CHECK_THAT(sb.analytic_area(), Catch::Matchers::WithinRel(kPi * 1.005, 1e-14));
    }
    SECTION("boundary weights sum to the perimeter") {
        Mesh mesh = triangulate(StarBoundary({0, 0}, 1.0, {{3, 0.08, 0.02}}), 0.05);
        BoundaryField f = make_boundary_field(mesh, std::vector<double>(mesh.num_boundary(), 1.0));
        CHECK_THAT(f.perimeter(), Catch::Matchers::WithinRel(metrics(mesh).perimeter, 1e-12));
    }
}

TEST_CASE("rescale to prescribed area") {
    SECTION("circle halves") {
        StarBoundary out = rescale_to_volume(StarBoundary::circle(2.0), kPi);
        CHECK_THAT(out.a0, Catch::Matchers::WithinRel(1.0, 1e-14));
    }
    SECTION("mode shape scales uniformly") {
        StarBoundary sb({0, 0}, 1.0, {{2, 0.1, 0.0}});
        StarBoundary out = rescale_to_volume(sb, kPi);
        const double lambda = std::sqrt(1.0 / 1.005);
        CHECK_THAT(out.a0, Catch::Matchers::WithinRel(lambda, 1e-13));
        CHECK_THAT(out.modes[0].a, Catch::Matchers::WithinRel(0.1 * lambda, 1e-13));
        CHECK_THAT(out.analytic_area(), Catch::Matchers::WithinRel(kPi, 1e-12));
    }
    SECTION("identity at the target and idempotence") {
        StarBoundary sb({0, 0}, 1.3, {{4, 0.07, -0.02}});
        StarBoundary once = rescale_to_volume(sb, 2.0);
        StarBoundary twice = rescale_to_volume(once, 2.0);
        CHECK_THAT(twice.a0, Catch::Matchers::WithinRel(once.a0, 1e-12));
        CHECK_THAT(twice.modes[0].a, Catch::Matchers::WithinRel(once.modes[0].a, 1e-12));
        StarBoundary same = rescale_to_volume(once, once.analytic_area());
        CHECK_THAT(same.a0, Catch::Matchers::WithinRel(once.a0, 1e-12));
    }
}

TEST_CASE("rotation leaves metrics invariant") {
    StarBoundary sb({0, 0}, 1.0, {{2, 0.1, 0.0}, {5, 0.03, 0.04}});
    StarBoundary rot = sb.rotated(0.83);
    CHECK_THAT(rot.analytic_area(), Catch::Matchers::WithinRel(sb.analytic_area(), 1e-14));
    CHECK_THAT(rot.analytic_perimeter(), Catch::Matchers::WithinRel(sb.analytic_perimeter(), 1e-10));
    // Meshed metrics move only at discretization order.
    DomainMetrics a = metrics(triangulate(sb, 0.02), &sb);
    DomainMetrics b = metrics(triangulate(rot, 0.02), &rot);
    CHECK_THAT(b.area, Catch::Matchers::WithinRel(a.area, 1e-6));
    CHECK_THAT(b.perimeter, Catch::Matchers::WithinRel(a.perimeter, 1e-6));
}

TEST_CASE("meshed area converges at second order") {
    StarBoundary sb({0, 0}, 1.0, {{2, 0.1, 0.0}});
    const double exact = sb.analytic_area();
    std::vector<double> errs;
    for (double h : {0.1, 0.05, 0.025})
        errs.push_back(std::abs(metrics(triangulate(sb, h), &sb).area - exact));
    const double order = 0.5 * std::log2(errs[0] / errs[2]);
    INFO("errors " << errs[0] << " " << errs[1] << " " << errs[2] << " order " << order);
    CHECK(order >= 1.8);
}

TEST_CASE("mesh structural invariants") {
    Mesh mesh = triangulate(StarBoundary::circle(1.0), 0.05);
    SECTION("validation passes as built") { CHECK_NOTHROW(validate_mesh(mesh)); }
    SECTION("flipped triangle is caught") {
        std::swap(mesh.triangles[0][0], mesh.triangles[0][1]);
        CHECK_THROWS_AS(validate_mesh(mesh), MeshQualityFailure);
    }
    SECTION("dangling boundary edge is caught") {
        mesh.boundary_loops[0][0] = 0;  // center vertex is not on the boundary
        CHECK_THROWS_AS(validate_mesh(mesh), MeshQualityFailure);
    }
}

TEST_CASE("star file round trip") {
    StarBoundary sb({0.25, -0.5}, 1.2, {{2, 0.1, -0.02}, {7, 0.0, 0.033}});
    std::stringstream ss;
    write_star(ss, sb);
    StarBoundary back = read_star(ss);
    CHECK(back.center.x == sb.center.x);
    CHECK(back.a0 == sb.a0);
    REQUIRE(back.modes.size() == 2);
    CHECK(back.modes[1].b == sb.modes[1].b);

    std::stringstream bad("starshape 2\na0 1\n");
    CHECK_THROWS_AS(read_star(bad), ParseError);
    std::stringstream junk("starshape 1\nwhat 3\n");
    CHECK_THROWS_AS(read_star(junk), ParseError);
}

TEST_CASE("mesh file round trip") {
    Mesh mesh = mesh_annulus(1.0, 2.0, 0.1);
    std::stringstream ss;
    write_mesh(ss, mesh);
    Mesh back = read_mesh(ss);
    CHECK(back.num_vertices() == mesh.num_vertices());
    CHECK(back.triangles.size() == mesh.triangles.size());
    REQUIRE(back.boundary_loops.size() == 2);
    CHECK(back.boundary_loops[1].size() == mesh.boundary_loops[1].size());
    DomainMetrics a = metrics(mesh), b = metrics(back);
    CHECK_THAT(b.area, Catch::Matchers::WithinRel(a.area, 1e-14));

    std::stringstream bad("insulmesh 1\n3 1\n");
    CHECK_THROWS_AS(read_mesh(bad), ParseError);
}
