#include <catch2/catch_amalgamated.hpp>

#include "insul/shape_derivative.hpp"

using namespace insul;

namespace {

const double kGateH = 0.015;

StarBoundary gate_shape_1() {
    return StarBoundary({0, 0}, 1.0, {{2, 0.1, 0.0}, {3, 0.05, 0.0}}).rescaled_to_area(kPi);
}

// Generic shape with every cos/sin response for k = 2..6 bounded away from
// zero (symmetric shapes make half the pairings vanish).
StarBoundary gate_shape_2() {
    return StarBoundary({0, 0}, 1.0,
                        {{2, 0.017, 0.021},
                         {3, 0.021, -0.012},
                         {4, -0.015, 0.008},
                         {5, 0.008, -0.008},
                         {6, -0.006, 0.005}})
        .rescaled_to_area(kPi);
}

std::vector<double> modal_values(const Mesh& mesh, int k, bool sine) {
    std::vector<double> z(mesh.boundary_theta.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = sine ? std::sin(k * mesh.boundary_theta[i]) : std::cos(k * mesh.boundary_theta[i]);
    return z;
}

}  // namespace

TEST_CASE("stationarity defect") {
    SECTION("the disk is discretely stationary") {
        StarBoundary disk = StarBoundary::circle(1.0);
        ShapeEvaluation ev = evaluate_shape(disk, 1.0, 0.02);
        ShapeGradient sg = shape_gradient(ev.mesh, ev.sol, disk, 1.0);
        CHECK(sg.defect <= 5e-3);
        CHECK_THAT(sg.velocity.integral(), Catch::Matchers::WithinAbs(0.0, 1e-12 * sg.velocity.perimeter()));
    }
    SECTION("a non-disk star is not") {
        StarBoundary star = StarBoundary({0, 0}, 1.0, {{2, 0.1, 0.0}}).rescaled_to_area(kPi);
        ShapeEvaluation ev = evaluate_shape(star, 1.0, 0.02);
        ShapeGradient sg = shape_gradient(ev.mesh, ev.sol, star, 1.0);
        CHECK(sg.defect >= 0.05);
    }
    SECTION("negative traces divert to the eps path") {
        Mesh mesh = mesh_annulus(1.0, 2.0, 0.05);
        RankOneSystem sys = assemble(mesh, 0.5, SourceSpec::Constant(1.0));
        FemSolution sol = solve_insulation_linear(mesh, sys);
        CHECK_THROWS_AS(shape_gradient(mesh, sol, StarBoundary::circle(2.0), 0.5), Error);
    }
}

TEST_CASE("pairing reproduces the finite-difference shape derivative") {
    for (const StarBoundary& sb : {gate_shape_1(), gate_shape_2()}) {
        ShapeEvaluation ev = evaluate_shape(sb, 1.0, kGateH);
        ShapeGradient sg = shape_gradient(ev.mesh, ev.sol, sb, 1.0);
        for (int k = 2; k <= 6; ++k) {
            const double pairing = gradient_pairing(sg, modal_values(ev.mesh, k, false));
            const FdDerivative fd = fd_shape_derivative(sb, ModalVelocity::cosine(k), 1.0, 1e-3, kGateH);
            INFO("k=" << k << " pairing=" << pairing << " fd=" << fd.value);
            CHECK(std::abs(pairing - fd.value) <= 1e-3 * std::abs(fd.value));
        }
    }
}

TEST_CASE("the +u sign variant fails the pairing gate") {
    const StarBoundary sb = gate_shape_1();
    ShapeEvaluation ev = evaluate_shape(sb, 1.0, kGateH);
    ShapeGradient wrong = shape_gradient(ev.mesh, ev.sol, sb, 1.0, +1.0);
    for (int k = 2; k <= 6; ++k) {
        const double pairing = gradient_pairing(wrong, modal_values(ev.mesh, k, false));
        const FdDerivative fd = fd_shape_derivative(sb, ModalVelocity::cosine(k), 1.0, 1e-3, kGateH);
        INFO("k=" << k);
        CHECK(std::abs(pairing - fd.value) > 10.0 * (1e-3 * std::abs(fd.value)));
    }
}

TEST_CASE("pairing gate across sine and cosine fields") {
    for (const StarBoundary& sb : {gate_shape_2(), gate_shape_2().rotated(0.9)}) {
        ShapeEvaluation ev = evaluate_shape(sb, 1.0, kGateH);
        ShapeGradient sg = shape_gradient(ev.mesh, ev.sol, sb, 1.0);
        for (int k = 2; k <= 6; ++k) {
            for (bool sine : {false, true}) {
                const double pairing = gradient_pairing(sg, modal_values(ev.mesh, k, sine));
                const ModalVelocity mv = sine ? ModalVelocity::sine(k) : ModalVelocity::cosine(k);
                const FdDerivative fd = fd_shape_derivative(sb, mv, 1.0, 1e-3, kGateH);
                INFO((sine ? "sin " : "cos ") << k << " pairing=" << pairing << " fd=" << fd.value);
                CHECK(std::abs(pairing - fd.value) <= 1e-3 * std::abs(fd.value));
            }
        }
    }
}

TEST_CASE("first derivative vanishes at the disk") {
    StarBoundary disk = StarBoundary::circle(1.0);
    for (int k : {1, 2}) {
        const FdDerivative fd = fd_shape_derivative(disk, ModalVelocity::cosine(k), 1.0, 1e-3, 0.02);
        CHECK_THAT(fd.value, Catch::Matchers::WithinAbs(0.0, 1e-4));
    }
}

TEST_CASE("modal second variation at the ball") {
    std::vector<std::pair<int, double>> unit_modes;
    for (int k = 1; k <= 8; ++k) unit_modes.push_back({k, 1.0});
    ModalStability table = second_variation_ball(2, 1.0, 1.0, unit_modes, true, 0.02);

    SECTION("closed-form anchor values") {
        CHECK(std::abs(table.per_mode[0].Q_closed) <= 1e-10);  // translation mode
        CHECK_THAT(table.per_mode[1].Q_closed, Catch::Matchers::WithinAbs(kPi / 8.0 + 0.375, 1e-6));
        CHECK_THAT(table.per_mode[2].Q_closed, Catch::Matchers::WithinAbs(kPi / 6.0 + 1.0, 1e-12));
        CHECK_THAT(table.per_mode[7].Q_closed,
                   Catch::Matchers::WithinAbs(7.0 * kPi / 32.0 + 63.0 / 8.0, 1e-12));
    }
    SECTION("quadrature path agrees within 1%") {
        const double scale = kPi / 4.0;  // leading term of the quadratic form
        for (const auto& pm : table.per_mode) {
            INFO("k=" << pm.k << " closed=" << pm.Q_closed << " quadrature=" << pm.Q_quadrature);
            CHECK(std::abs(pm.Q_quadrature - pm.Q_closed) <=
                  0.01 * std::max(std::abs(pm.Q_closed), scale));
        }
    }
    SECTION("nonnegativity up to the mode cap") {
        std::vector<std::pair<int, double>> all;
        for (int k = 1; k <= 64; ++k) all.push_back({k, 1.0});
        ModalStability full = second_variation_ball(2, 1.0, 1.0, all, false);
        CHECK(full.all_nonnegative);
        for (const auto& pm : full.per_mode) CHECK(pm.Q_closed >= -1e-10);
    }
    SECTION("total combines amplitudes quadratically") {
        ModalStability two = second_variation_ball(2, 1.0, 1.0, {{2, 0.5}, {3, 0.1}}, false);
        CHECK_THAT(two.total,
                   Catch::Matchers::WithinRel(0.25 * (kPi / 8.0 + 0.375) + 0.01 * (kPi / 6.0 + 1.0),
                                              1e-12));
    }
    SECTION("general dimension needs supplied integrals") {
        CHECK_THROWS_AS(second_variation_ball(3, 1.0, 1.0, {{2, 1.0}}, false), UnsupportedDimension);
        const double q = second_variation_general(3, 1.0, 1.0, 1.0, 0.1, 4.0);
        CHECK(std::isfinite(q));
    }
}

TEST_CASE("finite-difference second variation") {
    SECTION("translation mode is flat") {
        const double fd = second_variation_fd(1.0, 1.0, ModalVelocity::cosine(1), 0.01, 0.02);
        CHECK(std::abs(fd) <= 5e-3 * (kPi / 8.0 + 0.375));
    }
    SECTION("k = 2 and k = 3 match the closed form within 5%") {
        for (int k : {2, 3}) {
            const double fd = second_variation_fd(1.0, 1.0, ModalVelocity::cosine(k), 0.01, 0.02);
            const double Q = second_variation_mode_closed(1.0, 1.0, k);
            INFO("k=" << k << " fd=" << fd << " Q=" << Q);
            CHECK(std::abs(fd - Q) <= 0.05 * Q);
        }
    }
}

TEST_CASE("spherical Poincare term of the quadratic form") {
    // int (|grad_tan zeta|^2 - (n-1)/R^2 zeta^2) ds for zeta = cos(k theta)
    // equals pi (k^2 - 1)/R: nonnegative, zero exactly at the translation mode.
    for (double R : {1.0, 2.0}) {
        for (int k = 1; k <= 64; ++k) {
            double quad = 0.0;
            const int N = 4096;
            for (int i = 0; i < N; ++i) {
                const double th = 2.0 * kPi * i / N;
                quad += (sq(-k * std::sin(k * th) / R) - sq(std::cos(k * th)) / (R * R)) * R;
            }
            quad *= 2.0 * kPi / N;
            CHECK(quad >= -1e-10);
            if (k == 1) CHECK(std::abs(quad) <= 1e-10);
        }
    }
}

TEST_CASE("Steklov trace inequality") {
    Mesh mesh = triangulate(StarBoundary::circle(1.0), 0.02);
    SECTION("modal ratios follow 1/k") {
        for (int k = 1; k <= 6; ++k) {
            BoundaryField zeta = make_boundary_field(mesh, modal_values(mesh, k, false));
            SteklovInequalityReport rep = steklov_inequality_check(mesh, zeta);
            CHECK(rep.holds);
            CHECK_THAT(rep.ratio, Catch::Matchers::WithinRel(1.0 / k, 0.02));
            if (k == 2) {
                CHECK_THAT(rep.left, Catch::Matchers::WithinRel(kPi / 8.0, 0.01));
                CHECK_THAT(rep.right, Catch::Matchers::WithinRel(kPi / 4.0, 0.01));
            }
        }
    }
    SECTION("the k = 1 trace saturates the bound") {
        BoundaryField zeta = make_boundary_field(mesh, modal_values(mesh, 1, false));
        SteklovInequalityReport rep = steklov_inequality_check(mesh, zeta);
        CHECK_THAT(rep.ratio, Catch::Matchers::WithinAbs(1.0, 0.02));
    }
    SECTION("nonzero-mean data is rejected") {
        BoundaryField one = make_boundary_field(mesh, std::vector<double>(mesh.num_boundary(), 1.0));
        CHECK_THROWS_AS(steklov_inequality_check(mesh, one), IncompatibleData);
    }
}
