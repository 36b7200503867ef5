#include "dropcol/dataset.hpp"
#include "dropcol/error.hpp"
#include "dropcol/physics.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace dropcol;

namespace {

// Closed-form curves written out independently of the library.
double ref_chi1(double delta, double b) {
    const double tau = (1.0 - b) * (1.0 + delta);
    return tau > 1.0 ? 1.0 - (2.0 - tau) * (2.0 - tau) * (1.0 + tau) / 4.0 : tau * tau * (3.0 - tau) / 4.0;
}

double ref_c1(double we, double b, double delta, double phi = 3.351) {
    return we - delta * (1.0 + delta * delta) * (4.0 * phi - 12.0) / (ref_chi1(delta, b) * std::sqrt(1.0 - b * b));
}

double ref_c2(double we, double b, double delta) {
    const double xi = b * (1.0 + delta) / 2.0;
    const double e1 = 2.0 * std::pow(1.0 - xi, 2) * std::sqrt(std::max(0.0, 1.0 - xi * xi)) - 1.0;
    const double e2 =
        2.0 * std::pow(delta - xi, 2) * std::sqrt(std::max(0.0, delta * delta - xi * xi)) - std::pow(delta, 3);
    const double d3 = 1.0 + std::pow(delta, 3);
    const double num = 3.0 * (7.0 * std::cbrt(d3 * d3) - 4.0 * (1.0 + delta * delta)) * delta * d3 * d3;
    return we - num / (std::pow(delta, 6) * e1 + e2);
}

double ref_c3(double we, double b, double delta) {
    return b - std::sqrt(2.4 * (delta * delta * delta - 2.4 * delta * delta + 2.7 * delta) / we);
}

const PhysicsModelParams kDefault{};

} // namespace

TEST_CASE("stretching curve arithmetic") {
    CHECK(eval_c3(50.0, 0.25, 1.0) == doctest::Approx(0.25 - std::sqrt(0.0624)).epsilon(1e-14));
    CHECK(eval_c3(50.0, 0.25, 1.0) == doctest::Approx(0.00020008).epsilon(1e-4));
    const double we = 37.0;
    CHECK(std::fabs(eval_c3(we, std::sqrt(2.4 * 1.3 / we), 1.0)) < 1e-15);
    CHECK(eval_c3(1e12, 0.4, 0.7) == doctest::Approx(0.4).epsilon(1e-5));
    CHECK_THROWS_AS(eval_c3(0.0, 0.2, 1.0), SingularityError);
}

TEST_CASE("reflexive curve at equal sizes") {
    const double num = 12.0 * (7.0 * std::cbrt(4.0) - 8.0);
    CHECK(num == doctest::Approx(37.3417).epsilon(1e-5));
    // b = 0: eta1 = eta2 = 1, denominator 2
    CHECK(reflexive_boundary(0.0, 1.0, kDefault) == doctest::Approx(num / 2.0).epsilon(1e-13));
    CHECK(eval_c2(reflexive_boundary(0.3, 1.0, kDefault), 0.3, 1.0, kDefault) == 0.0);
    CHECK(eval_c2(1e6, 0.1, 0.8, kDefault) > 0.0);
}

TEST_CASE("bouncing curve") {
    const double boundary = bouncing_boundary(0.4, 0.9, kDefault);
    CHECK(eval_c1(boundary, 0.4, 0.9, kDefault) == 0.0);
    CHECK(eval_c1(0.0, 0.4, 0.9, kDefault) < 0.0);
    double prev = 0.0;
    for (double b : {0.9, 0.99, 0.999}) {
        const double mag = std::fabs(eval_c1(10.0, b, 1.0, kDefault));
        CHECK(mag > prev);
        prev = mag;
    }
    CHECK_THROWS_AS(bouncing_boundary(1.0, 1.0, kDefault), SingularityError);
}

TEST_CASE("curves agree with independent closed forms") {
    for (double delta : {0.3, 0.55, 0.8, 1.0})
        for (double b : {0.0, 0.1, 0.35, 0.6, 0.85, 0.97})
            for (double we : {0.5, 5.0, 40.0, 120.0}) {
                CAPTURE(delta);
                CAPTURE(b);
                CAPTURE(we);
                CHECK(eval_c1(we, b, delta, kDefault) == doctest::Approx(ref_c1(we, b, delta)).epsilon(1e-12));
                CHECK(eval_c2(we, b, delta, kDefault) == doctest::Approx(ref_c2(we, b, delta)).epsilon(1e-12));
                CHECK(eval_c3(we, b, delta) == doctest::Approx(ref_c3(we, b, delta)).epsilon(1e-12));
            }
}

TEST_CASE("regime regions, three constructed points each") {
    // bouncing: below the bouncing curve
    CHECK(classify_physics(1.0, 0.0, 1.0, kDefault) == RegimeLabel::Bouncing);
    CHECK(classify_physics(2.0, 0.2, 0.9, kDefault) == RegimeLabel::Bouncing);
    CHECK(classify_physics(5.0, 0.9, 0.7, kDefault) == RegimeLabel::Bouncing);
    // coalescence: above the bouncing curve, below the separation curves
    CHECK(classify_physics(10.0, 0.0, 1.0, kDefault) == RegimeLabel::Coalescence);
    CHECK(classify_physics(15.0, 0.1, 1.0, kDefault) == RegimeLabel::Coalescence);
    CHECK(classify_physics(12.0, 0.2, 0.8, kDefault) == RegimeLabel::Coalescence);
    // reflexive: high We near head-on
    CHECK(classify_physics(100.0, 0.0, 1.0, kDefault) == RegimeLabel::Reflexive);
    CHECK(classify_physics(60.0, 0.05, 1.0, kDefault) == RegimeLabel::Reflexive);
    CHECK(classify_physics(150.0, 0.1, 0.9, kDefault) == RegimeLabel::Reflexive);
    // stretching: high We, large b
    CHECK(classify_physics(100.0, 0.8, 1.0, kDefault) == RegimeLabel::Stretching);
    CHECK(classify_physics(60.0, 0.6, 1.0, kDefault) == RegimeLabel::Stretching);
    CHECK(classify_physics(120.0, 0.5, 0.75, kDefault) == RegimeLabel::Stretching);
}

TEST_CASE("classification follows the documented order") {
    for (double delta : {0.4, 0.7, 1.0})
        for (double b = 0.0; b < 0.99; b += 0.07)
            for (double we : {0.3, 3.0, 15.0, 30.0, 70.0, 140.0}) {
                const double c1 = ref_c1(we, b, delta), c2 = ref_c2(we, b, delta), c3 = ref_c3(we, b, delta);
                const double xi = b * (1.0 + delta) / 2.0;
                const double den = std::pow(delta, 6) * (2.0 * std::pow(1.0 - xi, 2) * std::sqrt(std::max(0.0, 1.0 - xi * xi)) - 1.0) +
                                   2.0 * std::pow(delta - xi, 2) * std::sqrt(std::max(0.0, delta * delta - xi * xi)) -
                                   std::pow(delta, 3);
                RegimeLabel expect = RegimeLabel::Coalescence;
                if (c1 < 0) expect = RegimeLabel::Bouncing;
                else if (c3 > 0) expect = RegimeLabel::Stretching;
                else if (den > 0 && c2 > 0) expect = RegimeLabel::Reflexive;
                CAPTURE(we);
                CAPTURE(b);
                CAPTURE(delta);
                CHECK(classify_physics(we, b, delta, kDefault) == expect);
            }
}

TEST_CASE("b = 1 is clamped during classification") {
    CHECK_NOTHROW(classify_physics(30.0, 1.0, 1.0, kDefault));
    CHECK(classify_physics(30.0, 1.0, 1.0, kDefault) == classify_physics(30.0, kMaxImpactParameter, 1.0, kDefault));
}

TEST_CASE("baseline accuracy and confusion") {
    std::vector<CollisionRecord> recs;
    for (auto [we, b, d] : {std::tuple{1.0, 0.0, 1.0}, {10.0, 0.0, 1.0}, {100.0, 0.0, 1.0}, {100.0, 0.8, 1.0}}) {
        CollisionRecord r;
        r.we = we;
        r.b = b;
        r.delta = d;
        r.label = classify_physics(we, b, d, kDefault);
        r.source_id = "qian1997";
        recs.push_back(r);
    }
    CHECK(baseline_accuracy(recs, kDefault).accuracy == 1.0);
    recs[0].label = RegimeLabel::Reflexive;
    const auto res = baseline_accuracy(recs, kDefault);
    CHECK(res.accuracy == 0.75);
    CHECK(res.confusion[code(RegimeLabel::Reflexive)][code(RegimeLabel::Bouncing)] == 1);
    CHECK(res.count == 4);
}

TEST_CASE("physics parameter JSON") {
    PhysicsModelParams p;
    p.phi = 3.0;
    p.chi1 = Chi1Constant{0.8};
    p.eta = EtaConstant{1.5, 0.5};
    CHECK(physics_params_from_json(to_json(p)) == p);
    CHECK(physics_params_from_json(to_json(kDefault)) == kDefault);
    auto j = to_json(kDefault);
    j["bogus"] = 1;
    CHECK_THROWS_AS(physics_params_from_json(j), ConfigError);

    const auto path = (std::filesystem::temp_directory_path() / "dropcol_physics_test.json").string();
    save_physics_params(p, path);
    CHECK(load_physics_params(path) == p);
    std::filesystem::remove(path);
}

TEST_CASE("constant-coefficient variants") {
    PhysicsModelParams p;
    p.chi1 = Chi1Constant{0.5};
    CHECK(chi1(p, 0.7, 0.3) == 0.5);
    p.eta = EtaConstant{2.0, 3.0};
    const auto e = eta(p, 0.7, 0.3);
    CHECK(e[0] == 2.0);
    CHECK(e[1] == 3.0);
    CHECK(chi1(kDefault, 0.6, 0.2) == doctest::Approx(ref_chi1(0.6, 0.2)).epsilon(1e-14));
}
