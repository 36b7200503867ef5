#pragma once

#include "dropcol/regime.hpp"

#include <json.hpp>

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <variant>

namespace dropcol {

struct CollisionRecord;

// chi1(delta, b) variants for the bouncing curve.

/// Estrade et al. (1999) interaction-volume fraction: tau = (1 - b)(1 + delta),
/// chi1 = 1 - (2 - tau)^2 (1 + tau) / 4 for tau > 1, tau^2 (3 - tau) / 4 otherwise.
struct Chi1Estrade {
    bool operator==(const Chi1Estrade&) const = default;
};
struct Chi1Constant {
    double value = 1.0;
    bool operator==(const Chi1Constant&) const = default;
};
using Chi1Model = std::variant<Chi1Estrade, Chi1Constant>;

// (eta1, eta2)(delta, b) variants for the reflexive curve.

/// Ashgriz & Poo (1990): xi = b (1 + delta) / 2,
/// eta1 = 2 (1 - xi)^2 sqrt(1 - xi^2) - 1, eta2 = 2 (delta - xi)^2 sqrt(delta^2 - xi^2) - delta^3.
/// Square-root arguments are clamped at 0 once xi exceeds delta.
struct EtaAshgrizPoo {
    bool operator==(const EtaAshgrizPoo&) const = default;
};
struct EtaConstant {
    double eta1 = 1.0;
    double eta2 = 1.0;
    bool operator==(const EtaConstant&) const = default;
};
using EtaModel = std::variant<EtaAshgrizPoo, EtaConstant>;

/// Coefficients of the bouncing and reflexive decision curves. The stretching
/// curve has no free parameters.
struct PhysicsModelParams {
    double phi = 3.351;
    Chi1Model chi1 = Chi1Estrade{};
    EtaModel eta = EtaAshgrizPoo{};
    std::string provenance = "regime map after Munnannur & Reitz (2007): bouncing curve of Estrade et al. (1999) "
                             "with shape factor 3.351, reflexive curve of Ashgriz & Poo (1990)";

    bool operator==(const PhysicsModelParams&) const = default;
};

/// Signed offsets of a point from the bouncing (c1), reflexive (c2) and
/// stretching (c3) boundaries.
struct CurveValues {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
};

/// Region evaluation order used by classify_physics; written into reports.
inline constexpr std::string_view kDecisionOrder =
    "c1<0 -> bouncing; else c3>0 -> stretching; else (c2>0 and reflexive denominator>0) -> reflexive; "
    "else coalescence; a curve value of exactly 0 is not exceeded";

/// Impact parameter used when a record has b = 1 (the bouncing curve is singular there).
inline constexpr double kMaxImpactParameter = 1.0 - 1e-9;

double chi1(const PhysicsModelParams& params, double delta, double b);
std::array<double, 2> eta(const PhysicsModelParams& params, double delta, double b);

/// Weber number on the bouncing boundary. Throws SingularityError for b >= 1.
double bouncing_boundary(double b, double delta, const PhysicsModelParams& params);
/// Weber number on the reflexive boundary. Throws SingularityError when
/// delta^6 eta1 + eta2 vanishes.
double reflexive_boundary(double b, double delta, const PhysicsModelParams& params);
/// Impact parameter on the stretching boundary. Throws SingularityError for we <= 0.
double stretching_boundary(double we, double delta);

double eval_c1(double we, double b, double delta, const PhysicsModelParams& params);
double eval_c2(double we, double b, double delta, const PhysicsModelParams& params);
double eval_c3(double we, double b, double delta);

/// All three curves with b clamped to kMaxImpactParameter.
CurveValues eval_curves(double we, double b, double delta, const PhysicsModelParams& params);

RegimeLabel classify_physics(double we, double b, double delta, const PhysicsModelParams& params);
RegimeLabel classify_physics(const CollisionRecord& record, const PhysicsModelParams& params);

struct BaselineResult {
    double accuracy = 0.0;
    std::array<std::array<std::size_t, kNumRegimes>, kNumRegimes> confusion{};
    std::size_t count = 0;
    std::size_t clamped = 0; ///< records evaluated with b clamped below 1
};

BaselineResult baseline_accuracy(std::span<const CollisionRecord> records, const PhysicsModelParams& params);

nlohmann::json to_json(const PhysicsModelParams& params);
PhysicsModelParams physics_params_from_json(const nlohmann::json& j);
PhysicsModelParams load_physics_params(const std::string& path);
void save_physics_params(const PhysicsModelParams& params, const std::string& path);

} // namespace dropcol
