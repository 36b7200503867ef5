#include "dropcol/physics.hpp"

#include "dropcol/dataset.hpp"
#include "dropcol/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dropcol {

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string fmt_point(double we, double b, double delta) {
    std::ostringstream os;
    os.precision(17);
    os << "(we=" << we << ", b=" << b << ", delta=" << delta << ")";
    return os.str();
}

double reflexive_denominator(double b, double delta, const PhysicsModelParams& params) {
    const auto [eta1, eta2] = eta(params, delta, b);
    return std::pow(delta, 6) * eta1 + eta2;
}

} // namespace

double chi1(const PhysicsModelParams& params, double delta, double b) {
    return std::visit(overloaded{
                          [&](const Chi1Estrade&) {
                              const double tau = (1.0 - b) * (1.0 + delta);
                              if (tau > 1.0) return 1.0 - (2.0 - tau) * (2.0 - tau) * (1.0 + tau) / 4.0;
                              return tau * tau * (3.0 - tau) / 4.0;
                          },
                          [](const Chi1Constant& c) { return c.value; },
                      },
                      params.chi1);
}

std::array<double, 2> eta(const PhysicsModelParams& params, double delta, double b) {
    return std::visit(overloaded{
                          [&](const EtaAshgrizPoo&) {
                              const double xi = 0.5 * b * (1.0 + delta);
                              const double r1 = std::sqrt(std::max(0.0, 1.0 - xi * xi));
                              const double r2 = std::sqrt(std::max(0.0, delta * delta - xi * xi));
                              const double eta1 = 2.0 * (1.0 - xi) * (1.0 - xi) * r1 - 1.0;
                              const double eta2 = 2.0 * (delta - xi) * (delta - xi) * r2 - delta * delta * delta;
                              return std::array<double, 2>{eta1, eta2};
                          },
                          [](const EtaConstant& c) { return std::array<double, 2>{c.eta1, c.eta2}; },
                      },
                      params.eta);
}

double bouncing_boundary(double b, double delta, const PhysicsModelParams& params) {
    if (!(b < 1.0)) throw SingularityError("bouncing curve singular at b >= 1 " + fmt_point(0.0, b, delta));
    const double denom = chi1(params, delta, b) * std::cos(std::asin(b));
    if (denom == 0.0) throw SingularityError("bouncing curve denominator vanishes at b=" + std::to_string(b));
    return delta * (1.0 + delta * delta) * (4.0 * params.phi - 12.0) / denom;
}

double reflexive_boundary(double b, double delta, const PhysicsModelParams& params) {
    const double denom = reflexive_denominator(b, delta, params);
    if (denom == 0.0) throw SingularityError("reflexive curve denominator vanishes " + fmt_point(0.0, b, delta));
    const double d2 = delta * delta;
    const double d3 = d2 * delta;
    const double numer =
        3.0 * (7.0 * std::pow(1.0 + d3, 2.0 / 3.0) - 4.0 * (1.0 + d2)) * delta * (1.0 + d3) * (1.0 + d3);
    return numer / denom;
}

double stretching_boundary(double we, double delta) {
    if (!(we > 0.0)) throw SingularityError("stretching curve singular at we <= 0");
    const double shape = delta * delta * delta - 2.4 * delta * delta + 2.7 * delta;
    return std::sqrt(2.4 * shape / we);
}

double eval_c1(double we, double b, double delta, const PhysicsModelParams& params) {
    return we - bouncing_boundary(b, delta, params);
}

double eval_c2(double we, double b, double delta, const PhysicsModelParams& params) {
    return we - reflexive_boundary(b, delta, params);
}

double eval_c3(double we, double b, double delta) { return b - stretching_boundary(we, delta); }

CurveValues eval_curves(double we, double b, double delta, const PhysicsModelParams& params) {
    const double bc = std::min(b, kMaxImpactParameter);
    return {eval_c1(we, bc, delta, params), eval_c2(we, bc, delta, params), eval_c3(we, bc, delta)};
}

RegimeLabel classify_physics(double we, double b, double delta, const PhysicsModelParams& params) {
    const double bc = std::min(b, kMaxImpactParameter);
    if (eval_c1(we, bc, delta, params) < 0.0) return RegimeLabel::Bouncing;
    if (eval_c3(we, bc, delta) > 0.0) return RegimeLabel::Stretching;
    // A non-positive denominator means the reflexive boundary has passed its
    // asymptote in b: no reflexive separation at any Weber number.
    if (reflexive_denominator(bc, delta, params) > 0.0 && eval_c2(we, bc, delta, params) > 0.0)
        return RegimeLabel::Reflexive;
    return RegimeLabel::Coalescence;
}

RegimeLabel classify_physics(const CollisionRecord& record, const PhysicsModelParams& params) {
    return classify_physics(record.we, record.b, record.delta, params);
}

BaselineResult baseline_accuracy(std::span<const CollisionRecord> records, const PhysicsModelParams& params) {
    BaselineResult result;
    std::size_t correct = 0;
    for (const auto& r : records) {
        const auto predicted = classify_physics(r, params);
        if (r.b > kMaxImpactParameter) ++result.clamped;
        ++result.confusion[code(r.label)][code(predicted)];
        correct += predicted == r.label;
    }
    result.count = records.size();
    result.accuracy = records.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(records.size());
    return result;
}

// --- JSON ---------------------------------------------------------------------------------------

nlohmann::json to_json(const PhysicsModelParams& params) {
    nlohmann::json j;
    j["phi"] = params.phi;
    j["chi1"] = std::visit(overloaded{
                               [](const Chi1Estrade&) { return nlohmann::json{{"name", "estrade1999"}}; },
                               [](const Chi1Constant& c) {
                                   return nlohmann::json{{"name", "constant"}, {"value", c.value}};
                               },
                           },
                           params.chi1);
    j["eta"] = std::visit(overloaded{
                              [](const EtaAshgrizPoo&) { return nlohmann::json{{"name", "ashgriz_poo1990"}}; },
                              [](const EtaConstant& c) {
                                  return nlohmann::json{{"name", "constant"}, {"eta1", c.eta1}, {"eta2", c.eta2}};
                              },
                          },
                          params.eta);
    j["provenance"] = params.provenance;
    return j;
}

namespace {

void require_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

double number_at(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(where + ": missing numeric '" + key + "'");
    return j.at(key).get<double>();
}

} // namespace

PhysicsModelParams physics_params_from_json(const nlohmann::json& j) {
    require_keys(j, {"phi", "chi1", "eta", "provenance"}, "physics params");
    PhysicsModelParams p;
    p.phi = number_at(j, "phi", "physics params");
    if (!j.contains("chi1") || !j.contains("eta") || !j.contains("provenance"))
        throw ConfigError("physics params: 'chi1', 'eta' and 'provenance' are required");

    const auto& c = j.at("chi1");
    if (!c.is_object() || !c.contains("name")) throw ConfigError("physics params: chi1.name required");
    const auto chi_name = c.at("name").get<std::string>();
    if (chi_name == "estrade1999") {
        require_keys(c, {"name"}, "chi1");
        p.chi1 = Chi1Estrade{};
    } else if (chi_name == "constant") {
        require_keys(c, {"name", "value"}, "chi1");
        p.chi1 = Chi1Constant{number_at(c, "value", "chi1")};
    } else {
        throw ConfigError("physics params: unknown chi1 variant '" + chi_name + "'");
    }

    const auto& e = j.at("eta");
    if (!e.is_object() || !e.contains("name")) throw ConfigError("physics params: eta.name required");
    const auto eta_name = e.at("name").get<std::string>();
    if (eta_name == "ashgriz_poo1990") {
        require_keys(e, {"name"}, "eta");
        p.eta = EtaAshgrizPoo{};
    } else if (eta_name == "constant") {
        require_keys(e, {"name", "eta1", "eta2"}, "eta");
        p.eta = EtaConstant{number_at(e, "eta1", "eta"), number_at(e, "eta2", "eta")};
    } else {
        throw ConfigError("physics params: unknown eta variant '" + eta_name + "'");
    }
    p.provenance = j.at("provenance").get<std::string>();
    return p;
}

PhysicsModelParams load_physics_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open physics params file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("physics params '" + path + "': " + e.what());
    }
    return physics_params_from_json(j);
}

void save_physics_params(const PhysicsModelParams& params, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write physics params file '" + path + "'");
    out << to_json(params).dump(2) << '\n';
}

} // namespace dropcol
