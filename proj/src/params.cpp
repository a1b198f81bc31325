#include "penduflow/params.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace penduflow {

PhysicalParams preset(MagnetKit kit) {
    switch (kit) {
        case MagnetKit::Large:
            return {.a = 8.036e-3,
                    .b = 30.810e-3,
                    .c1 = 2.500e-4,
                    .c2 = 1.600e-4,
                    .ce = 9.615e-6,
                    .ke = 3.999e-3,
                    .J = 6.787e-4,
                    .mgs = 5.840e-2};
        case MagnetKit::Small:
            return {.a = 3.635e-3,
                    .b = 43.366e-3,
                    .c1 = 3.114e-4,
                    .c2 = 2.705e-4,
                    .ce = 9.615e-6,
                    .ke = 3.999e-3,
                    .J = 5.675e-4,
                    .mgs = 5.018e-2};
    }
    throw std::invalid_argument("unknown magnet kit");
}

void validate(const PhysicalParams& p) {
    auto require = [](double value, const char* name, bool strict) {
        if (!std::isfinite(value)) {
            throw std::invalid_argument(std::string("parameter '") + name + "' is not finite");
        }
        if (strict ? value <= 0.0 : value < 0.0) {
            throw std::invalid_argument(std::string("parameter '") + name + "' must be " +
                                        (strict ? "positive" : "non-negative"));
        }
    };
    require(p.J, "J", true);
    require(p.mgs, "mgs", true);
    require(p.b, "b", true);
    require(p.a, "a", false);
    require(p.c1, "c1", false);
    require(p.c2, "c2", false);
    require(p.ce, "ce", false);
    require(p.ke, "ke", false);
}

UnitlessParams derive_unitless(const PhysicalParams& p) {
    if (!(p.J > 0.0) || !(p.mgs > 0.0)) {
        throw std::invalid_argument("derive_unitless: J and mgs must be positive");
    }
    const double omega = std::sqrt(p.mgs / p.J);
    const double scale = 2.0 * p.J * omega;
    return {.Omega = omega,
            .beta = p.ke / p.mgs,
            .zeta1 = p.c1 / scale,
            .zeta2 = p.c2 / scale,
            .alpha = p.ce / scale};
}

MagnetKit parse_kit(std::string_view name) {
    if (name == "large" || name == "Large") return MagnetKit::Large;
    if (name == "small" || name == "Small") return MagnetKit::Small;
    throw std::invalid_argument("unknown magnet kit '" + std::string(name) +
                                "' (expected large or small)");
}

std::string_view kit_name(MagnetKit kit) {
    return kit == MagnetKit::Large ? "large" : "small";
}

PhysicalParams load_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open parameter file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed parameter file " + path.string() + ": " + e.what());
    }
    PhysicalParams p;
    const std::pair<const char*, double*> fields[] = {
        {"a", &p.a},   {"b", &p.b},   {"c1", &p.c1}, {"c2", &p.c2},
        {"ce", &p.ce}, {"ke", &p.ke}, {"J", &p.J},   {"mgs", &p.mgs}};
    for (const auto& [key, slot] : fields) {
        if (!doc.contains(key) || !doc[key].is_number()) {
            throw std::runtime_error(std::string("parameter file is missing numeric key '") + key +
                                     "'");
        }
        *slot = doc[key].get<double>();
    }
    for (const auto& item : doc.items()) {
        bool known = false;
        for (const auto& [key, slot] : fields) known = known || item.key() == key;
        if (!known) throw std::runtime_error("unknown parameter key '" + item.key() + "'");
    }
    validate(p);
    return p;
}

PendulumModel::PendulumModel(const PhysicalParams& p, GravityModel gravity) : phys_(p), gravity_(gravity) {
    validate(p);
    unit_ = derive_unitless(p);
}

}  // namespace penduflow
