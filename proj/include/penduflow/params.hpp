#pragma once

#include <filesystem>
#include <string_view>

namespace penduflow {

/// Dimensional plant constants for one magnet kit (SI units).
struct PhysicalParams {
    double a = 0.0;    ///< magnetic potential amplitude per unit current [N·m·rad·A⁻¹]
    double b = 0.0;    ///< magnetic potential width [rad²]
    double c1 = 0.0;   ///< Coulomb friction torque, pendulum 1 [N·m]
    double c2 = 0.0;   ///< Coulomb friction torque, pendulum 2 [N·m]
    double ce = 0.0;   ///< coupling-spring equivalent viscous damping [N·m·s·rad⁻¹]
    double ke = 0.0;   ///< torsion spring stiffness [N·m·rad⁻¹]
    double J = 0.0;    ///< moment of inertia of each pendulum [kg·m²]
    double mgs = 0.0;  ///< gravitational restoring coefficient [N·m]

    bool operator==(const PhysicalParams&) const = default;
};

/// Reduced parameters of the first-order model.
struct UnitlessParams {
    double Omega = 0.0;  ///< linearized natural frequency [rad·s⁻¹]
    double beta = 0.0;   ///< relative coupling strength
    double zeta1 = 0.0;  ///< dry-friction ratio, pendulum 1
    double zeta2 = 0.0;  ///< dry-friction ratio, pendulum 2
    double alpha = 0.0;  ///< coupling damping ratio
};

enum class MagnetKit { Large, Small };

/// Identified constants for the large or small magnet pair.
PhysicalParams preset(MagnetKit kit);

/// Throws std::invalid_argument naming the offending field.
/// J, mgs and b must be strictly positive; every other field non-negative.
void validate(const PhysicalParams& p);

/// Omega = sqrt(mgs/J), beta = ke/mgs, zeta_i = c_i/(2·J·Omega), alpha = ce/(2·J·Omega).
UnitlessParams derive_unitless(const PhysicalParams& p);

MagnetKit parse_kit(std::string_view name);
std::string_view kit_name(MagnetKit kit);

/// Reads a JSON object with keys a, b, c1, c2, ce, ke, J, mgs.
PhysicalParams load_params(const std::filesystem::path& path);

/// Gravity restoring term of the full plant. Linear drops the −φ³/6
/// correction; it exists for closed-form harmonic checks.
enum class GravityModel { Cubic, Linear };

/// Validated pairing of the physical and derived parameters. All plant and
/// slow-flow evaluations take one of these, so validation happens once.
class PendulumModel {
public:
    explicit PendulumModel(const PhysicalParams& p, GravityModel gravity = GravityModel::Cubic);

    const PhysicalParams& phys() const { return phys_; }
    const UnitlessParams& unit() const { return unit_; }
    GravityModel gravity() const { return gravity_; }

    /// a/(b·J): magnetic stiffness per ampere [s⁻²·A⁻¹].
    double magnetic_gain() const { return phys_.a / (phys_.b * phys_.J); }

private:
    PhysicalParams phys_;
    UnitlessParams unit_;
    GravityModel gravity_;
};

}  // namespace penduflow
