#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "penduflow/control.hpp"
#include "penduflow/descriptors.hpp"
#include "penduflow/params.hpp"
#include "penduflow/plant.hpp"
#include "penduflow/slowflow.hpp"

namespace penduflow {

using InitialState = std::variant<MechState, SlowState>;

struct Scenario {
    std::string label;
    PhysicalParams params;
    InitialState initial;
    ControllerSpec controller;
    double t_end = 10.0;      ///< [s]
    double output_dt = 1e-3;  ///< [s]
};

/// Throws std::invalid_argument when t_end or output_dt is not positive.
void validate(const Scenario& sc);

/// Full-plant initial state; slow initial conditions are mapped with fast phase `fast_phase`.
MechState initial_mech(const Scenario& sc, double fast_phase = 0.0);
/// Slow initial state; mechanical initial conditions go through the energy-matrix descriptors.
SlowState initial_slow(const Scenario& sc);

enum class ModelKind { Full, Slow };

enum class Termination {
    Completed,
    Localized,      ///< |P| reached 1 − eps_P
    EnergyFloor,    ///< E fell below the slow-flow energy floor
    StepUnderflow,  ///< adaptive step size collapsed
    NonFinite,      ///< state stopped being finite
};

const char* termination_name(Termination t);

struct Trajectory {
    ModelKind model = ModelKind::Full;
    std::vector<double> times;
    std::vector<MechState> mech;          ///< full model only
    std::vector<SlowState> slow;          ///< slow model only
    std::vector<CurrentPair> currents;
    std::vector<Descriptors> descriptors; ///< for the slow model Q = cos Δ
    std::vector<double> fast_phase;       ///< slow model, when requested
    Termination termination = Termination::Completed;
    double end_time = 0.0;                ///< time the integration stopped
    std::size_t saturated_updates = 0;    ///< controller updates clipped to the current limit
    int reflections = 0;                  ///< boundary reflections (slow model, Reflect mode)

    std::size_t size() const { return times.size(); }
};

struct FullRunOptions {
    double h = 1e-4;                  ///< fixed RK4 step [s]
    FrictionConfig friction;
    double current_limit = kDefaultCurrentLimit;
    double control_dt = 0.0;          ///< feedback update period; 0 means output_dt
    double initial_fast_phase = 0.0;  ///< used when the scenario starts from a SlowState
    GravityModel gravity = GravityModel::Cubic;
};

enum class BoundaryMode {
    EventStop,  ///< stop with Termination::Localized
    Reflect,    ///< shift Δ by π and continue inward
};

struct SlowRunOptions {
    SlowFlowOptions flow;
    BoundaryMode boundary = BoundaryMode::EventStop;
    double rtol = 1e-8;
    double atol = 1e-10;
    double energy_floor = 1e-3;  ///< [rad²·s⁻²]
    bool fast_phase = true;      ///< integrate the carrier phase afterwards
    double current_limit = kDefaultCurrentLimit;
};

/// Fixed-step RK4 of the nonsmooth plant with stick-slip handling and
/// controller sampling; output every output_dt with descriptors.
Trajectory integrate_full(const Scenario& sc, const FullRunOptions& opts = {});

/// Adaptive Dormand–Prince integration of the averaged system.
Trajectory integrate_slow(const Scenario& sc, const SlowRunOptions& opts = {});

struct ComparisonReport {
    double rms_P = 0.0;
    double rms_Q = 0.0;
    double max_abs_P_error = 0.0;
    std::optional<double> localization_time_full;  ///< first |P| ≥ 0.9
    std::optional<double> localization_time_slow;
    double t_begin = 0.0;
    double t_end = 0.0;
    bool diverged = false;  ///< rms_P above kDivergenceRms
};

inline constexpr double kDivergenceRms = 0.1;
inline constexpr double kLocalizationLevel = 0.9;

/// Resamples P and Q of both trajectories onto a common uniform grid over
/// their overlap (optionally restricted to `window`) by linear interpolation.
/// Throws std::invalid_argument when there is no overlap.
ComparisonReport compare(const Trajectory& full, const Trajectory& slow,
                         std::optional<std::pair<double, double>> window = std::nullopt);

/// First time |P| ≥ level, if any.
std::optional<double> first_partition_crossing(const Trajectory& tr, double level);

std::vector<std::string> preset_names();

/// Throws std::invalid_argument listing the available names.
Scenario preset_scenario(std::string_view name);

/// Solution of the linear beat equation with coefficients evaluated at a
/// co-integrated energy E(t) (first averaged equation at the linearization
/// point). Initial slope from the averaged dP/dt.
struct LinearBeatTrajectory {
    BeatMode mode = BeatMode::Antiphase;
    std::vector<double> times;
    std::vector<double> P;
    std::vector<double> dP;
    std::vector<double> E;
};

LinearBeatTrajectory integrate_linearized(BeatMode mode, const SlowState& init,
                                          const ControllerSpec& controller, double t_end,
                                          double output_dt, const PendulumModel& m,
                                          const SlowFlowOptions& flow = {});

/// Linear interpolation of `values` sampled at increasing `times`; clamps outside.
double interpolate(const std::vector<double>& times, const std::vector<double>& values, double t);

}  // namespace penduflow
