#pragma once

#include <cstddef>
#include <deque>
#include <string_view>

#include "penduflow/descriptors.hpp"
#include "penduflow/plant.hpp"

namespace penduflow {

enum class CoilPolarity {
    SingleCoil,  ///< i2 = 0
    Opposed,     ///< i2 = −i1
};

/// i1(t) = A + B·sin²(π·t/tk).
struct OpenLoopProfile {
    double A = 0.0;   ///< offset [A]
    double B = 0.0;   ///< peak increment [A]
    double tk = 1.0;  ///< profile duration [s]
    CoilPolarity polarity = CoilPolarity::Opposed;
    bool hold_at_offset = false;  ///< i1 = A for t > tk instead of repeating
};

CurrentPair open_loop(double t, const OpenLoopProfile& prof);

struct FeedbackConfig {
    double i0 = 0.35;          ///< current amplitude [A]
    double eta = 0.2;          ///< energy-decay factor [(rad²·s⁻²)⁻¹]; 0 disables decay
    double q_guard = kEnergyEps;  ///< hold Q while sqrt(e11·e22) < q_guard
    std::size_t avg_window = 0;   ///< trailing mean of Q over this many updates; 0 = off
};

/// i1 = −i0·Q, i2 = +i0·Q.
CurrentPair feedback(double Q, const FeedbackConfig& cfg);

/// feedback(Q) scaled by 1 − exp(−η·E).
CurrentPair feedback_decayed(double Q, double E, const FeedbackConfig& cfg);

enum class ControllerKind { None, OpenLoop, Feedback, FeedbackDecayed };

const char* kind_name(ControllerKind kind);
ControllerKind parse_controller_kind(std::string_view name);

struct ControllerSpec {
    ControllerKind kind = ControllerKind::None;
    OpenLoopProfile profile;
    FeedbackConfig feedback;

    bool is_feedback() const {
        return kind == ControllerKind::Feedback || kind == ControllerKind::FeedbackDecayed;
    }
};

/// Currents for the averaged model, where Q = cos Δ is known exactly.
CurrentPair slow_currents(const ControllerSpec& spec, double t, double E, double Delta);

/// Per-run controller for the full plant. Owns the Q-hold guard and the
/// optional smoothing buffer; not shareable between runs.
class CurrentController {
public:
    CurrentController(const ControllerSpec& spec, double omega);

    CurrentPair command(double t, const MechState& s);

    /// Most recent (possibly held and smoothed) coherency estimate.
    double last_q() const { return q_; }

private:
    ControllerSpec spec_;
    double omega_;
    double q_ = 0.0;
    std::deque<double> window_;
    double window_sum_ = 0.0;
};

}  // namespace penduflow
