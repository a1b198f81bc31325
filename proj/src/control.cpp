#include "penduflow/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace penduflow {

CurrentPair open_loop(double t, const OpenLoopProfile& prof) {
    double i1 = prof.A;
    if (!(prof.hold_at_offset && t > prof.tk)) {
        const double s = std::sin(std::numbers::pi * t / prof.tk);
        i1 += prof.B * s * s;
    }
    return {i1, prof.polarity == CoilPolarity::Opposed ? -i1 : 0.0};
}

CurrentPair feedback(double Q, const FeedbackConfig& cfg) { return {-cfg.i0 * Q, cfg.i0 * Q}; }

CurrentPair feedback_decayed(double Q, double E, const FeedbackConfig& cfg) {
    const double decay = -std::expm1(-cfg.eta * E);
    return {-cfg.i0 * decay * Q, cfg.i0 * decay * Q};
}

const char* kind_name(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::None: return "none";
        case ControllerKind::OpenLoop: return "open_loop";
        case ControllerKind::Feedback: return "feedback";
        case ControllerKind::FeedbackDecayed: return "feedback_decayed";
    }
    return "?";
}

ControllerKind parse_controller_kind(std::string_view name) {
    for (auto k : {ControllerKind::None, ControllerKind::OpenLoop, ControllerKind::Feedback,
                   ControllerKind::FeedbackDecayed}) {
        if (name == kind_name(k)) return k;
    }
    throw std::invalid_argument("unknown controller '" + std::string(name) +
                                "' (expected none, open_loop, feedback, feedback_decayed)");
}

CurrentPair slow_currents(const ControllerSpec& spec, double t, double E, double Delta) {
    switch (spec.kind) {
        case ControllerKind::None: return {};
        case ControllerKind::OpenLoop: return open_loop(t, spec.profile);
        case ControllerKind::Feedback: return feedback(std::cos(Delta), spec.feedback);
        case ControllerKind::FeedbackDecayed: return feedback_decayed(std::cos(Delta), E, spec.feedback);
    }
    return {};
}

CurrentController::CurrentController(const ControllerSpec& spec, double omega)
    : spec_(spec), omega_(omega) {}

CurrentPair CurrentController::command(double t, const MechState& s) {
    switch (spec_.kind) {
        case ControllerKind::None: return {};
        case ControllerKind::OpenLoop: return open_loop(t, spec_.profile);
        case ControllerKind::Feedback:
        case ControllerKind::FeedbackDecayed: break;
    }
    const EnergyMatrix em = energy_matrix(s, omega_);
    const double norm = std::sqrt(em.e11 * em.e22);
    if (norm >= spec_.feedback.q_guard) {
        double q = std::clamp(em.e12 / norm, -1.0, 1.0);
        if (spec_.feedback.avg_window > 1) {
            window_.push_back(q);
            window_sum_ += q;
            if (window_.size() > spec_.feedback.avg_window) {
                window_sum_ -= window_.front();
                window_.pop_front();
            }
            q = window_sum_ / static_cast<double>(window_.size());
        }
        q_ = q;
    }
    if (spec_.kind == ControllerKind::Feedback) return feedback(q_, spec_.feedback);
    return feedback_decayed(q_, em.e11 + em.e22, spec_.feedback);
}

}  // namespace penduflow
