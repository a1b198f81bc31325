#include "penduflow/config.hpp"

#include <initializer_list>
#include <stdexcept>
#include <string>

namespace penduflow {

using nlohmann::json;

namespace {

const char* polarity_name(CoilPolarity p) { return p == CoilPolarity::Opposed ? "opposed" : "single_coil"; }

const char* friction_name(FrictionMode m) { return m == FrictionMode::Filippov ? "filippov" : "smoothed"; }

const char* boundary_name(BoundaryMode b) { return b == BoundaryMode::EventStop ? "stop" : "reflect"; }

const char* prefactor_name(FrictionPrefactor p) {
    return p == FrictionPrefactor::AsPrinted ? "as_printed" : "energy_consistent";
}

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

/// Typed, key-checked view of one JSON object.
class Reader {
public:
    Reader(const json& obj, std::string prefix, std::initializer_list<const char*> allowed)
        : obj_(obj), prefix_(std::move(prefix)) {
        if (!obj_.is_object()) throw std::invalid_argument("'" + label() + "' must be an object");
        for (const auto& item : obj_.items()) {
            bool known = false;
            for (const char* a : allowed) known = known || item.key() == a;
            if (!known) throw std::invalid_argument("unknown key '" + join(prefix_, item.key()) + "'");
        }
    }

    bool has(const char* key) const { return obj_.contains(key); }

    void number(const char* key, double& out) const {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_number()) throw std::invalid_argument("key '" + join(prefix_, key) + "' must be a number");
        out = v.get<double>();
    }

    void count(const char* key, std::size_t& out) const {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw std::invalid_argument("key '" + join(prefix_, key) + "' must be a non-negative integer");
        }
        out = v.get<std::size_t>();
    }

    void flag(const char* key, bool& out) const {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        if (!v.is_boolean()) throw std::invalid_argument("key '" + join(prefix_, key) + "' must be true or false");
        out = v.get<bool>();
    }

    template <class Enum>
    void choice(const char* key, Enum& out, std::initializer_list<std::pair<const char*, Enum>> options) const {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        std::string names;
        for (const auto& [name, value] : options) {
            if (v.is_string() && v.get<std::string>() == name) {
                out = value;
                return;
            }
            names += (names.empty() ? "" : ", ") + std::string(name);
        }
        throw std::invalid_argument("key '" + join(prefix_, key) + "' must be one of: " + names);
    }

    Reader child(const char* key, std::initializer_list<const char*> allowed) const {
        return Reader(obj_.at(key), join(prefix_, key), allowed);
    }

    const json& raw(const char* key) const { return obj_.at(key); }

private:
    std::string label() const { return prefix_.empty() ? "<root>" : prefix_; }

    const json& obj_;
    std::string prefix_;
};

}  // namespace

json to_json(const RunSettings& rs) {
    const Scenario& sc = rs.scenario;
    const PhysicalParams& p = sc.params;
    json doc;
    doc["label"] = sc.label;
    doc["params"] = {{"a", p.a},   {"b", p.b},   {"c1", p.c1}, {"c2", p.c2},
                     {"ce", p.ce}, {"ke", p.ke}, {"J", p.J},   {"mgs", p.mgs}};
    if (const auto* m = std::get_if<MechState>(&sc.initial)) {
        doc["initial"] = {{"phi1", m->phi1}, {"v1", m->v1}, {"phi2", m->phi2}, {"v2", m->v2}};
    } else {
        const auto& s = std::get<SlowState>(sc.initial);
        doc["initial"] = {{"E", s.E}, {"P", s.P}, {"Delta", s.Delta}};
    }
    const ControllerSpec& c = sc.controller;
    doc["controller"] = {{"kind", kind_name(c.kind)},
                         {"A", c.profile.A},
                         {"B", c.profile.B},
                         {"tk", c.profile.tk},
                         {"polarity", polarity_name(c.profile.polarity)},
                         {"hold_at_offset", c.profile.hold_at_offset},
                         {"i0", c.feedback.i0},
                         {"eta", c.feedback.eta},
                         {"q_guard", c.feedback.q_guard},
                         {"avg_window", c.feedback.avg_window}};
    doc["t_end"] = sc.t_end;
    doc["output_dt"] = sc.output_dt;
    doc["full"] = {{"h", rs.full.h},
                   {"friction", friction_name(rs.full.friction.mode)},
                   {"v_tol", rs.full.friction.v_tol},
                   {"smoothing_eps", rs.full.friction.smoothing_eps},
                   {"current_limit", rs.full.current_limit},
                   {"control_dt", rs.full.control_dt},
                   {"initial_fast_phase", rs.full.initial_fast_phase},
                   {"gravity", rs.full.gravity == GravityModel::Cubic ? "cubic" : "linear"}};
    doc["slow"] = {{"boundary", boundary_name(rs.slow.boundary)},
                   {"prefactor", prefactor_name(rs.slow.flow.prefactor)},
                   {"eps_P", rs.slow.flow.eps_P},
                   {"rtol", rs.slow.rtol},
                   {"atol", rs.slow.atol},
                   {"energy_floor", rs.slow.energy_floor},
                   {"fast_phase", rs.slow.fast_phase},
                   {"current_limit", rs.slow.current_limit}};
    return doc;
}

RunSettings settings_from_json(const json& doc) {
    RunSettings rs;
    Scenario& sc = rs.scenario;
    const Reader root(doc, "", {"label", "params", "initial", "controller", "t_end", "output_dt", "full", "slow"});
    if (root.has("label")) {
        if (!root.raw("label").is_string()) throw std::invalid_argument("key 'label' must be a string");
        sc.label = root.raw("label").get<std::string>();
    }
    if (root.has("params")) {
        const Reader r = root.child("params", {"a", "b", "c1", "c2", "ce", "ke", "J", "mgs"});
        PhysicalParams& p = sc.params;
        r.number("a", p.a);
        r.number("b", p.b);
        r.number("c1", p.c1);
        r.number("c2", p.c2);
        r.number("ce", p.ce);
        r.number("ke", p.ke);
        r.number("J", p.J);
        r.number("mgs", p.mgs);
    }
    if (root.has("initial")) {
        const json& init = root.raw("initial");
        if (init.is_object() && (init.contains("E") || init.contains("P") || init.contains("Delta"))) {
            const Reader r = root.child("initial", {"E", "P", "Delta"});
            SlowState s;
            r.number("E", s.E);
            r.number("P", s.P);
            r.number("Delta", s.Delta);
            sc.initial = s;
        } else {
            const Reader r = root.child("initial", {"phi1", "v1", "phi2", "v2"});
            MechState m;
            r.number("phi1", m.phi1);
            r.number("v1", m.v1);
            r.number("phi2", m.phi2);
            r.number("v2", m.v2);
            sc.initial = m;
        }
    }
    if (root.has("controller")) {
        const Reader r = root.child("controller", {"kind", "A", "B", "tk", "polarity", "hold_at_offset", "i0",
                                                   "eta", "q_guard", "avg_window"});
        ControllerSpec& c = sc.controller;
        r.choice("kind", c.kind,
                 {{"none", ControllerKind::None},
                  {"open_loop", ControllerKind::OpenLoop},
                  {"feedback", ControllerKind::Feedback},
                  {"feedback_decayed", ControllerKind::FeedbackDecayed}});
        r.number("A", c.profile.A);
        r.number("B", c.profile.B);
        r.number("tk", c.profile.tk);
        r.choice("polarity", c.profile.polarity,
                 {{"opposed", CoilPolarity::Opposed}, {"single_coil", CoilPolarity::SingleCoil}});
        r.flag("hold_at_offset", c.profile.hold_at_offset);
        r.number("i0", c.feedback.i0);
        r.number("eta", c.feedback.eta);
        r.number("q_guard", c.feedback.q_guard);
        r.count("avg_window", c.feedback.avg_window);
        if (c.kind == ControllerKind::OpenLoop && !(c.profile.tk > 0.0)) {
            throw std::invalid_argument("key 'controller.tk' must be positive");
        }
    }
    root.number("t_end", sc.t_end);
    root.number("output_dt", sc.output_dt);
    if (root.has("full")) {
        const Reader r = root.child("full", {"h", "friction", "v_tol", "smoothing_eps", "current_limit",
                                             "control_dt", "initial_fast_phase", "gravity"});
        r.number("h", rs.full.h);
        r.choice("friction", rs.full.friction.mode,
                 {{"filippov", FrictionMode::Filippov}, {"smoothed", FrictionMode::Smoothed}});
        r.number("v_tol", rs.full.friction.v_tol);
        r.number("smoothing_eps", rs.full.friction.smoothing_eps);
        r.number("current_limit", rs.full.current_limit);
        r.number("control_dt", rs.full.control_dt);
        r.number("initial_fast_phase", rs.full.initial_fast_phase);
        r.choice("gravity", rs.full.gravity, {{"cubic", GravityModel::Cubic}, {"linear", GravityModel::Linear}});
    }
    if (root.has("slow")) {
        const Reader r = root.child("slow", {"boundary", "prefactor", "eps_P", "rtol", "atol", "energy_floor",
                                             "fast_phase", "current_limit"});
        r.choice("boundary", rs.slow.boundary, {{"stop", BoundaryMode::EventStop}, {"reflect", BoundaryMode::Reflect}});
        r.choice("prefactor", rs.slow.flow.prefactor,
                 {{"as_printed", FrictionPrefactor::AsPrinted},
                  {"energy_consistent", FrictionPrefactor::EnergyConsistent}});
        r.number("eps_P", rs.slow.flow.eps_P);
        r.number("rtol", rs.slow.rtol);
        r.number("atol", rs.slow.atol);
        r.number("energy_floor", rs.slow.energy_floor);
        r.flag("fast_phase", rs.slow.fast_phase);
        r.number("current_limit", rs.slow.current_limit);
    }
    validate(sc);
    return rs;
}

namespace {

void merge_at(json& base, const json& patch, const std::string& prefix) {
    if (!patch.is_object()) throw std::invalid_argument("'" + prefix + "' must be an object");
    for (const auto& item : patch.items()) {
        const std::string key = join(prefix, item.key());
        if (!base.contains(item.key())) throw std::invalid_argument("unknown key '" + key + "'");
        json& target = base[item.key()];
        if (key == "initial") {
            target = item.value();
        } else if (target.is_object()) {
            merge_at(target, item.value(), key);
        } else {
            target = item.value();
        }
    }
}

}  // namespace

void merge_strict(json& base, const json& patch) { merge_at(base, patch, ""); }

void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw std::invalid_argument("override '" + std::string(assignment) + "' must look like key=value");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));

    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!node->is_object() || !node->contains(part)) {
            throw std::invalid_argument("unknown key '" + key + "'");
        }
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (node->is_object()) throw std::invalid_argument("key '" + key + "' names a group, not a value");
    *node = value;
}

}  // namespace penduflow
