#include "gaitpd/config.hpp"

#include <set>

#include "json.hpp"

namespace gaitpd {

namespace {

using nlohmann::json;

// Reads fields out of one JSON object and rejects whatever is left over.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw Error(ErrorCode::InvalidConfig, path_ + " must be an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw Error(ErrorCode::InvalidConfig, path_ + "." + key + " has the wrong type");
        }
    }

    template <typename T>
    void get_optional(const char* key, std::optional<T>& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        if (j_.at(key).is_null()) {
            out.reset();
            return;
        }
        T value{};
        get(key, value);
        out = value;
    }

    const json* child(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    std::string path(const char* key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) throw Error(ErrorCode::InvalidConfig, "unknown key " + path_ + "." + item.key());
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename F>
void with_section(Section& parent, const char* key, F&& body) {
    if (const json* j = parent.child(key)) {
        Section s(*j, parent.path(key));
        body(s);
        s.finish();
    }
}

PerturbationKind read_kind(Section& s, const char* key, PerturbationKind fallback) {
    std::string text(to_string(fallback));
    s.get(key, text);
    try {
        return parse_perturbation_kind(text);
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, s.path(key) + ": " + e.what());
    }
}

void read_perturbation(Section& s, synth::PerturbationSpec& p) {
    p.kind = read_kind(s, "kind", p.kind);
    s.get("onset_phase", p.onset_phase);
    s.get("onset_stride", p.onset_stride);
    s.get("magnitude", p.magnitude);
    s.get("duration_s", p.duration_s);
    std::string dir(to_string(p.direction));
    s.get("direction", dir);
    try {
        p.direction = parse_direction(dir);
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, s.path("direction") + ": " + e.what());
    }
}

json perturbation_json(const synth::PerturbationSpec& p) {
    return {{"kind", std::string(to_string(p.kind))},
            {"onset_phase", p.onset_phase},
            {"onset_stride", p.onset_stride},
            {"magnitude", p.magnitude},
            {"duration_s", p.duration_s},
            {"direction", std::string(to_string(p.direction))}};
}

json optional_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }
json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    Section root(doc, "config");

    with_section(root, "detector", [&](Section& s) {
        auto& d = cfg.pipeline.detector;
        s.get("threshold_phi", d.threshold_phi);
        s.get("band_k", d.band_k);
        s.get("window_cycles", d.window_cycles);
        s.get("epsilon", d.epsilon);
        s.get("bins", d.bins);
        s.get("tp_window_cycles", d.tp_window_cycles);
        s.get_optional("exclusion_phi", d.exclusion_phi);
        s.get("min_cycle_s", d.plausibility.min_s);
        s.get("max_cycle_s", d.plausibility.max_s);
    });
    with_section(root, "kinematics", [&](Section& s) {
        auto& k = cfg.pipeline.kinematics;
        s.get("smooth_window", k.smooth_window);
        std::string frame = k.velocity_frame == kinematics::VelocityFrame::global ? "global" : "relative";
        s.get("velocity_frame", frame);
        if (frame == "global") {
            k.velocity_frame = kinematics::VelocityFrame::global;
        } else if (frame == "relative") {
            k.velocity_frame = kinematics::VelocityFrame::relative;
        } else {
            throw Error(ErrorCode::InvalidConfig, "kinematics.velocity_frame must be global or relative");
        }
        s.get("max_gap", cfg.pipeline.max_gap);
    });
    with_section(root, "gait", [&](Section& s) {
        s.get("grf_threshold_n", cfg.pipeline.heel_strike.threshold_n);
        s.get("refractory_s", cfg.pipeline.heel_strike.refractory_s);
    });
    with_section(root, "synth", [&](Section& s) {
        auto& g = cfg.gait_model;
        s.get("walking_speed", g.walking_speed);
        s.get("stride_duration", g.stride_duration);
        s.get("sample_rate", g.sample_rate);
        s.get("step_width", g.step_width);
        s.get("noise_sd", g.noise_sd);
        s.get("seed", g.seed);
        s.get("duration_s", g.duration_s);
        s.get("calibration_cycles", g.calibration_cycles);
        if (const json* p = s.child("perturbation")) {
            if (p->is_null()) {
                cfg.perturbation.reset();
            } else {
                synth::PerturbationSpec spec;
                Section ps(*p, s.path("perturbation"));
                read_perturbation(ps, spec);
                ps.finish();
                cfg.perturbation = spec;
            }
        }
    });
    with_section(root, "matrix", [&](Section& s) {
        auto& m = cfg.matrix;
        s.get("onset_stride", m.onset_stride);
        s.get("duration_s", m.duration_s);
        s.get("controls_per_row", m.controls_per_row);
        if (const json* rows = s.child("rows")) {
            if (!rows->is_array()) throw Error(ErrorCode::InvalidConfig, "matrix.rows must be an array");
            m.rows.clear();
            for (std::size_t i = 0; i < rows->size(); ++i) {
                Section r((*rows)[i], "matrix.rows[" + std::to_string(i) + "]");
                synth::KindAxis axis;
                axis.kind = read_kind(r, "kind", axis.kind);
                r.get("magnitudes", axis.magnitudes);
                r.get("onset_phases", axis.onset_phases);
                r.finish();
                m.rows.push_back(std::move(axis));
            }
        }
    });
    with_section(root, "sweep", [&](Section& s) {
        s.get("t_min", cfg.sweep.t_min);
        s.get("t_max", cfg.sweep.t_max);
        s.get("step", cfg.sweep.step);
    });
    with_section(root, "wbam", [&](Section& s) {
        auto& w = cfg.wbam;
        s.get("history_cycles", w.history_cycles);
        s.get("k", w.k);
        std::string mode = w.mode == baseline::CombineMode::either_plane ? "either_plane" : "per_plane_average";
        s.get("mode", mode);
        if (mode == "either_plane") {
            w.mode = baseline::CombineMode::either_plane;
        } else if (mode == "per_plane_average") {
            w.mode = baseline::CombineMode::per_plane_average;
        } else {
            throw Error(ErrorCode::InvalidConfig, "wbam.mode must be either_plane or per_plane_average");
        }
        s.get("tp_window_cycles", w.tp_window_cycles);
        s.get("reference_cycle", w.reference_cycle);
    });
    with_section(root, "pca", [&](Section& s) {
        s.get("k", cfg.pca.k);
        s.get("standardize", cfg.pca.standardize);
    });
    with_section(root, "paths", [&](Section& s) {
        s.get_optional("input", cfg.paths.input);
        s.get_optional("label", cfg.paths.label);
        s.get_optional("output", cfg.paths.output);
        s.get_optional("trial_dir", cfg.paths.trial_dir);
    });
    root.get_optional("sample_rate", cfg.sample_rate);
    root.finish();

    // The baseline segments gait the same way as the detector.
    cfg.wbam.heel_strike = cfg.pipeline.heel_strike;
    cfg.wbam.plausibility = cfg.pipeline.detector.plausibility;

    cfg.pipeline.detector.validate();
    cfg.gait_model.validate();
    if (cfg.perturbation) cfg.perturbation->validate(cfg.gait_model);
    cfg.sweep.validate();
    cfg.wbam.validate();
    if (cfg.pca.k == 0) throw Error(ErrorCode::InvalidConfig, "pca.k must be positive");
    return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
    const auto& d = cfg.pipeline.detector;
    json rows = json::array();
    for (const auto& r : cfg.matrix.rows) {
        rows.push_back({{"kind", std::string(to_string(r.kind))},
                        {"magnitudes", r.magnitudes},
                        {"onset_phases", r.onset_phases}});
    }
    json doc = {
        {"detector",
         {{"threshold_phi", d.threshold_phi},
          {"band_k", d.band_k},
          {"window_cycles", d.window_cycles},
          {"epsilon", d.epsilon},
          {"bins", d.bins},
          {"tp_window_cycles", d.tp_window_cycles},
          {"exclusion_phi", optional_json(d.exclusion_phi)},
          {"min_cycle_s", d.plausibility.min_s},
          {"max_cycle_s", d.plausibility.max_s}}},
        {"kinematics",
         {{"smooth_window", cfg.pipeline.kinematics.smooth_window},
          {"velocity_frame",
           cfg.pipeline.kinematics.velocity_frame == kinematics::VelocityFrame::global ? "global" : "relative"},
          {"max_gap", cfg.pipeline.max_gap}}},
        {"gait",
         {{"grf_threshold_n", cfg.pipeline.heel_strike.threshold_n},
          {"refractory_s", cfg.pipeline.heel_strike.refractory_s}}},
        {"synth",
         {{"walking_speed", cfg.gait_model.walking_speed},
          {"stride_duration", cfg.gait_model.stride_duration},
          {"sample_rate", cfg.gait_model.sample_rate},
          {"step_width", cfg.gait_model.step_width},
          {"noise_sd", cfg.gait_model.noise_sd},
          {"seed", cfg.gait_model.seed},
          {"duration_s", cfg.gait_model.duration_s},
          {"calibration_cycles", cfg.gait_model.calibration_cycles},
          {"perturbation", cfg.perturbation ? perturbation_json(*cfg.perturbation) : json(nullptr)}}},
        {"matrix",
         {{"rows", rows},
          {"onset_stride", cfg.matrix.onset_stride},
          {"duration_s", cfg.matrix.duration_s},
          {"controls_per_row", cfg.matrix.controls_per_row}}},
        {"sweep", {{"t_min", cfg.sweep.t_min}, {"t_max", cfg.sweep.t_max}, {"step", cfg.sweep.step}}},
        {"wbam",
         {{"history_cycles", cfg.wbam.history_cycles},
          {"k", cfg.wbam.k},
          {"mode", cfg.wbam.mode == baseline::CombineMode::either_plane ? "either_plane" : "per_plane_average"},
          {"tp_window_cycles", cfg.wbam.tp_window_cycles},
          {"reference_cycle", cfg.wbam.reference_cycle}}},
        {"pca", {{"k", cfg.pca.k}, {"standardize", cfg.pca.standardize}}},
        {"paths",
         {{"input", optional_json(cfg.paths.input)},
          {"label", optional_json(cfg.paths.label)},
          {"output", optional_json(cfg.paths.output)},
          {"trial_dir", optional_json(cfg.paths.trial_dir)}}},
        {"sample_rate", optional_json(cfg.sample_rate)},
    };
    return doc.dump(2) + "\n";
}

}  // namespace gaitpd
