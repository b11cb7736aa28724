#include "gaitpd/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace gaitpd::ingest {

namespace {

constexpr std::array<char, 3> kAxisNames = {'x', 'y', 'z'};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(trim(line.substr(pos)));
            break;
        }
        out.push_back(trim(line.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    for (auto line : split(text, '\n')) {
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::optional<double> parse_number(std::string_view cell) {
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    return value;
}

void append_number(std::string& out, double v) {
    if (is_missing(v)) return;
    char buf[32];
    const int n = std::snprintf(buf, sizeof(buf), "%.9g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

std::string channel_name(std::size_t marker, std::size_t axis) {
    return std::string(kMarkerNames[marker]) + "_" + kAxisNames[axis];
}

}  // namespace

void TrialRecording::validate() const {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        throw Error(ErrorCode::InvalidConfig, "sample_rate must be positive");
    }
    const std::size_t n = frames.size();
    if (n < 2) throw Error(ErrorCode::TooShort, "a trial needs at least 2 frames");
    auto check = [n](std::size_t len, const char* name) {
        if (len != n) throw Error(ErrorCode::RaggedRows, std::string(name) + " length differs from frame count");
    };
    check(grf_right_z.size(), "grf_r_z");
    check(grf_left_z.size(), "grf_l_z");
    if (wbam_sagittal.has_value() != wbam_frontal.has_value()) {
        throw Error(ErrorCode::MalformedHeader, "wbam channels must be present together");
    }
    if (wbam_sagittal) {
        check(wbam_sagittal->size(), "wbam_sag");
        check(wbam_frontal->size(), "wbam_front");
    }
    for (double f : grf_right_z) {
        if (!std::isfinite(f)) throw Error(ErrorCode::NonFiniteForce, "grf_r_z holds a non-finite value");
    }
    for (double f : grf_left_z) {
        if (!std::isfinite(f)) throw Error(ErrorCode::NonFiniteForce, "grf_l_z holds a non-finite value");
    }
    if (perturbation && perturbation->onset_sample >= n) {
        throw Error(ErrorCode::OutOfRange, "perturbation onset beyond the last frame");
    }
}

std::vector<std::string> csv_header(bool with_wbam) {
    std::vector<std::string> cols;
    cols.reserve(30);
    cols.emplace_back("t");
    for (std::size_t m = 0; m < kNumMarkers; ++m) {
        for (std::size_t a = 0; a < 3; ++a) cols.push_back(channel_name(m, a));
    }
    cols.emplace_back("grf_r_z");
    cols.emplace_back("grf_l_z");
    if (with_wbam) {
        cols.emplace_back("wbam_sag");
        cols.emplace_back("wbam_front");
    }
    return cols;
}

TrialRecording parse_trial(std::string_view csv_text, double sample_rate, std::string trial_id) {
    if (!(sample_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "sample_rate must be positive");
    const auto lines = split_lines(csv_text);
    if (lines.empty()) throw Error(ErrorCode::MalformedHeader, "empty input");

    const auto header = split(lines.front(), ',');
    const auto base = csv_header(false);
    for (const auto& col : base) {
        if (std::find(header.begin(), header.end(), col) == header.end()) {
            throw Error(ErrorCode::MalformedHeader, "missing required column '" + col + "'");
        }
    }
    bool with_wbam = false;
    if (header.size() == base.size() + 2) {
        with_wbam = true;
    } else if (header.size() != base.size()) {
        throw Error(ErrorCode::MalformedHeader, "unexpected column count " + std::to_string(header.size()));
    }
    const auto expected = csv_header(with_wbam);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (header[i] != expected[i]) {
            throw Error(ErrorCode::MalformedHeader,
                        "column " + std::to_string(i) + " is '" + std::string(header[i]) + "', expected '" +
                            expected[i] + "'");
        }
    }

    TrialRecording trial;
    trial.trial_id = std::move(trial_id);
    trial.sample_rate = sample_rate;
    const std::size_t rows = lines.size() - 1;
    trial.frames.resize(rows);
    trial.grf_right_z.resize(rows);
    trial.grf_left_z.resize(rows);
    if (with_wbam) {
        trial.wbam_sagittal.emplace(rows);
        trial.wbam_frontal.emplace(rows);
    }

    double t0 = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto cells = split(lines[r + 1], ',');
        if (cells.size() != expected.size()) {
            throw Error(ErrorCode::RaggedRows, "row " + std::to_string(r + 1) + " has " +
                                                   std::to_string(cells.size()) + " cells, expected " +
                                                   std::to_string(expected.size()));
        }
        const auto t = parse_number(cells[0]);
        if (!t || !std::isfinite(*t)) {
            throw Error(ErrorCode::BadTimestamps, "row " + std::to_string(r + 1) + " has no valid time");
        }
        if (r == 0) t0 = *t;
        if (std::abs(*t - (t0 + static_cast<double>(r) / sample_rate)) > 0.5 / sample_rate) {
            throw Error(ErrorCode::BadTimestamps,
                        "row " + std::to_string(r + 1) + " time does not match the sample rate");
        }
        std::size_t c = 1;
        for (std::size_t m = 0; m < kNumMarkers; ++m) {
            for (std::size_t a = 0; a < 3; ++a, ++c) {
                double value = kMissing;
                if (!cells[c].empty()) {
                    const auto v = parse_number(cells[c]);
                    if (!v || !std::isfinite(*v)) {
                        throw Error(ErrorCode::BadCell, "row " + std::to_string(r + 1) + " column " +
                                                            expected[c] + " is not a number");
                    }
                    value = *v;
                }
                trial.frames[r].markers[m][a] = value;
            }
        }
        auto force = [&](std::size_t col) {
            const auto v = parse_number(cells[col]);
            if (!v || !std::isfinite(*v)) {
                throw Error(ErrorCode::NonFiniteForce,
                            "row " + std::to_string(r + 1) + " column " + expected[col] + " is not finite");
            }
            return *v;
        };
        trial.grf_right_z[r] = force(c);
        trial.grf_left_z[r] = force(c + 1);
        if (with_wbam) {
            for (std::size_t k = 0; k < 2; ++k) {
                const auto v = parse_number(cells[c + 2 + k]);
                if (!v || !std::isfinite(*v)) {
                    throw Error(ErrorCode::BadCell,
                                "row " + std::to_string(r + 1) + " column " + expected[c + 2 + k] + " is not finite");
                }
                (k == 0 ? *trial.wbam_sagittal : *trial.wbam_frontal)[r] = *v;
            }
        }
    }
    trial.validate();
    return trial;
}

std::string serialize_trial(const TrialRecording& trial) {
    trial.validate();
    const bool with_wbam = trial.has_wbam();
    std::string out;
    out.reserve(trial.size() * 300);
    const auto header = csv_header(with_wbam);
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out.push_back(',');
        out += header[i];
    }
    out.push_back('\n');
    for (std::size_t r = 0; r < trial.size(); ++r) {
        append_number(out, static_cast<double>(r) / trial.sample_rate);
        for (const auto& marker : trial.frames[r].markers) {
            for (std::size_t a = 0; a < 3; ++a) {
                out.push_back(',');
                append_number(out, marker[a]);
            }
        }
        out.push_back(',');
        append_number(out, trial.grf_right_z[r]);
        out.push_back(',');
        append_number(out, trial.grf_left_z[r]);
        if (with_wbam) {
            out.push_back(',');
            append_number(out, (*trial.wbam_sagittal)[r]);
            out.push_back(',');
            append_number(out, (*trial.wbam_frontal)[r]);
        }
        out.push_back('\n');
    }
    return out;
}

double infer_sample_rate(std::string_view csv_text) {
    const auto lines = split_lines(csv_text);
    if (lines.size() < 3) throw Error(ErrorCode::TooShort, "need at least two data rows to infer the sample rate");
    const auto a = parse_number(split(lines[1], ',').front());
    const auto b = parse_number(split(lines[2], ',').front());
    if (!a || !b || !(*b > *a)) throw Error(ErrorCode::BadTimestamps, "cannot infer sample rate from t column");
    return std::round(1.0 / (*b - *a) * 1e6) / 1e6;
}

std::string label_to_json(const std::optional<PerturbationLabel>& label) {
    if (!label) return "null";
    nlohmann::ordered_json j;
    j["onset_sample"] = label->onset_sample;
    j["kind"] = std::string(to_string(label->kind));
    if (label->direction) {
        j["direction"] = std::string(to_string(*label->direction));
    } else {
        j["direction"] = nullptr;
    }
    j["magnitude"] = label->magnitude;
    return j.dump();
}

std::optional<PerturbationLabel> label_from_json(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidSpec, std::string("label is not valid JSON: ") + e.what());
    }
    if (j.is_null()) return std::nullopt;
    if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "label must be an object or null");
    for (const auto& [key, _] : j.items()) {
        if (key != "onset_sample" && key != "kind" && key != "direction" && key != "magnitude") {
            throw Error(ErrorCode::InvalidSpec, "unknown label key '" + key + "'");
        }
    }
    try {
        PerturbationLabel label;
        const auto onset = j.at("onset_sample").get<long long>();
        if (onset < 0) throw Error(ErrorCode::InvalidSpec, "onset_sample must be non-negative");
        label.onset_sample = static_cast<std::size_t>(onset);
        label.kind = parse_perturbation_kind(j.at("kind").get<std::string>());
        if (j.contains("direction") && !j["direction"].is_null()) {
            label.direction = parse_direction(j["direction"].get<std::string>());
        }
        label.magnitude = j.at("magnitude").get<double>();
        return label;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidSpec, std::string("malformed label: ") + e.what());
    }
}

FillResult fill_gaps(std::span<const double> series, std::size_t max_gap) {
    FillResult result{std::vector<double>(series.begin(), series.end()), {}};
    const std::size_t n = series.size();
    if (n == 0) return result;
    if (is_missing(series.front()) || is_missing(series.back())) {
        throw Error(ErrorCode::GapAtBoundary, "series starts or ends with a missing sample");
    }
    auto known = [&](std::size_t i) { return !is_missing(series[i]); };

    std::size_t i = 1;
    while (i < n) {
        if (known(i)) {
            ++i;
            continue;
        }
        const std::size_t a = i;
        std::size_t b = a;
        while (!known(b)) ++b;  // the last sample is known, so this terminates
        const std::size_t len = b - a;
        i = b;
        if (len > max_gap) {
            result.oversized.push_back({a, len});
            continue;
        }
        const bool cubic = a >= 2 && known(a - 2) && b + 1 < n && known(b + 1);
        if (cubic) {
            const std::array<double, 4> xs = {static_cast<double>(a - 2), static_cast<double>(a - 1),
                                              static_cast<double>(b), static_cast<double>(b + 1)};
            const std::array<double, 4> ys = {series[a - 2], series[a - 1], series[b], series[b + 1]};
            for (std::size_t j = a; j < b; ++j) {
                const double x = static_cast<double>(j);
                double value = 0.0;
                for (std::size_t p = 0; p < 4; ++p) {
                    double basis = 1.0;
                    for (std::size_t q = 0; q < 4; ++q) {
                        if (q != p) basis *= (x - xs[q]) / (xs[p] - xs[q]);
                    }
                    value += ys[p] * basis;
                }
                result.series[j] = value;
            }
        } else {
            const double y0 = series[a - 1];
            const double y1 = series[b];
            const double span = static_cast<double>(len + 1);
            for (std::size_t j = a; j < b; ++j) {
                const double f = static_cast<double>(j - (a - 1)) / span;
                result.series[j] = y0 + f * (y1 - y0);
            }
        }
    }
    return result;
}

std::vector<double> marker_channel(const TrialRecording& trial, Marker m, std::size_t axis) {
    std::vector<double> out;
    out.reserve(trial.size());
    for (const auto& f : trial.frames) out.push_back(f[m][axis]);
    return out;
}

void set_marker_channel(TrialRecording& trial, Marker m, std::size_t axis, std::span<const double> values) {
    if (values.size() != trial.size()) throw Error(ErrorCode::DimensionMismatch, "channel length mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) trial.frames[i][m][axis] = values[i];
}

RepairReport repair_trial(TrialRecording& trial, std::size_t max_gap) {
    RepairReport report;
    constexpr std::array<Marker, 6> required = {Marker::rasis, Marker::lasis, Marker::rpsis,
                                                Marker::lpsis, Marker::rheel, Marker::lheel};
    for (Marker m : required) {
        for (std::size_t axis = 0; axis < 3; ++axis) {
            const auto channel = marker_channel(trial, m, axis);
            const auto missing_before =
                static_cast<std::size_t>(std::count_if(channel.begin(), channel.end(), is_missing));
            if (missing_before == 0) continue;
            const auto name = channel_name(static_cast<std::size_t>(m), axis);
            FillResult filled;
            try {
                filled = fill_gaps(channel, max_gap);
            } catch (const Error& e) {
                throw Error(e.code(), name + ": " + e.what());
            }
            std::size_t left = 0;
            for (const auto& g : filled.oversized) {
                report.oversized.push_back({name, g});
                left += g.length;
            }
            report.filled_samples += missing_before - left;
            set_marker_channel(trial, m, axis, filled.series);
        }
    }
    return report;
}

}  // namespace gaitpd::ingest
