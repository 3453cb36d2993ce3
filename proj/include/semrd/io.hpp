#pragma once

// JSON model files.
//
//   Gaussian:        {"K_X": [[...]], "H": [[...]], "K_Z": [[...]]}
//   multi-state:     {"K_X": [[...]], "states": [{"H": ..., "K_Z": ...}, ...]}
//   circulant:       {"kx_first_row": [...], "h_first_row": [...], "K_Z": [[...]]}
//   discrete:        {"p_sx": [[...]], "d_s": [[...]], "d_o": [[...]]}
//   multi discrete:  {"states": [{"p_sx": ..., "d_s": ...}, ...], "d_o": [[...]]}
//
// Matrices are row-major nested arrays. K_Z may be omitted (zero).

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semrd/model.hpp"

namespace semrd {

struct CirculantRows {
    Vector kx_first_row;
    Vector h_first_row;
};

struct LoadedModel {
    enum class Kind { Gaussian, MultiGaussian, Discrete, MultiDiscrete };
    Kind kind = Kind::Gaussian;
    std::optional<GaussianSemanticModel> gaussian;
    std::optional<MultiStateGaussianModel> multi_gaussian;
    std::optional<DiscreteSemanticSource> discrete;
    std::optional<MultiStateDiscreteSource> multi_discrete;
    /// Set when the file used the circulant shorthand.
    std::optional<CirculantRows> circulant;
};

/// Throws Error(Parse) on malformed JSON or unknown layout, and the model
/// validation errors otherwise.
[[nodiscard]] LoadedModel parse_model(const std::string& text);
[[nodiscard]] LoadedModel load_model_file(const std::string& path);

/// (D_s, D_o) pairs, either a JSON array of pairs or one "D_s,D_o" pair per
/// line (blank lines and lines starting with '#' are skipped).
[[nodiscard]] std::vector<std::pair<double, double>> parse_points(const std::string& text);

[[nodiscard]] std::string read_text_file(const std::string& path);

/// Serializes a Gaussian model (dense form) as JSON.
[[nodiscard]] std::string gaussian_model_json(const GaussianSemanticModel& model);
[[nodiscard]] std::string circulant_model_json(const CirculantRows& rows);
[[nodiscard]] std::string discrete_model_json(const DiscreteSemanticSource& source);

/// printf("%.12g") with "inf", "-inf" and "nan" spelled out.
[[nodiscard]] std::string format_number(double v);

}  // namespace semrd
