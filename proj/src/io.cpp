#include "semrd/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace semrd {

namespace {

using json = nlohmann::json;

Matrix to_matrix(const json& j, const char* name) {
    if (!j.is_array()) throw Error(Errc::Parse, std::string(name) + " must be a nested array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Matrix(0, 0);
    if (!j[0].is_array()) throw Error(Errc::Parse, std::string(name) + " must be a nested array");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw Error(Errc::Parse, std::string(name) + " has ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const json& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number()) throw Error(Errc::Parse, std::string(name) + " entries must be numbers");
            m(r, c) = v.get<double>();
        }
    }
    return m;
}

Vector to_vector(const json& j, const char* name) {
    if (!j.is_array()) throw Error(Errc::Parse, std::string(name) + " must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw Error(Errc::Parse, std::string(name) + " entries must be numbers");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

Matrix optional_kz(const json& j, Eigen::Index l) {
    if (j.contains("K_Z")) return to_matrix(j["K_Z"], "K_Z");
    return Matrix::Zero(l, l);
}

json matrix_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Parse, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

LoadedModel parse_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::Parse, e.what());
    }
    if (!j.is_object()) throw Error(Errc::Parse, "model file must hold a JSON object");
    LoadedModel out;
    if (j.contains("kx_first_row")) {
        if (!j.contains("h_first_row")) throw Error(Errc::Parse, "circulant model needs h_first_row");
        CirculantRows rows{to_vector(j["kx_first_row"], "kx_first_row"), to_vector(j["h_first_row"], "h_first_row")};
        if (rows.kx_first_row.size() != rows.h_first_row.size() || rows.kx_first_row.size() == 0)
            throw Error(Errc::DimensionMismatch, "first rows must have equal nonzero length");
        const Eigen::Index m = rows.kx_first_row.size();
        Matrix kx(m, m), h(m, m);
        for (Eigen::Index t = 0; t < m; ++t)
            for (Eigen::Index u = 0; u < m; ++u) {
                kx(t, u) = rows.kx_first_row((u - t + m) % m);
                h(t, u) = rows.h_first_row((u - t + m) % m);
            }
        out.kind = LoadedModel::Kind::Gaussian;
        out.gaussian = validate_gaussian_model(kx, h, optional_kz(j, m));
        out.circulant = std::move(rows);
        return out;
    }
    if (j.contains("K_X")) {
        const Matrix kx = to_matrix(j["K_X"], "K_X");
        if (j.contains("states")) {
            if (!j["states"].is_array()) throw Error(Errc::Parse, "states must be an array");
            std::vector<LinearState> states;
            for (const json& s : j["states"]) {
                if (!s.is_object() || !s.contains("H")) throw Error(Errc::Parse, "each state needs H");
                Matrix h = to_matrix(s["H"], "H");
                Matrix kz = optional_kz(s, h.rows());
                states.push_back({std::move(h), std::move(kz)});
            }
            out.kind = LoadedModel::Kind::MultiGaussian;
            out.multi_gaussian = validate_multi_state_model(kx, states);
            if (states.size() == 1) out.gaussian = out.multi_gaussian->state_model(0);
            return out;
        }
        if (!j.contains("H")) throw Error(Errc::Parse, "Gaussian model needs H");
        const Matrix h = to_matrix(j["H"], "H");
        out.kind = LoadedModel::Kind::Gaussian;
        out.gaussian = validate_gaussian_model(kx, h, optional_kz(j, h.rows()));
        return out;
    }
    if (j.contains("p_sx")) {
        if (!j.contains("d_s") || !j.contains("d_o")) throw Error(Errc::Parse, "discrete source needs d_s and d_o");
        out.kind = LoadedModel::Kind::Discrete;
        out.discrete = DiscreteSemanticSource::create(to_matrix(j["p_sx"], "p_sx"), to_matrix(j["d_s"], "d_s"),
                                                      to_matrix(j["d_o"], "d_o"));
        return out;
    }
    if (j.contains("states") && j.contains("d_o")) {
        if (!j["states"].is_array()) throw Error(Errc::Parse, "states must be an array");
        std::vector<MultiStateDiscreteSource::State> states;
        for (const json& s : j["states"]) {
            if (!s.is_object() || !s.contains("p_sx") || !s.contains("d_s"))
                throw Error(Errc::Parse, "each state needs p_sx and d_s");
            states.push_back({to_matrix(s["p_sx"], "p_sx"), to_matrix(s["d_s"], "d_s")});
        }
        out.kind = LoadedModel::Kind::MultiDiscrete;
        out.multi_discrete = MultiStateDiscreteSource::create(std::move(states), to_matrix(j["d_o"], "d_o"));
        if (out.multi_discrete->num_states() == 1) out.discrete = out.multi_discrete->states().front();
        return out;
    }
    throw Error(Errc::Parse, "unrecognized model layout");
}

LoadedModel load_model_file(const std::string& path) { return parse_model(read_text_file(path)); }

std::vector<std::pair<double, double>> parse_points(const std::string& text) {
    std::vector<std::pair<double, double>> pts;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw Error(Errc::Parse, e.what());
        }
        for (const json& p : j) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw Error(Errc::Parse, "points must be [D_s, D_o] pairs");
            pts.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        return pts;
    }
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ls(line);
        double ds = 0.0;
        double dob = 0.0;
        std::string rest;
        if (!(ls >> ds >> dob) || (ls >> rest)) throw Error(Errc::Parse, "bad point line: " + line);
        pts.emplace_back(ds, dob);
    }
    return pts;
}

std::string gaussian_model_json(const GaussianSemanticModel& model) {
    json j;
    j["K_X"] = matrix_json(model.K_X());
    j["H"] = matrix_json(model.H());
    j["K_Z"] = matrix_json(model.K_Z());
    return j.dump() + "\n";
}

std::string circulant_model_json(const CirculantRows& rows) {
    json j;
    j["kx_first_row"] = std::vector<double>(rows.kx_first_row.data(), rows.kx_first_row.data() + rows.kx_first_row.size());
    j["h_first_row"] = std::vector<double>(rows.h_first_row.data(), rows.h_first_row.data() + rows.h_first_row.size());
    return j.dump() + "\n";
}

std::string discrete_model_json(const DiscreteSemanticSource& source) {
    json j;
    j["p_sx"] = matrix_json(source.joint_pmf());
    j["d_s"] = matrix_json(source.state_distortion());
    j["d_o"] = matrix_json(source.obs_distortion());
    return j.dump() + "\n";
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace semrd
