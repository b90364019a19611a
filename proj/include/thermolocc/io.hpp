#pragma once

// JSON conversion for the library types (nlohmann::json).

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bell_chsh.hpp"
#include "gibbs_maps.hpp"
#include "ltocc_sim.hpp"
#include "tensor_polytope.hpp"
#include "thermo_core.hpp"

namespace thermolocc::io {

using json = nlohmann::json;

inline InverseTemperature beta_from_json(const json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "inf" || s == "infinity" || s == "INFINITY") return InverseTemperature::infinity();
        try {
            std::size_t pos = 0;
            double v = std::stod(s, &pos);
            if (pos == s.size()) return InverseTemperature(v);
        } catch (const std::exception&) {
        }
        throw Error("invalid inverse temperature '" + s + "'");
    }
    if (!j.is_number()) throw Error("inverse temperature must be a number or \"inf\"");
    return InverseTemperature(j.get<double>());
}

inline json beta_to_json(const InverseTemperature& b) {
    return b.is_infinite() ? json("inf") : json(b.value());
}

inline std::vector<double> numbers(const json& j, const char* what) {
    if (!j.is_array()) throw Error(std::string(what) + " must be an array of numbers");
    std::vector<double> v;
    for (const auto& x : j) {
        if (!x.is_number()) throw Error(std::string(what) + " must be an array of numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

inline ProbVector prob_from_json(const json& j) { return ProbVector(numbers(j, "probability vector")); }
inline json to_json(const ProbVector& p) { return json(p.to_vector()); }

inline Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw Error("matrix must be a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = numbers(j[0], "matrix row").size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        auto row = numbers(j[r], "matrix row");
        if (row.size() != cols) throw Error("matrix rows have different lengths");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
    }
    return m;
}

inline json to_json(const Eigen::MatrixXd& m) {
    json j = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        j.push_back(row);
    }
    return j;
}
inline json to_json(const StochasticMatrix& m) { return to_json(m.matrix()); }
inline StochasticMatrix stochastic_from_json(const json& j) { return StochasticMatrix(matrix_from_json(j)); }

inline JointDistribution joint_from_json(const json& j) { return JointDistribution(matrix_from_json(j)); }
inline json to_json(const JointDistribution& r) { return to_json(r.matrix()); }

inline json to_json(const Tensor3<double>& t) {
    json e = json::array();
    for (std::size_t i = 0; i < t.d; ++i) {
        json li = json::array();
        for (std::size_t jj = 0; jj < t.d; ++jj) {
            json row = json::array();
            for (std::size_t k = 0; k < t.d; ++k) row.push_back(t(i, jj, k));
            li.push_back(row);
        }
        e.push_back(li);
    }
    return {{"d", t.d}, {"entries", e}};
}
inline json to_json(const StochasticTensor& t) { return to_json(t.tensor()); }

inline Tensor3<double> tensor3_from_json(const json& j) {
    const json& e = j.is_object() ? j.at("entries") : j;
    if (!e.is_array() || e.empty()) throw Error("tensor entries must be a nested array");
    const std::size_t d = e.size();
    if (j.is_object() && j.contains("d") && j.at("d").get<std::size_t>() != d)
        throw Error("tensor \"d\" does not match its entries");
    std::vector<std::vector<std::vector<double>>> layers;
    for (const auto& li : e) {
        if (!li.is_array() || li.size() != d) throw Error("tensor entries must be d x d x d");
        std::vector<std::vector<double>> layer;
        for (const auto& row : li) {
            auto v = numbers(row, "tensor row");
            if (v.size() != d) throw Error("tensor entries must be d x d x d");
            layer.push_back(v);
        }
        layers.push_back(layer);
    }
    return Tensor3<double>::from_layers(layers);
}
inline StochasticTensor tensor_from_json(const json& j) { return StochasticTensor(tensor3_from_json(j)); }

inline json to_json(const MajorizationCurve& c) {
    json j = json::array();
    for (const auto& [x, y] : c.elbows) j.push_back({x, y});
    return j;
}

inline std::string curve_csv(const MajorizationCurve& c) {
    std::ostringstream os;
    os.precision(17);
    os << "x,y\n";
    for (const auto& [x, y] : c.elbows) os << x << ',' << y << '\n';
    return os.str();
}

// ---- Protocols ---------------------------------------------------------------

inline History history_from_string(const std::string& s) {
    History h;
    if (s.empty()) return h;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != item.size()) throw Error("invalid history key '" + s + "'");
        h.push_back(v);
    }
    return h;
}

inline MatrixBank bank_from_json(const json& j) {
    if (!j.is_object()) throw Error("bank must be an object keyed by history");
    MatrixBank b;
    for (auto it = j.begin(); it != j.end(); ++it) b.emplace(history_from_string(it.key()), stochastic_from_json(it.value()));
    return b;
}

inline json bank_to_json(const MatrixBank& b) {
    json j = json::object();
    for (const auto& [h, m] : b) j[history_string(h)] = to_json(m);
    return j;
}

inline BipartiteSetup setup_from_json(const json& j) {
    return BipartiteSetup(EnergySpectrum(numbers(j.at("energies_a"), "energies_a")),
                          EnergySpectrum(numbers(j.at("energies_b"), "energies_b")), beta_from_json(j.at("beta_a")),
                          beta_from_json(j.at("beta_b")));
}

inline json to_json(const BipartiteSetup& s) {
    return {{"energies_a", s.spec_a.energies()},
            {"energies_b", s.spec_b.energies()},
            {"beta_a", beta_to_json(s.beta_a)},
            {"beta_b", beta_to_json(s.beta_b)}};
}

inline Protocol protocol_from_json(const json& j, const BipartiteSetup* parent = nullptr) {
    Protocol p;
    if (j.contains("setup"))
        p.setup = setup_from_json(j.at("setup"));
    else if (parent)
        p.setup = *parent;
    else
        throw Error("protocol needs a \"setup\"");
    if (j.contains("rounds"))
        for (const auto& r : j.at("rounds")) {
            Round round;
            std::string m = r.at("measurer").get<std::string>();
            if (m != "A" && m != "B") throw Error("measurer must be \"A\" or \"B\"");
            round.measurer = m == "A" ? Party::A : Party::B;
            round.bank = bank_from_json(r.at("bank"));
            if (r.contains("post") && !r.at("post").is_null()) {
                const json& post = r.at("post");
                if (post.is_object())
                    round.post = bank_from_json(post);
                else
                    round.post.emplace(History{}, stochastic_from_json(post));
            }
            round.retain = r.value("retain", false);
            p.rounds.push_back(std::move(round));
        }
    if (j.contains("mixture") && !j.at("mixture").is_null())
        for (const auto& c : j.at("mixture"))
            p.mixture.push_back({c.at("weight").get<double>(), protocol_from_json(c.at("protocol"), &p.setup)});
    return p;
}

inline json to_json(const Protocol& p) {
    json rounds = json::array();
    for (const auto& r : p.rounds) {
        json jr = {{"measurer", r.measurer == Party::A ? "A" : "B"}, {"bank", bank_to_json(r.bank)}, {"retain", r.retain}};
        if (r.post.empty())
            jr["post"] = nullptr;
        else if (r.post.size() == 1 && r.post.begin()->first.empty())
            jr["post"] = to_json(r.post.begin()->second);
        else
            jr["post"] = bank_to_json(r.post);
        rounds.push_back(jr);
    }
    json mix = nullptr;
    if (!p.mixture.empty()) {
        mix = json::array();
        for (const auto& c : p.mixture) mix.push_back({{"weight", c.weight}, {"protocol", to_json(c.protocol)}});
    }
    return {{"setup", to_json(p.setup)}, {"rounds", rounds}, {"mixture", mix}};
}

inline json to_json(const DegeneracyProfile& prof) {
    json blocks = json::array();
    for (const auto& b : prof.blocks) blocks.push_back({{"energy", b.energy}, {"dim", b.indices.size()}, {"indices", b.indices}});
    return {{"D_deg", prof.d_deg}, {"D_ndeg", prof.d_ndeg}, {"dimension", prof.total}, {"blocks", blocks}};
}

} // namespace thermolocc::io
