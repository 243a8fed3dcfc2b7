// Copyright 2026 The rbcorr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "config_io.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rbcorr/errors.h"

namespace rbcorr::cli {

namespace {

std::string join(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

std::string indexed(const std::string& where, std::size_t i) {
    return where + "[" + std::to_string(i) + "]";
}

ComplexMatrix named_matrix(const std::string& name, const std::string& where) {
    if (name == "I") return identity(2);
    if (name == "X") return pauli_x();
    if (name == "Y") return pauli_y();
    if (name == "Z") return pauli_z();
    if (name == "H") return hadamard();
    if (name == "S") return phase_s();
    if (name == "P0") return basis_op(2, 0, 0);
    if (name == "P1") return basis_op(2, 1, 1);
    if (name == "+" || name == "-") {
        ComplexMatrix m(2, 2);
        const double s = name == "+" ? 1.0 : -1.0;
        m << 0.5, 0.5 * s, 0.5 * s, 0.5;
        return m;
    }
    throw ConfigError(where + ": unknown operator name '" + name + "'");
}

Eigen::MatrixXd real_rows(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty list of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    Eigen::MatrixXd out;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = get_double_list(j[r], indexed(where, r));
        if (r == 0) {
            cols = row.size();
            out.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        }
        if (row.size() != cols) throw ConfigError(where + ": ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    return out;
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed reading '" + path + "'");
    return ss.str();
}

Json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path + ": malformed JSON: " + e.what());
    }
}

void require_object(const Json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError((where.empty() ? "config" : where) + ": expected an object");
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    require_object(j, where);
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || item.key() == a;
        if (!ok) throw ConfigError("unknown key '" + join(where, item.key()) + "'");
    }
}

const Json& require_key(const Json& j, const char* key, const std::string& where) {
    require_object(j, where);
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError("missing required key '" + join(where, key) + "'");
    return *it;
}

double get_double(const Json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + ": expected a finite number");
    return v;
}

std::size_t get_size(const Json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ConfigError(where + ": expected a non-negative integer");
    }
    return j.get<std::size_t>();
}

std::uint64_t get_seed(const Json& j, const std::string& where) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw ConfigError(where + ": expected a non-negative integer seed");
    }
    return j.get<std::uint64_t>();
}

bool get_bool(const Json& j, const std::string& where) {
    if (!j.is_boolean()) throw ConfigError(where + ": expected true or false");
    return j.get<bool>();
}

std::vector<double> get_double_list(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected a list of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_double(j[i], indexed(where, i)));
    return out;
}

ComplexMatrix parse_matrix(const Json& j, const std::string& where) {
    if (j.is_string()) return named_matrix(j.get<std::string>(), where);
    if (j.is_array()) return real_rows(j, where).cast<Complex>();
    if (j.is_object()) {
        check_keys(j, {"re", "im"}, where);
        const Eigen::MatrixXd re = real_rows(require_key(j, "re", where), join(where, "re"));
        Eigen::MatrixXd im = Eigen::MatrixXd::Zero(re.rows(), re.cols());
        if (j.contains("im")) {
            im = real_rows(j["im"], join(where, "im"));
            if (im.rows() != re.rows() || im.cols() != re.cols()) {
                throw ConfigError(where + ": re and im shapes differ");
            }
        }
        ComplexMatrix out(re.rows(), re.cols());
        for (Eigen::Index r = 0; r < re.rows(); ++r) {
            for (Eigen::Index c = 0; c < re.cols(); ++c) out(r, c) = Complex(re(r, c), im(r, c));
        }
        return out;
    }
    throw ConfigError(where + ": expected an operator name, a list of rows or {re, im}");
}

Channel parse_channel(const Json& j, const std::string& where, bool allow_weight) {
    require_object(j, where);
    const Json& type_j = require_key(j, "type", where);
    if (!type_j.is_string()) throw ConfigError(join(where, "type") + ": expected a string");
    const std::string type = type_j.get<std::string>();

    double weight = 1.0;
    if (j.contains("weight")) {
        if (!allow_weight) throw ConfigError("unknown key '" + join(where, "weight") + "'");
        weight = get_double(j["weight"], join(where, "weight"));
        if (weight < 0.0 || weight > 1.0) throw ConfigError(join(where, "weight") + ": must lie in [0, 1]");
    }

    Channel ch;
    if (type == "identity") {
        check_keys(j, {"type", "weight"}, where);
        ch = identity_channel(2);
    } else if (type == "depolarizing") {
        check_keys(j, {"type", "weight", "q"}, where);
        ch = depolarizing_channel(2, get_double(require_key(j, "q", where), join(where, "q")));
    } else if (type == "pauli") {
        check_keys(j, {"type", "weight", "px", "py", "pz"}, where);
        auto prob = [&](const char* k) { return j.contains(k) ? get_double(j[k], join(where, k)) : 0.0; };
        ch = pauli_channel(prob("px"), prob("py"), prob("pz"));
    } else if (type == "bit_flip") {
        check_keys(j, {"type", "weight"}, where);
        ch = bit_flip_channel();
    } else if (type == "rotation") {
        // exp(-i angle A) for a Hermitian generator A.
        check_keys(j, {"type", "weight", "axis", "angle"}, where);
        const ComplexMatrix axis = parse_matrix(require_key(j, "axis", where), join(where, "axis"));
        if (!is_hermitian(axis)) throw ConfigError(join(where, "axis") + ": generator must be Hermitian");
        ch = unitary_channel(unitary_from_hamiltonian(axis, get_double(require_key(j, "angle", where),
                                                                       join(where, "angle"))));
    } else if (type == "unitary") {
        check_keys(j, {"type", "weight", "matrix"}, where);
        const ComplexMatrix u = parse_matrix(require_key(j, "matrix", where), join(where, "matrix"));
        if (!is_unitary(u)) throw ConfigError(join(where, "matrix") + ": not unitary");
        ch = unitary_channel(u);
    } else if (type == "kraus") {
        check_keys(j, {"type", "weight", "operators"}, where);
        const Json& ops = require_key(j, "operators", where);
        if (!ops.is_array() || ops.empty()) throw ConfigError(join(where, "operators") + ": expected a non-empty list");
        std::vector<ComplexMatrix> kraus;
        for (std::size_t i = 0; i < ops.size(); ++i) kraus.push_back(parse_matrix(ops[i], indexed(join(where, "operators"), i)));
        ch = Channel::from_kraus(std::move(kraus));
    } else if (type == "choi") {
        check_keys(j, {"type", "weight", "matrix"}, where);
        const ComplexMatrix c = parse_matrix(require_key(j, "matrix", where), join(where, "matrix"));
        if (c.rows() != 4 || c.cols() != 4) throw ConfigError(join(where, "matrix") + ": expected a 4x4 Choi matrix");
        ch = Channel::from_choi(c, 2);
    } else {
        throw ConfigError(join(where, "type") + ": unknown channel type '" + type + "'");
    }

    if (!allow_weight && !is_cptp(ch.choi(), ch.input_dim(), ch.output_dim())) {
        throw ConfigError(where + ": channel is not CPTP");
    }
    if (weight != 1.0) ch = Channel::from_choi(ch.choi() * weight, ch.input_dim(), ch.output_dim());
    return ch;
}

HamiltonianCoupled parse_hamiltonian(const Json& j, const std::string& where) {
    check_keys(j, {"type", "dt", "env_state", "terms"}, where);
    HamiltonianCoupled h;
    if (j.contains("dt")) h.dt = get_double(j["dt"], join(where, "dt"));
    h.env_state = parse_matrix(require_key(j, "env_state", where), join(where, "env_state"));
    const Json& terms = require_key(j, "terms", where);
    const std::string tw = join(where, "terms");
    if (!terms.is_array() || terms.empty()) throw ConfigError(tw + ": expected a non-empty list");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string w = indexed(tw, i);
        check_keys(terms[i], {"coeff", "env", "sys"}, w);
        const double coeff = terms[i].contains("coeff") ? get_double(terms[i]["coeff"], join(w, "coeff")) : 1.0;
        HamiltonianTerm t;
        t.env = parse_matrix(require_key(terms[i], "env", w), join(w, "env")) * coeff;
        t.sys = parse_matrix(require_key(terms[i], "sys", w), join(w, "sys"));
        h.terms.push_back(std::move(t));
    }
    return h;
}

NoiseModel parse_noise(const Json& j, const std::string& where) {
    require_object(j, where);
    const Json& type_j = require_key(j, "type", where);
    if (!type_j.is_string()) throw ConfigError(join(where, "type") + ": expected a string");
    const std::string type = type_j.get<std::string>();

    if (type == "markovian") {
        check_keys(j, {"type", "channels"}, where);
        const Json& list = require_key(j, "channels", where);
        const std::string lw = join(where, "channels");
        if (!list.is_array() || list.empty()) throw ConfigError(lw + ": expected a non-empty list");
        TimeDependentMarkovian model;
        for (std::size_t i = 0; i < list.size(); ++i) model.channels.push_back(parse_channel(list[i], indexed(lw, i)));
        return model;
    }
    if (type == "ccc") {
        check_keys(j, {"type", "weights", "branches"}, where);
        CccModel model;
        model.weights = get_double_list(require_key(j, "weights", where), join(where, "weights"));
        const Json& list = require_key(j, "branches", where);
        const std::string lw = join(where, "branches");
        if (!list.is_array()) throw ConfigError(lw + ": expected a list");
        for (std::size_t i = 0; i < list.size(); ++i) model.branches.push_back(parse_channel(list[i], indexed(lw, i)));
        return model;
    }
    if (type == "cff") {
        check_keys(j, {"type", "initial_settings", "instruments", "kernel"}, where);
        CffModel model;
        model.initial_settings =
            get_double_list(require_key(j, "initial_settings", where), join(where, "initial_settings"));
        const Json& inst = require_key(j, "instruments", where);
        const std::string iw = join(where, "instruments");
        if (!inst.is_array()) throw ConfigError(iw + ": expected a list of instruments");
        for (std::size_t x = 0; x < inst.size(); ++x) {
            const std::string xw = indexed(iw, x);
            if (!inst[x].is_array()) throw ConfigError(xw + ": expected a list of instrument elements");
            std::vector<Channel> elements;
            for (std::size_t a = 0; a < inst[x].size(); ++a) {
                elements.push_back(parse_channel(inst[x][a], indexed(xw, a), true));
            }
            model.instruments.push_back(std::move(elements));
        }
        const Json& kernel = require_key(j, "kernel", where);
        const std::string kw = join(where, "kernel");
        if (!kernel.is_array()) throw ConfigError(kw + ": expected kernel[x][a][x']");
        for (std::size_t x = 0; x < kernel.size(); ++x) {
            if (!kernel[x].is_array()) throw ConfigError(indexed(kw, x) + ": expected a list");
            std::vector<std::vector<double>> rows;
            for (std::size_t a = 0; a < kernel[x].size(); ++a) {
                rows.push_back(get_double_list(kernel[x][a], indexed(indexed(kw, x), a)));
            }
            model.kernel.push_back(std::move(rows));
        }
        return model;
    }
    if (type == "hamiltonian") return parse_hamiltonian(j, where);
    throw ConfigError(join(where, "type") + ": unknown noise type '" + type + "'");
}

Spam parse_spam(const Json& j, const std::string& where) {
    check_keys(j, {"rho", "effect", "preparation", "measurement"}, where);
    Spam spam = ideal_spam(2);
    if (j.contains("rho")) spam.rho = parse_matrix(j["rho"], join(where, "rho"));
    if (j.contains("effect")) spam.effect = parse_matrix(j["effect"], join(where, "effect"));
    if (j.contains("preparation")) spam.preparation = parse_channel(j["preparation"], join(where, "preparation"));
    if (j.contains("measurement")) spam.measurement = parse_channel(j["measurement"], join(where, "measurement"));
    return spam;
}

std::vector<std::size_t> parse_lengths(const Json& j, const std::string& where) {
    std::vector<std::size_t> out;
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_size(j[i], indexed(where, i)));
    } else {
        check_keys(j, {"start", "stop", "step"}, where);
        const std::size_t start = get_size(require_key(j, "start", where), join(where, "start"));
        const std::size_t stop = get_size(require_key(j, "stop", where), join(where, "stop"));
        const std::size_t step = j.contains("step") ? get_size(j["step"], join(where, "step")) : 1;
        if (step == 0) throw ConfigError(join(where, "step") + ": must be positive");
        if (stop < start) throw ConfigError(where + ": stop < start");
        for (std::size_t m = start; m <= stop; m += step) out.push_back(m);
    }
    if (out.empty()) throw ConfigError(where + ": no lengths given");
    return out;
}

std::vector<double> parse_grid(const Json& j, const std::string& where) {
    std::vector<double> out;
    if (j.is_array()) {
        out = get_double_list(j, where);
    } else {
        check_keys(j, {"start", "stop", "points"}, where);
        const double start = get_double(require_key(j, "start", where), join(where, "start"));
        const double stop = get_double(require_key(j, "stop", where), join(where, "stop"));
        const std::size_t n = get_size(require_key(j, "points", where), join(where, "points"));
        if (n == 1) {
            out.push_back(start);
        } else {
            // Computed from the index so the endpoints and midpoints are exact.
            for (std::size_t i = 0; i < n; ++i) {
                out.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1));
            }
        }
    }
    if (out.empty()) throw ConfigError(where + ": empty grid");
    return out;
}

}  // namespace rbcorr::cli
