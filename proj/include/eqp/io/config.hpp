// config.hpp: JSON process configurations. Complex numbers are [re, im]
// pairs and matrices are arrays of rows. Unknown fields are rejected.

#pragma once

#include "eqp/ergodic_base.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace eqp::io {

using json = nlohmann::json;

[[noreturn]] inline void config_error(const std::string& what) { fail(ErrorKind::ConfigError, what); }

// ---------------------------------------------------------------------------
// Codec

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const CMat& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const std::vector<cplx>& zs) {
    json a = json::array();
    for (cplx z : zs) a.push_back(to_json(z));
    return a;
}

inline cplx complex_from_json(const json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        config_error(where + ": expected a number or an [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline CMat matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) config_error(where + ": expected a non-empty array of rows");
    const auto rows = static_cast<Index>(j.size());
    if (!j[0].is_array() || j[0].empty()) config_error(where + ": rows must be non-empty arrays");
    const auto cols = static_cast<Index>(j[0].size());
    CMat m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) config_error(where + ": ragged matrix");
        for (Index c = 0; c < cols; ++c)
            m(i, c) = complex_from_json(row[static_cast<std::size_t>(c)], where);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Schema helpers

inline void require_object(const json& j, const std::string& where, std::initializer_list<const char*> allowed,
                           std::initializer_list<const char*> required = {}) {
    if (!j.is_object()) config_error(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key)) config_error(where + ": unknown field '" + key + "'");
    for (const char* r : required)
        if (!j.contains(r)) config_error(where + ": missing field '" + std::string(r) + "'");
}

template <class T>
T get_field(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        config_error(where + "." + key + ": wrong type");
    }
}

inline double positive_field(const json& j, const char* key, const std::string& where) {
    const auto v = get_field<double>(j, key, where);
    if (!(v > 0.0)) config_error(where + "." + key + ": must be positive");
    return v;
}

// ---------------------------------------------------------------------------
// Configuration

struct BaseSpec {
    std::string kind = "cycle";          // cycle | iid | rotation
    std::vector<std::size_t> perm;       // cycle: theta(l) = perm[l]
    std::vector<double> probs;           // iid
    double t = 0.0;                      // rotation
    std::vector<double> breakpoints;     // rotation
};

struct ChannelSpec {
    std::string builtin;                 // empty for explicit Kraus lists
    Index dim = 0;
    double param = 0.0;                  // lambda / p / gamma where applicable
    std::vector<CMat> kraus;
};

struct Tolerances {
    double tol = 1e-8;
};

struct ProcessConfig {
    std::string name = "process";
    Index dim = 0;
    BaseSpec base;
    std::vector<ChannelSpec> channels;
    std::vector<std::size_t> assignment;
    Tolerances tolerances;
    std::uint64_t seed = 0;
    std::size_t horizon = 1000;
    std::size_t samples = 10000;
    std::size_t n_avg = 2000;
    std::size_t n_max = 8;
    std::vector<std::string> analyses;
};

inline const std::set<std::string>& known_builtins() {
    static const std::set<std::string> s{"identity", "cyclic_shift", "depolarizing", "dephasing", "amplitude_damping"};
    return s;
}

inline const std::set<std::string>& known_analyses() {
    static const std::set<std::string> s{"spectral", "partition", "stopping_times", "cesaro", "minimality",
                                         "aperiodicity", "iid_probe", "compose"};
    return s;
}

inline ChannelSpec channel_from_json(const json& j, const std::string& where) {
    ChannelSpec c;
    if (j.contains("builtin")) {
        require_object(j, where, {"builtin", "dim", "param"}, {"builtin", "dim"});
        c.builtin = get_field<std::string>(j, "builtin", where);
        if (!known_builtins().count(c.builtin)) config_error(where + ": unknown builtin '" + c.builtin + "'");
        c.dim = get_field<Index>(j, "dim", where);
        if (c.dim < 1) config_error(where + ".dim: must be positive");
        if (j.contains("param")) c.param = get_field<double>(j, "param", where);
        return c;
    }
    require_object(j, where, {"kraus"}, {"kraus"});
    const json& ks = j.at("kraus");
    if (!ks.is_array() || ks.empty()) config_error(where + ".kraus: expected a non-empty array of matrices");
    for (std::size_t i = 0; i < ks.size(); ++i) c.kraus.push_back(matrix_from_json(ks[i], where + ".kraus[" + std::to_string(i) + "]"));
    c.dim = c.kraus.front().rows();
    return c;
}

inline json to_json(const ChannelSpec& c) {
    if (!c.builtin.empty()) return json{{"builtin", c.builtin}, {"dim", c.dim}, {"param", c.param}};
    json ks = json::array();
    for (const auto& k : c.kraus) ks.push_back(to_json(k));
    return json{{"kraus", ks}};
}

inline KrausChannel make_channel(const ChannelSpec& c) {
    if (c.builtin.empty()) return KrausChannel(c.kraus);
    if (c.builtin == "identity") return channels::identity(c.dim);
    if (c.builtin == "cyclic_shift") return channels::cyclic_shift(c.dim);
    if (c.builtin == "depolarizing") return channels::depolarizing(c.dim, c.param);
    if (c.builtin == "dephasing") return channels::dephasing(c.dim, c.param == 0.0 ? 1.0 : c.param);
    if (c.dim != 2) config_error("amplitude_damping is defined for dim 2");
    return channels::amplitude_damping(c.param);
}

inline BaseSpec base_from_json(const json& j) {
    const std::string where = "base";
    require_object(j, where, {"kind", "n", "perm", "probs", "t", "breakpoints"}, {"kind"});
    BaseSpec b;
    b.kind = get_field<std::string>(j, "kind", where);
    if (b.kind == "cycle") {
        if (j.contains("probs") || j.contains("t") || j.contains("breakpoints")) config_error("base: cycle takes 'n' or 'perm'");
        if (j.contains("perm")) {
            b.perm = get_field<std::vector<std::size_t>>(j, "perm", where);
        } else {
            const auto n = j.contains("n") ? get_field<std::size_t>(j, "n", where) : std::size_t{1};
            if (n == 0) config_error("base.n: must be positive");
            for (std::size_t l = 0; l < n; ++l) b.perm.push_back((l + 1) % n);
        }
    } else if (b.kind == "iid") {
        if (j.contains("n") || j.contains("perm") || j.contains("t") || j.contains("breakpoints"))
            config_error("base: iid takes 'probs' only");
        b.probs = get_field<std::vector<double>>(j, "probs", where);
    } else if (b.kind == "rotation") {
        if (j.contains("n") || j.contains("perm") || j.contains("probs")) config_error("base: rotation takes 't' and 'breakpoints'");
        b.t = get_field<double>(j, "t", where);
        b.breakpoints = get_field<std::vector<double>>(j, "breakpoints", where);
    } else {
        config_error("base.kind: expected cycle, iid or rotation");
    }
    return b;
}

inline json to_json(const BaseSpec& b) {
    if (b.kind == "cycle") return json{{"kind", "cycle"}, {"perm", b.perm}};
    if (b.kind == "iid") return json{{"kind", "iid"}, {"probs", b.probs}};
    return json{{"kind", "rotation"}, {"t", b.t}, {"breakpoints", b.breakpoints}};
}

// 1-based line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, col] = line_column(text, offset);
        config_error("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
    }
}

inline ProcessConfig config_from_json(const json& j) {
    require_object(j, "config",
                   {"name", "dim", "base", "channels", "assignment", "tolerances", "seed", "horizon", "samples", "n_avg",
                    "n_max", "analyses"},
                   {"channels"});
    ProcessConfig c;
    if (j.contains("name")) c.name = get_field<std::string>(j, "name", "config");
    c.base = j.contains("base") ? base_from_json(j.at("base")) : BaseSpec{"cycle", {0}, {}, 0.0, {}};
    const json& chans = j.at("channels");
    if (!chans.is_array() || chans.empty()) config_error("config.channels: expected a non-empty array");
    for (std::size_t i = 0; i < chans.size(); ++i) c.channels.push_back(channel_from_json(chans[i], "channels[" + std::to_string(i) + "]"));
    c.dim = j.contains("dim") ? get_field<Index>(j, "dim", "config") : c.channels.front().dim;
    for (const auto& ch : c.channels)
        if (ch.dim != c.dim) config_error("config: every channel must act on dimension " + std::to_string(c.dim));
    if (j.contains("assignment")) {
        c.assignment = get_field<std::vector<std::size_t>>(j, "assignment", "config");
    } else {
        const std::size_t count = c.base.kind == "cycle" ? c.base.perm.size()
                                  : c.base.kind == "iid" ? c.base.probs.size()
                                                         : c.base.breakpoints.size() - 1;
        for (std::size_t l = 0; l < count; ++l) c.assignment.push_back(c.channels.size() == 1 ? 0 : l);
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        require_object(t, "tolerances", {"tol"});
        if (t.contains("tol")) c.tolerances.tol = positive_field(t, "tol", "tolerances");
    }
    if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j, "seed", "config");
    if (j.contains("horizon")) c.horizon = get_field<std::size_t>(j, "horizon", "config");
    if (j.contains("samples")) c.samples = get_field<std::size_t>(j, "samples", "config");
    if (j.contains("n_avg")) c.n_avg = get_field<std::size_t>(j, "n_avg", "config");
    if (j.contains("n_max")) c.n_max = get_field<std::size_t>(j, "n_max", "config");
    if (c.horizon == 0 || c.n_avg == 0) config_error("config: horizon and n_avg must be positive");
    if (j.contains("analyses")) {
        c.analyses = get_field<std::vector<std::string>>(j, "analyses", "config");
        for (const auto& a : c.analyses)
            if (!known_analyses().count(a)) config_error("config.analyses: unknown analysis '" + a + "'");
    }
    return c;
}

inline ProcessConfig parse_config(const std::string& text) { return config_from_json(parse_json_text(text)); }

inline json to_json(const ProcessConfig& c) {
    json ch = json::array();
    for (const auto& x : c.channels) ch.push_back(to_json(x));
    return json{{"name", c.name},
                {"dim", c.dim},
                {"base", to_json(c.base)},
                {"channels", ch},
                {"assignment", c.assignment},
                {"tolerances", {{"tol", c.tolerances.tol}}},
                {"seed", c.seed},
                {"horizon", c.horizon},
                {"samples", c.samples},
                {"n_avg", c.n_avg},
                {"n_max", c.n_max},
                {"analyses", c.analyses}};
}

// Errors from process validation are reported as configuration errors.
inline ProcessInstance build_process(const ProcessConfig& c) {
    try {
        std::vector<KrausChannel> chans;
        for (const auto& s : c.channels) chans.push_back(make_channel(s));
        Base base;
        if (c.base.kind == "cycle") {
            base = FiniteCycleBase::permutation(c.base.perm);
            if (!std::get<FiniteCycleBase>(base).is_single_cycle()) config_error("base.perm: must be a single cycle");
        } else if (c.base.kind == "iid") {
            base = IIDBase{c.base.probs};
        } else {
            base = RotationBase{c.base.t};
        }
        return make_process(std::move(base), std::move(chans), c.assignment, c.base.breakpoints);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigError) throw;
        config_error(e.what());
    }
}

} // namespace eqp::io
