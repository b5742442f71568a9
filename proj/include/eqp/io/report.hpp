// report.hpp: report assembly, acceptance checks and input digests.

#pragma once

#include "eqp/io/config.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace eqp::io {

inline constexpr const char* kToolName = "eqp";
inline constexpr const char* kToolVersion = "0.1.0";

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        fail(ErrorKind::InternalInconsistency, "SHA-256 digest failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

// Digest of the canonical dump (sorted keys, no whitespace).
inline std::string digest(const json& canonical) { return sha256_hex(canonical.dump()); }

struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation;   // "<=", ">=", "=="
    bool pass = false;
};

class CheckList {
public:
    void le(const std::string& name, double value, double threshold) { add(name, value, threshold, "<=", value <= threshold); }
    void ge(const std::string& name, double value, double threshold) { add(name, value, threshold, ">=", value >= threshold); }
    void eq(const std::string& name, double value, double expected) { add(name, value, expected, "==", value == expected); }
    void truth(const std::string& name, bool ok) { add(name, ok ? 1.0 : 0.0, 1.0, "==", ok); }

    bool all_pass() const {
        for (const auto& c : checks_)
            if (!c.pass) return false;
        return true;
    }
    const std::vector<Check>& checks() const noexcept { return checks_; }

    void append(const CheckList& other, const std::string& prefix) {
        for (auto c : other.checks_) {
            c.name = prefix + c.name;
            checks_.push_back(std::move(c));
        }
    }

    json to_json() const {
        json a = json::array();
        for (const auto& c : checks_)
            a.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"relation", c.relation}, {"pass", c.pass}});
        return a;
    }

private:
    void add(const std::string& name, double value, double threshold, const char* rel, bool ok) {
        checks_.push_back({name, value, threshold, rel, ok});
    }
    std::vector<Check> checks_;
};

// Per-step series for CSV output: named columns of equal length.
struct Series {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string to_csv() const {
        std::ostringstream os;
        os << std::setprecision(17);
        for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
        os << '\n';
        for (const auto& r : rows) {
            for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
            os << '\n';
        }
        return os.str();
    }
};

struct Outcome {
    json results = json::object();
    CheckList checks;
    Series series;
};

inline json make_report(const std::string& verb, const json& canonical_input, const Outcome& out) {
    return json{{"tool", kToolName},
                {"version", kToolVersion},
                {"verb", verb},
                {"input", canonical_input},
                {"input_digest", digest(canonical_input)},
                {"results", out.results},
                {"checks", out.checks.to_json()},
                {"pass", out.checks.all_pass()}};
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) config_error("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
    out << text;
}

} // namespace eqp::io
