#pragma once
// Plumbing shared by the command-line tool and its tests: flat key=value
// config files, resolved-config headers, and fixed-precision number
// formatting.  Numbers are always printed through fmt15() so that a given
// config and seed produce byte-identical output files.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace opentj {

// Thrown when a computation runs but fails a numerical gate (residual above
// tolerance, unmatched spectrum level, non-convergence).  The CLI maps this
// to exit code 2; plain std::invalid_argument / runtime validation errors
// map to exit code 1.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 15 significant digits, '.' decimal point, no grouping.
inline std::string fmt15(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return std::string(buf);
}

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Key/value store with three layers of precedence: defaults set by the
// subcommand, then a config file, then command-line flags.  Every key that
// a command actually consults is recorded with its final value, and that
// record becomes the resolved-config header embedded in each output file.
class ConfigBag {
  public:
    void set_default(const std::string& key, const std::string& val) {
        if (!kv_.count(key)) kv_[key] = val;
    }
    void set(const std::string& key, const std::string& val) { kv_[key] = val; }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open config file: " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            " is not key = value: " + line);
            std::string key = trim(line.substr(0, eq));
            std::string val = trim(line.substr(eq + 1));
            if (key.empty())
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            " has an empty key");
            kv_[key] = val;
        }
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_str(const std::string& key, const std::string& dflt) {
        std::string v = kv_.count(key) ? kv_.at(key) : dflt;
        resolved_[key] = v;
        return v;
    }

    double get_double(const std::string& key, double dflt) {
        if (!kv_.count(key)) {
            resolved_[key] = fmt15(dflt);
            return dflt;
        }
        const std::string& s = kv_.at(key);
        size_t pos = 0;
        double v;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("config key '" + key + "' is not a number: " + s);
        }
        if (trim(s.substr(pos)).size())
            throw std::invalid_argument("config key '" + key + "' is not a number: " + s);
        resolved_[key] = fmt15(v);
        return v;
    }

    long get_int(const std::string& key, long dflt) {
        if (!kv_.count(key)) {
            resolved_[key] = std::to_string(dflt);
            return dflt;
        }
        const std::string& s = kv_.at(key);
        size_t pos = 0;
        long v;
        try {
            v = std::stol(s, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("config key '" + key + "' is not an integer: " + s);
        }
        if (trim(s.substr(pos)).size())
            throw std::invalid_argument("config key '" + key + "' is not an integer: " + s);
        resolved_[key] = std::to_string(v);
        return v;
    }

    bool get_bool(const std::string& key, bool dflt) {
        if (!kv_.count(key)) {
            resolved_[key] = dflt ? "true" : "false";
            return dflt;
        }
        std::string s = kv_.at(key);
        for (auto& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
        bool v;
        if (s == "true" || s == "1" || s == "yes") v = true;
        else if (s == "false" || s == "0" || s == "no") v = false;
        else throw std::invalid_argument("config key '" + key + "' is not a boolean: " + s);
        resolved_[key] = v ? "true" : "false";
        return v;
    }

    // Comma-separated integer list, e.g. "4,6,8,10".
    std::vector<long> get_int_list(const std::string& key, const std::string& dflt) {
        std::string s = kv_.count(key) ? kv_.at(key) : dflt;
        std::vector<long> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            size_t pos = 0;
            long v = std::stol(item, &pos);
            if (trim(item.substr(pos)).size())
                throw std::invalid_argument("config key '" + key +
                                            "' has a non-integer entry: " + item);
            out.push_back(v);
        }
        if (out.empty())
            throw std::invalid_argument("config key '" + key + "' is an empty list");
        std::string canon;
        for (size_t i = 0; i < out.size(); ++i)
            canon += (i ? "," : "") + std::to_string(out[i]);
        resolved_[key] = canon;
        return out;
    }

    // Sorted (by std::map) key = value lines of everything this run consulted.
    const std::map<std::string, std::string>& resolved() const { return resolved_; }

    std::string header_csv() const {
        std::string h;
        for (const auto& [k, v] : resolved_) h += "# " + k + " = " + v + "\n";
        return h;
    }

  private:
    std::map<std::string, std::string> kv_;
    std::map<std::string, std::string> resolved_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << content;
    if (!out) throw std::invalid_argument("failed writing output file: " + path);
}

} // namespace opentj
