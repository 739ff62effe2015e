#pragma once

// Experiment configuration.  Files are TOML (the subset below) or JSON; both
// are read into one JSON value and then validated by a single path, so the
// two formats accept exactly the same keys.
//
// TOML subset: `# comments`, `[table]` headers (one level), `key = value`
// with strings, integers, floats, booleans and flat arrays of those.

#include "../closure.hpp"
#include "../subspace.hpp"
#include "../sweep.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gspine::lab {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Dims {
    int r = 0;
    int d = 0;
    int n = 0;

    friend bool operator==(const Dims&, const Dims&) = default;
};

struct SweepParams {
    int grid_size = default_grid_size;
    double tol = 1e-6;
    int max_iter = 500;
};

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 7;
    std::optional<Dims> dims;  // unset: the experiment's own default
    ClosureParams closure{};
    SweepParams sweep{};
    int trials = 0;    // 0: the experiment's own default
    int seeds = 0;     // number of consecutive seeds for multi-seed experiments; 0: default
    Tolerances tolerances{};
    int max_ambient_dim = default_max_ambient_dim;
    std::string output_dir = "gspine-out";
    bool parallel = false;
};

namespace detail {

class TomlReader {
public:
    explicit TomlReader(std::string text) : text_(std::move(text)) {}

    json parse()
    {
        json root = json::object();
        json* table = &root;
        std::istringstream in(text_);
        std::string line;
        while (std::getline(in, line)) {
            ++line_no_;
            line_ = strip_comment(line);
            pos_ = 0;
            skip_ws();
            if (done()) continue;
            if (peek() == '[') {
                ++pos_;
                const std::string name = bare_key();
                expect(']');
                expect_end();
                if (root.contains(name)) fail("table [" + name + "] defined twice");
                root[name] = json::object();
                table = &root[name];
                continue;
            }
            const std::string key = peek() == '"' ? string_value() : bare_key();
            expect('=');
            json value = parse_value();
            expect_end();
            if (table->contains(key)) fail("duplicate key '" + key + "'");
            (*table)[key] = std::move(value);
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError("toml line " + std::to_string(line_no_) + ": " + what);
    }

    static std::string strip_comment(const std::string& s)
    {
        bool quoted = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
            if (s[i] == '#' && !quoted) return s.substr(0, i);
        }
        return s;
    }

    bool done() const { return pos_ >= line_.size(); }
    char peek() const { return done() ? '\0' : line_[pos_]; }

    void skip_ws()
    {
        while (!done() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    }

    void expect(char c)
    {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
        skip_ws();
    }

    void expect_end()
    {
        skip_ws();
        if (!done()) fail("unexpected trailing text '" + line_.substr(pos_) + "'");
    }

    std::string bare_key()
    {
        skip_ws();
        const std::size_t start = pos_;
        while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
        if (pos_ == start) fail("expected a key");
        std::string key = line_.substr(start, pos_ - start);
        skip_ws();
        return key;
    }

    std::string string_value()
    {
        ++pos_;  // opening quote
        std::string out;
        while (!done() && peek() != '"') {
            char c = line_[pos_++];
            if (c == '\\') {
                if (done()) fail("dangling escape");
                const char e = line_[pos_++];
                switch (e) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case '\\': c = '\\'; break;
                case '"': c = '"'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
            }
            out.push_back(c);
        }
        if (done()) fail("unterminated string");
        ++pos_;
        skip_ws();
        return out;
    }

    json parse_value()
    {
        skip_ws();
        if (done()) fail("missing value");
        if (peek() == '"') return string_value();
        if (peek() == '[') {
            ++pos_;
            json arr = json::array();
            skip_ws();
            while (peek() != ']') {
                arr.push_back(parse_value());
                skip_ws();
                if (peek() == ',') {
                    ++pos_;
                    skip_ws();
                } else if (peek() != ']') {
                    fail("expected ',' or ']' in array");
                }
            }
            ++pos_;
            skip_ws();
            return arr;
        }
        const std::size_t start = pos_;
        while (!done() && peek() != ',' && peek() != ']' && !std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
        std::string tok = line_.substr(start, pos_ - start);
        skip_ws();
        if (tok == "true") return true;
        if (tok == "false") return false;
        std::erase(tok, '_');
        const bool is_float = tok.find_first_of(".eE") != std::string::npos || tok == "inf" || tok == "nan";
        if (is_float) {
            double v = 0.0;
            const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size()) fail("bad number '" + tok + "'");
            return v;
        }
        if (!tok.empty() && tok[0] == '-') {
            std::int64_t v = 0;
            const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size()) fail("bad integer '" + tok + "'");
            return v;
        }
        std::uint64_t v = 0;
        const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size()) fail("bad value '" + tok + "'");
        return v;
    }

    std::string text_;
    std::string line_;
    std::size_t pos_ = 0;
    int line_no_ = 0;
};

template <class T>
void read_into(const json& table, const char* key, T& out)
{
    if (!table.contains(key)) return;
    try {
        out = table.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config: key '") + key + "' has the wrong type");
    }
}

inline void reject_unknown(const json& table, std::initializer_list<const char*> known, const std::string& where)
{
    for (auto it = table.begin(); it != table.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
    }
}

} // namespace detail

inline json parse_toml(const std::string& text)
{
    return detail::TomlReader(text).parse();
}

inline Dims parse_dims(const std::string& text)
{
    Dims d;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> d.r >> c1 >> d.d >> c2 >> d.n) || c1 != ',' || c2 != ',' || !(in >> std::ws).eof())
        throw ConfigError("dims: expected r,d,n (got '" + text + "')");
    return d;
}

/// Applies the keys present in `j` on top of `cfg`.
inline void apply_config(const json& j, ExperimentConfig& cfg)
{
    if (!j.is_object()) throw ConfigError("config: top level must be a table");
    detail::reject_unknown(j,
                           {"experiment", "seed", "dims", "closure", "sweep", "trials", "seeds", "tolerances",
                            "max_ambient_dim", "output_dir", "parallel"},
                           "top level");
    detail::read_into(j, "experiment", cfg.experiment);
    detail::read_into(j, "seed", cfg.seed);
    detail::read_into(j, "trials", cfg.trials);
    detail::read_into(j, "seeds", cfg.seeds);
    detail::read_into(j, "max_ambient_dim", cfg.max_ambient_dim);
    detail::read_into(j, "output_dir", cfg.output_dir);
    detail::read_into(j, "parallel", cfg.parallel);

    if (j.contains("dims")) {
        const json& d = j.at("dims");
        Dims dims;
        if (d.is_array() && d.size() == 3) {
            dims = {d[0].get<int>(), d[1].get<int>(), d[2].get<int>()};
        } else if (d.is_object()) {
            detail::reject_unknown(d, {"r", "d", "n"}, "[dims]");
            if (!d.contains("r") || !d.contains("d") || !d.contains("n"))
                throw ConfigError("config: [dims] needs r, d and n");
            detail::read_into(d, "r", dims.r);
            detail::read_into(d, "d", dims.d);
            detail::read_into(d, "n", dims.n);
        } else if (d.is_string()) {
            dims = parse_dims(d.get<std::string>());
        } else {
            throw ConfigError("config: dims must be [r, d, n], a table or \"r,d,n\"");
        }
        cfg.dims = dims;
    }
    if (j.contains("closure")) {
        const json& c = j.at("closure");
        detail::reject_unknown(c,
                               {"pair_budget", "pi_samples_per_pair", "stability_rounds", "size_cap", "max_rounds",
                                "eps", "probe_count", "stability_samples", "chain_probes"},
                               "[closure]");
        detail::read_into(c, "pair_budget", cfg.closure.pair_budget);
        detail::read_into(c, "pi_samples_per_pair", cfg.closure.pi_samples_per_pair);
        detail::read_into(c, "stability_rounds", cfg.closure.stability_rounds);
        detail::read_into(c, "size_cap", cfg.closure.size_cap);
        detail::read_into(c, "max_rounds", cfg.closure.max_rounds);
        detail::read_into(c, "eps", cfg.closure.classify.eps);
        detail::read_into(c, "probe_count", cfg.closure.classify.probe_count);
        detail::read_into(c, "stability_samples", cfg.closure.classify.stability_samples);
        detail::read_into(c, "chain_probes", cfg.closure.classify.chain_probes);
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        detail::reject_unknown(s, {"grid_size", "tol", "max_iter"}, "[sweep]");
        detail::read_into(s, "grid_size", cfg.sweep.grid_size);
        detail::read_into(s, "tol", cfg.sweep.tol);
        detail::read_into(s, "max_iter", cfg.sweep.max_iter);
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        detail::reject_unknown(t, {"rank", "intersection", "equality", "containment", "orthonormal"}, "[tolerances]");
        detail::read_into(t, "rank", cfg.tolerances.rank);
        detail::read_into(t, "intersection", cfg.tolerances.intersection);
        detail::read_into(t, "equality", cfg.tolerances.equality);
        detail::read_into(t, "containment", cfg.tolerances.containment);
        detail::read_into(t, "orthonormal", cfg.tolerances.orthonormal);
    }
}

/// Reads a .toml or .json file (decided by extension; anything else is
/// tried as JSON first, then TOML).
inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {})
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto ends_with = [&](const char* ext) {
        const std::string e(ext);
        return path.size() >= e.size() && path.compare(path.size() - e.size(), e.size(), e) == 0;
    };
    json j;
    if (ends_with(".toml")) {
        j = parse_toml(text);
    } else if (ends_with(".json")) {
        j = json::parse(text, nullptr, false);
        if (j.is_discarded()) throw ConfigError("config: '" + path + "' is not valid JSON");
    } else {
        j = json::parse(text, nullptr, false);
        if (j.is_discarded()) j = parse_toml(text);
    }
    apply_config(j, base);
    return base;
}

inline json config_echo(const ExperimentConfig& cfg)
{
    json out{{"experiment", cfg.experiment},
             {"seed", cfg.seed},
             {"trials", cfg.trials},
             {"seeds", cfg.seeds},
             {"max_ambient_dim", cfg.max_ambient_dim},
             {"closure",
              {{"pair_budget", cfg.closure.pair_budget},
               {"pi_samples_per_pair", cfg.closure.pi_samples_per_pair},
               {"stability_rounds", cfg.closure.stability_rounds},
               {"size_cap", cfg.closure.size_cap},
               {"max_rounds", cfg.closure.max_rounds},
               {"eps", cfg.closure.classify.eps},
               {"probe_count", cfg.closure.classify.probe_count},
               {"stability_samples", cfg.closure.classify.stability_samples},
               {"chain_probes", cfg.closure.classify.chain_probes}}},
             {"sweep", {{"grid_size", cfg.sweep.grid_size}, {"tol", cfg.sweep.tol}, {"max_iter", cfg.sweep.max_iter}}},
             {"tolerances",
              {{"rank", cfg.tolerances.rank},
               {"intersection", cfg.tolerances.intersection},
               {"equality", cfg.tolerances.equality},
               {"containment", cfg.tolerances.containment},
               {"orthonormal", cfg.tolerances.orthonormal}}}};
    if (cfg.dims) out["dims"] = {{"r", cfg.dims->r}, {"d", cfg.dims->d}, {"n", cfg.dims->n}};
    return out;
}

} // namespace gspine::lab
