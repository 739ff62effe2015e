#pragma once

// JSON forms of subspaces, plane sets, verdicts and radial functions, and a
// byte-stable writer (sorted keys, 17 significant digits, no locale).

#include "closure.hpp"
#include "subspace.hpp"
#include "sweep.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gspine {

using nlohmann::json;

class SerializationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// {ambient_dim, dim, field, basis}; basis is row-major, entries [re] or [re, im].
template <FieldScalar S>
json to_json_value(const Subspace<S>& s)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < s.basis().rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < s.basis().cols(); ++j) {
            if constexpr (std::is_same_v<S, Real>)
                row.push_back(json::array({s.basis()(i, j)}));
            else
                row.push_back(json::array({s.basis()(i, j).real(), s.basis()(i, j).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return json{{"ambient_dim", s.ambient_dim()},
                {"dim", s.dim()},
                {"field", std::string(to_string(field_of<S>()))},
                {"basis", std::move(rows)}};
}

/// Parses a serialized subspace; the basis is re-orthonormalized (rank
/// tolerance) so hand-written inputs need only span the intended plane.
template <FieldScalar S>
Subspace<S> subspace_from_json(const json& j, int max_ambient_dim = default_max_ambient_dim)
{
    try {
        const int n = j.at("ambient_dim").get<int>();
        if (n < 1 || n > max_ambient_dim)
            throw DimensionError("subspace json: ambient_dim " + std::to_string(n) + " outside [1, " +
                                 std::to_string(max_ambient_dim) + "]");
        const std::string field = j.value("field", std::string(to_string(field_of<S>())));
        if (field != to_string(field_of<S>()))
            throw DimensionError("subspace json: field '" + field + "' does not match the requested scalar type");
        const auto& rows = j.at("basis");
        if (!rows.is_array() || static_cast<int>(rows.size()) != n)
            throw DimensionError("subspace json: basis must have ambient_dim rows");
        const int k = j.contains("dim") ? j.at("dim").get<int>() : (n > 0 ? static_cast<int>(rows[0].size()) : 0);
        Mat<S> m(n, k);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[i].size()) != k) throw DimensionError("subspace json: ragged basis rows");
            for (int c = 0; c < k; ++c) {
                const auto& e = rows[i][c];
                const double re = e.is_array() ? e.at(0).get<double>() : e.get<double>();
                const double im = e.is_array() && e.size() > 1 ? e.at(1).get<double>() : 0.0;
                if constexpr (std::is_same_v<S, Real>) {
                    if (im != 0.0) throw DimensionError("subspace json: imaginary part in a real subspace");
                    m(i, c) = re;
                } else {
                    m(i, c) = Complex(re, im);
                }
            }
        }
        Subspace<S> s = orthonormalize<S>(m);
        if (s.dim() != k) throw PreconditionError("subspace json: basis columns are linearly dependent");
        return s;
    } catch (const json::exception& e) {
        throw SerializationError(std::string("subspace json: ") + e.what());
    }
}

template <FieldScalar S>
json to_json_value(const RPlaneSet<S>& set, int d)
{
    json planes = json::array();
    for (const auto& p : set.planes()) planes.push_back(to_json_value(p));
    return json{{"r", set.r()}, {"d", d}, {"planes", std::move(planes)}};
}

template <FieldScalar S>
RPlaneSet<S> plane_set_from_json(const json& j, int max_ambient_dim = default_max_ambient_dim)
{
    std::vector<Subspace<S>> planes;
    for (const auto& p : j.at("planes")) planes.push_back(subspace_from_json<S>(p, max_ambient_dim));
    if (planes.empty()) throw PreconditionError("plane set json: no planes");
    const int r = j.value("r", planes.front().dim());
    for (const auto& p : planes)
        if (p.dim() != r || p.ambient_dim() != planes.front().ambient_dim())
            throw DimensionError("plane set json: planes disagree on r or ambient dimension");
    return RPlaneSet<S>::from_planes(planes);
}

template <FieldScalar S>
json to_json_value(const ClosureVerdict<S>& v)
{
    const auto& e = v.evidence;
    json out{{"kind", to_string(v.kind)},
             {"density", e.density},
             {"rounds", e.rounds},
             {"added_per_round", e.added_per_round},
             {"probes", e.probes},
             {"covered_by_member", e.covered_by_member},
             {"covered_by_chain", e.covered_by_chain},
             {"worst_probe_distance", e.worst_probe_distance},
             {"chain_steps", e.chain_steps},
             {"longest_chain", e.longest_chain},
             {"stability_samples", e.stability_samples},
             {"escapes", e.escapes},
             {"members_contain_core", e.members_contain_core}};
    if (v.core) out["core"] = to_json_value(*v.core);
    return out;
}

inline json to_json_value(const RadialFunction& rho)
{
    return json{{"grid_size", rho.grid_size()}, {"values", rho.values()}};
}

inline RadialFunction radial_from_json(const json& j)
{
    try {
        auto values = j.at("values").get<std::vector<double>>();
        if (j.contains("grid_size") && j.at("grid_size").get<std::size_t>() != values.size())
            throw DimensionError("radial json: grid_size does not match the number of values");
        return RadialFunction(std::move(values));
    } catch (const json::exception& e) {
        throw SerializationError(std::string("radial json: ") + e.what());
    }
}

namespace detail {

inline void write_number(std::ostream& os, double v)
{
    if (!std::isfinite(v)) throw SerializationError("non-finite number in report");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

inline void write_stable(std::ostream& os, const json& j, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: keys sorted
            if (!first) os << ",\n";
            first = false;
            os << pad << json(it.key()).dump() << ": ";
            write_stable(os, it.value(), indent, depth + 1);
        }
        os << '\n' << close << '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
        if (flat) {
            os << '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ", ";
                write_stable(os, j[i], indent, depth + 1);
            }
            os << ']';
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) os << ",\n";
            os << pad;
            write_stable(os, j[i], indent, depth + 1);
        }
        os << '\n' << close << ']';
        return;
    }
    case json::value_t::number_float:
        write_number(os, j.get<double>());
        return;
    default:
        os << j.dump();
        return;
    }
}

} // namespace detail

/// Deterministic text form: sorted keys, 17 significant digits, throws on
/// NaN or infinity.
inline std::string dump_stable(const json& j, int indent = 2)
{
    std::ostringstream os;
    detail::write_stable(os, j, indent, 0);
    os << '\n';
    return os.str();
}

} // namespace gspine
