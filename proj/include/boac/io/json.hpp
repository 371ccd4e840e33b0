#ifndef BOAC_IO_JSON_HPP
#define BOAC_IO_JSON_HPP

#include <cmath>
#include <initializer_list>
#include <limits>
#include <set>
#include <string>

#include <json.hpp>

#include "boac/channel/oac.hpp"
#include "boac/solver/denoise.hpp"

namespace boac
{

using Json = nlohmann::ordered_json;

/// Malformed or unsupported configuration content.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Rejects keys outside `allowed`, naming the offending section.
inline void require_known_keys(const Json& j, std::initializer_list<const char*> allowed,
                               const std::string& where)
{
    if (!j.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!ok.count(item.key())) {
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

/// Reads j[key] into out when present, with the section name in errors.
template <class T>
void read_optional(const Json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

/// Reals that may be infinite or NaN, written as the strings "inf", "-inf", "nan".
inline Json real_to_json(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    return x;
}

inline double real_from_json(const Json& j, const std::string& where)
{
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
        if (s == "nan") {
            return std::numeric_limits<double>::quiet_NaN();
        }
        throw ConfigError(where + ": expected a number or \"inf\", got '" + s + "'");
    }
    if (!j.is_number()) {
        throw ConfigError(where + ": expected a number");
    }
    return j.get<double>();
}

inline Json to_json(const CVector& v)
{
    Json re = Json::array();
    Json im = Json::array();
    for (Index i = 0; i < v.size(); ++i) {
        re.push_back(v(i).real());
        im.push_back(v(i).imag());
    }
    return Json{{"re", re}, {"im", im}};
}

inline CVector complex_vector_from_json(const Json& j)
{
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != im.size()) {
        throw ConfigError("complex vector: re and im lengths differ");
    }
    CVector v(static_cast<Index>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) {
        v(static_cast<Index>(i)) = Complex(re[i], im[i]);
    }
    return v;
}

inline Json to_json(const RVector& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

inline std::string to_string(AmplitudeModel m)
{
    return m == AmplitudeModel::Nonnegative ? "nonnegative" : "complex_phase";
}

inline Json to_json(const SolverConfig& c)
{
    return Json{{"amplitudes", to_string(c.amplitudes)},
                {"max_iterations", c.max_iterations},
                {"primal_tol", c.primal_tol},
                {"dual_tol", c.dual_tol},
                {"psd_projection_tol", c.psd_projection_tol},
                {"initial_rho", c.initial_rho},
                {"adapt_every", c.adapt_every},
                {"adapt_until", c.adapt_until},
                {"adapt_ratio", c.adapt_ratio},
                {"adapt_factor", c.adapt_factor}};
}

inline SolverConfig solver_config_from_json(const Json& j)
{
    const std::string where = "solver";
    require_known_keys(j,
                       {"amplitudes", "max_iterations", "primal_tol", "dual_tol",
                        "psd_projection_tol", "initial_rho", "adapt_every", "adapt_until",
                        "adapt_ratio", "adapt_factor"},
                       where);
    SolverConfig c;
    std::string amplitudes = to_string(c.amplitudes);
    read_optional(j, "amplitudes", amplitudes, where);
    if (amplitudes == "nonnegative") {
        c.amplitudes = AmplitudeModel::Nonnegative;
    } else if (amplitudes == "complex_phase") {
        c.amplitudes = AmplitudeModel::ComplexPhase;
    } else {
        throw ConfigError("solver.amplitudes: unknown model '" + amplitudes + "'");
    }
    read_optional(j, "max_iterations", c.max_iterations, where);
    read_optional(j, "primal_tol", c.primal_tol, where);
    read_optional(j, "dual_tol", c.dual_tol, where);
    read_optional(j, "psd_projection_tol", c.psd_projection_tol, where);
    read_optional(j, "initial_rho", c.initial_rho, where);
    read_optional(j, "adapt_every", c.adapt_every, where);
    read_optional(j, "adapt_until", c.adapt_until, where);
    read_optional(j, "adapt_ratio", c.adapt_ratio, where);
    read_optional(j, "adapt_factor", c.adapt_factor, where);
    try {
        c.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return c;
}

/// Full diagnostics of a solve, for regression snapshots.
inline Json to_json(const DenoiseSolution& s)
{
    return Json{{"x_hat", to_json(s.x_hat)},
                {"u", to_json(s.u.coefficients())},
                {"t", s.t},
                {"objective", s.objective},
                {"atomic_norm", s.atomic_norm_value},
                {"iterations", s.iterations},
                {"converged", s.converged},
                {"primal_residual", s.primal_residual},
                {"dual_residual", s.dual_residual},
                {"max_psd_violation", s.max_psd_violation}};
}

inline DenoiseSolution denoise_solution_from_json(const Json& j)
{
    DenoiseSolution s;
    s.x_hat = complex_vector_from_json(j.at("x_hat"));
    s.u = ToeplitzGenerator(complex_vector_from_json(j.at("u")));
    s.t = j.at("t").get<double>();
    s.objective = j.at("objective").get<double>();
    s.atomic_norm_value = j.at("atomic_norm").get<double>();
    s.iterations = j.at("iterations").get<int>();
    s.converged = j.at("converged").get<bool>();
    s.primal_residual = j.at("primal_residual").get<double>();
    s.dual_residual = j.at("dual_residual").get<double>();
    s.max_psd_violation = j.at("max_psd_violation").get<double>();
    return s;
}

inline Json to_json(const RoundMeasurement& rm)
{
    Json rows = Json::array();
    for (Index i = 0; i < rm.elements(); ++i) {
        rows.push_back(Json{{"v", to_json(CVector(rm.v.row(i).transpose()))},
                            {"g", to_json(RVector(rm.g_samples.row(i).transpose()))},
                            {"waveform_seed", rm.waveform_seeds[static_cast<std::size_t>(i)]},
                            {"sigma_z", rm.sigma_z(i)},
                            {"snr_db", real_to_json(rm.snr_db(i))}});
    }
    return Json{{"L", rm.grid.length()},
                {"noise", rm.noise == NoiseMode::Correlated ? "correlated" : "white"},
                {"target_snr_db", real_to_json(rm.target_snr_db)},
                {"elements", rows}};
}

inline RoundMeasurement round_measurement_from_json(const Json& j)
{
    RoundMeasurement rm;
    rm.grid = SampleGrid::with_length(j.at("L").get<Index>());
    const auto noise = j.at("noise").get<std::string>();
    rm.noise = noise == "white" ? NoiseMode::WhiteAfterInversion : NoiseMode::Correlated;
    rm.target_snr_db = real_from_json(j.at("target_snr_db"), "target_snr_db");
    const auto& rows = j.at("elements");
    const auto n = static_cast<Index>(rows.size());
    const Index l = rm.grid.length();
    rm.v.resize(n, l);
    rm.g_samples.resize(n, l);
    rm.sigma_z.resize(n);
    rm.snr_db.resize(n);
    for (Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        rm.v.row(i) = complex_vector_from_json(r.at("v")).transpose();
        const auto g = r.at("g").get<std::vector<double>>();
        rm.g_samples.row(i) = Eigen::Map<const RVector>(g.data(), l).transpose();
        rm.waveform_seeds.push_back(r.at("waveform_seed").get<std::uint64_t>());
        rm.sigma_z(i) = r.at("sigma_z").get<double>();
        rm.snr_db(i) = real_from_json(r.at("snr_db"), "snr_db");
    }
    return rm;
}

} // namespace boac

#endif
