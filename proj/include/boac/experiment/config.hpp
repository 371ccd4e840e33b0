#ifndef BOAC_EXPERIMENT_CONFIG_HPP
#define BOAC_EXPERIMENT_CONFIG_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "boac/feel/train.hpp"
#include "boac/io/json.hpp"

namespace boac
{

inline constexpr int kConfigSchemaVersion = 1;

enum class ExperimentKind
{
    NmseVsSnrL,
    NmseVsSnrK,
    FeelBenchmark,
    LambdaCalibration,
    SolverOracleCheck,
};

inline std::string to_string(ExperimentKind k)
{
    switch (k) {
    case ExperimentKind::NmseVsSnrL:
        return "nmse_vs_snr_L";
    case ExperimentKind::NmseVsSnrK:
        return "nmse_vs_snr_K";
    case ExperimentKind::FeelBenchmark:
        return "feel_benchmark";
    case ExperimentKind::LambdaCalibration:
        return "lambda_calibration";
    case ExperimentKind::SolverOracleCheck:
        return "solver_oracle_check";
    }
    return "unknown";
}

inline ExperimentKind parse_experiment_kind(const std::string& s)
{
    for (auto k : {ExperimentKind::NmseVsSnrL, ExperimentKind::NmseVsSnrK,
                   ExperimentKind::FeelBenchmark, ExperimentKind::LambdaCalibration,
                   ExperimentKind::SolverOracleCheck}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw ConfigError("unknown experiment '" + s + "'");
}

/// Channel and measurement settings shared by the Monte Carlo experiments.
struct ChannelSettings
{
    NoiseMode noise = NoiseMode::Correlated;
    FadingModel fading = FadingModel::UnitCircle;
    /// Positive amplitudes are drawn uniformly from [low, high].
    double amplitude_low = 0.5;
    double amplitude_high = 1.5;
};

struct SweepSettings
{
    std::vector<Index> lengths;
    std::vector<int> users;
    std::vector<double> snr_db;
    int trials = 100;
    /// Cells with more failed solves than this fraction are flagged.
    double flag_failure_fraction = 0.2;
};

struct CalibrationSettings
{
    std::vector<double> scale_grid{0.25, 0.3536, 0.5, 0.7071, 1.0, 1.4142, 2.0, 2.8284, 4.0, 5.6569, 8.0};
    Index length = 65;
    int users = 5;
    std::vector<double> snr_db{10.0};
    int trials = 100;
    /// Relative NMSE spread below which the sweep is called flat.
    double flat_spread = 0.05;
};

struct OracleSettings
{
    Index length = 15;
    int users = 3;
    std::vector<double> snr_db{10.0, 20.0};
    int trials = 25;
    int grid_points = 960;
    double tolerance = 1e-2;
};

struct FeelRunSpec
{
    std::string label;
    AggregationMode mode = AggregationMode::IdealSync;
    Index length = 129;
};

struct FeelSettings
{
    std::string task = "blobs";
    BlobOptions blobs;
    Index test_per_class = 50;
    std::string idx_train_images;
    std::string idx_train_labels;
    std::string idx_test_images;
    std::string idx_test_labels;
    IdxOptions idx;
    Index hidden = 32;
    Activation activation = Activation::Tanh;
    int devices = 10;
    std::string partition = "iid";
    int shards_per_device = 2;
    int rounds = 60;
    double learning_rate = 0.5;
    double snr_db = 5.0;
    int seeds = 5;
    Index batch_size = 0;
    double gamma_margin = kDefaultGammaMargin;
    Index reuse_subset = 8;
    std::vector<FeelRunSpec> runs{
        {"ideal_sync", AggregationMode::IdealSync, 129},
        {"blind_L129", AggregationMode::BlindDelayReuse, 129},
        {"blind_L257", AggregationMode::BlindDelayReuse, 257},
        {"no_recovery", AggregationMode::NoRecovery, 129},
    };
};

struct ExperimentConfig
{
    int schema_version = kConfigSchemaVersion;
    ExperimentKind kind = ExperimentKind::NmseVsSnrL;
    std::uint64_t seed = 1;
    SolverConfig solver;
    LambdaPolicy lambda;
    ChannelSettings channel;
    SweepSettings sweep;
    CalibrationSettings calibration;
    OracleSettings oracle;
    FeelSettings feel;

    void validate() const;
};

namespace detail
{

inline std::vector<double> snr_list_from_json(const Json& j, const std::string& where)
{
    if (!j.is_array() || j.empty()) {
        throw ConfigError(where + ": expected a non-empty list");
    }
    std::vector<double> out;
    for (const auto& x : j) {
        out.push_back(real_from_json(x, where));
    }
    return out;
}

inline Json snr_list_to_json(const std::vector<double>& v)
{
    Json a = Json::array();
    for (double x : v) {
        a.push_back(real_to_json(x));
    }
    return a;
}

inline void apply_kind_defaults(ExperimentConfig& c)
{
    if (c.kind == ExperimentKind::NmseVsSnrL) {
        c.sweep.lengths = {9, 17, 33, 65, 129};
        c.sweep.users = {5};
        c.sweep.snr_db = {4, 8, 12, 16, 20};
    } else if (c.kind == ExperimentKind::NmseVsSnrK) {
        c.sweep.lengths = {129};
        c.sweep.users = {10, 20, 30, 40, 50};
        c.sweep.snr_db = {4, 8, 12, 16, 20};
    }
}

inline void require_nonempty(bool ok, const std::string& what)
{
    if (!ok) {
        throw ConfigError(what);
    }
}

} // namespace detail

inline void ExperimentConfig::validate() const
{
    using detail::require_nonempty;
    if (schema_version != kConfigSchemaVersion) {
        throw ConfigError("schema_version " + std::to_string(schema_version) +
                          " is not supported (expected " + std::to_string(kConfigSchemaVersion) +
                          ")");
    }
    try {
        solver.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    require_nonempty(lambda.scale_c > 0.0 && lambda.lambda_max > 0.0,
                     "lambda: scale_c and lambda_max must be positive");
    require_nonempty(channel.amplitude_low > 0.0 && channel.amplitude_high >= channel.amplitude_low,
                     "channel: need 0 < amplitude_low <= amplitude_high");
    auto check_snrs = [](const std::vector<double>& v, const std::string& where) {
        require_nonempty(!v.empty(), where + ": SNR list is empty");
        for (double s : v) {
            require_nonempty(std::isfinite(s) || s > 0.0, where + ": SNR must be finite or inf");
        }
    };
    auto check_length = [](Index l, const std::string& where) {
        require_nonempty(l >= 3 && l % 2 == 1, where + ": L must be odd and at least 3");
    };
    switch (kind) {
    case ExperimentKind::NmseVsSnrL:
    case ExperimentKind::NmseVsSnrK:
        require_nonempty(!sweep.lengths.empty() && !sweep.users.empty(),
                         "sweep: L and K lists must be non-empty");
        for (Index l : sweep.lengths) {
            check_length(l, "sweep");
        }
        for (int k : sweep.users) {
            require_nonempty(k >= 1, "sweep: K must be positive");
        }
        check_snrs(sweep.snr_db, "sweep");
        require_nonempty(sweep.trials >= 1, "sweep: trials must be at least 1");
        break;
    case ExperimentKind::LambdaCalibration:
        require_nonempty(!calibration.scale_grid.empty(), "calibration: scale grid is empty");
        for (double c : calibration.scale_grid) {
            require_nonempty(c > 0.0, "calibration: scale values must be positive");
        }
        check_length(calibration.length, "calibration");
        check_snrs(calibration.snr_db, "calibration");
        require_nonempty(calibration.trials >= 1 && calibration.users >= 1,
                         "calibration: trials and K must be positive");
        break;
    case ExperimentKind::SolverOracleCheck:
        check_length(oracle.length, "oracle");
        check_snrs(oracle.snr_db, "oracle");
        require_nonempty(oracle.trials >= 1 && oracle.users >= 1, "oracle: trials and K must be positive");
        require_nonempty(oracle.grid_points >= 4 * oracle.length,
                         "oracle: grid_points must be at least 4 L");
        break;
    case ExperimentKind::FeelBenchmark:
        require_nonempty(!feel.runs.empty(), "feel: runs list is empty");
        for (const auto& r : feel.runs) {
            check_length(r.length, "feel.runs");
        }
        require_nonempty(feel.rounds >= 1 && feel.seeds >= 1 && feel.devices >= 1,
                         "feel: rounds, seeds and devices must be positive");
        require_nonempty(feel.learning_rate >= 0.0, "feel: learning rate must be nonnegative");
        require_nonempty(feel.task == "blobs" || feel.task == "idx", "feel: task must be blobs or idx");
        require_nonempty(feel.partition == "iid" || feel.partition == "label_skew",
                         "feel: partition must be iid or label_skew");
        break;
    }
}

inline ExperimentConfig parse_config(const Json& j)
{
    require_known_keys(j,
                       {"schema_version", "experiment", "seed", "solver", "lambda", "channel", "sweep",
                        "calibration", "oracle", "feel"},
                       "config");
    ExperimentConfig c;
    if (!j.contains("schema_version") || !j.contains("experiment")) {
        throw ConfigError("config: schema_version and experiment are required");
    }
    read_optional(j, "schema_version", c.schema_version, "config");
    std::string kind;
    read_optional(j, "experiment", kind, "config");
    c.kind = parse_experiment_kind(kind);
    detail::apply_kind_defaults(c);
    read_optional(j, "seed", c.seed, "config");
    if (j.contains("solver")) {
        c.solver = solver_config_from_json(j.at("solver"));
    }
    if (j.contains("lambda")) {
        const auto& s = j.at("lambda");
        require_known_keys(s, {"scale_c", "lambda_max", "weighting"}, "lambda");
        read_optional(s, "scale_c", c.lambda.scale_c, "lambda");
        read_optional(s, "lambda_max", c.lambda.lambda_max, "lambda");
        std::string w = "whitened";
        read_optional(s, "weighting", w, "lambda");
        if (w == "whitened") {
            c.lambda.weighting = FitWeighting::Whitened;
        } else if (w == "unweighted") {
            c.lambda.weighting = FitWeighting::Unweighted;
        } else {
            throw ConfigError("lambda.weighting: unknown value '" + w + "'");
        }
    }
    if (j.contains("channel")) {
        const auto& s = j.at("channel");
        require_known_keys(s, {"noise", "fading", "amplitude_low", "amplitude_high"}, "channel");
        std::string noise = "correlated";
        std::string fading = "unit_circle";
        read_optional(s, "noise", noise, "channel");
        read_optional(s, "fading", fading, "channel");
        if (noise == "correlated") {
            c.channel.noise = NoiseMode::Correlated;
        } else if (noise == "white") {
            c.channel.noise = NoiseMode::WhiteAfterInversion;
        } else {
            throw ConfigError("channel.noise: unknown value '" + noise + "'");
        }
        if (fading == "unit_circle") {
            c.channel.fading = FadingModel::UnitCircle;
        } else if (fading == "rayleigh") {
            c.channel.fading = FadingModel::Rayleigh;
        } else {
            throw ConfigError("channel.fading: unknown value '" + fading + "'");
        }
        read_optional(s, "amplitude_low", c.channel.amplitude_low, "channel");
        read_optional(s, "amplitude_high", c.channel.amplitude_high, "channel");
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        require_known_keys(s, {"L", "K", "snr_db", "trials", "flag_failure_fraction"}, "sweep");
        read_optional(s, "L", c.sweep.lengths, "sweep");
        read_optional(s, "K", c.sweep.users, "sweep");
        if (s.contains("snr_db")) {
            c.sweep.snr_db = detail::snr_list_from_json(s.at("snr_db"), "sweep.snr_db");
        }
        read_optional(s, "trials", c.sweep.trials, "sweep");
        read_optional(s, "flag_failure_fraction", c.sweep.flag_failure_fraction, "sweep");
    }
    if (j.contains("calibration")) {
        const auto& s = j.at("calibration");
        require_known_keys(s, {"scale_grid", "L", "K", "snr_db", "trials", "flat_spread"}, "calibration");
        read_optional(s, "scale_grid", c.calibration.scale_grid, "calibration");
        read_optional(s, "L", c.calibration.length, "calibration");
        read_optional(s, "K", c.calibration.users, "calibration");
        if (s.contains("snr_db")) {
            c.calibration.snr_db = detail::snr_list_from_json(s.at("snr_db"), "calibration.snr_db");
        }
        read_optional(s, "trials", c.calibration.trials, "calibration");
        read_optional(s, "flat_spread", c.calibration.flat_spread, "calibration");
    }
    if (j.contains("oracle")) {
        const auto& s = j.at("oracle");
        require_known_keys(s, {"L", "K", "snr_db", "trials", "grid_points", "tolerance"}, "oracle");
        read_optional(s, "L", c.oracle.length, "oracle");
        read_optional(s, "K", c.oracle.users, "oracle");
        if (s.contains("snr_db")) {
            c.oracle.snr_db = detail::snr_list_from_json(s.at("snr_db"), "oracle.snr_db");
        }
        read_optional(s, "trials", c.oracle.trials, "oracle");
        read_optional(s, "grid_points", c.oracle.grid_points, "oracle");
        read_optional(s, "tolerance", c.oracle.tolerance, "oracle");
    }
    if (j.contains("feel")) {
        const auto& s = j.at("feel");
        const std::string w = "feel";
        require_known_keys(s,
                           {"task", "blobs", "test_per_class", "idx", "hidden", "activation", "devices",
                            "partition", "shards_per_device", "rounds", "learning_rate", "snr_db",
                            "seeds", "batch_size", "gamma_margin", "reuse_subset", "runs"},
                           w);
        auto& f = c.feel;
        read_optional(s, "task", f.task, w);
        if (s.contains("blobs")) {
            const auto& b = s.at("blobs");
            require_known_keys(b, {"dims", "classes", "per_class", "center_scale", "noise"}, "feel.blobs");
            read_optional(b, "dims", f.blobs.dims, "feel.blobs");
            read_optional(b, "classes", f.blobs.classes, "feel.blobs");
            read_optional(b, "per_class", f.blobs.per_class, "feel.blobs");
            read_optional(b, "center_scale", f.blobs.center_scale, "feel.blobs");
            read_optional(b, "noise", f.blobs.noise, "feel.blobs");
        }
        read_optional(s, "test_per_class", f.test_per_class, w);
        if (s.contains("idx")) {
            const auto& d = s.at("idx");
            require_known_keys(d, {"train_images", "train_labels", "test_images", "test_labels", "pool", "limit"},
                               "feel.idx");
            read_optional(d, "train_images", f.idx_train_images, "feel.idx");
            read_optional(d, "train_labels", f.idx_train_labels, "feel.idx");
            read_optional(d, "test_images", f.idx_test_images, "feel.idx");
            read_optional(d, "test_labels", f.idx_test_labels, "feel.idx");
            read_optional(d, "pool", f.idx.pool, "feel.idx");
            read_optional(d, "limit", f.idx.limit, "feel.idx");
        }
        read_optional(s, "hidden", f.hidden, w);
        std::string act = "tanh";
        read_optional(s, "activation", act, w);
        if (act == "tanh") {
            f.activation = Activation::Tanh;
        } else if (act == "relu") {
            f.activation = Activation::Relu;
        } else {
            throw ConfigError("feel.activation: unknown value '" + act + "'");
        }
        read_optional(s, "devices", f.devices, w);
        read_optional(s, "partition", f.partition, w);
        read_optional(s, "shards_per_device", f.shards_per_device, w);
        read_optional(s, "rounds", f.rounds, w);
        read_optional(s, "learning_rate", f.learning_rate, w);
        if (s.contains("snr_db")) {
            f.snr_db = real_from_json(s.at("snr_db"), "feel.snr_db");
        }
        read_optional(s, "seeds", f.seeds, w);
        read_optional(s, "batch_size", f.batch_size, w);
        read_optional(s, "gamma_margin", f.gamma_margin, w);
        read_optional(s, "reuse_subset", f.reuse_subset, w);
        if (s.contains("runs")) {
            f.runs.clear();
            for (const auto& r : s.at("runs")) {
                require_known_keys(r, {"label", "mode", "L"}, "feel.runs");
                FeelRunSpec spec;
                std::string mode;
                read_optional(r, "label", spec.label, "feel.runs");
                read_optional(r, "mode", mode, "feel.runs");
                read_optional(r, "L", spec.length, "feel.runs");
                try {
                    spec.mode = parse_aggregation_mode(mode);
                } catch (const DomainError& e) {
                    throw ConfigError(std::string("feel.runs: ") + e.what());
                }
                if (spec.label.empty()) {
                    spec.label = mode + "_L" + std::to_string(spec.length);
                }
                f.runs.push_back(spec);
            }
        }
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(j);
}

/// Config with every default made explicit, for run manifests. Only the
/// section read by the configured experiment is written.
inline Json to_json(const ExperimentConfig& c)
{
    Json j{
        {"schema_version", c.schema_version},
        {"experiment", to_string(c.kind)},
        {"seed", c.seed},
        {"solver", to_json(c.solver)},
        {"lambda",
         {{"scale_c", c.lambda.scale_c},
          {"lambda_max", c.lambda.lambda_max},
          {"weighting", c.lambda.weighting == FitWeighting::Whitened ? "whitened" : "unweighted"}}},
        {"channel",
         {{"noise", c.channel.noise == NoiseMode::Correlated ? "correlated" : "white"},
          {"fading", c.channel.fading == FadingModel::UnitCircle ? "unit_circle" : "rayleigh"},
          {"amplitude_low", c.channel.amplitude_low},
          {"amplitude_high", c.channel.amplitude_high}}},
    };
    switch (c.kind) {
    case ExperimentKind::NmseVsSnrL:
    case ExperimentKind::NmseVsSnrK:
        j["sweep"] = Json{{"L", c.sweep.lengths},
                          {"K", c.sweep.users},
                          {"snr_db", detail::snr_list_to_json(c.sweep.snr_db)},
                          {"trials", c.sweep.trials},
                          {"flag_failure_fraction", c.sweep.flag_failure_fraction}};
        break;
    case ExperimentKind::LambdaCalibration:
        // The failure-flag threshold is shared with the sweeps.
        j["sweep"] = Json{{"flag_failure_fraction", c.sweep.flag_failure_fraction}};
        j["calibration"] = Json{{"scale_grid", c.calibration.scale_grid},
                                {"L", c.calibration.length},
                                {"K", c.calibration.users},
                                {"snr_db", detail::snr_list_to_json(c.calibration.snr_db)},
                                {"trials", c.calibration.trials},
                                {"flat_spread", c.calibration.flat_spread}};
        break;
    case ExperimentKind::SolverOracleCheck:
        j["oracle"] = Json{{"L", c.oracle.length},
                           {"K", c.oracle.users},
                           {"snr_db", detail::snr_list_to_json(c.oracle.snr_db)},
                           {"trials", c.oracle.trials},
                           {"grid_points", c.oracle.grid_points},
                           {"tolerance", c.oracle.tolerance}};
        break;
    case ExperimentKind::FeelBenchmark: {
        Json runs = Json::array();
        for (const auto& r : c.feel.runs) {
            runs.push_back(Json{{"label", r.label}, {"mode", to_string(r.mode)}, {"L", r.length}});
        }
        const auto& f = c.feel;
        j["feel"] = Json{{"task", f.task},
                         {"blobs",
                          {{"dims", f.blobs.dims},
                           {"classes", f.blobs.classes},
                           {"per_class", f.blobs.per_class},
                           {"center_scale", f.blobs.center_scale},
                           {"noise", f.blobs.noise}}},
                         {"test_per_class", f.test_per_class},
                         {"idx",
                          {{"train_images", f.idx_train_images},
                           {"train_labels", f.idx_train_labels},
                           {"test_images", f.idx_test_images},
                           {"test_labels", f.idx_test_labels},
                           {"pool", f.idx.pool},
                           {"limit", f.idx.limit}}},
                         {"hidden", f.hidden},
                         {"activation", f.activation == Activation::Tanh ? "tanh" : "relu"},
                         {"devices", f.devices},
                         {"partition", f.partition},
                         {"shards_per_device", f.shards_per_device},
                         {"rounds", f.rounds},
                         {"learning_rate", f.learning_rate},
                         {"snr_db", real_to_json(f.snr_db)},
                         {"seeds", f.seeds},
                         {"batch_size", f.batch_size},
                         {"gamma_margin", f.gamma_margin},
                         {"reuse_subset", f.reuse_subset},
                         {"runs", runs}};
        break;
    }
    }
    return j;
}

} // namespace boac

#endif
