#include "fracvisc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "fracvisc/calibration.hpp"
#include "fracvisc/dataio.hpp"
#include "fracvisc/grid.hpp"
#include "fracvisc/gsa.hpp"
#include "fracvisc/lsa.hpp"
#include "fracvisc/model.hpp"
#include "fracvisc/parameters.hpp"

namespace fracvisc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string default_artifact_name(const std::string& command) {
    if (command == "fit") return "fit_result.json";
    if (command == "lsa") return "lsa_result.json";
    if (command == "gsa") return "gsa_result.json";
    if (command == "eval") return "eval_curve.csv";
    return "synth_curve.csv";
}

fs::path resolve(const RunConfig& cfg, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute() || cfg.config_dir.empty()) return p;
    return fs::path(cfg.config_dir) / p;
}

fs::path output_path(const RunConfig& cfg) {
    if (cfg.out_dir_override)
        return fs::path(*cfg.out_dir_override) / default_artifact_name(cfg.command);
    const std::string out =
        cfg.payload.value("out", default_artifact_name(cfg.command));
    return resolve(cfg, out);
}

std::uint64_t effective_seed(const RunConfig& cfg) {
    if (cfg.seed_override) return *cfg.seed_override;
    return cfg.payload.value("seed", std::uint64_t{1});
}

/// Staged artifact writer: contents are collected first and renamed into
/// place together, so a failing command never leaves partial outputs.
class ArtifactSet {
  public:
    void add(const fs::path& path, std::string content) {
        artifacts_.push_back({path, std::move(content)});
    }

    std::vector<fs::path> commit() {
        std::vector<fs::path> temps;
        std::vector<fs::path> finals;
        try {
            for (const auto& [path, content] : artifacts_) {
                fs::path tmp = path;
                tmp += ".tmp";
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                if (!out) throw IoError("cannot write " + tmp.string());
                out << content;
                out.flush();
                if (!out) throw IoError("failed writing " + tmp.string());
                out.close();
                temps.push_back(tmp);
            }
            for (std::size_t i = 0; i < artifacts_.size(); ++i) {
                fs::rename(temps[i], artifacts_[i].first);
                finals.push_back(artifacts_[i].first);
            }
        } catch (...) {
            std::error_code ec;
            for (const auto& t : temps) fs::remove(t, ec);
            throw;
        }
        return finals;
    }

  private:
    std::vector<std::pair<fs::path, std::string>> artifacts_;
};

const json& require_key(const json& payload, const std::string& key) {
    const auto it = payload.find(key);
    if (it == payload.end())
        throw ConfigError("config is missing required key '" + key + "'");
    return *it;
}

void require_input_file(const fs::path& p) {
    if (!fs::exists(p))
        throw ConfigError("referenced input file does not exist: " + p.string());
}

FractionalModel model_from_payload(const RunConfig& cfg) {
    const json& params = require_key(cfg.payload, "params");
    json j;
    if (params.is_string()) {
        const fs::path p = resolve(cfg, params.get<std::string>());
        require_input_file(p);
        std::ifstream in(p);
        if (!in) throw IoError("cannot open parameter file: " + p.string());
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw std::invalid_argument("invalid parameter JSON: " +
                                        std::string(e.what()));
        }
    } else if (params.is_object()) {
        j = params;
    } else {
        throw ConfigError("'params' must be a file path or an inline object");
    }
    return model_from_json(j);
}

Eigen::ArrayXd grid_from_payload(const json& payload) {
    const json g = payload.value("grid", json{{"min", 1e-8}, {"max", 1e2}, {"points", 201}});
    if (!g.is_object())
        throw ConfigError("'grid' must be an object with min/max/points");
    const double lo = g.value("min", 1e-8);
    const double hi = g.value("max", 1e2);
    const int n = g.value("points", 201);
    try {
        return log_spaced(lo, hi, n);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid grid: ") + e.what());
    }
}

std::vector<ModulusOutput> outputs_from_payload(const json& payload) {
    std::vector<ModulusOutput> outputs;
    const json names =
        payload.value("outputs", json::array({"storage", "loss", "complex"}));
    for (const auto& n : names)
        outputs.push_back(modulus_output_from_string(n.get<std::string>()));
    if (outputs.empty()) throw ConfigError("'outputs' must not be empty");
    return outputs;
}

ParamRanges ranges_from_payload(const json& payload, const FractionalModel& m) {
    const double rel_std = payload.value("rel_std", 0.05);
    ParamRanges ranges = ranges_around(m, rel_std);
    if (payload.contains("ranges")) {
        const json& explicit_ranges = payload.at("ranges");
        if (!explicit_ranges.is_object())
            throw ConfigError("'ranges' must map parameter names to [a, b]");
        for (const auto& [name, ab] : explicit_ranges.items()) {
            const auto it =
                std::find(ranges.names.begin(), ranges.names.end(), name);
            if (it == ranges.names.end())
                throw ConfigError("unknown parameter in 'ranges': " + name);
            const auto i = std::distance(ranges.names.begin(), it);
            if (!ab.is_array() || ab.size() != 2)
                throw ConfigError("range for " + name + " must be [lower, upper]");
            ranges.lower[i] = ab[0].get<double>();
            ranges.upper[i] = ab[1].get<double>();
            if (ranges.lower[i] > ranges.upper[i])
                throw ConfigError("range for " + name + " has lower > upper");
            ranges.mean[i] = 0.5 * (ranges.lower[i] + ranges.upper[i]);
        }
    }
    return ranges;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json array_to_json(const Eigen::ArrayXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

std::string curve_csv(const MasterCurve& curve) {
    std::ostringstream os;
    save_master_curve(curve, os);
    return os.str();
}

// ---- fit ----------------------------------------------------------------

int run_fit(const RunConfig& cfg, std::ostream& out) {
    const json& payload = cfg.payload;
    const fs::path data_path =
        resolve(cfg, require_key(payload, "data").get<std::string>());
    require_input_file(data_path);

    const ModelKind kind =
        model_kind_from_string(payload.value("kind", "fmm-fmg"));
    const bool constrain = payload.value("constrain_tau2", true);

    PsoConfig pso;
    pso.seed = effective_seed(cfg);
    if (payload.contains("pso")) {
        const json& p = payload.at("pso");
        pso.n_pop = p.value("n_pop", pso.n_pop);
        pso.n_iter = p.value("n_iter", pso.n_iter);
        pso.n_runs = p.value("n_runs", pso.n_runs);
        pso.inertia = p.value("inertia", pso.inertia);
        pso.cognitive = p.value("cognitive", pso.cognitive);
        pso.social = p.value("social", pso.social);
        pso.velocity_clamp = p.value("velocity_clamp", pso.velocity_clamp);
        if (p.contains("seed") && !cfg.seed_override)
            pso.seed = p.at("seed").get<std::uint64_t>();
    }

    double w1 = 0.5, w2 = 0.5;
    if (payload.contains("weights")) {
        const json& w = payload.at("weights");
        if (!w.is_array() || w.size() != 2)
            throw ConfigError("'weights' must be [w_storage, w_loss]");
        w1 = w[0].get<double>();
        w2 = w[1].get<double>();
    }

    ParamBounds bounds = default_bounds(kind, constrain);
    if (payload.contains("bounds")) {
        for (const auto& [name, lohi] : payload.at("bounds").items()) {
            const auto it =
                std::find(bounds.names.begin(), bounds.names.end(), name);
            if (it == bounds.names.end())
                throw ConfigError("unknown parameter in 'bounds': " + name);
            if (!lohi.is_array() || lohi.size() != 2)
                throw ConfigError("bounds for " + name + " must be [lower, upper]");
            const auto i = std::distance(bounds.names.begin(), it);
            bounds.lower[i] = lohi[0].get<double>();
            bounds.upper[i] = lohi[1].get<double>();
        }
    }

    const MasterCurve data = load_master_curve_file(data_path.string());
    const FitResult result =
        fit(data, kind, bounds, pso, constrain, w1, w2, cfg.threads);

    json doc;
    doc["command"] = "fit";
    doc["kind"] = to_string(kind);
    doc["tau2_constrained"] = constrain;
    doc["data_label"] = data.label;
    doc["weights"] = {w1, w2};
    doc["pso"] = {{"n_pop", pso.n_pop},         {"n_iter", pso.n_iter},
                  {"n_runs", pso.n_runs},       {"seed", pso.seed},
                  {"inertia", pso.inertia},     {"cognitive", pso.cognitive},
                  {"social", pso.social},       {"velocity_clamp", pso.velocity_clamp}};
    doc["parameters"] = result.parameter_names;
    json mean, stddev;
    for (std::size_t i = 0; i < result.parameter_names.size(); ++i) {
        mean[result.parameter_names[i]] = result.mean[static_cast<Eigen::Index>(i)];
        stddev[result.parameter_names[i]] = result.stddev[static_cast<Eigen::Index>(i)];
    }
    doc["mean"] = mean;
    doc["std"] = stddev;
    json runs = json::array();
    for (Eigen::Index r = 0; r < result.run_parameters.rows(); ++r)
        runs.push_back(vector_to_json(result.run_parameters.row(r)));
    doc["runs"] = runs;
    doc["run_costs"] = vector_to_json(result.run_costs);
    doc["best"] = model_to_json(result.best);
    doc["best_cost"] = result.best_cost;
    doc["relative_error"] = result.relative_error;

    ArtifactSet artifacts;
    const fs::path out_path = output_path(cfg);
    artifacts.add(out_path, doc.dump(2) + "\n");
    artifacts.commit();

    out << "fit: " << to_string(kind) << " on '" << data.label << "' ("
        << data.size() << " points), " << pso.n_runs << " runs\n";
    out << "  best cost " << result.best_cost << ", relative error "
        << result.relative_error << "\n";
    for (std::size_t i = 0; i < result.parameter_names.size(); ++i)
        out << "  " << result.parameter_names[i] << " = "
            << result.mean[static_cast<Eigen::Index>(i)] << " +/- "
            << result.stddev[static_cast<Eigen::Index>(i)] << "\n";
    out << "  wrote " << out_path.string() << "\n";
    return kOk;
}

// ---- lsa ----------------------------------------------------------------

json norm_entry(const SensitivityCurve& curve) {
    return {{"L1", index_norm(curve, NormKind::L1)},
            {"L2", index_norm(curve, NormKind::L2)},
            {"Linf", index_norm(curve, NormKind::Linf)}};
}

int run_lsa(const RunConfig& cfg, std::ostream& out) {
    const json& payload = cfg.payload;
    const FractionalModel model = model_from_payload(cfg);
    const ParamRanges ranges = ranges_from_payload(payload, model);
    const Eigen::ArrayXd grid = grid_from_payload(payload);
    const int n_samples = payload.value("n_samples", 2000);
    const std::uint64_t seed = effective_seed(cfg);
    const auto outputs = outputs_from_payload(payload);
    const auto names = parameter_names(model.kind);

    json doc;
    doc["command"] = "lsa";
    doc["model"] = model_to_json(model);
    doc["grid"] = array_to_json(grid);
    doc["n_samples"] = n_samples;
    doc["seed"] = seed;

    ArtifactSet artifacts;
    const fs::path out_path = output_path(cfg);
    long rejected = 0;
    for (const ModulusOutput output : outputs) {
        const McAveragedIndices mc = mc_average_indices(
            model, ranges, n_samples, grid, output, seed, cfg.threads);
        rejected += mc.rejected_draws;
        const std::string oname = to_string(output);
        for (std::size_t i = 0; i < names.size(); ++i) {
            doc["curves"][oname][names[i]] = {
                {"mean", array_to_json(mc.mean[i].values)},
                {"std", array_to_json(mc.stddev[i].values)}};
            doc["norms"][oname][names[i]] = norm_entry(mc.mean[i]);
        }
        if (payload.value("write_csv", true)) {
            std::ostringstream csv;
            csv << "omega_shifted";
            for (const auto& n : names) csv << "," << n << "_mean";
            for (const auto& n : names) csv << "," << n << "_std";
            csv << "\n";
            char buf[64];
            for (Eigen::Index p = 0; p < grid.size(); ++p) {
                std::snprintf(buf, sizeof buf, "%.17g", grid[p]);
                csv << buf;
                for (std::size_t i = 0; i < names.size(); ++i) {
                    std::snprintf(buf, sizeof buf, ",%.17g", mc.mean[i].values[p]);
                    csv << buf;
                }
                for (std::size_t i = 0; i < names.size(); ++i) {
                    std::snprintf(buf, sizeof buf, ",%.17g", mc.stddev[i].values[p]);
                    csv << buf;
                }
                csv << "\n";
            }
            fs::path csv_path = out_path;
            csv_path.replace_extension("");
            csv_path += "_" + oname + ".csv";
            artifacts.add(csv_path, csv.str());
        }
    }
    doc["rejected_draws"] = rejected;
    artifacts.add(out_path, doc.dump(2) + "\n");
    const auto written = artifacts.commit();

    out << "lsa: " << to_string(model.kind) << ", " << n_samples
        << " Monte Carlo samples over " << grid.size() << " grid points\n";
    for (const auto& p : written) out << "  wrote " << p.string() << "\n";
    return kOk;
}

// ---- gsa ----------------------------------------------------------------

int run_gsa(const RunConfig& cfg, std::ostream& out) {
    const json& payload = cfg.payload;
    const FractionalModel model = model_from_payload(cfg);
    const ParamRanges ranges = ranges_from_payload(payload, model);
    const Eigen::ArrayXd grid = grid_from_payload(payload);
    const long n_base = payload.value("n_base", 16384L);
    const bool scramble = payload.value("scramble", false);
    const std::uint64_t seed = effective_seed(cfg);
    const auto outputs = outputs_from_payload(payload);
    const auto names = parameter_names(model.kind);

    json doc;
    doc["command"] = "gsa";
    doc["model"] = model_to_json(model);
    doc["grid"] = array_to_json(grid);
    doc["n_base"] = n_base;
    doc["scramble"] = scramble;
    doc["seed"] = seed;

    ArtifactSet artifacts;
    const fs::path out_path = output_path(cfg);
    for (const ModulusOutput output : outputs) {
        const SobolResult r = model_sobol_indices(model, ranges, n_base, grid,
                                                  output, scramble, seed,
                                                  cfg.threads);
        const std::string oname = to_string(output);
        for (std::size_t i = 0; i < names.size(); ++i) {
            const Eigen::ArrayXd first = r.first_order.row(i).transpose();
            const Eigen::ArrayXd total = r.total_order.row(i).transpose();
            doc["curves"][oname][names[i]] = {{"first_order", array_to_json(first)},
                                              {"total_order", array_to_json(total)}};
            const SensitivityCurve fc{grid, first, names[i], oname};
            const SensitivityCurve tc{grid, total, names[i], oname};
            doc["norms"][oname][names[i]] = {{"first", norm_entry(fc)},
                                             {"total", norm_entry(tc)}};
        }
        doc["variance"][oname] = array_to_json(r.variance);
        doc["zero_variance"][oname] =
            std::vector<int>(r.zero_variance.begin(), r.zero_variance.end());
        if (payload.value("write_csv", true)) {
            std::ostringstream csv;
            csv << "omega_shifted";
            for (const auto& n : names) csv << "," << n << "_S1";
            for (const auto& n : names) csv << "," << n << "_ST";
            csv << "\n";
            char buf[64];
            for (Eigen::Index p = 0; p < grid.size(); ++p) {
                std::snprintf(buf, sizeof buf, "%.17g", grid[p]);
                csv << buf;
                for (std::size_t i = 0; i < names.size(); ++i) {
                    std::snprintf(buf, sizeof buf, ",%.17g", r.first_order(i, p));
                    csv << buf;
                }
                for (std::size_t i = 0; i < names.size(); ++i) {
                    std::snprintf(buf, sizeof buf, ",%.17g", r.total_order(i, p));
                    csv << buf;
                }
                csv << "\n";
            }
            fs::path csv_path = out_path;
            csv_path.replace_extension("");
            csv_path += "_" + oname + ".csv";
            artifacts.add(csv_path, csv.str());
        }
    }
    artifacts.add(out_path, doc.dump(2) + "\n");
    const auto written = artifacts.commit();

    out << "gsa: " << to_string(model.kind) << ", N = " << n_base << " ("
        << grid.size() << " grid points)\n";
    for (const auto& p : written) out << "  wrote " << p.string() << "\n";
    return kOk;
}

// ---- eval / synth -------------------------------------------------------

int run_eval(const RunConfig& cfg, std::ostream& out) {
    const FractionalModel model = model_from_payload(cfg);
    const Eigen::ArrayXd grid = grid_from_payload(cfg.payload);
    const MasterCurve curve = synthesize_curve(
        model, grid, 0.0, 0, cfg.payload.value("label", "model"));
    ArtifactSet artifacts;
    const fs::path out_path = output_path(cfg);
    artifacts.add(out_path, curve_csv(curve));
    artifacts.commit();
    out << "eval: " << grid.size() << " points, wrote " << out_path.string()
        << "\n";
    return kOk;
}

int run_synth(const RunConfig& cfg, std::ostream& out) {
    const FractionalModel model = model_from_payload(cfg);
    const Eigen::ArrayXd grid = grid_from_payload(cfg.payload);
    const double noise = cfg.payload.value("noise_sigma_log10", 0.0);
    const std::uint64_t seed = effective_seed(cfg);
    const MasterCurve curve = synthesize_curve(
        model, grid, noise, seed, cfg.payload.value("label", "synthetic"));
    ArtifactSet artifacts;
    const fs::path out_path = output_path(cfg);
    artifacts.add(out_path, curve_csv(curve));
    artifacts.commit();
    out << "synth: " << grid.size() << " points, noise " << noise
        << ", wrote " << out_path.string() << "\n";
    return kOk;
}

}  // namespace

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (!cfg.payload.is_object())
            throw ConfigError("config payload must be a JSON object");
        if (cfg.threads < 1) throw ConfigError("--threads must be >= 1");
        if (cfg.command == "fit") return run_fit(cfg, out);
        if (cfg.command == "lsa") return run_lsa(cfg, out);
        if (cfg.command == "gsa") return run_gsa(cfg, out);
        if (cfg.command == "eval") return run_eval(cfg, out);
        if (cfg.command == "synth") return run_synth(cfg, out);
        throw ConfigError("unknown command: " + cfg.command);
    } catch (const ConfigError& e) {
        err << "error: config: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        err << "error: io: " << e.what() << "\n";
        return kIoError;
    } catch (const fs::filesystem_error& e) {
        err << "error: io: " << e.what() << "\n";
        return kIoError;
    } catch (const json::exception& e) {
        err << "error: config: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::domain_error& e) {
        err << "error: domain: " << e.what() << "\n";
        return kDomainError;
    } catch (const std::invalid_argument& e) {
        err << "error: domain: " << e.what() << "\n";
        return kDomainError;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return kInternalError;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"two-branch fractional viscoelastic model toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    int threads = 1;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out", out_dir, "directory for the output artifacts");
        sub->add_option("--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);
    };
    for (const char* name : {"fit", "lsa", "gsa", "eval", "synth"})
        add_common(app.add_subcommand(name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return kOk;
        }
        err << "error: config: " << e.what() << "\n";
        return kConfigError;
    }

    RunConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.seed_override = seed;
    cfg.out_dir_override = out_dir;
    cfg.threads = threads;

    std::error_code ec;
    if (!fs::exists(config_path, ec)) {
        err << "error: config: config file does not exist: " << config_path
            << "\n";
        return kConfigError;
    }
    std::ifstream in(config_path);
    if (!in) {
        err << "error: io: cannot open config file: " << config_path << "\n";
        return kIoError;
    }
    try {
        in >> cfg.payload;
    } catch (const json::exception& e) {
        err << "error: config: invalid config JSON: " << e.what() << "\n";
        return kConfigError;
    }
    cfg.config_dir = fs::path(config_path).parent_path().string();
    return dispatch(cfg, out, err);
}

}  // namespace fracvisc::cli
