#include "fracvisc/dataio.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracvisc/rng.hpp"

namespace fracvisc {

namespace {

constexpr const char* kCurveHeader = "omega_shifted,e_storage,e_loss";

std::string strip_cr(std::string line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
        line.pop_back();
    return line;
}

double parse_number(const std::string& field, long line_no) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end != begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end)
        throw std::invalid_argument("malformed number '" + field + "' on line " +
                                    std::to_string(line_no));
    return value;
}

}  // namespace

void validate_curve(const MasterCurve& curve) {
    const auto n = curve.omega.size();
    if (n < 2) throw std::domain_error("master curve needs at least 2 rows");
    if (curve.storage.size() != n || curve.loss.size() != n)
        throw std::domain_error("master curve columns have unequal lengths");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(curve.omega[i] > 0.0) || !(curve.storage[i] > 0.0) ||
            !(curve.loss[i] > 0.0))
            throw std::domain_error("master curve values must be positive (row " +
                                    std::to_string(i + 1) + ")");
        if (i > 0 && !(curve.omega[i] > curve.omega[i - 1]))
            throw std::domain_error(
                "master curve frequencies must be strictly ascending (row " +
                std::to_string(i + 1) + ")");
    }
}

MasterCurve load_master_curve(std::istream& in, const std::string& label) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kCurveHeader)
        throw std::invalid_argument(std::string("expected CSV header '") +
                                    kCurveHeader + "'");
    std::vector<double> x, ep, epp;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos
                                                : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos ||
            line.find(',', c2 + 1) != std::string::npos)
            throw std::invalid_argument("expected 3 comma-separated fields on line " +
                                        std::to_string(line_no));
        x.push_back(parse_number(line.substr(0, c1), line_no));
        ep.push_back(parse_number(line.substr(c1 + 1, c2 - c1 - 1), line_no));
        epp.push_back(parse_number(line.substr(c2 + 1), line_no));
    }
    MasterCurve curve;
    curve.label = label;
    curve.omega = Eigen::Map<Eigen::ArrayXd>(x.data(), x.size());
    curve.storage = Eigen::Map<Eigen::ArrayXd>(ep.data(), ep.size());
    curve.loss = Eigen::Map<Eigen::ArrayXd>(epp.data(), epp.size());
    validate_curve(curve);
    return curve;
}

MasterCurve load_master_curve_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open curve file: " + path);
    std::string label = path;
    const auto slash = label.find_last_of('/');
    if (slash != std::string::npos) label = label.substr(slash + 1);
    const auto dot = label.find_last_of('.');
    if (dot != std::string::npos) label = label.substr(0, dot);
    return load_master_curve(in, label);
}

void save_master_curve(const MasterCurve& curve, std::ostream& out) {
    validate_curve(curve);
    out << kCurveHeader << '\n';
    char buf[96];
    for (Eigen::Index i = 0; i < curve.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", curve.omega[i],
                      curve.storage[i], curve.loss[i]);
        out << buf;
    }
}

void save_master_curve_file(const MasterCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write curve file: " + path);
    save_master_curve(curve, out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing curve file: " + path);
}

MasterCurve synthesize_curve(const FractionalModel& m,
                             const Eigen::ArrayXd& grid,
                             double noise_sigma_log10, std::uint64_t seed,
                             const std::string& label) {
    if (!(noise_sigma_log10 >= 0.0))
        throw std::invalid_argument("noise level must be >= 0");
    MasterCurve curve;
    curve.label = label;
    curve.omega = grid;
    ModulusCurves values = model_moduli(m, grid);
    if (noise_sigma_log10 > 0.0) {
        std::mt19937_64 rng(seed);
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
            values.storage[i] *=
                std::pow(10.0, noise_sigma_log10 * standard_normal(rng));
            values.loss[i] *=
                std::pow(10.0, noise_sigma_log10 * standard_normal(rng));
        }
    }
    curve.storage = std::move(values.storage);
    curve.loss = std::move(values.loss);
    validate_curve(curve);
    return curve;
}

namespace {

nlohmann::json branch_to_json(const BranchParams& b) {
    return {{"E_c", b.E_c}, {"tau_c", b.tau_c}, {"alpha", b.alpha}, {"beta", b.beta}};
}

BranchParams branch_from_json(const nlohmann::json& j) {
    BranchParams b;
    b.E_c = j.at("E_c").get<double>();
    b.tau_c = j.at("tau_c").get<double>();
    b.alpha = j.at("alpha").get<double>();
    b.beta = j.at("beta").get<double>();
    return b;
}

}  // namespace

nlohmann::json model_to_json(const FractionalModel& m) {
    return {{"kind", to_string(m.kind)},
            {"branch1", branch_to_json(m.branch1)},
            {"branch2", branch_to_json(m.branch2)},
            {"tau2_constrained", m.tau2_constrained}};
}

FractionalModel model_from_json(const nlohmann::json& j) {
    FractionalModel m;
    m.kind = model_kind_from_string(j.at("kind").get<std::string>());
    m.branch1 = branch_from_json(j.at("branch1"));
    m.branch2 = branch_from_json(j.at("branch2"));
    m.tau2_constrained = j.value("tau2_constrained", false);
    validate_model(m);
    return m;
}

}  // namespace fracvisc
