#include "fracvisc/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "fracvisc/parallel.hpp"
#include "fracvisc/rng.hpp"

namespace fracvisc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::ArrayXd log10_array(const Eigen::ArrayXd& a) {
    return a.log() / std::numbers::ln10;
}

/// Deterministic bounded Nelder-Mead used to polish each run's swarm
/// incumbent. The swarm locates the valley of the optimum quickly but crawls
/// along it; a short simplex descent finishes the job at a negligible share
/// of the evaluation budget.
Eigen::VectorXd simplex_polish(
    const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int max_iter) {
    const int n = static_cast<int>(x0.size());
    const auto clamp_pt = [&](Eigen::VectorXd p) {
        for (int i = 0; i < n; ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
        return p;
    };
    std::vector<Eigen::VectorXd> pts(n + 1, clamp_pt(std::move(x0)));
    std::vector<double> fv(n + 1);
    for (int i = 0; i < n; ++i) {
        double step = 0.05 * (hi[i] - lo[i]);
        double moved = std::clamp(pts[i + 1][i] + step, lo[i], hi[i]);
        if (moved == pts[i + 1][i])
            moved = std::clamp(pts[i + 1][i] - step, lo[i], hi[i]);
        pts[i + 1][i] = moved;
    }
    for (int i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    std::vector<int> idx(n + 1);
    for (int it = 0; it < max_iter; ++it) {
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return fv[a] < fv[b]; });
        {
            std::vector<Eigen::VectorXd> sp(n + 1);
            std::vector<double> sf(n + 1);
            for (int i = 0; i <= n; ++i) {
                sp[i] = pts[idx[i]];
                sf[i] = fv[idx[i]];
            }
            pts.swap(sp);
            fv.swap(sf);
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += pts[i];
        centroid /= n;

        const Eigen::VectorXd xr = clamp_pt(centroid + (centroid - pts[n]));
        const double fr = f(xr);
        if (fr < fv[0]) {
            const Eigen::VectorXd xe =
                clamp_pt(centroid + 2.0 * (centroid - pts[n]));
            const double fe = f(xe);
            if (fe < fr) {
                pts[n] = xe;
                fv[n] = fe;
            } else {
                pts[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            pts[n] = xr;
            fv[n] = fr;
        } else {
            const Eigen::VectorXd xc =
                clamp_pt(centroid + 0.5 * (pts[n] - centroid));
            const double fc = f(xc);
            if (fc < fv[n]) {
                pts[n] = xc;
                fv[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    pts[i] = clamp_pt(pts[0] + 0.5 * (pts[i] - pts[0]));
                    fv[i] = f(pts[i]);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    return pts[best];
}

constexpr int kPolishIterations = 2000;

/// Non-throwing cost for the optimizer: invalid parameter points and
/// non-positive model values map to +infinity.
double guarded_cost(const FractionalModel& m, const Eigen::ArrayXd& omega,
                    const Eigen::ArrayXd& log10_storage_exp,
                    const Eigen::ArrayXd& log10_loss_exp, double w1, double w2) {
    for (const BranchParams* b : {&m.branch1, &m.branch2}) {
        if (!(b->tau_c > 0.0) || !(b->E_c >= 0.0) || b->alpha == b->beta ||
            !std::isfinite(b->tau_c))
            return kInf;
    }
    const ModulusCurves c = model_moduli(m, omega);
    if (!(c.storage > 0.0).all() || !(c.loss > 0.0).all() ||
        !c.storage.isFinite().all() || !c.loss.isFinite().all())
        return kInf;
    const double f1 = (log10_storage_exp - log10_array(c.storage)).square().sum();
    const double f2 = (log10_loss_exp - log10_array(c.loss)).square().sum();
    return w1 * f1 + w2 * f2;
}

}  // namespace

std::vector<std::string> free_parameter_names(ModelKind kind,
                                              bool constrain_tau2) {
    std::vector<std::string> names = parameter_names(kind);
    if (constrain_tau2)
        names.erase(std::find(names.begin(), names.end(), "tau_c2"));
    return names;
}

ParamBounds default_bounds(ModelKind kind, bool constrain_tau2) {
    ParamBounds b;
    b.names = free_parameter_names(kind, constrain_tau2);
    const int k = static_cast<int>(b.names.size());
    b.lower.resize(k);
    b.upper.resize(k);
    for (int i = 0; i < k; ++i) {
        const std::string& name = b.names[i];
        if (name == "E_c1") {
            b.lower[i] = 0.0;
            b.upper[i] = 1e4;
        } else if (name == "E_c2") {
            b.lower[i] = 0.0;
            b.upper[i] = 1e3;
        } else if (name == "tau_c1" || name == "tau_c2") {
            b.lower[i] = 1e-3;
            b.upper[i] = 1e2;
        } else {  // exponents
            b.lower[i] = 0.0;
            b.upper[i] = 1.0;
        }
    }
    return b;
}

FractionalModel model_from_free_vector(ModelKind kind, const Eigen::VectorXd& q,
                                       bool constrain_tau2) {
    if (!constrain_tau2) return from_parameter_vector(kind, q);
    const int k = parameter_count(kind);
    if (q.size() != k - 1)
        throw std::invalid_argument("free parameter vector has wrong dimension");
    Eigen::VectorXd full(k);
    const int tau2_pos = k - 2;  // canonical order puts tau_c2 second to last
    full.head(tau2_pos) = q.head(tau2_pos);
    full[k - 1] = q[k - 2];  // alpha2
    const double E_c1 = full[0], tau1 = full[1], E_c2 = full[tau2_pos - 1];
    full[tau2_pos] = (E_c1 > 0.0 && E_c2 > 0.0 && tau1 > 0.0)
                         ? constrained_tau2(tau1, E_c1, E_c2)
                         : std::numeric_limits<double>::quiet_NaN();
    FractionalModel m = from_parameter_vector(kind, full);
    m.tau2_constrained = true;
    return m;
}

double cost(const FractionalModel& m, const MasterCurve& data, double w1,
            double w2) {
    validate_curve(data);
    if (!(w1 >= 0.0) || !(w2 >= 0.0))
        throw std::invalid_argument("cost weights must be non-negative");
    const ModulusCurves c = model_moduli(m, data.omega);
    if (!(c.storage > 0.0).all() || !(c.loss > 0.0).all())
        throw std::domain_error(
            "model produced a non-positive modulus; log residual undefined");
    const double f1 = (log10_array(data.storage) - log10_array(c.storage)).square().sum();
    const double f2 = (log10_array(data.loss) - log10_array(c.loss)).square().sum();
    return w1 * f1 + w2 * f2;
}

double relative_error(const FractionalModel& m, const MasterCurve& data,
                      double w1, double w2) {
    const double num = cost(m, data, w1, w2);
    const double denom = w1 * log10_array(data.storage).square().sum() +
                         w2 * log10_array(data.loss).square().sum();
    if (denom == 0.0)
        throw std::domain_error("relative error undefined: zero log-magnitude data");
    return num / denom;
}

FitResult fit(const MasterCurve& data, ModelKind kind, const ParamBounds& bounds,
              const PsoConfig& cfg, bool constrain_tau2, double w1, double w2,
              int threads) {
    validate_curve(data);
    const int dim = bounds.size();
    if (dim == 0) throw std::invalid_argument("empty parameter bounds");
    if (bounds.upper.size() != dim)
        throw std::invalid_argument("bound vectors have unequal lengths");
    if ((bounds.lower.array() > bounds.upper.array()).any())
        throw std::invalid_argument("lower bound exceeds upper bound");
    const int expected = static_cast<int>(free_parameter_names(kind, constrain_tau2).size());
    if (dim != expected)
        throw std::invalid_argument("bounds do not match the search dimension");
    if (cfg.n_pop < 2 || cfg.n_iter < 1 || cfg.n_runs < 1)
        throw std::invalid_argument("invalid PSO configuration");
    const double decades =
        std::log10(data.omega[data.size() - 1] / data.omega[0]);
    if (!(decades >= 2.0))
        throw std::invalid_argument(
            "master curve must span at least two decades of frequency");

    const Eigen::ArrayXd log10_storage_exp = log10_array(data.storage);
    const Eigen::ArrayXd log10_loss_exp = log10_array(data.loss);
    const auto evaluate = [&](const Eigen::VectorXd& q) {
        return guarded_cost(model_from_free_vector(kind, q, constrain_tau2),
                            data.omega, log10_storage_exp, log10_loss_exp, w1, w2);
    };

    const Eigen::ArrayXd width = (bounds.upper - bounds.lower).array();
    const Eigen::ArrayXd vmax = cfg.velocity_clamp * width;

    const int n_full = parameter_count(kind);
    FitResult result;
    result.parameter_names = parameter_names(kind);
    result.run_parameters.resize(cfg.n_runs, n_full);
    result.run_costs.resize(cfg.n_runs);
    result.incumbent_trace.resize(cfg.n_runs, cfg.n_iter + 1);
    double best_cost = kInf;
    Eigen::VectorXd best_q;

    for (int run = 0; run < cfg.n_runs; ++run) {
        std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(run));

        Eigen::MatrixXd pos(dim, cfg.n_pop);
        Eigen::MatrixXd vel(dim, cfg.n_pop);
        for (int p = 0; p < cfg.n_pop; ++p) {
            for (int d = 0; d < dim; ++d)
                pos(d, p) = uniform(rng, bounds.lower[d], bounds.upper[d]);
            for (int d = 0; d < dim; ++d)
                vel(d, p) = uniform(rng, -vmax[d], vmax[d]);
        }

        Eigen::VectorXd costs(cfg.n_pop);
        parallel_for(cfg.n_pop, threads,
                     [&](long p) { costs[p] = evaluate(pos.col(p)); });

        Eigen::MatrixXd pbest = pos;
        Eigen::VectorXd pbest_cost = costs;
        int g = 0;
        for (int p = 1; p < cfg.n_pop; ++p)
            if (pbest_cost[p] < pbest_cost[g]) g = p;
        Eigen::VectorXd gbest = pbest.col(g);
        double gbest_cost = pbest_cost[g];
        result.incumbent_trace(run, 0) = gbest_cost;

        for (int it = 0; it < cfg.n_iter; ++it) {
            for (int p = 0; p < cfg.n_pop; ++p) {
                for (int d = 0; d < dim; ++d) {
                    const double r1 = uniform01(rng);
                    const double r2 = uniform01(rng);
                    double v = cfg.inertia * vel(d, p) +
                               cfg.cognitive * r1 * (pbest(d, p) - pos(d, p)) +
                               cfg.social * r2 * (gbest[d] - pos(d, p));
                    v = std::clamp(v, -vmax[d], vmax[d]);
                    double x = pos(d, p) + v;
                    if (x < bounds.lower[d]) {
                        x = bounds.lower[d];
                        v = 0.0;
                    } else if (x > bounds.upper[d]) {
                        x = bounds.upper[d];
                        v = 0.0;
                    }
                    vel(d, p) = v;
                    pos(d, p) = x;
                }
            }
            parallel_for(cfg.n_pop, threads,
                         [&](long p) { costs[p] = evaluate(pos.col(p)); });
            for (int p = 0; p < cfg.n_pop; ++p) {
                if (costs[p] < pbest_cost[p]) {
                    pbest_cost[p] = costs[p];
                    pbest.col(p) = pos.col(p);
                }
                if (costs[p] < gbest_cost) {
                    gbest_cost = costs[p];
                    gbest = pos.col(p);
                }
            }
            result.incumbent_trace(run, it + 1) = gbest_cost;
        }

        if (std::isfinite(gbest_cost)) {
            const Eigen::VectorXd polished = simplex_polish(
                evaluate, gbest, bounds.lower, bounds.upper, kPolishIterations);
            const double polished_cost = evaluate(polished);
            if (polished_cost <= gbest_cost) {
                gbest = polished;
                gbest_cost = polished_cost;
            }
        }
        const FractionalModel run_model =
            canonical_form(model_from_free_vector(kind, gbest, constrain_tau2));
        result.run_parameters.row(run) = to_parameter_vector(run_model);
        result.run_costs[run] = gbest_cost;
        if (gbest_cost < best_cost) {
            best_cost = gbest_cost;
            best_q = gbest;
        }
    }

    result.mean = result.run_parameters.colwise().mean();
    if (cfg.n_runs > 1) {
        const Eigen::MatrixXd centered =
            result.run_parameters.rowwise() - result.mean.transpose();
        result.stddev =
            (centered.array().square().colwise().sum() / (cfg.n_runs - 1.0))
                .sqrt();
    } else {
        result.stddev = Eigen::VectorXd::Zero(n_full);
    }
    result.best = canonical_form(model_from_free_vector(kind, best_q, constrain_tau2));
    result.best_cost = best_cost;
    result.relative_error = relative_error(result.best, data, w1, w2);
    return result;
}

}  // namespace fracvisc
