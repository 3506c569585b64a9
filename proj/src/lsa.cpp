#include "fracvisc/lsa.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "fracvisc/parallel.hpp"
#include "fracvisc/rng.hpp"

namespace fracvisc {

namespace {

/// Per-branch storage/loss values and their partials with respect to the
/// branch's own {E_c, tau_c, alpha, beta}.
struct BranchPartials {
    Eigen::ArrayXd storage, loss;
    Eigen::ArrayXd ds_dE, ds_dtau, ds_dalpha, ds_dbeta;
    Eigen::ArrayXd dl_dE, dl_dtau, dl_dalpha, dl_dbeta;
};

/// Closed-form derivatives of
///   E'  = E_c (z^a ca + z^(2a-b) cb) / D,
///   E'' = E_c (z^a sa + z^(2a-b) sb) / D,
///   D   = 1 + 2 z^(a-b) cab + z^(2(a-b)),  z = x tau,  L = ln z,
/// obtained from d z^p/d tau = p z^p / tau, d z^p/d a = z^p L dp/da and the
/// chain rule through the half-pi trig factors.
BranchPartials branch_partials(const BranchParams& p, const Eigen::ArrayXd& x) {
    detail::check_branch(p);
    if (!(x > 0.0).all())
        throw std::domain_error("shifted frequencies must be positive");

    const auto t = detail::branch_trig(p);
    const double h = std::numbers::pi / 2.0;
    const double a = p.alpha, b = p.beta, tau = p.tau_c, E = p.E_c;

    const Eigen::ArrayXd L = (x * tau).log();
    const Eigen::ArrayXd za = (a * L).exp();
    const Eigen::ArrayXd zab = ((a - b) * L).exp();
    const Eigen::ArrayXd z2ab = za * zab;
    const Eigen::ArrayXd zab2 = zab.square();
    const Eigen::ArrayXd D = 1.0 + 2.0 * zab * t.cos_ab + zab2;
    const Eigen::ArrayXd D2 = D.square();

    const Eigen::ArrayXd Np = za * t.cos_a + z2ab * t.cos_b;
    const Eigen::ArrayXd Npp = za * t.sin_a + z2ab * t.sin_b;

    BranchPartials out;
    out.storage = E * Np / D;
    out.loss = E * Npp / D;
    out.ds_dE = Np / D;
    out.dl_dE = Npp / D;

    const Eigen::ArrayXd dNp_dtau = (a * za * t.cos_a + (2 * a - b) * z2ab * t.cos_b) / tau;
    const Eigen::ArrayXd dNpp_dtau = (a * za * t.sin_a + (2 * a - b) * z2ab * t.sin_b) / tau;
    const Eigen::ArrayXd dD_dtau = (a - b) * 2.0 * (zab * t.cos_ab + zab2) / tau;
    out.ds_dtau = E * (dNp_dtau * D - Np * dD_dtau) / D2;
    out.dl_dtau = E * (dNpp_dtau * D - Npp * dD_dtau) / D2;

    const Eigen::ArrayXd dNp_da = za * (L * t.cos_a - h * t.sin_a) + 2.0 * L * z2ab * t.cos_b;
    const Eigen::ArrayXd dNpp_da = za * (L * t.sin_a + h * t.cos_a) + 2.0 * L * z2ab * t.sin_b;
    const Eigen::ArrayXd dD_da = 2.0 * zab * (L * t.cos_ab - h * t.sin_ab) + 2.0 * L * zab2;
    out.ds_dalpha = E * (dNp_da * D - Np * dD_da) / D2;
    out.dl_dalpha = E * (dNpp_da * D - Npp * dD_da) / D2;

    const Eigen::ArrayXd dNp_db = -z2ab * (L * t.cos_b + h * t.sin_b);
    const Eigen::ArrayXd dNpp_db = z2ab * (h * t.cos_b - L * t.sin_b);
    const Eigen::ArrayXd dD_db = 2.0 * zab * (h * t.sin_ab - L * t.cos_ab) - 2.0 * L * zab2;
    out.ds_dbeta = E * (dNp_db * D - Np * dD_db) / D2;
    out.dl_dbeta = E * (dNpp_db * D - Npp * dD_db) / D2;

    return out;
}

}  // namespace

ModelPartials model_modulus_partials(const FractionalModel& m,
                                     const Eigen::ArrayXd& x) {
    const BranchPartials b1 = branch_partials(m.branch1, x);
    const BranchPartials b2 = branch_partials(m.branch2, x);
    const int k = parameter_count(m.kind);
    const auto g = x.size();

    ModelPartials out;
    out.value.storage = b1.storage + b2.storage;
    out.value.loss = b1.loss + b2.loss;
    out.d_storage = Eigen::ArrayXXd::Zero(k, g);
    out.d_loss = Eigen::ArrayXXd::Zero(k, g);

    int i = 0;
    out.d_storage.row(i) = b1.ds_dE;
    out.d_loss.row(i++) = b1.dl_dE;
    out.d_storage.row(i) = b1.ds_dtau;
    out.d_loss.row(i++) = b1.dl_dtau;
    out.d_storage.row(i) = b1.ds_dalpha;
    out.d_loss.row(i++) = b1.dl_dalpha;
    if (m.kind == ModelKind::FmmFmg) {
        out.d_storage.row(i) = b1.ds_dbeta;
        out.d_loss.row(i++) = b1.dl_dbeta;
    }
    out.d_storage.row(i) = b2.ds_dE;
    out.d_loss.row(i++) = b2.dl_dE;
    out.d_storage.row(i) = b2.ds_dtau;
    out.d_loss.row(i++) = b2.dl_dtau;
    out.d_storage.row(i) = b2.ds_dalpha;
    out.d_loss.row(i++) = b2.dl_dalpha;
    return out;
}

Eigen::ArrayXXd local_index_curves(const FractionalModel& m,
                                   const Eigen::ArrayXd& grid,
                                   ModulusOutput output) {
    const ModelPartials p = model_modulus_partials(m, grid);
    const Eigen::VectorXd q = to_parameter_vector(m);
    const int k = static_cast<int>(q.size());

    Eigen::ArrayXd y;
    switch (output) {
        case ModulusOutput::Storage: y = p.value.storage; break;
        case ModulusOutput::Loss: y = p.value.loss; break;
        case ModulusOutput::ComplexMagnitude:
            y = (p.value.storage.square() + p.value.loss.square()).sqrt();
            break;
    }
    if ((y == 0.0).any())
        throw std::domain_error("selected modulus vanishes on the grid; "
                                "normalized indices are undefined there");

    Eigen::ArrayXXd s(k, grid.size());
    for (int i = 0; i < k; ++i) {
        if (q[i] == 0.0) {
            s.row(i).setZero();
            continue;
        }
        switch (output) {
            case ModulusOutput::Storage:
                s.row(i) = q[i] / y.transpose() * p.d_storage.row(i);
                break;
            case ModulusOutput::Loss:
                s.row(i) = q[i] / y.transpose() * p.d_loss.row(i);
                break;
            case ModulusOutput::ComplexMagnitude:
                s.row(i) = q[i] / y.transpose() *
                           (p.d_storage.row(i).square() + p.d_loss.row(i).square()).sqrt();
                break;
        }
    }
    return s;
}

Eigen::VectorXd local_indices(const FractionalModel& m, double x,
                              ModulusOutput output) {
    Eigen::ArrayXd grid(1);
    grid << x;
    return local_index_curves(m, grid, output).col(0).matrix();
}

McAveragedIndices mc_average_indices(const FractionalModel& baseline,
                                     const ParamRanges& ranges, int n_samples,
                                     const Eigen::ArrayXd& grid,
                                     ModulusOutput output, std::uint64_t seed,
                                     int threads) {
    if (n_samples < 1)
        throw std::invalid_argument("mc_average_indices requires n_samples >= 1");
    const int k = parameter_count(baseline.kind);
    if (ranges.size() != k)
        throw std::invalid_argument("ranges do not match the model kind");
    const auto g = grid.size();
    if (g < 1) throw std::invalid_argument("empty frequency grid");

    bool all_degenerate = true;
    for (int i = 0; i < k; ++i) all_degenerate &= ranges.degenerate(i);
    if (all_degenerate) {
        // A point mass has the baseline mean and no spread by definition.
        const FractionalModel m = from_parameter_vector(
            baseline.kind, ranges.mean, baseline.tau2_constrained);
        const Eigen::ArrayXXd base = local_index_curves(m, grid, output);
        McAveragedIndices out;
        const auto names = parameter_names(baseline.kind);
        const std::string oname = to_string(output);
        for (int i = 0; i < k; ++i) {
            out.mean.push_back({grid, base.row(i).transpose(), names[i], oname});
            out.stddev.push_back(
                {grid, Eigen::ArrayXd::Zero(g), names[i], oname});
        }
        return out;
    }

    std::mt19937_64 rng(seed);
    const auto draw = [&] {
        Eigen::VectorXd q(k);
        for (int i = 0; i < k; ++i)
            q[i] = ranges.degenerate(i) ? ranges.lower[i]
                                        : uniform(rng, ranges.lower[i], ranges.upper[i]);
        return q;
    };

    // All draws come from one serial stream; evaluation is embarrassingly
    // parallel per draw. Failed draws are redrawn serially afterwards so the
    // result depends on the seed only.
    std::vector<Eigen::VectorXd> draws(n_samples);
    for (auto& q : draws) q = draw();

    std::vector<Eigen::ArrayXXd> per_draw(n_samples);
    std::vector<char> ok(n_samples, 0);
    const auto evaluate = [&](long j) {
        try {
            const FractionalModel m = from_parameter_vector(
                baseline.kind, draws[j], baseline.tau2_constrained);
            per_draw[j] = local_index_curves(m, grid, output);
            ok[j] = 1;
        } catch (const std::exception&) {
            ok[j] = 0;
        }
    };
    parallel_for(n_samples, threads, evaluate);

    long rejected = 0;
    for (int j = 0; j < n_samples; ++j) {
        while (!ok[j]) {
            ++rejected;
            if (rejected > 100L * n_samples)
                throw std::runtime_error("Monte Carlo sampling keeps producing "
                                         "invalid parameter draws");
            draws[j] = draw();
            evaluate(j);
        }
    }

    Eigen::ArrayXXd sum = Eigen::ArrayXXd::Zero(k, g);
    Eigen::ArrayXXd sumsq = Eigen::ArrayXXd::Zero(k, g);
    for (int j = 0; j < n_samples; ++j) {
        sum += per_draw[j];
        sumsq += per_draw[j].square();
    }
    const Eigen::ArrayXXd mean = sum / n_samples;
    Eigen::ArrayXXd var = Eigen::ArrayXXd::Zero(k, g);
    if (n_samples > 1)
        var = ((sumsq - n_samples * mean.square()) / (n_samples - 1)).max(0.0);

    McAveragedIndices out;
    out.rejected_draws = rejected;
    const auto names = parameter_names(baseline.kind);
    const std::string oname = to_string(output);
    for (int i = 0; i < k; ++i) {
        out.mean.push_back({grid, mean.row(i).transpose(), names[i], oname});
        out.stddev.push_back({grid, var.row(i).transpose().sqrt(), names[i], oname});
    }
    return out;
}

double index_norm(const SensitivityCurve& curve, NormKind kind) {
    const auto n = curve.grid.size();
    if (n < 1 || curve.values.size() != n)
        throw std::invalid_argument("sensitivity curve grid/value size mismatch");
    if (!(curve.grid > 0.0).all())
        throw std::invalid_argument("sensitivity grid must be positive");
    if (kind == NormKind::Linf) return curve.values.abs().maxCoeff();
    if (n < 2)
        throw std::invalid_argument("L1/L2 norms need at least two grid points");
    for (Eigen::Index i = 1; i < n; ++i)
        if (!(curve.grid[i] > curve.grid[i - 1]))
            throw std::invalid_argument("sensitivity grid must be strictly ascending");

    const Eigen::ArrayXd t = curve.grid.log();
    const Eigen::ArrayXd dt = t.tail(n - 1) - t.head(n - 1);
    if (kind == NormKind::L1) {
        const Eigen::ArrayXd f = curve.values.abs();
        return (0.5 * (f.head(n - 1) + f.tail(n - 1)) * dt).sum();
    }
    const Eigen::ArrayXd f = curve.values.square();
    return std::sqrt((0.5 * (f.head(n - 1) + f.tail(n - 1)) * dt).sum());
}

std::string to_string(ModulusOutput output) {
    switch (output) {
        case ModulusOutput::Storage: return "storage";
        case ModulusOutput::Loss: return "loss";
        default: return "complex";
    }
}

ModulusOutput modulus_output_from_string(const std::string& name) {
    if (name == "storage") return ModulusOutput::Storage;
    if (name == "loss") return ModulusOutput::Loss;
    if (name == "complex") return ModulusOutput::ComplexMagnitude;
    throw std::invalid_argument("unknown modulus output: " + name);
}

}  // namespace fracvisc
