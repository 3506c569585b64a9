#include "fracvisc/gsa.hpp"

#include <limits>
#include <stdexcept>

#include "fracvisc/parallel.hpp"
#include "fracvisc/sobol.hpp"

namespace fracvisc {

SampleMatrices make_sample_matrices(long n, int k, bool scramble,
                                    std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample matrices require n >= 1");
    if (k < 1) throw std::invalid_argument("sample matrices require k >= 1");
    const Eigen::MatrixXd u =
        scramble ? sobol_points(n, 2 * k, seed) : sobol_points(n, 2 * k);
    SampleMatrices s;
    s.a = u.leftCols(k);
    s.b = u.rightCols(k);
    s.ab.reserve(k);
    for (int i = 0; i < k; ++i) {
        s.ab.push_back(s.a);
        s.ab.back().col(i) = s.b.col(i);
    }
    return s;
}

SobolResult saltelli_indices(const GridEval& eval, const ParamRanges& ranges,
                             long n, const Eigen::ArrayXd& grid, bool scramble,
                             std::uint64_t seed, int threads) {
    if (n < 1) throw std::invalid_argument("saltelli_indices requires n >= 1");
    const int k = ranges.size();
    if (k < 1) throw std::invalid_argument("no parameters to analyze");
    const Eigen::Index g = grid.size();
    if (g < 1) throw std::invalid_argument("empty analysis grid");

    std::vector<int> active;
    for (int i = 0; i < k; ++i)
        if (!ranges.degenerate(i)) active.push_back(i);
    const int ka = static_cast<int>(active.size());

    SobolResult out;
    out.parameters = ranges.names;
    out.grid = grid;
    out.first_order = Eigen::ArrayXXd::Zero(k, g);
    out.total_order = Eigen::ArrayXXd::Zero(k, g);
    out.variance = Eigen::ArrayXd::Zero(g);
    out.zero_variance.assign(g, 0);
    out.n_base = n;

    if (ka == 0) {
        // Nothing varies: zero variance everywhere by definition.
        std::fill(out.zero_variance.begin(), out.zero_variance.end(), 1);
        return out;
    }

    const Eigen::MatrixXd unit =
        scramble ? sobol_points(n, 2 * ka, seed) : sobol_points(n, 2 * ka);

    // Full parameter row for unit coordinates u (active columns only).
    const auto map_row = [&](const double* u) {
        Eigen::VectorXd q = ranges.mean;
        for (int c = 0; c < ka; ++c) {
            const int i = active[c];
            q[i] = ranges.lower[i] + u[c] * (ranges.upper[i] - ranges.lower[i]);
        }
        return q;
    };

    // Per grid point accumulators, filled in strict row order so the result
    // is independent of the worker count.
    Eigen::ArrayXd sum_c = Eigen::ArrayXd::Zero(g);
    Eigen::ArrayXd sumsq_c = Eigen::ArrayXd::Zero(g);
    Eigen::ArrayXd min_c = Eigen::ArrayXd::Constant(g, std::numeric_limits<double>::infinity());
    Eigen::ArrayXd max_c = Eigen::ArrayXd::Constant(g, -std::numeric_limits<double>::infinity());
    Eigen::ArrayXXd acc_first = Eigen::ArrayXXd::Zero(ka, g);
    Eigen::ArrayXXd acc_total = Eigen::ArrayXXd::Zero(ka, g);

    constexpr long kBlock = 1024;
    const int lanes = ka + 2;  // f(A), f(B), f(A_B^(i)) per active column
    std::vector<Eigen::ArrayXd> fvals(static_cast<std::size_t>(kBlock) * lanes);

    for (long j0 = 0; j0 < n; j0 += kBlock) {
        const long bs = std::min(kBlock, n - j0);
        parallel_for(bs * lanes, threads, [&](long t) {
            const long j = j0 + t / lanes;
            const int lane = static_cast<int>(t % lanes);
            Eigen::VectorXd ua(ka);
            if (lane == 0) {
                for (int c = 0; c < ka; ++c) ua[c] = unit(j, c);
            } else if (lane == 1) {
                for (int c = 0; c < ka; ++c) ua[c] = unit(j, ka + c);
            } else {
                const int i = lane - 2;
                for (int c = 0; c < ka; ++c) ua[c] = unit(j, c);
                ua[i] = unit(j, ka + i);
            }
            Eigen::ArrayXd y = eval(map_row(ua.data()));
            if (y.size() != g)
                throw std::invalid_argument("model eval returned wrong grid size");
            fvals[t] = std::move(y);
        });

        for (long r = 0; r < bs; ++r) {
            const Eigen::ArrayXd& fa = fvals[r * lanes + 0];
            const Eigen::ArrayXd& fb = fvals[r * lanes + 1];
            sum_c += fa + fb;
            sumsq_c += fa.square() + fb.square();
            min_c = min_c.min(fa.min(fb));
            max_c = max_c.max(fa.max(fb));
            for (int i = 0; i < ka; ++i) {
                const Eigen::ArrayXd& fab = fvals[r * lanes + 2 + i];
                acc_first.row(i) += (fb * (fab - fa)).transpose();
                acc_total.row(i) += (fa - fab).square().transpose();
            }
        }
    }

    const double inv2n = 1.0 / (2.0 * static_cast<double>(n));
    const Eigen::ArrayXd mean = sum_c * inv2n;
    out.variance = (sumsq_c * inv2n - mean.square()).max(0.0);

    for (Eigen::Index p = 0; p < g; ++p) {
        if (min_c[p] == max_c[p]) {
            out.zero_variance[p] = 1;
            out.variance[p] = 0.0;
            continue;
        }
        const double v = out.variance[p];
        for (int i = 0; i < ka; ++i) {
            out.first_order(active[i], p) = acc_first(i, p) / static_cast<double>(n) / v;
            out.total_order(active[i], p) = acc_total(i, p) * inv2n / v;
        }
    }
    return out;
}

SobolResult model_sobol_indices(const FractionalModel& baseline,
                                const ParamRanges& ranges, long n,
                                const Eigen::ArrayXd& grid,
                                ModulusOutput output, bool scramble,
                                std::uint64_t seed, int threads) {
    if (ranges.size() != parameter_count(baseline.kind))
        throw std::invalid_argument("ranges do not match the model kind");
    const ModelKind kind = baseline.kind;
    const GridEval eval = [kind, output, &grid](const Eigen::VectorXd& q) {
        const FractionalModel m = from_parameter_vector(kind, q);
        const ModulusCurves c = model_moduli(m, grid);
        switch (output) {
            case ModulusOutput::Storage: return Eigen::ArrayXd(c.storage);
            case ModulusOutput::Loss: return Eigen::ArrayXd(c.loss);
            default:
                return Eigen::ArrayXd((c.storage.square() + c.loss.square()).sqrt());
        }
    };
    return saltelli_indices(eval, ranges, n, grid, scramble, seed, threads);
}

}  // namespace fracvisc
