#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace fracvisc {

/// Which two-branch arrangement a model represents. A gel branch keeps its
/// second exponent pinned at zero; the general branch leaves it free.
enum class ModelKind { FmgFmg, FmmFmg };

/// One fractional Maxwell branch: two spring-pots in series, expressed through
/// the equivalent characteristic modulus / time-scale parameterization.
///
/// The quasi-properties (V, G) of the underlying spring-pots relate to these
/// fields as E_c = (G^alpha / V^beta)^(1/(alpha-beta)) and
/// tau_c = (V/G)^(1/(alpha-beta)); only (E_c, tau_c, alpha, beta) are stored.
template <typename Scalar>
struct BranchParamsT {
    Scalar E_c{};    ///< characteristic modulus [MPa], >= 0
    Scalar tau_c{};  ///< characteristic time [s], > 0
    Scalar alpha{};  ///< first power exponent, in [0, 1]
    Scalar beta{};   ///< second power exponent, in [0, 1]; 0 for a gel branch
};
using BranchParams = BranchParamsT<double>;

template <typename Scalar>
struct FractionalModelT {
    BranchParamsT<Scalar> branch1;
    BranchParamsT<Scalar> branch2;
    ModelKind kind = ModelKind::FmmFmg;
    bool tau2_constrained = false;
};
using FractionalModel = FractionalModelT<double>;

/// Two-state / two-timescale (TS2) shift-factor parameters. Describes the
/// glass transition as a crossover between two Arrhenius regimes.
template <typename Scalar>
struct Ts2ParamsT {
    Scalar E1{};         ///< low-temperature activation energy [J/mol]
    Scalar E2{};         ///< high-temperature activation energy [J/mol]
    Scalar dS_over_R{};  ///< dimensionless transition entropy
    Scalar T_star{};     ///< transition temperature [K], > 0
    Scalar T_ref{};      ///< reference temperature of the shifts [K], > 0
    Scalar R{8.314462618};  ///< gas constant [J/(mol K)]
};
using Ts2Params = Ts2ParamsT<double>;

/// Bulk medium properties entering the dimensionless phononic number.
struct MediumProps {
    double rho{};     ///< density [kg/m^3], > 0
    double length{};  ///< characteristic morphology length [m], > 0
};

template <typename Scalar>
struct ModulusPair {
    Scalar storage{};
    Scalar loss{};
};

/// Storage/loss modulus samples over a frequency grid.
struct ModulusCurves {
    Eigen::ArrayXd storage;
    Eigen::ArrayXd loss;
};

namespace detail {

/// Frequency-independent pieces of one branch evaluation.
template <typename Scalar>
struct BranchTrig {
    Scalar cos_a, sin_a;    // cos/sin(pi*alpha/2)
    Scalar cos_b, sin_b;    // cos/sin(pi*beta/2)
    Scalar cos_ab, sin_ab;  // cos/sin(pi*(alpha-beta)/2)
};

template <typename Scalar>
BranchTrig<Scalar> branch_trig(const BranchParamsT<Scalar>& p) {
    const Scalar h = std::numbers::pi_v<Scalar> / Scalar(2);
    return {std::cos(h * p.alpha),
            std::sin(h * p.alpha),
            std::cos(h * p.beta),
            std::sin(h * p.beta),
            std::cos(h * (p.alpha - p.beta)),
            std::sin(h * (p.alpha - p.beta))};
}

template <typename Scalar>
void check_branch(const BranchParamsT<Scalar>& p) {
    if (!(p.tau_c > Scalar(0)))
        throw std::domain_error("branch time-scale must be positive");
    if (!(p.E_c >= Scalar(0)))
        throw std::domain_error("branch modulus must be non-negative");
    if (p.alpha == p.beta)
        throw std::domain_error(
            "degenerate branch exponents: alpha == beta leaves the "
            "characteristic modulus and time-scale undefined");
}

}  // namespace detail

/// Storage and loss modulus of a single fractional branch at shifted angular
/// frequency x [rad/s]: the real and imaginary parts of
/// E* = E_c (i z)^a / (1 + (i z)^(a-b)) with z = x tau_c,
///
///   E'/E_c  = (z^a cos(pi a/2) + z^(2a-b) cos(pi b/2)) / D
///   E''/E_c = (z^a sin(pi a/2) + z^(2a-b) sin(pi b/2)) / D
///   D       = 1 + 2 z^(a-b) cos(pi (a-b)/2) + z^(2(a-b)).
///
/// Throws std::domain_error for x <= 0, tau_c <= 0, or alpha == beta.
template <typename Scalar>
ModulusPair<Scalar> branch_moduli(const BranchParamsT<Scalar>& p, Scalar x) {
    detail::check_branch(p);
    if (!(x > Scalar(0)))
        throw std::domain_error("shifted frequency must be positive");

    const auto t = detail::branch_trig(p);
    const Scalar log_z = std::log(x * p.tau_c);
    const Scalar za = std::exp(p.alpha * log_z);
    const Scalar zab = std::exp((p.alpha - p.beta) * log_z);
    const Scalar z2ab = za * zab;  // z^(2 alpha - beta)
    const Scalar denom = Scalar(1) + Scalar(2) * zab * t.cos_ab + zab * zab;

    return {p.E_c * (za * t.cos_a + z2ab * t.cos_b) / denom,
            p.E_c * (za * t.sin_a + z2ab * t.sin_b) / denom};
}

/// Grid form of branch_moduli.
ModulusCurves branch_moduli(const BranchParams& p, const Eigen::ArrayXd& x);

/// Equivalent storage/loss moduli of the two-branch model: the component-wise
/// sum of branch_moduli over both branches.
template <typename Scalar>
ModulusPair<Scalar> model_moduli(const FractionalModelT<Scalar>& m, Scalar x) {
    const auto a = branch_moduli(m.branch1, x);
    const auto b = branch_moduli(m.branch2, x);
    return {a.storage + b.storage, a.loss + b.loss};
}

/// Grid form of model_moduli.
ModulusCurves model_moduli(const FractionalModel& m, const Eigen::ArrayXd& x);

/// Natural log of the TS2 shift factor, ln a_T = ln(tau[T]/tau[T_ref]),
/// evaluated as g(T) - g(T_ref) with
///   g(T) = E1/(R T) + (E2-E1)/(R T) / (1 + exp(dS/R (1 - T*/T))).
template <typename Scalar>
Scalar ts2_log_shift(const Ts2ParamsT<Scalar>& p, Scalar T) {
    if (!(p.T_star > Scalar(0)) || !(p.T_ref > Scalar(0)))
        throw std::domain_error("TS2 temperatures must be positive");
    if (!(T > Scalar(0)))
        throw std::domain_error("temperature must be positive");
    const auto g = [&p](Scalar temp) {
        const Scalar sigmoid =
            Scalar(1) /
            (Scalar(1) + std::exp(p.dS_over_R * (Scalar(1) - p.T_star / temp)));
        return p.E1 / (p.R * temp) + (p.E2 - p.E1) / (p.R * temp) * sigmoid;
    };
    return g(T) - g(p.T_ref);
}

/// Second-branch time-scale implied by equating the dimensionless phononic
/// number across branches: tau_2 = tau_1 sqrt(E_1/E_2).
template <typename Scalar>
Scalar constrained_tau2(Scalar tau1, Scalar E_c1, Scalar E_c2) {
    if (!(tau1 > Scalar(0)) || !(E_c1 > Scalar(0)) || !(E_c2 > Scalar(0)))
        throw std::domain_error("constrained_tau2 requires positive inputs");
    return tau1 * std::sqrt(E_c1 / E_c2);
}

/// Dimensionless number N_P = L / (c tau_c) with the one-dimensional speed of
/// sound c = sqrt(E_c/rho). The modulus is given in MPa and converted to Pa.
double pi_number(const MediumProps& med, double E_c_mpa, double tau_c);

/// The branch law is symmetric in its exponents: swapping alpha and beta in
/// E* = E_c (i z)^a / (1 + (i z)^(a-b)) multiplies numerator and denominator
/// by (i z)^(b-a), leaving E* unchanged. canonical_form returns the
/// beta <= alpha representative of the first branch so that fitted
/// parameters are reported in a single orientation.
FractionalModel canonical_form(FractionalModel m);

/// Throws if the model violates its structural invariants (gel branches must
/// have beta == 0; a constrained tau_2 must match constrained_tau2 to a
/// relative 1e-12).
template <typename Scalar>
void validate_model(const FractionalModelT<Scalar>& m) {
    if (m.kind == ModelKind::FmgFmg && m.branch1.beta != Scalar(0))
        throw std::invalid_argument("gel-gel model requires branch1.beta == 0");
    if (m.branch2.beta != Scalar(0))
        throw std::invalid_argument("second branch must be a gel (beta == 0)");
    if (m.tau2_constrained) {
        const Scalar want =
            constrained_tau2(m.branch1.tau_c, m.branch1.E_c, m.branch2.E_c);
        if (std::abs(m.branch2.tau_c - want) > Scalar(1e-12) * std::abs(want))
            throw std::invalid_argument(
                "tau2_constrained is set but branch2.tau_c does not satisfy "
                "the time-scale constraint");
    }
}

/// Display string for a model kind ("fmg-fmg" / "fmm-fmg").
std::string to_string(ModelKind kind);
/// Parse of to_string; throws std::invalid_argument on unknown names.
ModelKind model_kind_from_string(const std::string& name);

}  // namespace fracvisc
