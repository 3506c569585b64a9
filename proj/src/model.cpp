#include "fracvisc/model.hpp"

#include <utility>

namespace fracvisc {

ModulusCurves branch_moduli(const BranchParams& p, const Eigen::ArrayXd& x) {
    detail::check_branch(p);
    if (x.size() == 0) return {Eigen::ArrayXd(0), Eigen::ArrayXd(0)};
    if (!(x > 0.0).all())
        throw std::domain_error("shifted frequencies must be positive");

    const auto t = detail::branch_trig(p);
    const Eigen::ArrayXd log_z = (x * p.tau_c).log();
    const Eigen::ArrayXd za = (p.alpha * log_z).exp();
    const Eigen::ArrayXd zab = ((p.alpha - p.beta) * log_z).exp();
    const Eigen::ArrayXd z2ab = za * zab;
    const Eigen::ArrayXd denom = 1.0 + 2.0 * zab * t.cos_ab + zab.square();

    return {p.E_c * (za * t.cos_a + z2ab * t.cos_b) / denom,
            p.E_c * (za * t.sin_a + z2ab * t.sin_b) / denom};
}

ModulusCurves model_moduli(const FractionalModel& m, const Eigen::ArrayXd& x) {
    ModulusCurves a = branch_moduli(m.branch1, x);
    const ModulusCurves b = branch_moduli(m.branch2, x);
    a.storage += b.storage;
    a.loss += b.loss;
    return a;
}

double pi_number(const MediumProps& med, double E_c_mpa, double tau_c) {
    if (!(med.rho > 0.0) || !(med.length > 0.0))
        throw std::domain_error("medium density and length must be positive");
    if (!(E_c_mpa > 0.0) || !(tau_c > 0.0))
        throw std::domain_error("pi_number requires positive modulus and time-scale");
    const double E_pa = E_c_mpa * 1e6;
    return med.length * std::sqrt(med.rho / E_pa) / tau_c;
}

FractionalModel canonical_form(FractionalModel m) {
    if (m.branch1.beta > m.branch1.alpha)
        std::swap(m.branch1.alpha, m.branch1.beta);
    return m;
}

std::string to_string(ModelKind kind) {
    return kind == ModelKind::FmgFmg ? "fmg-fmg" : "fmm-fmg";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "fmg-fmg") return ModelKind::FmgFmg;
    if (name == "fmm-fmg") return ModelKind::FmmFmg;
    throw std::invalid_argument("unknown model kind: " + name);
}

}  // namespace fracvisc
