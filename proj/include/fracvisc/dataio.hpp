#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "fracvisc/model.hpp"

namespace fracvisc {

/// A pre-shifted master curve: paired storage/loss modulus samples over a
/// strictly ascending, positive shifted-frequency grid (>= 2 points).
struct MasterCurve {
    Eigen::ArrayXd omega;    ///< shifted angular frequency a_T * w [rad/s]
    Eigen::ArrayXd storage;  ///< storage modulus samples [MPa], > 0
    Eigen::ArrayXd loss;     ///< loss modulus samples [MPa], > 0
    std::string label;

    Eigen::Index size() const { return omega.size(); }
};

/// Throws if the curve violates its invariants (lengths, ordering, signs).
void validate_curve(const MasterCurve& curve);

/// Reads a curve from CSV with the mandatory header
/// `omega_shifted,e_storage,e_loss`. Rows must already be sorted; violations
/// are reported, never repaired. Throws std::invalid_argument for malformed
/// text and std::domain_error for value violations.
MasterCurve load_master_curve(std::istream& in, const std::string& label = "");
MasterCurve load_master_curve_file(const std::string& path);

/// Writes the same CSV; values carry 17 significant digits so a load of the
/// output reproduces the curve bit-identically.
void save_master_curve(const MasterCurve& curve, std::ostream& out);
void save_master_curve_file(const MasterCurve& curve, const std::string& path);

/// Model-generated curve with independent multiplicative log-normal noise per
/// point and channel: each modulus is scaled by 10^eps with
/// eps ~ Normal(0, noise_sigma_log10). Deterministic per seed.
MasterCurve synthesize_curve(const FractionalModel& m,
                             const Eigen::ArrayXd& grid,
                             double noise_sigma_log10, std::uint64_t seed,
                             const std::string& label = "synthetic");

/// Parameter JSON: keys `kind`, `branch1{E_c,tau_c,alpha,beta}`,
/// `branch2{...}`, `tau2_constrained`. Reading validates model invariants.
nlohmann::json model_to_json(const FractionalModel& m);
FractionalModel model_from_json(const nlohmann::json& j);

}  // namespace fracvisc
