#pragma once

#include "dwarp/hypersurface.hpp"

#include <nlohmann/json_fwd.hpp>
#include <optional>

namespace dwarp {

/// Residual summary of one identity check on one grid. passed compares the
/// max residual against bound = bound_constant * spacing^2; the constant is
/// reported, never buried in the check.
struct ResidualReport {
  std::string identity_name;
  double max_residual = 0.0;
  double l2_residual = 0.0;
  double spacing = 0.0;
  std::optional<double> order_estimate;
  double bound_constant = 0.0;
  double bound = 0.0;
  bool passed = false;

  nlohmann::ordered_json to_json() const;
};

/// Ambient field choice for the projection identity.
struct AmbientFieldChoice {
  enum class Kind { Conformal, CoordinateAxis } kind = Kind::Conformal;
  int axis = 0; // base chart axis for CoordinateAxis

  static AmbientFieldChoice conformal() { return {}; }
  static AmbientFieldChoice coordinate(int axis) {
    return {Kind::CoordinateAxis, axis};
  }
};

struct IdentityCheckOptions {
  int sample_nodes = 128;  // nodes sampled for pointwise residuals
  int tangent_pairs = 4;   // random g-unit tangent pairs per sampled node
  std::uint64_t seed = 1;
  AmbientFieldChoice field_choice;
  /// Overrides the per-identity default bound constant when positive.
  double bound_constant = 0.0;
};

/// Covariant-derivative and divergence forms of the tangential projection of
/// an ambient field: both sides evaluated through disjoint differentiation
/// paths (intrinsic stencil connection vs closed-form ambient connection).
ResidualReport check_covhyp_divhyp(const GraphHypersurface& surface,
                                   const IdentityCheckOptions& options = {});

/// Conformal-field forms: the symmetrized covariant form
///   sym g(nabla_V X, W) = eta g(V,W) + alpha cosh(theta) g(A V, W)
/// and the scalar divergence form div(X) = m alpha (script_H - H cosh theta).
/// Only the symmetric part of nabla X is constrained by conformality; the
/// antisymmetric part is the pullback of d(Xflat), which vanishes when the
/// potential is constant but not in general.
ResidualReport check_conformal_forms(const GraphHypersurface& surface,
                                     const IdentityCheckOptions& options = {});

/// Height flux form: div_g(rho h^2 grad_g u) = m h rho (H cosh theta -
/// script_H), flux side by the conservative stencil, curvature side by the
/// pointwise normal route.
ResidualReport check_divergence_identity(const GraphHypersurface& surface,
                                         const IdentityCheckOptions& options = {});

/// Compact integral balance: integral of (rho h H cosh theta - rho') against
/// the induced volume vanishes. Throws NonCompactBase on the plane.
ResidualReport check_integral_formula(const GraphHypersurface& surface,
                                      const IdentityCheckOptions& options = {});

/// All four checks.
std::vector<ResidualReport> check_all_identities(const GraphHypersurface& surface,
                                                 const IdentityCheckOptions& options = {});

/// Fills order estimates across a refinement sequence of reports for the
/// same identity, ordered coarse to fine.
void attach_order_estimates(std::vector<ResidualReport>& reports);

} // namespace dwarp
