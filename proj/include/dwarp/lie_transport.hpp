#pragma once

#include "dwarp/common.hpp"

namespace dwarp {

/// Tuning for the flow-transport Lie derivative probe. The flow step is the
/// symmetric-difference parameter in the flow time; the Jacobian step is the
/// coordinate perturbation used to differentiate the flow map.
struct LieProbeSettings {
  double flow_step = 3e-4;
  double jacobian_step = 1e-3;
  int rk4_substeps = 8;
};

/// Flow map of an autonomous vector field: RK4 integration of q' = V(q)
/// from q over flow time s.
Vector flow_map(const std::function<Vector(const Vector&)>& field, Vector q, double s,
                int substeps);

/// Max-norm residual of the numerically transported Lie derivative of a
/// metric against a target tensor, all in one coordinate chart:
///
///   L_V g ~ [ (Phi_e^* g) - (Phi_-e^* g) ] / (2 e),
///
/// with the pullbacks assembled from the RK4 flow map and its
/// finite-difference Jacobian. Independent of any frame computation; the
/// only inputs are the field and metric evaluators.
double lie_transport_residual(const std::function<Vector(const Vector&)>& field,
                              const std::function<Matrix(const Vector&)>& metric_at,
                              const Matrix& target, const Vector& q0,
                              const LieProbeSettings& settings = {});

} // namespace dwarp
