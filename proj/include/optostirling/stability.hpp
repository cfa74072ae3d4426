#pragma once

#include "optostirling/cavity.hpp"
#include "optostirling/mech.hpp"
#include "optostirling/params.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>

namespace optostirling {

// Linear drift over the ordered basis (a, a^dagger, b, b^dagger), omega_m = 1.
struct DriftMatrix {
    Eigen::Matrix4cd entries;
};

enum class RegimeClass { Valid, NonAdiabatic, Unstable, Degenerate };

std::string to_string(RegimeClass r);
RegimeClass regime_from_string(const std::string& s);

DriftMatrix drift_matrix(const PhysicalParams& p, const EffectiveCavity& eff);
std::array<cplx, 4> drift_eigenvalues(const DriftMatrix& m);
double max_real_eigenvalue(const DriftMatrix& m);
bool is_stable(const DriftMatrix& m, double margin = 0.0);

// Classification plus the mechanical fields when they exist.
struct PointEvaluation {
    RegimeClass regime = RegimeClass::Degenerate;
    double kappa_eff = 0.0;
    bool has_fields = false;
    MechanicalEffective mech;
};

PointEvaluation evaluate_point(const PhysicalParams& p, const FeedbackParams& fb, double margin = 0.0,
                               const Constants& c = {});

RegimeClass regime_classify(const PhysicalParams& p, const FeedbackParams& fb, double margin = 0.0);

}  // namespace optostirling
