#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sysscale/soc.hpp"
#include "sysscale/workload.hpp"

namespace sysscale {

enum class AnchorKind {
    /// 1 - P(lowest level) / P(top level), compute pinned at the level clocks.
    SocPowerReduction,
    /// Memory-controller dynamic power, lowest level over top level.
    McDynamicRatio,
    /// Memory-subsystem power with unoptimized registers over optimized,
    /// at the lowest level with the interface saturated.
    MrcPowerRatio,
};

const char *to_string(AnchorKind k);
AnchorKind anchor_kind_from_string(const std::string &s);

struct Anchor {
    std::string name;
    AnchorKind kind = AnchorKind::SocPowerReduction;
    double target = 0.0;
    double tolerance = 0.01;   ///< relative
    WorkloadTrace trace;       ///< SocPowerReduction only
};

/// The fit multiplies every coefficient in `free_coefficients` by one
/// common scale searched over [scale_min, scale_max].
struct CalibrationTargets {
    std::vector<Anchor> anchors;
    std::vector<std::string> free_coefficients;
    double scale_min = 1e-2;
    double scale_max = 1e2;
};

/// Profiles referenced by anchors resolve relative to the targets file.
CalibrationTargets load_targets(const std::string &path);

struct AnchorResidual {
    std::string name;
    double target = 0.0;
    double achieved = 0.0;
    double relative_error = 0.0;
    bool within_tolerance = false;
};

struct FitResult {
    PowerCoefficients coefficients;
    double scale = 1.0;
    std::vector<AnchorResidual> residuals;
};

double evaluate_anchor(const Anchor &a, const SocConfig &cfg);
std::vector<AnchorResidual> anchor_residuals(const CalibrationTargets &t,
                                             const SocConfig &cfg);

/// Scales the named coefficients. Throws LookupError on an unknown name.
PowerCoefficients scale_coefficients(const PowerCoefficients &c,
                                     const std::vector<std::string> &names,
                                     double s);

/// Deterministic log-grid plus golden-section least-squares fit. Returns the
/// seed unchanged when it already meets every anchor; throws FitError
/// listing the residuals when the best fit misses one.
FitResult calibrate_coefficients(const CalibrationTargets &targets,
                                 const SocConfig &seed);

std::string fit_to_json(const FitResult &r);

} // namespace sysscale
