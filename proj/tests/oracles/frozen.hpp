#pragma once

// Reference values computed offline (mpmath at 30 digits / scipy ODE
// integration) and frozen here.

namespace frozen {

// P_0[τ > 2] for Brownian motion killed at ±1, full odd-mode series.
inline constexpr double kSurvivalUnitT2 = 0.10797704444410901;

// ∫ x² cos²(πx/2) dx over (−1, 1) = 1/3 − 2/π².
inline constexpr double kQedSecondMoment = 0.13069096604865779;

// Period average of the periodic variance solution of v' = 1 − 2g v,
// g = 1 + 0.5 sin(2πt): the x² limit of the default OU model.
inline constexpr double kDefaultOuSquareLimit = 0.5057766755977077;

// Mass of the cell-wise minimum of the conditioned laws at t = 1 from
// x ∈ {−0.9, 0, 0.9}, boundary ±1.
inline constexpr double kUnitConditionedC1 = 0.9512179362527245;

}  // namespace frozen
