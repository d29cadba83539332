#pragma once

namespace qgame {

// All absolute. Inputs are desk-scale (dim <= 64) exact-ish rationals, so tight
// tolerances catch construction bugs rather than numerical noise.
inline constexpr double kHermTol = 1e-9;      // max |A - A^dag| entry
inline constexpr double kNormTol = 1e-9;      // |sum |a_i|^2 - 1|
inline constexpr double kIsometryTol = 1e-9;  // max |U^dag U - I| entry
inline constexpr double kPayoffTol = 1e-9;    // payoff values closer than this merge
inline constexpr double kValueTol = 1e-9;     // default value/weight comparison tolerance
inline constexpr double kWeightEps = 1e-12;   // branch weights below this count as zero

}  // namespace qgame
