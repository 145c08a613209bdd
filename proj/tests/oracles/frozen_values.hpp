#pragma once
/// Reference values frozen from the independent oracles (see freeze.cpp).

namespace frozen {

inline constexpr double kVelocityCos2Cut2K03 = 0.2938388907061662;
inline constexpr double kHessCos2Cut2Xx = 0.97970750616988012;
inline constexpr double kHessCos2Cut2Xy = 1.0791194327008924e-07;
inline constexpr double kHessCos2Cut2Xz = 4.1540844838057946e-09;
inline constexpr double kHessCos2Cut2Yy = 0.97934360031304291;
inline constexpr double kHessCos2Cut2Yz = -3.6396811490628046e-08;
inline constexpr double kHessCos2Cut2Zz = 0.97872448862982664;
inline constexpr double kBottomCurvatureCos1Cut2 = 0.99488974873602565;
inline constexpr double kLogKernel3Beta10Dx2 = -2.0611536033839632e-06;
inline constexpr double kLogKernel2Beta10Dx05 = 23.500371211118335;
inline constexpr double kContourFourPolesBeta5 = 0.11124261181608394;
inline constexpr double kContourSimpleBeta10 = -0.12692801104297249;
inline constexpr double kContourQuadrupleBeta10 = -13.327083509358843;
inline constexpr double kContourNarrowBeta100 = -81.632653061210931;
inline constexpr double kMuCos2Cut1Grid4Beta10Rho005 = 0.84384105362188522;
inline constexpr double kChiOracleCos2Cut1Grid4Beta10 = 0.02246650266737946;

}  // namespace frozen
