/*
 * Copyright 2026 The shiftweigh Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Golden values printed by tests/oracles/golden_oracle.py (mpmath, 40 digits).
// Regenerate there; never from the library.

#ifndef SHIFTWEIGH_TESTS_ORACLE_VALUES_H_
#define SHIFTWEIGH_TESTS_ORACLE_VALUES_H_

namespace oracle {

inline constexpr double kGaussSigma2Dist2 = 0.3678794411714423216;

// Hoeffding last term: B = 1, n = 2, delta = 2 / e^2.
inline constexpr double kHoeffdingSimple = 0.7071067811865475244;
// B = 2, n = 100, delta = 0.05.
inline constexpr double kHoeffding = 0.2716203031481238997;
// B = 2, C = 1, n_tr = 100, n_te = 400, delta = 0.05.
inline constexpr double kDiscrepancy = 0.55995959997100200241;
// B = 2, C = 1, |m| = 1, n_tr = n_te = 100, delta = 0.05.
inline constexpr double kThm1 = 2.0757510853914641263;

// B = 2, C = 1, C2 = 1, theta = 2, n_tr = n_te = 100, delta = 0.05.
inline constexpr double kThm2D2 = 1.7434011856934682277;
inline constexpr double kThm2CTheta = 2.0;
inline constexpr double kThm2Hoeffding = 0.95578830644766147709;
inline constexpr double kThm2Approx = 3.7345962948554085745;
inline constexpr double kThm2Total = 4.6903846013030700516;
inline constexpr double kCTheta05 = 1.6493848884661178242;

// B = 2, C = 1, Cinf = 5, s = 1, n_tr = n_te = 10^4, delta = 0.05.
inline constexpr double kThm3DInf = 0.13838340569276427508;
inline constexpr double kThm3LogArg = 72.262999670652528153;
inline constexpr double kThm3Approx = 4.6725563212198378869;
inline constexpr double kThm3Hoeffding = 0.061886940417390459289;
inline constexpr double kThm3Disc = 1.1763647635523782344;
inline constexpr double kThm3Total = 5.9108080251896065806;

// B = 4, C1 = 1, theta = 2, n_tr = n_te = 10^4, delta = 0.05.
inline constexpr double kThm4Test = 0.014802071873007983764;
inline constexpr double kThm4Regression = 0.50237728630191602222;
inline constexpr double kThm4Total = 0.51717935817492400598;

inline constexpr double kRateKmmTheta2 = 0.25;
inline constexpr double kRatePluginTheta2 = 0.15;

inline constexpr double kS1BTrue = 1501.4527021573146327;
inline constexpr double kS1NormM = 1.1384492954863643478;
inline constexpr double kS1EyTe = 0.30753518235185265812;
inline constexpr double kS2EyTe = 0.66993024124296460562;
inline constexpr double kS1ETeX = 0.59830412708122059359;

}  // namespace oracle

#endif  // SHIFTWEIGH_TESTS_ORACLE_VALUES_H_
