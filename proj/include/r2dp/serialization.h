//
// Copyright 2026 The R2DP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Text forms of distributions, mechanisms and calibration records.
//
// Distribution:  gamma(k=2, theta=1)        trunc_gaussian(mu=0, sigma=1, a=0, b=inf)
// Combination:   0.5*gamma(k=2, theta=1) + 0.5*uniform(a=0, b=2)
// Mechanism:     laplace(b=1)  staircase(epsilon=1, sensitivity=1, gamma=0.3)
//                gaussian(sigma=2)  randomized_response(p=0.75)  or a combination
//
// Numbers are written in shortest round-trip form, so Parse(Format(x)) == x.

#ifndef R2DP_SERIALIZATION_H_
#define R2DP_SERIALIZATION_H_

#include <iosfwd>
#include <string>
#include <string_view>

#include "r2dp/linear_combo.h"
#include "r2dp/mechanisms.h"
#include "r2dp/mgf_distribution.h"
#include "r2dp/optimizer.h"

namespace r2dp {

std::string FormatNumber(double value);
double ParseNumber(std::string_view text);  // accepts inf

std::string FormatDist(const MgfDist& dist);
MgfDist ParseDist(std::string_view text);

std::string FormatCombo(const LinearCombo& combo);
LinearCombo ParseCombo(std::string_view text);

std::string FormatMechanism(const NoiseMechanism& mechanism);
NoiseMechanism ParseMechanism(std::string_view text);

// INI record with a [mechanism] and a [diagnostics] section.
void WriteCalibratedRecord(const CalibratedMechanism& result, std::ostream& out);
CalibratedMechanism ReadCalibratedRecord(std::istream& in);

}  // namespace r2dp

#endif  // R2DP_SERIALIZATION_H_
