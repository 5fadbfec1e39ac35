// Copyright 2026 The lpmat Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// MA(1) walkthrough: simulate one Gram matrix, solve its limiting law and
// print the distance between the two.

#include <iostream>

#include "lpmat/distance.hpp"
#include "lpmat/lsd.hpp"
#include "lpmat/verify.hpp"

int main() {
  lpmat::ProcessSpec spec;
  spec.model = lpmat::MovingAverage{{0.5}};
  const lpmat::MatrixShape shape{256, 256};

  const auto sim = lpmat::simulate_spectrum(spec, shape, /*seed=*/7);
  const auto law = lpmat::solve_lsd(lpmat::spectral_density(spec), shape.y());

  std::cout << "eigenvalues in [" << sim.spectrum.min() << ", " << sim.spectrum.max() << "]\n"
            << "LSD support ~ [" << law.support.lo << ", " << law.support.hi << "]\n"
            << "KS(ESD, LSD) = "
            << lpmat::ks_distance(lpmat::CdfView::of(sim.spectrum), lpmat::lsd_cdf(law)) << '\n';
}
