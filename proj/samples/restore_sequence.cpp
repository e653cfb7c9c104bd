// Copyright 2026 The fqt Authors. All Rights Reserved.
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

// Restores a short synthetic clip and reports PSNR against the original.
//
//   fqt_sample [scheme]

#include <iostream>
#include <string>

#include "fqt/fqt.hpp"

int main(int argc, char** argv) {
  fqt::PipelineConfig cfg;
  if (argc > 1) {
    const auto scheme = fqt::parse_scheme(argv[1]);
    if (!scheme) {
      std::cerr << "unknown scheme; expected one of " << fqt::scheme_list() << '\n';
      return 2;
    }
    cfg.scheme = *scheme;
  }

  fqt::Rng rng(11);
  std::vector<fqt::Tensor> hr;
  for (int t = 0; t < 3; ++t) hr.push_back(fqt::random_uniform<float>({3, 128, 128}, rng));
  const auto lr = fqt::degrade_sequence(hr, fqt::DegradeConfig{4, 6.0 / 255.0, 8});

  const fqt::ModelWeights weights = fqt::seeded_weights(cfg.weight_dims(64, false), 7);
  const auto sr = fqt::run_sequence(lr, nullptr, weights, cfg);

  for (std::size_t t = 0; t < sr.size(); ++t) {
    std::cout << "frame " << t + 1 << ": " << fqt::shape_string(lr[t].shape()) << " -> "
              << fqt::shape_string(sr[t].shape()) << ", PSNR " << fqt::psnr(sr[t], hr[t])
              << " dB\n";
  }
}
