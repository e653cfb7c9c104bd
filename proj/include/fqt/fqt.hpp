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

#ifndef FQT_FQT_HPP_
#define FQT_FQT_HPP_

#include "fqt/attention.hpp"
#include "fqt/compressor.hpp"
#include "fqt/config.hpp"
#include "fqt/dct.hpp"
#include "fqt/dumps.hpp"
#include "fqt/error.hpp"
#include "fqt/gradcheck.hpp"
#include "fqt/image_io.hpp"
#include "fqt/metrics.hpp"
#include "fqt/numerics.hpp"
#include "fqt/parallel.hpp"
#include "fqt/pipeline.hpp"
#include "fqt/random.hpp"
#include "fqt/tensor.hpp"
#include "fqt/tensor_io.hpp"
#include "fqt/tokenizer.hpp"
#include "fqt/upsampler.hpp"
#include "fqt/weights.hpp"

#endif  // FQT_FQT_HPP_
