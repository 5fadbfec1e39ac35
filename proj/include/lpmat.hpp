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

// Umbrella header.

#pragma once

#include "lpmat/cli.hpp"
#include "lpmat/distance.hpp"
#include "lpmat/error.hpp"
#include "lpmat/lsd.hpp"
#include "lpmat/marchenko_pastur.hpp"
#include "lpmat/matrix.hpp"
#include "lpmat/process.hpp"
#include "lpmat/process_json.hpp"
#include "lpmat/random.hpp"
#include "lpmat/report_json.hpp"
#include "lpmat/spectra.hpp"
#include "lpmat/verify.hpp"
