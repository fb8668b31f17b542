// Copyright 2026 The pcsft Authors.

// Licensed under the Apache License, Version 2.0 (the License);
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

// http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an AS IS BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include "pcsft/correspondence.hpp"
#include "pcsft/ensemble.hpp"
#include "pcsft/errors.hpp"
#include "pcsft/experiment.hpp"
#include "pcsft/gridfield.hpp"
#include "pcsft/hilbert.hpp"
#include "pcsft/io.hpp"
#include "pcsft/montecarlo.hpp"
#include "pcsft/rng.hpp"
