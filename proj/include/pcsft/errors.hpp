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

#include <stdexcept>
#include <string>

namespace pcsft {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct NonHermitianError : Error {
    using Error::Error;
};

struct NotPositiveSemidefiniteError : Error {
    using Error::Error;
};

struct EmptyBatchError : Error {
    using Error::Error;
};

struct DegenerateEnsembleError : Error {
    using Error::Error;
};

struct InvalidScaleError : Error {
    using Error::Error;
};

struct NotAQuadraticFormError : Error {
    using Error::Error;
};

struct GridMismatchError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace pcsft
