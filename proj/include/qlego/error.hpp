// Copyright 2026 The QLego Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qlego {

/// Operand sizes disagree (qubit counts, leg counts, matrix shapes).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Text input that does not follow one of the documented file formats.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A combinatorial search would exceed its configured budget.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// API misuse: contracting a leg twice, assigning a closed leg, and so on.
struct UsageError : std::logic_error {
    using std::logic_error::logic_error;
};

/// A contraction whose projected group contains -I, i.e. the glued tensor vanishes.
struct DegenerateContraction : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Logical legs chosen so that no split into stabilizers and logical pairs exists.
struct InvalidAssignment : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Too many qubits for an engine, or a layout too small for a circuit.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A gate the selected engine cannot execute.
struct UnsupportedGate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Incompatible combination of engine, noise model and options.
struct ConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A backend refused a job (capability or connectivity mismatch).
struct RejectedJob : ConfigurationError {
    using ConfigurationError::ConfigurationError;
};

/// Persisted data is missing or does not match its recorded hash.
struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fit inputs that cannot determine the model.
struct IdentifiabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A value outside the domain of the requested computation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace qlego
