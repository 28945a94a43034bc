// SPDX-License-Identifier: Apache-2.0
//
// harqfbl: finite-blocklength HARQ analysis toolkit
// Copyright (C) 2026 The harqfbl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef HARQ_ERROR_HPP
#define HARQ_ERROR_HPP

#include <stdexcept>
#include <string>

namespace harq {

// Error taxonomy. The CLI maps each class to a distinct exit status.

/// Argument outside the mathematical domain of an operation (negative SNR,
/// non-finite input, empty transmission list, ...).
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A model could not be constructed from otherwise well-formed parameters,
/// e.g. the time block outlasts a fading state.
class construction_error : public std::runtime_error {
public:
    explicit construction_error(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solve failed to converge.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// A configured budget (path count, lattice size, trace length) was exceeded.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent run configuration.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace harq

#endif // HARQ_ERROR_HPP
