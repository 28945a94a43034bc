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

#ifndef HARQ_HARQ_HPP
#define HARQ_HARQ_HPP

#include "harq/config.hpp"
#include "harq/delay.hpp"
#include "harq/error.hpp"
#include "harq/fading.hpp"
#include "harq/fbl.hpp"
#include "harq/fsmc.hpp"
#include "harq/io.hpp"
#include "harq/montecarlo.hpp"
#include "harq/optimizer.hpp"
#include "harq/outcomes.hpp"
#include "harq/random.hpp"

#endif // HARQ_HARQ_HPP
