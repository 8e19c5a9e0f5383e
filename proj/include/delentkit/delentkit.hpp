// Copyright 2026 The delentkit Authors
// SPDX-License-Identifier: Apache-2.0
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

#ifndef DELENTKIT_DELENTKIT_HPP
#define DELENTKIT_DELENTKIT_HPP

#include "delentkit/bench.hpp"
#include "delentkit/digest.hpp"
#include "delentkit/error.hpp"
#include "delentkit/fid.hpp"
#include "delentkit/format.hpp"
#include "delentkit/image.hpp"
#include "delentkit/metrics.hpp"
#include "delentkit/pipeline.hpp"
#include "delentkit/record_store.hpp"
#include "delentkit/stats.hpp"

#endif  // DELENTKIT_DELENTKIT_HPP
