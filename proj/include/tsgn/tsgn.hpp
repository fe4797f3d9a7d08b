// Copyright 2026 The TSGN Authors
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

#pragma once

#include "tsgn/common.hpp"
#include "tsgn/embed.hpp"
#include "tsgn/eval.hpp"
#include "tsgn/features.hpp"
#include "tsgn/fetch.hpp"
#include "tsgn/forest.hpp"
#include "tsgn/graph.hpp"
#include "tsgn/ingest.hpp"
#include "tsgn/io.hpp"
#include "tsgn/pipeline.hpp"
#include "tsgn/synth.hpp"
#include "tsgn/transform.hpp"
