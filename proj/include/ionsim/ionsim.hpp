// Copyright 2026 The ionsim Authors
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

#ifndef IONSIM_IONSIM_HPP
#define IONSIM_IONSIM_HPP

#include "ionsim/dynamics.hpp"
#include "ionsim/linalg.hpp"
#include "ionsim/motional.hpp"
#include "ionsim/protocol.hpp"

#endif // IONSIM_IONSIM_HPP
